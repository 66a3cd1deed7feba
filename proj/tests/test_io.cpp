#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <filesystem>

#include "sparsepred/io.hpp"

using namespace sparsepred;
using json = nlohmann::ordered_json;

TEST_CASE("float formatting") {
  CHECK(io::format_double(0.1) == "0.10000000000000001");
  CHECK(io::format_double(2.0) == "2");
  CHECK(io::format_double(-INFINITY) == "-inf");
  const double x = 1.0 / 3;
  CHECK(std::stod(io::format_double(x)) == x);
  CHECK(io::dump_json(json{{"a", -INFINITY}}, -1) == "{\"a\":null}\n");
  CHECK(io::dump_json(json{{"v", {1.5, 2.25}}}, 2) == "{\n  \"v\": [1.5, 2.25]\n}\n");
}

TEST_CASE("prior JSON round trip") {
  for (const auto& p : {make_params(0.01, 0.25), make_params(1e-10, 1.0)}) {
    for (const auto& prior : {build_pi_C(p), build_pi_BG(p), build_pi_TC(p), pure_spike_prior(p)}) {
      const std::string text = io::dump_json(io::prior_to_json(prior));
      const auto back = io::prior_from_json(json::parse(text));
      CHECK(back.family == prior.family);
      CHECK(back.eta == prior.eta);
      CHECK(back.origin_log_mass == prior.origin_log_mass);
      REQUIRE(back.atoms.size() == prior.atoms.size());
      for (std::size_t i = 0; i < prior.atoms.size(); ++i) {
        CHECK(back.atoms[i].location == prior.atoms[i].location);
        CHECK(back.atoms[i].log_weight == prior.atoms[i].log_weight);
        CHECK(back.atoms[i].cluster_index == prior.atoms[i].cluster_index);
        CHECK(back.atoms[i].within_index == prior.atoms[i].within_index);
      }
      CHECK(back.truncation.dropped_log_mass == prior.truncation.dropped_log_mass);
      CHECK(io::dump_json(io::prior_to_json(back)) == text);
    }
  }
}

TEST_CASE("mixture JSON round trip") {
  const auto p = make_params(0.01, 0.5);
  const auto mix = posterior_predictive(build_pi_C(p, 2), 1.7, p);
  const std::string text = io::dump_json(io::mixture_to_json(mix));
  const auto back = io::mixture_from_json(json::parse(text));
  CHECK((back.mean == mix.mean).all());
  CHECK((back.variance == mix.variance).all());
  CHECK((back.log_weight == mix.log_weight).all());
  CHECK(io::dump_json(io::mixture_to_json(back)) == text);
}

TEST_CASE("profile CSV round trip") {
  RiskProfiled prof;
  prof.theta_grid = ArrayXd::LinSpaced(5, 0.0, 2.0);
  prof.risk_values = ArrayXd(5);
  prof.risk_values << 0.01, 0.3, 1.0 / 3, 0.2, 0.1;
  prof.benchmark = std::log(100.0) / 2;
  const std::string text = io::profile_to_csv(prof);
  CHECK(text.rfind("theta,risk,benchmark\n0,0.01,2.3025850929940459\n", 0) == 0);
  const auto back = io::profile_from_csv(text);
  CHECK((back.theta_grid == prof.theta_grid).all());
  CHECK((back.risk_values == prof.risk_values).all());
  CHECK(back.benchmark == prof.benchmark);
  CHECK(back.sup_theta == 1.0);
  CHECK(io::profile_to_csv(back) == text);
  CHECK_THROWS(io::profile_from_csv("x,y\n1,2\n"));
  CHECK_THROWS(io::profile_from_csv("theta,risk,benchmark\n1,2\n"));
  CHECK_THROWS(io::profile_from_csv("theta,risk,benchmark\n1,2,3x\n"));
}

TEST_CASE("profile sidecar") {
  const auto p = make_params(0.01, 1.0);
  RiskProfiled prof;
  prof.theta_grid = ArrayXd::LinSpaced(2, 0.0, 1.0);
  prof.risk_values = ArrayXd::Constant(2, 0.5);
  prof.benchmark = p.benchmark();
  prof.sup_risk = 0.5;
  prof.warnings = {"w"};
  const auto j = io::profile_sidecar(prof, p, {p.lambda_f, 2 * p.lambda_f});
  CHECK(j.at("support_points").size() == 2);
  CHECK(j.at("lambda_e").get<double>() == p.lambda_e);
  CHECK(j.at("quotient").get<double>() == doctest::Approx(0.5 / p.benchmark()));
  CHECK(j.at("warnings")[0] == "w");
}

TEST_CASE("text files") {
  const auto path = std::filesystem::temp_directory_path() / "sparsepred_io_test.txt";
  io::write_text_file(path.string(), "abc\n");
  CHECK(io::read_text_file(path.string()) == "abc\n");
  std::filesystem::remove(path);
  CHECK_THROWS(io::read_text_file(path.string()));
  CHECK_THROWS(io::write_text_file("/nonexistent_dir_for_test/x.txt", "a"));
}
