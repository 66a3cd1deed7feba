#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "sparsepred/model.hpp"

using namespace sparsepred;

namespace {

// mass in the atoms plus the reported tail, which must add to one
double accounted_mass(const DiscretePriord& prior) {
  return std::exp(prior.total_log_mass()) + std::exp(prior.truncation.dropped_log_mass);
}

}  // namespace

TEST_CASE("model constants") {
  const auto p = make_params(0.01, 1.0);
  CHECK(p.v == doctest::Approx(0.5));
  CHECK(p.lambda_e == doctest::Approx(std::sqrt(2 * std::log(100.0))).epsilon(1e-15));
  CHECK(p.lambda_f == doctest::Approx(p.lambda_e / std::sqrt(2.0)).epsilon(1e-15));
  CHECK(p.benchmark() == doctest::Approx(std::log(100.0) / 2).epsilon(1e-14));

  const auto q = make_params(1e-5, 0.25, 2.0);
  CHECK(q.v_y == doctest::Approx(0.5));
  CHECK(q.v == doctest::Approx(0.2));
  CHECK(q.lambda_e == doctest::Approx(std::sqrt(4 * std::log(1e5))));
  CHECK(q.benchmark() == doctest::Approx(std::log(1e5) / 1.25));
}

TEST_CASE("model parameters reject bad input") {
  CHECK_THROWS_AS(make_params(0.0, 1.0), DomainError);
  CHECK_THROWS_AS(make_params(1.0, 1.0), DomainError);
  CHECK_THROWS_AS(make_params(0.1, 0.0), DomainError);
  CHECK_THROWS_AS(make_params(0.1, -1.0), DomainError);
  CHECK_THROWS_AS(make_params(0.1, 1.0, 0.0), DomainError);
}

TEST_CASE("cluster size follows the r bands") {
  // upper r boundary of each band and the K inside it
  const double bounds[] = {0.0654, 0.0759, 0.0910, 0.1150, 0.1601, 0.2826, 0.5};
  const int sizes[] = {8, 7, 6, 5, 4, 3, 2};
  for (int i = 0; i < 7; ++i) {
    CAPTURE(bounds[i]);
    CHECK(cluster_size(bounds[i] - 1e-3) == sizes[i]);
  }
  // exactly r = 1/2 is supercritical
  CHECK(cluster_size(0.5) == 1);
  CHECK(cluster_size(0.75) == 1);
  CHECK(cluster_size(5.0) == 1);
  CHECK(cluster_size(0.25) == 3);
  CHECK(cluster_size(0.1) == 5);
  CHECK_THROWS_AS(cluster_size(0.0), DomainError);
}

TEST_CASE("pi_C layout for r = 0.25") {
  const auto p = make_params(0.01, 0.25);
  const auto prior = build_pi_C(p, 3);
  CHECK(prior.family == PriorFamily::PiC);
  REQUIRE(prior.atoms.size() == 18);
  CHECK(validate_prior(prior, p.lambda_e).empty());
  // first positive cluster: lambda_f, 2 lambda_f and the clipped lambda_e
  const auto& a = prior.atoms;
  CHECK(a[9].location == doctest::Approx(p.lambda_f));
  CHECK(a[10].location == doctest::Approx(2 * p.lambda_f));
  CHECK(a[11].location == doctest::Approx(p.lambda_e));
  CHECK(a[12].location == doctest::Approx(p.lambda_e + p.lambda_f));
  CHECK(a[9].cluster_index == 1);
  CHECK(a[12].cluster_index == 2);
  CHECK(a[11].within_index == 3);
  const double w1 = std::log((1 - p.eta) / 2 / 3) + std::log(p.eta);
  CHECK(a[9].log_weight == doctest::Approx(w1));
  CHECK(a[12].log_weight == doctest::Approx(w1 + std::log(p.eta)));
  CHECK(accounted_mass(prior) == doctest::Approx(1.0).epsilon(1e-14));
}

TEST_CASE("pi_C for r >= 1/2 is a lambda_f grid") {
  const auto p = make_params(1e-5, 1.0);
  const auto prior = build_pi_C(p, 4);
  REQUIRE(prior.atoms.size() == 8);
  for (int i = 0; i < 4; ++i) CHECK(prior.atoms[4 + i].location == doctest::Approx((i + 1) * p.lambda_f));
  CHECK(prior.origin_log_mass == doctest::Approx(std::log1p(-1e-5)));
}

TEST_CASE("default truncation reaches past the search window") {
  for (double eta : {0.1, 0.01, 1e-10}) {
    for (double r : {1.0, 0.5, 0.25, 0.1}) {
      const auto p = make_params(eta, r);
      CAPTURE(eta);
      CAPTURE(r);
      for (const auto& prior : {build_pi_C(p), build_pi_EG(p), build_pi_PG(p), build_pi_BG(p)}) {
        CHECK(prior.max_abs_location() >= default_reach(p));
        CHECK(prior.truncation.dropped_log_mass < -60.0);
        CHECK(validate_prior(prior, p.lambda_e).empty());
      }
    }
  }
}

TEST_CASE("grid priors account for all mass") {
  const auto p = make_params(0.01, 0.1);
  CHECK(accounted_mass(build_pi_EG(p, 5)) == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(accounted_mass(build_pi_PG(p, 7)) == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(accounted_mass(build_pi_BG(p, 3)) == doctest::Approx(1.0).epsilon(1e-14));

  const auto eg = build_pi_EG(p, 2);
  REQUIRE(eg.atoms.size() == 4);
  CHECK(eg.atoms[2].location == doctest::Approx(p.lambda_e));
  CHECK(eg.atoms[3].location == doctest::Approx(2 * p.lambda_e));
  CHECK(eg.atoms[3].log_weight == doctest::Approx(std::log((1 - p.eta) / 2) + 2 * std::log(p.eta)));

  const auto pg = build_pi_PG(p, 3);
  const double decay = p.v * std::log(p.eta);
  CHECK(pg.atoms[3].location == doctest::Approx(p.lambda_f));
  CHECK(pg.atoms[4].log_weight - pg.atoms[3].log_weight == doctest::Approx(decay));
}

TEST_CASE("bi-grid shape") {
  auto s = bi_grid_shape(1.0);
  CHECK(s.b == doctest::Approx(1.0));
  CHECK(s.inner_count == 3);
  s = bi_grid_shape(0.1);
  const double b = 0.4 * 1.1 / 1.2;
  CHECK(s.b == doctest::Approx(b));
  CHECK(s.inner_count == 1 + static_cast<int>(std::ceil(2 * std::pow(b, -1.5))));

  const auto p = make_params(0.01, 0.1);
  const auto prior = build_pi_BG(p, 2);
  const int J = s.inner_count;
  REQUIRE(static_cast<int>(prior.atoms.size()) == 2 * (J + 2));
  const std::size_t first = prior.atoms.size() / 2;
  CHECK(prior.atoms[first].location == doctest::Approx(p.lambda_f));
  CHECK(prior.atoms[first + 1].location == doctest::Approx(p.lambda_f * (1 + b)));
  CHECK(prior.atoms[first + J].location - prior.atoms[first + J - 1].location == doctest::Approx(p.lambda_f));
}

TEST_CASE("two-cluster prior is bounded at lambda_e") {
  const auto p = make_params(0.001, 0.1);
  const auto prior = build_pi_TC(p);
  CHECK(prior.truncation.dropped_log_mass == -INFINITY);
  CHECK(std::exp(prior.total_log_mass()) == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(prior.max_abs_location() <= p.lambda_e * (1 + 1e-15));
  CHECK(validate_prior(prior, p.lambda_e).empty());
  CHECK(truncated_cluster_size(0.25) == 2);
  CHECK(truncated_cluster_size(1.0) == 1);
}

TEST_CASE("coincident clipped atoms are merged with a note") {
  // more atoms than K puts several offsets past lambda_e
  const auto p = make_params(0.01, 0.06);
  const auto prior = build_cluster_prior(p, 1 + 4 * p.r, cluster_size(0.06) + 3, 2);
  CHECK(prior.atoms.size() == 2 * 2 * static_cast<std::size_t>(cluster_size(0.06)));
  CHECK(validate_prior(prior, p.lambda_e).empty());
  CHECK_FALSE(prior.notes.empty());
  CHECK(accounted_mass(prior) == doctest::Approx(1.0).epsilon(1e-13));
}

TEST_CASE("pure spike and validation failures") {
  const auto p = make_params(0.01, 1.0);
  const auto spike = pure_spike_prior(p);
  CHECK(spike.atoms.empty());
  CHECK(spike.total_log_mass() == 0.0);
  CHECK(validate_prior(spike, p.lambda_e).empty());

  auto broken = build_pi_C(p, 2);
  broken.atoms.back().log_weight += 0.1;
  CHECK(validate_prior(broken, p.lambda_e) == "prior not symmetric");
  auto unsorted = build_pi_C(p, 2);
  std::swap(unsorted.atoms[0], unsorted.atoms[1]);
  CHECK_FALSE(validate_prior(unsorted, p.lambda_e).empty());
  CHECK_THROWS_AS(build_pi_C(p, 0), PreconditionError);
  CHECK_THROWS_AS(build_cluster_prior(p, 0.5, 2, 2), PreconditionError);
  CHECK(parse_family("BG") == PriorFamily::BiGrid);
  CHECK_THROWS_AS(parse_family("XX"), PreconditionError);
}
