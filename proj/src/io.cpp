#include "sparsepred/io.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <sstream>
#include <stdexcept>

namespace sparsepred::io {

std::string format_double(double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

namespace {

double parse_double(const std::string& s) {
  if (s == "inf") return std::numeric_limits<double>::infinity();
  if (s == "-inf") return -std::numeric_limits<double>::infinity();
  if (s == "nan") return std::numeric_limits<double>::quiet_NaN();
  std::size_t used = 0;
  const double v = std::stod(s, &used);
  if (used != s.size()) throw std::invalid_argument("bad number '" + s + "'");
  return v;
}

double json_double(const nlohmann::ordered_json& j, double null_value) {
  return j.is_null() ? null_value : j.get<double>();
}

void dump(const nlohmann::ordered_json& v, int indent, int depth, std::string& out) {
  const auto newline = [&](int d) {
    if (indent < 0) return;
    out += '\n';
    out.append(static_cast<std::size_t>(indent * d), ' ');
  };
  switch (v.type()) {
    case nlohmann::json::value_t::object: {
      if (v.empty()) {
        out += "{}";
        return;
      }
      out += '{';
      bool first = true;
      for (auto it = v.begin(); it != v.end(); ++it) {
        if (!first) out += ',';
        first = false;
        newline(depth + 1);
        out += nlohmann::ordered_json(it.key()).dump();
        out += indent < 0 ? ":" : ": ";
        dump(it.value(), indent, depth + 1, out);
      }
      newline(depth);
      out += '}';
      return;
    }
    case nlohmann::json::value_t::array: {
      if (v.empty()) {
        out += "[]";
        return;
      }
      // scalar arrays stay on one line
      bool flat = true;
      for (const auto& e : v) flat = flat && !e.is_structured();
      out += '[';
      for (std::size_t i = 0; i < v.size(); ++i) {
        if (i) out += flat ? ", " : ",";
        if (!flat) newline(depth + 1);
        dump(v[i], indent, depth + 1, out);
      }
      if (!flat) newline(depth);
      out += ']';
      return;
    }
    case nlohmann::json::value_t::number_float: {
      const double x = v.get<double>();
      out += std::isfinite(x) ? format_double(x) : "null";
      return;
    }
    default:
      out += v.dump();
  }
}

}  // namespace

std::string dump_json(const nlohmann::ordered_json& value, int indent) {
  std::string out;
  dump(value, indent, 0, out);
  out += '\n';
  return out;
}

nlohmann::ordered_json prior_to_json(const DiscretePriord& prior) {
  nlohmann::ordered_json j;
  j["family"] = std::string(family_label(prior.family));
  j["eta"] = prior.eta;
  j["r"] = prior.r;
  j["origin_log_mass"] = prior.origin_log_mass;
  auto atoms = nlohmann::ordered_json::array();
  for (const auto& a : prior.atoms) {
    atoms.push_back({{"loc", a.location}, {"log_w", a.log_weight}, {"cluster", a.cluster_index},
                     {"within", a.within_index}});
  }
  j["atoms"] = std::move(atoms);
  j["truncation"] = {{"max_cluster", prior.truncation.max_cluster},
                     {"dropped_log_mass", prior.truncation.dropped_log_mass}};
  j["notes"] = prior.notes;
  return j;
}

DiscretePriord prior_from_json(const nlohmann::ordered_json& j) {
  constexpr double neg_inf = -std::numeric_limits<double>::infinity();
  DiscretePriord prior;
  prior.family = parse_family(j.at("family").get<std::string>());
  prior.eta = j.at("eta").get<double>();
  prior.r = j.at("r").get<double>();
  prior.origin_log_mass = json_double(j.at("origin_log_mass"), neg_inf);
  for (const auto& a : j.at("atoms")) {
    prior.atoms.push_back({a.at("loc").get<double>(), json_double(a.at("log_w"), neg_inf),
                           a.at("cluster").get<int>(), a.at("within").get<int>()});
  }
  const auto& t = j.at("truncation");
  prior.truncation.max_cluster = t.at("max_cluster").get<int>();
  prior.truncation.dropped_log_mass = json_double(t.at("dropped_log_mass"), neg_inf);
  if (j.contains("notes")) prior.notes = j.at("notes").get<std::vector<std::string>>();
  return prior;
}

nlohmann::ordered_json mixture_to_json(const GaussianMixtured& mix) {
  auto comps = nlohmann::ordered_json::array();
  for (Eigen::Index i = 0; i < mix.size(); ++i) {
    comps.push_back({{"mean", mix.mean(i)}, {"variance", mix.variance(i)}, {"log_weight", mix.log_weight(i)}});
  }
  return {{"components", std::move(comps)}};
}

GaussianMixtured mixture_from_json(const nlohmann::ordered_json& j) {
  const auto& comps = j.at("components");
  const auto n = static_cast<Eigen::Index>(comps.size());
  GaussianMixtured mix{ArrayXd(n), ArrayXd(n), ArrayXd(n)};
  for (Eigen::Index i = 0; i < n; ++i) {
    const auto& c = comps[static_cast<std::size_t>(i)];
    mix.mean(i) = c.at("mean").get<double>();
    mix.variance(i) = c.at("variance").get<double>();
    mix.log_weight(i) = json_double(c.at("log_weight"), -std::numeric_limits<double>::infinity());
  }
  return mix;
}

std::string profile_to_csv(const RiskProfiled& profile) {
  std::string out = "theta,risk,benchmark\n";
  const std::string bench = format_double(profile.benchmark);
  for (Eigen::Index i = 0; i < profile.theta_grid.size(); ++i) {
    out += format_double(profile.theta_grid(i));
    out += ',';
    out += format_double(profile.risk_values(i));
    out += ',';
    out += bench;
    out += '\n';
  }
  return out;
}

RiskProfiled profile_from_csv(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  if (!std::getline(in, line) || line != "theta,risk,benchmark")
    throw std::invalid_argument("profile CSV must start with header theta,risk,benchmark");
  std::vector<double> theta, risk;
  double bench = std::numeric_limits<double>::quiet_NaN();
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::istringstream row(line);
    std::string a, b, c;
    if (!std::getline(row, a, ',') || !std::getline(row, b, ',') || !std::getline(row, c))
      throw std::invalid_argument("profile CSV row needs three fields: " + line);
    theta.push_back(parse_double(a));
    risk.push_back(parse_double(b));
    bench = parse_double(c);
  }
  RiskProfiled p;
  p.theta_grid = Eigen::Map<const ArrayXd>(theta.data(), static_cast<Eigen::Index>(theta.size()));
  p.risk_values = Eigen::Map<const ArrayXd>(risk.data(), static_cast<Eigen::Index>(risk.size()));
  p.benchmark = bench;
  if (!risk.empty()) {
    Eigen::Index best = 0;
    for (Eigen::Index i = 1; i < p.risk_values.size(); ++i) {
      if (p.risk_values(i) > p.risk_values(best)) best = i;
    }
    p.sup_theta = p.theta_grid(best);
    p.sup_risk = p.risk_values(best);
  }
  return p;
}

nlohmann::ordered_json profile_sidecar(const RiskProfiled& profile, const ModelParamsd& p,
                                       const std::vector<double>& support_points) {
  nlohmann::ordered_json j;
  j["eta"] = p.eta;
  j["r"] = p.r;
  j["v_x"] = p.v_x;
  j["lambda_e"] = p.lambda_e;
  j["lambda_f"] = p.lambda_f;
  j["benchmark"] = profile.benchmark;
  j["sup_theta"] = profile.sup_theta;
  j["sup_risk"] = profile.sup_risk;
  j["quotient"] = profile.quotient();
  j["support_points"] = support_points;
  j["warnings"] = profile.warnings;
  return j;
}

void write_text_file(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open '" + path + "' for writing");
  out << text;
  if (!out) throw std::runtime_error("failed writing '" + path + "'");
}

std::string read_text_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open '" + path + "'");
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

}  // namespace sparsepred::io
