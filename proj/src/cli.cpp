#include "sparsepred/cli.hpp"

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <limits>
#include <ostream>
#include <set>
#include <stdexcept>

#include <CLI11.hpp>

#include "sparsepred/io.hpp"
#include "sparsepred/risk.hpp"
#include "sparsepred/theory.hpp"

namespace sparsepred::cli {

namespace {

using json = nlohmann::ordered_json;
constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct Options {
  std::vector<double> eta;
  std::vector<double> r;
  std::vector<std::string> rules;
  int nodes = 201;
  std::string scheme = "gh";
  std::string theta_max;
  int max_cluster = 0;  // 0 keeps the automatic truncation
  std::string out;
  std::string format = "csv";
  bool strict = false;
  std::string config;
  std::string dump_predictive;
  double plugin_threshold_le = 1.0;
  double sus_half_width_le = 3.0;
  bool compare_k1 = false;
  std::set<std::string> given;  // option names set by flag or config file
};

std::string fixed4(double x) {
  if (!std::isfinite(x)) return std::isnan(x) ? "ERR" : io::format_double(x);
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.4f", x);
  return buf;
}

std::string pad(const std::string& s, std::size_t width) {
  return s.size() >= width ? s + " " : std::string(width - s.size(), ' ') + s;
}

std::string short_number(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%g", x);
  return buf;
}

std::string display_name(RuleKind k) {
  switch (k) {
    case RuleKind::Clustered: return "Clustered";
    case RuleKind::ClusteredK1: return "Clustered-K1";
    case RuleKind::EGrid: return "E-Grid";
    case RuleKind::PGrid: return "P-Grid";
    case RuleKind::BiGrid: return "Bi-Grid";
    case RuleKind::Thresh: return "Thresh";
    case RuleKind::Plugin: return "Plugin";
    case RuleKind::Sus: return "SUS";
  }
  return "?";
}

void add_shared(CLI::App* sub, Options& o) {
  sub->add_option("--eta", o.eta, "Sparsity levels, comma separated")->delimiter(',');
  sub->add_option("--r", o.r, "Variance ratios v_y/v_x, comma separated")->delimiter(',');
  sub->add_option("--rule", o.rules, "clustered|clustered-k1|eg|pg|bg|thresh|plugin|sus")->delimiter(',');
  sub->add_option("--nodes", o.nodes, "Quadrature nodes per rule")->check(CLI::Range(21, 4001));
  sub->add_option("--scheme", o.scheme, "gh or adaptive")->check(CLI::IsMember({"gh", "adaptive"}));
  sub->add_option("--theta-max", o.theta_max, "Search window end; accepts le/lf suffix");
  sub->add_option("--max-cluster", o.max_cluster, "Clusters kept in truncated priors")
      ->check(CLI::PositiveNumber);
  sub->add_option("--out", o.out, "Data file path");
  sub->add_option("--format", o.format, "csv or json")->check(CLI::IsMember({"csv", "json"}));
  sub->add_flag("--strict", o.strict, "Fail when the supremum sits at the window boundary");
  sub->add_option("--config", o.config, "JSON config file; flags override it");
  sub->add_option("--plugin-threshold", o.plugin_threshold_le, "Plugin threshold in units of lambda_e");
  sub->add_option("--sus-half-width", o.sus_half_width_le, "SUS slab half-width in units of lambda_e");
}

template <typename T>
std::vector<T> as_list(const json& v) {
  if (v.is_array()) return v.get<std::vector<T>>();
  return {v.get<T>()};
}

void apply_config(CLI::App* sub, Options& o) {
  for (const auto* opt : sub->get_options()) {
    if (opt->count() > 0) {
      std::string name = opt->get_name();
      if (name.rfind("--", 0) == 0) name = name.substr(2);
      o.given.insert(name);
    }
  }
  if (o.config.empty()) return;
  json cfg;
  try {
    cfg = json::parse(io::read_text_file(o.config));
  } catch (const std::exception& e) {
    throw UsageError(std::string("config: ") + e.what());
  }
  if (!cfg.is_object()) throw UsageError("config file must hold a JSON object");
  try {
    for (auto it = cfg.begin(); it != cfg.end(); ++it) {
      std::string key = it.key();
      for (auto& c : key) c = c == '_' ? '-' : c;
      const auto& v = it.value();
      if (o.given.count(key)) continue;  // flags win
      if (key == "eta") o.eta = as_list<double>(v);
      else if (key == "r") o.r = as_list<double>(v);
      else if (key == "rule") o.rules = as_list<std::string>(v);
      else if (key == "nodes") o.nodes = v.get<int>();
      else if (key == "scheme") o.scheme = v.get<std::string>();
      else if (key == "theta-max") o.theta_max = v.is_string() ? v.get<std::string>() : io::format_double(v.get<double>());
      else if (key == "max-cluster") o.max_cluster = v.get<int>();
      else if (key == "out") o.out = v.get<std::string>();
      else if (key == "format") o.format = v.get<std::string>();
      else if (key == "strict") o.strict = v.get<bool>();
      else if (key == "plugin-threshold") o.plugin_threshold_le = v.get<double>();
      else if (key == "sus-half-width") o.sus_half_width_le = v.get<double>();
      else if (key == "compare-k1") o.compare_k1 = v.get<bool>();
      else throw UsageError("config: unknown key '" + it.key() + "'");
      o.given.insert(key);
    }
  } catch (const nlohmann::json::exception& e) {
    throw UsageError(std::string("config: ") + e.what());
  }
  if (o.scheme != "gh" && o.scheme != "adaptive") throw UsageError("scheme must be gh or adaptive");
  if (o.format != "csv" && o.format != "json") throw UsageError("format must be csv or json");
  if (o.max_cluster < 0) throw UsageError("max-cluster must be positive");
}

void fill_default(Options& o, const std::vector<double>& eta, const std::vector<double>& r,
                  const std::vector<std::string>& rules) {
  if (!o.given.count("eta")) o.eta = eta;
  if (!o.given.count("r")) o.r = r;
  if (!o.given.count("rule")) o.rules = rules;
}

std::vector<RuleKind> validated_rules(const Options& o) {
  std::vector<RuleKind> kinds;
  for (const auto& label : o.rules) {
    if (label.empty()) continue;
    const auto k = parse_rule_kind(label);
    if (!k) throw UsageError("unknown rule '" + label + "'");
    kinds.push_back(*k);
  }
  if (kinds.empty()) throw UsageError("rule list is empty");
  return kinds;
}

void validate_common(const Options& o) {
  if (o.eta.empty()) throw UsageError("eta list is empty");
  if (o.r.empty()) throw UsageError("r list is empty");
  for (double e : o.eta) {
    if (!(e > 0 && e < 1)) throw UsageError("eta must lie in (0, 1), got " + short_number(e));
  }
  for (double r : o.r) {
    if (!(r > 0) || !std::isfinite(r)) throw UsageError("r must be positive, got " + short_number(r));
  }
  if (!o.out.empty()) {
    namespace fs = std::filesystem;
    const fs::path path(o.out);
    std::error_code ec;
    if (fs::is_directory(path, ec)) throw UsageError("--out names a directory: " + o.out);
    const auto parent = path.parent_path();
    if (!parent.empty() && !fs::is_directory(parent, ec))
      throw UsageError("--out directory does not exist: " + parent.string());
  }
}

QuadratureSpec make_quad(const Options& o) {
  QuadratureSpec q;
  q.scheme = o.scheme == "adaptive" ? QuadratureScheme::Adaptive : QuadratureScheme::GaussHermite;
  q.node_count = o.nodes;
  try {
    q.validate();
  } catch (const std::exception& e) {
    throw UsageError(e.what());
  }
  return q;
}

RuleOptions make_rule_options(const Options& o, const ModelParamsd& p) {
  RuleOptions opt;
  if (o.max_cluster > 0) opt.max_cluster = o.max_cluster;
  if (!o.theta_max.empty()) opt.reach = parse_theta_max(o.theta_max, p.lambda_e, p.lambda_f);
  opt.plugin_threshold_le = o.plugin_threshold_le;
  opt.sus_half_width_le = o.sus_half_width_le;
  return opt;
}

SupSearch make_search(const Options& o, const ModelParamsd& p) {
  auto s = default_search(p);
  if (!o.theta_max.empty()) s.theta_max = parse_theta_max(o.theta_max, p.lambda_e, p.lambda_f);
  s.strict = o.strict;
  return s;
}

void check_theta_max(const Options& o) {
  if (o.theta_max.empty()) return;
  try {
    if (!(parse_theta_max(o.theta_max, 1.0, 1.0) > 0)) throw UsageError("--theta-max must be positive");
  } catch (const std::invalid_argument& e) {
    throw UsageError(e.what());
  }
}

void emit(const Options& o, std::ostream& out, const std::string& text) {
  if (o.out.empty()) {
    out << text;
  } else {
    io::write_text_file(o.out, text);
  }
}

// ---- table

int cmd_table(Options& o, std::ostream& out, std::ostream& err) {
  fill_default(o, {0.01, 1e-5, 1e-10}, {1, 0.5, 0.25, 0.1},
               {"plugin", "thresh", "eg", "pg", "bg", "sus", "clustered"});
  validate_common(o);
  check_theta_max(o);
  const auto kinds = validated_rules(o);
  const auto quad = make_quad(o);

  std::string header = pad("Sparsity", 10) + pad("r", 7) + pad("A-Theory", 10);
  for (auto k : kinds) header += pad(display_name(k), 13);
  out << header << '\n';

  struct Cell {
    double eta, r, a_theory, sup_theta, sup_risk, quotient;
    RuleKind kind;
    std::string status;
  };
  std::vector<Cell> cells;
  bool failed = false;
  for (double eta : o.eta) {
    for (double r : o.r) {
      const auto p = make_params(eta, r);
      const double a = p.benchmark();
      std::string line = pad(short_number(eta), 10) + pad(short_number(r), 7) + pad(fixed4(a), 10);
      for (auto k : kinds) {
        Cell c{eta, r, a, kNaN, kNaN, kNaN, k, "OK"};
        try {
          const auto rule = make_rule(k, p, make_rule_options(o, p));
          const auto prof = sup_risk(rule, p, make_search(o, p), quad);
          c.sup_theta = prof.sup_theta;
          c.sup_risk = prof.sup_risk;
          c.quotient = prof.quotient();
          for (const auto& w : prof.warnings) {
            err << "warning: eta=" << short_number(eta) << " r=" << short_number(r) << " " << rule_label(k)
                << ": " << w << '\n';
          }
        } catch (const std::exception& e) {
          c.status = "ERR";
          failed = true;
          err << "error: eta=" << short_number(eta) << " r=" << short_number(r) << " " << rule_label(k) << ": "
              << e.what() << '\n';
        }
        line += pad(c.status == "OK" ? fixed4(c.quotient) : "ERR", 13);
        cells.push_back(c);
      }
      out << line << '\n' << std::flush;
    }
  }

  if (!o.out.empty()) {
    std::string text;
    if (o.format == "csv") {
      text = "eta,r,rule,a_theory,sup_theta,sup_risk,quotient,status\n";
      for (const auto& c : cells) {
        text += io::format_double(c.eta) + "," + io::format_double(c.r) + "," + std::string(rule_label(c.kind)) +
                "," + io::format_double(c.a_theory) + "," + io::format_double(c.sup_theta) + "," +
                io::format_double(c.sup_risk) + "," + io::format_double(c.quotient) + "," + c.status + "\n";
      }
    } else {
      json arr = json::array();
      for (const auto& c : cells) {
        arr.push_back({{"eta", c.eta}, {"r", c.r}, {"rule", rule_label(c.kind)}, {"a_theory", c.a_theory},
                       {"sup_theta", c.sup_theta}, {"sup_risk", c.sup_risk}, {"quotient", c.quotient},
                       {"status", c.status}});
      }
      text = io::dump_json(json{{"cells", std::move(arr)}});
    }
    io::write_text_file(o.out, text);
  }
  return failed ? kComputationFailure : kSuccess;
}

// ---- profile

std::vector<double> support_points(const PredictiveRuled& rule, double theta_max) {
  const DiscretePriord* prior = nullptr;
  if (const auto* b = std::get_if<BayesRule<double>>(&rule)) prior = &b->prior;
  if (const auto* t = std::get_if<ThresholdedClusterRule<double>>(&rule)) prior = &t->inner;
  std::vector<double> pts;
  if (!prior) return pts;
  for (const auto& a : prior->atoms) {
    if (a.location > 0 && a.location <= theta_max) pts.push_back(a.location);
  }
  return pts;
}

double parse_dump_x(const std::string& text) {
  const std::string v = text.rfind("x=", 0) == 0 ? text.substr(2) : text;
  try {
    std::size_t used = 0;
    const double x = std::stod(v, &used);
    if (used != v.size()) throw std::invalid_argument(text);
    return x;
  } catch (const std::exception&) {
    throw UsageError("--dump-predictive expects x=<value>, got '" + text + "'");
  }
}

int cmd_profile(Options& o, std::ostream& out, std::ostream& err) {
  fill_default(o, {0.01}, {1}, {"clustered"});
  validate_common(o);
  check_theta_max(o);
  const auto kinds = validated_rules(o);
  if (o.eta.size() != 1 || o.r.size() != 1 || kinds.size() != 1)
    throw UsageError("profile needs exactly one eta, one r and one rule");
  const bool dump = !o.dump_predictive.empty();
  const double dump_x = dump ? parse_dump_x(o.dump_predictive) : 0;
  const auto quad = make_quad(o);
  const auto p = make_params(o.eta[0], o.r[0]);
  const auto rule = make_rule(kinds[0], p, make_rule_options(o, p));
  const auto search = make_search(o, p);

  RiskProfiled prof;
  try {
    prof = sup_risk(rule, p, search, quad);
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kComputationFailure;
  }
  for (const auto& w : prof.warnings) err << "warning: " << w << '\n';

  const auto sidecar = io::profile_sidecar(prof, p, support_points(rule, search.theta_max));
  if (o.format == "csv") {
    emit(o, out, io::profile_to_csv(prof));
  } else {
    json j = sidecar;
    j["theta"] = std::vector<double>(prof.theta_grid.begin(), prof.theta_grid.end());
    j["risk"] = std::vector<double>(prof.risk_values.begin(), prof.risk_values.end());
    emit(o, out, io::dump_json(j));
  }
  if (!o.out.empty()) {
    if (o.format == "csv") io::write_text_file(o.out + ".meta.json", io::dump_json(sidecar));
    out << "eta=" << short_number(p.eta) << " r=" << short_number(p.r) << " rule=" << rule_label(kinds[0])
        << " sup_theta=" << fixed4(prof.sup_theta) << " sup_risk=" << fixed4(prof.sup_risk)
        << " benchmark=" << fixed4(prof.benchmark) << " quotient=" << fixed4(prof.quotient()) << '\n';
  }
  if (dump) {
    json j = io::mixture_to_json(predictive_mixture(rule, dump_x, p));
    j["x"] = dump_x;
    const std::string text = io::dump_json(j);
    if (o.out.empty()) {
      out << text;
    } else {
      io::write_text_file(o.out + ".predictive.json", text);
    }
  }
  return kSuccess;
}

// ---- bayes-risk

int cmd_bayes_risk(Options& o, std::ostream& out, std::ostream& err) {
  fill_default(o, {0.01, 1e-5, 1e-10}, {1, 0.5, 0.25, 0.1}, {"clustered"});
  validate_common(o);
  check_theta_max(o);
  const auto kinds = validated_rules(o);
  for (auto k : kinds) {
    if (k == RuleKind::Plugin || k == RuleKind::Sus || k == RuleKind::Thresh)
      throw UsageError("bayes-risk needs a discrete-prior rule, not " + std::string(rule_label(k)));
  }
  const auto quad = make_quad(o);
  out << pad("Sparsity", 10) << pad("r", 7) << pad("rule", 14) << pad("B", 12) << pad("B/(eta A)", 11)
      << pad("limit", 9) << pad("tail", 12) << '\n';
  json rows = json::array();
  std::string csv = "eta,r,rule,bayes_risk,a_theory,ratio,theorem2_limit,tail_mass,tail_estimate,status\n";
  bool failed = false;
  for (double eta : o.eta) {
    for (double r : o.r) {
      for (auto k : kinds) {
        const auto p = make_params(eta, r);
        const double a = p.benchmark();
        const double limit = k == RuleKind::Clustered ? theorem2_ratio(r) : kNaN;
        BayesRiskResult<double> b{kNaN, kNaN, kNaN};
        std::string status = "OK";
        try {
          b = bayes_risk(make_prior(k, p, make_rule_options(o, p)), p, quad);
        } catch (const std::exception& e) {
          status = "ERR";
          failed = true;
          err << "error: eta=" << short_number(eta) << " r=" << short_number(r) << ": " << e.what() << '\n';
        }
        const double ratio = b.value / (eta * a);
        char tail[32], value[32];
        std::snprintf(tail, sizeof tail, "%.3e", b.tail_mass);
        std::snprintf(value, sizeof value, "%.4e", b.value);
        out << pad(short_number(eta), 10) << pad(short_number(r), 7) << pad(std::string(rule_label(k)), 14)
            << pad(status == "OK" ? value : "ERR", 12) << pad(fixed4(ratio), 11)
            << pad(std::isnan(limit) ? "-" : fixed4(limit), 9) << pad(tail, 12) << '\n';
        csv += io::format_double(eta) + "," + io::format_double(r) + "," + std::string(rule_label(k)) + "," +
               io::format_double(b.value) + "," + io::format_double(a) + "," + io::format_double(ratio) + "," +
               io::format_double(limit) + "," + io::format_double(b.tail_mass) + "," +
               io::format_double(b.tail_estimate) + "," + status + "\n";
        rows.push_back({{"eta", eta}, {"r", r}, {"rule", rule_label(k)}, {"bayes_risk", b.value},
                        {"a_theory", a}, {"ratio", ratio}, {"theorem2_limit", limit},
                        {"tail_mass", b.tail_mass}, {"tail_estimate", b.tail_estimate}, {"status", status}});
      }
    }
  }
  if (!o.out.empty()) {
    io::write_text_file(o.out, o.format == "csv" ? csv : io::dump_json(json{{"rows", std::move(rows)}}));
  }
  return failed ? kComputationFailure : kSuccess;
}

// ---- diagnostics

json root_json(const RootInterval& ri, double scale) {
  return {{"index", ri.index},
          {"alpha", ri.alpha / scale},
          {"beta", ri.beta / scale},
          {"target_lo", ri.target_lo / scale},
          {"target_hi", ri.target_hi / scale},
          {"covered", ri.covered}};
}

int cmd_diagnostics(Options& o, std::ostream& out, std::ostream& err) {
  fill_default(o, {1e-3, 1e-10}, {0.0654, 0.0759, 0.0910, 0.1150, 0.1601, 0.2826, 0.5, 1.0}, {"clustered"});
  validate_common(o);
  check_theta_max(o);
  const auto quad = make_quad(o);
  json doc;

  out << "Cluster sizes\n" << pad("r", 8) << pad("K_r", 5) << pad("K~_r", 6) << pad("B limit", 10) << '\n';
  json ktable = json::array();
  std::string csv = "r,K_r,K_tilde,theorem2_ratio\n";
  for (double r : o.r) {
    const int k = cluster_size(r);
    const int kt = truncated_cluster_size(r);
    const double t2 = theorem2_ratio(r);
    out << pad(short_number(r), 8) << pad(std::to_string(k), 5) << pad(std::to_string(kt), 6) << pad(fixed4(t2), 10)
        << '\n';
    ktable.push_back({{"r", r}, {"K_r", k}, {"K_tilde", kt}, {"theorem2_ratio", t2}});
    csv += io::format_double(r) + "," + std::to_string(k) + "," + std::to_string(kt) + "," + io::format_double(t2) +
           "\n";
  }
  doc["cluster_sizes"] = std::move(ktable);

  out << "\nRoot coverage (first cluster, units of lambda_f)\n";
  json coverage = json::array();
  for (double r : o.r) {
    if (!(r < 0.5)) continue;
    for (double eta : o.eta) {
      const auto p = make_params(eta, r);
      const auto roots = cluster_coverage_check(r, eta);
      bool all = true;
      json arr = json::array();
      for (const auto& ri : roots) {
        all = all && ri.covered;
        arr.push_back(root_json(ri, p.lambda_f));
      }
      out << "  r=" << short_number(r) << " eta=" << short_number(eta) << " K=" << roots.size()
          << (all ? " all covered" : " NOT covered") << '\n';
      coverage.push_back({{"r", r}, {"eta", eta}, {"all_covered", all}, {"roots", std::move(arr)}});
    }
  }
  doc["coverage"] = std::move(coverage);

  out << "\nForced K=1 gap analysis (offsets from mu_l, units of lambda_f)\n";
  json gaps = json::array();
  for (double r : o.r) {
    const double eta = o.eta.front();
    const auto p = make_params(eta, r);
    const auto g = k1_gap_analysis(r, eta);
    out << "  r=" << short_number(r) << " switch=" << fixed4(g.dominance_switch / p.lambda_f)
        << " beta_1=" << fixed4(g.roots[0].beta / p.lambda_f) << " alpha_2="
        << (g.roots[1].has_roots() ? fixed4(g.roots[1].alpha / p.lambda_f) : std::string("none"))
        << " gap=" << (g.gap_exists ? "yes" : "no") << '\n';
    json arr = json::array();
    for (const auto& ri : g.roots) arr.push_back(root_json(ri, p.lambda_f));
    gaps.push_back({{"r", r},
                    {"eta", eta},
                    {"dominance_switch", g.dominance_switch / p.lambda_f},
                    {"gap_exists", g.gap_exists},
                    {"roots", std::move(arr)}});
  }
  doc["k1_gap"] = std::move(gaps);

  json curve = json::array();
  double min_ratio = std::numeric_limits<double>::infinity();
  double argmin = 0;
  for (int i = 1; i <= 200; ++i) {
    const double r = i / 100.0;
    const double t = theorem2_ratio(r);
    curve.push_back({{"r", r}, {"ratio", t}});
    if (t < min_ratio) {
      min_ratio = t;
      argmin = r;
    }
  }
  out << "\nTheorem 2 ratio over r in [0.01, 2]: min " << fixed4(min_ratio) << " at r=" << short_number(argmin)
      << '\n';
  doc["theorem2_curve"] = std::move(curve);
  doc["theorem2_min"] = {{"r", argmin}, {"ratio", min_ratio}};

  bool failed = false;
  if (o.compare_k1) {
    out << "\nSup quotients, pi_C versus forced K=1\n";
    json cmp = json::array();
    for (double r : o.r) {
      if (!(r < 0.5)) continue;
      for (double eta : o.eta) {
        try {
          const auto p = make_params(eta, r);
          const auto opt = make_rule_options(o, p);
          const auto search = make_search(o, p);
          const double qc = sup_risk(make_rule(RuleKind::Clustered, p, opt), p, search, quad).quotient();
          const double q1 = sup_risk(make_rule(RuleKind::ClusteredK1, p, opt), p, search, quad).quotient();
          out << "  r=" << short_number(r) << " eta=" << short_number(eta) << " clustered=" << fixed4(qc)
              << " k1=" << fixed4(q1) << '\n';
          cmp.push_back({{"r", r}, {"eta", eta}, {"clustered", qc}, {"clustered_k1", q1}});
        } catch (const std::exception& e) {
          failed = true;
          err << "error: r=" << short_number(r) << " eta=" << short_number(eta) << ": " << e.what() << '\n';
        }
      }
    }
    doc["k1_comparison"] = std::move(cmp);
  }

  if (!o.out.empty()) io::write_text_file(o.out, o.format == "csv" ? csv : io::dump_json(doc));
  return failed ? kComputationFailure : kSuccess;
}

}  // namespace

double parse_theta_max(const std::string& text, double lambda_e, double lambda_f) {
  std::string num = text;
  double unit = 1;
  if (num.size() >= 2) {
    const std::string suffix = num.substr(num.size() - 2);
    if (suffix == "le" || suffix == "lf") {
      unit = suffix == "le" ? lambda_e : lambda_f;
      num.resize(num.size() - 2);
    }
  }
  std::size_t used = 0;
  double v = 0;
  try {
    v = std::stod(num, &used);
  } catch (const std::exception&) {
    throw std::invalid_argument("bad --theta-max '" + text + "'");
  }
  if (used != num.size()) throw std::invalid_argument("bad --theta-max '" + text + "'");
  return v * unit;
}

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Sparse predictive density risk tables and diagnostics", "sparsepred"};
  app.require_subcommand(1);
  Options o;
  auto* table = app.add_subcommand("table", "Maximum-risk quotients over an (eta, r, rule) grid");
  auto* profile = app.add_subcommand("profile", "Risk profile of one rule over theta");
  auto* bayes = app.add_subcommand("bayes-risk", "Bayes risk of discrete priors against the limit");
  auto* diag = app.add_subcommand("diagnostics", "Cluster sizes, root coverage and gap analysis");
  for (auto* sub : {table, profile, bayes, diag}) add_shared(sub, o);
  profile->add_option("--dump-predictive", o.dump_predictive, "Dump the predictive mixture at x=<value>");
  diag->add_flag("--compare-k1", o.compare_k1, "Also compare pi_C with the forced K=1 prior");

  std::vector<std::string> storage{"sparsepred"};
  storage.insert(storage.end(), args.begin(), args.end());
  std::vector<char*> argv;
  for (auto& s : storage) argv.push_back(s.data());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kSuccess;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kSuccess;
  } catch (const CLI::ParseError& e) {
    err << "usage error: " << e.what() << '\n';
    return kUsageError;
  }

  try {
    CLI::App* sub = app.get_subcommands().front();
    apply_config(sub, o);
    if (sub == table) return cmd_table(o, out, err);
    if (sub == profile) return cmd_profile(o, out, err);
    if (sub == bayes) return cmd_bayes_risk(o, out, err);
    return cmd_diagnostics(o, out, err);
  } catch (const UsageError& e) {
    err << "usage error: " << e.what() << '\n';
    return kUsageError;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kComputationFailure;
  }
}

}  // namespace sparsepred::cli
