#pragma once

#include <algorithm>
#include <cmath>
#include <sstream>
#include <string>
#include <vector>

#include "sparsepred/golden.hpp"
#include "sparsepred/parallel.hpp"
#include "sparsepred/predictive.hpp"
#include "sparsepred/quadrature.hpp"

namespace sparsepred {

// Terms of log sum_p exp(log_coeff_p + slope_p Z + intercept_p), stored by column.
template <typename Scalar>
struct LogLinearTerms {
  ArrayX<Scalar> slope;
  ArrayX<Scalar> intercept;
  ArrayX<Scalar> log_coeff;

  Eigen::Index size() const { return slope.size(); }
};

// E log sum_p exp(log_coeff_p + slope_p Z + intercept_p) for Z ~ N(0, 1).
template <typename Scalar>
Scalar expect_log_mixture(const LogLinearTerms<Scalar>& terms, const QuadratureSpec& quad) {
  if (terms.size() == 0) throw PreconditionError("expect_log_mixture needs at least one term");
  if (terms.intercept.size() != terms.size() || terms.log_coeff.size() != terms.size())
    throw PreconditionError("expect_log_mixture: term arrays differ in length");
  const ArrayX<Scalar> offset = terms.intercept + terms.log_coeff;
  if (terms.size() == 1) return offset(0);
  ArrayX<Scalar> scratch(terms.size());
  const auto integrand = [&](Scalar z) {
    scratch = offset + terms.slope * z;
    return log_sum_exp(scratch);
  };
  return normal_expectation<Scalar>(integrand, Scalar(0), Scalar(1), {}, quad);
}

// The N_{theta,w} term list for a spike-plus-atoms prior on the standardized
// scale (v_x = 1): coefficients pi_p / pi_0, exponents mu Z / sqrt(w) +
// mu theta / w - mu^2 / (2w), plus the unit term of the spike.
template <typename Scalar>
LogLinearTerms<Scalar> decomposition_terms(const DiscretePrior<Scalar>& prior, Scalar theta, Scalar w,
                                           Scalar v_x) {
  const Eigen::Index n = static_cast<Eigen::Index>(prior.atoms.size());
  const Scalar s = std::sqrt(v_x);
  LogLinearTerms<Scalar> t{ArrayX<Scalar>(n + 1), ArrayX<Scalar>(n + 1), ArrayX<Scalar>(n + 1)};
  t.slope(0) = t.intercept(0) = t.log_coeff(0) = 0;
  const ArrayX<Scalar> mu = prior.locations() / s;
  const Scalar th = theta / s;
  t.slope.tail(n) = mu / std::sqrt(w);
  t.intercept.tail(n) = mu * th / w - mu.square() / (2 * w);
  t.log_coeff.tail(n) = prior.log_weights() - prior.origin_log_mass;
  return t;
}

// rho(theta) = theta^2 / (2r) - E log N_{theta,v}(Z) + E log D_theta(Z).
template <typename Scalar>
Scalar risk_decomposition(const DiscretePrior<Scalar>& prior, Scalar theta, const ModelParams<Scalar>& p,
                          const QuadratureSpec& quad) {
  if (!prior.has_origin_mass())
    throw PreconditionError("risk_decomposition requires positive spike mass at the origin");
  const Scalar th = theta / std::sqrt(p.v_x);
  const Scalar log_n = expect_log_mixture(decomposition_terms(prior, theta, p.v, p.v_x), quad);
  const Scalar log_d = expect_log_mixture(decomposition_terms(prior, theta, Scalar(1), p.v_x), quad);
  return th * th / (2 * p.r) - log_n + log_d;
}

// rho(theta) = -(1/2)(1 + log 2 pi v_y) - E_{X,Y} log p_hat(Y | X), integrating
// X ~ N(theta, v_x) outside and Y ~ N(theta, v_y) inside.  The plug-in rule
// reduces to E (theta - theta_hat(X))^2 / (2 v_y).
template <typename Scalar>
Scalar risk_direct(const PredictiveRule<Scalar>& rule, Scalar theta, const ModelParams<Scalar>& p,
                   const QuadratureSpec& quad) {
  validate_rule(rule);
  const Scalar sd_x = std::sqrt(p.v_x);
  const auto cuts = rule_discontinuities(rule);
  if (const auto* plugin = std::get_if<PluginRule<Scalar>>(&rule)) {
    const Scalar t = plugin->threshold;
    return normal_expectation<Scalar>(
        [&](Scalar x) {
          const Scalar e = theta - plugin_estimate(x, t);
          return e * e / (2 * p.v_y);
        },
        theta, sd_x, cuts, quad);
  }
  const auto& inner = gauss_hermite<Scalar>(quad.node_count);
  const ArrayX<Scalar> ys = theta + std::sqrt(p.v_y) * inner.nodes;
  const Scalar entropy = Scalar(-0.5) * (1 + kLogTwoPi<Scalar> + std::log(p.v_y));
  const auto loss = [&](Scalar x) {
    const auto mix = predictive_mixture(rule, x, p);
    const ArrayX<Scalar> base = mix.log_weight - Scalar(0.5) * (kLogTwoPi<Scalar> + mix.variance.log());
    const ArrayX<Scalar> two_var = 2 * mix.variance;
    ArrayX<Scalar> terms(mix.size());
    Scalar expected_log = 0;
    for (Eigen::Index j = 0; j < ys.size(); ++j) {
      if (inner.weights(j) == 0) continue;
      terms = base - (ys(j) - mix.mean).square() / two_var;
      expected_log += inner.weights(j) * log_sum_exp(terms);
    }
    return entropy - expected_log;
  };
  return normal_expectation<Scalar>(loss, theta, sd_x, cuts, quad);
}

// Fastest exact route: the decomposition identity for Bayes rules with a
// spike, direct integration otherwise.
template <typename Scalar>
Scalar risk(const PredictiveRule<Scalar>& rule, Scalar theta, const ModelParams<Scalar>& p,
            const QuadratureSpec& quad) {
  if (const auto* bayes = std::get_if<BayesRule<Scalar>>(&rule)) {
    if (bayes->prior.has_origin_mass()) return risk_decomposition(bayes->prior, theta, p, quad);
  }
  return risk_direct(rule, theta, p, quad);
}

struct SupSearch {
  double theta_max;
  double coarse_step;
  double refine_tol;  // golden-section bracket length, in units of lambda_f
  bool strict = false;
};

template <typename Scalar>
SupSearch default_search(const ModelParams<Scalar>& p) {
  return {static_cast<double>(4 * p.lambda_e + p.lambda_f), static_cast<double>(p.lambda_f / 20), 1e-4};
}

template <typename Scalar>
struct RiskProfile {
  ArrayX<Scalar> theta_grid;
  ArrayX<Scalar> risk_values;
  Scalar benchmark = 0;
  Scalar sup_theta = 0;
  Scalar sup_risk = 0;
  std::vector<std::string> warnings;

  Scalar quotient() const { return sup_risk / benchmark; }
};

// Risk profile on [0, theta_max] (risk is even in theta for symmetric rules),
// with every competitive local maximum of the coarse grid refined by golden
// section.  Refined points are merged into the profile.
template <typename Scalar>
RiskProfile<Scalar> sup_risk(const PredictiveRule<Scalar>& rule, const ModelParams<Scalar>& p,
                             const SupSearch& search, const QuadratureSpec& quad) {
  quad.validate();
  validate_rule(rule);
  if (!(search.theta_max > 0) || !(search.coarse_step > 0) || !(search.refine_tol > 0))
    throw PreconditionError("sup search needs positive theta_max, coarse_step and refine_tol");
  const Scalar theta_max = Scalar(search.theta_max);
  const Scalar step = Scalar(search.coarse_step);
  const auto steps = static_cast<std::size_t>(std::ceil(theta_max / step - Scalar(1e-9)));
  std::vector<Scalar> grid(steps + 1);
  for (std::size_t i = 0; i < steps; ++i) grid[i] = i * step;
  grid[steps] = theta_max;

  const auto eval = [&](Scalar th) { return risk(rule, th, p, quad); };
  std::vector<Scalar> values = parallel_map<Scalar>(grid.size(), [&](std::size_t i) { return eval(grid[i]); });

  const Scalar coarse_max = *std::max_element(values.begin(), values.end());
  const Scalar keep = coarse_max - Scalar(0.02) * std::abs(coarse_max);
  std::vector<std::size_t> peaks;
  for (std::size_t i = 1; i + 1 < grid.size(); ++i) {
    if (values[i] >= values[i - 1] && values[i] >= values[i + 1] && values[i] >= keep) peaks.push_back(i);
  }
  const Scalar tol = Scalar(search.refine_tol) * p.lambda_f;
  const auto refined = parallel_map<std::pair<Scalar, Scalar>>(peaks.size(), [&](std::size_t k) {
    const std::size_t i = peaks[k];
    return golden_section_maximize<Scalar>(eval, grid[i - 1], grid[i + 1], tol);
  });

  std::vector<std::pair<Scalar, Scalar>> points;
  points.reserve(grid.size() + refined.size());
  for (std::size_t i = 0; i < grid.size(); ++i) points.emplace_back(grid[i], values[i]);
  for (const auto& pt : refined) points.push_back(pt);
  std::sort(points.begin(), points.end());
  points.erase(std::unique(points.begin(), points.end(),
                           [](const auto& a, const auto& b) { return a.first == b.first; }),
               points.end());

  RiskProfile<Scalar> profile;
  profile.theta_grid.resize(points.size());
  profile.risk_values.resize(points.size());
  profile.benchmark = p.benchmark();
  std::size_t best = 0;
  for (std::size_t i = 0; i < points.size(); ++i) {
    profile.theta_grid(i) = points[i].first;
    profile.risk_values(i) = points[i].second;
    if (points[i].second > points[best].second) best = i;
  }
  profile.sup_theta = points[best].first;
  profile.sup_risk = points[best].second;

  if (profile.sup_theta >= theta_max - p.lambda_f) {
    std::ostringstream msg;
    msg << "supremum at theta=" << profile.sup_theta << " lies within lambda_f of theta_max=" << theta_max
        << " (boundary or truncation artifact)";
    profile.warnings.push_back(msg.str());
  }
  if (const auto* bayes = std::get_if<BayesRule<Scalar>>(&rule)) {
    if (!bayes->prior.atoms.empty() && bayes->prior.max_abs_location() < theta_max &&
        bayes->prior.family != PriorFamily::TruncatedCluster) {
      profile.warnings.push_back("prior support ends before theta_max; increase max_cluster");
    }
  }
  if (search.strict && !profile.warnings.empty()) throw BoundarySupError(profile.warnings.front());
  return profile;
}

template <typename Scalar>
struct OriginRisk {
  Scalar value;
  Scalar bound;  // eta / (1 - eta)
};

template <typename Scalar>
OriginRisk<Scalar> origin_risk(const DiscretePrior<Scalar>& prior, const ModelParams<Scalar>& p,
                               const QuadratureSpec& quad) {
  return {risk_decomposition(prior, Scalar(0), p, quad), p.eta / (1 - p.eta)};
}

template <typename Scalar>
struct BayesRiskResult {
  Scalar value;
  Scalar tail_mass;      // probability not represented by the truncated prior
  Scalar tail_estimate;  // tail_mass times the largest risk among the outermost atoms
};

// Integrated risk of the Bayes rule under its own prior, summing the actual
// prior measure over both signs.
template <typename Scalar>
BayesRiskResult<Scalar> bayes_risk(const DiscretePrior<Scalar>& prior, const ModelParams<Scalar>& p,
                                   const QuadratureSpec& quad) {
  for (std::size_t i = 0, n = prior.atoms.size(); i < n; ++i) {
    const auto& a = prior.atoms[i];
    const auto& m = prior.atoms[n - 1 - i];
    if (std::abs(a.location + m.location) > Scalar(1e-12) * (1 + std::abs(a.location)) ||
        std::abs(a.log_weight - m.log_weight) > Scalar(1e-12) * (1 + std::abs(a.log_weight)))
      throw PreconditionError("bayes_risk requires a symmetric prior");
  }
  std::vector<const Atom<Scalar>*> positive;
  for (const auto& a : prior.atoms) {
    if (a.location > 0) positive.push_back(&a);
  }
  const auto risks = parallel_map<Scalar>(positive.size() + 1, [&](std::size_t i) {
    return risk_decomposition(prior, i == 0 ? Scalar(0) : positive[i - 1]->location, p, quad);
  });
  Scalar total = std::exp(prior.origin_log_mass) * risks[0];
  Scalar outer = 0;
  const int last_cluster = positive.empty() ? 0 : positive.back()->cluster_index;
  for (std::size_t i = 0; i < positive.size(); ++i) {
    total += 2 * std::exp(positive[i]->log_weight) * risks[i + 1];
    if (positive[i]->cluster_index == last_cluster) outer = std::max(outer, risks[i + 1]);
  }
  const Scalar tail = std::exp(Scalar(prior.truncation.dropped_log_mass));
  return {total, tail, tail * outer};
}

template <typename Scalar>
struct MultivariateRisk {
  Scalar eta;
  Scalar origin;     // rho(0)
  Scalar sup;        // sup over theta != 0
  Scalar value;      // n (1 - eta) rho(0) + n eta sup rho
  Scalar minimax;    // n eta log(1/eta) / (1 + r)
  Scalar ratio;
};

// Maximal risk over exact s_n-sparse vectors of the product rule built from
// eta_n = s_n / n, via the coordinatewise reduction.
template <typename Scalar>
MultivariateRisk<Scalar> multivariate_max_risk(long long n, long long s_n, RuleKind kind, Scalar r,
                                               const QuadratureSpec& quad, Scalar v_x = Scalar(1),
                                               const RuleOptions& opt = {}) {
  if (!(s_n >= 1 && s_n < n)) throw PreconditionError("need 1 <= s_n < n");
  const Scalar eta = Scalar(s_n) / Scalar(n);
  if (eta > Scalar(0.5)) throw PreconditionError("sparsity eta_n = s_n / n must not exceed 0.5");
  const auto p = make_params(eta, r, v_x);
  const auto rule = make_rule(kind, p, opt);
  const auto profile = sup_risk(rule, p, default_search(p), quad);
  MultivariateRisk<Scalar> out;
  out.eta = eta;
  out.origin = risk(rule, Scalar(0), p, quad);
  out.sup = profile.sup_risk;
  out.value = Scalar(n) * (1 - eta) * out.origin + Scalar(n) * eta * out.sup;
  out.minimax = Scalar(n) * eta * -std::log(eta) / (1 + r);
  out.ratio = out.value / out.minimax;
  return out;
}

using RiskProfiled = RiskProfile<double>;

}  // namespace sparsepred
