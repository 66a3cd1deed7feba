#pragma once

#include <cmath>
#include <optional>
#include <string>
#include <string_view>
#include <type_traits>
#include <variant>

#include "sparsepred/model.hpp"

namespace sparsepred {

// Finite Gaussian mixture in log-weight form.
template <typename Scalar>
struct GaussianMixture {
  ArrayX<Scalar> mean;
  ArrayX<Scalar> variance;
  ArrayX<Scalar> log_weight;

  Eigen::Index size() const { return mean.size(); }

  Scalar log_density(Scalar y) const {
    const ArrayX<Scalar> d = y - mean;
    const ArrayX<Scalar> terms =
        log_weight - Scalar(0.5) * (kLogTwoPi<Scalar> + variance.log()) - d.square() / (2 * variance);
    return log_sum_exp(terms);
  }

  bool is_normalized(Scalar tol = Scalar(1e-10)) const {
    return std::abs(log_sum_exp(log_weight)) <= tol && (variance > 0).all();
  }
};

// Posterior predictive density of a Bayes rule: one N(mu_p, v_y) component per
// support point, weighted by its posterior probability given x.
template <typename Scalar>
GaussianMixture<Scalar> posterior_predictive(const DiscretePrior<Scalar>& prior, Scalar x,
                                             const ModelParams<Scalar>& p) {
  const Eigen::Index n = static_cast<Eigen::Index>(prior.atoms.size());
  const bool has_origin = prior.has_origin_mass();
  const Eigen::Index m = n + (has_origin ? 1 : 0);
  GaussianMixture<Scalar> mix{ArrayX<Scalar>(m), ArrayX<Scalar>::Constant(m, p.v_y), ArrayX<Scalar>(m)};
  Eigen::Index k = 0;
  if (has_origin) {
    mix.mean(k) = 0;
    mix.log_weight(k++) = prior.origin_log_mass - x * x / (2 * p.v_x);
  }
  for (const auto& a : prior.atoms) {
    const Scalar d = x - a.location;
    mix.mean(k) = a.location;
    mix.log_weight(k++) = a.log_weight - d * d / (2 * p.v_x);
  }
  mix.log_weight -= log_sum_exp(mix.log_weight);
  return mix;
}

template <typename Scalar>
struct BayesRule {
  DiscretePrior<Scalar> prior;
};

// Plug-in density N(theta_hat(x), v_y) with hard-thresholded theta_hat.
template <typename Scalar>
struct PluginRule {
  Scalar threshold;
};

// Bayes rule of an inner (bounded) prior for |x| <= threshold, and the
// uniform-prior density N(x, v_x + v_y) above it.
template <typename Scalar>
struct ThresholdedClusterRule {
  DiscretePrior<Scalar> inner;
  Scalar threshold;
};

// Spike at zero plus a uniform slab on [-M, M], in the large-M closed form.
template <typename Scalar>
struct SpikeUniformSlabRule {
  Scalar slab_half_width;
};

template <typename Scalar>
using PredictiveRule = std::variant<BayesRule<Scalar>, PluginRule<Scalar>,
                                    ThresholdedClusterRule<Scalar>, SpikeUniformSlabRule<Scalar>>;

template <typename Scalar>
void validate_rule(const PredictiveRule<Scalar>& rule) {
  std::visit(
      [](const auto& r) {
        using R = std::decay_t<decltype(r)>;
        if constexpr (std::is_same_v<R, PluginRule<Scalar>>) {
          if (!(r.threshold >= 0)) throw PreconditionError("plugin threshold must be nonnegative");
        } else if constexpr (std::is_same_v<R, ThresholdedClusterRule<Scalar>>) {
          if (!(r.threshold > 0)) throw PreconditionError("threshold must be positive");
        } else if constexpr (std::is_same_v<R, SpikeUniformSlabRule<Scalar>>) {
          if (!(r.slab_half_width > 0)) throw PreconditionError("slab_half_width must be positive");
        }
      },
      rule);
}

template <typename Scalar>
Scalar plugin_estimate(Scalar x, Scalar threshold) {
  return std::abs(x) > threshold ? x : Scalar(0);
}

// Log posterior weight of the spike for the spike-and-uniform-slab rule.
template <typename Scalar>
std::pair<Scalar, Scalar> sus_log_weights(Scalar x, Scalar slab_half_width,
                                          const ModelParams<Scalar>& p) {
  const Scalar spike = std::log1p(-p.eta) + log_normal_density(x, Scalar(0), p.v_x);
  const Scalar slab = std::log(p.eta / (2 * slab_half_width));
  const Scalar norm = log_add_exp(spike, slab);
  return {spike - norm, slab - norm};
}

// p_hat(. | x) for any rule, as a Gaussian mixture.
template <typename Scalar>
GaussianMixture<Scalar> predictive_mixture(const PredictiveRule<Scalar>& rule, Scalar x,
                                           const ModelParams<Scalar>& p) {
  auto single = [](Scalar mean, Scalar var) {
    return GaussianMixture<Scalar>{ArrayX<Scalar>::Constant(1, mean), ArrayX<Scalar>::Constant(1, var),
                                   ArrayX<Scalar>::Zero(1)};
  };
  return std::visit(
      [&](const auto& r) -> GaussianMixture<Scalar> {
        using R = std::decay_t<decltype(r)>;
        if constexpr (std::is_same_v<R, BayesRule<Scalar>>) {
          return posterior_predictive(r.prior, x, p);
        } else if constexpr (std::is_same_v<R, PluginRule<Scalar>>) {
          return single(plugin_estimate(x, r.threshold), p.v_y);
        } else if constexpr (std::is_same_v<R, ThresholdedClusterRule<Scalar>>) {
          if (std::abs(x) <= r.threshold) return posterior_predictive(r.inner, x, p);
          return single(x, p.v_x + p.v_y);
        } else {
          const auto [w0, w1] = sus_log_weights(x, r.slab_half_width, p);
          GaussianMixture<Scalar> mix{ArrayX<Scalar>(2), ArrayX<Scalar>(2), ArrayX<Scalar>(2)};
          mix.mean << 0, x;
          mix.variance << p.v_y, p.v_x + p.v_y;
          mix.log_weight << w0, w1;
          return mix;
        }
      },
      rule);
}

template <typename Scalar>
Scalar log_predictive_density(const PredictiveRule<Scalar>& rule, Scalar x, Scalar y,
                              const ModelParams<Scalar>& p) {
  if (const auto* plugin = std::get_if<PluginRule<Scalar>>(&rule)) {
    return log_normal_density(y, plugin_estimate(x, plugin->threshold), p.v_y);
  }
  return predictive_mixture(rule, x, p).log_density(y);
}

// Points in x where the rule jumps.
template <typename Scalar>
std::vector<Scalar> rule_discontinuities(const PredictiveRule<Scalar>& rule) {
  if (const auto* plugin = std::get_if<PluginRule<Scalar>>(&rule)) {
    if (plugin->threshold > 0) return {-plugin->threshold, plugin->threshold};
  }
  if (const auto* tc = std::get_if<ThresholdedClusterRule<Scalar>>(&rule)) {
    return {-tc->threshold, tc->threshold};
  }
  return {};
}

// Construction helpers used by the CLI and the table reproduction.
enum class RuleKind { Clustered, ClusteredK1, EGrid, PGrid, BiGrid, Thresh, Plugin, Sus };

inline std::string_view rule_label(RuleKind k) {
  switch (k) {
    case RuleKind::Clustered: return "clustered";
    case RuleKind::ClusteredK1: return "clustered-k1";
    case RuleKind::EGrid: return "eg";
    case RuleKind::PGrid: return "pg";
    case RuleKind::BiGrid: return "bg";
    case RuleKind::Thresh: return "thresh";
    case RuleKind::Plugin: return "plugin";
    case RuleKind::Sus: return "sus";
  }
  return "?";
}

inline std::optional<RuleKind> parse_rule_kind(std::string_view label) {
  for (auto k : {RuleKind::Clustered, RuleKind::ClusteredK1, RuleKind::EGrid, RuleKind::PGrid,
                 RuleKind::BiGrid, RuleKind::Thresh, RuleKind::Plugin, RuleKind::Sus}) {
    if (rule_label(k) == label) return k;
  }
  return std::nullopt;
}

struct RuleOptions {
  std::optional<int> max_cluster;  // overrides the truncation default
  std::optional<double> reach;     // support must extend past this theta
  double plugin_threshold_le = 1.0;   // plugin threshold, in units of lambda_e
  double sus_half_width_le = 3.0;     // SUS slab half-width, in units of lambda_e
};

template <typename Scalar>
DiscretePrior<Scalar> make_prior(RuleKind kind, const ModelParams<Scalar>& p,
                                 const RuleOptions& opt = {}) {
  const Scalar reach = opt.reach ? std::max(Scalar(*opt.reach) + 2 * p.lambda_e + p.lambda_f, default_reach(p))
                                 : default_reach(p);
  auto count = [&](Scalar period, Scalar log_decay) {
    if (opt.max_cluster) return *opt.max_cluster;
    return std::max(tail_cluster_count(static_cast<double>(log_decay)),
                    reach_cluster_count(static_cast<double>(period), static_cast<double>(reach)));
  };
  switch (kind) {
    case RuleKind::Clustered: {
      const Scalar period = cluster_size(static_cast<double>(p.r)) == 1 ? p.lambda_f : p.lambda_e;
      return build_pi_C(p, count(period, p.log_eta()));
    }
    case RuleKind::ClusteredK1: {
      auto prior = build_cluster_prior(p, Scalar(1), 1, count(p.lambda_f, p.log_eta()));
      return prior;
    }
    case RuleKind::EGrid: return build_pi_EG(p, count(p.lambda_e, p.log_eta()));
    case RuleKind::PGrid: return build_pi_PG(p, count(p.lambda_f, p.v * p.log_eta()));
    case RuleKind::BiGrid: return build_pi_BG(p, count(p.lambda_f, p.v * p.log_eta()));
    case RuleKind::Thresh: return build_pi_TC(p);
    default: throw PreconditionError("rule has no discrete prior");
  }
}

template <typename Scalar>
PredictiveRule<Scalar> make_rule(RuleKind kind, const ModelParams<Scalar>& p, const RuleOptions& opt = {}) {
  switch (kind) {
    case RuleKind::Thresh: return ThresholdedClusterRule<Scalar>{build_pi_TC(p), p.lambda_e};
    case RuleKind::Plugin: return PluginRule<Scalar>{Scalar(opt.plugin_threshold_le) * p.lambda_e};
    case RuleKind::Sus: return SpikeUniformSlabRule<Scalar>{Scalar(opt.sus_half_width_le) * p.lambda_e};
    default: return BayesRule<Scalar>{make_prior(kind, p, opt)};
  }
}

using GaussianMixtured = GaussianMixture<double>;
using PredictiveRuled = PredictiveRule<double>;

}  // namespace sparsepred
