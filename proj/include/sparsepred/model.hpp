#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>
#include <string_view>
#include <vector>

#include "sparsepred/errors.hpp"
#include "sparsepred/math.hpp"

namespace sparsepred {

// Sparsity/variance configuration of one univariate problem.  r is the
// variance ratio v_y / v_x.
template <typename Scalar>
struct ModelParams {
  Scalar eta;
  Scalar r;
  Scalar v_x;
  Scalar v_y;
  Scalar v;         // r / (1 + r)
  Scalar lambda_e;  // sqrt(2 v_x log(1/eta))
  Scalar lambda_f;  // sqrt(v) * lambda_e

  Scalar log_eta() const { return std::log(eta); }
  // lambda_f^2 / (2r), which is also log(1/eta) / (1 + r) when v_x = 1.
  Scalar benchmark() const { return lambda_f * lambda_f / (2 * r * v_x); }
};

template <typename Scalar>
ModelParams<Scalar> make_params(Scalar eta, Scalar r, Scalar v_x = Scalar(1)) {
  if (!(eta > 0 && eta < 1)) throw DomainError("eta must lie in (0, 1)");
  if (!(r > 0) || !std::isfinite(r)) throw DomainError("r must be positive");
  if (!(v_x > 0) || !std::isfinite(v_x)) throw DomainError("v_x must be positive");
  ModelParams<Scalar> p;
  p.eta = eta;
  p.r = r;
  p.v_x = v_x;
  p.v_y = r * v_x;
  p.v = r / (1 + r);
  p.lambda_e = std::sqrt(-2 * v_x * std::log(eta));
  p.lambda_f = std::sqrt(p.v) * p.lambda_e;
  return p;
}

enum class PriorFamily { Cluster, PiC, EGrid, PGrid, BiGrid, TruncatedCluster, Spike };

inline std::string_view family_label(PriorFamily f) {
  switch (f) {
    case PriorFamily::Cluster: return "CL";
    case PriorFamily::PiC: return "C";
    case PriorFamily::EGrid: return "EG";
    case PriorFamily::PGrid: return "PG";
    case PriorFamily::BiGrid: return "BG";
    case PriorFamily::TruncatedCluster: return "TC";
    case PriorFamily::Spike: return "SPIKE";
  }
  return "?";
}

inline PriorFamily parse_family(std::string_view label) {
  for (auto f : {PriorFamily::Cluster, PriorFamily::PiC, PriorFamily::EGrid, PriorFamily::PGrid,
                 PriorFamily::BiGrid, PriorFamily::TruncatedCluster, PriorFamily::Spike}) {
    if (family_label(f) == label) return f;
  }
  throw PreconditionError("unknown prior family '" + std::string(label) + "'");
}

template <typename Scalar>
struct Atom {
  Scalar location;
  Scalar log_weight;
  int cluster_index;  // signed; sign matches the location
  int within_index;   // 1-based position inside the cluster
};

struct Truncation {
  int max_cluster = 0;
  // log of an upper bound on the probability not represented by any atom;
  // -inf when nothing was dropped.
  double dropped_log_mass = -std::numeric_limits<double>::infinity();
};

// Spike at the origin plus a finite, symmetric list of atoms sorted by location.
template <typename Scalar>
struct DiscretePrior {
  PriorFamily family = PriorFamily::Spike;
  Scalar eta = 0;
  Scalar r = 0;
  Scalar origin_log_mass = 0;
  std::vector<Atom<Scalar>> atoms;
  Truncation truncation;
  std::vector<std::string> notes;  // construction warnings, e.g. collapsed atoms

  Scalar total_log_mass() const {
    ArrayX<Scalar> w(atoms.size() + 1);
    w(0) = origin_log_mass;
    for (std::size_t i = 0; i < atoms.size(); ++i) w(i + 1) = atoms[i].log_weight;
    return log_sum_exp(w);
  }

  Scalar max_abs_location() const {
    Scalar m = 0;
    for (const auto& a : atoms) m = std::max(m, std::abs(a.location));
    return m;
  }

  bool has_origin_mass() const { return std::isfinite(origin_log_mass); }

  ArrayX<Scalar> locations() const {
    ArrayX<Scalar> out(atoms.size());
    for (std::size_t i = 0; i < atoms.size(); ++i) out(i) = atoms[i].location;
    return out;
  }

  ArrayX<Scalar> log_weights() const {
    ArrayX<Scalar> out(atoms.size());
    for (std::size_t i = 0; i < atoms.size(); ++i) out(i) = atoms[i].log_weight;
    return out;
  }
};

// Cluster size K_r. The ratio inside the ceiling is nudged down by a few ulps
// so an exact integer is not pushed up by rounding.
inline int cluster_size_formula(double r, double gamma) {
  const double ratio = std::log1p(1.0 / r) / (2.0 * std::log(gamma));
  return static_cast<int>(std::ceil(ratio * (1.0 - 1e-13)));
}

inline int cluster_size(double r) {
  if (!(r > 0)) throw DomainError("r must be positive");
  return 1 + (r < 0.5 ? cluster_size_formula(r, 1.0 + 4.0 * r) : 0);
}

// Smallest cluster count J with (J + 1) log(eta) < -60.
inline int tail_cluster_count(double log_decay) {
  const int j = static_cast<int>(std::floor(60.0 / -log_decay));
  return std::max(1, j);
}

// Number of periods of length `period` needed so the support reaches past `reach`.
inline int reach_cluster_count(double period, double reach) {
  return static_cast<int>(std::ceil(reach / period)) + 1;
}

namespace detail {

template <typename Scalar>
void mirror_and_sort(DiscretePrior<Scalar>& prior) {
  const std::size_t n = prior.atoms.size();
  prior.atoms.reserve(2 * n);
  for (std::size_t i = 0; i < n; ++i) {
    Atom<Scalar> a = prior.atoms[i];
    a.location = -a.location;
    a.cluster_index = -a.cluster_index;
    prior.atoms.push_back(a);
  }
  std::sort(prior.atoms.begin(), prior.atoms.end(),
            [](const Atom<Scalar>& a, const Atom<Scalar>& b) { return a.location < b.location; });
}

template <typename Scalar>
DiscretePrior<Scalar> empty_prior(const ModelParams<Scalar>& p, PriorFamily family) {
  DiscretePrior<Scalar> prior;
  prior.family = family;
  prior.eta = p.eta;
  prior.r = p.r;
  prior.origin_log_mass = std::log1p(-p.eta);
  return prior;
}

// Within-cluster offsets min(gamma^(j-1) lambda_f, lambda_e), with coincident
// offsets merged. Returns offsets and their multiplicities.
template <typename Scalar>
std::vector<std::pair<Scalar, int>> cluster_offsets(const ModelParams<Scalar>& p, Scalar gamma,
                                                    int kappa, std::vector<std::string>& notes) {
  std::vector<std::pair<Scalar, int>> offsets;
  const Scalar tol = Scalar(1e-12) * p.lambda_e;
  for (int j = 1; j <= kappa; ++j) {
    const Scalar mu = std::min(std::pow(gamma, Scalar(j - 1)) * p.lambda_f, p.lambda_e);
    if (!offsets.empty() && std::abs(mu - offsets.back().first) <= tol) {
      ++offsets.back().second;
      continue;
    }
    offsets.emplace_back(mu, 1);
  }
  if (static_cast<int>(offsets.size()) < kappa) {
    notes.push_back("collapsed " + std::to_string(kappa - static_cast<int>(offsets.size())) +
                    " coincident within-cluster atom(s) clipped at lambda_e");
  }
  return offsets;
}

}  // namespace detail

// Clustered prior: spike 1 - eta, cluster i carrying (1 - eta) eta^i / 2 split
// equally over kappa atoms at (i - 1) mu_{1,kappa} + mu_{1j}.
template <typename Scalar>
DiscretePrior<Scalar> build_cluster_prior(const ModelParams<Scalar>& p, Scalar gamma, int kappa,
                                          int max_cluster) {
  if (!(gamma >= 1)) throw PreconditionError("gamma must be >= 1");
  if (kappa < 1) throw PreconditionError("kappa must be >= 1");
  if (max_cluster < 1) throw PreconditionError("max_cluster must be >= 1");
  auto prior = detail::empty_prior(p, PriorFamily::Cluster);
  const auto offsets = detail::cluster_offsets(p, gamma, kappa, prior.notes);
  const Scalar period = offsets.back().first;
  const Scalar log_eta = p.log_eta();
  const Scalar base = std::log((1 - p.eta) / 2) - std::log(Scalar(kappa));
  for (int i = 1; i <= max_cluster; ++i) {
    int within = 1;
    for (const auto& [mu, mult] : offsets) {
      prior.atoms.push_back({(i - 1) * period + mu, base + i * log_eta + std::log(Scalar(mult)), i,
                             within++});
    }
  }
  prior.truncation.max_cluster = max_cluster;
  prior.truncation.dropped_log_mass = static_cast<double>((max_cluster + 1) * log_eta);
  detail::mirror_and_sort(prior);
  return prior;
}

template <typename Scalar>
int default_cluster_count(const ModelParams<Scalar>& p, Scalar period, Scalar reach) {
  return std::max(tail_cluster_count(static_cast<double>(p.log_eta())),
                  reach_cluster_count(static_cast<double>(period), static_cast<double>(reach)));
}

// Default support reach: the default sup-search window plus a margin.
template <typename Scalar>
Scalar default_reach(const ModelParams<Scalar>& p) {
  return 6 * p.lambda_e + 2 * p.lambda_f;
}

template <typename Scalar>
DiscretePrior<Scalar> build_pi_C(const ModelParams<Scalar>& p, int max_cluster) {
  const int k = cluster_size(static_cast<double>(p.r));
  auto prior = build_cluster_prior(p, 1 + 4 * p.r, k, max_cluster);
  prior.family = PriorFamily::PiC;
  return prior;
}

template <typename Scalar>
DiscretePrior<Scalar> build_pi_C(const ModelParams<Scalar>& p) {
  const int k = cluster_size(static_cast<double>(p.r));
  const Scalar period = k == 1 ? p.lambda_f : p.lambda_e;
  return build_pi_C(p, default_cluster_count(p, period, default_reach(p)));
}

template <typename Scalar>
DiscretePrior<Scalar> build_pi_EG(const ModelParams<Scalar>& p, int max_cluster) {
  if (max_cluster < 1) throw PreconditionError("max_cluster must be >= 1");
  auto prior = detail::empty_prior(p, PriorFamily::EGrid);
  const Scalar log_eta = p.log_eta();
  const Scalar base = std::log((1 - p.eta) / 2);
  for (int i = 1; i <= max_cluster; ++i) {
    prior.atoms.push_back({i * p.lambda_e, base + i * log_eta, i, 1});
  }
  prior.truncation.max_cluster = max_cluster;
  prior.truncation.dropped_log_mass = static_cast<double>((max_cluster + 1) * log_eta);
  detail::mirror_and_sort(prior);
  return prior;
}

template <typename Scalar>
DiscretePrior<Scalar> build_pi_EG(const ModelParams<Scalar>& p) {
  return build_pi_EG(p, default_cluster_count(p, p.lambda_e, default_reach(p)));
}

template <typename Scalar>
DiscretePrior<Scalar> build_pi_PG(const ModelParams<Scalar>& p, int max_atoms) {
  if (max_atoms < 1) throw PreconditionError("max_atoms must be >= 1");
  auto prior = detail::empty_prior(p, PriorFamily::PGrid);
  const Scalar decay = p.v * p.log_eta();  // log eta^v
  const Scalar base = p.log_eta() + log1m_exp(decay) - std::log(Scalar(2));
  for (int i = 1; i <= max_atoms; ++i) {
    prior.atoms.push_back({i * p.lambda_f, base + (i - 1) * decay, i, 1});
  }
  prior.truncation.max_cluster = max_atoms;
  // slab tail beyond max_atoms: eta * eta^(v max_atoms)
  prior.truncation.dropped_log_mass = static_cast<double>(p.log_eta() + max_atoms * decay);
  detail::mirror_and_sort(prior);
  return prior;
}

template <typename Scalar>
DiscretePrior<Scalar> build_pi_PG(const ModelParams<Scalar>& p) {
  const int tail = tail_cluster_count(static_cast<double>(p.v * p.log_eta()));
  const int reach =
      reach_cluster_count(static_cast<double>(p.lambda_f), static_cast<double>(default_reach(p)));
  return build_pi_PG(p, std::max(tail, reach));
}

struct BiGridShape {
  double b;
  int inner_count;  // J
};

inline BiGridShape bi_grid_shape(double r) {
  const double b = std::min(4.0 * r * (1.0 + r) / (1.0 + 2.0 * r), 1.0);
  const double t = 2.0 * std::pow(b, -1.5);
  return {b, 1 + static_cast<int>(std::ceil(t * (1.0 - 1e-13)))};
}

// Bi-grid prior. Inner atoms lambda_f (1 + b (j - 1)), j = 1..J, then outer
// atoms spaced lambda_f. The slab is normalized to mass eta over the infinite
// series; truncation of the outer grid is reported as dropped mass.
template <typename Scalar>
DiscretePrior<Scalar> build_pi_BG(const ModelParams<Scalar>& p, int max_outer) {
  if (max_outer < 1) throw PreconditionError("max_outer must be >= 1");
  auto prior = detail::empty_prior(p, PriorFamily::BiGrid);
  const auto shape = bi_grid_shape(static_cast<double>(p.r));
  const Scalar b = shape.b;
  const int J = shape.inner_count;
  const Scalar inner_decay = b * b * p.v * p.log_eta();
  const Scalar outer_decay = p.v * p.log_eta();

  // log of sum_{j=1}^J e^{(j-1) inner_decay} + e^{(J-1) inner_decay} sum_{l>=1} e^{l outer_decay}
  ArrayX<Scalar> parts(J + 1);
  for (int j = 1; j <= J; ++j) parts(j - 1) = (j - 1) * inner_decay;
  parts(J) = (J - 1) * inner_decay + outer_decay - log1m_exp(outer_decay);
  const Scalar log_norm = log_sum_exp(parts);
  const Scalar base = p.log_eta() - std::log(Scalar(2)) - log_norm;

  Scalar inner_last = 0;
  for (int j = 1; j <= J; ++j) {
    inner_last = p.lambda_f + b * (j - 1) * p.lambda_f;
    prior.atoms.push_back({inner_last, base + (j - 1) * inner_decay, j, 1});
  }
  for (int l = 1; l <= max_outer; ++l) {
    prior.atoms.push_back(
        {inner_last + l * p.lambda_f, base + (J - 1) * inner_decay + l * outer_decay, J + l, 1});
  }
  prior.truncation.max_cluster = J + max_outer;
  prior.truncation.dropped_log_mass = static_cast<double>(
      p.log_eta() - log_norm + (J - 1) * inner_decay + (max_outer + 1) * outer_decay -
      log1m_exp(outer_decay));
  detail::mirror_and_sort(prior);
  return prior;
}

template <typename Scalar>
DiscretePrior<Scalar> build_pi_BG(const ModelParams<Scalar>& p) {
  const int tail = tail_cluster_count(static_cast<double>(p.v * p.log_eta()));
  const int reach =
      reach_cluster_count(static_cast<double>(p.lambda_f), static_cast<double>(default_reach(p)));
  return build_pi_BG(p, std::max(tail, reach));
}

// Cluster size of the two-cluster prior: K_r - 1 evaluated with ratio 1 + 2r,
// floored at 1.
inline int truncated_cluster_size(double r) {
  if (!(r > 0)) throw DomainError("r must be positive");
  const int k = r < 0.5 ? cluster_size_formula(r, 1.0 + 2.0 * r) : 0;
  return std::max(1, k);
}

template <typename Scalar>
DiscretePrior<Scalar> build_pi_TC(const ModelParams<Scalar>& p) {
  auto prior = detail::empty_prior(p, PriorFamily::TruncatedCluster);
  const int kappa = truncated_cluster_size(static_cast<double>(p.r));
  const auto offsets = detail::cluster_offsets(p, 1 + 2 * p.r, kappa, prior.notes);
  const Scalar base = std::log(p.eta / 2) - std::log(Scalar(kappa));
  int within = 1;
  for (const auto& [mu, mult] : offsets) {
    prior.atoms.push_back({mu, base + std::log(Scalar(mult)), 1, within++});
  }
  prior.truncation.max_cluster = 1;
  detail::mirror_and_sort(prior);
  return prior;
}

template <typename Scalar>
DiscretePrior<Scalar> pure_spike_prior(const ModelParams<Scalar>& p) {
  DiscretePrior<Scalar> prior;
  prior.family = PriorFamily::Spike;
  prior.eta = p.eta;
  prior.r = p.r;
  prior.origin_log_mass = 0;
  return prior;
}

// Checks symmetry, ordering, finiteness and mass accounting.  Returns an empty
// string when the prior is valid, otherwise a description of the first problem.
template <typename Scalar>
std::string validate_prior(const DiscretePrior<Scalar>& prior, Scalar lambda_e) {
  const auto& atoms = prior.atoms;
  const std::size_t n = atoms.size();
  const Scalar tol = Scalar(1e-12) * std::max(lambda_e, Scalar(1));
  for (std::size_t i = 0; i < n; ++i) {
    if (!std::isfinite(atoms[i].log_weight)) return "non-finite atom log-weight";
    if (atoms[i].location == 0) return "atom at the origin";
    if ((atoms[i].location > 0) != (atoms[i].cluster_index > 0)) return "cluster sign mismatch";
    if (i > 0 && !(atoms[i].location - atoms[i - 1].location > tol))
      return "atom locations not strictly increasing";
    const auto& mirror = atoms[n - 1 - i];
    if (std::abs(mirror.location + atoms[i].location) > tol ||
        std::abs(mirror.log_weight - atoms[i].log_weight) > Scalar(1e-12) * (1 + std::abs(atoms[i].log_weight)))
      return "prior not symmetric";
  }
  const Scalar total = prior.total_log_mass();
  const double missing = -std::expm1(static_cast<double>(total));
  const double allowed = std::exp(prior.truncation.dropped_log_mass);
  if (missing < -1e-12 || missing > allowed + 1e-12) return "mass accounting violated";
  return {};
}

using ModelParamsd = ModelParams<double>;
using DiscretePriord = DiscretePrior<double>;
using Atomd = Atom<double>;

}  // namespace sparsepred
