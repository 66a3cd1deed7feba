#include "sparsepred/theory.hpp"

#include <cmath>
#include <limits>
#include <string>

namespace sparsepred {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

void require_subcritical(double theta, const ModelParamsd& p) {
  if (!(theta > 0)) throw DomainError("theta must be positive");
  if (!(p.r < 0.5)) throw PreconditionError("index functions are defined for r < 1/2");
}

}  // namespace

bool RootInterval::has_roots() const { return !std::isnan(alpha); }

MinimaxAsymptote minimax_asymptote(double eta, double r) {
  const auto p = make_params(eta, r);
  const MinimaxAsymptote out{-std::log(eta) / (1 + r), p.benchmark()};
  if (std::abs(out.per_signal - out.threshold) > 1e-12 * out.per_signal)
    throw DomainError("asymptote mismatch");
  return out;
}

double theorem2_ratio(double r) {
  if (!(r > 0)) throw DomainError("r must be positive");
  const double gamma2 = (1 + 4 * r) * (1 + 4 * r);
  double sum = 0;
  double g = gamma2;
  for (int i = 1; g < 1 + 1 / r; ++i, g *= gamma2) sum += 1 + 1 / r - g;
  return (1 + r * sum) / cluster_size(r);
}

int index_ld(double theta, const ModelParamsd& p) {
  require_subcritical(theta, p);
  const int j = static_cast<int>(std::floor(theta / p.lambda_e));
  return j * cluster_size(p.r);
}

int index_ln(double theta, const ModelParamsd& p) {
  require_subcritical(theta, p);
  const int K = cluster_size(p.r);
  const double gamma = 1 + 4 * p.r;
  const int j = static_cast<int>(std::floor(theta / p.lambda_e));
  // closed right ends, with slack for the rounding in theta - j lambda_e
  const double t = theta - j * p.lambda_e - 1e-12 * p.lambda_e;
  if (t <= p.lambda_f) return j * K;
  double a = p.lambda_f;
  for (int k = 0;; ++k, a *= gamma) {
    if (t <= std::min(a * (1 + 2 * p.r), p.lambda_e)) return j * K + k + 1;
    if (t <= std::min(a * gamma, p.lambda_e)) return j * K + k + 2;
  }
}

std::vector<RootInterval> cluster_coverage_check(double r, double eta) {
  if (!(r > 0 && r < 0.5)) throw PreconditionError("coverage check needs 0 < r < 1/2");
  const auto p = make_params(eta, r);
  const int K = cluster_size(r);
  const double gamma = 1 + 4 * r;
  const double tol = 1e-10 * p.lambda_e;
  std::vector<RootInterval> out;
  for (int k = 1; k <= K; ++k) {
    RootInterval ri;
    ri.index = k;
    const double mu = std::min(std::pow(gamma, k - 1) * p.lambda_f, p.lambda_e);
    ri.target_lo = k == 1 ? p.lambda_f : p.lambda_f * std::pow(gamma, k - 2) * (1 + 2 * r);
    ri.target_hi = std::min(p.lambda_f * std::pow(gamma, k - 1) * (1 + 2 * r), p.lambda_e);
    const double disc = mu * mu / p.v - p.lambda_f * p.lambda_f / r;
    if (disc < 0) {
      ri.alpha = ri.beta = kNaN;
    } else {
      ri.alpha = mu + r * mu - r * std::sqrt(disc);
      ri.beta = mu + r * mu + r * std::sqrt(disc);
      ri.covered = ri.alpha <= ri.target_lo + tol && ri.beta >= ri.target_hi - tol;
    }
    out.push_back(ri);
  }
  return out;
}

GapAnalysis k1_gap_analysis(double r, double eta) {
  const auto p = make_params(eta, r);
  GapAnalysis out;
  out.dominance_switch = p.lambda_f / (2 * r);
  for (int n = 1; n <= 2; ++n) {
    RootInterval ri;
    ri.index = n;
    ri.target_lo = out.dominance_switch;
    ri.target_hi = p.lambda_f * (1 + 1 / (2 * r));
    const double disc = n * n * r * r + n * n * r - n * r - n + 1;
    if (disc < 0) {
      ri.alpha = ri.beta = kNaN;
    } else {
      ri.alpha = (1 + r) * n * p.lambda_f - p.lambda_f * std::sqrt(disc);
      ri.beta = (1 + r) * n * p.lambda_f + p.lambda_f * std::sqrt(disc);
      ri.covered = ri.alpha <= ri.target_lo && ri.beta >= ri.target_hi;
    }
    out.roots.push_back(ri);
  }
  const auto& b1 = out.roots[0];
  const auto& a2 = out.roots[1];
  // no real roots for n = 2 leaves theta just beyond beta_1 uncovered
  out.gap_exists = !a2.has_roots() || b1.beta < a2.alpha - 1e-12 * p.lambda_f;
  return out;
}

double per_atom_asymptotic_risk(int j, double r) {
  const int K = cluster_size(r);
  if (j < 1 || j > K) throw PreconditionError("j must lie in 1.." + std::to_string(K));
  if (j == 1) return 1 / (2 * r);
  return 0.5 * std::max(0.0, 1 + 1 / r - std::pow(1 + 4 * r, 2 * (j - 1)));
}

}  // namespace sparsepred
