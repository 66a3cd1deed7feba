#pragma once

#include <vector>

#include "sparsepred/model.hpp"

namespace sparsepred {

struct MinimaxAsymptote {
  double per_signal;  // log(1/eta) / (1 + r)
  double threshold;   // lambda_f^2 / (2r)
};

MinimaxAsymptote minimax_asymptote(double eta, double r);

// Limit of B(pi_C) / (eta log(1/eta) / (1 + r)) as eta -> 0.
double theorem2_ratio(double r);

// Denominator index: jK for theta in [j lambda_e, (j + 1) lambda_e).
int index_ld(double theta, const ModelParamsd& p);

// Numerator index from the three-case rule inside the cluster containing theta.
int index_ln(double theta, const ModelParamsd& p);

struct RootInterval {
  int index = 0;
  double alpha = 0;  // NaN when the discriminant is negative
  double beta = 0;
  double target_lo = 0;
  double target_hi = 0;
  bool covered = false;
  bool has_roots() const;
};

// Roots of the first-cluster quadratic for k = 1..K and whether each covers
// the theta range where index_ln equals k.
std::vector<RootInterval> cluster_coverage_check(double r, double eta);

struct GapAnalysis {
  double dominance_switch;  // offset from mu_l where D_{theta,l} takes over
  std::vector<RootInterval> roots;
  bool gap_exists;
};

// K = 1 grid at spacing lambda_f, reported as offsets from mu_l (mu_l = 0).
GapAnalysis k1_gap_analysis(double r, double eta);

// Leading coefficient of rho(mu_{1j}) in units of lambda_f^2.
double per_atom_asymptotic_risk(int j, double r);

}  // namespace sparsepred
