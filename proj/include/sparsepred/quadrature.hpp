#pragma once

#include <algorithm>
#include <cmath>
#include <map>
#include <memory>
#include <mutex>
#include <string>
#include <vector>

#include <Eigen/Eigenvalues>

#include "sparsepred/errors.hpp"
#include "sparsepred/math.hpp"

namespace sparsepred {

enum class QuadratureScheme { GaussHermite, Adaptive };

struct QuadratureSpec {
  QuadratureScheme scheme = QuadratureScheme::GaussHermite;
  int node_count = 201;
  double rel_tolerance = 1e-9;

  void validate() const {
    if (node_count < 21) throw PreconditionError("quadrature node_count must be >= 21");
    if (!(rel_tolerance > 0 && rel_tolerance <= 1e-4))
      throw PreconditionError("quadrature rel_tolerance must lie in (0, 1e-4]");
  }
};

template <typename Scalar>
struct GaussRule {
  ArrayX<Scalar> nodes;
  ArrayX<Scalar> weights;
};

// Gauss-Hermite rule for the standard normal weight (weights sum to one).
// Nodes are eigenvalues of the Jacobi matrix, polished by Newton steps on the
// orthonormal Hermite recurrence; weights come from 1 / (n p_{n-1}(z)^2)
// evaluated with a rescaled recurrence so large n does not overflow.
template <typename Scalar>
GaussRule<Scalar> compute_gauss_hermite(int n) {
  using Matrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;
  if (n < 1) throw PreconditionError("Gauss-Hermite rule needs n >= 1");
  GaussRule<Scalar> rule{ArrayX<Scalar>(n), ArrayX<Scalar>(n)};
  if (n == 1) {
    rule.nodes(0) = 0;
    rule.weights(0) = 1;
    return rule;
  }
  VectorX<Scalar> diag = VectorX<Scalar>::Zero(n);
  VectorX<Scalar> sub(n - 1);
  for (int k = 1; k < n; ++k) sub(k - 1) = std::sqrt(Scalar(k));
  Eigen::SelfAdjointEigenSolver<Matrix> solver;
  solver.computeFromTridiagonal(diag, sub, Eigen::EigenvaluesOnly);

  const Scalar rescale = Scalar(1e100);
  const Scalar log_rescale = std::log(rescale);
  auto recur = [&](Scalar z, Scalar& p_prev, Scalar& p_last, Scalar& log_scale) {
    // p_prev = p_{n-1}, p_last = p_n, both times exp(-log_scale)
    Scalar pm1 = 0, p = 1;
    log_scale = 0;
    for (int k = 0; k < n; ++k) {
      const Scalar next = (z * p - std::sqrt(Scalar(k)) * pm1) / std::sqrt(Scalar(k + 1));
      pm1 = p;
      p = next;
      if (std::abs(p) > rescale) {
        p /= rescale;
        pm1 /= rescale;
        log_scale += log_rescale;
      }
    }
    p_prev = pm1;
    p_last = p;
  };

  Scalar log_total = kNegInf<Scalar>;
  for (int i = 0; i < n; ++i) {
    Scalar z = solver.eigenvalues()(i);
    Scalar pm1, p, log_scale;
    for (int it = 0; it < 3; ++it) {
      recur(z, pm1, p, log_scale);
      z -= p / (std::sqrt(Scalar(n)) * pm1);
    }
    recur(z, pm1, p, log_scale);
    rule.nodes(i) = z;
    rule.weights(i) = -std::log(Scalar(n)) - 2 * (std::log(std::abs(pm1)) + log_scale);
    log_total = log_add_exp(log_total, rule.weights(i));
  }
  rule.weights = (rule.weights - log_total).exp();
  // symmetrize against rounding
  for (int i = 0; i < n / 2; ++i) {
    const Scalar z = (rule.nodes(n - 1 - i) - rule.nodes(i)) / 2;
    const Scalar w = (rule.weights(n - 1 - i) + rule.weights(i)) / 2;
    rule.nodes(i) = -z;
    rule.nodes(n - 1 - i) = z;
    rule.weights(i) = rule.weights(n - 1 - i) = w;
  }
  if (n % 2 == 1) rule.nodes(n / 2) = 0;
  return rule;
}

// Gauss-Legendre rule on [-1, 1].
template <typename Scalar>
GaussRule<Scalar> compute_gauss_legendre(int n) {
  if (n < 1) throw PreconditionError("Gauss-Legendre rule needs n >= 1");
  GaussRule<Scalar> rule{ArrayX<Scalar>(n), ArrayX<Scalar>(n)};
  const Scalar pi = std::numbers::pi_v<Scalar>;
  for (int i = 0; i < (n + 1) / 2; ++i) {
    Scalar x = std::cos(pi * (i + Scalar(0.75)) / (n + Scalar(0.5)));
    Scalar dp = 1;
    for (int it = 0; it < 100; ++it) {
      Scalar p0 = 1, p1 = x;
      for (int k = 2; k <= n; ++k) {
        const Scalar p2 = ((2 * k - 1) * x * p1 - (k - 1) * p0) / k;
        p0 = p1;
        p1 = p2;
      }
      if (n == 1) p0 = 1;
      dp = n * (x * p1 - p0) / (x * x - 1);
      const Scalar dx = p1 / dp;
      x -= dx;
      if (std::abs(dx) < 4 * std::numeric_limits<Scalar>::epsilon()) break;
    }
    const Scalar w = 2 / ((1 - x * x) * dp * dp);
    rule.nodes(i) = -x;
    rule.nodes(n - 1 - i) = x;
    rule.weights(i) = rule.weights(n - 1 - i) = w;
  }
  if (n % 2 == 1) rule.nodes(n / 2) = 0;
  return rule;
}

namespace detail {

template <typename Scalar, bool Hermite>
const GaussRule<Scalar>& cached_rule(int n) {
  static std::mutex mutex;
  static std::map<int, std::unique_ptr<GaussRule<Scalar>>> cache;
  std::lock_guard<std::mutex> lock(mutex);
  auto& slot = cache[n];
  if (!slot) {
    slot = std::make_unique<GaussRule<Scalar>>(Hermite ? compute_gauss_hermite<Scalar>(n)
                                                       : compute_gauss_legendre<Scalar>(n));
  }
  return *slot;
}

}  // namespace detail

template <typename Scalar>
const GaussRule<Scalar>& gauss_hermite(int n) {
  return detail::cached_rule<Scalar, true>(n);
}

template <typename Scalar>
const GaussRule<Scalar>& gauss_legendre(int n) {
  return detail::cached_rule<Scalar, false>(n);
}

namespace detail {

// Gauss-Kronrod 7/15 on [a, b]; returns the Kronrod estimate and |K - G|.
template <typename Scalar, typename F>
std::pair<Scalar, Scalar> gauss_kronrod15(const F& f, Scalar a, Scalar b) {
  static constexpr double xk[8] = {0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
                                   0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
                                   0.586087235467691130294144845693013, 0.405845151377397166906606412076961,
                                   0.207784955007898467600689403773245, 0.000000000000000000000000000000000};
  static constexpr double wk[8] = {0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
                                   0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
                                   0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
                                   0.204432940075298892414161999234649, 0.209482141084727828012999174891714};
  static constexpr double wg[4] = {0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
                                   0.381830050505118944950369775488975, 0.417959183673469387755102040816327};
  const Scalar c = (a + b) / 2, h = (b - a) / 2;
  const Scalar fc = f(c);
  Scalar kron = Scalar(wk[7]) * fc;
  Scalar gauss = Scalar(wg[3]) * fc;
  for (int i = 0; i < 7; ++i) {
    const Scalar dx = h * Scalar(xk[i]);
    const Scalar sum = f(c - dx) + f(c + dx);
    kron += Scalar(wk[i]) * sum;
    if (i % 2 == 1) gauss += Scalar(wg[i / 2]) * sum;
  }
  return {kron * h, std::abs((kron - gauss) * h)};
}

}  // namespace detail

// Globally adaptive Gauss-Kronrod integration of f over the listed breakpoints.
template <typename Scalar, typename F>
Scalar integrate_adaptive(const F& f, const std::vector<Scalar>& breakpoints, double rel_tolerance,
                          int max_intervals = 4000) {
  struct Piece {
    Scalar a, b, value, error;
  };
  std::vector<Piece> pieces;
  Scalar total = 0, error = 0;
  for (std::size_t i = 0; i + 1 < breakpoints.size(); ++i) {
    const auto [v, e] = detail::gauss_kronrod15<Scalar>(f, breakpoints[i], breakpoints[i + 1]);
    pieces.push_back({breakpoints[i], breakpoints[i + 1], v, e});
    total += v;
    error += e;
  }
  Scalar previous = total;
  const auto worse = [](const Piece& x, const Piece& y) { return x.error < y.error; };
  std::make_heap(pieces.begin(), pieces.end(), worse);
  while (error > std::max(Scalar(rel_tolerance) * std::abs(total), Scalar(1e-15))) {
    if (static_cast<int>(pieces.size()) >= max_intervals) {
      throw QuadratureError("adaptive quadrature exceeded its interval budget",
                            static_cast<double>(previous), static_cast<double>(total));
    }
    std::pop_heap(pieces.begin(), pieces.end(), worse);
    const Piece worst = pieces.back();
    pieces.pop_back();
    const Scalar mid = (worst.a + worst.b) / 2;
    const auto [v1, e1] = detail::gauss_kronrod15<Scalar>(f, worst.a, mid);
    const auto [v2, e2] = detail::gauss_kronrod15<Scalar>(f, mid, worst.b);
    previous = total;
    total += v1 + v2 - worst.value;
    error += e1 + e2 - worst.error;
    pieces.push_back({worst.a, mid, v1, e1});
    std::push_heap(pieces.begin(), pieces.end(), worse);
    pieces.push_back({mid, worst.b, v2, e2});
    std::push_heap(pieces.begin(), pieces.end(), worse);
  }
  // re-sum to shed accumulated rounding from the running updates
  Scalar resum = 0;
  for (const auto& p : pieces) resum += p.value;
  return resum;
}

// Half-width, in standard deviations, of the window used when the normal
// expectation is computed on explicit intervals.
template <typename Scalar>
inline constexpr Scalar kNormalWindow = Scalar(13);

// E f(mean + sd Z) for standard normal Z.  `cuts` lists points where f may be
// discontinuous; when present, or for the adaptive scheme, the expectation is
// integrated piecewise between them instead of by Gauss-Hermite.
template <typename Scalar, typename F>
Scalar normal_expectation(const F& f, Scalar mean, Scalar sd, const std::vector<Scalar>& cuts,
                          const QuadratureSpec& quad) {
  const Scalar lo = mean - kNormalWindow<Scalar> * sd;
  const Scalar hi = mean + kNormalWindow<Scalar> * sd;
  std::vector<Scalar> points{lo};
  for (Scalar c : cuts) {
    if (c > lo && c < hi) points.push_back(c);
  }
  points.push_back(hi);
  std::sort(points.begin(), points.end());
  const bool has_cuts = points.size() > 2;

  if (quad.scheme == QuadratureScheme::GaussHermite && !has_cuts) {
    const auto& rule = gauss_hermite<Scalar>(quad.node_count);
    Scalar sum = 0;
    for (Eigen::Index i = 0; i < rule.nodes.size(); ++i) {
      if (rule.weights(i) == 0) continue;
      sum += rule.weights(i) * f(mean + sd * rule.nodes(i));
    }
    return sum;
  }

  const auto weighted = [&](Scalar x) {
    const Scalar z = (x - mean) / sd;
    return f(x) * normal_density(z) / sd;
  };
  if (quad.scheme == QuadratureScheme::Adaptive) {
    // the density peak goes in as an extra breakpoint so the first panels see it
    if (mean > lo && mean < hi) {
      points.push_back(mean);
      std::sort(points.begin(), points.end());
      points.erase(std::unique(points.begin(), points.end()), points.end());
    }
    return integrate_adaptive<Scalar>(weighted, points, quad.rel_tolerance);
  }
  const auto& rule = gauss_legendre<Scalar>(quad.node_count);
  Scalar sum = 0;
  for (std::size_t k = 0; k + 1 < points.size(); ++k) {
    const Scalar c = (points[k] + points[k + 1]) / 2, h = (points[k + 1] - points[k]) / 2;
    for (Eigen::Index i = 0; i < rule.nodes.size(); ++i) sum += h * rule.weights(i) * weighted(c + h * rule.nodes(i));
  }
  return sum;
}

}  // namespace sparsepred
