#pragma once

#include <cmath>
#include <limits>
#include <numbers>

#include "sparsepred/types.hpp"

namespace sparsepred {

template <typename Scalar>
inline constexpr Scalar kLogTwoPi = Scalar(1.8378770664093454835606594728112353L);

template <typename Scalar>
inline constexpr Scalar kNegInf = -std::numeric_limits<Scalar>::infinity();

// Terms further than this below the running max contribute exactly zero in
// double precision and are skipped.
template <typename Scalar>
inline constexpr Scalar kLogUnderflow = Scalar(-745);

template <typename Derived>
typename Derived::Scalar log_sum_exp(const Eigen::ArrayBase<Derived>& values) {
  using Scalar = typename Derived::Scalar;
  if (values.size() == 0) return kNegInf<Scalar>;
  const Scalar peak = values.maxCoeff();
  if (!std::isfinite(peak)) return peak;
  const auto shifted = values - peak;
  Scalar sum = 0;
  for (Eigen::Index i = 0; i < shifted.size(); ++i) {
    const Scalar s = shifted(i);
    if (s > kLogUnderflow<Scalar>) sum += std::exp(s);
  }
  return peak + std::log(sum);
}

template <typename Scalar>
Scalar log_add_exp(Scalar a, Scalar b) {
  if (a < b) std::swap(a, b);
  if (a == kNegInf<Scalar>) return a;
  return a + std::log1p(std::exp(b - a));
}

template <typename Scalar>
Scalar log_normal_density(Scalar y, Scalar mean, Scalar variance) {
  const Scalar d = y - mean;
  return Scalar(-0.5) * (kLogTwoPi<Scalar> + std::log(variance)) - d * d / (2 * variance);
}

template <typename Scalar>
Scalar normal_density(Scalar z) {
  return std::exp(Scalar(-0.5) * (z * z + kLogTwoPi<Scalar>));
}

// log(1 - e^x) for x < 0.
template <typename Scalar>
Scalar log1m_exp(Scalar x) {
  return x > Scalar(-0.6931471805599453) ? std::log(-std::expm1(x)) : std::log1p(-std::exp(x));
}

}  // namespace sparsepred
