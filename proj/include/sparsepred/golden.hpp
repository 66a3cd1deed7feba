#pragma once

#include <cmath>
#include <utility>

namespace sparsepred {

// Golden-section maximization of f on [a, b] until the bracket is shorter
// than tol.  Ties keep the left sub-bracket, so the leftmost maximizer wins.
// Returns (argmax, max).
template <typename Scalar, typename F>
std::pair<Scalar, Scalar> golden_section_maximize(const F& f, Scalar a, Scalar b, Scalar tol,
                                                  int max_iterations = 200) {
  const Scalar inv_phi = (std::sqrt(Scalar(5)) - 1) / 2;
  Scalar c = b - inv_phi * (b - a);
  Scalar d = a + inv_phi * (b - a);
  Scalar fc = f(c), fd = f(d);
  for (int it = 0; it < max_iterations && (b - a) > tol; ++it) {
    if (fc >= fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - inv_phi * (b - a);
      fc = f(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + inv_phi * (b - a);
      fd = f(d);
    }
  }
  return fc >= fd ? std::pair{c, fc} : std::pair{d, fd};
}

}  // namespace sparsepred
