#pragma once

#include <cstdint>

namespace cyclepart {

// A series value together with a bound on |value - exact|.
struct BoseEval {
  double value = 0.0;
  double error_bound = 0.0;
  std::int64_t terms_used = 0;
};

// Hard budget on summed terms per evaluation; beyond it a PrecisionError.
inline constexpr std::int64_t kMaxSeriesTerms = 100'000'000;

// g_s(alpha) = sum_{k>=1} k^{-s} e^{-alpha k}.
//
// For alpha > 0 the direct series is summed up to K with the geometric tail
// bound e^{-alpha (K+1)} / ((K+1)^s (1 - e^{-alpha})). For alpha == 0 the
// value is zeta(s) and is delegated to the Euler-Maclaurin evaluator. The
// error bound includes floating-point rounding of the summed terms, so a tol
// below the rounding floor of the result raises PrecisionError.
//
// Throws DivergenceError for alpha == 0 and s <= 1, DomainError for alpha < 0,
// s <= 0 or tol <= 0.
BoseEval bose_g(double s, double alpha, double tol);

// Riemann zeta for real s > 1 + 1e-9, by Euler-Maclaurin summation with four
// Bernoulli corrections; the remainder is bounded by the first omitted term.
BoseEval zeta(double s, double tol);

// sum_{k >= from} k^{-s} for s > 1 and from >= 1, same method as zeta.
BoseEval zeta_tail(double s, std::int64_t from, double tol);

// Analytic continuation of zeta to real s != 1: Euler-Maclaurin on s >= 0,
// the functional equation zeta(s) = 2^s pi^{s-1} sin(pi s / 2) Gamma(1-s)
// zeta(1-s) on s < 0. Exact zeros at negative even integers.
BoseEval zeta_continued(double s, double tol);

// Truncated small-alpha expansion of g_s(alpha).
struct SmallAlphaExpansion {
  double value = 0.0;
  // Number of regular-sum terms zeta(s-k)(-alpha)^k/k! actually included.
  int terms_included = 0;
  // True when some term with k <= k_max had to be dropped because zeta(s-k)
  // could not be evaluated to the working tolerance.
  bool truncated = false;
};

// Non-integer s:  Gamma(1-s) alpha^{s-1} + sum_{k=0}^{k_max} zeta(s-k) (-alpha)^k / k!
// Integer s >= 1: (-alpha)^{s-1}/(s-1)! [ -log alpha + H_{s-1} ]
//                 + sum_{k=0, k != s-1}^{k_max} zeta(s-k) (-alpha)^k / k!
// Requires s > 0, alpha in (0, 0.5], k_max >= 0.
SmallAlphaExpansion bose_small_alpha(double s, double alpha, int k_max);

}  // namespace cyclepart
