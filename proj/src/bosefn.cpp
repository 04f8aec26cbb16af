#include "cyclepart/bosefn.hpp"

#include <array>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

#include "cyclepart/errors.hpp"
#include "cyclepart/numeric.hpp"

namespace cyclepart {

namespace {

constexpr double kEps = std::numeric_limits<double>::epsilon();

// B_2, B_4, ..., B_10 divided by (2j)!.
constexpr std::array<double, 5> kBernoulliOverFactorial = {
    (1.0 / 6.0) / 2.0,
    (-1.0 / 30.0) / 24.0,
    (1.0 / 42.0) / 720.0,
    (-1.0 / 30.0) / 40320.0,
    (5.0 / 66.0) / 3628800.0,
};
constexpr int kCorrections = 4;

// Rising factorial s (s+1) ... (s+m-1).
double rising(double s, int m) {
  double r = 1.0;
  for (int i = 0; i < m; ++i) r *= s + i;
  return r;
}

// Magnitude of the first omitted Euler-Maclaurin term at cutoff N.
double em_remainder(double s, double N) {
  return std::abs(kBernoulliOverFactorial[kCorrections] * rising(s, 2 * kCorrections + 1)) *
         std::pow(N, -s - 2.0 * kCorrections - 1.0);
}

// Smallest cutoff N >= lo with em_remainder(s, N) <= target.
std::int64_t em_cutoff(double s, double target, std::int64_t lo) {
  const double c = std::abs(kBernoulliOverFactorial[kCorrections] * rising(s, 2 * kCorrections + 1));
  const double exponent = s + 2.0 * kCorrections + 1.0;
  double n = (c <= target) ? 1.0 : std::pow(c / target, 1.0 / exponent);
  n = std::max(n, 10.0);
  if (!(n < 4.0 * static_cast<double>(kMaxSeriesTerms))) return std::numeric_limits<std::int64_t>::max();
  auto N = std::max<std::int64_t>(lo, static_cast<std::int64_t>(std::ceil(n)));
  while (em_remainder(s, static_cast<double>(N)) > target) ++N;
  return N;
}

// sum_{k >= from} k^{-s} (analytically continued for s < 1 when from == 1),
// by direct summation to N-1 followed by the Euler-Maclaurin tail at N.
BoseEval euler_maclaurin(double s, std::int64_t from, double tol, const char* who) {
  if (!(tol > 0.0)) throw DomainError(std::string(who) + ": tol must be positive");
  const std::int64_t N = em_cutoff(s, 0.5 * tol, std::max<std::int64_t>(from, 1));
  if (N == std::numeric_limits<std::int64_t>::max() || N - from > kMaxSeriesTerms) {
    std::ostringstream msg;
    msg << who << ": tolerance " << tol << " not reachable within " << kMaxSeriesTerms << " terms at s = " << s;
    throw PrecisionError(msg.str());
  }

  NeumaierSum sum;
  double magnitude = 0.0;
  for (std::int64_t k = from; k < N; ++k) {
    const double t = std::pow(static_cast<double>(k), -s);
    sum.add(t);
    magnitude += std::abs(t);
  }
  const double Nd = static_cast<double>(N);
  const double integral = std::pow(Nd, 1.0 - s) / (s - 1.0);
  const double half = 0.5 * std::pow(Nd, -s);
  sum.add(integral);
  sum.add(half);
  magnitude += std::abs(integral) + std::abs(half);
  for (int j = 1; j <= kCorrections; ++j) {
    const double t = kBernoulliOverFactorial[j - 1] * rising(s, 2 * j - 1) * std::pow(Nd, -s - 2.0 * j + 1.0);
    sum.add(t);
    magnitude += std::abs(t);
  }
  const double value = sum.value();
  // Each power is within a few ulp; the compensated sum adds ~2 eps |value|.
  const double rounding = 4.0 * kEps * magnitude + 2.0 * kEps * std::abs(value);
  BoseEval out{value, em_remainder(s, Nd) + rounding, std::max<std::int64_t>(N - from, 1)};
  if (out.error_bound > tol) {
    std::ostringstream msg;
    msg << who << ": rounding floor " << out.error_bound << " exceeds tol " << tol << " at s = " << s;
    throw PrecisionError(msg.str());
  }
  return out;
}

// zeta at any real s != 1 with near machine relative accuracy: the
// tolerance is loosened until the evaluator can certify it.
BoseEval zeta_any(double s);

// Direct summation of g_s beyond this many terms switches to the expansion
// about alpha = 0.
constexpr double kDirectTermBudget = 1e5;

// g_s(alpha) = singular(s, alpha) + sum_k zeta(s - k) (-alpha)^k / k!, with a
// certified remainder. The regular sum converges for alpha < 2 pi; for
// s - k <= -1 the functional equation gives
//   |zeta(s - k)| <= 2 zeta(2) (2 pi)^{s-k-1} Gamma(k + 1 - s),
// so the k-th term is at most 2 zeta(2) (2 pi)^{s-1} (alpha / 2 pi)^k.
BoseEval bose_expansion(double s, double alpha, double tol) {
  const double two_pi = 2.0 * std::numbers::pi;
  const double ratio = alpha / two_pi;
  const double rounded = std::round(s);
  const bool integer_s = std::abs(s - rounded) < 1e-12;
  const int s_int = static_cast<int>(rounded);
  const double tail_scale = 2.0 * (std::numbers::pi * std::numbers::pi / 6.0) * std::pow(two_pi, s - 1.0);

  int k_max = static_cast<int>(std::ceil(s)) + 1;
  auto remainder = [&](int k0) { return tail_scale * std::pow(ratio, k0) / (1.0 - ratio); };
  while (remainder(k_max + 1) > 0.25 * tol && k_max < 200) ++k_max;

  NeumaierSum sum;
  double err = remainder(k_max + 1);
  double singular;
  if (integer_s) {
    double harmonic = 0.0;
    for (int m = 1; m <= s_int - 1; ++m) harmonic += 1.0 / m;
    singular = std::pow(-alpha, s_int - 1) / std::tgamma(static_cast<double>(s_int)) * (-std::log(alpha) + harmonic);
  } else {
    singular = std::tgamma(1.0 - s) * std::pow(alpha, s - 1.0);
  }
  sum.add(singular);
  double magnitude = std::abs(singular) * 8.0;

  double power = 1.0;
  for (int k = 0; k <= k_max; ++k) {
    if (k > 0) power *= -alpha / k;
    if (integer_s && k == s_int - 1) continue;
    const BoseEval z = zeta_any(s - k);
    const double t = z.value * power;
    sum.add(t);
    err += z.error_bound * std::abs(power);
    magnitude += 4.0 * std::abs(t);
  }
  const double value = sum.value();
  return BoseEval{value, err + kEps * magnitude + 2.0 * kEps * std::abs(value), k_max + 2};
}

}  // namespace

BoseEval zeta_tail(double s, std::int64_t from, double tol) {
  if (!(s > 1.0 + 1e-9)) {
    std::ostringstream msg;
    msg << "zeta_tail: series diverges for s = " << s << " <= 1";
    throw DivergenceError(msg.str());
  }
  if (from < 1) throw DomainError("zeta_tail: from must be >= 1");
  return euler_maclaurin(s, from, tol, "zeta_tail");
}

BoseEval zeta(double s, double tol) {
  if (!(s > 1.0 + 1e-9)) {
    std::ostringstream msg;
    msg << "zeta: series diverges for s = " << s << " <= 1";
    throw DivergenceError(msg.str());
  }
  return euler_maclaurin(s, 1, tol, "zeta");
}

BoseEval zeta_continued(double s, double tol) {
  if (!std::isfinite(s)) throw DomainError("zeta_continued: s must be finite");
  if (std::abs(s - 1.0) <= 1e-9) throw DivergenceError("zeta_continued: pole at s = 1");
  if (s > 1.0) return zeta(s, tol);
  if (s >= 0.0) return euler_maclaurin(s, 1, tol, "zeta_continued");

  // Trivial zeros.
  if (s == std::round(s) && std::fmod(-s, 2.0) == 0.0) return BoseEval{0.0, 0.0, 1};

  const double pi = std::numbers::pi;
  const double prefactor = std::pow(2.0, s) * std::pow(pi, s - 1.0) * std::sin(pi * s / 2.0) * std::tgamma(1.0 - s);
  if (!std::isfinite(prefactor)) {
    std::ostringstream msg;
    msg << "zeta_continued: reflection prefactor overflows at s = " << s;
    throw PrecisionError(msg.str());
  }
  const double mag = std::abs(prefactor);
  // Split the budget: half for the reflected zeta, half for rounding in the prefactor.
  const BoseEval reflected = zeta(1.0 - s, std::max(0.5 * tol / std::max(mag, 1e-300), 4.0 * kEps));
  const double value = prefactor * reflected.value;
  BoseEval out{value, mag * reflected.error_bound + 16.0 * kEps * std::abs(value), reflected.terms_used};
  if (out.error_bound > tol) {
    std::ostringstream msg;
    msg << "zeta_continued: cannot certify tol " << tol << " at s = " << s;
    throw PrecisionError(msg.str());
  }
  return out;
}

BoseEval bose_g(double s, double alpha, double tol) {
  if (!(tol > 0.0)) throw DomainError("bose_g: tol must be positive");
  if (!(s > 0.0)) throw DomainError("bose_g: s must be positive");
  if (!(alpha >= 0.0)) throw DomainError("bose_g: alpha must be nonnegative");
  if (alpha == 0.0) {
    if (s <= 1.0) {
      std::ostringstream msg;
      msg << "bose_g: g_s(0) diverges for s = " << s << " <= 1";
      throw DivergenceError(msg.str());
    }
    return zeta(s, tol);
  }

  const double one_minus_q = -std::expm1(-alpha);
  if (alpha < 1.0 && std::log(2.0 / (tol * one_minus_q)) / alpha > kDirectTermBudget) {
    const BoseEval e = bose_expansion(s, alpha, tol);
    if (e.error_bound > tol) {
      std::ostringstream msg;
      msg << "bose_g: rounding floor " << e.error_bound << " exceeds tol " << tol;
      throw PrecisionError(msg.str());
    }
    return e;
  }
  auto tail = [&](double K) {
    return std::exp(-alpha * (K + 1.0) - s * std::log(K + 1.0)) / one_minus_q;
  };
  const double target = 0.5 * tol;

  // Smallest K with tail(K) <= target: grow geometrically, then bisect.
  double hi = 1.0;
  while (tail(hi) > target) {
    hi *= 2.0;
    if (hi > 2.0 * static_cast<double>(kMaxSeriesTerms)) {
      std::ostringstream msg;
      msg << "bose_g: tolerance " << tol << " needs more than " << kMaxSeriesTerms << " terms (s = " << s
          << ", alpha = " << alpha << ")";
      throw PrecisionError(msg.str());
    }
  }
  double lo = std::floor(hi / 2.0);
  while (hi - lo > 1.0) {
    const double mid = std::floor(0.5 * (lo + hi));
    (tail(mid) > target ? lo : hi) = mid;
  }
  const auto K = static_cast<std::int64_t>(hi);
  if (K > kMaxSeriesTerms) {
    std::ostringstream msg;
    msg << "bose_g: tolerance " << tol << " needs " << K << " terms, cap is " << kMaxSeriesTerms;
    throw PrecisionError(msg.str());
  }

  NeumaierSum sum;
  double rounding = 0.0;
  for (std::int64_t k = 1; k <= K; ++k) {
    const double kd = static_cast<double>(k);
    const double log_k = std::log(kd);
    const double exponent = -s * log_k - alpha * kd;
    const double t = std::exp(exponent);
    sum.add(t);
    // Relative error of exp(x) when x carries an absolute error ~eps |x|.
    rounding += t * (std::abs(exponent) + 3.0);
  }
  const double value = sum.value();
  BoseEval out{value, tail(static_cast<double>(K)) + kEps * rounding + 2.0 * kEps * value, std::max<std::int64_t>(K, 1)};
  if (out.error_bound > tol) {
    std::ostringstream msg;
    msg << "bose_g: rounding floor " << out.error_bound << " exceeds tol " << tol;
    throw PrecisionError(msg.str());
  }
  return out;
}

namespace {

BoseEval zeta_any(double s) {
  double tol = 1e-15;
  for (int attempt = 0; attempt < 60; ++attempt, tol *= 4.0) {
    try {
      return zeta_continued(s, tol);
    } catch (const PrecisionError&) {
    }
  }
  std::ostringstream msg;
  msg << "zeta at s = " << s << " cannot be certified";
  throw PrecisionError(msg.str());
}

}  // namespace

SmallAlphaExpansion bose_small_alpha(double s, double alpha, int k_max) {
  if (!(s > 0.0)) throw DomainError("bose_small_alpha: s must be positive");
  if (!(alpha > 0.0 && alpha <= 0.5)) throw DomainError("bose_small_alpha: alpha must lie in (0, 0.5]");
  if (k_max < 0) throw DomainError("bose_small_alpha: k_max must be nonnegative");

  const double rounded = std::round(s);
  const bool integer_s = std::abs(s - rounded) < 1e-12;
  const int s_int = static_cast<int>(rounded);

  SmallAlphaExpansion out;
  NeumaierSum sum;
  if (integer_s) {
    double harmonic = 0.0;
    for (int m = 1; m <= s_int - 1; ++m) harmonic += 1.0 / m;
    const double singular = std::pow(-alpha, s_int - 1) / std::tgamma(static_cast<double>(s_int)) *
                            (-std::log(alpha) + harmonic);
    sum.add(singular);
  } else {
    sum.add(std::tgamma(1.0 - s) * std::pow(alpha, s - 1.0));
  }

  double power = 1.0;  // (-alpha)^k / k!
  for (int k = 0; k <= k_max; ++k) {
    if (k > 0) power *= -alpha / k;
    if (integer_s && k == s_int - 1) continue;
    try {
      sum.add(zeta_continued(s - k, 1e-13).value * power);
      ++out.terms_included;
    } catch (const PrecisionError&) {
      out.truncated = true;
    }
  }
  out.value = sum.value();
  return out;
}

}  // namespace cyclepart
