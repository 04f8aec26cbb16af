#include "oracles.hpp"

#include <algorithm>
#include <boost/math/quadrature/exp_sinh.hpp>
#include <boost/math/quadrature/tanh_sinh.hpp>
#include <cmath>
#include <numbers>
#include <numeric>

namespace oracle {

long double zeta_em(long double s) {
  constexpr int N = 64;
  // B_{2j} / (2j)!
  constexpr long double b[] = {1.0L / 12,         -1.0L / 720,           1.0L / 30240,
                               -1.0L / 1209600,   1.0L / 47900160,       -691.0L / 1307674368000,
                               1.0L / 74724249600};
  long double sum = 0.0L;
  for (int k = N - 1; k >= 1; --k) sum += std::pow(static_cast<long double>(k), -s);
  const long double n = N;
  sum += std::pow(n, 1 - s) / (s - 1) + 0.5L * std::pow(n, -s);
  // d^{2j-1}/dx^{2j-1} x^{-s} at N, as a rising product.
  long double rising = s;
  long double power = std::pow(n, -s - 1);
  for (int j = 0; j < 7; ++j) {
    sum += b[j] * rising * power;
    rising *= (s + 2 * j + 1) * (s + 2 * j + 2);
    power /= n * n;
  }
  return sum;
}

long double bose_direct(long double s, long double alpha, std::int64_t terms) {
  long double sum = 0.0L;
  for (std::int64_t k = terms; k >= 1; --k) {
    const long double kk = static_cast<long double>(k);
    sum += std::exp(-alpha * kk - s * std::log(kk));
  }
  return sum;
}

Quadrature bose_integral(double s, double alpha) {
  // Split at t = 1: tanh-sinh handles the t^{s-1} endpoint, exp-sinh the tail.
  auto f = [s, alpha](double t) { return std::pow(t, s - 1) / std::expm1(t + alpha); };
  boost::math::quadrature::tanh_sinh<double> near;
  boost::math::quadrature::exp_sinh<double> far;
  double e1 = 0.0, e2 = 0.0, l1 = 0.0, l2 = 0.0;
  const double v1 = near.integrate(f, 0.0, 1.0, 1e-15, &e1, &l1);
  const double v2 = far.integrate(f, 1.0, std::numeric_limits<double>::infinity(), 1e-15, &e2, &l2);
  const double g = std::tgamma(s);
  Quadrature q;
  q.value = (v1 + v2) / g;
  q.error = (std::abs(e1) * l1 + std::abs(e2) * l2 + 1e-15 * (std::abs(v1) + std::abs(v2))) / g;
  return q;
}

boost::multiprecision::cpp_int partition_count_dp(int n) {
  std::vector<boost::multiprecision::cpp_int> p(static_cast<std::size_t>(n) + 1, 0);
  p[0] = 1;
  for (int part = 1; part <= n; ++part) {
    for (int m = part; m <= n; ++m) p[static_cast<std::size_t>(m)] += p[static_cast<std::size_t>(m - part)];
  }
  return p[static_cast<std::size_t>(n)];
}

std::map<std::vector<int>, std::int64_t> classify_permutations(int n) {
  std::vector<int> perm(static_cast<std::size_t>(n));
  std::iota(perm.begin(), perm.end(), 0);
  std::map<std::vector<int>, std::int64_t> out;
  do {
    std::vector<char> seen(static_cast<std::size_t>(n), 0);
    std::vector<int> type;
    for (int i = 0; i < n; ++i) {
      int len = 0;
      for (int j = i; !seen[static_cast<std::size_t>(j)]; j = perm[static_cast<std::size_t>(j)]) {
        seen[static_cast<std::size_t>(j)] = 1;
        ++len;
      }
      if (len > 0) type.push_back(len);
    }
    std::sort(type.rbegin(), type.rend());
    ++out[type];
  } while (std::next_permutation(perm.begin(), perm.end()));
  return out;
}

std::vector<double> log_Z_table(const cyclepart::SystemParams& params) {
  const int n = *params.n;
  const double volume = n / params.rho;
  std::vector<double> log_c(static_cast<std::size_t>(n) + 1);
  for (int k = 1; k <= n; ++k) {
    log_c[static_cast<std::size_t>(k)] =
        std::log(volume) - 0.5 * params.d * std::log(4.0 * std::numbers::pi * params.beta * k);
  }
  std::vector<double> log_Z(static_cast<std::size_t>(n) + 1, 0.0);
  for (int m = 1; m <= n; ++m) {
    double top = -INFINITY;
    for (int k = 1; k <= m; ++k) {
      top = std::max(top, log_c[static_cast<std::size_t>(k)] + log_Z[static_cast<std::size_t>(m - k)]);
    }
    long double acc = 0.0L;
    for (int k = 1; k <= m; ++k) {
      acc += std::exp(static_cast<long double>(log_c[static_cast<std::size_t>(k)] +
                                               log_Z[static_cast<std::size_t>(m - k)] - top));
    }
    log_Z[static_cast<std::size_t>(m)] = top + static_cast<double>(std::log(acc)) - std::log(static_cast<double>(m));
  }
  return log_Z;
}

double log_Z_recursion(const cyclepart::SystemParams& params) { return log_Z_table(params).back(); }

double long_cycle_fraction(const cyclepart::SystemParams& params, int threshold_len) {
  const int n = *params.n;
  const auto log_Z = log_Z_table(params);
  const double volume = n / params.rho;
  long double mass = 0.0L;
  for (int k = std::max(threshold_len, 0) + 1; k <= n; ++k) {
    const double log_c = std::log(volume) - 0.5 * params.d * std::log(4.0 * std::numbers::pi * params.beta * k);
    mass += std::exp(static_cast<long double>(log_c + log_Z[static_cast<std::size_t>(n - k)] - log_Z.back()));
  }
  return static_cast<double>(mass / n);
}

}  // namespace oracle
