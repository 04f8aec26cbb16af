#pragma once

// Independent reference implementations used only by tests. None of these
// call into the library's numerical kernels.

#include <cstdint>
#include <map>
#include <vector>

#include <boost/multiprecision/cpp_int.hpp>

#include "cyclepart/thermo.hpp"

namespace oracle {

// zeta(s), s > 1, by Euler-Maclaurin in long double with cutoff 64 and
// Bernoulli terms through B14.
long double zeta_em(long double s);

// sum_{k=1}^{terms} k^{-s} e^{-alpha k}, summed smallest-first in long double.
long double bose_direct(long double s, long double alpha, std::int64_t terms);

struct Quadrature {
  double value = 0.0;
  double error = 0.0;
};

// (1/Gamma(s)) int_0^inf t^{s-1} / (e^{t+alpha} - 1) dt by Boost tanh-sinh.
Quadrature bose_integral(double s, double alpha);

// p(n) by the DP over largest part.
boost::multiprecision::cpp_int partition_count_dp(int n);

// Cycle types of all permutations of n (descending parts) with multiplicity.
std::map<std::vector<int>, std::int64_t> classify_permutations(int n);

// log Z_n from n Z_n = sum_{k=1}^n c_k Z_{n-k}, c_k = |Lambda| (4 pi beta k)^{-d/2},
// carried in log space. params.n must be set.
double log_Z_recursion(const cyclepart::SystemParams& params);

// log Z_m for m = 0..n from the same recursion, at volume n / rho.
std::vector<double> log_Z_table(const cyclepart::SystemParams& params);

// E[sum_{k > threshold_len} k r_k] / n under mu_N, from E[r_k] = (c_k / k) Z_{n-k} / Z_n.
double long_cycle_fraction(const cyclepart::SystemParams& params, int threshold_len);

}  // namespace oracle
