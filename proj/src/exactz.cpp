#include "cyclepart/exactz.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>
#include <sstream>

#include "cyclepart/errors.hpp"
#include "cyclepart/numeric.hpp"

namespace cyclepart {

namespace {

int require_n(const SystemParams& params, int cap, const char* who) {
  params.validate();
  if (!params.n) throw DomainError(std::string(who) + ": particle number n is required");
  const int n = *params.n;
  if (n > cap) {
    std::ostringstream msg;
    msg << who << ": n = " << n << " exceeds cap " << cap;
    throw CapError(msg.str());
  }
  return n;
}

// log of the per-cycle factor |Lambda| (4 pi beta k)^{-d/2} / k, and log r!.
class WeightTable {
 public:
  explicit WeightTable(const SystemParams& params) {
    const int n = *params.n;
    const double log_volume = std::log(params.volume());
    const double log_4pib = std::log(4.0 * std::numbers::pi * params.beta);
    cycle_.resize(static_cast<std::size_t>(n) + 1);
    log_factorial_.resize(static_cast<std::size_t>(n) + 1);
    for (int k = 1; k <= n; ++k) {
      const double log_k = std::log(static_cast<double>(k));
      cycle_[static_cast<std::size_t>(k)] = log_volume - log_k - 0.5 * params.d * (log_4pib + log_k);
    }
    for (int r = 0; r <= n; ++r) log_factorial_[static_cast<std::size_t>(r)] = std::lgamma(r + 1.0);
  }

  double operator()(std::span<const Occupation> occupations) const {
    double w = 0.0;
    for (const auto& o : occupations) {
      w += o.count * cycle_[static_cast<std::size_t>(o.length)] - log_factorial_[static_cast<std::size_t>(o.count)];
    }
    return w;
  }

 private:
  std::vector<double> cycle_;
  std::vector<double> log_factorial_;
};

}  // namespace

double log_weight(const Partition& partition, const SystemParams& params) {
  params.validate();
  if (!params.n || *params.n != partition.n()) {
    std::ostringstream msg;
    msg << "log_weight: partition of " << partition.n() << " does not match params.n";
    throw DomainError(msg.str());
  }
  const double log_volume = std::log(params.volume());
  const double log_4pib = std::log(4.0 * std::numbers::pi * params.beta);
  double w = 0.0;
  for (const auto& o : partition.occupations()) {
    const double log_k = std::log(static_cast<double>(o.length));
    w += o.count * (log_volume - log_k - 0.5 * params.d * (log_4pib + log_k)) - std::lgamma(o.count + 1.0);
  }
  return w;
}

double brute_force_log_Z(const SystemParams& params) {
  const int n = require_n(params, kBruteForceCap, "brute_force_log_Z");
  const double log_volume = std::log(params.volume());
  std::vector<double> log_cycle(static_cast<std::size_t>(n) + 1);
  for (int k = 1; k <= n; ++k) {
    log_cycle[static_cast<std::size_t>(k)] =
        log_volume - 0.5 * params.d * std::log(4.0 * std::numbers::pi * params.beta * k);
  }

  std::vector<int> perm(static_cast<std::size_t>(n));
  std::iota(perm.begin(), perm.end(), 0);
  std::vector<char> seen(static_cast<std::size_t>(n));
  LogSumExp total;
  do {
    std::fill(seen.begin(), seen.end(), 0);
    double w = 0.0;
    for (int start = 0; start < n; ++start) {
      if (seen[static_cast<std::size_t>(start)]) continue;
      int len = 0;
      for (int i = start; !seen[static_cast<std::size_t>(i)]; i = perm[static_cast<std::size_t>(i)]) {
        seen[static_cast<std::size_t>(i)] = 1;
        ++len;
      }
      w += log_cycle[static_cast<std::size_t>(len)];
    }
    total.add(w);
  } while (std::next_permutation(perm.begin(), perm.end()));
  return total.value() - std::lgamma(n + 1.0);
}

double exact_log_Z(const SystemParams& params) {
  const int n = require_n(params, kExhaustiveCap, "exact_log_Z");
  const WeightTable weight(params);
  LogSumExp total;
  for (const Partition& p : enumerate_partitions(n)) total.add(weight(p.occupations()));
  return total.value();
}

double WeightedEnsemble::probability(std::size_t i) const { return std::exp(log_weights.at(i).second - log_Z); }

WeightedEnsemble weighted_ensemble(const SystemParams& params) {
  const int n = require_n(params, kExpectationCap, "weighted_ensemble");
  const WeightTable weight(params);
  WeightedEnsemble out;
  out.params = params;
  LogSumExp total;
  for (const Partition& p : enumerate_partitions(n)) {
    const double w = weight(p.occupations());
    out.log_weights.emplace_back(p, w);
    total.add(w);
  }
  out.log_Z = total.value();
  return out;
}

std::vector<double> mu_N_expected_shape(const SystemParams& params) {
  const int n = require_n(params, kExpectationCap, "mu_N_expected_shape");
  const WeightTable weight(params);
  LogSumExp total;
  std::vector<LogSumExp> by_length(static_cast<std::size_t>(n) + 1);
  for (const Partition& p : enumerate_partitions(n)) {
    const double w = weight(p.occupations());
    total.add(w);
    for (const auto& o : p.occupations()) by_length[static_cast<std::size_t>(o.length)].add(w + std::log(o.count));
  }
  const double log_Z = total.value();
  std::vector<double> out(static_cast<std::size_t>(n));
  for (int k = 1; k <= n; ++k) {
    const auto& acc = by_length[static_cast<std::size_t>(k)];
    out[static_cast<std::size_t>(k - 1)] = acc.empty() ? 0.0 : std::exp(acc.value() - log_Z) / n;
  }
  return out;
}

std::vector<ConvergenceRow> convergence_scan(const SystemParams& base, std::span<const int> n_list, double tol) {
  base.validate();
  const double neg_chi = -chi(base, tol);
  std::vector<ConvergenceRow> rows;
  rows.reserve(n_list.size());
  for (int n : n_list) {
    ConvergenceRow row;
    row.n = n;
    row.log_Z_per_n = exact_log_Z(base.with_n(n)) / n;
    row.neg_chi = neg_chi;
    row.gap = row.log_Z_per_n - neg_chi;
    rows.push_back(row);
  }
  return rows;
}

ConfinementBound confinement_correction_bound(int k, const SystemParams& params) {
  params.validate();
  if (!params.n) throw DomainError("confinement_correction_bound: particle number n is required");
  if (k < 1) throw DomainError("confinement_correction_bound: k must be >= 1");
  ConfinementBound b;
  b.upper_factor = std::pow(4.0 * std::numbers::pi * params.beta * k, -0.5 * params.d);
  b.ratio = -std::expm1(-params.d * static_cast<double>(*params.n) / (4.0 * params.beta));
  b.lower_factor = b.upper_factor * b.ratio;
  return b;
}

ConfinementBracket confinement_log_Z_bracket(const SystemParams& params) {
  const int n = require_n(params, kExhaustiveCap, "confinement_log_Z_bracket");
  const double log_ratio = std::log1p(-std::exp(-params.d * static_cast<double>(n) / (4.0 * params.beta)));
  const WeightTable weight(params);
  LogSumExp lower, upper;
  for (const Partition& p : enumerate_partitions(n)) {
    const double w = weight(p.occupations());
    upper.add(w);
    lower.add(w + p.num_cycles() * log_ratio);
  }
  return {lower.value(), upper.value(), n * std::abs(log_ratio)};
}

}  // namespace cyclepart
