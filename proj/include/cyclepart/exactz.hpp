#pragma once

#include <span>
#include <utility>
#include <vector>

#include "cyclepart/partitions.hpp"
#include "cyclepart/thermo.hpp"

namespace cyclepart {

// Largest n for the permutation-sum oracle (9! = 362880 permutations).
inline constexpr int kBruteForceCap = 9;
// Largest n for materialized ensembles and exact expectations.
inline constexpr int kExpectationCap = 40;

// Natural log of the cycle-type weight under the free-space bridge mass,
//   sum_k [ r_k log|Lambda| - log r_k! - r_k log k - (d/2) r_k log(4 pi beta k) ].
// params.n must be set and equal partition.n().
double log_weight(const Partition& partition, const SystemParams& params);

// log Z_N by summing over all n! permutations; each k-cycle contributes
// |Lambda| (4 pi beta k)^{-d/2} and the total is divided by n!. Test oracle.
double brute_force_log_Z(const SystemParams& params);

// log Z_N as a streamed log-sum-exp of log_weight over partitions of n <= 70.
double exact_log_Z(const SystemParams& params);

// Every partition of n <= 40 with its weight.
struct WeightedEnsemble {
  SystemParams params;
  std::vector<std::pair<Partition, double>> log_weights;
  double log_Z = 0.0;

  // mu_N of the i-th partition.
  double probability(std::size_t i) const;
};

WeightedEnsemble weighted_ensemble(const SystemParams& params);

// E_{mu_N}[r_k] / n for k = 1..n (index k - 1). sum_k k E[Qhat(k)] = 1.
std::vector<double> mu_N_expected_shape(const SystemParams& params);

struct ConvergenceRow {
  int n = 0;
  double log_Z_per_n = 0.0;
  double neg_chi = 0.0;
  // log_Z_per_n - neg_chi.
  double gap = 0.0;
};

// Finite-size approach of (1/n) log Z_n to -chi with |Lambda| = n / rho.
std::vector<ConvergenceRow> convergence_scan(const SystemParams& base, std::span<const int> n_list, double tol);

// Bracket on the confined bridge mass of a k-cycle:
// (4 pi beta k)^{-d/2} (1 - e^{-dN/4beta}) <= mass <= (4 pi beta k)^{-d/2}.
struct ConfinementBound {
  double lower_factor = 0.0;
  double upper_factor = 0.0;
  // lower / upper = 1 - e^{-dN/4beta}.
  double ratio = 0.0;
};

ConfinementBound confinement_correction_bound(int k, const SystemParams& params);

// log Z with every cycle mass at its lower and upper bracket. The upper value
// equals exact_log_Z; max_shift = N |log(1 - e^{-dN/4beta})| bounds the gap.
struct ConfinementBracket {
  double log_Z_lower = 0.0;
  double log_Z_upper = 0.0;
  double max_shift = 0.0;
};

ConfinementBracket confinement_log_Z_bracket(const SystemParams& params);

}  // namespace cyclepart
