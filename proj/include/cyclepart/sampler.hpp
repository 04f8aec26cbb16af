#pragma once

#include <cstdint>
#include <optional>
#include <random>
#include <span>
#include <utility>
#include <vector>

#include "cyclepart/numeric.hpp"
#include "cyclepart/partitions.hpp"
#include "cyclepart/thermo.hpp"

namespace cyclepart {

inline constexpr int kMaxChainParticles = 100'000;

enum class MoveType { split, merge };

struct MoveCounts {
  std::int64_t split_proposed = 0;
  std::int64_t split_accepted = 0;
  std::int64_t merge_proposed = 0;
  std::int64_t merge_accepted = 0;
  // Proposals of a type with no legal move (auto-rejected).
  std::int64_t illegal = 0;
};

// A proposed split or merge. For a split, `first` is the length being split
// and `second` the piece j; for a merge, `first` and `second` are the merged
// lengths.
struct Move {
  MoveType type = MoveType::split;
  bool legal = false;
  int first = 0;
  int second = 0;
  // log q(candidate -> current) - log q(current -> candidate).
  double log_proposal_ratio = 0.0;
  // log mu_N(candidate) - log mu_N(current).
  double log_weight_delta = 0.0;
};

// Metropolis-Hastings chain on the partitions of n targeting mu_N. Split and
// merge are each chosen with probability 1/2. A split picks a cycle of length
// k >= 2 uniformly among such cycles and j uniform in 1..k-1; a merge picks an
// unordered pair of distinct cycles uniformly. Single-threaded, deterministic
// given the seed.
class Chain {
 public:
  enum class Start { identity, single_cycle };

  Chain(const SystemParams& params, std::uint64_t seed, Start start = Start::identity);
  Chain(const SystemParams& params, const Partition& start, std::uint64_t seed);

  // Draws a move from the current state without applying it.
  Move propose();
  // Applies a legal move to the current state.
  void apply(const Move& move);
  // One full Metropolis-Hastings step; true when a move was accepted.
  bool step();

  int n() const { return n_; }
  // Dense occupation numbers, index k = cycle length (index 0 unused).
  std::span<const int> occupations() const { return counts_; }
  int count(int k) const { return counts_[static_cast<std::size_t>(k)]; }
  int num_cycles() const { return cycles_; }
  Partition current() const;
  // Cached log mu_N weight up to the normalisation.
  double log_weight() const { return log_weight_.value(); }
  std::int64_t step_count() const { return steps_; }
  const MoveCounts& move_counts() const { return moves_; }
  std::uint64_t seed() const { return seed_; }
  const SystemParams& params() const { return params_; }

  // sum_{k <= length} k r_k.
  std::int64_t mass_up_to(int length) const;

  // |cached log weight - log_weight(current(), params)|.
  double audit() const;

 private:
  void init(const Partition& start);
  void add_cycle(int k);
  void remove_cycle(int k);
  // Index of the (u+1)-th cycle in length order, u < num_cycles().
  int find_cycle(std::int64_t u) const;
  std::uint64_t uniform_below(std::uint64_t bound);
  double uniform01();

  SystemParams params_;
  int n_ = 0;
  std::uint64_t seed_ = 0;
  std::mt19937_64 rng_;
  std::vector<int> counts_;
  // Fenwick trees over r_k (uniform cycle selection) and k r_k (mass queries).
  std::vector<std::int64_t> tree_;
  std::vector<std::int64_t> mass_tree_;
  int tree_top_bit_ = 1;
  int cycles_ = 0;
  std::int64_t particles_ = 0;
  // log |Lambda| - log k - (d/2) log(4 pi beta k).
  std::vector<double> log_cycle_;
  // Compensated so long runs do not drift from the recomputed weight.
  NeumaierSum log_weight_;
  std::int64_t steps_ = 0;
  MoveCounts moves_;
};

// Exact one-step transition probabilities of the chain kernel from `from`,
// including the rejection mass on `from` itself. Meant for small n.
std::vector<std::pair<Partition, double>> transition_row(const Partition& from, const SystemParams& params);

// Hastings terms of a specific move from `from`; legal == false when the
// move is not available there.
Move split_move(const Partition& from, int k, int j, const SystemParams& params);
Move merge_move(const Partition& from, int a, int b, const SystemParams& params);

// Proposal view of a single move: the candidate partition with its log
// Hastings terms. Draws from the chain's RNG but does not change its state.
struct Proposal {
  Move move;
  std::optional<Partition> candidate;
};

Proposal propose_move(Chain& chain);

struct SamplerConfig {
  std::int64_t steps = 1'000'000;
  // Defaults to steps / 10.
  std::optional<std::int64_t> burn_in;
  std::int64_t thin = 10;
  std::uint64_t seed = 1;
  // Lengths reported in mean_qhat; defaults to min(n, 50).
  std::optional<int> k_report;
  // Cycles longer than n^threshold_exponent count as long.
  double threshold_exponent = 2.0 / 3.0;
  // Batches for batch-means standard errors.
  int batches = 20;
  Chain::Start start = Chain::Start::identity;
};

struct CycleStats {
  int n = 0;
  // Estimated E[r_k] / n for k = 1..k_report (index k - 1).
  std::vector<double> mean_qhat;
  std::vector<double> qhat_stderr;
  // Estimated E[sum_{k > threshold} k r_k] / n.
  double long_cycle_fraction = 0.0;
  double long_cycle_stderr = 0.0;
  double threshold = 0.0;
  // Estimated E[sum_{k > k_report} k r_k] / n; closes sum_k k mean_qhat(k) to 1.
  double tail_remainder = 0.0;
  std::int64_t n_samples = 0;
  MoveCounts moves;
  // Largest |cached - recomputed| log weight seen at audit checkpoints.
  double max_audit_error = 0.0;
};

CycleStats run_chain(const SystemParams& params, const SamplerConfig& config);
CycleStats run_chain(const SystemParams& params, std::int64_t steps, std::int64_t burn_in, std::uint64_t seed);

// Sample-weighted average of independent chains with pooled standard errors.
CycleStats merge_stats(const CycleStats& a, const CycleStats& b);

struct LongCycleRow {
  int n = 0;
  double fraction = 0.0;
  double standard_error = 0.0;
};

// One chain per n with seed derived from config.seed and n; chains run
// concurrently and the result does not depend on scheduling.
std::vector<LongCycleRow> long_cycle_fraction_scan(const SystemParams& base, std::span<const int> n_list,
                                                   const SamplerConfig& config);

}  // namespace cyclepart
