#include "cyclepart/sampler.hpp"

#include <cassert>
#include <cmath>
#include <future>
#include <limits>
#include <map>
#include <numbers>
#include <sstream>
#include <string>

#include "cyclepart/errors.hpp"
#include "cyclepart/exactz.hpp"

namespace cyclepart {

namespace {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

std::vector<double> cycle_log_factors(const SystemParams& params, int n) {
  std::vector<double> out(static_cast<std::size_t>(n) + 1, 0.0);
  const double log_volume = std::log(params.volume());
  const double log_4pib = std::log(4.0 * std::numbers::pi * params.beta);
  for (int k = 1; k <= n; ++k) {
    const double log_k = std::log(static_cast<double>(k));
    out[static_cast<std::size_t>(k)] = log_volume - log_k - 0.5 * params.d * (log_4pib + log_k);
  }
  return out;
}

double log_choose2(double m) { return std::log(m * (m - 1.0) / 2.0); }

// Hastings terms for splitting one k-cycle into j and k - j.
Move split_terms(std::span<const int> r, int cycles, int k, int j, std::span<const double> log_cycle) {
  Move m;
  m.type = MoveType::split;
  m.legal = true;
  m.first = k;
  m.second = j;
  const int other = k - j;
  const auto at = [&](int len) { return static_cast<double>(r[static_cast<std::size_t>(len)]); };
  const auto lc = [&](int len) { return log_cycle[static_cast<std::size_t>(len)]; };

  const double rj_after = at(j) + 1.0 + (other == j ? 1.0 : 0.0);
  const double rother_after = (other == j) ? rj_after : at(other) + 1.0;
  m.log_weight_delta = -lc(k) + std::log(at(k)) + lc(j) - std::log(at(j) + 1.0) + lc(other) -
                       std::log(other == j ? at(j) + 2.0 : at(other) + 1.0);

  const double c2 = static_cast<double>(cycles) - at(1);
  const double multiplicity = (other == j) ? 1.0 : 2.0;
  const double log_forward = std::log(at(k) / c2) + std::log(multiplicity / (k - 1));
  const double c_after = cycles + 1.0;
  const double pairs_after = (other == j) ? rj_after * (rj_after - 1.0) / 2.0 : rj_after * rother_after;
  const double log_reverse = std::log(pairs_after) - log_choose2(c_after);
  m.log_proposal_ratio = log_reverse - log_forward;
  return m;
}

// Hastings terms for merging an a-cycle and a b-cycle.
Move merge_terms(std::span<const int> r, int cycles, int a, int b, std::span<const double> log_cycle) {
  Move m;
  m.type = MoveType::merge;
  m.legal = true;
  m.first = a;
  m.second = b;
  const int s = a + b;
  const auto at = [&](int len) { return static_cast<double>(r[static_cast<std::size_t>(len)]); };
  const auto lc = [&](int len) { return log_cycle[static_cast<std::size_t>(len)]; };

  m.log_weight_delta = -lc(a) + std::log(at(a)) - lc(b) + std::log(at(b) - (a == b ? 1.0 : 0.0)) + lc(s) -
                       std::log(at(s) + 1.0);

  const double pairs = (a == b) ? at(a) * (at(a) - 1.0) / 2.0 : at(a) * at(b);
  const double log_forward = std::log(pairs) - log_choose2(static_cast<double>(cycles));
  const double c2_after = static_cast<double>(cycles) - at(1) - (a >= 2 ? 1.0 : 0.0) - (b >= 2 ? 1.0 : 0.0) + 1.0;
  const double multiplicity = (a == b) ? 1.0 : 2.0;
  const double log_reverse = std::log((at(s) + 1.0) / c2_after) + std::log(multiplicity / (s - 1));
  m.log_proposal_ratio = log_reverse - log_forward;
  return m;
}

int validate_chain_params(const SystemParams& params) {
  params.validate();
  if (!params.n) throw DomainError("sampler: particle number n is required");
  if (*params.n > kMaxChainParticles) {
    std::ostringstream msg;
    msg << "sampler: n = " << *params.n << " exceeds cap " << kMaxChainParticles;
    throw CapError(msg.str());
  }
  return *params.n;
}

Partition apply_to_partition(const Partition& p, const Move& m) {
  std::vector<Occupation> occ(p.occupations().begin(), p.occupations().end());
  if (m.type == MoveType::split) {
    occ.push_back({m.first, -1});
    occ.push_back({m.second, 1});
    occ.push_back({m.first - m.second, 1});
  } else {
    occ.push_back({m.first, -1});
    occ.push_back({m.second, -1});
    occ.push_back({m.first + m.second, 1});
  }
  // Fold signed deltas into counts.
  std::map<int, int> folded;
  for (const auto& o : occ) folded[o.length] += o.count;
  std::vector<Occupation> out;
  for (const auto& [len, cnt] : folded) {
    if (cnt < 0) throw DomainError("apply_to_partition: move removes a cycle that is not present");
    out.push_back({len, cnt});
  }
  return Partition(p.n(), std::move(out));
}

}  // namespace

Chain::Chain(const SystemParams& params, std::uint64_t seed, Start start)
    : params_(params), n_(validate_chain_params(params)), seed_(seed), rng_(seed) {
  const int n = n_;
  init(start == Start::identity ? Partition(n, {{1, n}}) : Partition(n, {{n, 1}}));
}

Chain::Chain(const SystemParams& params, const Partition& start, std::uint64_t seed)
    : params_(params), n_(validate_chain_params(params)), seed_(seed), rng_(seed) {
  if (start.n() != n_) throw DomainError("Chain: start partition does not match params.n");
  init(start);
}

void Chain::init(const Partition& start) {
  counts_.assign(static_cast<std::size_t>(n_) + 1, 0);
  tree_.assign(static_cast<std::size_t>(n_) + 1, 0);
  mass_tree_.assign(static_cast<std::size_t>(n_) + 1, 0);
  tree_top_bit_ = 1;
  while (tree_top_bit_ * 2 <= n_) tree_top_bit_ *= 2;
  log_cycle_ = cycle_log_factors(params_, n_);
  for (const auto& o : start.occupations()) {
    for (int i = 0; i < o.count; ++i) add_cycle(o.length);
  }
  log_weight_ = NeumaierSum();
  log_weight_.add(cyclepart::log_weight(start, params_));
}

void Chain::add_cycle(int k) {
  ++counts_[static_cast<std::size_t>(k)];
  ++cycles_;
  particles_ += k;
  for (int i = k; i <= n_; i += i & -i) {
    ++tree_[static_cast<std::size_t>(i)];
    mass_tree_[static_cast<std::size_t>(i)] += k;
  }
}

void Chain::remove_cycle(int k) {
  --counts_[static_cast<std::size_t>(k)];
  --cycles_;
  particles_ -= k;
  for (int i = k; i <= n_; i += i & -i) {
    --tree_[static_cast<std::size_t>(i)];
    mass_tree_[static_cast<std::size_t>(i)] -= k;
  }
}

int Chain::find_cycle(std::int64_t u) const {
  int pos = 0;
  for (int step = tree_top_bit_; step > 0; step >>= 1) {
    const int next = pos + step;
    if (next <= n_ && tree_[static_cast<std::size_t>(next)] <= u) {
      pos = next;
      u -= tree_[static_cast<std::size_t>(next)];
    }
  }
  return pos + 1;
}

std::int64_t Chain::mass_up_to(int length) const {
  std::int64_t s = 0;
  for (int i = std::min(length, n_); i > 0; i -= i & -i) s += mass_tree_[static_cast<std::size_t>(i)];
  return s;
}

std::uint64_t Chain::uniform_below(std::uint64_t bound) {
  // Rejection sampling keeps the stream identical across standard libraries.
  const std::uint64_t limit = std::numeric_limits<std::uint64_t>::max() - std::numeric_limits<std::uint64_t>::max() % bound;
  std::uint64_t x;
  do {
    x = rng_();
  } while (x >= limit);
  return x % bound;
}

double Chain::uniform01() { return static_cast<double>(rng_() >> 11) * 0x1.0p-53; }

Move Chain::propose() {
  const bool split = uniform_below(2) == 0;
  if (split) {
    const std::int64_t c2 = cycles_ - counts_[1];
    if (c2 == 0) return Move{MoveType::split, false, 0, 0, 0.0, 0.0};
    const int k = find_cycle(counts_[1] + static_cast<std::int64_t>(uniform_below(static_cast<std::uint64_t>(c2))));
    const int j = 1 + static_cast<int>(uniform_below(static_cast<std::uint64_t>(k - 1)));
    return split_terms(counts_, cycles_, k, j, log_cycle_);
  }
  if (cycles_ < 2) return Move{MoveType::merge, false, 0, 0, 0.0, 0.0};
  const int a = find_cycle(static_cast<std::int64_t>(uniform_below(static_cast<std::uint64_t>(cycles_))));
  // Draw the second cycle from the remaining cycles_ - 1.
  for (int i = a; i <= n_; i += i & -i) --tree_[static_cast<std::size_t>(i)];
  const int b = find_cycle(static_cast<std::int64_t>(uniform_below(static_cast<std::uint64_t>(cycles_ - 1))));
  for (int i = a; i <= n_; i += i & -i) ++tree_[static_cast<std::size_t>(i)];
  return merge_terms(counts_, cycles_, a, b, log_cycle_);
}

void Chain::apply(const Move& move) {
  if (!move.legal) throw DomainError("Chain::apply: illegal move");
  if (move.type == MoveType::split) {
    remove_cycle(move.first);
    add_cycle(move.second);
    add_cycle(move.first - move.second);
  } else {
    remove_cycle(move.first);
    remove_cycle(move.second);
    add_cycle(move.first + move.second);
  }
  log_weight_.add(move.log_weight_delta);
  assert(particles_ == n_);
}

bool Chain::step() {
  const Move move = propose();
  ++steps_;
  auto& proposed = move.type == MoveType::split ? moves_.split_proposed : moves_.merge_proposed;
  ++proposed;
  if (!move.legal) {
    ++moves_.illegal;
    return false;
  }
  const double log_accept = move.log_weight_delta + move.log_proposal_ratio;
  if (log_accept < 0.0 && std::log(uniform01()) >= log_accept) return false;
  apply(move);
  ++(move.type == MoveType::split ? moves_.split_accepted : moves_.merge_accepted);
  return true;
}

Partition Chain::current() const {
  std::vector<Occupation> occ;
  for (int k = 1; k <= n_; ++k) {
    if (counts_[static_cast<std::size_t>(k)] > 0) occ.push_back({k, counts_[static_cast<std::size_t>(k)]});
  }
  return Partition(n_, std::move(occ));
}

double Chain::audit() const { return std::abs(log_weight_.value() - cyclepart::log_weight(current(), params_)); }

Proposal propose_move(Chain& chain) {
  Proposal p;
  p.move = chain.propose();
  if (p.move.legal) p.candidate = apply_to_partition(chain.current(), p.move);
  return p;
}

namespace {

std::vector<int> dense_counts(const Partition& from, const SystemParams& params, const char* who) {
  validate_chain_params(params);
  if (*params.n != from.n()) throw DomainError(std::string(who) + ": partition does not match params.n");
  std::vector<int> r(static_cast<std::size_t>(from.n()) + 1, 0);
  for (const auto& o : from.occupations()) r[static_cast<std::size_t>(o.length)] = o.count;
  return r;
}

}  // namespace

Move split_move(const Partition& from, int k, int j, const SystemParams& params) {
  const auto r = dense_counts(from, params, "split_move");
  if (k < 2 || k > from.n() || j < 1 || j >= k || r[static_cast<std::size_t>(k)] == 0) {
    return Move{MoveType::split, false, k, j, 0.0, 0.0};
  }
  return split_terms(r, from.num_cycles(), k, j, cycle_log_factors(params, from.n()));
}

Move merge_move(const Partition& from, int a, int b, const SystemParams& params) {
  const auto r = dense_counts(from, params, "merge_move");
  const auto at = [&](int len) { return len >= 1 && len <= from.n() ? r[static_cast<std::size_t>(len)] : 0; };
  if (at(a) == 0 || at(b) < (a == b ? 2 : 1)) return Move{MoveType::merge, false, a, b, 0.0, 0.0};
  return merge_terms(r, from.num_cycles(), a, b, cycle_log_factors(params, from.n()));
}

std::vector<std::pair<Partition, double>> transition_row(const Partition& from, const SystemParams& params) {
  const std::vector<int> r = dense_counts(from, params, "transition_row");
  const int n = from.n();
  const int cycles = from.num_cycles();
  const auto log_cycle = cycle_log_factors(params, n);

  std::map<Partition, double> row;
  double stay = 0.0;
  auto accept = [&](const Move& m, double q) {
    const double a = std::min(1.0, std::exp(m.log_weight_delta + m.log_proposal_ratio));
    row[apply_to_partition(from, m)] += q * a;
    stay += q * (1.0 - a);
  };

  const int c2 = cycles - r[1];
  if (c2 == 0) {
    stay += 0.5;
  } else {
    for (int k = 2; k <= n; ++k) {
      if (r[static_cast<std::size_t>(k)] == 0) continue;
      for (int j = 1; j < k; ++j) {
        const double q = 0.5 * r[static_cast<std::size_t>(k)] / c2 / (k - 1);
        accept(split_terms(r, cycles, k, j, log_cycle), q);
      }
    }
  }
  if (cycles < 2) {
    stay += 0.5;
  } else {
    const double all_pairs = cycles * (cycles - 1.0) / 2.0;
    for (int a = 1; a <= n; ++a) {
      const double ra = r[static_cast<std::size_t>(a)];
      if (ra == 0) continue;
      for (int b = a; a + b <= n; ++b) {
        const double rb = r[static_cast<std::size_t>(b)];
        const double pairs = (a == b) ? ra * (ra - 1.0) / 2.0 : ra * rb;
        if (pairs <= 0.0) continue;
        accept(merge_terms(r, cycles, a, b, log_cycle), 0.5 * pairs / all_pairs);
      }
    }
  }
  row[from] += stay;
  return {row.begin(), row.end()};
}

CycleStats run_chain(const SystemParams& params, const SamplerConfig& config) {
  const int n = validate_chain_params(params);
  const std::int64_t burn_in = config.burn_in.value_or(config.steps / 10);
  if (config.steps < 0 || burn_in < 0 || burn_in > config.steps) {
    throw DomainError("run_chain: need steps >= burn_in >= 0");
  }
  if (config.thin < 1) throw DomainError("run_chain: thin must be >= 1");
  if (config.batches < 2) throw DomainError("run_chain: need at least 2 batches");
  const int k_report = std::min(n, config.k_report.value_or(50));
  if (k_report < 1) throw DomainError("run_chain: k_report must be >= 1");

  Chain chain(params, config.seed, config.start);
  CycleStats stats;
  stats.n = n;
  stats.threshold = std::pow(static_cast<double>(n), config.threshold_exponent);
  const int threshold_len = static_cast<int>(std::floor(stats.threshold));

  const std::int64_t samples = (config.steps - burn_in) / config.thin;
  const std::int64_t batches = std::min<std::int64_t>(config.batches, std::max<std::int64_t>(samples, 1));
  std::vector<double> batch_long(static_cast<std::size_t>(batches), 0.0);
  std::vector<double> batch_tail(static_cast<std::size_t>(batches), 0.0);
  std::vector<double> batch_qhat(static_cast<std::size_t>(batches * k_report), 0.0);
  std::vector<std::int64_t> batch_size(static_cast<std::size_t>(batches), 0);

  const std::int64_t audit_every = std::max<std::int64_t>(1, config.steps / 16);
  const double inv_n = 1.0 / n;
  std::int64_t recorded = 0;
  for (std::int64_t t = 1; t <= config.steps; ++t) {
    chain.step();
    if (t % audit_every == 0) stats.max_audit_error = std::max(stats.max_audit_error, chain.audit());
    if (t <= burn_in || (t - burn_in) % config.thin != 0 || recorded >= samples) continue;
    const auto b = static_cast<std::size_t>(recorded * batches / samples);
    ++batch_size[b];
    batch_long[b] += static_cast<double>(n - chain.mass_up_to(threshold_len)) * inv_n;
    batch_tail[b] += static_cast<double>(n - chain.mass_up_to(k_report)) * inv_n;
    double* row = &batch_qhat[b * static_cast<std::size_t>(k_report)];
    for (int k = 1; k <= k_report; ++k) row[k - 1] += chain.count(k) * inv_n;
    ++recorded;
  }
  stats.n_samples = recorded;
  stats.moves = chain.move_counts();

  // Batch means: the spread of per-batch averages estimates the standard error.
  auto estimate = [&](auto&& batch_sum) {
    double total = 0.0;
    std::vector<double> means;
    for (std::int64_t b = 0; b < batches; ++b) {
      total += batch_sum(b);
      if (batch_size[static_cast<std::size_t>(b)] > 0) {
        means.push_back(batch_sum(b) / static_cast<double>(batch_size[static_cast<std::size_t>(b)]));
      }
    }
    const double mean = recorded > 0 ? total / static_cast<double>(recorded) : 0.0;
    double se = std::numeric_limits<double>::infinity();
    if (means.size() >= 2) {
      double ss = 0.0;
      for (double m : means) ss += (m - mean) * (m - mean);
      se = std::sqrt(ss / static_cast<double>(means.size() - 1) / static_cast<double>(means.size()));
    }
    return std::pair{mean, se};
  };

  std::tie(stats.long_cycle_fraction, stats.long_cycle_stderr) =
      estimate([&](std::int64_t b) { return batch_long[static_cast<std::size_t>(b)]; });
  stats.tail_remainder = estimate([&](std::int64_t b) { return batch_tail[static_cast<std::size_t>(b)]; }).first;
  stats.mean_qhat.resize(static_cast<std::size_t>(k_report));
  stats.qhat_stderr.resize(static_cast<std::size_t>(k_report));
  for (int k = 1; k <= k_report; ++k) {
    std::tie(stats.mean_qhat[static_cast<std::size_t>(k - 1)], stats.qhat_stderr[static_cast<std::size_t>(k - 1)]) =
        estimate([&](std::int64_t b) { return batch_qhat[static_cast<std::size_t>(b * k_report + k - 1)]; });
  }
  return stats;
}

CycleStats run_chain(const SystemParams& params, std::int64_t steps, std::int64_t burn_in, std::uint64_t seed) {
  SamplerConfig config;
  config.steps = steps;
  config.burn_in = burn_in;
  config.seed = seed;
  return run_chain(params, config);
}

CycleStats merge_stats(const CycleStats& a, const CycleStats& b) {
  if (a.n != b.n || a.mean_qhat.size() != b.mean_qhat.size() || a.threshold != b.threshold) {
    throw DomainError("merge_stats: chains disagree on n, k_report or threshold");
  }
  const double total = static_cast<double>(a.n_samples + b.n_samples);
  if (total == 0.0) return a;
  const double wa = a.n_samples / total;
  const double wb = b.n_samples / total;
  auto pool = [&](double sa, double sb) { return std::sqrt(wa * wa * sa * sa + wb * wb * sb * sb); };

  CycleStats out = a;
  out.n_samples = a.n_samples + b.n_samples;
  out.long_cycle_fraction = wa * a.long_cycle_fraction + wb * b.long_cycle_fraction;
  out.long_cycle_stderr = pool(a.long_cycle_stderr, b.long_cycle_stderr);
  out.tail_remainder = wa * a.tail_remainder + wb * b.tail_remainder;
  for (std::size_t k = 0; k < out.mean_qhat.size(); ++k) {
    out.mean_qhat[k] = wa * a.mean_qhat[k] + wb * b.mean_qhat[k];
    out.qhat_stderr[k] = pool(a.qhat_stderr[k], b.qhat_stderr[k]);
  }
  out.moves.split_proposed += b.moves.split_proposed;
  out.moves.split_accepted += b.moves.split_accepted;
  out.moves.merge_proposed += b.moves.merge_proposed;
  out.moves.merge_accepted += b.moves.merge_accepted;
  out.moves.illegal += b.moves.illegal;
  out.max_audit_error = std::max(a.max_audit_error, b.max_audit_error);
  return out;
}

std::vector<LongCycleRow> long_cycle_fraction_scan(const SystemParams& base, std::span<const int> n_list,
                                                   const SamplerConfig& config) {
  std::vector<std::future<CycleStats>> jobs;
  jobs.reserve(n_list.size());
  for (int n : n_list) {
    SamplerConfig cfg = config;
    cfg.seed = splitmix64(config.seed ^ (static_cast<std::uint64_t>(n) * 0x9e3779b97f4a7c15ULL));
    cfg.k_report = 1;
    const SystemParams params = base.with_n(n);
    validate_chain_params(params);
    jobs.push_back(std::async(std::launch::async, [params, cfg] { return run_chain(params, cfg); }));
  }
  std::vector<LongCycleRow> rows;
  for (std::size_t i = 0; i < jobs.size(); ++i) {
    const CycleStats s = jobs[i].get();
    rows.push_back({n_list[i], s.long_cycle_fraction, s.long_cycle_stderr});
  }
  return rows;
}

}  // namespace cyclepart
