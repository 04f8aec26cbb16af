#include "chain_checks.hpp"

#include <cmath>
#include <map>
#include <stdexcept>

#include "cyclepart/exactz.hpp"
#include "cyclepart/sampler.hpp"

namespace chain_check {

namespace {

// Base-(n+1) code of the occupation numbers.
std::int64_t key_of(std::span<const int> dense, int n) {
  std::int64_t key = 0;
  for (int k = n; k >= 1; --k) key = key * (n + 1) + dense[static_cast<std::size_t>(k)];
  return key;
}

std::int64_t key_of(const cyclepart::Partition& p) {
  std::vector<int> dense(static_cast<std::size_t>(p.n()) + 1, 0);
  for (const auto& o : p.occupations()) dense[static_cast<std::size_t>(o.length)] = o.count;
  return key_of(dense, p.n());
}

void check_small(const cyclepart::SystemParams& params) {
  if (!params.n || *params.n > 12) throw std::invalid_argument("chain checks need n <= 12");
}

}  // namespace

BatchMean batch_mean(const std::vector<double>& per_batch) {
  const double m = static_cast<double>(per_batch.size());
  double mean = 0.0;
  for (double x : per_batch) mean += x;
  mean /= m;
  double ss = 0.0;
  for (double x : per_batch) ss += (x - mean) * (x - mean);
  return {mean, std::sqrt(ss / (m - 1) / m)};
}

std::vector<FrequencyRow> partition_frequencies(const cyclepart::SystemParams& params, std::int64_t steps,
                                                int batches, std::uint64_t seed) {
  check_small(params);
  const int n = *params.n;
  const cyclepart::WeightedEnsemble e = cyclepart::weighted_ensemble(params);
  std::map<std::int64_t, std::size_t> index;
  for (std::size_t i = 0; i < e.log_weights.size(); ++i) index[key_of(e.log_weights[i].first)] = i;

  cyclepart::Chain chain(params, seed);
  for (int i = 0; i < 10'000; ++i) chain.step();
  std::vector<std::vector<double>> visits(e.log_weights.size(), std::vector<double>(batches, 0.0));
  const std::int64_t per_batch = steps / batches;
  for (std::int64_t t = 0; t < per_batch * batches; ++t) {
    chain.step();
    visits[index.at(key_of(chain.occupations(), n))][static_cast<std::size_t>(t / per_batch)] += 1.0 / per_batch;
  }
  std::vector<FrequencyRow> rows;
  for (std::size_t i = 0; i < visits.size(); ++i) {
    rows.push_back({e.log_weights[i].first.to_string(), e.probability(i), batch_mean(visits[i])});
  }
  return rows;
}

std::vector<BalanceRow> detailed_balance_audit(const cyclepart::SystemParams& params, std::int64_t steps,
                                               int batches, std::uint64_t seed) {
  check_small(params);
  const int n = *params.n;
  const cyclepart::WeightedEnsemble e = cyclepart::weighted_ensemble(params);
  std::map<std::int64_t, std::size_t> index;
  for (std::size_t i = 0; i < e.log_weights.size(); ++i) index[key_of(e.log_weights[i].first)] = i;
  const std::size_t m = e.log_weights.size();

  cyclepart::Chain chain(params, seed);
  for (int i = 0; i < 10'000; ++i) chain.step();
  const std::int64_t per_batch = steps / batches;
  // counts[b][a * m + c] transitions a -> c in batch b; visits[b][a] departures from a.
  std::vector<std::vector<double>> counts(static_cast<std::size_t>(batches), std::vector<double>(m * m, 0.0));
  std::vector<std::vector<double>> visits(static_cast<std::size_t>(batches), std::vector<double>(m, 0.0));
  std::size_t prev = index.at(key_of(chain.occupations(), n));
  for (std::int64_t t = 0; t < per_batch * batches; ++t) {
    chain.step();
    const std::size_t now = index.at(key_of(chain.occupations(), n));
    const auto b = static_cast<std::size_t>(t / per_batch);
    visits[b][prev] += 1.0;
    counts[b][prev * m + now] += 1.0;
    prev = now;
  }

  std::vector<BalanceRow> rows;
  for (std::size_t a = 0; a < m; ++a) {
    const auto exact_row = cyclepart::transition_row(e.log_weights[a].first, params);
    for (std::size_t c = a + 1; c < m; ++c) {
      bool seen = false;
      for (const auto& batch : counts) seen = seen || batch[a * m + c] > 0 || batch[c * m + a] > 0;
      if (!seen) continue;
      std::vector<double> diff;
      for (std::size_t b = 0; b < counts.size(); ++b) {
        const double pac = visits[b][a] > 0 ? counts[b][a * m + c] / visits[b][a] : 0.0;
        const double pca = visits[b][c] > 0 ? counts[b][c * m + a] / visits[b][c] : 0.0;
        diff.push_back(e.probability(a) * pac - e.probability(c) * pca);
      }
      BalanceRow row{e.log_weights[a].first.to_string(), e.log_weights[c].first.to_string(), batch_mean(diff), 0.0};
      for (const auto& [to, prob] : exact_row) {
        if (to == e.log_weights[c].first) row.exact_flux = e.probability(a) * prob;
      }
      rows.push_back(row);
    }
  }
  return rows;
}

}  // namespace chain_check
