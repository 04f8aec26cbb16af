#pragma once

#include <compare>
#include <cstddef>
#include <cstdint>
#include <iterator>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <boost/multiprecision/cpp_int.hpp>

namespace cyclepart {

using BigInt = boost::multiprecision::cpp_int;

// Largest n accepted by the streaming enumerator and the exact counters.
inline constexpr int kPartitionCap = 120;
// Largest n for operations that visit every partition (ensemble sums).
inline constexpr int kExhaustiveCap = 70;

// r_k cycles of length k.
struct Occupation {
  int length = 0;
  int count = 0;

  friend bool operator==(const Occupation&, const Occupation&) = default;
  friend auto operator<=>(const Occupation&, const Occupation&) = default;
};

// Cycle type of a permutation of n elements, stored sparsely in ascending
// cycle length. Zero counts are never stored.
class Partition {
 public:
  // Accepts occupations in any order; merges repeated lengths and drops zero
  // counts. Throws DomainError unless sum(k * r_k) == n with n >= 1.
  Partition(int n, std::vector<Occupation> occupations);

  // Builds from a list of parts (cycle lengths), e.g. {2, 1, 1} for n = 4.
  static Partition from_parts(std::span<const int> parts);

  int n() const { return n_; }
  std::span<const Occupation> occupations() const { return occupations_; }

  // r_k, zero for unoccupied lengths.
  int count(int length) const;
  // Total number of cycles, sum_k r_k.
  int num_cycles() const;
  // Parts in descending order.
  std::vector<int> parts() const;

  std::string to_string() const;

  friend bool operator==(const Partition&, const Partition&) = default;
  friend auto operator<=>(const Partition&, const Partition&) = default;

 private:
  struct Unchecked {};
  Partition(Unchecked, int n, std::vector<Occupation> occupations)
      : n_(n), occupations_(std::move(occupations)) {}

  friend class PartitionStream;
  Partition() = default;

  int n_ = 0;
  std::vector<Occupation> occupations_;
};

// Streams every partition of n exactly once in descending-lexicographic order
// of the part multiset: {n}, {n-1,1}, {n-2,2}, {n-2,1,1}, ..., {1^n}.
// Holds O(sqrt n) state; nothing is materialized.
class PartitionStream {
 public:
  class iterator {
   public:
    using iterator_category = std::input_iterator_tag;
    using value_type = Partition;
    using difference_type = std::ptrdiff_t;
    using pointer = const Partition*;
    using reference = const Partition&;

    iterator() = default;
    reference operator*() const { return stream_->current_; }
    pointer operator->() const { return &stream_->current_; }
    iterator& operator++() {
      if (!stream_->advance()) stream_ = nullptr;
      return *this;
    }
    void operator++(int) { ++*this; }
    friend bool operator==(const iterator& a, const iterator& b) { return a.stream_ == b.stream_; }

   private:
    friend class PartitionStream;
    explicit iterator(PartitionStream* s) : stream_(s) {}
    PartitionStream* stream_ = nullptr;
  };

  PartitionStream(int n, int cap = kPartitionCap);

  // Returns the next partition, or nullopt once exhausted.
  std::optional<Partition> next();

  // Single-pass range access; begin() may be called once.
  iterator begin();
  iterator end() { return iterator{}; }

 private:
  bool advance();
  void publish();

  int n_;
  bool started_ = false;
  bool done_ = false;
  // (part, multiplicity) blocks, parts strictly descending.
  std::vector<Occupation> blocks_;
  Partition current_;
};

// Stream over the partitions of n. Throws CapError for n == 0 or n > cap.
PartitionStream enumerate_partitions(int n, int cap = kPartitionCap);

// p(n) by the Euler pentagonal recurrence in exact arithmetic; p(0) = 1.
BigInt partition_count(int n, int cap = kPartitionCap);

// Exact monotone tail measure Q(l) = (1/n) sum_{k >= l} r_k, stored as
// integer numerators over the common denominator n.
class ShapeMeasure {
 public:
  // Throws DomainError unless the numerators are positive, nonincreasing and
  // sum to n.
  ShapeMeasure(int n, std::vector<std::int64_t> tail_numerators);

  int n() const { return n_; }
  int length() const { return static_cast<int>(tail_.size()); }
  std::span<const std::int64_t> tail_numerators() const { return tail_; }

  // Q(l) and Qhat(k) = Q(k) - Q(k+1) as numerators over n; zero past length().
  std::int64_t tail_numerator(int l) const;
  std::int64_t increment_numerator(int k) const;

  double tail(int l) const { return static_cast<double>(tail_numerator(l)) / n_; }
  double increment(int k) const { return static_cast<double>(increment_numerator(k)) / n_; }

  friend bool operator==(const ShapeMeasure&, const ShapeMeasure&) = default;

 private:
  int n_;
  std::vector<std::int64_t> tail_;
};

ShapeMeasure shape_measure(const Partition& partition);

// Inverse of shape_measure: r_k = n (Q(k) - Q(k+1)).
Partition occupations_from_shape(const ShapeMeasure& shape);

// Number of permutations with this cycle type, n! / prod_k (r_k! k^{r_k}).
BigInt conjugacy_class_size(const Partition& partition, int cap = kPartitionCap);
double log_conjugacy_class_size(const Partition& partition);

// Counting bound on the number of shape measures of n:
// C(n, m) * (n + m - 1)! / ((n - 1)! m!) with m = ceil(n^exponent).
BigInt shape_count_bound(int n, double exponent);

}  // namespace cyclepart
