#include "cyclepart/partitions.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "cyclepart/errors.hpp"

namespace cyclepart {

namespace {

void check_cap(int n, int cap, const char* what) {
  if (n < 1 || n > cap) {
    std::ostringstream msg;
    msg << what << ": n = " << n << " outside [1, " << cap << "] (cap " << cap << ")";
    throw CapError(msg.str());
  }
}

BigInt factorial(int n) {
  BigInt f = 1;
  for (int i = 2; i <= n; ++i) f *= i;
  return f;
}

}  // namespace

Partition::Partition(int n, std::vector<Occupation> occupations) : n_(n) {
  if (n < 1) throw DomainError("Partition: n must be positive");
  std::sort(occupations.begin(), occupations.end(),
            [](const Occupation& a, const Occupation& b) { return a.length < b.length; });
  long long total = 0;
  for (const auto& occ : occupations) {
    if (occ.length < 1) throw DomainError("Partition: cycle lengths must be positive");
    if (occ.count < 0) throw DomainError("Partition: negative occupation count");
    if (occ.count == 0) continue;
    total += static_cast<long long>(occ.length) * occ.count;
    if (!occupations_.empty() && occupations_.back().length == occ.length) {
      occupations_.back().count += occ.count;
    } else {
      occupations_.push_back(occ);
    }
  }
  if (total != n) {
    std::ostringstream msg;
    msg << "Partition: sum of k*r_k is " << total << ", expected " << n;
    throw DomainError(msg.str());
  }
}

Partition Partition::from_parts(std::span<const int> parts) {
  std::vector<Occupation> occ;
  occ.reserve(parts.size());
  long long n = 0;
  for (int p : parts) {
    occ.push_back({p, 1});
    n += p;
  }
  if (n > std::numeric_limits<int>::max()) throw DomainError("Partition: n overflows int");
  return Partition(static_cast<int>(n), std::move(occ));
}

int Partition::count(int length) const {
  auto it = std::lower_bound(occupations_.begin(), occupations_.end(), length,
                             [](const Occupation& o, int k) { return o.length < k; });
  return (it != occupations_.end() && it->length == length) ? it->count : 0;
}

int Partition::num_cycles() const {
  int c = 0;
  for (const auto& o : occupations_) c += o.count;
  return c;
}

std::vector<int> Partition::parts() const {
  std::vector<int> out;
  for (auto it = occupations_.rbegin(); it != occupations_.rend(); ++it) {
    out.insert(out.end(), static_cast<std::size_t>(it->count), it->length);
  }
  return out;
}

std::string Partition::to_string() const {
  std::ostringstream os;
  os << '{';
  bool first = true;
  for (const auto& o : occupations_) {
    if (!first) os << ", ";
    os << "r_" << o.length << '=' << o.count;
    first = false;
  }
  os << '}';
  return os.str();
}

PartitionStream::PartitionStream(int n, int cap) : n_(n) {
  check_cap(n, cap, "enumerate_partitions");
  blocks_.push_back({n, 1});
}

void PartitionStream::publish() {
  std::vector<Occupation> asc(blocks_.rbegin(), blocks_.rend());
  current_ = Partition(Partition::Unchecked{}, n_, std::move(asc));
}

bool PartitionStream::advance() {
  if (done_) return false;
  if (!started_) {
    started_ = true;
    publish();
    return true;
  }
  if (blocks_.size() == 1 && blocks_.front().length == 1) {
    done_ = true;
    return false;
  }
  int ones = 0;
  if (blocks_.back().length == 1) {
    ones = blocks_.back().count;
    blocks_.pop_back();
  }
  // Smallest part p >= 2 loses one copy; p + ones is refilled greedily with
  // parts of size p - 1.
  const int p = blocks_.back().length;
  if (--blocks_.back().count == 0) blocks_.pop_back();
  const int remainder = p + ones;
  const int q = p - 1;
  blocks_.push_back({q, remainder / q});
  if (remainder % q != 0) blocks_.push_back({remainder % q, 1});
  publish();
  return true;
}

std::optional<Partition> PartitionStream::next() {
  if (!advance()) return std::nullopt;
  return current_;
}

PartitionStream::iterator PartitionStream::begin() {
  if (started_) throw DomainError("PartitionStream: begin() called on a consumed stream");
  return advance() ? iterator(this) : iterator{};
}

PartitionStream enumerate_partitions(int n, int cap) { return PartitionStream(n, cap); }

BigInt partition_count(int n, int cap) {
  if (n < 0 || n > cap) {
    std::ostringstream msg;
    msg << "partition_count: n = " << n << " outside [0, " << cap << "] (cap " << cap << ")";
    throw CapError(msg.str());
  }
  std::vector<BigInt> p(static_cast<std::size_t>(n) + 1, 0);
  p[0] = 1;
  for (int m = 1; m <= n; ++m) {
    BigInt acc = 0;
    for (int j = 1;; ++j) {
      const int g1 = j * (3 * j - 1) / 2;
      if (g1 > m) break;
      const int g2 = j * (3 * j + 1) / 2;
      const bool plus = (j % 2) == 1;
      if (plus) {
        acc += p[m - g1];
        if (g2 <= m) acc += p[m - g2];
      } else {
        acc -= p[m - g1];
        if (g2 <= m) acc -= p[m - g2];
      }
    }
    p[m] = acc;
  }
  return p[n];
}

ShapeMeasure::ShapeMeasure(int n, std::vector<std::int64_t> tail_numerators)
    : n_(n), tail_(std::move(tail_numerators)) {
  if (n < 1) throw DomainError("ShapeMeasure: n must be positive");
  if (tail_.empty()) throw DomainError("ShapeMeasure: empty tail");
  std::int64_t sum = 0;
  for (std::size_t l = 0; l < tail_.size(); ++l) {
    if (tail_[l] <= 0) throw DomainError("ShapeMeasure: tail entries must be positive");
    if (l > 0 && tail_[l] > tail_[l - 1]) throw DomainError("ShapeMeasure: tail is not monotone nonincreasing");
    sum += tail_[l];
  }
  if (sum != n) {
    std::ostringstream msg;
    msg << "ShapeMeasure: tail sums to " << sum << "/" << n << ", expected 1";
    throw DomainError(msg.str());
  }
}

std::int64_t ShapeMeasure::tail_numerator(int l) const {
  if (l < 1 || l > length()) return 0;
  return tail_[static_cast<std::size_t>(l - 1)];
}

std::int64_t ShapeMeasure::increment_numerator(int k) const {
  return tail_numerator(k) - tail_numerator(k + 1);
}

ShapeMeasure shape_measure(const Partition& partition) {
  const auto occ = partition.occupations();
  const int longest = occ.back().length;
  std::vector<std::int64_t> tail(static_cast<std::size_t>(longest), 0);
  // Q(l) * n = number of cycles of length >= l.
  std::int64_t running = 0;
  auto it = occ.rbegin();
  for (int l = longest; l >= 1; --l) {
    if (it != occ.rend() && it->length == l) {
      running += it->count;
      ++it;
    }
    tail[static_cast<std::size_t>(l - 1)] = running;
  }
  return ShapeMeasure(partition.n(), std::move(tail));
}

Partition occupations_from_shape(const ShapeMeasure& shape) {
  std::vector<Occupation> occ;
  for (int k = 1; k <= shape.length(); ++k) {
    const auto r = shape.increment_numerator(k);
    if (r > 0) occ.push_back({k, static_cast<int>(r)});
  }
  return Partition(shape.n(), std::move(occ));
}

BigInt conjugacy_class_size(const Partition& partition, int cap) {
  check_cap(partition.n(), cap, "conjugacy_class_size");
  BigInt denom = 1;
  for (const auto& o : partition.occupations()) {
    denom *= factorial(o.count);
    denom *= boost::multiprecision::pow(BigInt(o.length), static_cast<unsigned>(o.count));
  }
  return factorial(partition.n()) / denom;
}

double log_conjugacy_class_size(const Partition& partition) {
  double v = std::lgamma(partition.n() + 1.0);
  for (const auto& o : partition.occupations()) {
    v -= std::lgamma(o.count + 1.0) + o.count * std::log(static_cast<double>(o.length));
  }
  return v;
}

BigInt shape_count_bound(int n, double exponent) {
  if (n < 1) throw DomainError("shape_count_bound: n must be positive");
  const int m = static_cast<int>(std::ceil(std::pow(static_cast<double>(n), exponent)));
  if (m > n) throw DomainError("shape_count_bound: ceil(n^exponent) exceeds n");
  // C(n, m) * (n + m - 1)! / ((n - 1)! m!)
  const BigInt binom = factorial(n) / (factorial(m) * factorial(n - m));
  const BigInt multiset = factorial(n + m - 1) / (factorial(n - 1) * factorial(m));
  return binom * multiset;
}

}  // namespace cyclepart
