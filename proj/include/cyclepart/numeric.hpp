#pragma once

#include <cmath>
#include <limits>

namespace cyclepart {

// Kahan-Babuska-Neumaier compensated summation.
class NeumaierSum {
 public:
  void add(double x) {
    const double t = sum_ + x;
    if (std::abs(sum_) >= std::abs(x)) {
      comp_ += (sum_ - t) + x;
    } else {
      comp_ += (x - t) + sum_;
    }
    sum_ = t;
  }

  void scale(double factor) {
    sum_ *= factor;
    comp_ *= factor;
  }

  void merge(const NeumaierSum& other) {
    add(other.sum_);
    add(other.comp_);
  }

  double value() const { return sum_ + comp_; }

 private:
  double sum_ = 0.0;
  double comp_ = 0.0;
};

// Streaming log(sum_i exp(x_i)) with a running max shift. Accumulators over
// disjoint shards can be merged in any order.
class LogSumExp {
 public:
  void add(double log_term) {
    if (log_term == -std::numeric_limits<double>::infinity()) return;
    if (log_term > max_) {
      if (max_ != -std::numeric_limits<double>::infinity()) sum_.scale(std::exp(max_ - log_term));
      max_ = log_term;
    }
    sum_.add(std::exp(log_term - max_));
  }

  void merge(const LogSumExp& other) {
    if (other.empty()) return;
    if (empty()) {
      *this = other;
      return;
    }
    if (other.max_ > max_) {
      sum_.scale(std::exp(max_ - other.max_));
      max_ = other.max_;
      sum_.merge(other.sum_);
    } else {
      NeumaierSum shifted = other.sum_;
      shifted.scale(std::exp(other.max_ - max_));
      sum_.merge(shifted);
    }
  }

  bool empty() const { return max_ == -std::numeric_limits<double>::infinity(); }

  // -inf when nothing was added.
  double value() const {
    if (empty()) return max_;
    return max_ + std::log(sum_.value());
  }

 private:
  double max_ = -std::numeric_limits<double>::infinity();
  NeumaierSum sum_;
};

}  // namespace cyclepart
