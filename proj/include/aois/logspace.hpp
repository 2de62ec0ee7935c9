#pragma once

#include <cmath>
#include <limits>

// Log-domain arithmetic. Probabilities and weights are carried as natural
// logs throughout; hard zeros use -infinity as the sentinel so that products
// (sums of logs) and mixtures (log-sum-exp) behave correctly without
// underflow at very small magnitudes.
namespace aois::logspace {

inline constexpr double kLogZero = -std::numeric_limits<double>::infinity();

inline bool is_zero(double lx) { return std::isinf(lx) && lx < 0; }

inline double from_linear(double p) { return p > 0.0 ? std::log(p) : kLogZero; }

inline double to_linear(double lx) { return std::exp(lx); }

// log(exp(la) + exp(lb)), stable for any ordering of the operands.
inline double add(double la, double lb) {
  if (is_zero(la)) return lb;
  if (is_zero(lb)) return la;
  if (la < lb) std::swap(la, lb);
  return la + std::log1p(std::exp(lb - la));
}

// Streaming log-sum-exp. Keeps a running maximum and a sum of rescaled
// exponentials; adding a single finite term and reading the total returns
// that term bit-exactly (log(1) == 0).
class Accumulator {
 public:
  void add(double lx) {
    ++terms_;
    if (is_zero(lx)) return;
    if (is_zero(max_)) {
      max_ = lx;
      sum_ = 1.0;
    } else if (lx <= max_) {
      sum_ += std::exp(lx - max_);
    } else {
      sum_ = sum_ * std::exp(max_ - lx) + 1.0;
      max_ = lx;
    }
  }

  // log of the running sum (not divided by the term count).
  double log_sum() const {
    if (is_zero(max_)) return kLogZero;
    return sum_ == 1.0 ? max_ : max_ + std::log(sum_);
  }

  // log of the mean over all terms added, zero terms included.
  double log_mean() const {
    if (terms_ == 0 || is_zero(max_)) return kLogZero;
    return log_sum() - std::log(static_cast<double>(terms_));
  }

  std::size_t terms() const { return terms_; }

 private:
  double max_ = kLogZero;
  double sum_ = 0.0;
  std::size_t terms_ = 0;
};

}  // namespace aois::logspace
