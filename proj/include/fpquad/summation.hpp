#pragma once

#include <cmath>
#include <complex>

namespace fpquad {

enum class Summation { sequential, compensated };

/// Running sum in a fixed order; compensated mode is Neumaier's variant of
/// Kahan summation, so terms of either magnitude order are handled.
class Accumulator {
 public:
  explicit Accumulator(Summation mode = Summation::compensated) noexcept : mode_(mode) {}

  void add(double x) noexcept {
    if (mode_ == Summation::sequential) {
      sum_ += x;
      return;
    }
    const double t = sum_ + x;
    if (std::abs(sum_) >= std::abs(x)) {
      carry_ += (sum_ - t) + x;
    } else {
      carry_ += (x - t) + sum_;
    }
    sum_ = t;
  }

  [[nodiscard]] double value() const noexcept { return sum_ + carry_; }

 private:
  Summation mode_;
  double sum_ = 0.0;
  double carry_ = 0.0;
};

class ComplexAccumulator {
 public:
  explicit ComplexAccumulator(Summation mode = Summation::compensated) noexcept : re_(mode), im_(mode) {}

  void add(std::complex<double> z) noexcept {
    re_.add(z.real());
    im_.add(z.imag());
  }

  [[nodiscard]] std::complex<double> value() const noexcept { return {re_.value(), im_.value()}; }

 private:
  Accumulator re_;
  Accumulator im_;
};

}  // namespace fpquad
