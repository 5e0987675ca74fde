#pragma once

#include <cmath>

namespace tclsim {

/// Neumaier compensated summation.
class CompensatedSum {
public:
  void add(double x) noexcept
  {
    const double t = sum_ + x;
    if (std::fabs(sum_) >= std::fabs(x))
      comp_ += (sum_ - t) + x;
    else
      comp_ += (x - t) + sum_;
    sum_ = t;
  }

  double value() const noexcept { return sum_ + comp_; }

private:
  double sum_ = 0.0;
  double comp_ = 0.0;
};

}  // namespace tclsim
