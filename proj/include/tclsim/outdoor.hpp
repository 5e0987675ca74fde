#pragma once

#include <utility>
#include <vector>

namespace tclsim {

/// Outdoor temperature over time: a constant, or linear interpolation
/// between (time_s, degC) points held flat outside their span.
class OutdoorProfile {
public:
  OutdoorProfile() = default;
  explicit OutdoorProfile(double constant);
  /// Points must be non-empty with strictly increasing times.
  explicit OutdoorProfile(std::vector<std::pair<double, double>> points);

  double at(double t) const noexcept;

  bool is_constant() const noexcept { return points_.size() == 1; }
  const std::vector<std::pair<double, double>>& points() const noexcept { return points_; }

private:
  std::vector<std::pair<double, double>> points_{{0.0, 32.0}};
};

}  // namespace tclsim
