#include "tclsim/outdoor.hpp"

#include <algorithm>
#include <stdexcept>

namespace tclsim {

OutdoorProfile::OutdoorProfile(double constant) : points_{{0.0, constant}} {}

OutdoorProfile::OutdoorProfile(std::vector<std::pair<double, double>> points) : points_(std::move(points))
{
  if (points_.empty()) throw std::invalid_argument("outdoor profile needs at least one point");
  for (std::size_t i = 1; i < points_.size(); ++i)
    if (!(points_[i].first > points_[i - 1].first))
      throw std::invalid_argument("outdoor profile times must be strictly increasing");
}

double OutdoorProfile::at(double t) const noexcept
{
  if (t <= points_.front().first) return points_.front().second;
  if (t >= points_.back().first) return points_.back().second;
  auto hi = std::upper_bound(points_.begin(), points_.end(), t,
                             [](double value, const auto& p) { return value < p.first; });
  auto lo = hi - 1;
  const double w = (t - lo->first) / (hi->first - lo->first);
  return lo->second + w * (hi->second - lo->second);
}

}  // namespace tclsim
