#include "vigg/weighting.hpp"

#include <algorithm>
#include <cmath>

#include "vigg/error.hpp"
#include "vigg/spatial_index.hpp"

namespace vigg {

double weight_from_distance(double feature_distance, double bandwidth) {
  if (!(bandwidth > 0.0)) throw InvalidArgument("weight bandwidth must be positive");
  return std::exp(-(feature_distance * feature_distance) / (2.0 * bandwidth * bandwidth));
}

double correspondence_weight(std::span<const double> f_src, std::span<const double> f_dst,
                             double bandwidth) {
  if (f_src.size() != f_dst.size()) throw DimMismatch("feature vectors differ in length");
  if (!(bandwidth > 0.0)) throw InvalidArgument("weight bandwidth must be positive");
  return std::exp(-squared_distance(f_src, f_dst) / (2.0 * bandwidth * bandwidth));
}

double median_bandwidth(std::vector<double> distances) {
  if (distances.empty()) return 1.0;
  const auto mid = distances.begin() + static_cast<std::ptrdiff_t>(distances.size() / 2);
  std::nth_element(distances.begin(), mid, distances.end());
  double median = *mid;
  if (distances.size() % 2 == 0) {
    median = 0.5 * (median + *std::max_element(distances.begin(), mid));
  }
  return std::max(median, kMinBandwidth);
}

}  // namespace vigg
