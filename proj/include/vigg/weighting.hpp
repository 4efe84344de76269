#pragma once

#include <span>
#include <vector>

namespace vigg {

/// Lower bound applied to self-tuned bandwidths so exact feature matches
/// (median distance 0) still yield a finite kernel.
inline constexpr double kMinBandwidth = 1e-12;

/// exp(-|f_src - f_dst|^2 / (2 bandwidth^2)). Throws DimMismatch on unequal
/// lengths and InvalidArgument when bandwidth <= 0.
double correspondence_weight(std::span<const double> f_src, std::span<const double> f_dst,
                             double bandwidth);

/// Kernel value for a precomputed feature distance (not squared).
double weight_from_distance(double feature_distance, double bandwidth);

/// Median of the given feature distances, floored at kMinBandwidth. An empty
/// input yields 1.
double median_bandwidth(std::vector<double> distances);

}  // namespace vigg
