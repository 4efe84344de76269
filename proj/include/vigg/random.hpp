#pragma once

#include <cstdint>
#include <vector>

namespace vigg {

/// All of [0, n) when k >= n, otherwise k distinct indices drawn uniformly
/// with the given seed. Always ascending.
std::vector<std::size_t> sample_indices(std::size_t n, std::size_t k, std::uint64_t seed);

}  // namespace vigg
