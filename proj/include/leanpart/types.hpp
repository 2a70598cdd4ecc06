/*******************************************************************************
 * Fundamental ID and weight types shared by all modules.
 ******************************************************************************/
#pragma once

#include <cstdint>
#include <limits>
#include <stdexcept>

namespace leanpart {

using VertexId = std::uint32_t;
using EdgeId = std::uint64_t;
using BlockId = std::uint32_t;
using ClusterId = VertexId;

// Weights are 64-bit signed so that gain arithmetic needs no casts; all
// stored weights are positive.
using VertexWeight = std::int64_t;
using EdgeWeight = std::int64_t;

constexpr VertexId kInvalidVertex = std::numeric_limits<VertexId>::max();
constexpr BlockId kInvalidBlock = std::numeric_limits<BlockId>::max();

class OverflowError : public std::runtime_error {
public:
  explicit OverflowError(const std::string &what) : std::runtime_error(what) {}
};

// Aggregating weights wraps silently on overflow unless checked. All weight
// accumulation paths that can realistically overflow go through this.
inline std::int64_t checked_add(const std::int64_t a, const std::int64_t b) {
  std::int64_t out;
  if (__builtin_add_overflow(a, b, &out)) {
    throw OverflowError("weight aggregation overflowed 64 bits");
  }
  return out;
}

} // namespace leanpart
