#pragma once

#include <cstdint>
#include <cstring>
#include <vector>

#include "leanpart/memory.hpp"

namespace leanpart {

// Fixed-width unsigned integer array; the byte width (1/2/4/8) is chosen
// once from an upper bound on the stored values.
class CompactArray {
public:
  CompactArray() = default;

  CompactArray(const std::size_t size, const std::uint64_t max_value) : _size(size) {
    _width = 1;
    while (_width < 8 && max_value > (std::uint64_t{1} << (8 * _width)) - 1) {
      _width *= 2;
    }
    _bytes.resize(size * _width, 0);
  }

  std::uint64_t get(const std::size_t i) const {
    std::uint64_t value = 0;
    std::memcpy(&value, _bytes.data() + i * _width, _width);
    return value;
  }

  void set(const std::size_t i, const std::uint64_t value) {
    std::memcpy(_bytes.data() + i * _width, &value, _width);
  }

  std::size_t size() const {
    return _size;
  }

  int width() const {
    return _width;
  }

  std::size_t byte_size() const {
    return _bytes.size();
  }

private:
  std::size_t _size = 0;
  int _width = 1;
  std::vector<std::uint8_t, memory::TrackingAllocator<std::uint8_t, memory::Category::kGraph>> _bytes;
};

} // namespace leanpart
