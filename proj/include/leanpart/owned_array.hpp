#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "leanpart/reserved_buffer.hpp"

namespace leanpart {

// Immutable owning array that is either vector-backed or adopts the
// committed prefix of a ReservedBuffer. Lets the coarse graph keep the
// overcommitted arc arrays instead of copying them into a second home.
template <typename T>
class OwnedArray {
public:
  OwnedArray() = default;

  OwnedArray(std::vector<T> values) // NOLINT(google-explicit-constructor)
      : _vector(std::move(values)),
        _data(_vector.data()),
        _size(_vector.size()) {}

  explicit OwnedArray(ReservedBuffer<T> buffer)
      : _buffer(std::move(buffer)),
        _data(_buffer.data()),
        _size(_buffer.committed()) {}

  OwnedArray(OwnedArray &&) noexcept = default;
  OwnedArray &operator=(OwnedArray &&) noexcept = default;
  OwnedArray(const OwnedArray &) = delete;
  OwnedArray &operator=(const OwnedArray &) = delete;

  const T *data() const {
    return _data;
  }
  std::size_t size() const {
    return _size;
  }
  bool empty() const {
    return _size == 0;
  }
  const T &operator[](const std::size_t i) const {
    return _data[i];
  }
  const T &back() const {
    return _data[_size - 1];
  }
  const T *begin() const {
    return _data;
  }
  const T *end() const {
    return _data + _size;
  }
  std::span<const T> span() const {
    return {_data, _size};
  }

private:
  std::vector<T> _vector;
  ReservedBuffer<T> _buffer;
  const T *_data = nullptr;
  std::size_t _size = 0;
};

} // namespace leanpart
