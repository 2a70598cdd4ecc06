/*******************************************************************************
 * Address-space reservation with explicit commit accounting. The capacity is
 * an upper bound that is reserved but not physically backed until written;
 * readers must never touch bytes past committed().
 ******************************************************************************/
#pragma once

#include <cstddef>
#include <cstdlib>
#include <new>
#include <type_traits>

#include "leanpart/memory.hpp"

#if defined(__unix__) || defined(__APPLE__)
#include <sys/mman.h>
#define LEANPART_HAS_MMAP 1
#endif

namespace leanpart {

template <typename T>
class ReservedBuffer {
  static_assert(std::is_trivially_copyable_v<T>);

public:
  ReservedBuffer() = default;

  explicit ReservedBuffer(
      const std::size_t capacity, const memory::Category category = memory::Category::kAux
  )
      : _capacity(capacity),
        _category(category) {
    const std::size_t bytes = capacity * sizeof(T);
    if (bytes == 0) {
      return;
    }
#ifdef LEANPART_HAS_MMAP
    void *mem = ::mmap(
        nullptr, bytes, PROT_READ | PROT_WRITE, MAP_PRIVATE | MAP_ANONYMOUS | MAP_NORESERVE, -1, 0
    );
    if (mem != MAP_FAILED) {
      _data = static_cast<T *>(mem);
      _mapped = true;
      return;
    }
#endif
    // Portable fallback: plain allocation of the full bound. The contract
    // (no reads past committed()) is unchanged.
    _data = static_cast<T *>(std::malloc(bytes));
    if (_data == nullptr) {
      throw std::bad_alloc();
    }
  }

  ReservedBuffer(const ReservedBuffer &) = delete;
  ReservedBuffer &operator=(const ReservedBuffer &) = delete;

  ReservedBuffer(ReservedBuffer &&other) noexcept {
    swap(other);
  }
  ReservedBuffer &operator=(ReservedBuffer &&other) noexcept {
    swap(other);
    return *this;
  }

  ~ReservedBuffer() {
    release();
  }

  T *data() {
    return _data;
  }
  const T *data() const {
    return _data;
  }

  std::size_t capacity() const {
    return _capacity;
  }

  std::size_t committed() const {
    return _committed;
  }

  // Raises the committed watermark; requires external synchronization.
  void commit_up_to(const std::size_t count) {
    if (count > _committed) {
      memory::Tracker::instance().record_alloc(_category, (count - _committed) * sizeof(T));
      _committed = count;
    }
  }

  T &operator[](const std::size_t i) {
    return _data[i];
  }
  const T &operator[](const std::size_t i) const {
    return _data[i];
  }

private:
  void swap(ReservedBuffer &other) noexcept {
    std::swap(_data, other._data);
    std::swap(_capacity, other._capacity);
    std::swap(_committed, other._committed);
    std::swap(_mapped, other._mapped);
    std::swap(_category, other._category);
  }

  void release() {
    if (_data != nullptr) {
      memory::Tracker::instance().record_free(_category, _committed * sizeof(T));
#ifdef LEANPART_HAS_MMAP
      if (_mapped) {
        ::munmap(_data, _capacity * sizeof(T));
        _data = nullptr;
        return;
      }
#endif
      std::free(_data);
      _data = nullptr;
    }
  }

  T *_data = nullptr;
  std::size_t _capacity = 0;
  std::size_t _committed = 0;
  bool _mapped = false;
  memory::Category _category = memory::Category::kAux;
};

} // namespace leanpart
