#pragma once

#include <cstddef>
#include <new>
#include <string>
#include <vector>

#include "aerogrid/errors.hpp"

namespace aerogrid::neural {

// 64-byte-aligned allocator. SIMD kernels peel loops based on pointer
// alignment, so unaligned buffers make accumulation order (and the low bits
// of sums) depend on heap layout. Pinning the alignment keeps forward and
// backward passes bitwise reproducible within a process.
template <class T>
struct AlignedAlloc {
  using value_type = T;
  static constexpr std::size_t kAlign = 64;

  AlignedAlloc() = default;
  template <class U>
  AlignedAlloc(const AlignedAlloc<U>&) {}

  T* allocate(std::size_t n) {
    return static_cast<T*>(
        ::operator new(n * sizeof(T), std::align_val_t(kAlign)));
  }
  void deallocate(T* p, std::size_t) {
    ::operator delete(p, std::align_val_t(kAlign));
  }

  template <class U>
  bool operator==(const AlignedAlloc<U>&) const { return true; }
  template <class U>
  bool operator!=(const AlignedAlloc<U>&) const { return false; }
};

using AlignedBuf = std::vector<double, AlignedAlloc<double>>;

// Dense row-major value buffer with a parallel gradient buffer.
struct Tensor {
  std::vector<int> shape;
  AlignedBuf v;
  AlignedBuf g;

  static Tensor make(std::vector<int> shape);
  std::size_t size() const { return v.size(); }
  void zero_grad();
};

}  // namespace aerogrid::neural
