#pragma once

#include <vector>

#include "holocheck/jet.hpp"

namespace holocheck {

inline bool is_power_of_two(std::size_t n) { return n != 0 && (n & (n - 1)) == 0; }

// In-place radix-2 FFT. Forward convention sums f_j e^{-2 pi i jk/n}.
inline void fft_inplace(std::vector<cplx>& a, bool inverse = false) {
  const std::size_t n = a.size();
  if (!is_power_of_two(n)) throw std::invalid_argument("fft: length must be a power of two");
  for (std::size_t i = 1, j = 0; i < n; ++i) {
    std::size_t bit = n >> 1;
    for (; j & bit; bit >>= 1) j ^= bit;
    j ^= bit;
    if (i < j) std::swap(a[i], a[j]);
  }
  for (std::size_t len = 2; len <= n; len <<= 1) {
    const double ang = (inverse ? 2.0 : -2.0) * kPi / double(len);
    const cplx wl = std::polar(1.0, ang);
    for (std::size_t i = 0; i < n; i += len) {
      cplx w = 1.0;
      for (std::size_t j = 0; j < len / 2; ++j) {
        const cplx u = a[i + j];
        const cplx v = a[i + j + len / 2] * w;
        a[i + j] = u + v;
        a[i + j + len / 2] = u - v;
        w *= wl;
      }
    }
  }
  if (inverse)
    for (cplx& x : a) x /= double(n);
}

}  // namespace holocheck
