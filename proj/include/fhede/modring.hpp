/* Copyright (C) 2026 fhede authors
 * This program is Licensed under the Apache License, Version 2.0
 * (the "License"); you may not use this file except in compliance
 * with the License. You may obtain a copy of the License at
 *   http://www.apache.org/licenses/LICENSE-2.0
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License. See accompanying LICENSE file.
 */
#pragma once

#include <cstdint>
#include <limits>
#include <span>
#include <vector>

namespace fhede {

// Residues are kept canonical in [0, q). q is prime and fits in 32 bits,
// so 64-bit intermediates never overflow.

inline std::uint32_t mod_add(std::uint32_t a, std::uint32_t b, std::uint32_t q) {
  std::uint64_t s = std::uint64_t(a) + b;
  return static_cast<std::uint32_t>(s >= q ? s - q : s);
}

inline std::uint32_t mod_sub(std::uint32_t a, std::uint32_t b, std::uint32_t q) {
  return a >= b ? a - b : static_cast<std::uint32_t>(std::uint64_t(a) + q - b);
}

inline std::uint32_t mod_neg(std::uint32_t a, std::uint32_t q) {
  return a == 0 ? 0 : q - a;
}

inline std::uint32_t mod_mul(std::uint32_t a, std::uint32_t b, std::uint32_t q) {
  return static_cast<std::uint32_t>((std::uint64_t(a) * b) % q);
}

// Signed representative in (-q/2, q/2]. q is odd, so q/2 is never hit exactly.
inline std::int64_t centered(std::uint32_t v, std::uint32_t q) {
  return v > q / 2 ? std::int64_t(v) - q : std::int64_t(v);
}

// Parity of the centered representative; stays correct for negative values.
inline int centered_parity(std::uint32_t v, std::uint32_t q) {
  return static_cast<int>(((centered(v, q) % 2) + 2) % 2);
}

// Saturating helpers for the tracked noise-bound metadata. Bounds from long
// multiplication chains overflow quickly; the cap keeps them ordered.
inline constexpr std::uint64_t kNoiseBoundCap =
    std::numeric_limits<std::uint64_t>::max() / 4;

inline std::uint64_t sat_add(std::uint64_t a, std::uint64_t b) {
  if (a > kNoiseBoundCap || b > kNoiseBoundCap || a + b > kNoiseBoundCap)
    return kNoiseBoundCap;
  return a + b;
}

inline std::uint64_t sat_mul(std::uint64_t a, std::uint64_t b) {
  if (a == 0 || b == 0) return 0;
  if (a > kNoiseBoundCap / b) return kNoiseBoundCap;
  return a * b;
}

// Dense row-major matrix of residues.
struct Mat {
  std::uint32_t rows = 0;
  std::uint32_t cols = 0;
  std::vector<std::uint32_t> v;

  Mat() = default;
  Mat(std::uint32_t r, std::uint32_t c) : rows(r), cols(c), v(std::size_t(r) * c, 0) {}

  std::uint32_t& at(std::uint32_t r, std::uint32_t c) { return v[std::size_t(r) * cols + c]; }
  std::uint32_t at(std::uint32_t r, std::uint32_t c) const { return v[std::size_t(r) * cols + c]; }

  std::span<const std::uint32_t> row(std::uint32_t r) const {
    return {v.data() + std::size_t(r) * cols, cols};
  }
  std::span<std::uint32_t> row(std::uint32_t r) {
    return {v.data() + std::size_t(r) * cols, cols};
  }
};

}  // namespace fhede
