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
#include "fhede/rng.hpp"

#include <cmath>

namespace fhede {

std::uint32_t Rng::uniform_below(std::uint32_t bound) {
  // Largest multiple of bound below 2^64; draws at or above it are rejected.
  const std::uint64_t limit = std::uint64_t(-1) - (std::uint64_t(-1) % bound + 1) % bound;
  std::uint64_t x;
  do {
    x = next();
  } while (x > limit);
  return static_cast<std::uint32_t>(x % bound);
}

double Rng::unit_open() {
  // 53 significand bits, mapped to (0, 1].
  return (static_cast<double>(next() >> 11) + 1.0) * 0x1.0p-53;
}

std::int64_t Rng::gaussian_int(double sigma) {
  double z;
  if (has_spare_) {
    has_spare_ = false;
    z = spare_;
  } else {
    const double u1 = unit_open();
    const double u2 = unit_open();
    const double r = std::sqrt(-2.0 * std::log(u1));
    const double a = 6.283185307179586476925286766559 * u2;
    z = r * std::cos(a);
    spare_ = r * std::sin(a);
    has_spare_ = true;
  }
  return std::llround(z * sigma);
}

Rng Rng::fork(std::uint64_t stream) const {
  // Mix the original seed with the stream index through one splitmix step.
  std::uint64_t z = state_ ^ (0x632BE59BD9B4E019ULL * (stream + 1));
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return Rng(z ^ (z >> 31));
}

}  // namespace fhede
