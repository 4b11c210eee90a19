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

namespace fhede {

// Seeded deterministic randomness source. Every randomized operation in the
// library takes one of these explicitly; there is no global state, and a
// fixed seed reproduces the same stream on every platform (the generator is
// self-contained, not delegated to <random> distributions).
//
// This is a testing/reproducibility generator, not a CSPRNG. A deployment
// would swap the core for an OS entropy source.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : state_(seed) {}

  // splitmix64 step.
  std::uint64_t next() {
    std::uint64_t z = (state_ += 0x9E3779B97F4A7C15ULL);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
  }

  int bit() { return static_cast<int>(next() >> 63); }

  // Unbiased uniform draw in [0, bound) by rejection.
  std::uint32_t uniform_below(std::uint32_t bound);

  // round(x) for x ~ Normal(0, sigma^2), via Box-Muller on the raw stream.
  std::int64_t gaussian_int(double sigma);

  // Independent substream; deterministic in (seed, stream) and unaffected by
  // how far the parent has advanced when forked values are compared across
  // runs with the same construction order.
  Rng fork(std::uint64_t stream) const;

 private:
  double unit_open();  // uniform in (0, 1]

  std::uint64_t state_;
  double spare_ = 0.0;
  bool has_spare_ = false;
};

}  // namespace fhede
