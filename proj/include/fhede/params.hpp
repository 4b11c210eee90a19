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
#include <string>
#include <vector>

namespace fhede {

// Cryptosystem parameters. A valid profile satisfies
//   q prime, n^2 < q < 2n^2,
//   d >= (1 + epsilon) * (1 + n) * log2(q),
//   beta == ceil(log2(q)).
// Profiles are immutable values; share freely across threads.
struct ParamProfile {
  std::uint32_t n = 0;     // secret-key length
  std::uint32_t q = 0;     // prime modulus
  std::uint32_t d = 0;     // public-key rows
  std::uint32_t beta = 0;  // bits per residue
  double epsilon = 0.2;    // slack factor in the d lower bound
  double sigma = 1.0;      // noise stddev, in modulus units
  std::uint32_t refresh_mult_interval = 10;
  std::uint32_t refresh_add_interval = 100;

  bool same_shape(const ParamProfile& o) const {
    return n == o.n && q == o.q && d == o.d && beta == o.beta;
  }
};

struct ProfileCheck {
  bool ok = false;
  std::vector<std::string> violations;
};

// Checks every profile constraint and reports each violation individually.
ProfileCheck validate_profile(const ParamProfile& p);

// n=240, q=57601, d=4573: dimensioned so the lattice-dimension estimate
// clears 500 at delta=1.01. Key and ciphertext material is large; use for
// measurements, not for routine tests.
ParamProfile paper_profile();

// n=40, q=2053, d=560: desk-scale profile with no security claim. The noise
// width is set low enough that circuit evaluation stays inside the q/4
// budget; see the profile notes in README.
ParamProfile toy_profile();

// sqrt(n * log2(q) / log2(delta)): the dimension of the lattice problem an
// attacker must solve. Rejects delta <= 1.
double security_dimension_estimate(const ParamProfile& p, double delta);

// Deterministic primality by trial division; sufficient for q < 2^32.
bool is_prime(std::uint64_t x);

// ceil(log2(q)) for q >= 1.
std::uint32_t bits_needed(std::uint32_t q);

// Text config: key=value lines for n, q, d, epsilon, sigma and the refresh
// intervals. beta is derived, never stored.
ParamProfile parse_profile_config(const std::string& text);
std::string format_profile_config(const ParamProfile& p);
ParamProfile load_profile_file(const std::string& path);

// "paper", "toy", or a config-file path.
ParamProfile resolve_profile(const std::string& name_or_path);

}  // namespace fhede
