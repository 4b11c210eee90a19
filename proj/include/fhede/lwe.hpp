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
#include <span>
#include <vector>

#include "fhede/modring.hpp"
#include "fhede/params.hpp"
#include "fhede/rng.hpp"

namespace fhede {

// s = (1, t) with t drawn from the noise distribution.
struct SecretKey {
  ParamProfile profile;
  std::vector<std::uint32_t> s;
};

// a * s == 2e (mod q) for the generating secret key. `rows` is d for the
// encryption key and n1*beta when generated as switching-key scaffolding.
struct PublicKey {
  ParamProfile profile;
  Mat a;  // rows x n
};

// One encrypted bit: a length-n vector plus a conservative static bound on
// the magnitude of the even noise term. The bound is operation-tracked
// metadata, never derived from the secret key.
struct Ciphertext {
  std::vector<std::uint32_t> c;
  std::uint64_t noise_bound = 0;
};

// One draw from the rounded-Gaussian noise distribution on Z_q.
std::uint32_t sample_chi(std::uint32_t q, double sigma, Rng& rng);

SecretKey skgen(const ParamProfile& p, Rng& rng);

PublicKey pkgen(const ParamProfile& p, const SecretKey& sk, Rng& rng);

// Same construction with an explicit row count (used for switching keys).
PublicKey pkgen_rows(std::uint32_t rows, const ParamProfile& p, const SecretKey& sk, Rng& rng);

Ciphertext enc(const PublicKey& pk, int m, Rng& rng);

// Test hook: encrypt with explicit 0/1 selection coins (length = pk rows).
Ciphertext enc_with_coins(const PublicKey& pk, int m, std::span<const std::uint8_t> coins);

// Parity of the centered inner product <c, s> mod q.
int dec(const SecretKey& sk, const Ciphertext& ct);

// Same, for an arbitrary key vector (e.g. a tensored key in tests).
int dec_raw(std::span<const std::uint32_t> key, std::span<const std::uint32_t> c, std::uint32_t q);

// Bit decomposition of x into beta binary vectors, power-major layout:
// out[j*N + i] = bit j of x[i].
std::vector<std::uint8_t> bit_decompose(std::span<const std::uint32_t> x, std::uint32_t beta);

// (x, 2x, 4x, ...): out[j*N + i] = 2^j * x[i] mod q. Matches the
// bit_decompose layout, so <bit_decompose(c), powersof(s)> == <c, s> mod q.
std::vector<std::uint32_t> powersof(std::span<const std::uint32_t> x, std::uint32_t q, std::uint32_t beta);

// Fresh-encryption value of the tracked noise bound for a profile.
std::uint64_t fresh_noise_bound(const ParamProfile& p);

}  // namespace fhede
