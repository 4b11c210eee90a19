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
#include "fhede/lwe.hpp"

#include <cmath>
#include <functional>
#include <stdexcept>

namespace fhede {

std::uint32_t sample_chi(std::uint32_t q, double sigma, Rng& rng) {
  const std::int64_t z = rng.gaussian_int(sigma);
  const std::int64_t r = ((z % std::int64_t(q)) + q) % q;
  return static_cast<std::uint32_t>(r);
}

SecretKey skgen(const ParamProfile& p, Rng& rng) {
  SecretKey sk;
  sk.profile = p;
  sk.s.resize(p.n);
  sk.s[0] = 1;
  for (std::uint32_t i = 1; i < p.n; ++i) sk.s[i] = sample_chi(p.q, p.sigma, rng);
  return sk;
}

PublicKey pkgen_rows(std::uint32_t rows, const ParamProfile& p, const SecretKey& sk, Rng& rng) {
  if (sk.s.size() != p.n) throw std::invalid_argument("pkgen: key length mismatch");
  PublicKey pk;
  pk.profile = p;
  pk.a = Mat(rows, p.n);
  // Column 0 is b = W*t + 2e; columns 1.. are -W. Built row by row so W is
  // never materialized.
  for (std::uint32_t r = 0; r < rows; ++r) {
    auto row = pk.a.row(r);
    std::uint64_t acc = 0;
    for (std::uint32_t j = 1; j < p.n; ++j) {
      const std::uint32_t w = rng.uniform_below(p.q);
      row[j] = mod_neg(w, p.q);
      acc = (acc + std::uint64_t(w) * sk.s[j]) % p.q;
    }
    const std::uint32_t e = sample_chi(p.q, p.sigma, rng);
    row[0] = mod_add(static_cast<std::uint32_t>(acc), mod_add(e, e, p.q), p.q);
  }
  return pk;
}

PublicKey pkgen(const ParamProfile& p, const SecretKey& sk, Rng& rng) {
  return pkgen_rows(p.d, p, sk, rng);
}

std::uint64_t fresh_noise_bound(const ParamProfile& p) {
  return static_cast<std::uint64_t>(std::ceil(8.0 * p.sigma * p.d));
}

namespace {

// Sum of the selected rows plus the message at coordinate zero. d * (q-1)
// fits a 64-bit accumulator with room to spare.
Ciphertext enc_select(const PublicKey& pk, int m, const std::function<int()>& coin) {
  const ParamProfile& p = pk.profile;
  std::vector<std::uint64_t> acc(p.n, 0);
  for (std::uint32_t r = 0; r < pk.a.rows; ++r) {
    if (!coin()) continue;
    auto row = pk.a.row(r);
    for (std::uint32_t j = 0; j < p.n; ++j) acc[j] += row[j];
  }
  Ciphertext ct;
  ct.c.resize(p.n);
  acc[0] += static_cast<std::uint32_t>(m);
  for (std::uint32_t j = 0; j < p.n; ++j) ct.c[j] = static_cast<std::uint32_t>(acc[j] % p.q);
  ct.noise_bound = fresh_noise_bound(p);
  return ct;
}

}  // namespace

Ciphertext enc(const PublicKey& pk, int m, Rng& rng) {
  if (m != 0 && m != 1) throw std::invalid_argument("enc: plaintext must be a bit");
  return enc_select(pk, m, [&rng]() { return rng.bit(); });
}

Ciphertext enc_with_coins(const PublicKey& pk, int m, std::span<const std::uint8_t> coins) {
  if (m != 0 && m != 1) throw std::invalid_argument("enc: plaintext must be a bit");
  if (coins.size() != pk.a.rows) throw std::invalid_argument("enc: coin count != pk rows");
  std::size_t i = 0;
  return enc_select(pk, m, [&coins, &i]() { return coins[i++] != 0; });
}

int dec_raw(std::span<const std::uint32_t> key, std::span<const std::uint32_t> c, std::uint32_t q) {
  if (key.size() != c.size()) throw std::invalid_argument("dec: length mismatch");
  std::uint64_t acc = 0;
  for (std::size_t i = 0; i < c.size(); ++i) acc = (acc + std::uint64_t(c[i]) * key[i]) % q;
  return centered_parity(static_cast<std::uint32_t>(acc), q);
}

int dec(const SecretKey& sk, const Ciphertext& ct) {
  return dec_raw(sk.s, ct.c, sk.profile.q);
}

std::vector<std::uint8_t> bit_decompose(std::span<const std::uint32_t> x, std::uint32_t beta) {
  std::vector<std::uint8_t> out(x.size() * beta);
  for (std::uint32_t j = 0; j < beta; ++j) {
    std::uint8_t* block = out.data() + std::size_t(j) * x.size();
    for (std::size_t i = 0; i < x.size(); ++i) block[i] = (x[i] >> j) & 1u;
  }
  return out;
}

std::vector<std::uint32_t> powersof(std::span<const std::uint32_t> x, std::uint32_t q, std::uint32_t beta) {
  std::vector<std::uint32_t> out(x.size() * beta);
  for (std::uint32_t j = 0; j < beta; ++j) {
    std::uint32_t* block = out.data() + std::size_t(j) * x.size();
    for (std::size_t i = 0; i < x.size(); ++i)
      block[i] = static_cast<std::uint32_t>((std::uint64_t(x[i]) << j) % q);
  }
  return out;
}

}  // namespace fhede
