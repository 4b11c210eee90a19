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
#include "fhede/homomorphic.hpp"

#include <cmath>
#include <sstream>
#include <stdexcept>

namespace fhede {

std::string OpCounters::report() const {
  std::ostringstream os;
  os << "adds=" << adds << "\n"
     << "mults=" << mults << "\n"
     << "keyswitches=" << keyswitches << "\n"
     << "refresh_events=" << refresh_events << "\n"
     << "pk_consumed=" << pk_consumed << "\n";
  return os.str();
}

Ciphertext TrustedRefresher::refresh(const Ciphertext& ct) {
  return enc(pk_, dec(sk_, ct), rng_);
}

Ciphertext EvalContext::encrypt_bit(int m) {
  if (!pk || !rng) throw std::logic_error("EvalContext: pk/rng not installed");
  return enc(*pk, m, *rng);
}

void EvalContext::fire_event(Ciphertext* extra) {
  if (!refresher) throw std::logic_error("EvalContext: no refresher installed");
  bool extra_is_live = false;
  for (Ciphertext* ct : live) {
    if (ct == extra) extra_is_live = true;
    if (!ct->c.empty()) *ct = refresher->refresh(*ct);
  }
  if (extra && !extra_is_live && !extra->c.empty()) *extra = refresher->refresh(*extra);
  counters.refresh_events += 1;
  counters.pk_consumed += 1;
  mults_since_event = 0;
  adds_since_event = 0;
}

void EvalContext::note_add(Ciphertext* result) {
  adds_since_event += 1;
  if (profile->refresh_add_interval > 0 && adds_since_event >= profile->refresh_add_interval)
    fire_event(result);
}

void EvalContext::note_mult(Ciphertext* result) {
  mults_since_event += 1;
  if (profile->refresh_mult_interval > 0 && mults_since_event >= profile->refresh_mult_interval)
    fire_event(result);
}

SwitchingKey switch_kgen(std::span<const std::uint32_t> s1, const SecretKey& s2,
                         const ParamProfile& p, Rng& rng) {
  const std::uint32_t rows = static_cast<std::uint32_t>(s1.size() * p.beta);
  PublicKey scaffold = pkgen_rows(rows, p, s2, rng);
  SwitchingKey k;
  k.profile = p;
  k.from_dim = static_cast<std::uint32_t>(s1.size());
  k.to_dim = p.n;
  k.b = std::move(scaffold.a);
  const std::vector<std::uint32_t> pw = powersof(s1, p.q, p.beta);
  for (std::uint32_t r = 0; r < rows; ++r)
    k.b.at(r, 0) = mod_add(k.b.at(r, 0), pw[r], p.q);
  return k;
}

// Extra noise contributed by one switch: each selected row adds one 2e term.
static std::uint64_t switch_noise_term(const SwitchingKey& k) {
  return static_cast<std::uint64_t>(
      std::ceil(2.0 * 8.0 * k.profile.sigma * double(k.from_dim) * double(k.profile.beta)));
}

Ciphertext key_switch(const Ciphertext& long_ct, const SwitchingKey& k) {
  if (long_ct.c.size() != k.from_dim)
    throw std::invalid_argument("key_switch: ciphertext length != from_dim");
  const std::uint32_t q = k.profile.q;
  const std::vector<std::uint8_t> u = bit_decompose(long_ct.c, k.profile.beta);
  // rows * (q-1) stays far below 2^64, so columns can accumulate raw and
  // reduce once at the end.
  std::vector<std::uint64_t> acc(k.to_dim, 0);
  for (std::size_t r = 0; r < u.size(); ++r) {
    if (!u[r]) continue;
    auto row = k.b.row(static_cast<std::uint32_t>(r));
    for (std::uint32_t j = 0; j < k.to_dim; ++j) acc[j] += row[j];
  }
  Ciphertext out;
  out.c.resize(k.to_dim);
  for (std::uint32_t j = 0; j < k.to_dim; ++j)
    out.c[j] = static_cast<std::uint32_t>(acc[j] % q);
  out.noise_bound = sat_add(long_ct.noise_bound, switch_noise_term(k));
  return out;
}

Ciphertext key_switch(const Ciphertext& long_ct, const SwitchingKey& k, EvalContext& ctx) {
  Ciphertext out = key_switch(long_ct, k);
  ctx.counters.keyswitches += 1;
  ctx.counters.pk_consumed += 1;
  return out;
}

Ciphertext tensor_product(const Ciphertext& c1, const Ciphertext& c2, std::uint32_t q) {
  const std::size_t n = c1.c.size();
  if (n != c2.c.size()) throw std::invalid_argument("tensor_product: length mismatch");
  Ciphertext out;
  out.c.resize(n * n);
  for (std::size_t i = 0; i < n; ++i) {
    const std::uint64_t a = c1.c[i];
    std::uint32_t* row = out.c.data() + i * n;
    for (std::size_t j = 0; j < n; ++j)
      row[j] = static_cast<std::uint32_t>((a * c2.c[j]) % q);
  }
  // Cross terms plus the product of the two tracked bounds.
  out.noise_bound =
      sat_add(sat_add(c1.noise_bound, c2.noise_bound), sat_mul(c1.noise_bound, c2.noise_bound));
  return out;
}

Ciphertext hadd(const Ciphertext& c1, const Ciphertext& c2, EvalContext& ctx) {
  if (c1.c.size() != c2.c.size()) throw std::invalid_argument("hadd: length mismatch");
  const std::uint32_t q = ctx.profile->q;
  Ciphertext out;
  out.c.resize(c1.c.size());
  for (std::size_t i = 0; i < c1.c.size(); ++i) out.c[i] = mod_add(c1.c[i], c2.c[i], q);
  out.noise_bound = sat_add(c1.noise_bound, c2.noise_bound);
  ctx.counters.adds += 1;
  ctx.note_add(&out);
  return out;
}

Ciphertext hmul(const Ciphertext& c1, const Ciphertext& c2, EvalContext& ctx) {
  if (c1.c.size() != c2.c.size()) throw std::invalid_argument("hmul: length mismatch");
  if (!ctx.tensor_key) throw std::logic_error("hmul: no tensor switching key installed");
  if (c1.c.size() != ctx.tensor_key->profile.n)
    throw std::invalid_argument("hmul: operand length != n");
  Ciphertext out = key_switch(tensor_product(c1, c2, ctx.profile->q), *ctx.tensor_key, ctx);
  ctx.counters.mults += 1;
  ctx.note_mult(&out);
  return out;
}

Ciphertext refresh(const Ciphertext& ct, EvalContext& ctx) {
  if (!ctx.refresher) throw std::logic_error("refresh: no refresher installed");
  Ciphertext out = ctx.refresher->refresh(ct);
  ctx.counters.refresh_events += 1;
  ctx.counters.pk_consumed += 1;
  ctx.mults_since_event = 0;
  ctx.adds_since_event = 0;
  return out;
}

}  // namespace fhede
