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
#include "fhede/circuits.hpp"

#include <stdexcept>

namespace fhede {

EncryptedByte encrypt_byte(const PublicKey& pk, unsigned value, Rng& rng) {
  if (value > 255) throw std::invalid_argument("encrypt_byte: value out of range");
  EncryptedByte b;
  for (int i = 0; i < 8; ++i) b.bits[i] = enc(pk, (value >> i) & 1u, rng);
  return b;
}

unsigned decrypt_byte(const SecretKey& sk, const EncryptedByte& b) {
  unsigned v = 0;
  for (int i = 0; i < 8; ++i) v |= static_cast<unsigned>(dec(sk, b.bits[i])) << i;
  return v;
}

EncryptedByte byte_from_bit(const Ciphertext& bit, const Ciphertext& zero) {
  EncryptedByte b;
  b.bits[0] = bit;
  for (int i = 1; i < 8; ++i) b.bits[i] = zero;
  return b;
}

EncryptedByte shl1(const EncryptedByte& x, const Ciphertext& zero) {
  EncryptedByte out;
  out.bits[0] = zero;
  for (int i = 1; i < 8; ++i) out.bits[i] = x.bits[i - 1];
  return out;
}

EncryptedByte shr1(const EncryptedByte& x, const Ciphertext& zero) {
  EncryptedByte out;
  for (int i = 0; i < 7; ++i) out.bits[i] = x.bits[i + 1];
  out.bits[7] = zero;
  return out;
}

EncryptedByte add8(const EncryptedByte& x, const EncryptedByte& y, EvalContext& ctx) {
  EncryptedByte out;
  EncryptedByte work = x;  // running minuend, absorbs carries
  EncryptedByte yy = y;
  LiveScope live(ctx);
  for (int i = 0; i < 8; ++i) {
    live.add(&work.bits[i]);
    live.add(&yy.bits[i]);
  }

  for (int i = 0; i < 8; ++i) {
    out.bits[i] = hadd(work.bits[i], yy.bits[i], ctx);
    live.add(&out.bits[i]);

    // Carries condition on the bit values at stage start, not on the values
    // already folded within this stage.
    std::array<Ciphertext, 8> snap = work.bits;
    LiveScope stage(ctx);
    for (int t = i; t < 8; ++t) stage.add(&snap[t]);

    for (int j = 1; j <= 7 - i; ++j) {
      Ciphertext acc = yy.bits[i];
      LiveScope chain(ctx);
      chain.add(&acc);
      for (int t = i + j - 1; t >= i; --t) acc = hmul(acc, snap[t], ctx);
      work.bits[i + j] = hadd(work.bits[i + j], acc, ctx);
    }
  }
  ctx.fire_event(nullptr);  // circuit-end refresh of the live set
  return out;
}

EncryptedByte sub8(const EncryptedByte& x, const EncryptedByte& y, EvalContext& ctx) {
  EncryptedByte out;
  EncryptedByte work = x;  // running minuend, absorbs borrows
  EncryptedByte yy = y;
  Ciphertext one = ctx.encrypt_bit(1);  // complement constant for the stage chains
  LiveScope live(ctx);
  live.add(&one);
  for (int i = 0; i < 8; ++i) {
    live.add(&work.bits[i]);
    live.add(&yy.bits[i]);
  }

  for (int i = 0; i < 8; ++i) {
    out.bits[i] = hadd(work.bits[i], yy.bits[i], ctx);
    live.add(&out.bits[i]);

    std::array<Ciphertext, 8> snap = work.bits;
    LiveScope stage(ctx);
    for (int t = i; t < 8; ++t) stage.add(&snap[t]);

    for (int j = 1; j <= 7 - i; ++j) {
      Ciphertext acc = yy.bits[i];
      LiveScope chain(ctx);
      chain.add(&acc);
      for (int t = i + j - 1; t >= i; --t) {
        // Borrow propagates through zero minuend bits.
        Ciphertext complemented = hadd(snap[t], one, ctx);
        acc = hmul(acc, complemented, ctx);
      }
      work.bits[i + j] = hadd(work.bits[i + j], acc, ctx);
    }
  }
  ctx.fire_event(nullptr);
  return out;
}

}  // namespace fhede
