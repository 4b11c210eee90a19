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

#include <array>
#include <cstdint>

#include "fhede/homomorphic.hpp"

namespace fhede {

// One encrypted pixel (or derived byte): eight bit ciphertexts, LSB first.
// bits[0] is the least significant bit.
struct EncryptedByte {
  std::array<Ciphertext, 8> bits;
};

EncryptedByte encrypt_byte(const PublicKey& pk, unsigned value, Rng& rng);
unsigned decrypt_byte(const SecretKey& sk, const EncryptedByte& b);

// Places a single bit ciphertext at the LSB, the given zero encryption above.
EncryptedByte byte_from_bit(const Ciphertext& bit, const Ciphertext& zero);

// Encryption of (X + Y) mod 256, by bit-serial carry propagation: eight
// stages, one per addend bit. Stage i emits sum bit i, then folds the carry
// of adding y_i at position i into the higher minuend bits; each carry
// conjunction is evaluated from scratch over the bit values as they stood
// when the stage began. 84 multiplications, 36 raw additions. One refresh
// event fires per 10 multiplications and once at circuit end (9 total).
EncryptedByte add8(const EncryptedByte& x, const EncryptedByte& y, EvalContext& ctx);

// Encryption of X - Y for plaintexts X >= Y (equality is safe: every borrow
// chain vanishes). Borrows propagate through complemented minuend bits; each
// complement is a homomorphic addition with an encryption of one. 84
// multiplications, 120 raw additions, 9 refresh events.
EncryptedByte sub8(const EncryptedByte& x, const EncryptedByte& y, EvalContext& ctx);

// Multiply by two: index permutation dropping the MSB, the supplied zero
// encryption as new LSB. No homomorphic operations. Wraps mod 256 when the
// plaintext is 128 or more.
EncryptedByte shl1(const EncryptedByte& x, const Ciphertext& zero);

// Floor-divide by two: index permutation, zero encryption as new MSB.
EncryptedByte shr1(const EncryptedByte& x, const Ciphertext& zero);

// Operation totals per circuit. The published addition totals count only the
// emitted sum bits for the adder but every addition for the subtractor; both
// conventions are kept so reports can show them side by side.
inline constexpr std::uint64_t kCircuitMults = 84;
inline constexpr std::uint64_t kCircuitKeySwitches = 84;
inline constexpr std::uint64_t kCircuitRefreshEvents = 9;
inline constexpr std::uint64_t kCircuitPkConsumed = 93;
inline constexpr std::uint64_t kAdd8RawAdds = 36;
inline constexpr std::uint64_t kSub8RawAdds = 120;
inline constexpr std::uint64_t kAdd8ReportedAdds = 8;
inline constexpr std::uint64_t kSub8ReportedAdds = 120;

}  // namespace fhede
