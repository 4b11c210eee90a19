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

#include "fhede/circuits.hpp"
#include "fhede/de.hpp"

namespace fhede {

// One encrypted pixel pair, oriented: cx is the map-marked (bigger) pixel.
struct EncryptedPixelPair {
  EncryptedByte cx;
  EncryptedByte cy;
};

// Difference/average form used by the reduced-cost variant. The plaintext
// difference is already oriented non-negative and capped by the fidelity
// constraint.
struct EncryptedHL {
  EncryptedByte ch;
  EncryptedByte cl;
};

// Server-held scrambling sequence; one bit per payload bit.
struct DataHidingKey {
  std::vector<std::uint8_t> bits;
};

// Key-switch counts observed while embedding into ciphertext LSBs.
struct KsLsbStats {
  std::vector<std::uint32_t> switch_counts;
  double mean() const;
  void merge(const KsLsbStats& o) {
    switch_counts.insert(switch_counts.end(), o.switch_counts.begin(), o.switch_counts.end());
  }
};

// XOR with the data-hiding key; an involution, so it descrambles too.
std::vector<std::uint8_t> scramble(std::span<const std::uint8_t> payload,
                                   const DataHidingKey& k);

// --- pair-level protocol steps -------------------------------------------
//
// Universal form: the server works on the encrypted pixel pair directly.
// h = X - Y, l = Y + floor(h/2), h' = 2h + b, X' = l + floor((h'+1)/2),
// Y' = X' - h'. The average is formed from Y and the halved difference
// rather than from X + Y, whose ninth carry bit an 8-bit adder cannot keep.

EncryptedPixelPair hide_universal(const EncryptedPixelPair& pair, const Ciphertext& c_bs,
                                  EvalContext& ctx);
EncryptedPixelPair recover_universal(const EncryptedPixelPair& pair, EvalContext& ctx);
Ciphertext extract_universal(const EncryptedPixelPair& pair, EvalContext& ctx);

// Reduced-cost form: the client uploads encrypted (h, l); hiding is a single
// byte addition on the shifted difference, recovery a pure index shift.
EncryptedHL hide_efficient(const EncryptedHL& hl, const Ciphertext& c_bs, EvalContext& ctx);
EncryptedHL recover_efficient(const EncryptedHL& hl, const Ciphertext& zero);
Ciphertext extract_efficient(const EncryptedHL& hl);

// --- ciphertext-LSB embedding ---------------------------------------------
//
// Re-randomizes the ciphertext through the s->s switching key until the low
// bit of its last coordinate (canonical representative) equals b_r. The
// plaintext never changes. Throws std::runtime_error when cap iterations do
// not land on b_r, which indicates a broken switching key.
Ciphertext kslsb_embed(const Ciphertext& c, int b_r, const SwitchingKey& lsb_key,
                       std::uint32_t cap = 64, std::uint32_t* switches_out = nullptr);

// Reads the embedded bit. Needs no key material at all.
int kslsb_extract(const Ciphertext& c);

// --- image-level stores and server operations ------------------------------

enum class StoreMode : std::uint8_t {
  kUniversal = 0,     // every pixel encrypted bit-wise
  kEfficient = 1,     // (h, l) blocks for marked pairs + the remaining pixels
  kEncryptedBits = 2  // extracted payload-bit ciphertexts
};

struct CiphertextStore {
  ParamProfile profile;
  StoreMode mode = StoreMode::kUniversal;
  std::uint32_t width = 0;
  std::uint32_t height = 0;
  std::uint32_t embedded_count = 0;  // pairs carrying payload, set by embedding
  AvailabilityMap map;               // side info riding with the ciphertext
  std::vector<EncryptedByte> pixels;     // universal: all pixels raster order;
                                         // efficient: pixels outside marked pairs
  std::vector<EncryptedHL> hl_blocks;    // efficient: marked pairs, raster order
  std::vector<Ciphertext> bit_cts;       // encrypted-bits mode
};

// Key material available to a server role. Deliberately no secret key: the
// type is the compile-time separability guarantee.
struct ServerKeys {
  const PublicKey* pk = nullptr;
  const SwitchingKey* tensor_key = nullptr;
  const SwitchingKey* lsb_key = nullptr;
  Refresher* refresher = nullptr;
};

// Client role: encrypt / decrypt.
CiphertextStore encrypt_image(const Image& img, const AvailabilityMap& map, StoreMode mode,
                              const PublicKey& pk, std::uint64_t seed, int jobs = 1);
Image decrypt_image(const CiphertextStore& store, const SecretKey& sk);
std::vector<std::uint8_t> decrypt_bits(const CiphertextStore& store, const SecretKey& sk);

// Server role: hide payload bits in the first payload-many marked pairs
// (raster order), then place the scrambled bit in the designated bit-1
// ciphertext through LSB embedding. Counts one embedding-capacity bit per
// pair. Deterministic in seed regardless of jobs.
void embed_store(CiphertextStore& store, std::span<const std::uint8_t> payload,
                 const DataHidingKey& k, const ServerKeys& keys, std::uint64_t seed,
                 OpCounters& counters, KsLsbStats& stats, int jobs = 1);

// Server role: descramble the LSB-embedded bits straight out of the store.
std::vector<std::uint8_t> extract_store_lsb(const CiphertextStore& store,
                                            const DataHidingKey& k);

// Server role: undo the hiding, returning a store that decrypts to the
// original image.
CiphertextStore recover_store(const CiphertextStore& store, const ServerKeys& keys,
                              std::uint64_t seed, OpCounters& counters, int jobs = 1);

// Server role: extract the payload as ciphertexts (encrypted-bits store).
CiphertextStore extract_store_enc(const CiphertextStore& store, const ServerKeys& keys,
                                  std::uint64_t seed, OpCounters& counters, int jobs = 1);

}  // namespace fhede
