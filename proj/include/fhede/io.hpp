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
#include <stdexcept>
#include <string>

#include "fhede/homomorphic.hpp"
#include "fhede/pipeline.hpp"

namespace fhede {

// Parse or structural failure in a file, with the byte offset where the
// reader gave up.
class FormatError : public std::runtime_error {
 public:
  FormatError(const std::string& msg, std::size_t offset)
      : std::runtime_error(msg + " (at byte " + std::to_string(offset) + ")"),
        offset_(offset) {}
  std::size_t offset() const { return offset_; }

 private:
  std::size_t offset_;
};

// A server command was handed client-only material.
class RoleViolation : public std::runtime_error {
 public:
  explicit RoleViolation(const std::string& msg) : std::runtime_error(msg) {}
};

// File magics. The secret key gets its own magic so server tooling can
// refuse it by inspection alone.
inline constexpr char kMagicSecretKey[9] = "FHEDSK01";
inline constexpr char kMagicPublicKey[9] = "FHEDPK01";
inline constexpr char kMagicSwitchKey[9] = "FHEDSW01";
inline constexpr char kMagicRefreshKey[9] = "FHEDRK01";
inline constexpr char kMagicStore[9] = "FHEDCT01";
inline constexpr char kMagicMap[9] = "FHEDMAP1";
inline constexpr char kMagicPayload[9] = "FHEDPAY1";

inline constexpr std::uint16_t kFormatVersion = 1;

// Binary PGM (P5), maxval 255. Header comments are tolerated.
Image read_pgm(const std::string& path);
void write_pgm(const Image& img, const std::string& path);

void write_secret_key(const SecretKey& sk, const std::string& path);
SecretKey read_secret_key(const std::string& path);

void write_public_key(const PublicKey& pk, const std::string& path);
PublicKey read_public_key(const std::string& path);

// role: 0 = tensor (s(x)s -> s), 1 = LSB (s -> s).
void write_switching_key(const SwitchingKey& k, std::uint8_t role, const std::string& path);
SwitchingKey read_switching_key(const std::string& path, std::uint8_t expected_role);

// Noise-refresh material held by servers, standing in for published
// bootstrapping keys. The simulation derives it from the private key, so the
// file is as sensitive as the key itself; it carries its own magic and is
// never accepted where a decryption key is expected (or vice versa).
void write_refresh_key(const SecretKey& sk, const std::string& path);
SecretKey read_refresh_key(const std::string& path);

void write_store(const CiphertextStore& store, const std::string& path);
// With expect != nullptr, a store written under a different profile shape is
// rejected as a FormatError.
CiphertextStore read_store(const std::string& path, const ParamProfile* expect = nullptr);

// Bit sequences (payloads and data-hiding keys share the format).
void write_payload(std::span<const std::uint8_t> bits, const std::string& path);
std::vector<std::uint8_t> read_payload(const std::string& path);

void write_map(const AvailabilityMap& m, const std::string& path);
AvailabilityMap read_map(const std::string& path);

// In-memory forms, used where the map rides inside another file.
std::string map_to_bytes(const AvailabilityMap& m);
AvailabilityMap map_from_bytes(std::span<const std::uint8_t> bytes);

// True if the file starts with the secret-key magic.
bool file_is_secret_key(const std::string& path);

}  // namespace fhede
