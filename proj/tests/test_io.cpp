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
#include <doctest.h>

#include <cstdio>
#include <filesystem>
#include <fstream>

#include "fhede/io.hpp"
#include "test_common.hpp"

using namespace fhede;
using fhede::test::toy_keys;

namespace {

// Scratch file that removes itself.
struct TmpFile {
  std::string path;
  explicit TmpFile(const std::string& name)
      : path((std::filesystem::temp_directory_path() / name).string()) {}
  ~TmpFile() { std::remove(path.c_str()); }
};

Image noisy_image(std::uint32_t w, std::uint32_t h, std::uint64_t seed) {
  Image img(w, h);
  Rng rng(seed);
  for (auto& px : img.data) px = static_cast<std::uint8_t>(rng.uniform_below(256));
  return img;
}

}  // namespace

TEST_CASE("pgm files round-trip bit exactly") {
  TmpFile f("io_test.pgm");
  for (int trial = 0; trial < 100; ++trial) {
    const Image img = noisy_image(1 + trial % 17, 1 + trial % 13, 400 + trial);
    write_pgm(img, f.path);
    const Image back = read_pgm(f.path);
    REQUIRE(back.width == img.width);
    REQUIRE(back.height == img.height);
    REQUIRE(back.data == img.data);
  }
}

TEST_CASE("pgm header comments are tolerated") {
  TmpFile f("io_comment.pgm");
  {
    std::ofstream out(f.path, std::ios::binary);
    out << "P5\n# a comment\n 2 # trailing\n2\n255\n";
    out.write("\x01\x02\x03\x04", 4);
  }
  const Image img = read_pgm(f.path);
  CHECK(img.width == 2);
  CHECK(img.height == 2);
  CHECK(img.data == std::vector<std::uint8_t>{1, 2, 3, 4});
}

TEST_CASE("pgm rejects bad headers with an offset") {
  TmpFile f("io_bad.pgm");
  {
    std::ofstream out(f.path, std::ios::binary);
    out << "P5\n2 2\n65535\n";
    out.write("\0\0\0\0\0\0\0\0", 8);
  }
  CHECK_THROWS_AS(read_pgm(f.path), FormatError);  // 16-bit depth refused

  {
    std::ofstream out(f.path, std::ios::binary | std::ios::trunc);
    out << "P5\n4 4\n255\n";
    out.write("\x01\x02", 2);  // truncated raster
  }
  CHECK_THROWS_AS(read_pgm(f.path), FormatError);

  {
    std::ofstream out(f.path, std::ios::binary | std::ios::trunc);
    out << "P6\n2 2\n255\n";
    out.write("\0\0\0\0", 4);
  }
  CHECK_THROWS_AS(read_pgm(f.path), FormatError);  // wrong signature
}

TEST_CASE("secret keys round-trip and carry their own magic") {
  const auto& kb = toy_keys();
  TmpFile f("io_sk.fhesk");
  write_secret_key(kb.sk, f.path);
  const SecretKey back = read_secret_key(f.path);
  CHECK(back.s == kb.sk.s);
  CHECK(back.profile.same_shape(kb.profile));
  CHECK(file_is_secret_key(f.path));

  // A switching-key reader must refuse the file outright.
  CHECK_THROWS_AS(read_switching_key(f.path, 1), FormatError);
  CHECK_THROWS_AS(read_public_key(f.path), FormatError);
}

TEST_CASE("public keys round-trip") {
  const auto& kb = toy_keys();
  TmpFile f("io_pk.fhepk");
  write_public_key(kb.pk, f.path);
  const PublicKey back = read_public_key(f.path);
  CHECK(back.a.rows == kb.pk.a.rows);
  CHECK(back.a.cols == kb.pk.a.cols);
  CHECK(back.a.v == kb.pk.a.v);
  CHECK_FALSE(file_is_secret_key(f.path));
}

TEST_CASE("switching keys round-trip and enforce their role") {
  const auto& kb = toy_keys();
  TmpFile f("io_swk.fhesw");
  write_switching_key(kb.tensor_key, 0, f.path);
  const SwitchingKey back = read_switching_key(f.path, 0);
  CHECK(back.from_dim == kb.tensor_key.from_dim);
  CHECK(back.to_dim == kb.tensor_key.to_dim);
  CHECK(back.b.v == kb.tensor_key.b.v);
  CHECK_THROWS_AS(read_switching_key(f.path, 1), FormatError);  // wrong role
}

TEST_CASE("payload bit files round-trip at awkward lengths") {
  Rng rng(405);
  for (std::size_t len : {0u, 1u, 7u, 8u, 9u, 64u, 1000u}) {
    TmpFile f("io_payload.fhepay");
    std::vector<std::uint8_t> bits(len);
    for (auto& b : bits) b = static_cast<std::uint8_t>(rng.bit());
    write_payload(bits, f.path);
    CHECK(read_payload(f.path) == bits);
  }
}

TEST_CASE("map file bytes are pinned") {
  // magic, width/height as 32-bit little-endian, then alternating run
  // lengths as unsigned LEB128 starting with a zero-run.
  AvailabilityMap m(4, 1);
  m.bits = {0, 1, 1, 0};
  const std::string bytes = map_to_bytes(m);
  const std::string expect =
      std::string("FHEDMAP1") +
      std::string("\x04\x00\x00\x00", 4) +  // width
      std::string("\x01\x00\x00\x00", 4) +  // height
      std::string("\x01\x02\x01", 3);       // runs 1,2,1
  CHECK(bytes == expect);

  // A long run exercises the multi-byte varint: 200 zeros then a one.
  AvailabilityMap wide(201, 1);
  wide.bits.back() = 1;
  const std::string wbytes = map_to_bytes(wide);
  const std::string wexpect =
      std::string("FHEDMAP1") +
      std::string("\xC9\x00\x00\x00", 4) +  // width 201
      std::string("\x01\x00\x00\x00", 4) +
      std::string("\xC8\x01\x01", 3);       // 200 as 0xC8 0x01, then run of 1
  CHECK(wbytes == wexpect);
}

TEST_CASE("payload file bytes are pinned") {
  TmpFile f("io_pinned.fhepay");
  // Bits pack LSB-first per byte after magic, version, and a 64-bit count.
  const std::vector<std::uint8_t> bits{1, 0, 1, 1, 0, 0, 1, 0, 1};
  write_payload(bits, f.path);
  std::ifstream in(f.path, std::ios::binary);
  std::string data((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  const std::string expect =
      std::string("FHEDPAY1") +
      std::string("\x01\x00", 2) +                           // version
      std::string("\x09\x00\x00\x00\x00\x00\x00\x00", 8) +   // 9 bits
      std::string("\x4D\x01", 2);                            // 0b01001101, 0b1
  CHECK(data == expect);
}

TEST_CASE("map files round-trip") {
  TmpFile f("io_map.fhemap");
  AvailabilityMap m(10, 4);
  Rng rng(407);
  for (auto& b : m.bits) b = static_cast<std::uint8_t>(rng.uniform_below(2));
  write_map(m, f.path);
  const AvailabilityMap back = read_map(f.path);
  CHECK(back.width == m.width);
  CHECK(back.height == m.height);
  CHECK(back.bits == m.bits);
}

TEST_CASE("stores round-trip in every mode") {
  const auto& kb = toy_keys();
  const Image img = noisy_image(6, 4, 409);
  const AvailabilityMap map = build_map(img, EmbedConfig{10});

  for (StoreMode mode : {StoreMode::kUniversal, StoreMode::kEfficient}) {
    TmpFile f("io_store.fhect");
    const CiphertextStore store = encrypt_image(img, map, mode, kb.pk, 411);
    write_store(store, f.path);
    const CiphertextStore back = read_store(f.path);
    CHECK(back.mode == store.mode);
    CHECK(back.width == store.width);
    CHECK(back.embedded_count == store.embedded_count);
    CHECK(back.map.bits == store.map.bits);
    REQUIRE(back.pixels.size() == store.pixels.size());
    for (std::size_t i = 0; i < store.pixels.size(); ++i)
      for (int j = 0; j < 8; ++j) {
        CHECK(back.pixels[i].bits[j].c == store.pixels[i].bits[j].c);
        CHECK(back.pixels[i].bits[j].noise_bound == store.pixels[i].bits[j].noise_bound);
      }
    REQUIRE(back.hl_blocks.size() == store.hl_blocks.size());
    for (std::size_t i = 0; i < store.hl_blocks.size(); ++i)
      for (int j = 0; j < 8; ++j) {
        CHECK(back.hl_blocks[i].ch.bits[j].c == store.hl_blocks[i].ch.bits[j].c);
        CHECK(back.hl_blocks[i].cl.bits[j].c == store.hl_blocks[i].cl.bits[j].c);
      }
    CHECK(decrypt_image(back, kb.sk).data == img.data);
  }
}

TEST_CASE("encrypted-bit stores round-trip") {
  const auto& kb = toy_keys();
  TmpFile f("io_bits.fhect");
  CiphertextStore store;
  store.profile = kb.profile;
  store.mode = StoreMode::kEncryptedBits;
  store.width = 4;
  store.height = 2;
  Rng rng(417);
  for (int i = 0; i < 5; ++i) store.bit_cts.push_back(enc(kb.pk, i & 1, rng));
  write_store(store, f.path);
  const CiphertextStore back = read_store(f.path);
  CHECK(back.mode == StoreMode::kEncryptedBits);
  REQUIRE(back.bit_cts.size() == 5);
  CHECK(decrypt_bits(back, kb.sk) == std::vector<std::uint8_t>{0, 1, 0, 1, 0});
}

TEST_CASE("store profile expectations are enforced") {
  const auto& kb = toy_keys();
  const Image img = noisy_image(4, 2, 419);
  const AvailabilityMap map = build_map(img, EmbedConfig{10});
  TmpFile f("io_store_profile.fhect");
  write_store(encrypt_image(img, map, StoreMode::kUniversal, kb.pk, 421), f.path);

  const ParamProfile paper = paper_profile();
  CHECK_THROWS_AS(read_store(f.path, &paper), FormatError);
  CHECK_NOTHROW(read_store(f.path, &kb.profile));
}

TEST_CASE("truncated and corrupted crypto files are rejected") {
  const auto& kb = toy_keys();
  TmpFile f("io_trunc.fhesk");
  write_secret_key(kb.sk, f.path);
  std::string data;
  {
    std::ifstream in(f.path, std::ios::binary);
    data.assign((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  }
  {
    std::ofstream out(f.path, std::ios::binary | std::ios::trunc);
    out.write(data.data(), static_cast<std::streamsize>(data.size() / 2));
  }
  CHECK_THROWS_AS(read_secret_key(f.path), FormatError);
  {
    std::ofstream out(f.path, std::ios::binary | std::ios::trunc);
    out.write(data.data(), static_cast<std::streamsize>(data.size()));
    out.write("x", 1);  // trailing garbage
  }
  CHECK_THROWS_AS(read_secret_key(f.path), FormatError);
}
