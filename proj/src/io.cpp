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
#include "fhede/io.hpp"

#include <bit>
#include <cctype>
#include <cstring>
#include <fstream>

namespace fhede {

namespace {

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw FormatError("cannot open " + path, 0);
  std::string data((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  return data;
}

void dump(const std::string& path, const std::string& data) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw FormatError("cannot open " + path + " for writing", 0);
  out.write(data.data(), static_cast<std::streamsize>(data.size()));
  if (!out) throw FormatError("short write to " + path, 0);
}

class Writer {
 public:
  void u8(std::uint8_t v) { buf_.push_back(static_cast<char>(v)); }
  void u16(std::uint16_t v) {
    for (int i = 0; i < 2; ++i) u8(static_cast<std::uint8_t>(v >> (8 * i)));
  }
  void u32(std::uint32_t v) {
    for (int i = 0; i < 4; ++i) u8(static_cast<std::uint8_t>(v >> (8 * i)));
  }
  void u64(std::uint64_t v) {
    for (int i = 0; i < 8; ++i) u8(static_cast<std::uint8_t>(v >> (8 * i)));
  }
  void f64(double v) { u64(std::bit_cast<std::uint64_t>(v)); }
  void magic(const char* m) { buf_.append(m, 8); }
  void bytes(const void* p, std::size_t n) { buf_.append(static_cast<const char*>(p), n); }
  void residue(std::uint32_t v, std::uint32_t width) {
    for (std::uint32_t i = 0; i < width; ++i) u8(static_cast<std::uint8_t>(v >> (8 * i)));
  }
  const std::string& str() const { return buf_; }

 private:
  std::string buf_;
};

class Reader {
 public:
  explicit Reader(const std::string& data) : data_(data) {}

  std::size_t pos() const { return pos_; }
  std::size_t remaining() const { return data_.size() - pos_; }

  void need(std::size_t n, const char* what) const {
    if (remaining() < n) throw FormatError(std::string("truncated ") + what, pos_);
  }
  std::uint8_t u8(const char* what = "byte") {
    need(1, what);
    return static_cast<std::uint8_t>(data_[pos_++]);
  }
  std::uint16_t u16(const char* what = "u16") {
    need(2, what);
    std::uint16_t v = 0;
    for (int i = 0; i < 2; ++i) v |= std::uint16_t(std::uint8_t(data_[pos_++])) << (8 * i);
    return v;
  }
  std::uint32_t u32(const char* what = "u32") {
    need(4, what);
    std::uint32_t v = 0;
    for (int i = 0; i < 4; ++i) v |= std::uint32_t(std::uint8_t(data_[pos_++])) << (8 * i);
    return v;
  }
  std::uint64_t u64(const char* what = "u64") {
    need(8, what);
    std::uint64_t v = 0;
    for (int i = 0; i < 8; ++i) v |= std::uint64_t(std::uint8_t(data_[pos_++])) << (8 * i);
    return v;
  }
  double f64(const char* what = "f64") { return std::bit_cast<double>(u64(what)); }
  void magic(const char* expect) {
    need(8, "magic");
    if (std::memcmp(data_.data() + pos_, expect, 8) != 0)
      throw FormatError(std::string("bad magic, expected ") + expect, pos_);
    pos_ += 8;
  }
  std::uint32_t residue(std::uint32_t width, const char* what = "residue") {
    need(width, what);
    std::uint32_t v = 0;
    for (std::uint32_t i = 0; i < width; ++i)
      v |= std::uint32_t(std::uint8_t(data_[pos_++])) << (8 * i);
    return v;
  }
  std::span<const std::uint8_t> bytes(std::size_t n, const char* what = "bytes") {
    need(n, what);
    auto s = std::span<const std::uint8_t>(
        reinterpret_cast<const std::uint8_t*>(data_.data()) + pos_, n);
    pos_ += n;
    return s;
  }
  void expect_end() const {
    if (remaining() != 0) throw FormatError("trailing bytes", pos_);
  }

 private:
  const std::string& data_;
  std::size_t pos_ = 0;
};

std::uint32_t residue_width(const ParamProfile& p) { return (p.beta + 7) / 8; }

void put_profile(Writer& w, const ParamProfile& p) {
  w.u32(p.n);
  w.u32(p.q);
  w.u32(p.d);
  w.u16(static_cast<std::uint16_t>(p.beta));
  w.f64(p.epsilon);
  w.f64(p.sigma);
  w.u32(p.refresh_mult_interval);
  w.u32(p.refresh_add_interval);
}

ParamProfile get_profile(Reader& r) {
  ParamProfile p;
  p.n = r.u32("profile n");
  p.q = r.u32("profile q");
  p.d = r.u32("profile d");
  p.beta = r.u16("profile beta");
  p.epsilon = r.f64("profile epsilon");
  p.sigma = r.f64("profile sigma");
  p.refresh_mult_interval = r.u32("profile refresh interval");
  p.refresh_add_interval = r.u32("profile refresh interval");
  if (p.n == 0 || p.q < 2 || p.beta == 0 || p.beta > 32)
    throw FormatError("nonsensical profile block", r.pos());
  return p;
}

void put_ciphertext(Writer& w, const Ciphertext& ct, const ParamProfile& p) {
  const std::uint32_t rw = residue_width(p);
  for (std::uint32_t v : ct.c) w.residue(v, rw);
  w.u64(ct.noise_bound);
}

Ciphertext get_ciphertext(Reader& r, const ParamProfile& p, std::size_t len) {
  const std::uint32_t rw = residue_width(p);
  Ciphertext ct;
  ct.c.resize(len);
  for (std::size_t i = 0; i < len; ++i) {
    ct.c[i] = r.residue(rw, "ciphertext residue");
    if (ct.c[i] >= p.q) throw FormatError("residue out of range", r.pos() - rw);
  }
  ct.noise_bound = r.u64("noise bound");
  return ct;
}

void put_byte_ct(Writer& w, const EncryptedByte& b, const ParamProfile& p) {
  for (const Ciphertext& ct : b.bits) put_ciphertext(w, ct, p);
}

EncryptedByte get_byte_ct(Reader& r, const ParamProfile& p) {
  EncryptedByte b;
  for (int i = 0; i < 8; ++i) b.bits[i] = get_ciphertext(r, p, p.n);
  return b;
}

}  // namespace

Image read_pgm(const std::string& path) {
  const std::string data = slurp(path);
  std::size_t pos = 0;
  auto skip_space = [&]() {
    while (pos < data.size()) {
      if (data[pos] == '#') {  // comment to end of line
        while (pos < data.size() && data[pos] != '\n') ++pos;
      } else if (std::isspace(static_cast<unsigned char>(data[pos]))) {
        ++pos;
      } else {
        break;
      }
    }
  };
  auto read_int = [&](const char* what) -> std::uint64_t {
    skip_space();
    if (pos >= data.size() || !std::isdigit(static_cast<unsigned char>(data[pos])))
      throw FormatError(std::string("expected ") + what, pos);
    std::uint64_t v = 0;
    while (pos < data.size() && std::isdigit(static_cast<unsigned char>(data[pos]))) {
      v = v * 10 + (data[pos] - '0');
      if (v > 0xFFFFFFFFull) throw FormatError(std::string(what) + " too large", pos);
      ++pos;
    }
    return v;
  };

  if (data.size() < 2 || data[0] != 'P' || data[1] != '5')
    throw FormatError("not a binary PGM (P5)", 0);
  pos = 2;
  const std::uint64_t w = read_int("width");
  const std::uint64_t h = read_int("height");
  const std::uint64_t maxval = read_int("maxval");
  if (maxval != 255) throw FormatError("unsupported maxval (must be 255)", pos);
  if (pos >= data.size() || !std::isspace(static_cast<unsigned char>(data[pos])))
    throw FormatError("expected whitespace after maxval", pos);
  ++pos;  // exactly one whitespace byte separates header and raster
  const std::size_t want = std::size_t(w) * std::size_t(h);
  if (data.size() - pos < want) throw FormatError("truncated pixel data", data.size());
  if (data.size() - pos > want) throw FormatError("trailing bytes after pixel data", pos + want);
  Image img(static_cast<std::uint32_t>(w), static_cast<std::uint32_t>(h));
  std::memcpy(img.data.data(), data.data() + pos, want);
  return img;
}

void write_pgm(const Image& img, const std::string& path) {
  std::string out = "P5\n" + std::to_string(img.width) + " " + std::to_string(img.height) +
                    "\n255\n";
  out.append(reinterpret_cast<const char*>(img.data.data()), img.data.size());
  dump(path, out);
}

namespace {

void write_key_vector(const SecretKey& sk, const char* magic, const std::string& path) {
  Writer w;
  w.magic(magic);
  w.u16(kFormatVersion);
  put_profile(w, sk.profile);
  const std::uint32_t rw = residue_width(sk.profile);
  for (std::uint32_t v : sk.s) w.residue(v, rw);
  dump(path, w.str());
}

SecretKey read_key_vector(const char* magic, const std::string& path) {
  const std::string data = slurp(path);
  Reader r(data);
  r.magic(magic);
  if (r.u16("version") != kFormatVersion) throw FormatError("unsupported version", r.pos() - 2);
  SecretKey sk;
  sk.profile = get_profile(r);
  const std::uint32_t rw = residue_width(sk.profile);
  sk.s.resize(sk.profile.n);
  for (auto& v : sk.s) v = r.residue(rw, "key residue");
  r.expect_end();
  return sk;
}

}  // namespace

void write_secret_key(const SecretKey& sk, const std::string& path) {
  write_key_vector(sk, kMagicSecretKey, path);
}

SecretKey read_secret_key(const std::string& path) {
  return read_key_vector(kMagicSecretKey, path);
}

void write_refresh_key(const SecretKey& sk, const std::string& path) {
  write_key_vector(sk, kMagicRefreshKey, path);
}

SecretKey read_refresh_key(const std::string& path) {
  return read_key_vector(kMagicRefreshKey, path);
}

void write_public_key(const PublicKey& pk, const std::string& path) {
  Writer w;
  w.magic(kMagicPublicKey);
  w.u16(kFormatVersion);
  put_profile(w, pk.profile);
  w.u32(pk.a.rows);
  const std::uint32_t rw = residue_width(pk.profile);
  for (std::uint32_t v : pk.a.v) w.residue(v, rw);
  dump(path, w.str());
}

PublicKey read_public_key(const std::string& path) {
  const std::string data = slurp(path);
  Reader r(data);
  r.magic(kMagicPublicKey);
  if (r.u16("version") != kFormatVersion) throw FormatError("unsupported version", r.pos() - 2);
  PublicKey pk;
  pk.profile = get_profile(r);
  const std::uint32_t rows = r.u32("pk rows");
  pk.a = Mat(rows, pk.profile.n);
  const std::uint32_t rw = residue_width(pk.profile);
  for (auto& v : pk.a.v) v = r.residue(rw, "pk residue");
  r.expect_end();
  return pk;
}

void write_switching_key(const SwitchingKey& k, std::uint8_t role, const std::string& path) {
  Writer w;
  w.magic(kMagicSwitchKey);
  w.u16(kFormatVersion);
  put_profile(w, k.profile);
  w.u8(role);
  w.u32(k.from_dim);
  w.u32(k.to_dim);
  const std::uint32_t rw = residue_width(k.profile);
  for (std::uint32_t v : k.b.v) w.residue(v, rw);
  dump(path, w.str());
}

SwitchingKey read_switching_key(const std::string& path, std::uint8_t expected_role) {
  const std::string data = slurp(path);
  Reader r(data);
  r.magic(kMagicSwitchKey);
  if (r.u16("version") != kFormatVersion) throw FormatError("unsupported version", r.pos() - 2);
  SwitchingKey k;
  k.profile = get_profile(r);
  const std::uint8_t role = r.u8("switch-key role");
  if (role != expected_role) throw FormatError("switching key has the wrong role", r.pos() - 1);
  k.from_dim = r.u32("from_dim");
  k.to_dim = r.u32("to_dim");
  const std::uint64_t rows = std::uint64_t(k.from_dim) * k.profile.beta;
  k.b = Mat(static_cast<std::uint32_t>(rows), k.to_dim);
  const std::uint32_t rw = residue_width(k.profile);
  for (auto& v : k.b.v) v = r.residue(rw, "switch-key residue");
  r.expect_end();
  return k;
}

std::string map_to_bytes(const AvailabilityMap& m) {
  Writer w;
  w.magic(kMagicMap);
  w.u32(m.width);
  w.u32(m.height);
  const std::vector<std::uint8_t> rle = compress_map(m);
  w.bytes(rle.data(), rle.size());
  return w.str();
}

AvailabilityMap map_from_bytes(std::span<const std::uint8_t> bytes) {
  std::string data(reinterpret_cast<const char*>(bytes.data()), bytes.size());
  Reader r(data);
  r.magic(kMagicMap);
  const std::uint32_t w = r.u32("map width");
  const std::uint32_t h = r.u32("map height");
  const auto rle = r.bytes(r.remaining(), "map rle");
  try {
    return decompress_map(rle, w, h);
  } catch (const std::runtime_error& e) {
    throw FormatError(e.what(), 16);
  }
}

void write_map(const AvailabilityMap& m, const std::string& path) { dump(path, map_to_bytes(m)); }

AvailabilityMap read_map(const std::string& path) {
  const std::string data = slurp(path);
  return map_from_bytes(
      {reinterpret_cast<const std::uint8_t*>(data.data()), data.size()});
}

void write_payload(std::span<const std::uint8_t> bits, const std::string& path) {
  Writer w;
  w.magic(kMagicPayload);
  w.u16(kFormatVersion);
  w.u64(bits.size());
  std::uint8_t cur = 0;
  for (std::size_t i = 0; i < bits.size(); ++i) {
    cur |= static_cast<std::uint8_t>((bits[i] & 1) << (i % 8));
    if (i % 8 == 7) {
      w.u8(cur);
      cur = 0;
    }
  }
  if (bits.size() % 8 != 0) w.u8(cur);
  dump(path, w.str());
}

std::vector<std::uint8_t> read_payload(const std::string& path) {
  const std::string data = slurp(path);
  Reader r(data);
  r.magic(kMagicPayload);
  if (r.u16("version") != kFormatVersion) throw FormatError("unsupported version", r.pos() - 2);
  const std::uint64_t count = r.u64("bit count");
  const std::uint64_t nbytes = (count + 7) / 8;
  auto packed = r.bytes(nbytes, "payload bits");
  r.expect_end();
  std::vector<std::uint8_t> bits(count);
  for (std::uint64_t i = 0; i < count; ++i) bits[i] = (packed[i / 8] >> (i % 8)) & 1;
  return bits;
}

void write_store(const CiphertextStore& store, const std::string& path) {
  Writer w;
  w.magic(kMagicStore);
  w.u16(kFormatVersion);
  put_profile(w, store.profile);
  w.u8(static_cast<std::uint8_t>(store.mode));
  w.u32(store.width);
  w.u32(store.height);
  w.u32(static_cast<std::uint32_t>(store.hl_blocks.size()));
  w.u32(store.embedded_count);
  w.u32(static_cast<std::uint32_t>(store.bit_cts.size()));
  const std::string map_blob =
      store.mode == StoreMode::kEncryptedBits ? std::string() : map_to_bytes(store.map);
  w.u32(static_cast<std::uint32_t>(map_blob.size()));
  w.bytes(map_blob.data(), map_blob.size());
  for (const EncryptedByte& b : store.pixels) put_byte_ct(w, b, store.profile);
  for (const EncryptedHL& hl : store.hl_blocks) {
    put_byte_ct(w, hl.ch, store.profile);
    put_byte_ct(w, hl.cl, store.profile);
  }
  for (const Ciphertext& ct : store.bit_cts) put_ciphertext(w, ct, store.profile);
  dump(path, w.str());
}

CiphertextStore read_store(const std::string& path, const ParamProfile* expect) {
  const std::string data = slurp(path);
  Reader r(data);
  r.magic(kMagicStore);
  if (r.u16("version") != kFormatVersion) throw FormatError("unsupported version", r.pos() - 2);
  CiphertextStore store;
  store.profile = get_profile(r);
  if (expect && !expect->same_shape(store.profile))
    throw FormatError("store profile does not match the expected profile", 10);
  const std::uint8_t mode = r.u8("store mode");
  if (mode > 2) throw FormatError("unknown store mode", r.pos() - 1);
  store.mode = static_cast<StoreMode>(mode);
  store.width = r.u32("store width");
  store.height = r.u32("store height");
  const std::uint32_t hl_count = r.u32("hl block count");
  store.embedded_count = r.u32("embedded count");
  const std::uint32_t bit_count = r.u32("bit ct count");
  const std::uint32_t map_len = r.u32("map blob length");
  const auto map_blob = r.bytes(map_len, "map blob");
  if (store.mode != StoreMode::kEncryptedBits) {
    store.map = map_from_bytes(map_blob);
    if (store.map.width != store.width || store.map.height != store.height)
      throw FormatError("embedded map dimensions disagree with store header", 16);
  }

  std::size_t pixel_count = 0;
  if (store.mode == StoreMode::kUniversal) {
    pixel_count = std::size_t(store.width) * store.height;
    if (hl_count != 0 || bit_count != 0)
      throw FormatError("unexpected block counts for this store mode", 10);
  } else if (store.mode == StoreMode::kEfficient) {
    const std::size_t npix = std::size_t(store.width) * store.height;
    if (std::size_t(hl_count) * 2 > npix)
      throw FormatError("hl block count exceeds pixel count", 10);
    pixel_count = npix - std::size_t(hl_count) * 2;
    if (bit_count != 0) throw FormatError("unexpected block counts for this store mode", 10);
  }

  store.pixels.reserve(pixel_count);
  for (std::size_t i = 0; i < pixel_count; ++i)
    store.pixels.push_back(get_byte_ct(r, store.profile));
  store.hl_blocks.reserve(hl_count);
  for (std::uint32_t i = 0; i < hl_count; ++i) {
    EncryptedHL hl;
    hl.ch = get_byte_ct(r, store.profile);
    hl.cl = get_byte_ct(r, store.profile);
    store.hl_blocks.push_back(std::move(hl));
  }
  store.bit_cts.reserve(bit_count);
  for (std::uint32_t i = 0; i < bit_count; ++i)
    store.bit_cts.push_back(get_ciphertext(r, store.profile, store.profile.n));
  r.expect_end();

  if (store.mode == StoreMode::kEfficient &&
      marked_pair_indices(store.map).size() != store.hl_blocks.size())
    throw FormatError("embedded map marks a different number of pairs than stored", 16);
  if (store.mode != StoreMode::kEncryptedBits &&
      store.embedded_count > marked_pair_indices(store.map).size())
    throw FormatError("embedded count exceeds marked pairs", 10);
  return store;
}

bool file_is_secret_key(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) return false;
  char m[8];
  in.read(m, 8);
  return in.gcount() == 8 && std::memcmp(m, kMagicSecretKey, 8) == 0;
}

}  // namespace fhede
