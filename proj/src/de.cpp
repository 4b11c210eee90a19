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
#include "fhede/de.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

namespace fhede {

namespace {

// floor division for possibly negative numerators
int floor_div2(int v) { return v >= 0 ? v / 2 : -((-v + 1) / 2); }

// Oriented view of a pair: bigger pixel first, ties keep the left pixel.
struct Oriented {
  int big;
  int small;
  bool big_is_left;
};

Oriented orient(const PixelPair& p) {
  if (p.x >= p.y) return {p.x, p.y, true};
  return {p.y, p.x, false};
}

PixelPair restore(const PixelPair& p, const Oriented& o, int big, int small) {
  PixelPair out = p;
  if (o.big_is_left) {
    out.x = static_cast<std::uint8_t>(big);
    out.y = static_cast<std::uint8_t>(small);
  } else {
    out.x = static_cast<std::uint8_t>(small);
    out.y = static_cast<std::uint8_t>(big);
  }
  return out;
}

}  // namespace

std::uint64_t AvailabilityMap::count_marked() const {
  std::uint64_t n = 0;
  for (std::uint8_t b : bits) n += b;
  return n;
}

DiffAvg diff_avg(const PixelPair& p) {
  return {int(p.x) - int(p.y), (int(p.x) + int(p.y)) / 2};
}

PixelPair inv_diff_avg(int h, int l) {
  const int x = l + floor_div2(h + 1);
  const int y = l - floor_div2(h);
  if (x < 0 || x > 255 || y < 0 || y > 255)
    throw std::domain_error("inv_diff_avg: pixel out of range (h=" + std::to_string(h) +
                            ", l=" + std::to_string(l) + ")");
  PixelPair out;
  out.x = static_cast<std::uint8_t>(x);
  out.y = static_cast<std::uint8_t>(y);
  return out;
}

bool is_available(const PixelPair& p, const EmbedConfig& cfg) {
  const Oriented o = orient(p);
  const int h = o.big - o.small;  // |x - y|
  const int l = (o.big + o.small) / 2;
  const int bound = std::min(2 * (255 - l), 2 * l + 1);
  if (h > bound) return false;
  if (2 * h + 0 > bound) return false;
  if (2 * h + 1 > bound) return false;
  return h <= int(cfg.h_fid);
}

std::vector<PixelPair> pair_pixels(const Image& img) {
  std::vector<PixelPair> pairs;
  pairs.reserve(std::size_t(img.height) * (img.width / 2));
  for (std::uint32_t r = 0; r < img.height; ++r) {
    for (std::uint32_t c = 0; c + 1 < img.width; c += 2) {
      PixelPair p;
      p.x = img.at(r, c);
      p.y = img.at(r, c + 1);
      p.row = r;
      p.col = c;
      pairs.push_back(p);
    }
  }
  return pairs;
}

AvailabilityMap build_map(const Image& img, const EmbedConfig& cfg,
                          std::optional<std::uint64_t> target_ec) {
  if (cfg.h_fid > 127)
    throw std::invalid_argument("build_map: h_fid " + std::to_string(cfg.h_fid) +
                                " exceeds 127 (the expanded difference must fit a byte)");
  const std::vector<PixelPair> pairs = pair_pixels(img);
  std::vector<std::size_t> chosen;
  chosen.reserve(pairs.size());
  for (std::size_t i = 0; i < pairs.size(); ++i)
    if (is_available(pairs[i], cfg)) chosen.push_back(i);

  if (target_ec) {
    if (*target_ec > chosen.size())
      throw std::invalid_argument("build_map: target_ec " + std::to_string(*target_ec) +
                                  " exceeds " + std::to_string(chosen.size()) +
                                  " available pairs");
    std::stable_sort(chosen.begin(), chosen.end(), [&](std::size_t a, std::size_t b) {
      const int ha = std::abs(diff_avg(pairs[a]).h);
      const int hb = std::abs(diff_avg(pairs[b]).h);
      return ha < hb;  // stable: raster order breaks ties
    });
    chosen.resize(*target_ec);
  }

  AvailabilityMap m(img.width, img.height);
  for (std::size_t i : chosen) {
    const PixelPair& p = pairs[i];
    if (p.x >= p.y)
      m.set(p.row, p.col, true);
    else
      m.set(p.row, p.col + 1, true);
  }
  return m;
}

PixelPair de_embed(const PixelPair& p, int b) {
  if (b != 0 && b != 1) throw std::invalid_argument("de_embed: payload must be a bit");
  const Oriented o = orient(p);
  const int h = o.big - o.small;
  const int l = (o.big + o.small) / 2;
  const int hp = 2 * h + b;
  const PixelPair e = inv_diff_avg(hp, l);
  return restore(p, o, e.x, e.y);
}

int de_extract(const PixelPair& marked) {
  const Oriented o = orient(marked);
  return (o.big - o.small) & 1;
}

PixelPair de_recover(const PixelPair& marked) {
  const Oriented o = orient(marked);
  const int hp = o.big - o.small;
  const int l = (o.big + o.small) / 2;
  const PixelPair r = inv_diff_avg(hp / 2, l);
  return restore(marked, o, r.x, r.y);
}

namespace {

void put_leb128(std::vector<std::uint8_t>& out, std::uint64_t v) {
  while (v >= 0x80) {
    out.push_back(static_cast<std::uint8_t>(v) | 0x80);
    v >>= 7;
  }
  out.push_back(static_cast<std::uint8_t>(v));
}

std::uint64_t get_leb128(std::span<const std::uint8_t> in, std::size_t& pos) {
  std::uint64_t v = 0;
  int shift = 0;
  for (;;) {
    if (pos >= in.size())
      throw std::runtime_error("map rle: truncated varint at byte " + std::to_string(pos));
    const std::uint8_t b = in[pos++];
    if (shift >= 63 && (b & 0x7F) > 1)
      throw std::runtime_error("map rle: varint overflow at byte " + std::to_string(pos - 1));
    v |= std::uint64_t(b & 0x7F) << shift;
    if (!(b & 0x80)) return v;
    shift += 7;
  }
}

}  // namespace

std::vector<std::uint8_t> compress_map(const AvailabilityMap& m) {
  std::vector<std::uint8_t> out;
  const std::size_t total = m.bits.size();
  std::size_t pos = 0;
  std::uint8_t value = 0;  // runs alternate starting with a zero-run
  while (pos < total) {
    std::size_t run = 0;
    while (pos < total && m.bits[pos] == value) {
      ++run;
      ++pos;
    }
    put_leb128(out, run);
    value ^= 1;
  }
  if (total == 0) put_leb128(out, 0);
  return out;
}

AvailabilityMap decompress_map(std::span<const std::uint8_t> rle, std::uint32_t width,
                               std::uint32_t height) {
  AvailabilityMap m(width, height);
  const std::size_t total = m.bits.size();
  std::size_t pos = 0;
  std::size_t filled = 0;
  std::uint8_t value = 0;
  while (filled < total) {
    const std::size_t at = pos;
    const std::uint64_t run = get_leb128(rle, pos);
    if (run > total - filled)
      throw std::runtime_error("map rle: run of " + std::to_string(run) + " overflows " +
                               std::to_string(total - filled) + " remaining bits at byte " +
                               std::to_string(at));
    if (value) std::fill_n(m.bits.begin() + filled, run, std::uint8_t(1));
    filled += run;
    value ^= 1;
  }
  if (pos != rle.size())
    throw std::runtime_error("map rle: " + std::to_string(rle.size() - pos) +
                             " trailing bytes at byte " + std::to_string(pos));
  return m;
}

double psnr(const Image& a, const Image& b) {
  if (a.width != b.width || a.height != b.height)
    throw std::invalid_argument("psnr: image dimensions differ");
  std::uint64_t se = 0;
  for (std::size_t i = 0; i < a.data.size(); ++i) {
    const std::int64_t d = std::int64_t(a.data[i]) - b.data[i];
    se += static_cast<std::uint64_t>(d * d);
  }
  if (se == 0) return std::numeric_limits<double>::infinity();
  const double mse = double(se) / double(a.data.size());
  return 10.0 * std::log10(255.0 * 255.0 / mse);
}

std::vector<std::size_t> marked_pair_indices(const AvailabilityMap& map) {
  std::vector<std::size_t> out;
  const std::uint32_t pairs_per_row = map.width / 2;
  for (std::uint32_t r = 0; r < map.height; ++r) {
    for (std::uint32_t pc = 0; pc < pairs_per_row; ++pc) {
      const std::uint32_t c = pc * 2;
      if (map.marked(r, c) || map.marked(r, c + 1))
        out.push_back(std::size_t(r) * pairs_per_row + pc);
    }
  }
  return out;
}

Image de_embed_image(const Image& img, const AvailabilityMap& map,
                     std::span<const std::uint8_t> payload) {
  if (map.width != img.width || map.height != img.height)
    throw std::invalid_argument("de_embed_image: map/image dimensions differ");
  const std::vector<std::size_t> marked = marked_pair_indices(map);
  if (payload.size() > marked.size())
    throw std::invalid_argument("de_embed_image: payload exceeds capacity");
  Image out = img;
  const std::uint32_t pairs_per_row = img.width / 2;
  for (std::size_t i = 0; i < payload.size(); ++i) {
    const std::size_t pi = marked[i];
    const std::uint32_t r = static_cast<std::uint32_t>(pi / pairs_per_row);
    const std::uint32_t c = static_cast<std::uint32_t>(pi % pairs_per_row) * 2;
    PixelPair p;
    p.x = out.at(r, c);
    p.y = out.at(r, c + 1);
    p.row = r;
    p.col = c;
    const PixelPair e = de_embed(p, payload[i] & 1);
    out.at(r, c) = e.x;
    out.at(r, c + 1) = e.y;
  }
  return out;
}

std::vector<std::uint8_t> de_extract_image(const Image& marked, const AvailabilityMap& map,
                                           std::uint64_t count) {
  const std::vector<std::size_t> idx = marked_pair_indices(map);
  if (count > idx.size())
    throw std::invalid_argument("de_extract_image: count exceeds marked pairs");
  std::vector<std::uint8_t> bits;
  bits.reserve(count);
  const std::uint32_t pairs_per_row = marked.width / 2;
  for (std::uint64_t i = 0; i < count; ++i) {
    const std::size_t pi = idx[i];
    PixelPair p;
    p.row = static_cast<std::uint32_t>(pi / pairs_per_row);
    p.col = static_cast<std::uint32_t>(pi % pairs_per_row) * 2;
    p.x = marked.at(p.row, p.col);
    p.y = marked.at(p.row, p.col + 1);
    bits.push_back(static_cast<std::uint8_t>(de_extract(p)));
  }
  return bits;
}

Image de_recover_image(const Image& marked, const AvailabilityMap& map, std::uint64_t count) {
  const std::vector<std::size_t> idx = marked_pair_indices(map);
  if (count > idx.size())
    throw std::invalid_argument("de_recover_image: count exceeds marked pairs");
  Image out = marked;
  const std::uint32_t pairs_per_row = marked.width / 2;
  for (std::uint64_t i = 0; i < count; ++i) {
    const std::size_t pi = idx[i];
    PixelPair p;
    p.row = static_cast<std::uint32_t>(pi / pairs_per_row);
    p.col = static_cast<std::uint32_t>(pi % pairs_per_row) * 2;
    p.x = out.at(p.row, p.col);
    p.y = out.at(p.row, p.col + 1);
    const PixelPair r = de_recover(p);
    out.at(p.row, p.col) = r.x;
    out.at(p.row, p.col + 1) = r.y;
  }
  return out;
}

}  // namespace fhede
