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
#include <optional>
#include <span>
#include <vector>

namespace fhede {

// 8-bit grayscale image, row-major. Odd widths are legal; the last column
// simply never joins a pair.
struct Image {
  std::uint32_t width = 0;
  std::uint32_t height = 0;
  std::vector<std::uint8_t> data;

  Image() = default;
  Image(std::uint32_t w, std::uint32_t h) : width(w), height(h), data(std::size_t(w) * h, 0) {}

  std::uint8_t at(std::uint32_t r, std::uint32_t c) const { return data[std::size_t(r) * width + c]; }
  std::uint8_t& at(std::uint32_t r, std::uint32_t c) { return data[std::size_t(r) * width + c]; }
};

// Two horizontally adjacent pixels; x is the left one. (row, col) locates x.
struct PixelPair {
  std::uint8_t x = 0;
  std::uint8_t y = 0;
  std::uint32_t row = 0;
  std::uint32_t col = 0;
};

struct EmbedConfig {
  std::uint32_t h_fid = 10;  // fidelity cap on the pair difference, <= 127
};

// Image-shaped bitmask: exactly one set bit per carrying pair, placed on the
// bigger pixel (ties: the left one).
struct AvailabilityMap {
  std::uint32_t width = 0;
  std::uint32_t height = 0;
  std::vector<std::uint8_t> bits;  // one byte per pixel, 0 or 1

  AvailabilityMap() = default;
  AvailabilityMap(std::uint32_t w, std::uint32_t h)
      : width(w), height(h), bits(std::size_t(w) * h, 0) {}

  bool marked(std::uint32_t r, std::uint32_t c) const { return bits[std::size_t(r) * width + c] != 0; }
  void set(std::uint32_t r, std::uint32_t c, bool v) { bits[std::size_t(r) * width + c] = v ? 1 : 0; }
  std::uint64_t count_marked() const;
};

struct DiffAvg {
  int h;  // signed difference x - y
  int l;  // floor average
};

DiffAvg diff_avg(const PixelPair& p);

// Inverse transform; throws std::domain_error if a pixel leaves [0, 255]
// (which signals a constraint check missed upstream).
PixelPair inv_diff_avg(int h, int l);

// Overflow/underflow constraints on the expanded difference plus the
// fidelity cap, evaluated on |h| so orientation does not matter.
bool is_available(const PixelPair& p, const EmbedConfig& cfg);

// Non-overlapping horizontal pairs in raster order: columns (0,1), (2,3), ...
std::vector<PixelPair> pair_pixels(const Image& img);

// Marks the bigger pixel of every available pair. With target_ec, keeps
// exactly target_ec pairs, chosen by ascending |h| with raster order as the
// tie break; throws std::invalid_argument if fewer pairs are available.
AvailabilityMap build_map(const Image& img, const EmbedConfig& cfg,
                          std::optional<std::uint64_t> target_ec = std::nullopt);

// The pair transform itself works on the oriented pair (big side first);
// these wrappers orient internally with the same bigger-or-left rule the map
// uses, so plain-domain results line up with map-driven encrypted results.
PixelPair de_embed(const PixelPair& p, int b);
int de_extract(const PixelPair& marked);
PixelPair de_recover(const PixelPair& marked);

// Run-length coding of the row-major bitmask: alternating run lengths as
// unsigned LEB128, starting with a zero-run.
std::vector<std::uint8_t> compress_map(const AvailabilityMap& m);
AvailabilityMap decompress_map(std::span<const std::uint8_t> rle, std::uint32_t width,
                               std::uint32_t height);

// 10*log10(255^2 / MSE); +infinity iff the images are identical.
double psnr(const Image& a, const Image& b);

// Image-level plumbing over the pair ops. Payload bits land on the first
// payload-many marked pairs in raster order.
Image de_embed_image(const Image& img, const AvailabilityMap& map,
                     std::span<const std::uint8_t> payload);
std::vector<std::uint8_t> de_extract_image(const Image& marked, const AvailabilityMap& map,
                                           std::uint64_t count);
Image de_recover_image(const Image& marked, const AvailabilityMap& map, std::uint64_t count);

// Positions (pair index into pair_pixels order) of marked pairs, raster order.
std::vector<std::size_t> marked_pair_indices(const AvailabilityMap& map);

}  // namespace fhede
