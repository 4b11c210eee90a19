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
#include "fhede/pipeline.hpp"

#include <functional>
#include <memory>
#include <stdexcept>
#include <string>
#include <thread>

namespace fhede {

double KsLsbStats::mean() const {
  if (switch_counts.empty()) return 0.0;
  std::uint64_t total = 0;
  for (std::uint32_t c : switch_counts) total += c;
  return double(total) / double(switch_counts.size());
}

std::vector<std::uint8_t> scramble(std::span<const std::uint8_t> payload,
                                   const DataHidingKey& k) {
  if (payload.size() != k.bits.size())
    throw std::invalid_argument("scramble: payload/key length mismatch");
  std::vector<std::uint8_t> out(payload.size());
  for (std::size_t i = 0; i < payload.size(); ++i) out[i] = (payload[i] ^ k.bits[i]) & 1;
  return out;
}

EncryptedPixelPair hide_universal(const EncryptedPixelPair& pair, const Ciphertext& c_bs,
                                  EvalContext& ctx) {
  const Ciphertext z0 = ctx.encrypt_bit(0);
  const EncryptedByte ch = sub8(pair.cx, pair.cy, ctx);       // h
  const EncryptedByte cl = add8(pair.cy, shr1(ch, z0), ctx);  // l = Y + floor(h/2)

  const Ciphertext z1 = ctx.encrypt_bit(0);
  const EncryptedByte chp =
      add8(shl1(ch, z1), byte_from_bit(c_bs, z1), ctx);  // h' = 2h + b

  const Ciphertext one = ctx.encrypt_bit(1);
  const Ciphertext z2 = ctx.encrypt_bit(0);
  const EncryptedByte csum = add8(chp, byte_from_bit(one, z2), ctx);  // h' + 1

  const Ciphertext z3 = ctx.encrypt_bit(0);
  EncryptedPixelPair out;
  out.cx = add8(cl, shr1(csum, z3), ctx);  // X' = l + floor((h'+1)/2)
  out.cy = sub8(out.cx, chp, ctx);         // Y' = X' - h'
  return out;
}

EncryptedPixelPair recover_universal(const EncryptedPixelPair& pair, EvalContext& ctx) {
  const Ciphertext z0 = ctx.encrypt_bit(0);
  const EncryptedByte chp = sub8(pair.cx, pair.cy, ctx);      // h'
  const EncryptedByte ch = shr1(chp, z0);                     // h = floor(h'/2)
  const EncryptedByte cl = add8(pair.cy, ch, ctx);            // l = Y' + h

  const Ciphertext one = ctx.encrypt_bit(1);
  const Ciphertext z1 = ctx.encrypt_bit(0);
  const EncryptedByte csum = add8(ch, byte_from_bit(one, z1), ctx);  // h + 1

  const Ciphertext z2 = ctx.encrypt_bit(0);
  EncryptedPixelPair out;
  out.cx = add8(cl, shr1(csum, z2), ctx);  // X = l + floor((h+1)/2)
  out.cy = sub8(out.cx, ch, ctx);          // Y = X - h
  return out;
}

Ciphertext extract_universal(const EncryptedPixelPair& pair, EvalContext& ctx) {
  return sub8(pair.cx, pair.cy, ctx).bits[0];
}

EncryptedHL hide_efficient(const EncryptedHL& hl, const Ciphertext& c_bs, EvalContext& ctx) {
  const Ciphertext z0 = ctx.encrypt_bit(0);
  EncryptedHL out;
  out.ch = add8(shl1(hl.ch, z0), byte_from_bit(c_bs, z0), ctx);
  out.cl = hl.cl;
  return out;
}

EncryptedHL recover_efficient(const EncryptedHL& hl, const Ciphertext& zero) {
  EncryptedHL out;
  out.ch = shr1(hl.ch, zero);
  out.cl = hl.cl;
  return out;
}

Ciphertext extract_efficient(const EncryptedHL& hl) { return hl.ch.bits[0]; }

Ciphertext kslsb_embed(const Ciphertext& c, int b_r, const SwitchingKey& lsb_key,
                       std::uint32_t cap, std::uint32_t* switches_out) {
  if (b_r != 0 && b_r != 1) throw std::invalid_argument("kslsb_embed: bit expected");
  Ciphertext cur = c;
  std::uint32_t count = 0;
  while (int(cur.c.back() & 1u) != b_r) {
    if (count >= cap)
      throw std::runtime_error("kslsb_embed: no parity match after " + std::to_string(cap) +
                               " key switches; switching key is broken");
    cur = key_switch(cur, lsb_key);
    ++count;
  }
  if (switches_out) *switches_out = count;
  return cur;
}

int kslsb_extract(const Ciphertext& c) { return int(c.c.back() & 1u); }

namespace {

struct PairLoc {
  std::uint32_t row = 0;
  std::uint32_t col = 0;        // left pixel column
  bool marked_is_left = true;   // which pixel the map marks
};

PairLoc locate_pair(const AvailabilityMap& map, std::size_t pair_index) {
  const std::uint32_t pairs_per_row = map.width / 2;
  PairLoc loc;
  loc.row = static_cast<std::uint32_t>(pair_index / pairs_per_row);
  loc.col = static_cast<std::uint32_t>(pair_index % pairs_per_row) * 2;
  loc.marked_is_left = map.marked(loc.row, loc.col);
  return loc;
}

// Runs fn(i) for i in [0, count) across `jobs` threads. Work items must be
// independent; determinism comes from per-item rng forks, not from order.
void parallel_for(std::size_t count, int jobs, const std::function<void(std::size_t)>& fn) {
  if (jobs <= 1 || count <= 1) {
    for (std::size_t i = 0; i < count; ++i) fn(i);
    return;
  }
  const std::size_t workers = std::min<std::size_t>(jobs, count);
  std::vector<std::thread> threads;
  threads.reserve(workers);
  for (std::size_t w = 0; w < workers; ++w) {
    threads.emplace_back([&, w]() {
      for (std::size_t i = w; i < count; i += workers) fn(i);
    });
  }
  for (auto& t : threads) t.join();
}

}  // namespace

CiphertextStore encrypt_image(const Image& img, const AvailabilityMap& map, StoreMode mode,
                              const PublicKey& pk, std::uint64_t seed, int jobs) {
  if (mode == StoreMode::kEncryptedBits)
    throw std::invalid_argument("encrypt_image: encrypted-bits stores come from extraction");
  if (map.width != img.width || map.height != img.height)
    throw std::invalid_argument("encrypt_image: map/image dimensions differ");

  CiphertextStore store;
  store.profile = pk.profile;
  store.mode = mode;
  store.width = img.width;
  store.height = img.height;
  store.map = map;

  const Rng root(seed);
  const std::size_t npix = img.data.size();

  if (mode == StoreMode::kUniversal) {
    store.pixels.resize(npix);
    parallel_for(npix, jobs, [&](std::size_t i) {
      Rng r = root.fork(i);
      store.pixels[i] = encrypt_byte(pk, img.data[i], r);
    });
    return store;
  }

  // Reduced-cost mode: (h, l) for marked pairs, plain pixel bytes elsewhere.
  const std::vector<std::size_t> marked = marked_pair_indices(map);
  std::vector<std::uint8_t> in_marked_pair(npix, 0);
  store.hl_blocks.resize(marked.size());
  parallel_for(marked.size(), jobs, [&](std::size_t i) {
    const PairLoc loc = locate_pair(map, marked[i]);
    const std::uint8_t left = img.at(loc.row, loc.col);
    const std::uint8_t right = img.at(loc.row, loc.col + 1);
    const unsigned big = loc.marked_is_left ? left : right;
    const unsigned small = loc.marked_is_left ? right : left;
    const unsigned h = big - small;
    const unsigned l = (big + small) / 2;
    const std::size_t left_idx = std::size_t(loc.row) * img.width + loc.col;
    Rng rh = root.fork(left_idx);
    Rng rl = root.fork(left_idx + 1);
    store.hl_blocks[i].ch = encrypt_byte(pk, h, rh);
    store.hl_blocks[i].cl = encrypt_byte(pk, l, rl);
  });
  for (std::size_t pi : marked) {
    const PairLoc loc = locate_pair(map, pi);
    const std::size_t left_idx = std::size_t(loc.row) * img.width + loc.col;
    in_marked_pair[left_idx] = 1;
    in_marked_pair[left_idx + 1] = 1;
  }
  std::vector<std::size_t> loose;
  for (std::size_t i = 0; i < npix; ++i)
    if (!in_marked_pair[i]) loose.push_back(i);
  store.pixels.resize(loose.size());
  parallel_for(loose.size(), jobs, [&](std::size_t i) {
    Rng r = root.fork(npix + loose[i]);
    store.pixels[i] = encrypt_byte(pk, img.data[loose[i]], r);
  });
  return store;
}

Image decrypt_image(const CiphertextStore& store, const SecretKey& sk) {
  if (!sk.profile.same_shape(store.profile))
    throw std::invalid_argument("decrypt_image: key/store profile mismatch");
  Image img(store.width, store.height);

  if (store.mode == StoreMode::kUniversal) {
    if (store.pixels.size() != img.data.size())
      throw std::runtime_error("decrypt_image: store pixel count mismatch");
    for (std::size_t i = 0; i < img.data.size(); ++i)
      img.data[i] = static_cast<std::uint8_t>(decrypt_byte(sk, store.pixels[i]));
    return img;
  }
  if (store.mode != StoreMode::kEfficient)
    throw std::invalid_argument("decrypt_image: store holds bits, not an image");

  const std::vector<std::size_t> marked = marked_pair_indices(store.map);
  if (marked.size() != store.hl_blocks.size())
    throw std::runtime_error("decrypt_image: map/blocks mismatch");
  std::vector<std::uint8_t> in_marked_pair(img.data.size(), 0);
  for (std::size_t i = 0; i < marked.size(); ++i) {
    const PairLoc loc = locate_pair(store.map, marked[i]);
    const int hp = static_cast<int>(decrypt_byte(sk, store.hl_blocks[i].ch));
    const int l = static_cast<int>(decrypt_byte(sk, store.hl_blocks[i].cl));
    const PixelPair p = inv_diff_avg(hp, l);  // throws if the block is corrupt
    const std::uint8_t big = p.x;
    const std::uint8_t small = p.y;
    img.at(loc.row, loc.col) = loc.marked_is_left ? big : small;
    img.at(loc.row, loc.col + 1) = loc.marked_is_left ? small : big;
    const std::size_t left_idx = std::size_t(loc.row) * img.width + loc.col;
    in_marked_pair[left_idx] = 1;
    in_marked_pair[left_idx + 1] = 1;
  }
  std::size_t next_loose = 0;
  for (std::size_t i = 0; i < img.data.size(); ++i) {
    if (in_marked_pair[i]) continue;
    if (next_loose >= store.pixels.size())
      throw std::runtime_error("decrypt_image: store pixel count mismatch");
    img.data[i] = static_cast<std::uint8_t>(decrypt_byte(sk, store.pixels[next_loose++]));
  }
  if (next_loose != store.pixels.size())
    throw std::runtime_error("decrypt_image: store pixel count mismatch");
  return img;
}

std::vector<std::uint8_t> decrypt_bits(const CiphertextStore& store, const SecretKey& sk) {
  if (store.mode != StoreMode::kEncryptedBits)
    throw std::invalid_argument("decrypt_bits: store is not an encrypted-bits store");
  if (!sk.profile.same_shape(store.profile))
    throw std::invalid_argument("decrypt_bits: key/store profile mismatch");
  std::vector<std::uint8_t> bits;
  bits.reserve(store.bit_cts.size());
  for (const Ciphertext& ct : store.bit_cts)
    bits.push_back(static_cast<std::uint8_t>(dec(sk, ct)));
  return bits;
}

namespace {

EvalContext make_pair_context(const CiphertextStore& store, const ServerKeys& keys, Rng* rng,
                              Refresher* refresher) {
  EvalContext ctx;
  ctx.profile = &store.profile;
  ctx.pk = keys.pk;
  ctx.tensor_key = keys.tensor_key;
  ctx.lsb_key = keys.lsb_key;
  ctx.refresher = refresher;
  ctx.rng = rng;
  return ctx;
}

void check_server_keys(const CiphertextStore& store, const ServerKeys& keys) {
  if (!keys.pk || !keys.tensor_key || !keys.lsb_key || !keys.refresher)
    throw std::invalid_argument("server keys incomplete");
  if (!keys.pk->profile.same_shape(store.profile) ||
      !keys.tensor_key->profile.same_shape(store.profile) ||
      !keys.lsb_key->profile.same_shape(store.profile))
    throw std::invalid_argument("server keys/store profile mismatch");
}

EncryptedPixelPair load_pair(const CiphertextStore& store, const PairLoc& loc) {
  const std::size_t left = std::size_t(loc.row) * store.width + loc.col;
  EncryptedPixelPair p;
  p.cx = store.pixels[loc.marked_is_left ? left : left + 1];
  p.cy = store.pixels[loc.marked_is_left ? left + 1 : left];
  return p;
}

void store_pair(CiphertextStore& store, const PairLoc& loc, const EncryptedPixelPair& p) {
  const std::size_t left = std::size_t(loc.row) * store.width + loc.col;
  store.pixels[loc.marked_is_left ? left : left + 1] = p.cx;
  store.pixels[loc.marked_is_left ? left + 1 : left] = p.cy;
}

}  // namespace

void embed_store(CiphertextStore& store, std::span<const std::uint8_t> payload,
                 const DataHidingKey& k, const ServerKeys& keys, std::uint64_t seed,
                 OpCounters& counters, KsLsbStats& stats, int jobs) {
  check_server_keys(store, keys);
  if (payload.size() != k.bits.size())
    throw std::invalid_argument("embed_store: payload/data-hiding key length mismatch");
  const std::vector<std::size_t> marked = marked_pair_indices(store.map);
  if (payload.size() > marked.size())
    throw std::invalid_argument("embed_store: payload of " + std::to_string(payload.size()) +
                                " bits exceeds capacity " + std::to_string(marked.size()));
  const std::vector<std::uint8_t> scrambled = scramble(payload, k);

  const Rng root(seed);
  std::vector<OpCounters> per_pair(payload.size());
  std::vector<std::uint32_t> per_pair_switches(payload.size(), 0);

  parallel_for(payload.size(), jobs, [&](std::size_t i) {
    Rng rng = root.fork(i);
    const std::unique_ptr<Refresher> refresher = keys.refresher->fork(i);
    EvalContext ctx = make_pair_context(store, keys, &rng, refresher.get());
    if (store.mode == StoreMode::kUniversal) {
      const PairLoc loc = locate_pair(store.map, marked[i]);
      EncryptedPixelPair pair = load_pair(store, loc);
      const Ciphertext c_bs = ctx.encrypt_bit(payload[i] & 1);
      EncryptedPixelPair hidden = hide_universal(pair, c_bs, ctx);
      hidden.cx.bits[0] = kslsb_embed(hidden.cx.bits[0], scrambled[i] & 1, *keys.lsb_key, 64,
                                      &per_pair_switches[i]);
      store_pair(store, loc, hidden);
    } else {
      const Ciphertext c_bs = ctx.encrypt_bit(payload[i] & 1);
      EncryptedHL hidden = hide_efficient(store.hl_blocks[i], c_bs, ctx);
      hidden.ch.bits[0] = kslsb_embed(hidden.ch.bits[0], scrambled[i] & 1, *keys.lsb_key, 64,
                                      &per_pair_switches[i]);
      store.hl_blocks[i] = hidden;
    }
    per_pair[i] = ctx.counters;
  });

  for (std::size_t i = 0; i < payload.size(); ++i) {
    counters += per_pair[i];
    stats.switch_counts.push_back(per_pair_switches[i]);
  }
  store.embedded_count = static_cast<std::uint32_t>(payload.size());
}

std::vector<std::uint8_t> extract_store_lsb(const CiphertextStore& store,
                                            const DataHidingKey& k) {
  if (k.bits.size() != store.embedded_count)
    throw std::invalid_argument("extract_store_lsb: key length != embedded count");
  const std::vector<std::size_t> marked = marked_pair_indices(store.map);
  std::vector<std::uint8_t> out(store.embedded_count);
  for (std::size_t i = 0; i < out.size(); ++i) {
    int b_r;
    if (store.mode == StoreMode::kUniversal) {
      const PairLoc loc = locate_pair(store.map, marked[i]);
      const std::size_t left = std::size_t(loc.row) * store.width + loc.col;
      const EncryptedByte& cx = store.pixels[loc.marked_is_left ? left : left + 1];
      b_r = kslsb_extract(cx.bits[0]);
    } else {
      b_r = kslsb_extract(store.hl_blocks[i].ch.bits[0]);
    }
    out[i] = static_cast<std::uint8_t>((b_r ^ k.bits[i]) & 1);
  }
  return out;
}

CiphertextStore recover_store(const CiphertextStore& store, const ServerKeys& keys,
                              std::uint64_t seed, OpCounters& counters, int jobs) {
  check_server_keys(store, keys);
  CiphertextStore out = store;
  const std::vector<std::size_t> marked = marked_pair_indices(store.map);
  const Rng root(seed);
  std::vector<OpCounters> per_pair(store.embedded_count);

  parallel_for(store.embedded_count, jobs, [&](std::size_t i) {
    Rng rng = root.fork(i);
    const std::unique_ptr<Refresher> refresher = keys.refresher->fork(i);
    EvalContext ctx = make_pair_context(store, keys, &rng, refresher.get());
    if (store.mode == StoreMode::kUniversal) {
      const PairLoc loc = locate_pair(store.map, marked[i]);
      store_pair(out, loc, recover_universal(load_pair(store, loc), ctx));
    } else {
      out.hl_blocks[i] = recover_efficient(store.hl_blocks[i], ctx.encrypt_bit(0));
    }
    per_pair[i] = ctx.counters;
  });

  for (const OpCounters& c : per_pair) counters += c;
  out.embedded_count = 0;
  return out;
}

CiphertextStore extract_store_enc(const CiphertextStore& store, const ServerKeys& keys,
                                  std::uint64_t seed, OpCounters& counters, int jobs) {
  check_server_keys(store, keys);
  CiphertextStore out;
  out.profile = store.profile;
  out.mode = StoreMode::kEncryptedBits;
  out.width = store.width;
  out.height = store.height;
  out.bit_cts.resize(store.embedded_count);
  const std::vector<std::size_t> marked = marked_pair_indices(store.map);
  const Rng root(seed);
  std::vector<OpCounters> per_pair(store.embedded_count);

  parallel_for(store.embedded_count, jobs, [&](std::size_t i) {
    Rng rng = root.fork(i);
    const std::unique_ptr<Refresher> refresher = keys.refresher->fork(i);
    EvalContext ctx = make_pair_context(store, keys, &rng, refresher.get());
    if (store.mode == StoreMode::kUniversal) {
      const PairLoc loc = locate_pair(store.map, marked[i]);
      out.bit_cts[i] = extract_universal(load_pair(store, loc), ctx);
    } else {
      out.bit_cts[i] = extract_efficient(store.hl_blocks[i]);
    }
    per_pair[i] = ctx.counters;
  });

  for (const OpCounters& c : per_pair) counters += c;
  return out;
}

}  // namespace fhede
