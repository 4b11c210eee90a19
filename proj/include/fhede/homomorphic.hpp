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
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "fhede/lwe.hpp"

namespace fhede {

// Maps ciphertexts under a length-n1 key to ciphertexts of the same
// plaintext under a length-n2 key. b has n1*beta rows, n2 columns; its first
// column carries powersof(s1) on top of the underlying scaffolding key.
struct SwitchingKey {
  ParamProfile profile;
  std::uint32_t from_dim = 0;  // n1
  std::uint32_t to_dim = 0;    // n2
  Mat b;                       // (n1*beta) x n2
};

// Homomorphic-operation accounting. One public key is consumed per
// key-switching and per refresh event, so pk_consumed stays equal to
// keyswitches + refresh_events.
struct OpCounters {
  std::uint64_t adds = 0;
  std::uint64_t mults = 0;
  std::uint64_t keyswitches = 0;
  std::uint64_t refresh_events = 0;
  std::uint64_t pk_consumed = 0;

  OpCounters& operator+=(const OpCounters& o) {
    adds += o.adds;
    mults += o.mults;
    keyswitches += o.keyswitches;
    refresh_events += o.refresh_events;
    pk_consumed += o.pk_consumed;
    return *this;
  }

  // Flat text report, one metric per line.
  std::string report() const;
};

// Replaces a ciphertext with a fresh-noise encryption of the same plaintext.
// Circuit evaluation depends on this: byte addition alone turns encryptions
// of 1+1 into residue 2, and the carry chains multiply such even residues
// until they wrap the modulus, so deep circuits are only correct when the
// scheduled refreshes actually reduce them.
class Refresher {
 public:
  virtual ~Refresher() = default;
  virtual Ciphertext refresh(const Ciphertext& ct) = 0;
  // Independent substream for parallel evaluation; deterministic in
  // (refresher, stream).
  virtual std::unique_ptr<Refresher> fork(std::uint64_t stream) const = 0;
};

// Decrypt-and-re-encrypt stand-in for the external noise-refresh procedure.
// In the full scheme this step runs under published bootstrapping material
// that servers hold; the stand-in simulates that interface but is built from
// the private key, so it is for simulation only and must be distributed with
// the same care as the key it wraps.
class TrustedRefresher : public Refresher {
 public:
  TrustedRefresher(const SecretKey& sk, const PublicKey& pk, Rng rng)
      : sk_(sk), pk_(pk), rng_(rng) {}
  Ciphertext refresh(const Ciphertext& ct) override;
  std::unique_ptr<Refresher> fork(std::uint64_t stream) const override {
    return std::make_unique<TrustedRefresher>(sk_, pk_, rng_.fork(stream));
  }

 private:
  SecretKey sk_;
  PublicKey pk_;
  Rng rng_;
};

// Leaves ciphertexts untouched, for noise-stress experiments. Deep circuits
// decrypt wrongly under this refresher by design.
class NoopRefresher : public Refresher {
 public:
  Ciphertext refresh(const Ciphertext& ct) override { return ct; }
  std::unique_ptr<Refresher> fork(std::uint64_t) const override {
    return std::make_unique<NoopRefresher>();
  }
};

// Mutable evaluation state: keys, counters and the refresh scheduler. A
// refresh event fires when the multiplications or additions since the last
// event reach the profile's intervals; the event re-encrypts every
// ciphertext currently registered live. Single writer per context; counters
// merge associatively across contexts.
struct EvalContext {
  const ParamProfile* profile = nullptr;
  const PublicKey* pk = nullptr;
  const SwitchingKey* tensor_key = nullptr;  // s(x)s -> s
  const SwitchingKey* lsb_key = nullptr;     // s -> s
  Refresher* refresher = nullptr;
  Rng* rng = nullptr;

  OpCounters counters;
  std::uint32_t mults_since_event = 0;
  std::uint32_t adds_since_event = 0;
  std::vector<Ciphertext*> live;

  Ciphertext encrypt_bit(int m);  // auxiliary encryptions (not counted)

  void note_add(Ciphertext* result);
  void note_mult(Ciphertext* result);
  // Unconditional event: refreshes the live set, counts once.
  void fire_event(Ciphertext* extra);
};

// Registers ciphertexts as live for the scope's lifetime.
class LiveScope {
 public:
  explicit LiveScope(EvalContext& ctx) : ctx_(ctx), base_(ctx.live.size()) {}
  void add(Ciphertext* ct) { ctx_.live.push_back(ct); }
  ~LiveScope() { ctx_.live.resize(base_); }
  LiveScope(const LiveScope&) = delete;
  LiveScope& operator=(const LiveScope&) = delete;

 private:
  EvalContext& ctx_;
  std::size_t base_;
};

// B gets powersof(s1) added to the first column of a fresh n1*beta-row
// scaffolding key over s2.
SwitchingKey switch_kgen(std::span<const std::uint32_t> s1, const SecretKey& s2,
                         const ParamProfile& p, Rng& rng);

// bit_decompose(long_ct)^T * B. Pure form; the context form also counts.
Ciphertext key_switch(const Ciphertext& long_ct, const SwitchingKey& k);
Ciphertext key_switch(const Ciphertext& long_ct, const SwitchingKey& k, EvalContext& ctx);

// Row-major vectorized outer product: out[i*n + j] = c1[i]*c2[j].
Ciphertext tensor_product(const Ciphertext& c1, const Ciphertext& c2, std::uint32_t q);

// XOR on plaintexts: coordinate-wise sum.
Ciphertext hadd(const Ciphertext& c1, const Ciphertext& c2, EvalContext& ctx);

// AND on plaintexts: tensor product immediately collapsed by key-switching.
Ciphertext hmul(const Ciphertext& c1, const Ciphertext& c2, EvalContext& ctx);

// Standalone refresh; counts one event and resets the scheduler.
Ciphertext refresh(const Ciphertext& ct, EvalContext& ctx);

}  // namespace fhede
