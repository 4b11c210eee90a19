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

// Command-line driver for the encrypted-domain reversible data hiding
// library. Client-role commands (keygen, encrypt, decrypt, de-*) may touch
// the secret key; server-role commands (embed, extract-ct, recover-ct,
// extract-enc) refuse it outright.

#include <chrono>
#include <cstdlib>
#include <filesystem>
#include <iostream>

#include <CLI11.hpp>

#include "fhede/io.hpp"

namespace fs = std::filesystem;
using namespace fhede;

namespace {

constexpr int kExitValidation = 2;
constexpr int kExitRole = 3;
constexpr int kExitFormat = 4;

ParamProfile profile_from_flag(const std::string& flag) {
  std::string name = flag;
  if (name.empty()) {
    const char* env = std::getenv("FHEDE_PROFILE");
    name = env && *env ? env : "toy";
  }
  const ParamProfile p = resolve_profile(name);
  const ProfileCheck check = validate_profile(p);
  if (!check.ok) {
    std::string msg = "invalid profile '" + name + "':";
    for (const auto& v : check.violations) msg += "\n  " + v;
    throw std::invalid_argument(msg);
  }
  return p;
}

struct KeyPaths {
  std::string sk, pk, tensor, lsb, refresh;
  explicit KeyPaths(const std::string& dir)
      : sk((fs::path(dir) / "sk.fhesk").string()),
        pk((fs::path(dir) / "pk.fhepk").string()),
        tensor((fs::path(dir) / "swk_tensor.fhesw").string()),
        lsb((fs::path(dir) / "swk_lsb.fhesw").string()),
        refresh((fs::path(dir) / "rk.fherk").string()) {}
};

// Server commands must not even sit next to a secret key.
void refuse_secret_keys_in(const std::string& dir) {
  if (!fs::is_directory(dir)) return;
  for (const auto& entry : fs::directory_iterator(dir)) {
    if (entry.is_regular_file() && file_is_secret_key(entry.path().string()))
      throw RoleViolation("server command refused: secret-key file present at " +
                          entry.path().string());
  }
}

struct LoadedServerKeys {
  PublicKey pk;
  SwitchingKey tensor;
  SwitchingKey lsb;
  std::unique_ptr<Refresher> refresher;  // noise-refresh stand-in, from rk.fherk

  ServerKeys view() {
    ServerKeys k;
    k.pk = &pk;
    k.tensor_key = &tensor;
    k.lsb_key = &lsb;
    k.refresher = refresher.get();
    return k;
  }
};

LoadedServerKeys load_server_keys(const std::string& dir, std::uint64_t seed) {
  refuse_secret_keys_in(dir);
  const KeyPaths paths(dir);
  LoadedServerKeys keys;
  keys.pk = read_public_key(paths.pk);
  keys.tensor = read_switching_key(paths.tensor, 0);
  keys.lsb = read_switching_key(paths.lsb, 1);
  keys.refresher = std::make_unique<TrustedRefresher>(read_refresh_key(paths.refresh), keys.pk,
                                                      Rng(seed ^ 0xB00757A9ULL));
  return keys;
}

std::vector<std::uint8_t> random_bits(std::size_t count, Rng& rng) {
  std::vector<std::uint8_t> bits(count);
  for (auto& b : bits) b = static_cast<std::uint8_t>(rng.bit());
  return bits;
}

double ms_since(std::chrono::steady_clock::time_point t0, int iters) {
  const auto dt = std::chrono::steady_clock::now() - t0;
  return std::chrono::duration<double, std::milli>(dt).count() / iters;
}

int cmd_keygen(const std::string& profile_flag, std::uint64_t seed, const std::string& out_dir) {
  const ParamProfile p = profile_from_flag(profile_flag);
  fs::create_directories(out_dir);
  Rng rng(seed);
  const SecretKey sk = skgen(p, rng);
  const PublicKey pk = pkgen(p, sk, rng);

  std::vector<std::uint32_t> ss(std::size_t(p.n) * p.n);
  for (std::uint32_t i = 0; i < p.n; ++i)
    for (std::uint32_t j = 0; j < p.n; ++j)
      ss[std::size_t(i) * p.n + j] = mod_mul(sk.s[i], sk.s[j], p.q);
  const SwitchingKey tensor = switch_kgen(ss, sk, p, rng);
  const SwitchingKey lsb = switch_kgen(sk.s, sk, p, rng);

  const KeyPaths paths(out_dir);
  write_secret_key(sk, paths.sk);
  write_public_key(pk, paths.pk);
  write_switching_key(tensor, 0, paths.tensor);
  write_switching_key(lsb, 1, paths.lsb);
  write_refresh_key(sk, paths.refresh);
  std::cout << "wrote " << paths.sk << "\nwrote " << paths.pk << "\n";
  std::cout << "wrote " << paths.tensor << "\nwrote " << paths.lsb << "\n";
  std::cout << "wrote " << paths.refresh << "\n";
  return 0;
}

int cmd_de_analyze(const std::string& img_path, std::uint32_t hfid, std::int64_t target_ec,
                   std::uint64_t seed, const std::string& out_map) {
  const Image img = read_pgm(img_path);
  const EmbedConfig cfg{hfid};
  const AvailabilityMap map =
      target_ec >= 0 ? build_map(img, cfg, std::uint64_t(target_ec)) : build_map(img, cfg);
  const std::uint64_t ec = marked_pair_indices(map).size();

  Rng rng(seed);
  const std::vector<std::uint8_t> payload = random_bits(ec, rng);
  const Image marked = de_embed_image(img, map, payload);
  const Image recovered = de_recover_image(marked, map, payload.size());
  const std::vector<std::uint8_t> extracted = de_extract_image(marked, map, payload.size());

  std::cout << "image=" << img_path << "\n";
  std::cout << "h_fid=" << hfid << "\n";
  std::cout << "ec=" << ec << "\n";
  std::cout << "embedding_rate_bpp=" << double(ec) / (double(img.width) * img.height) << "\n";
  std::cout << "psnr1=" << psnr(img, marked) << "\n";
  std::cout << "psnr2=" << psnr(img, recovered) << "\n";
  std::cout << "extract_errors=" << (extracted == payload ? 0 : 1) << "\n";
  if (!out_map.empty()) {
    write_map(map, out_map);
    std::cout << "map=" << out_map << "\n";
  }
  return 0;
}

int cmd_encrypt(const std::string& img_path, const std::string& mode_flag,
                const std::string& keys_dir, const std::string& map_path,
                const std::string& out_path, std::uint64_t seed, int jobs) {
  const Image img = read_pgm(img_path);
  const AvailabilityMap map = read_map(map_path);
  const PublicKey pk = read_public_key(KeyPaths(keys_dir).pk);
  const StoreMode mode =
      mode_flag == "efficient" ? StoreMode::kEfficient : StoreMode::kUniversal;
  const CiphertextStore store = encrypt_image(img, map, mode, pk, seed, jobs);
  write_store(store, out_path);
  std::cout << "wrote " << out_path << " (" << fs::file_size(out_path) << " bytes)\n";
  return 0;
}

int cmd_embed(const std::string& store_path, const std::string& payload_path,
              const std::string& dh_key_path, const std::string& keys_dir,
              const std::string& out_path, std::uint64_t seed, int jobs) {
  if (file_is_secret_key(store_path) || file_is_secret_key(payload_path))
    throw RoleViolation("server command refused: got a secret-key file");
  LoadedServerKeys keys = load_server_keys(keys_dir, seed);
  CiphertextStore store = read_store(store_path, &keys.pk.profile);
  const std::vector<std::uint8_t> payload = read_payload(payload_path);

  DataHidingKey k;
  if (fs::exists(dh_key_path)) {
    k.bits = read_payload(dh_key_path);
  } else {
    Rng rng(seed ^ 0xD4A7A0A351CDULL);
    k.bits = random_bits(payload.size(), rng);
    write_payload(k.bits, dh_key_path);
    std::cerr << "generated data-hiding key at " << dh_key_path << "\n";
  }

  OpCounters counters;
  KsLsbStats stats;
  embed_store(store, payload, k, keys.view(), seed, counters, stats, jobs);
  write_store(store, out_path);
  std::cout << "embedded_bits=" << payload.size() << "\n";
  std::cout << counters.report();
  std::cout << "kslsb_mean_switches=" << stats.mean() << "\n";
  std::cout << "wrote " << out_path << "\n";
  return 0;
}

int cmd_extract_ct(const std::string& store_path, const std::string& dh_key_path,
                   const std::string& out_path) {
  if (file_is_secret_key(store_path) || file_is_secret_key(dh_key_path))
    throw RoleViolation("server command refused: got a secret-key file");
  const CiphertextStore store = read_store(store_path);
  DataHidingKey k;
  k.bits = read_payload(dh_key_path);
  const std::vector<std::uint8_t> bits = extract_store_lsb(store, k);
  write_payload(bits, out_path);
  std::cout << "extracted_bits=" << bits.size() << "\n";
  std::cout << "wrote " << out_path << "\n";
  return 0;
}

int cmd_recover_ct(const std::string& store_path, const std::string& keys_dir,
                   const std::string& out_path, std::uint64_t seed, int jobs) {
  if (file_is_secret_key(store_path))
    throw RoleViolation("server command refused: got a secret-key file");
  LoadedServerKeys keys = load_server_keys(keys_dir, seed);
  const CiphertextStore store = read_store(store_path, &keys.pk.profile);
  OpCounters counters;
  const CiphertextStore recovered = recover_store(store, keys.view(), seed, counters, jobs);
  write_store(recovered, out_path);
  std::cout << "recovered_pairs=" << store.embedded_count << "\n";
  std::cout << counters.report();
  std::cout << "wrote " << out_path << "\n";
  return 0;
}

int cmd_extract_enc(const std::string& store_path, const std::string& keys_dir,
                    const std::string& out_path, std::uint64_t seed, int jobs) {
  if (file_is_secret_key(store_path))
    throw RoleViolation("server command refused: got a secret-key file");
  LoadedServerKeys keys = load_server_keys(keys_dir, seed);
  const CiphertextStore store = read_store(store_path, &keys.pk.profile);
  OpCounters counters;
  const CiphertextStore bits = extract_store_enc(store, keys.view(), seed, counters, jobs);
  write_store(bits, out_path);
  std::cout << "extracted_bits=" << bits.bit_cts.size() << "\n";
  std::cout << counters.report();
  std::cout << "wrote " << out_path << "\n";
  return 0;
}

int cmd_decrypt(const std::string& store_path, const std::string& keys_dir,
                const std::string& out_path) {
  const SecretKey sk = read_secret_key(KeyPaths(keys_dir).sk);
  const CiphertextStore store = read_store(store_path, &sk.profile);
  if (store.mode == StoreMode::kEncryptedBits) {
    const std::vector<std::uint8_t> bits = decrypt_bits(store, sk);
    write_payload(bits, out_path);
    std::cout << "decrypted_bits=" << bits.size() << "\n";
  } else {
    write_pgm(decrypt_image(store, sk), out_path);
    std::cout << "decrypted_image=" << out_path << "\n";
  }
  std::cout << "wrote " << out_path << "\n";
  return 0;
}

int cmd_de_extract(const std::string& img_path, const std::string& map_path,
                   std::int64_t count, const std::string& out_path) {
  const Image img = read_pgm(img_path);
  const AvailabilityMap map = read_map(map_path);
  const std::uint64_t n =
      count >= 0 ? std::uint64_t(count) : marked_pair_indices(map).size();
  const std::vector<std::uint8_t> bits = de_extract_image(img, map, n);
  write_payload(bits, out_path);
  std::cout << "extracted_bits=" << bits.size() << "\n";
  std::cout << "wrote " << out_path << "\n";
  return 0;
}

int cmd_de_recover(const std::string& img_path, const std::string& map_path,
                   std::int64_t count, const std::string& out_path) {
  const Image img = read_pgm(img_path);
  const AvailabilityMap map = read_map(map_path);
  const std::uint64_t n =
      count >= 0 ? std::uint64_t(count) : marked_pair_indices(map).size();
  write_pgm(de_recover_image(img, map, n), out_path);
  std::cout << "recovered_pairs=" << n << "\n";
  std::cout << "wrote " << out_path << "\n";
  return 0;
}

int cmd_gen_image(std::uint32_t width, std::uint32_t height, std::uint64_t seed, int noise_amp,
                  const std::string& out_path) {
  Image img(width, height);
  Rng rng(seed);
  for (std::uint32_t r = 0; r < height; ++r)
    for (std::uint32_t c = 0; c < width; ++c) {
      const int base = 40 + int((r * 5 + c * 3) % 176);
      const int noise = int(rng.uniform_below(2 * noise_amp + 1)) - noise_amp;
      img.at(r, c) = static_cast<std::uint8_t>(std::clamp(base + noise, 0, 255));
    }
  write_pgm(img, out_path);
  std::cout << "wrote " << out_path << "\n";
  return 0;
}

int cmd_bench(const std::string& profile_flag, std::uint64_t seed, int iters) {
  const ParamProfile p = profile_from_flag(profile_flag);
  Rng rng(seed);
  std::cout << "profile: n=" << p.n << " q=" << p.q << " d=" << p.d << "\n";
  std::cout << "iterations per op: " << iters << "\n";

  auto t0 = std::chrono::steady_clock::now();
  const SecretKey sk = skgen(p, rng);
  const PublicKey pk = pkgen(p, sk, rng);
  std::cout << "keygen_ms=" << ms_since(t0, 1) << "\n";

  t0 = std::chrono::steady_clock::now();
  const SwitchingKey lsb = switch_kgen(sk.s, sk, p, rng);
  std::cout << "switch_kgen_ms=" << ms_since(t0, 1) << "\n";

  std::vector<Ciphertext> cts;
  t0 = std::chrono::steady_clock::now();
  for (int i = 0; i < iters; ++i) cts.push_back(enc(pk, i & 1, rng));
  std::cout << "encryption_ms=" << ms_since(t0, iters) << "\n";

  t0 = std::chrono::steady_clock::now();
  int parity = 0;
  for (int i = 0; i < iters; ++i) parity ^= dec(sk, cts[i]);
  std::cout << "decryption_ms=" << ms_since(t0, iters) << "\n";

  t0 = std::chrono::steady_clock::now();
  for (int i = 0; i < iters; ++i) cts[i] = key_switch(cts[i], lsb);
  std::cout << "key_switching_ms=" << ms_since(t0, iters) << "\n";

  TrustedRefresher refresher(sk, pk, rng.fork(1));
  t0 = std::chrono::steady_clock::now();
  for (int i = 0; i < iters; ++i) cts[i] = refresher.refresh(cts[i]);
  std::cout << "refresh_ms=" << ms_since(t0, iters) << "\n";

  for (int i = 0; i < iters; ++i) parity ^= dec(sk, cts[i]);
  return parity == -1 ? 1 : 0;  // parity is 0/1; keeps the timed work live
}

int cmd_report(std::uint64_t seed) {
  const ParamProfile p = toy_profile();
  Rng rng(seed);
  const SecretKey sk = skgen(p, rng);
  const PublicKey pk = pkgen(p, sk, rng);
  std::vector<std::uint32_t> ss(std::size_t(p.n) * p.n);
  for (std::uint32_t i = 0; i < p.n; ++i)
    for (std::uint32_t j = 0; j < p.n; ++j)
      ss[std::size_t(i) * p.n + j] = mod_mul(sk.s[i], sk.s[j], p.q);
  const SwitchingKey tensor = switch_kgen(ss, sk, p, rng);
  TrustedRefresher refresher(sk, pk, rng.fork(2));

  bool ok = true;
  for (const char* circuit : {"add8", "sub8"}) {
    Rng crng = rng.fork(circuit[0]);
    EvalContext ctx;
    ctx.profile = &p;
    ctx.pk = &pk;
    ctx.tensor_key = &tensor;
    ctx.refresher = &refresher;
    ctx.rng = &crng;
    const EncryptedByte x = encrypt_byte(pk, 200, crng);
    const EncryptedByte y = encrypt_byte(pk, 77, crng);
    const EncryptedByte out =
        circuit[0] == 'a' ? add8(x, y, ctx) : sub8(x, y, ctx);
    const unsigned value = decrypt_byte(sk, out);
    const unsigned expect = circuit[0] == 'a' ? (200 + 77) & 0xFF : 200 - 77;
    const std::uint64_t reported_adds =
        circuit[0] == 'a' ? kAdd8ReportedAdds : kSub8ReportedAdds;

    std::cout << circuit << ":\n";
    std::cout << "  result=" << value << " expected=" << expect << "\n";
    std::cout << "  mults=" << ctx.counters.mults << " expected=" << kCircuitMults << "\n";
    std::cout << "  keyswitches=" << ctx.counters.keyswitches << " expected="
              << kCircuitKeySwitches << "\n";
    std::cout << "  refresh_events=" << ctx.counters.refresh_events << " expected="
              << kCircuitRefreshEvents << "\n";
    std::cout << "  pk_consumed=" << ctx.counters.pk_consumed << " expected="
              << kCircuitPkConsumed << "\n";
    std::cout << "  adds_performed=" << ctx.counters.adds
              << " adds_reported_convention=" << reported_adds << "\n";
    ok = ok && value == expect && ctx.counters.mults == kCircuitMults &&
         ctx.counters.keyswitches == kCircuitKeySwitches &&
         ctx.counters.refresh_events == kCircuitRefreshEvents &&
         ctx.counters.pk_consumed == kCircuitPkConsumed;
  }
  std::cout << (ok ? "counters match\n" : "counters DO NOT match\n");
  return ok ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Reversible data hiding in LWE-encrypted images"};
  app.require_subcommand(1);

  std::string profile_flag, img_path, keys_dir, map_path, out_path, store_path;
  std::string payload_path, dh_key_path, mode_flag = "universal", out_map;
  std::uint64_t seed = 1;
  std::uint32_t hfid = 10;
  std::int64_t target_ec = -1, count = -1;
  int jobs = 1, iters = 100;

  auto* keygen = app.add_subcommand("keygen", "generate key material");
  keygen->add_option("--profile", profile_flag, "paper|toy|<config path>");
  keygen->add_option("--seed", seed, "randomness seed");
  keygen->add_option("--out", out_path, "output directory")->required();

  auto* analyze = app.add_subcommand("de-analyze", "plain-domain capacity/fidelity report");
  analyze->add_option("image", img_path, "PGM image")->required();
  analyze->add_option("--hfid", hfid, "fidelity cap on pair differences");
  analyze->add_option("--target-ec", target_ec, "select exactly this many pairs");
  analyze->add_option("--seed", seed, "payload seed");
  analyze->add_option("--out-map", out_map, "write the availability map here");

  auto* encrypt = app.add_subcommand("encrypt", "client: encrypt an image");
  encrypt->add_option("image", img_path)->required();
  encrypt->add_option("--mode", mode_flag, "universal|efficient")
      ->check(CLI::IsMember({"universal", "efficient"}));
  encrypt->add_option("--keys", keys_dir, "key directory")->required();
  encrypt->add_option("--map", map_path, "availability map file")->required();
  encrypt->add_option("--out", out_path)->required();
  encrypt->add_option("--seed", seed);
  encrypt->add_option("--jobs", jobs);

  auto* embed = app.add_subcommand("embed", "server: hide a payload in a store");
  embed->add_option("store", store_path)->required();
  embed->add_option("--payload", payload_path)->required();
  embed->add_option("--dh-key", dh_key_path, "data-hiding key (generated if absent)")
      ->required();
  embed->add_option("--switch-keys", keys_dir)->required();
  embed->add_option("--out", out_path)->required();
  embed->add_option("--seed", seed);
  embed->add_option("--jobs", jobs);

  auto* extract_ct = app.add_subcommand("extract-ct", "server: payload from ciphertext LSBs");
  extract_ct->add_option("store", store_path)->required();
  extract_ct->add_option("--dh-key", dh_key_path)->required();
  extract_ct->add_option("--out", out_path)->required();

  auto* recover_ct = app.add_subcommand("recover-ct", "server: undo hiding in ciphertext");
  recover_ct->add_option("store", store_path)->required();
  recover_ct->add_option("--switch-keys", keys_dir)->required();
  recover_ct->add_option("--out", out_path)->required();
  recover_ct->add_option("--seed", seed);
  recover_ct->add_option("--jobs", jobs);

  auto* extract_enc = app.add_subcommand("extract-enc", "server: payload as ciphertexts");
  extract_enc->add_option("store", store_path)->required();
  extract_enc->add_option("--switch-keys", keys_dir)->required();
  extract_enc->add_option("--out", out_path)->required();
  extract_enc->add_option("--seed", seed);
  extract_enc->add_option("--jobs", jobs);

  auto* decrypt = app.add_subcommand("decrypt", "client: decrypt a store");
  decrypt->add_option("store", store_path)->required();
  decrypt->add_option("--keys", keys_dir)->required();
  decrypt->add_option("--out", out_path)->required();

  auto* de_extract = app.add_subcommand("de-extract", "client: payload from a marked image");
  de_extract->add_option("image", img_path)->required();
  de_extract->add_option("--map", map_path)->required();
  de_extract->add_option("--count", count, "bits to read (default: all marked pairs)");
  de_extract->add_option("--out", out_path)->required();

  auto* de_recover = app.add_subcommand("de-recover", "client: restore a marked image");
  de_recover->add_option("image", img_path)->required();
  de_recover->add_option("--map", map_path)->required();
  de_recover->add_option("--count", count, "pairs to restore (default: all marked pairs)");
  de_recover->add_option("--out", out_path)->required();

  std::uint32_t gen_w = 16, gen_h = 16;
  int gen_noise = 2;
  auto* gen_image = app.add_subcommand("gen-image", "write a synthetic grayscale test image");
  gen_image->add_option("--width", gen_w);
  gen_image->add_option("--height", gen_h);
  gen_image->add_option("--seed", seed);
  gen_image->add_option("--noise", gen_noise, "uniform noise amplitude");
  gen_image->add_option("--out", out_path)->required();

  auto* bench = app.add_subcommand("bench", "per-operation wall-clock timings");
  bench->add_option("--profile", profile_flag);
  bench->add_option("--seed", seed);
  bench->add_option("--iters", iters);

  auto* report = app.add_subcommand("report", "circuit operation counts vs expectations");
  report->add_option("--seed", seed);

  try {
    app.parse(argc, argv);
    if (keygen->parsed()) return cmd_keygen(profile_flag, seed, out_path);
    if (analyze->parsed()) return cmd_de_analyze(img_path, hfid, target_ec, seed, out_map);
    if (encrypt->parsed())
      return cmd_encrypt(img_path, mode_flag, keys_dir, map_path, out_path, seed, jobs);
    if (embed->parsed())
      return cmd_embed(store_path, payload_path, dh_key_path, keys_dir, out_path, seed, jobs);
    if (extract_ct->parsed()) return cmd_extract_ct(store_path, dh_key_path, out_path);
    if (recover_ct->parsed())
      return cmd_recover_ct(store_path, keys_dir, out_path, seed, jobs);
    if (extract_enc->parsed())
      return cmd_extract_enc(store_path, keys_dir, out_path, seed, jobs);
    if (decrypt->parsed()) return cmd_decrypt(store_path, keys_dir, out_path);
    if (de_extract->parsed()) return cmd_de_extract(img_path, map_path, count, out_path);
    if (de_recover->parsed()) return cmd_de_recover(img_path, map_path, count, out_path);
    if (gen_image->parsed()) return cmd_gen_image(gen_w, gen_h, seed, gen_noise, out_path);
    if (bench->parsed()) return cmd_bench(profile_flag, seed, iters);
    if (report->parsed()) return cmd_report(seed);
    return kExitValidation;
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitValidation;
  } catch (const RoleViolation& e) {
    std::cerr << "role violation: " << e.what() << "\n";
    return kExitRole;
  } catch (const FormatError& e) {
    std::cerr << "format error: " << e.what() << "\n";
    return kExitFormat;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitValidation;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}
