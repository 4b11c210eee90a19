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
#include "fhede/params.hpp"

#include <cmath>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace fhede {

bool is_prime(std::uint64_t x) {
  if (x < 2) return false;
  if (x % 2 == 0) return x == 2;
  for (std::uint64_t f = 3; f * f <= x; f += 2) {
    if (x % f == 0) return false;
  }
  return true;
}

std::uint32_t bits_needed(std::uint32_t q) {
  std::uint32_t b = 0;
  std::uint64_t v = 1;
  while (v < q) {
    v <<= 1;
    ++b;
  }
  return b;
}

ProfileCheck validate_profile(const ParamProfile& p) {
  ProfileCheck r;
  if (p.n == 0) r.violations.push_back("n must be positive");
  if (p.sigma <= 0.0) r.violations.push_back("sigma must be positive");
  if (p.epsilon <= 0.0) r.violations.push_back("epsilon must be positive");
  if (!is_prime(p.q)) r.violations.push_back("q is not prime");
  const std::uint64_t n2 = std::uint64_t(p.n) * p.n;
  if (!(n2 < p.q && p.q < 2 * n2))
    r.violations.push_back("q outside (n^2, 2n^2)");
  if (p.q >= 2 && p.beta != bits_needed(p.q))
    r.violations.push_back("beta != ceil(log2 q)");
  if (p.q >= 2) {
    const double dmin = (1.0 + p.epsilon) * (1.0 + p.n) * std::log2(double(p.q));
    if (double(p.d) < dmin) {
      std::ostringstream os;
      os << "d too small: " << p.d << " < " << dmin;
      r.violations.push_back(os.str());
    }
  }
  r.ok = r.violations.empty();
  return r;
}

ParamProfile paper_profile() {
  ParamProfile p;
  p.n = 240;
  p.q = 57601;
  p.d = 4573;
  p.beta = 16;
  // d = 4573 sits just under the epsilon = 0.2 bound (4573.45), so the
  // stored slack is 0.199.
  p.epsilon = 0.199;
  p.sigma = 1.0;
  return p;
}

ParamProfile toy_profile() {
  ParamProfile p;
  p.n = 40;
  p.q = 2053;
  p.d = 560;
  p.beta = 12;
  p.epsilon = 0.2;
  // At q = 2053 the multiplication budget 2*r1*r2 < q/4 forces near-zero
  // fresh noise for the deep carry chains to decrypt reliably.
  p.sigma = 0.05;
  return p;
}

double security_dimension_estimate(const ParamProfile& p, double delta) {
  if (delta <= 1.0) throw std::invalid_argument("delta must exceed 1");
  return std::sqrt(double(p.n) * std::log2(double(p.q)) / std::log2(delta));
}

ParamProfile parse_profile_config(const std::string& text) {
  ParamProfile p;
  p.n = p.q = p.d = 0;
  std::istringstream in(text);
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto h = line.find('#');
    if (h != std::string::npos) line.erase(h);
    // trim
    const auto b = line.find_first_not_of(" \t\r");
    if (b == std::string::npos) continue;
    const auto e = line.find_last_not_of(" \t\r");
    line = line.substr(b, e - b + 1);
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw std::invalid_argument("profile config line " + std::to_string(lineno) +
                                  ": expected key=value");
    std::string key = line.substr(0, eq);
    std::string val = line.substr(eq + 1);
    const auto ke = key.find_last_not_of(" \t");
    key = key.substr(0, ke + 1);
    const auto vb = val.find_first_not_of(" \t");
    val = vb == std::string::npos ? "" : val.substr(vb);
    try {
      if (key == "n") p.n = static_cast<std::uint32_t>(std::stoul(val));
      else if (key == "q") p.q = static_cast<std::uint32_t>(std::stoul(val));
      else if (key == "d") p.d = static_cast<std::uint32_t>(std::stoul(val));
      else if (key == "epsilon") p.epsilon = std::stod(val);
      else if (key == "sigma") p.sigma = std::stod(val);
      else if (key == "refresh_mult_interval") p.refresh_mult_interval = static_cast<std::uint32_t>(std::stoul(val));
      else if (key == "refresh_add_interval") p.refresh_add_interval = static_cast<std::uint32_t>(std::stoul(val));
      else throw std::invalid_argument("profile config line " + std::to_string(lineno) +
                                       ": unknown key '" + key + "'");
    } catch (const std::invalid_argument&) {
      throw;
    } catch (const std::exception&) {
      throw std::invalid_argument("profile config line " + std::to_string(lineno) +
                                  ": bad value for '" + key + "'");
    }
  }
  p.beta = p.q >= 1 ? bits_needed(p.q) : 0;
  return p;
}

std::string format_profile_config(const ParamProfile& p) {
  std::ostringstream os;
  os << "n=" << p.n << "\n"
     << "q=" << p.q << "\n"
     << "d=" << p.d << "\n"
     << "epsilon=" << p.epsilon << "\n"
     << "sigma=" << p.sigma << "\n"
     << "refresh_mult_interval=" << p.refresh_mult_interval << "\n"
     << "refresh_add_interval=" << p.refresh_add_interval << "\n";
  return os.str();
}

ParamProfile load_profile_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("cannot open profile config: " + path);
  std::ostringstream os;
  os << in.rdbuf();
  return parse_profile_config(os.str());
}

ParamProfile resolve_profile(const std::string& name_or_path) {
  if (name_or_path == "paper") return paper_profile();
  if (name_or_path == "toy") return toy_profile();
  return load_profile_file(name_or_path);
}

}  // namespace fhede
