// Copyright 2026 The rbmest authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "rbmest/rng.hpp"

#include <cmath>

#include "rbmest/errors.hpp"
#include "rbmest/special.hpp"

namespace rbm {

std::array<std::uint32_t, 4> Philox4x32::block(std::uint32_t c0, std::uint32_t c1,
                                               std::uint32_t c2, std::uint32_t c3,
                                               std::uint32_t k0, std::uint32_t k1) {
  constexpr std::uint64_t kM0 = 0xD2511F53u;
  constexpr std::uint64_t kM1 = 0xCD9E8D57u;
  constexpr std::uint32_t kW0 = 0x9E3779B9u;
  constexpr std::uint32_t kW1 = 0xBB67AE85u;
  for (int r = 0; r < 10; ++r) {
    if (r > 0) {
      k0 += kW0;
      k1 += kW1;
    }
    const std::uint64_t p0 = kM0 * c0;
    const std::uint64_t p1 = kM1 * c2;
    const std::uint32_t hi0 = static_cast<std::uint32_t>(p0 >> 32);
    const std::uint32_t lo0 = static_cast<std::uint32_t>(p0);
    const std::uint32_t hi1 = static_cast<std::uint32_t>(p1 >> 32);
    const std::uint32_t lo1 = static_cast<std::uint32_t>(p1);
    c0 = hi1 ^ c1 ^ k0;
    c1 = lo1;
    c2 = hi0 ^ c3 ^ k1;
    c3 = lo0;
  }
  return {c0, c1, c2, c3};
}

std::uint32_t Philox4x32::next_u32() {
  if (idx_ >= 4) {
    buf_ = block(static_cast<std::uint32_t>(block_), static_cast<std::uint32_t>(block_ >> 32),
                 static_cast<std::uint32_t>(stream_), static_cast<std::uint32_t>(stream_ >> 32),
                 static_cast<std::uint32_t>(seed_), static_cast<std::uint32_t>(seed_ >> 32));
    ++block_;
    idx_ = 0;
  }
  return buf_[static_cast<size_t>(idx_++)];
}

std::uint64_t Philox4x32::next_u64() {
  const std::uint64_t lo = next_u32();
  const std::uint64_t hi = next_u32();
  return lo | (hi << 32);
}

double Philox4x32::uniform() {
  return (static_cast<double>(next_u64() >> 11) + 0.5) * 0x1.0p-53;
}

double Philox4x32::normal() { return normal_quantile(uniform()); }

double Philox4x32::exponential(double rate) {
  if (!(rate > 0.0)) throw DomainError("exponential rate must be positive");
  return -std::log(uniform()) / rate;
}

double Philox4x32::gamma(double shape, double scale) {
  if (!(shape > 0.0) || !(scale > 0.0))
    throw DomainError("gamma shape and scale must be positive");
  return gamma_p_inverse(shape, uniform()) * scale;
}

long long Philox4x32::poisson(double lambda) {
  if (!(lambda >= 0.0)) throw DomainError("Poisson mean must be non-negative");
  if (lambda == 0.0) {
    uniform();  // keep stream consumption constant
    return 0;
  }
  if (lambda > 700.0) {
    // e^-lambda underflows; the designs never get here in practice.
    const double z = normal();
    const double approx = std::floor(lambda + std::sqrt(lambda) * z + 0.5);
    return approx < 0.0 ? 0 : static_cast<long long>(approx);
  }
  const double u = uniform();
  const long long cap =
      static_cast<long long>(lambda + 60.0 * std::sqrt(lambda) + 200.0);
  double pmf = std::exp(-lambda);
  double cdf = pmf;
  long long k = 0;
  while (u > cdf && k < cap) {
    ++k;
    pmf *= lambda / static_cast<double>(k);
    cdf += pmf;
  }
  return k;
}

}  // namespace rbm
