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

#ifndef RBMEST_RNG_HPP
#define RBMEST_RNG_HPP

#include <array>
#include <cstdint>

namespace rbm {

// Counter-based generator (Philox-4x32, 10 rounds). A stream is addressed by
// (seed, stream index); equal addresses replay the same sequence no matter
// which thread draws or in what order streams are created, which is what the
// simulation harness's determinism contract rests on. All continuous variates
// are inverse-CDF transforms of single uniforms, so every draw consumes a
// constant amount of the counter.
class Philox4x32 {
 public:
  Philox4x32(std::uint64_t seed, std::uint64_t stream)
      : seed_(seed), stream_(stream), block_(0), idx_(4) {}

  // One keyed block: counter words (c0..c3), key words (k0, k1).
  static std::array<std::uint32_t, 4> block(std::uint32_t c0, std::uint32_t c1,
                                            std::uint32_t c2, std::uint32_t c3,
                                            std::uint32_t k0, std::uint32_t k1);

  std::uint32_t next_u32();
  std::uint64_t next_u64();

  // Uniform on the open interval (0, 1): (xted >> 11 + 0.5) * 2^-53.
  double uniform();
  // Standard normal through the quantile function.
  double normal();
  // Exponential with the given rate.
  double exponential(double rate = 1.0);
  // Gamma with the given shape and scale, by CDF inversion.
  double gamma(double shape, double scale);
  // Poisson by CDF summation; the summation is capped at
  // lambda + 60*sqrt(lambda) + 200 and switches to a normal approximation
  // above lambda = 700 (far outside the simulated designs' range).
  long long poisson(double lambda);

 private:
  std::uint64_t seed_, stream_, block_;
  std::array<std::uint32_t, 4> buf_{};
  int idx_;  // next unread word in buf_
};

}  // namespace rbm

#endif  // RBMEST_RNG_HPP
