// Copyright 2026 The maskdet Authors. All Rights Reserved.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <cstdint>
#include <random>

namespace maskdet {

// Seeded generator whose derived distributions are implemented here rather
// than via <random> distributions, so sequences are identical across
// standard libraries. The engine is std::mt19937_64, whose output sequence
// the standard pins exactly.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t next_u64() { return engine_(); }

  // Uniform in [0, 1) with 53 random bits.
  double uniform01();
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform01(); }

  // Uniform integer in [0, n) by rejection sampling; n > 0.
  std::uint64_t below(std::uint64_t n);

  // Standard normal via Box-Muller (one value per call; the pair's second
  // value is cached).
  double normal();

  // Gamma(shape, 1) by Marsaglia-Tsang; shape < 1 uses the
  // Gamma(shape + 1) * U^(1/shape) boost.
  double gamma(double shape);

  // Beta(a, b) as g1 / (g1 + g2) with g1 ~ Gamma(a), g2 ~ Gamma(b).
  double beta(double a, double b);

 private:
  std::mt19937_64 engine_;
  bool has_spare_ = false;
  double spare_ = 0.0;
};

}  // namespace maskdet
