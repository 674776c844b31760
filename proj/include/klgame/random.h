// Copyright 2026 The klgame Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef KLGAME_RANDOM_H_
#define KLGAME_RANDOM_H_

#include <cstdint>
#include <random>

#include "klgame/numerics.h"

namespace klgame {

using Rng = std::mt19937_64;

// Independent named streams derived from one run seed.
enum class StreamId : std::uint32_t {
  kEnvironment = 1,
  kFeedbackNoise = 2,
  kPlusSampling = 3,
  kMinusSampling = 4,
  kInitialization = 5,
};

inline Rng MakeStream(std::uint64_t seed, StreamId stream) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed),
                    static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(stream)};
  return Rng(seq);
}

// Draw from [0, 1) with 53 random bits.
inline double UniformUnit(Rng& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

// Inverse-CDF draw of an index from `p`. Never returns an index with zero mass.
inline int SampleIndex(const Simplex& p, Rng& rng) {
  const double u = UniformUnit(rng);
  double acc = 0.0;
  int last = 0;
  for (int i = 0; i < p.size(); ++i) {
    if (p[i] <= 0.0) continue;
    acc += p[i];
    last = i;
    if (u < acc) return i;
  }
  return last;
}

}  // namespace klgame

#endif  // KLGAME_RANDOM_H_
