//
// Copyright 2026 The Histsan Authors
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
//

#include "histsan/random.h"

#include <cmath>
#include <cstdint>
#include <random>

namespace histsan {
namespace {

// SplitMix64 finalizer.
uint64_t Mix64(uint64_t z) {
  z += 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

}  // namespace

RandomStream::RandomStream(uint64_t seed) : key_(Mix64(seed)) {}

RandomStream RandomStream::Fork(uint64_t tag) const {
  RandomStream child(0);
  child.key_ = Mix64(key_ ^ Mix64(tag ^ 0x632be59bd9b4e019ULL));
  return child;
}

std::mt19937_64 RandomStream::Engine() const {
  std::seed_seq seq{static_cast<uint32_t>(key_),
                    static_cast<uint32_t>(key_ >> 32)};
  return std::mt19937_64(seq);
}

double UniformUnit(std::mt19937_64& engine) {
  return static_cast<double>(engine() >> 11) * 0x1.0p-53;
}

double StandardNormal(std::mt19937_64& engine) {
  // Marsaglia polar method on our own uniforms keeps draws independent of the
  // standard library's distribution internals.
  while (true) {
    const double u = 2.0 * UniformUnit(engine) - 1.0;
    const double v = 2.0 * UniformUnit(engine) - 1.0;
    const double s = u * u + v * v;
    if (s > 0.0 && s < 1.0) {
      return u * std::sqrt(-2.0 * std::log(s) / s);
    }
  }
}

void RandomDirection(std::mt19937_64& engine, std::span<double> out) {
  while (true) {
    double norm2 = 0.0;
    for (double& v : out) {
      v = StandardNormal(engine);
      norm2 += v * v;
    }
    if (norm2 > 1e-300) {
      const double inv = 1.0 / std::sqrt(norm2);
      for (double& v : out) v *= inv;
      return;
    }
  }
}

void UniformInBall(std::mt19937_64& engine, std::span<const double> center,
                   double radius, std::span<double> out) {
  RandomDirection(engine, out);
  const double dim = static_cast<double>(out.size());
  const double r = radius * std::pow(UniformUnit(engine), 1.0 / dim);
  for (size_t i = 0; i < out.size(); ++i) out[i] = center[i] + r * out[i];
}

}  // namespace histsan
