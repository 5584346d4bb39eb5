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

#ifndef HISTSAN_RANDOM_H_
#define HISTSAN_RANDOM_H_

#include <cstdint>
#include <random>
#include <span>

namespace histsan {

// A reproducible source of independent random streams. Every random decision
// in the library is drawn from a stream that is derived from one 64-bit seed
// by a chain of Fork() calls, so a stream depends only on (seed, fork path)
// and never on evaluation order or thread count.
class RandomStream {
 public:
  explicit RandomStream(uint64_t seed);

  RandomStream Fork(uint64_t tag) const;
  RandomStream Fork(uint64_t tag, uint64_t index) const {
    return Fork(tag).Fork(index);
  }

  uint64_t key() const { return key_; }

  // A fresh engine positioned at the start of this stream.
  std::mt19937_64 Engine() const;

 private:
  uint64_t key_;
};

// Fork tags. Distinct operations draw from distinct subtrees.
namespace stream_tag {
inline constexpr uint64_t kVolume = 0x766f6c;
inline constexpr uint64_t kRatio = 0x726174;
inline constexpr uint64_t kSample = 0x736d70;
inline constexpr uint64_t kComponent = 0x636d70;
inline constexpr uint64_t kGridOffset = 0x6f6666;
inline constexpr uint64_t kNode = 0x6e6f64;
inline constexpr uint64_t kCenters = 0x636e74;
inline constexpr uint64_t kCertify = 0x637274;
inline constexpr uint64_t kCover = 0x636f76;
inline constexpr uint64_t kPrivacy = 0x707276;
inline constexpr uint64_t kAttack = 0x61746b;
inline constexpr uint64_t kAux = 0x617578;
inline constexpr uint64_t kTrial = 0x74726c;
inline constexpr uint64_t kProbe = 0x707262;
}  // namespace stream_tag

// Uniform double in [0, 1).
double UniformUnit(std::mt19937_64& engine);

double StandardNormal(std::mt19937_64& engine);

// Uniformly distributed unit vector written into `out`.
void RandomDirection(std::mt19937_64& engine, std::span<double> out);

// Uniform point of the ball B(center, radius) written into `out`.
void UniformInBall(std::mt19937_64& engine, std::span<const double> center,
                   double radius, std::span<double> out);

}  // namespace histsan

#endif  // HISTSAN_RANDOM_H_
