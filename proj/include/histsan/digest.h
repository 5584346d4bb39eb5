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

#ifndef HISTSAN_DIGEST_H_
#define HISTSAN_DIGEST_H_

#include <cstdint>
#include <string>
#include <string_view>

namespace histsan {

// Lower-case hex SHA-256 of `bytes`.
std::string Sha256Hex(std::string_view bytes);

// Commitment to a sanitizer seed: SHA-256 of its 8 little-endian bytes.
std::string SeedCommitment(uint64_t seed);

}  // namespace histsan

#endif  // HISTSAN_DIGEST_H_
