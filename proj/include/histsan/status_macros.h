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

#ifndef HISTSAN_STATUS_MACROS_H_
#define HISTSAN_STATUS_MACROS_H_

#include "absl/strings/string_view.h"
#include <utility>

#include "absl/status/status.h"
#include "absl/strings/str_cat.h"

#define HISTSAN_STATUS_CONCAT_INNER_(a, b) a##b
#define HISTSAN_STATUS_CONCAT_(a, b) HISTSAN_STATUS_CONCAT_INNER_(a, b)

#define HISTSAN_RETURN_IF_ERROR(expr)            \
  do {                                           \
    const absl::Status histsan_status_ = (expr); \
    if (!histsan_status_.ok()) {                 \
      return histsan_status_;                    \
    }                                            \
  } while (0)

#define HISTSAN_ASSIGN_OR_RETURN(lhs, rexpr)                                 \
  HISTSAN_ASSIGN_OR_RETURN_IMPL_(                                            \
      HISTSAN_STATUS_CONCAT_(histsan_statusor_, __LINE__), lhs, rexpr)

#define HISTSAN_ASSIGN_OR_RETURN_IMPL_(statusor, lhs, rexpr) \
  auto statusor = (rexpr);                                   \
  if (!statusor.ok()) {                                      \
    return statusor.status();                                \
  }                                                          \
  lhs = std::move(statusor).value()

namespace histsan {

// Error categories used throughout the library. The command line maps them to
// exit codes: input errors exit 1, resource and degenerate-geometry errors
// exit 2, internal errors exit 3.
inline absl::Status InputError(absl::string_view message) {
  return absl::InvalidArgumentError(message);
}

inline absl::Status ConfigurationError(absl::string_view message) {
  return absl::InvalidArgumentError(
      absl::StrCat("configuration error: ", message));
}

inline absl::Status ResourceError(absl::string_view message) {
  return absl::ResourceExhaustedError(message);
}

inline absl::Status DegenerateGeometryError(absl::string_view message) {
  return absl::FailedPreconditionError(
      absl::StrCat("degenerate geometry: ", message));
}

inline bool IsDegenerateGeometry(const absl::Status& status) {
  return status.code() == absl::StatusCode::kFailedPrecondition;
}

}  // namespace histsan

#endif  // HISTSAN_STATUS_MACROS_H_
