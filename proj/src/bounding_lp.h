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

#ifndef HISTSAN_SRC_BOUNDING_LP_H_
#define HISTSAN_SRC_BOUNDING_LP_H_

#include <optional>
#include <span>

#include "histsan/region.h"

namespace histsan::internal {

// Maximizes objective . x over the polytope
//   {x : low <= x <= high} intersected with every halfspace in `faces`.
// The polytope must be non-empty. Solved as the dual problem
//   min b.y  s.t.  A^T y = objective, y >= 0,
// whose box rows give a feasible starting basis. Returns nullopt when the
// solver does not converge; callers fall back to a coarser bound.
std::optional<double> MaximizeOverPolytope(std::span<const Halfspace> faces,
                                           std::span<const double> low,
                                           std::span<const double> high,
                                           std::span<const double> objective);

}  // namespace histsan::internal

#endif  // HISTSAN_SRC_BOUNDING_LP_H_
