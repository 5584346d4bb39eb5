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

#ifndef HISTSAN_PARALLEL_H_
#define HISTSAN_PARALLEL_H_

#include <cstddef>
#include <functional>

namespace histsan {

// Number of worker threads used by ParallelFor. 0 selects the hardware
// concurrency. Results of every estimator are independent of this setting.
void SetNumThreads(int threads);
int NumThreads();

// Runs body(i) for every i in [0, count). Iterations must be independent;
// callers write results into per-index slots and reduce them in index order.
void ParallelFor(size_t count, const std::function<void(size_t)>& body);

}  // namespace histsan

#endif  // HISTSAN_PARALLEL_H_
