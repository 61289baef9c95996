// Copyright 2026 The tcpalign Authors.
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

#ifndef TCPALIGN_PARALLEL_HPP_
#define TCPALIGN_PARALLEL_HPP_

#include <exception>
#include <vector>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace tcpalign {

/// Thread count for a `workers` request; 0 means the OpenMP default.
inline int worker_count(int requested) {
#ifdef _OPENMP
  return requested > 0 ? requested : omp_get_max_threads();
#else
  (void)requested;
  return 1;
#endif
}

/// Runs body(i) for i in [0, n) on `workers` threads. Iterations must write
/// only to their own slots. If iterations throw, the exception of the lowest
/// failing index is rethrown after the loop, whatever the thread count.
template <typename Body>
void parallel_for(int n, int workers, Body&& body) {
  std::vector<std::exception_ptr> errors(n > 0 ? n : 0);
#ifdef _OPENMP
#pragma omp parallel for schedule(dynamic) num_threads(worker_count(workers))
#endif
  for (int i = 0; i < n; ++i) {
    try {
      body(i);
    } catch (...) {
      errors[i] = std::current_exception();
    }
  }
  (void)workers;
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);
}

}  // namespace tcpalign

#endif  // TCPALIGN_PARALLEL_HPP_
