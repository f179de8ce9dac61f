// Copyright 2026 The Vipseval Authors.
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

#ifndef VIPSEVAL_THREADING_HPP
#define VIPSEVAL_THREADING_HPP

#include <cstddef>
#include <functional>

namespace vipseval {

// Resolves a requested worker count. `requested <= 0` means "auto": the
// VIPSEVAL_THREADS environment variable if set, otherwise the hardware
// concurrency. The result is always >= 1.
int resolve_threads(int requested);

// Runs fn(i) for i in [0, count) on up to `threads` workers. Tasks must
// write their results into caller-owned slots indexed by i; callers then
// reduce the slots in index order, which keeps every reduction independent
// of the worker count and of scheduling. Exceptions thrown by tasks are
// captured and the first one (lowest index) is rethrown after all workers
// finish.
void parallel_for(std::size_t count, int threads,
                  const std::function<void(std::size_t)>& fn);

// Compensated (Kahan) accumulator. Merging two accumulators in a fixed
// order is itself deterministic, so per-task partial sums reduced in index
// order give bit-identical totals for any worker count.
struct KahanSum {
  double sum = 0.0;
  double carry = 0.0;

  void add(double value) {
    double y = value - carry;
    double t = sum + y;
    carry = (t - sum) - y;
    sum = t;
  }

  void merge(const KahanSum& other) {
    add(other.sum);
    add(-other.carry);
  }

  double value() const { return sum; }
};

}  // namespace vipseval

#endif  // VIPSEVAL_THREADING_HPP
