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

#ifndef VIPSEVAL_EMA_HPP
#define VIPSEVAL_EMA_HPP

#include <span>

#include "vipseval/dataset_io.hpp"

namespace vipseval {

// Exponential moving average over an ordered stream of weight snapshots:
// w = s_0, then w = decay * w + (1 - decay) * s_i for each later snapshot,
// elementwise. Snapshots must share tensor names and shapes. Accumulation
// runs in 64-bit floats; the result is cast back to 32-bit.
WeightMap ema(std::span<const WeightMap> snapshots, double decay);

}  // namespace vipseval

#endif  // VIPSEVAL_EMA_HPP
