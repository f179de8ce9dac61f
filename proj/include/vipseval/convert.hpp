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

#ifndef VIPSEVAL_CONVERT_HPP
#define VIPSEVAL_CONVERT_HPP

#include "vipseval/core.hpp"

namespace vipseval {

// Collapses every segment to its category: pixels of segment m become
// segments[m].category_id, void stays void. Frame count and dimensions are
// preserved, as are per-category pixel counts.
SemanticSequence to_semantic(const VideoPanopticSequence& seq, const CategoryTable& cats);

// Keeps thing segments with their original track ids and categories; every
// stuff pixel becomes void. The instance map contains exactly the thing
// segments of the input.
InstanceSequence to_instance(const VideoPanopticSequence& seq, const CategoryTable& cats);

}  // namespace vipseval

#endif  // VIPSEVAL_CONVERT_HPP
