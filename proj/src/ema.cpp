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

#include "vipseval/ema.hpp"

#include <vector>

#include "vipseval/error.hpp"

namespace vipseval {

WeightMap ema(std::span<const WeightMap> snapshots, double decay) {
  if (snapshots.empty()) throw_usage("ema requires at least one snapshot");
  if (!(decay >= 0.0 && decay <= 1.0)) throw_usage("decay must lie in [0, 1], got ", decay);

  const WeightMap& first = snapshots.front();
  for (std::size_t i = 1; i < snapshots.size(); ++i) {
    const WeightMap& other = snapshots[i];
    auto a = first.tensors().begin();
    auto b = other.tensors().begin();
    for (; a != first.tensors().end() && b != other.tensors().end(); ++a, ++b) {
      if (a->first != b->first)
        throw_data("snapshot ", i, " tensor name mismatch: expected '", a->first, "', found '",
                   b->first, "'");
      if (a->second.shape != b->second.shape)
        throw_data("snapshot ", i, " shape mismatch for tensor '", a->first, "'");
    }
    if (a != first.tensors().end())
      throw_data("snapshot ", i, " is missing tensor '", a->first, "'");
    if (b != other.tensors().end())
      throw_data("snapshot ", i, " has unexpected tensor '", b->first, "'");
  }

  std::map<std::string, Tensor> result;
  for (const auto& [name, tensor] : first.tensors()) {
    std::vector<double> acc(tensor.data.begin(), tensor.data.end());
    for (std::size_t i = 1; i < snapshots.size(); ++i) {
      const Tensor& s = snapshots[i].tensors().at(name);
      for (std::size_t j = 0; j < acc.size(); ++j)
        acc[j] = decay * acc[j] + (1.0 - decay) * static_cast<double>(s.data[j]);
    }
    Tensor out;
    out.shape = tensor.shape;
    out.data.reserve(acc.size());
    for (double v : acc) out.data.push_back(static_cast<float>(v));
    result.emplace(name, std::move(out));
  }
  return WeightMap::create(std::move(result));
}

}  // namespace vipseval
