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

#ifndef VIPSEVAL_PNG_IO_HPP
#define VIPSEVAL_PNG_IO_HPP

#include <cstdint>
#include <filesystem>
#include <vector>

namespace vipseval::pngio {

struct Rgb8Image {
  int height = 0;
  int width = 0;
  std::vector<std::uint8_t> pixels;  // row-major RGB triplets
};

// Strict 8-bit RGB decode; anything else (palette, gray, 16-bit, alpha) is
// rejected so segment-id rasters cannot be silently reinterpreted.
Rgb8Image read_rgb8(const std::filesystem::path& path);
void write_rgb8(const Rgb8Image& image, const std::filesystem::path& path);

}  // namespace vipseval::pngio

#endif  // VIPSEVAL_PNG_IO_HPP
