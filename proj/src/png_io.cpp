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

#include "png_io.hpp"

#include <png.h>

#include <cstdio>
#include <memory>

#include "vipseval/error.hpp"

namespace vipseval::pngio {

namespace {

struct FileCloser {
  void operator()(std::FILE* f) const {
    if (f) std::fclose(f);
  }
};
using FilePtr = std::unique_ptr<std::FILE, FileCloser>;

// libpng reports errors through longjmp; translate to exceptions outside
// the setjmp scope.
void error_fn(png_structp png, png_const_charp msg) {
  auto* out = static_cast<std::string*>(png_get_error_ptr(png));
  if (out && out->empty()) *out = msg;
  png_longjmp(png, 1);
}

void warning_fn(png_structp, png_const_charp) {}

}  // namespace

Rgb8Image read_rgb8(const std::filesystem::path& path) {
  FilePtr file(std::fopen(path.c_str(), "rb"));
  if (!file) throw_io("cannot open '", path.string(), "' for reading");

  std::string libpng_error;
  png_structp png = png_create_read_struct(PNG_LIBPNG_VER_STRING, &libpng_error, error_fn,
                                           warning_fn);
  if (!png) throw_internal("png_create_read_struct failed");
  png_infop info = png_create_info_struct(png);
  if (!info) {
    png_destroy_read_struct(&png, nullptr, nullptr);
    throw_internal("png_create_info_struct failed");
  }

  Rgb8Image image;
  std::vector<png_bytep> rows;
  if (setjmp(png_jmpbuf(png))) {
    png_destroy_read_struct(&png, &info, nullptr);
    throw_io("malformed PNG '", path.string(), "': ",
             libpng_error.empty() ? "decode error" : libpng_error);
  }

  png_init_io(png, file.get());
  png_read_info(png, info);

  const png_uint_32 width = png_get_image_width(png, info);
  const png_uint_32 height = png_get_image_height(png, info);
  const int bit_depth = png_get_bit_depth(png, info);
  const int color_type = png_get_color_type(png, info);
  if (bit_depth != 8 || color_type != PNG_COLOR_TYPE_RGB) {
    png_destroy_read_struct(&png, &info, nullptr);
    throw_io("'", path.string(), "' is not an 8-bit RGB PNG (bit depth ", bit_depth,
             ", color type ", color_type, ")");
  }

  image.height = static_cast<int>(height);
  image.width = static_cast<int>(width);
  image.pixels.resize(static_cast<std::size_t>(height) * width * 3);
  rows.resize(height);
  for (png_uint_32 y = 0; y < height; ++y)
    rows[y] = image.pixels.data() + static_cast<std::size_t>(y) * width * 3;
  png_read_image(png, rows.data());
  png_read_end(png, nullptr);
  png_destroy_read_struct(&png, &info, nullptr);
  return image;
}

void write_rgb8(const Rgb8Image& image, const std::filesystem::path& path) {
  if (image.height < 1 || image.width < 1 ||
      image.pixels.size() != static_cast<std::size_t>(image.height) * image.width * 3)
    throw_internal("write_rgb8: inconsistent image buffer");

  FilePtr file(std::fopen(path.c_str(), "wb"));
  if (!file) throw_io("cannot open '", path.string(), "' for writing");

  std::string libpng_error;
  png_structp png = png_create_write_struct(PNG_LIBPNG_VER_STRING, &libpng_error, error_fn,
                                            warning_fn);
  if (!png) throw_internal("png_create_write_struct failed");
  png_infop info = png_create_info_struct(png);
  if (!info) {
    png_destroy_write_struct(&png, nullptr);
    throw_internal("png_create_info_struct failed");
  }

  std::vector<png_bytep> rows(image.height);
  if (setjmp(png_jmpbuf(png))) {
    png_destroy_write_struct(&png, &info);
    throw_io("failed writing PNG '", path.string(), "': ",
             libpng_error.empty() ? "encode error" : libpng_error);
  }

  png_init_io(png, file.get());
  png_set_IHDR(png, info, static_cast<png_uint_32>(image.width),
               static_cast<png_uint_32>(image.height), 8, PNG_COLOR_TYPE_RGB,
               PNG_INTERLACE_NONE, PNG_COMPRESSION_TYPE_DEFAULT, PNG_FILTER_TYPE_DEFAULT);
  png_write_info(png, info);
  for (int y = 0; y < image.height; ++y)
    rows[y] = const_cast<png_bytep>(image.pixels.data()) +
              static_cast<std::size_t>(y) * image.width * 3;
  png_write_image(png, rows.data());
  png_write_end(png, info);
  png_destroy_write_struct(&png, &info);
}

}  // namespace vipseval::pngio
