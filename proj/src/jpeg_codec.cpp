// Copyright 2026 The degroup Authors
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

#include <cstdio>
#include <jpeglib.h>
#include <csetjmp>

#include <cstdlib>
#include <memory>
#include <string>
#include <vector>

#include "degroup/degrade.hpp"
#include "degroup/error.hpp"

namespace degroup {

namespace {

struct ErrorManager {
  jpeg_error_mgr pub;
  std::jmp_buf jump;
  char message[JMSG_LENGTH_MAX];
};

void on_error(j_common_ptr cinfo) {
  auto* err = reinterpret_cast<ErrorManager*>(cinfo->err);
  (*cinfo->err->format_message)(cinfo, err->message);
  std::longjmp(err->jump, 1);
}

}  // namespace

std::string jpeg_encoder_identity() {
#ifdef LIBJPEG_TURBO_VERSION
#define DEGROUP_STR2(x) #x
#define DEGROUP_STR(x) DEGROUP_STR2(x)
  return std::string("libjpeg-turbo ") + DEGROUP_STR(LIBJPEG_TURBO_VERSION) +
         " (jpeglib " + std::to_string(JPEG_LIB_VERSION) + ", baseline, islow DCT)";
#undef DEGROUP_STR
#undef DEGROUP_STR2
#else
  return "libjpeg " + std::to_string(JPEG_LIB_VERSION) + " (baseline, islow DCT)";
#endif
}

// setjmp/longjmp never crosses a frame holding non-trivial objects here: all
// buffers are owned by the caller frame that outlives both codec calls.
static bool encode(const unsigned char* pixels, int width, int height, int channels, int quality,
                   unsigned char** out, unsigned long* out_size, std::string& error) {
  jpeg_compress_struct cinfo{};
  ErrorManager jerr{};
  cinfo.err = jpeg_std_error(&jerr.pub);
  jerr.pub.error_exit = on_error;
  if (setjmp(jerr.jump)) {
    error = jerr.message;
    jpeg_destroy_compress(&cinfo);
    return false;
  }
  jpeg_create_compress(&cinfo);
  jpeg_mem_dest(&cinfo, out, out_size);
  cinfo.image_width = static_cast<JDIMENSION>(width);
  cinfo.image_height = static_cast<JDIMENSION>(height);
  cinfo.input_components = channels;
  cinfo.in_color_space = channels == 3 ? JCS_RGB : JCS_GRAYSCALE;
  jpeg_set_defaults(&cinfo);
  jpeg_set_quality(&cinfo, quality, TRUE);
  cinfo.dct_method = JDCT_ISLOW;
  cinfo.optimize_coding = FALSE;
  jpeg_start_compress(&cinfo, TRUE);
  const auto stride = static_cast<std::size_t>(width) * static_cast<std::size_t>(channels);
  while (cinfo.next_scanline < cinfo.image_height) {
    JSAMPROW row = const_cast<unsigned char*>(pixels + cinfo.next_scanline * stride);
    jpeg_write_scanlines(&cinfo, &row, 1);
  }
  jpeg_finish_compress(&cinfo);
  jpeg_destroy_compress(&cinfo);
  return true;
}

static bool decode(const unsigned char* data, unsigned long size, unsigned char* pixels,
                   int width, int height, int channels, std::string& error) {
  jpeg_decompress_struct dinfo{};
  ErrorManager jerr{};
  dinfo.err = jpeg_std_error(&jerr.pub);
  jerr.pub.error_exit = on_error;
  if (setjmp(jerr.jump)) {
    error = jerr.message;
    jpeg_destroy_decompress(&dinfo);
    return false;
  }
  jpeg_create_decompress(&dinfo);
  jpeg_mem_src(&dinfo, data, size);
  jpeg_read_header(&dinfo, TRUE);
  dinfo.out_color_space = channels == 3 ? JCS_RGB : JCS_GRAYSCALE;
  dinfo.dct_method = JDCT_ISLOW;
  dinfo.do_fancy_upsampling = TRUE;
  jpeg_start_decompress(&dinfo);
  if (static_cast<int>(dinfo.output_width) != width ||
      static_cast<int>(dinfo.output_height) != height ||
      dinfo.output_components != channels) {
    jpeg_destroy_decompress(&dinfo);
    error = "decoded JPEG geometry mismatch";
    return false;
  }
  const auto stride = static_cast<std::size_t>(width) * static_cast<std::size_t>(channels);
  while (dinfo.output_scanline < dinfo.output_height) {
    JSAMPROW row = pixels + dinfo.output_scanline * stride;
    jpeg_read_scanlines(&dinfo, &row, 1);
  }
  jpeg_finish_decompress(&dinfo);
  jpeg_destroy_decompress(&dinfo);
  return true;
}

Image jpeg_roundtrip(const Image& image, int quality) {
  if (quality < 1 || quality > 100) throw ValidationError("jpeg quality must be in [1, 100]");
  const auto bytes = to_bytes(image);
  unsigned char* encoded = nullptr;
  unsigned long encoded_size = 0;
  std::string error;
  const int w = static_cast<int>(image.width());
  const int h = static_cast<int>(image.height());
  const int c = static_cast<int>(image.channels());
  const bool ok = encode(bytes.data(), w, h, c, quality, &encoded, &encoded_size, error);
  std::unique_ptr<unsigned char, decltype(&std::free)> owned(encoded, &std::free);
  if (!ok) throw DataError("jpeg encode failed: " + error);
  std::vector<unsigned char> decoded(bytes.size());
  if (!decode(encoded, encoded_size, decoded.data(), w, h, c, error)) {
    throw DataError("jpeg decode failed: " + error);
  }
  return from_bytes(image.height(), image.width(), image.channels(), decoded);
}

}  // namespace degroup
