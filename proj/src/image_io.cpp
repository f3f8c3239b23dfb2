// Copyright 2026 The segvote Authors
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


#include <png.h>

#include <algorithm>
#include <cmath>
#include <csetjmp>
#include <cctype>
#include <cstdio>
#include <fstream>
#include <memory>
#include <string>

#include "segvote/error.hpp"
#include "segvote/mask.hpp"

namespace segvote {

namespace {

struct FileCloser {
  void operator()(std::FILE* f) const {
    if (f != nullptr) std::fclose(f);
  }
};
using FilePtr = std::unique_ptr<std::FILE, FileCloser>;

FilePtr open_file(const std::filesystem::path& path, const char* mode) {
  FilePtr f(std::fopen(path.c_str(), mode));
  if (!f) {
    throw Error(std::string("cannot open '") + path.string() + "' for " +
                (mode[0] == 'r' ? "reading" : "writing"));
  }
  return f;
}

// Decoded raster straight from the file: 8- or 16-bit samples, big-endian
// pairs for 16-bit, channel-interleaved.
struct RawRaster {
  std::uint32_t width = 0;
  std::uint32_t height = 0;
  int channels = 0;
  int bit_depth = 0;
  int color_type = 0;
  std::vector<std::uint8_t> bytes;
};

struct PngSession {
  png_structp png = nullptr;
  png_infop info = nullptr;
  std::string message;
  std::vector<png_bytep> rows;
};

void on_png_error(png_structp png, png_const_charp msg) {
  auto* session = static_cast<PngSession*>(png_get_error_ptr(png));
  session->message = msg;
  png_longjmp(png, 1);
}

void on_png_warning(png_structp, png_const_charp) {}

enum class PngPurpose { kMask, kImage };

// All state touched after setjmp lives behind references, never in locals of
// this frame, so a longjmp leaves it well-defined.
bool decode_png(std::FILE* fp, PngPurpose purpose, PngSession& s, RawRaster& out) {
  if (setjmp(png_jmpbuf(s.png))) return false;
  png_init_io(s.png, fp);
  png_read_info(s.png, s.info);
  out.width = png_get_image_width(s.png, s.info);
  out.height = png_get_image_height(s.png, s.info);
  out.bit_depth = png_get_bit_depth(s.png, s.info);
  out.color_type = png_get_color_type(s.png, s.info);
  if (purpose == PngPurpose::kMask) {
    if (out.color_type != PNG_COLOR_TYPE_GRAY) {
      s.message = "mask must be single-channel";
      return false;
    }
    if (out.bit_depth != 8) {
      s.message = "mask must be 8-bit, got " + std::to_string(out.bit_depth) + "-bit";
      return false;
    }
  } else {
    if (out.color_type & PNG_COLOR_MASK_ALPHA) {
      s.message = "images with an alpha channel are not supported";
      return false;
    }
    if (out.color_type == PNG_COLOR_TYPE_PALETTE) {
      png_set_palette_to_rgb(s.png);
      out.bit_depth = 8;
    }
    if (out.color_type == PNG_COLOR_TYPE_GRAY && out.bit_depth < 8) {
      png_set_expand_gray_1_2_4_to_8(s.png);
      out.bit_depth = 8;
    }
  }
  png_read_update_info(s.png, s.info);
  out.channels = png_get_channels(s.png, s.info);
  const std::size_t rowbytes = png_get_rowbytes(s.png, s.info);
  out.bytes.resize(rowbytes * out.height);
  s.rows.resize(out.height);
  for (std::uint32_t y = 0; y < out.height; ++y) s.rows[y] = out.bytes.data() + y * rowbytes;
  png_read_image(s.png, s.rows.data());
  png_read_end(s.png, nullptr);
  return true;
}

RawRaster read_png(const std::filesystem::path& path, PngPurpose purpose) {
  auto fp = open_file(path, "rb");
  png_byte sig[8] = {};
  if (std::fread(sig, 1, 8, fp.get()) != 8 || png_sig_cmp(sig, 0, 8) != 0) {
    throw Error("'" + path.string() + "' is not a PNG file");
  }
  PngSession s;
  s.png = png_create_read_struct(PNG_LIBPNG_VER_STRING, &s, on_png_error, on_png_warning);
  if (s.png == nullptr) throw Error("libpng initialisation failed");
  s.info = png_create_info_struct(s.png);
  if (s.info == nullptr) {
    png_destroy_read_struct(&s.png, nullptr, nullptr);
    throw Error("libpng initialisation failed");
  }
  png_set_sig_bytes(s.png, 8);
  RawRaster raster;
  const bool ok = decode_png(fp.get(), purpose, s, raster);
  png_destroy_read_struct(&s.png, &s.info, nullptr);
  if (!ok) throw Error("'" + path.string() + "': " + s.message);
  if (raster.width == 0 || raster.height == 0) {
    throw Error("'" + path.string() + "': zero-size image");
  }
  return raster;
}

bool encode_png(std::FILE* fp, PngSession& s, const RawRaster& in) {
  if (setjmp(png_jmpbuf(s.png))) return false;
  png_init_io(s.png, fp);
  png_set_IHDR(s.png, s.info, in.width, in.height, in.bit_depth, in.color_type,
               PNG_INTERLACE_NONE, PNG_COMPRESSION_TYPE_DEFAULT, PNG_FILTER_TYPE_DEFAULT);
  png_write_info(s.png, s.info);
  const std::size_t rowbytes =
      static_cast<std::size_t>(in.width) * in.channels * (in.bit_depth / 8);
  for (std::uint32_t y = 0; y < in.height; ++y) {
    png_write_row(s.png, in.bytes.data() + y * rowbytes);
  }
  png_write_end(s.png, nullptr);
  return true;
}

void write_png(const std::filesystem::path& path, const RawRaster& raster) {
  auto fp = open_file(path, "wb");
  PngSession s;
  s.png = png_create_write_struct(PNG_LIBPNG_VER_STRING, &s, on_png_error, on_png_warning);
  if (s.png == nullptr) throw Error("libpng initialisation failed");
  s.info = png_create_info_struct(s.png);
  if (s.info == nullptr) {
    png_destroy_write_struct(&s.png, nullptr);
    throw Error("libpng initialisation failed");
  }
  const bool ok = encode_png(fp.get(), s, raster);
  png_destroy_write_struct(&s.png, &s.info);
  if (!ok) throw Error("'" + path.string() + "': " + s.message);
  if (std::fflush(fp.get()) != 0) throw Error("'" + path.string() + "': write failed");
}

// Binary PNM (P5 gray, P6 RGB). Header tokens may be separated by comments.
RawRaster read_pnm(const std::filesystem::path& path, std::uint32_t& maxval) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open '" + path.string() + "' for reading");
  auto token = [&]() {
    std::string t;
    char c = 0;
    while (in.get(c)) {
      if (c == '#') {
        std::string skip;
        std::getline(in, skip);
        continue;
      }
      if (std::isspace(static_cast<unsigned char>(c))) {
        if (!t.empty()) break;
        continue;
      }
      t.push_back(c);
    }
    return t;
  };
  const std::string magic = token();
  RawRaster r;
  if (magic == "P5") {
    r.channels = 1;
  } else if (magic == "P6") {
    r.channels = 3;
  } else {
    throw Error("'" + path.string() + "': unsupported image format");
  }
  try {
    r.width = static_cast<std::uint32_t>(std::stoul(token()));
    r.height = static_cast<std::uint32_t>(std::stoul(token()));
    maxval = static_cast<std::uint32_t>(std::stoul(token()));
  } catch (const std::exception&) {
    throw Error("'" + path.string() + "': corrupt PNM header");
  }
  if (r.width == 0 || r.height == 0) throw Error("'" + path.string() + "': zero-size image");
  if (maxval == 0 || maxval > 65535) throw Error("'" + path.string() + "': bad PNM maxval");
  r.bit_depth = maxval > 255 ? 16 : 8;
  r.bytes.resize(static_cast<std::size_t>(r.width) * r.height * r.channels * (r.bit_depth / 8));
  in.read(reinterpret_cast<char*>(r.bytes.data()), static_cast<std::streamsize>(r.bytes.size()));
  if (static_cast<std::size_t>(in.gcount()) != r.bytes.size()) {
    throw Error("'" + path.string() + "': truncated PNM data");
  }
  return r;
}

bool has_png_signature(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open '" + path.string() + "' for reading");
  unsigned char sig[8] = {};
  in.read(reinterpret_cast<char*>(sig), 8);
  return in.gcount() == 8 && png_sig_cmp(sig, 0, 8) == 0;
}

}  // namespace

LabelMask load_mask(const std::filesystem::path& path, std::optional<int> num_classes) {
  RawRaster r = read_png(path, PngPurpose::kMask);
  const int k = num_classes.value_or(infer_num_classes(r.bytes));
  return LabelMask(static_cast<int>(r.width), static_cast<int>(r.height), std::move(r.bytes), k);
}

void save_mask(const LabelMask& mask, const std::filesystem::path& path) {
  RawRaster r;
  r.width = static_cast<std::uint32_t>(mask.width());
  r.height = static_cast<std::uint32_t>(mask.height());
  r.channels = 1;
  r.bit_depth = 8;
  r.color_type = PNG_COLOR_TYPE_GRAY;
  r.bytes.assign(mask.labels().begin(), mask.labels().end());
  write_png(path, r);
}

ImageBuffer load_image(const std::filesystem::path& path) {
  RawRaster r;
  double maxval = 0;
  if (has_png_signature(path)) {
    r = read_png(path, PngPurpose::kImage);
    maxval = r.bit_depth == 16 ? 65535.0 : 255.0;
  } else {
    std::uint32_t pnm_max = 0;
    r = read_pnm(path, pnm_max);
    maxval = pnm_max;
  }
  const std::size_t n = static_cast<std::size_t>(r.width) * r.height * r.channels;
  std::vector<double> samples(n);
  for (std::size_t i = 0; i < n; ++i) {
    const std::uint32_t code =
        r.bit_depth == 16 ? (static_cast<std::uint32_t>(r.bytes[2 * i]) << 8) | r.bytes[2 * i + 1]
                          : r.bytes[i];
    samples[i] = std::min(1.0, code / maxval);
  }
  return ImageBuffer(static_cast<int>(r.width), static_cast<int>(r.height), r.channels,
                     std::move(samples));
}

void save_image(const ImageBuffer& image, const std::filesystem::path& path, int bit_depth) {
  if (bit_depth != 8 && bit_depth != 16) {
    throw Error("bit depth must be 8 or 16, got " + std::to_string(bit_depth));
  }
  RawRaster r;
  r.width = static_cast<std::uint32_t>(image.width());
  r.height = static_cast<std::uint32_t>(image.height());
  r.channels = image.channels();
  r.bit_depth = bit_depth;
  r.color_type = image.channels() == 1 ? PNG_COLOR_TYPE_GRAY : PNG_COLOR_TYPE_RGB;
  const double maxval = bit_depth == 16 ? 65535.0 : 255.0;
  const auto samples = image.samples();
  r.bytes.reserve(samples.size() * (bit_depth / 8));
  for (double s : samples) {
    const auto code = static_cast<std::uint32_t>(std::lround(s * maxval));
    if (bit_depth == 16) r.bytes.push_back(static_cast<std::uint8_t>(code >> 8));
    r.bytes.push_back(static_cast<std::uint8_t>(code & 0xff));
  }

  if (path.extension() == ".png") {
    write_png(path, r);
    return;
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot open '" + path.string() + "' for writing");
  out << (r.channels == 1 ? "P5" : "P6") << '\n'
      << r.width << ' ' << r.height << '\n'
      << static_cast<int>(maxval) << '\n';
  out.write(reinterpret_cast<const char*>(r.bytes.data()),
            static_cast<std::streamsize>(r.bytes.size()));
  if (!out) throw Error("'" + path.string() + "': write failed");
}

}  // namespace segvote
