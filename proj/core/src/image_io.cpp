#include <png.h>

#include <cmath>
#include <csetjmp>
#include <cstdio>
#include <memory>
#include <string>
#include <vector>

#include "freqwarm/error.hpp"
#include "freqwarm/tensor_io.hpp"

namespace freqwarm::io {
namespace {

struct FileCloser {
  void operator()(std::FILE* f) const { std::fclose(f); }
};
using File = std::unique_ptr<std::FILE, FileCloser>;

void on_png_error(png_structp png, png_const_charp) { longjmp(png_jmpbuf(png), 1); }
void on_png_warning(png_structp, png_const_charp) {}

}  // namespace

std::uint8_t quantize_pixel(double v) {
  const double scaled = std::round((v + 1.0) * 127.5);
  if (!(scaled > 0.0)) return 0;  // also maps NaN to 0
  if (scaled >= 255.0) return 255;
  return static_cast<std::uint8_t>(scaled);
}

Tensor3 load_image(const std::filesystem::path& path) {
  require(std::filesystem::exists(path), ErrorKind::kMissingPath, "no such image: " + path.string());
  File file(std::fopen(path.c_str(), "rb"));
  require(file != nullptr, ErrorKind::kIo, "cannot open image: " + path.string());

  png_byte signature[8] = {};
  const bool has_signature = std::fread(signature, 1, 8, file.get()) == 8 &&
                             png_sig_cmp(signature, 0, 8) == 0;
  require(has_signature, ErrorKind::kFormat, "unreadable image (not a PNG): " + path.string());

  png_structp png = png_create_read_struct(PNG_LIBPNG_VER_STRING, nullptr, on_png_error,
                                           on_png_warning);
  png_infop info = png ? png_create_info_struct(png) : nullptr;
  require(png != nullptr && info != nullptr, ErrorKind::kIo, "libpng initialisation failed");

  // Everything touched after setjmp lives outside the jump scope.
  std::vector<png_byte> pixels;
  std::vector<png_bytep> rows;
  png_uint_32 width = 0, height = 0;
  int bit_depth = 0, color_type = 0;
  std::string problem;
  ErrorKind problem_kind = ErrorKind::kFormat;

  if (setjmp(png_jmpbuf(png))) {
    png_destroy_read_struct(&png, &info, nullptr);
    fail(ErrorKind::kFormat, "corrupt PNG data: " + path.string());
  }
  png_init_io(png, file.get());
  png_set_sig_bytes(png, 8);
  png_read_info(png, info);
  png_get_IHDR(png, info, &width, &height, &bit_depth, &color_type, nullptr, nullptr, nullptr);

  if (color_type != PNG_COLOR_TYPE_RGB) {
    problem = "non-RGB layout (PNG color type " + std::to_string(color_type) + "): " + path.string();
  } else if (bit_depth != 8) {
    problem = "unsupported bit depth " + std::to_string(bit_depth) + ": " + path.string();
  } else {
    pixels.resize(static_cast<std::size_t>(width) * height * 3);
    rows.resize(height);
    for (png_uint_32 y = 0; y < height; ++y) rows[y] = pixels.data() + std::size_t{y} * width * 3;
    png_read_image(png, rows.data());
    png_read_end(png, nullptr);
  }
  png_destroy_read_struct(&png, &info, nullptr);
  if (!problem.empty()) fail(problem_kind, problem);

  Tensor3 x(3, height, width);
  for (std::size_t y = 0; y < height; ++y) {
    for (std::size_t col = 0; col < width; ++col) {
      for (std::size_t c = 0; c < 3; ++c) {
        x.at(c, y, col) = dequantize_pixel(pixels[(y * width + col) * 3 + c]);
      }
    }
  }
  return x;
}

void save_image(const Tensor3& x, const std::filesystem::path& path) {
  require(x.channels == 3, ErrorKind::kInvalidArgument, "save_image: expected 3 channels");
  require(x.height > 0 && x.width > 0, ErrorKind::kInvalidArgument, "save_image: empty image");
  std::vector<png_byte> pixels(x.height * x.width * 3);
  for (std::size_t y = 0; y < x.height; ++y) {
    for (std::size_t col = 0; col < x.width; ++col) {
      for (std::size_t c = 0; c < 3; ++c) {
        pixels[(y * x.width + col) * 3 + c] = quantize_pixel(x.at(c, y, col));
      }
    }
  }
  std::vector<png_bytep> rows(x.height);
  for (std::size_t y = 0; y < x.height; ++y) rows[y] = pixels.data() + y * x.width * 3;

  File file(std::fopen(path.c_str(), "wb"));
  require(file != nullptr, ErrorKind::kIo, "cannot open for writing: " + path.string());
  png_structp png = png_create_write_struct(PNG_LIBPNG_VER_STRING, nullptr, on_png_error,
                                            on_png_warning);
  png_infop info = png ? png_create_info_struct(png) : nullptr;
  require(png != nullptr && info != nullptr, ErrorKind::kIo, "libpng initialisation failed");
  if (setjmp(png_jmpbuf(png))) {
    png_destroy_write_struct(&png, &info);
    fail(ErrorKind::kIo, "PNG write failed: " + path.string());
  }
  png_init_io(png, file.get());
  png_set_IHDR(png, info, static_cast<png_uint_32>(x.width), static_cast<png_uint_32>(x.height), 8,
               PNG_COLOR_TYPE_RGB, PNG_INTERLACE_NONE, PNG_COMPRESSION_TYPE_DEFAULT,
               PNG_FILTER_TYPE_DEFAULT);
  png_write_info(png, info);
  png_write_image(png, rows.data());
  png_write_end(png, nullptr);
  png_destroy_write_struct(&png, &info);
}

}  // namespace freqwarm::io
