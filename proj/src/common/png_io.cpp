#include "dgcan/common/png_io.hpp"

#include <png.h>

#include <cmath>
#include <cstdio>
#include <memory>
#include <stdexcept>

namespace dgcan {
namespace {

struct FileCloser {
  void operator()(std::FILE* f) const {
    if (f) std::fclose(f);
  }
};
using FilePtr = std::unique_ptr<std::FILE, FileCloser>;

[[noreturn]] void fail(const std::string& what, const std::string& path) {
  throw std::runtime_error(what + ": " + path);
}

void write_png(const std::string& path, int width, int height, int bit_depth,
               int color_type, const std::vector<png_bytep>& rows) {
  FilePtr fp(std::fopen(path.c_str(), "wb"));
  if (!fp) fail("cannot open for writing", path);
  png_structp png = png_create_write_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
  png_infop info = png_create_info_struct(png);
  if (!png || !info) fail("png alloc failed", path);
  if (setjmp(png_jmpbuf(png))) {
    png_destroy_write_struct(&png, &info);
    fail("png write failed", path);
  }
  png_init_io(png, fp.get());
  png_set_IHDR(png, info, width, height, bit_depth, color_type,
               PNG_INTERLACE_NONE, PNG_COMPRESSION_TYPE_DEFAULT, PNG_FILTER_TYPE_DEFAULT);
  png_write_info(png, info);
  if (bit_depth == 16) png_set_swap(png);  // buffers are little-endian
  png_write_image(png, const_cast<png_bytep*>(rows.data()));
  png_write_end(png, nullptr);
  png_destroy_write_struct(&png, &info);
}

struct PngReader {
  png_structp png = nullptr;
  png_infop info = nullptr;
  FilePtr fp;
  ~PngReader() {
    if (png) png_destroy_read_struct(&png, &info, nullptr);
  }
};

void open_png(PngReader& r, const std::string& path) {
  r.fp.reset(std::fopen(path.c_str(), "rb"));
  if (!r.fp) fail("cannot open for reading", path);
  r.png = png_create_read_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
  r.info = png_create_info_struct(r.png);
  if (!r.png || !r.info) fail("png alloc failed", path);
  if (setjmp(png_jmpbuf(r.png))) fail("png read failed", path);
  png_init_io(r.png, r.fp.get());
  png_read_info(r.png, r.info);
}

}  // namespace

void write_color_png(const std::string& path, const ColorImage& img) {
  if (img.channels() != 3) throw std::invalid_argument("write_color_png: need 3 channels");
  std::vector<png_bytep> rows(img.height());
  for (int y = 0; y < img.height(); ++y)
    rows[y] = const_cast<png_bytep>(&img(y, 0, 0));
  write_png(path, img.width(), img.height(), 8, PNG_COLOR_TYPE_RGB, rows);
}

ColorImage read_color_png(const std::string& path) {
  PngReader r;
  open_png(r, path);
  if (setjmp(png_jmpbuf(r.png))) fail("png read failed", path);
  const int width = png_get_image_width(r.png, r.info);
  const int height = png_get_image_height(r.png, r.info);
  if (png_get_bit_depth(r.png, r.info) != 8 ||
      png_get_color_type(r.png, r.info) != PNG_COLOR_TYPE_RGB)
    fail("expected 8-bit RGB png", path);
  ColorImage img(height, width, 3);
  std::vector<png_bytep> rows(height);
  for (int y = 0; y < height; ++y) rows[y] = &img(y, 0, 0);
  png_read_image(r.png, rows.data());
  return img;
}

void write_depth_png(const std::string& path, const DepthImage& depth) {
  if (depth.channels() != 1) throw std::invalid_argument("write_depth_png: need 1 channel");
  Image<std::uint16_t> mm(depth.height(), depth.width());
  for (int y = 0; y < depth.height(); ++y)
    for (int x = 0; x < depth.width(); ++x) {
      const double v = depth(y, x) * 1000.0;
      mm(y, x) = static_cast<std::uint16_t>(std::lround(std::clamp(v, 0.0, 65535.0)));
    }
  std::vector<png_bytep> rows(mm.height());
  for (int y = 0; y < mm.height(); ++y)
    rows[y] = reinterpret_cast<png_bytep>(&mm(y, 0));
  write_png(path, mm.width(), mm.height(), 16, PNG_COLOR_TYPE_GRAY, rows);
}

DepthImage read_depth_png(const std::string& path) {
  PngReader r;
  open_png(r, path);
  if (setjmp(png_jmpbuf(r.png))) fail("png read failed", path);
  const int width = png_get_image_width(r.png, r.info);
  const int height = png_get_image_height(r.png, r.info);
  if (png_get_bit_depth(r.png, r.info) != 16 ||
      png_get_color_type(r.png, r.info) != PNG_COLOR_TYPE_GRAY)
    fail("expected 16-bit gray png", path);
  png_set_swap(r.png);
  Image<std::uint16_t> mm(height, width);
  std::vector<png_bytep> rows(height);
  for (int y = 0; y < height; ++y) rows[y] = reinterpret_cast<png_bytep>(&mm(y, 0));
  png_read_image(r.png, rows.data());
  DepthImage depth(height, width);
  for (int y = 0; y < height; ++y)
    for (int x = 0; x < width; ++x) depth(y, x) = mm(y, x) / 1000.0;
  return depth;
}

}  // namespace dgcan
