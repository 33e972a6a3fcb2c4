#include "lipc/image_io.hpp"

#include <png.h>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <memory>
#include <string>
#include <vector>

namespace lipc {

unsigned char to_byte(double v) {
  if (std::isnan(v)) return 0;
  return static_cast<unsigned char>(std::clamp(std::lround(v), 0L, 255L));
}

namespace {

struct FileCloser {
  void operator()(std::FILE* f) const {
    if (f) std::fclose(f);
  }
};
using FilePtr = std::unique_ptr<std::FILE, FileCloser>;

ColourImage from_bytes(std::size_t w, std::size_t h, const std::vector<unsigned char>& rgb,
                       const MixingModel& model) {
  std::vector<Colour> px(w * h);
  for (std::size_t i = 0; i < px.size(); ++i) {
    Colour c{{static_cast<double>(rgb[3 * i]), static_cast<double>(rgb[3 * i + 1]),
              static_cast<double>(rgb[3 * i + 2])}};
    px[i] = model.clamp_gamut(c);
  }
  return ColourImage(w, h, std::move(px));
}

std::vector<unsigned char> to_bytes(const ColourImage& img) {
  std::vector<unsigned char> rgb(img.size() * 3);
  for (std::size_t i = 0; i < img.size(); ++i)
    for (std::size_t c = 0; c < 3; ++c) rgb[3 * i + c] = to_byte(img[i][c]);
  return rgb;
}

// Next whitespace-delimited header token, skipping '#' comments.
std::string ppm_token(std::istream& is) {
  std::string tok;
  int ch;
  while ((ch = is.get()) != EOF) {
    if (ch == '#') {
      while ((ch = is.get()) != EOF && ch != '\n') {
      }
      continue;
    }
    if (std::isspace(ch)) {
      if (!tok.empty()) break;
      continue;
    }
    tok.push_back(static_cast<char>(ch));
  }
  return tok;
}

std::size_t parse_dim(const std::string& s, const char* what) {
  try {
    std::size_t pos = 0;
    const long v = std::stol(s, &pos);
    if (pos != s.size() || v <= 0) throw DataError("");
    return static_cast<std::size_t>(v);
  } catch (...) {
    throw DataError(std::string("PPM: bad ") + what + " '" + s + "'");
  }
}

bool has_png_signature(const std::filesystem::path& path) {
  std::ifstream is(path, std::ios::binary);
  unsigned char sig[8] = {};
  is.read(reinterpret_cast<char*>(sig), 8);
  return is.gcount() == 8 && png_sig_cmp(sig, 0, 8) == 0;
}

}  // namespace

ColourImage read_ppm(const std::filesystem::path& path, const MixingModel& model) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw DataError("cannot open " + path.string());
  if (ppm_token(is) != "P6") throw DataError("PPM: only binary P6 is supported");
  const std::size_t w = parse_dim(ppm_token(is), "width");
  const std::size_t h = parse_dim(ppm_token(is), "height");
  const std::size_t maxval = parse_dim(ppm_token(is), "maxval");
  if (maxval != 255) throw DataError("PPM: maxval must be 255, got " + std::to_string(maxval));
  std::vector<unsigned char> rgb(w * h * 3);
  is.read(reinterpret_cast<char*>(rgb.data()), static_cast<std::streamsize>(rgb.size()));
  if (static_cast<std::size_t>(is.gcount()) != rgb.size()) throw DataError("PPM: truncated pixel data");
  return from_bytes(w, h, rgb, model);
}

void write_ppm(const ColourImage& img, const std::filesystem::path& path) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw DataError("cannot write " + path.string());
  os << "P6\n" << img.width() << ' ' << img.height() << "\n255\n";
  const auto rgb = to_bytes(img);
  os.write(reinterpret_cast<const char*>(rgb.data()), static_cast<std::streamsize>(rgb.size()));
}

namespace {

// libpng's default handlers print to stderr; keep the message for the exception.
struct PngError {
  char msg[256] = "corrupt or truncated file";
};

[[noreturn]] void png_fail(png_structp png, png_const_charp msg) {
  if (auto* e = static_cast<PngError*>(png_get_error_ptr(png)))
    std::snprintf(e->msg, sizeof e->msg, "%s", msg);
  png_longjmp(png, 1);
}

void png_quiet(png_structp, png_const_charp) {}

}  // namespace

ColourImage read_png(const std::filesystem::path& path, const MixingModel& model) {
  FilePtr fp(std::fopen(path.string().c_str(), "rb"));
  if (!fp) throw DataError("cannot open " + path.string());
  PngError perr;
  png_structp png = png_create_read_struct(PNG_LIBPNG_VER_STRING, &perr, png_fail, png_quiet);
  png_infop info = png ? png_create_info_struct(png) : nullptr;
  if (!png || !info) {
    png_destroy_read_struct(&png, &info, nullptr);
    throw DataError("libpng initialisation failed");
  }
  // libpng reports errors by longjmp: every object with a destructor must
  // exist before setjmp.
  std::vector<unsigned char> rgb;
  std::vector<png_bytep> rows;
  std::size_t w = 0, h = 0;
  std::string error;
  if (setjmp(png_jmpbuf(png))) {
    png_destroy_read_struct(&png, &info, nullptr);
    throw DataError(std::string("PNG: ") + perr.msg + " (" + path.string() + ")");
  }
  png_init_io(png, fp.get());
  png_read_info(png, info);
  w = png_get_image_width(png, info);
  h = png_get_image_height(png, info);
  const int depth = png_get_bit_depth(png, info);
  const int type = png_get_color_type(png, info);
  if (depth != 8) error = "PNG: unsupported bit depth " + std::to_string(depth) + " (8-bit only)";
  else if (type != PNG_COLOR_TYPE_RGB) error = "PNG: only RGB colour type is supported";
  if (error.empty()) {
    if (png_get_interlace_type(png, info) != PNG_INTERLACE_NONE) png_set_interlace_handling(png);
    png_read_update_info(png, info);
    rgb.resize(w * h * 3);
    rows.resize(h);
    for (std::size_t y = 0; y < h; ++y) rows[y] = rgb.data() + y * w * 3;
    png_read_image(png, rows.data());
    png_read_end(png, nullptr);
  }
  png_destroy_read_struct(&png, &info, nullptr);
  if (!error.empty()) throw DataError(error);
  return from_bytes(w, h, rgb, model);
}

void write_png(const ColourImage& img, const std::filesystem::path& path) {
  FilePtr fp(std::fopen(path.string().c_str(), "wb"));
  if (!fp) throw DataError("cannot write " + path.string());
  const auto rgb = to_bytes(img);
  std::vector<png_bytep> rows(img.height());
  for (std::size_t y = 0; y < img.height(); ++y)
    rows[y] = const_cast<png_bytep>(rgb.data() + y * img.width() * 3);
  PngError perr;
  png_structp png = png_create_write_struct(PNG_LIBPNG_VER_STRING, &perr, png_fail, png_quiet);
  png_infop info = png ? png_create_info_struct(png) : nullptr;
  if (!png || !info) {
    png_destroy_write_struct(&png, &info);
    throw DataError("libpng initialisation failed");
  }
  if (setjmp(png_jmpbuf(png))) {
    png_destroy_write_struct(&png, &info);
    throw DataError(std::string("PNG: write failed: ") + perr.msg + " (" + path.string() + ")");
  }
  png_init_io(png, fp.get());
  png_set_IHDR(png, info, static_cast<png_uint_32>(img.width()),
               static_cast<png_uint_32>(img.height()), 8, PNG_COLOR_TYPE_RGB, PNG_INTERLACE_NONE,
               PNG_COMPRESSION_TYPE_DEFAULT, PNG_FILTER_TYPE_DEFAULT);
  png_write_info(png, info);
  png_write_image(png, rows.data());
  png_write_end(png, nullptr);
  png_destroy_write_struct(&png, &info);
}

ColourImage load_image(const std::filesystem::path& path, const MixingModel& model) {
  if (!std::filesystem::exists(path)) throw DataError("no such file: " + path.string());
  if (has_png_signature(path)) return read_png(path, model);
  std::ifstream is(path, std::ios::binary);
  char magic[2] = {};
  is.read(magic, 2);
  if (is.gcount() == 2 && magic[0] == 'P' && magic[1] == '6') return read_ppm(path, model);
  throw DataError("unsupported image format: " + path.string());
}

void save_image(const ColourImage& img, const std::filesystem::path& path) {
  std::string ext = path.extension().string();
  std::transform(ext.begin(), ext.end(), ext.begin(), [](unsigned char c) { return std::tolower(c); });
  if (ext == ".png")
    write_png(img, path);
  else
    write_ppm(img, path);
}

}  // namespace lipc
