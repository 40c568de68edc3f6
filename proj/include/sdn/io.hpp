#pragma once

#include <png.h>

#include <bit>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <variant>

#include "sdn/grid.hpp"

namespace sdn {

struct IoError : Error {
  using Error::Error;
};
struct FormatError : Error {
  using Error::Error;
};
struct ParseError : Error {
  size_t offset;
  ParseError(const std::string& msg, size_t off)
      : Error(msg + " (byte offset " + std::to_string(off) + ")"), offset(off) {}
};

namespace detail {

inline std::vector<char> read_file(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw IoError("cannot open " + path);
  std::vector<char> bytes((std::istreambuf_iterator<char>(f)), std::istreambuf_iterator<char>());
  return bytes;
}

struct PfmCursor {
  const std::vector<char>& bytes;
  size_t pos = 0;

  char peek() const { return pos < bytes.size() ? bytes[pos] : '\0'; }
  bool eof() const { return pos >= bytes.size(); }
  void skip_ws() {
    while (!eof() && std::isspace(static_cast<unsigned char>(bytes[pos]))) ++pos;
  }
  std::string token() {
    skip_ws();
    const size_t start = pos;
    while (!eof() && !std::isspace(static_cast<unsigned char>(bytes[pos]))) ++pos;
    if (pos == start) throw ParseError("unexpected end of header", start);
    return std::string(bytes.begin() + start, bytes.begin() + pos);
  }
};

inline float swap_float(float x) {
  std::uint32_t bits;
  std::memcpy(&bits, &x, 4);
  bits = ((bits & 0xff000000u) >> 24) | ((bits & 0x00ff0000u) >> 8) | ((bits & 0x0000ff00u) << 8) |
         ((bits & 0x000000ffu) << 24);
  std::memcpy(&x, &bits, 4);
  return x;
}

}  // namespace detail

struct PfmImage {
  int width = 0;
  int height = 0;
  int channels = 1;
  std::vector<float> data;  // row-major, top row first after loading
};

// Portable float map. Header: "Pf" (1 channel) or "PF" (3 channels), a
// dimensions line, a scale line whose sign encodes endianness, then raw
// 32-bit floats stored bottom row first.
inline PfmImage read_pfm_image(const std::string& path) {
  const std::vector<char> bytes = detail::read_file(path);
  if (bytes.size() < 2 || bytes[0] != 'P') throw ParseError("not a PFM file (expected 'P')", 0);
  int channels;
  if (bytes[1] == 'f') channels = 1;
  else if (bytes[1] == 'F') channels = 3;
  else throw ParseError("bad PFM type letter", 1);

  detail::PfmCursor cur{bytes, 2};
  PfmImage img;
  img.channels = channels;
  const size_t dim_off = cur.pos;
  try {
    img.width = std::stoi(cur.token());
    img.height = std::stoi(cur.token());
  } catch (const ParseError&) {
    throw;
  } catch (const std::exception&) {
    throw ParseError("bad PFM dimensions", dim_off);
  }
  if (img.width <= 0 || img.height <= 0) throw ParseError("bad PFM dimensions", dim_off);
  const size_t scale_off = cur.pos;
  double scale;
  try {
    scale = std::stod(cur.token());
  } catch (const std::exception&) {
    throw ParseError("bad PFM scale", scale_off);
  }
  if (scale == 0.0) throw ParseError("PFM scale must be nonzero", scale_off);
  if (cur.eof()) throw ParseError("missing PFM payload", cur.pos);
  ++cur.pos;  // single whitespace byte terminates the header

  const size_t need = size_t(img.width) * img.height * channels * 4;
  if (bytes.size() - cur.pos < need)
    throw ParseError("truncated PFM payload: need " + std::to_string(need) + " bytes, have " +
                         std::to_string(bytes.size() - cur.pos),
                     cur.pos);

  const bool file_little = scale < 0.0;
  const bool host_little = std::endian::native == std::endian::little;
  img.data.resize(size_t(img.width) * img.height * channels);
  for (int row = 0; row < img.height; ++row) {
    const int mem_row = img.height - 1 - row;  // bottom row first on disk
    float* dst = img.data.data() + size_t(mem_row) * img.width * channels;
    std::memcpy(dst, bytes.data() + cur.pos + size_t(row) * img.width * channels * 4,
                size_t(img.width) * channels * 4);
    if (file_little != host_little)
      for (int i = 0; i < img.width * channels; ++i) dst[i] = detail::swap_float(dst[i]);
  }
  return img;
}

inline std::variant<DepthGrid, NormalMap> read_pfm(const std::string& path) {
  const PfmImage img = read_pfm_image(path);
  if (img.channels == 1) {
    DepthGrid g(img.width, img.height, DepthKind::Depth);
    for (int v = 0; v < img.height; ++v)
      for (int u = 0; u < img.width; ++u) {
        const float x = img.data[size_t(v) * img.width + u];
        if (std::isnan(x) || x < 0.0f) {
          g.mask(u, v) = 0;
        } else {
          g.values(u, v) = x;
          if (x == 0.0f) g.mask(u, v) = 0;
        }
      }
    return g;
  }
  NormalMap m(img.width, img.height);
  for (int v = 0; v < img.height; ++v)
    for (int u = 0; u < img.width; ++u) {
      const float* px = img.data.data() + (size_t(v) * img.width + u) * 3;
      if (std::isnan(px[0]) || std::isnan(px[1]) || std::isnan(px[2])) continue;
      m.normals(u, v) = Vec3{px[0], px[1], px[2]};
      m.mask(u, v) = 1;
    }
  return m;
}

namespace detail {

inline void write_pfm_payload(std::ofstream& f, int w, int h, int channels, const std::vector<float>& top_first) {
  f << (channels == 1 ? "Pf" : "PF") << "\n" << w << " " << h << "\n" << "-1.0" << "\n";
  for (int row = h - 1; row >= 0; --row)
    f.write(reinterpret_cast<const char*>(top_first.data() + size_t(row) * w * channels),
            std::streamsize(size_t(w) * channels * 4));
  if (!f) throw IoError("short write on PFM payload");
}

}  // namespace detail

// Masked pixels are written as NaN; scale is always -1.0 (little endian).
inline void write_pfm(const DepthGrid& g, const std::string& path) {
  if (std::endian::native != std::endian::little) throw IoError("PFM writer expects a little-endian host");
  std::ofstream f(path, std::ios::binary);
  if (!f) throw IoError("cannot open " + path + " for writing");
  std::vector<float> buf(size_t(g.width()) * g.height());
  for (int v = 0; v < g.height(); ++v)
    for (int u = 0; u < g.width(); ++u)
      buf[size_t(v) * g.width() + u] =
          g.valid(u, v) ? float(g.values(u, v)) : std::numeric_limits<float>::quiet_NaN();
  detail::write_pfm_payload(f, g.width(), g.height(), 1, buf);
}

inline void write_pfm(const NormalMap& m, const std::string& path) {
  if (std::endian::native != std::endian::little) throw IoError("PFM writer expects a little-endian host");
  std::ofstream f(path, std::ios::binary);
  if (!f) throw IoError("cannot open " + path + " for writing");
  std::vector<float> buf(size_t(m.width()) * m.height() * 3);
  for (int v = 0; v < m.height(); ++v)
    for (int u = 0; u < m.width(); ++u) {
      float* px = buf.data() + (size_t(v) * m.width() + u) * 3;
      if (m.valid(u, v)) {
        const Vec3 n = m.normals(u, v);
        px[0] = float(n.x);
        px[1] = float(n.y);
        px[2] = float(n.z);
      } else {
        px[0] = px[1] = px[2] = std::numeric_limits<float>::quiet_NaN();
      }
    }
  detail::write_pfm_payload(f, m.width(), m.height(), 3, buf);
}

namespace detail {

struct PngReader {
  png_structp png = nullptr;
  png_infop info = nullptr;
  std::FILE* fp = nullptr;
  ~PngReader() {
    if (png) png_destroy_read_struct(&png, info ? &info : nullptr, nullptr);
    if (fp) std::fclose(fp);
  }
};

struct PngWriter {
  png_structp png = nullptr;
  png_infop info = nullptr;
  std::FILE* fp = nullptr;
  ~PngWriter() {
    if (png) png_destroy_write_struct(&png, info ? &info : nullptr);
    if (fp) std::fclose(fp);
  }
};

}  // namespace detail

// 16-bit single-channel PNG depth: depth = raw * scale, raw 0 masked invalid.
inline DepthGrid read_depth_png16(const std::string& path, double scale) {
  if (!(scale > 0.0)) throw ArgumentError("png16 scale must be positive");
  detail::PngReader r;
  r.fp = std::fopen(path.c_str(), "rb");
  if (!r.fp) throw IoError("cannot open " + path);
  r.png = png_create_read_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
  r.info = png_create_info_struct(r.png);
  if (!r.png || !r.info) throw IoError("libpng init failed");
  if (setjmp(png_jmpbuf(r.png))) throw FormatError("failed to decode PNG " + path);
  png_init_io(r.png, r.fp);
  png_read_info(r.png, r.info);
  const int w = int(png_get_image_width(r.png, r.info));
  const int h = int(png_get_image_height(r.png, r.info));
  const int depth = png_get_bit_depth(r.png, r.info);
  const int color = png_get_color_type(r.png, r.info);
  if (depth != 16 || color != PNG_COLOR_TYPE_GRAY)
    throw FormatError("expected 16-bit single-channel PNG, got bit depth " + std::to_string(depth) +
                      " color type " + std::to_string(color));
  DepthGrid g(w, h, DepthKind::Depth);
  std::vector<png_byte> row(size_t(w) * 2);
  for (int v = 0; v < h; ++v) {
    png_read_row(r.png, row.data(), nullptr);
    for (int u = 0; u < w; ++u) {
      const unsigned raw = (unsigned(row[2 * u]) << 8) | unsigned(row[2 * u + 1]);  // network byte order
      if (raw == 0) {
        g.mask(u, v) = 0;
      } else {
        g.values(u, v) = double(raw) * scale;
      }
    }
  }
  return g;
}

// Inverse of read_depth_png16 (values are rounded to the raw grid; masked or
// out-of-range pixels become raw 0).
inline void write_depth_png16(const DepthGrid& g, const std::string& path, double scale) {
  if (!(scale > 0.0)) throw ArgumentError("png16 scale must be positive");
  detail::PngWriter wr;
  wr.fp = std::fopen(path.c_str(), "wb");
  if (!wr.fp) throw IoError("cannot open " + path + " for writing");
  wr.png = png_create_write_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
  wr.info = png_create_info_struct(wr.png);
  if (!wr.png || !wr.info) throw IoError("libpng init failed");
  if (setjmp(png_jmpbuf(wr.png))) throw IoError("failed to encode PNG " + path);
  png_init_io(wr.png, wr.fp);
  png_set_IHDR(wr.png, wr.info, png_uint_32(g.width()), png_uint_32(g.height()), 16, PNG_COLOR_TYPE_GRAY,
               PNG_INTERLACE_NONE, PNG_COMPRESSION_TYPE_DEFAULT, PNG_FILTER_TYPE_DEFAULT);
  png_write_info(wr.png, wr.info);
  std::vector<png_byte> row(size_t(g.width()) * 2);
  for (int v = 0; v < g.height(); ++v) {
    for (int u = 0; u < g.width(); ++u) {
      unsigned raw = 0;
      if (g.valid(u, v)) {
        const double x = std::round(g.values(u, v) / scale);
        if (x >= 1.0 && x <= 65535.0) raw = unsigned(x);
      }
      row[2 * u] = png_byte(raw >> 8);
      row[2 * u + 1] = png_byte(raw & 0xff);
    }
    png_write_row(wr.png, row.data());
  }
  png_write_end(wr.png, nullptr);
}

struct RgbImage {
  int width = 0;
  int height = 0;
  std::vector<std::uint8_t> rgb;  // row-major, 3 bytes per pixel
};

// channel = round(255 * (component + 1) / 2); masked pixels black.
inline RgbImage normal_to_rgb(const NormalMap& m) {
  RgbImage img;
  img.width = m.width();
  img.height = m.height();
  img.rgb.assign(size_t(m.width()) * m.height() * 3, 0);
  for (int v = 0; v < m.height(); ++v)
    for (int u = 0; u < m.width(); ++u) {
      if (!m.valid(u, v)) continue;
      const Vec3 n = m.normals(u, v);
      std::uint8_t* px = img.rgb.data() + (size_t(v) * m.width() + u) * 3;
      const double c[3] = {n.x, n.y, n.z};
      for (int i = 0; i < 3; ++i)
        px[i] = std::uint8_t(std::clamp(std::lround(255.0 * (c[i] + 1.0) / 2.0), 0L, 255L));
    }
  return img;
}

inline void write_rgb_png(const RgbImage& img, const std::string& path) {
  detail::PngWriter wr;
  wr.fp = std::fopen(path.c_str(), "wb");
  if (!wr.fp) throw IoError("cannot open " + path + " for writing");
  wr.png = png_create_write_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
  wr.info = png_create_info_struct(wr.png);
  if (!wr.png || !wr.info) throw IoError("libpng init failed");
  if (setjmp(png_jmpbuf(wr.png))) throw IoError("failed to encode PNG " + path);
  png_init_io(wr.png, wr.fp);
  png_set_IHDR(wr.png, wr.info, png_uint_32(img.width), png_uint_32(img.height), 8, PNG_COLOR_TYPE_RGB,
               PNG_INTERLACE_NONE, PNG_COMPRESSION_TYPE_DEFAULT, PNG_FILTER_TYPE_DEFAULT);
  png_write_info(wr.png, wr.info);
  for (int v = 0; v < img.height; ++v)
    png_write_row(wr.png, const_cast<png_bytep>(img.rgb.data() + size_t(v) * img.width * 3));
  png_write_end(wr.png, nullptr);
}

// Intrinsics text file: four whitespace-separated numbers "fu fv cu cv".
inline CameraIntrinsics read_intrinsics(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw IoError("cannot open " + path);
  CameraIntrinsics k;
  if (!(f >> k.fu >> k.fv >> k.cu >> k.cv)) throw FormatError("intrinsics file must hold four numbers: " + path);
  k.validate();
  return k;
}

inline void write_intrinsics(const CameraIntrinsics& k, const std::string& path) {
  std::ofstream f(path);
  if (!f) throw IoError("cannot open " + path + " for writing");
  f << k.fu << " " << k.fv << " " << k.cu << " " << k.cv << "\n";
}

}  // namespace sdn
