#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace sdn {

struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct InvalidDepthError : Error {
  using Error::Error;
};
struct IndexError : Error {
  using Error::Error;
};
struct ContractViolation : Error {
  using Error::Error;
};
struct DegenerateInputError : Error {
  using Error::Error;
};
struct EmptyEvaluationError : Error {
  using Error::Error;
};
struct ArgumentError : Error {
  using Error::Error;
};

enum class Axis { U, V };

struct Pixel {
  int u = 0;
  int v = 0;
  bool operator==(const Pixel&) const = default;
};

struct Vec3 {
  double x = 0.0;
  double y = 0.0;
  double z = 0.0;

  Vec3 operator+(const Vec3& o) const { return {x + o.x, y + o.y, z + o.z}; }
  Vec3 operator-(const Vec3& o) const { return {x - o.x, y - o.y, z - o.z}; }
  Vec3 operator*(double s) const { return {x * s, y * s, z * s}; }
  Vec3 operator-() const { return {-x, -y, -z}; }
  bool operator==(const Vec3&) const = default;
};

inline double dot(const Vec3& a, const Vec3& b) { return a.x * b.x + a.y * b.y + a.z * b.z; }

inline Vec3 cross(const Vec3& a, const Vec3& b) {
  return {a.y * b.z - a.z * b.y, a.z * b.x - a.x * b.z, a.x * b.y - a.y * b.x};
}

inline double norm(const Vec3& a) { return std::sqrt(dot(a, a)); }

// Scales by the largest component magnitude before dividing by the 2-norm, so
// axis-aligned vectors normalize to exact unit vectors and large/small inputs
// do not overflow.
inline Vec3 normalized(const Vec3& a) {
  const double m = std::max({std::abs(a.x), std::abs(a.y), std::abs(a.z)});
  if (m == 0.0 || !std::isfinite(m)) throw DegenerateInputError("cannot normalize zero or non-finite vector");
  const Vec3 s{a.x / m, a.y / m, a.z / m};
  const double n = norm(s);
  return {s.x / n, s.y / n, s.z / n};
}

// Pinhole camera. fu, fv are focal lengths in pixels, (cu, cv) the principal point.
struct CameraIntrinsics {
  double fu = 1.0;
  double fv = 1.0;
  double cu = 0.0;
  double cv = 0.0;

  void validate() const {
    if (!(fu > 0.0) || !(fv > 0.0) || !std::isfinite(fu) || !std::isfinite(fv) || !std::isfinite(cu) ||
        !std::isfinite(cv)) {
      throw ArgumentError("invalid camera intrinsics");
    }
  }
};

// Dense row-major grid. Origin top-left, u rightward, v downward.
template <typename T>
class Grid {
 public:
  Grid() = default;
  Grid(int width, int height, T fill = T{}) : width_(width), height_(height), data_(size_t(width) * height, fill) {
    if (width < 0 || height < 0) throw ArgumentError("negative grid dimensions");
  }

  int width() const { return width_; }
  int height() const { return height_; }
  size_t size() const { return data_.size(); }
  bool empty() const { return data_.empty(); }

  bool in_bounds(int u, int v) const { return u >= 0 && u < width_ && v >= 0 && v < height_; }
  bool in_bounds(Pixel p) const { return in_bounds(p.u, p.v); }

  T& operator()(int u, int v) { return data_[size_t(v) * width_ + u]; }
  const T& operator()(int u, int v) const { return data_[size_t(v) * width_ + u]; }
  T& operator()(Pixel p) { return (*this)(p.u, p.v); }
  const T& operator()(Pixel p) const { return (*this)(p.u, p.v); }

  T& at(Pixel p) {
    if (!in_bounds(p)) throw IndexError("pixel out of bounds");
    return (*this)(p);
  }
  const T& at(Pixel p) const {
    if (!in_bounds(p)) throw IndexError("pixel out of bounds");
    return (*this)(p);
  }

  std::vector<T>& data() { return data_; }
  const std::vector<T>& data() const { return data_; }

  bool operator==(const Grid&) const = default;

 private:
  int width_ = 0;
  int height_ = 0;
  std::vector<T> data_;
};

using Mask = Grid<std::uint8_t>;

enum class DepthKind { Depth, InverseDepth };

// Scalar depth (or inverse-depth) field with a validity mask. Masked-out
// pixels never contribute to downstream computations.
struct DepthGrid {
  Grid<double> values;
  Mask mask;
  DepthKind kind = DepthKind::Depth;

  DepthGrid() = default;
  DepthGrid(int width, int height, DepthKind k = DepthKind::Depth)
      : values(width, height, 0.0), mask(width, height, 1), kind(k) {}

  int width() const { return values.width(); }
  int height() const { return values.height(); }
  bool valid(int u, int v) const { return mask(u, v) != 0; }
  bool valid(Pixel p) const { return mask(p) != 0; }

  void validate() const {
    for (int v = 0; v < height(); ++v)
      for (int u = 0; u < width(); ++u)
        if (valid(u, v)) {
          const double z = values(u, v);
          if (!std::isfinite(z)) throw InvalidDepthError("non-finite depth at valid pixel");
          if (kind == DepthKind::Depth && !(z > 0.0)) throw InvalidDepthError("non-positive depth at valid pixel");
        }
  }
};

// Unit normals oriented toward the camera, with validity mask.
struct NormalMap {
  Grid<Vec3> normals;
  Mask mask;

  NormalMap() = default;
  NormalMap(int width, int height) : normals(width, height), mask(width, height, 0) {}

  int width() const { return normals.width(); }
  int height() const { return normals.height(); }
  bool valid(int u, int v) const { return mask(u, v) != 0; }
  bool valid(Pixel p) const { return mask(p) != 0; }
};

inline Vec3 back_project(double u, double v, double z, const CameraIntrinsics& k) {
  if (!std::isfinite(z) || !(z > 0.0)) throw InvalidDepthError("back_project requires finite positive depth");
  return {z * (u - k.cu) / k.fu, z * (v - k.cv) / k.fv, z};
}

inline Vec3 back_project(Pixel p, double z, const CameraIntrinsics& k) { return back_project(p.u, p.v, z, k); }

inline std::pair<double, double> project_to_pixel(const Vec3& p, const CameraIntrinsics& k) {
  if (!(p.z > 0.0)) throw InvalidDepthError("cannot project point at non-positive depth");
  return {k.fu * p.x / p.z + k.cu, k.fv * p.y / p.z + k.cv};
}

// In-bounds 8-neighborhood of p in deterministic row-major order.
inline int neighbors8(Pixel p, int w, int h, std::array<Pixel, 8>& out) {
  if (p.u < 0 || p.u >= w || p.v < 0 || p.v >= h) throw IndexError("neighbors8: pixel out of bounds");
  static constexpr int off[8][2] = {{-1, -1}, {0, -1}, {1, -1}, {-1, 0}, {1, 0}, {-1, 1}, {0, 1}, {1, 1}};
  int n = 0;
  for (auto& o : off) {
    const int u = p.u + o[0];
    const int v = p.v + o[1];
    if (u >= 0 && u < w && v >= 0 && v < h) out[n++] = {u, v};
  }
  return n;
}

inline std::vector<Pixel> neighbors8(Pixel p, int w, int h) {
  std::array<Pixel, 8> buf;
  const int n = neighbors8(p, w, h, buf);
  return std::vector<Pixel>(buf.begin(), buf.begin() + n);
}

// Reciprocal of every valid entry; flips the kind tag.
inline DepthGrid invert_depth(const DepthGrid& g) {
  DepthGrid out;
  out.values = Grid<double>(g.width(), g.height(), 0.0);
  out.mask = g.mask;
  out.kind = g.kind == DepthKind::Depth ? DepthKind::InverseDepth : DepthKind::Depth;
  for (int v = 0; v < g.height(); ++v)
    for (int u = 0; u < g.width(); ++u)
      if (g.valid(u, v)) {
        const double z = g.values(u, v);
        if (!std::isfinite(z) || !(z > 0.0)) throw InvalidDepthError("invert_depth: non-positive valid entry");
        out.values(u, v) = 1.0 / z;
      }
  return out;
}

}  // namespace sdn
