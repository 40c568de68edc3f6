#include <catch2/catch_amalgamated.hpp>

#include <cstring>
#include <filesystem>
#include <fstream>

#include "helpers.hpp"
#include "sdn/io.hpp"

using namespace sdn;
namespace fs = std::filesystem;

namespace {

struct TempDir {
  fs::path path;
  TempDir() {
    path = fs::temp_directory_path() / ("sdn_io_test_" + std::to_string(::getpid()));
    fs::create_directories(path);
  }
  ~TempDir() {
    std::error_code ec;
    fs::remove_all(path, ec);
  }
  std::string file(const char* name) const { return (path / name).string(); }
};

std::vector<char> slurp(const std::string& p) {
  std::ifstream f(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(f), std::istreambuf_iterator<char>()};
}

}  // namespace

TEST_CASE("hand-written PFM bytes decode to known values", "[io]") {
  TempDir tmp;
  const std::string path = tmp.file("hand.pfm");
  {
    std::ofstream f(path, std::ios::binary);
    f << "Pf\n2 2\n-1.0\n";
    // bottom row first: (1.5, 2.5) is the bottom row, (3.5, 4.5) the top
    const float payload[4] = {1.5f, 2.5f, 3.5f, 4.5f};
    f.write(reinterpret_cast<const char*>(payload), sizeof payload);
  }
  const auto loaded = read_pfm(path);
  REQUIRE(std::holds_alternative<DepthGrid>(loaded));
  const DepthGrid& g = std::get<DepthGrid>(loaded);
  REQUIRE(g.width() == 2);
  REQUIRE(g.height() == 2);
  CHECK(g.values(0, 0) == 3.5);
  CHECK(g.values(1, 0) == 4.5);
  CHECK(g.values(0, 1) == 1.5);
  CHECK(g.values(1, 1) == 2.5);
}

TEST_CASE("PFM writing then reading is bit exact", "[io]") {
  TempDir tmp;
  DepthGrid g = testutil::make_grid(7, 5, [](int u, int v) { return 1.0 + 0.37 * u + 0.11 * v; });
  g.mask(3, 2) = 0;

  const std::string p1 = tmp.file("a.pfm");
  write_pfm(g, p1);
  const auto loaded = read_pfm(p1);
  REQUIRE(std::holds_alternative<DepthGrid>(loaded));
  const DepthGrid& back = std::get<DepthGrid>(loaded);
  CHECK(back.mask == g.mask);
  for (int v = 0; v < 5; ++v)
    for (int u = 0; u < 7; ++u)
      if (g.valid(u, v)) CHECK(back.values(u, v) == double(float(g.values(u, v))));

  const std::string p2 = tmp.file("b.pfm");
  write_pfm(back, p2);
  CHECK(slurp(p1) == slurp(p2));
}

TEST_CASE("normal maps round-trip through 3-channel PFM", "[io]") {
  TempDir tmp;
  NormalMap m(4, 3);
  for (int v = 0; v < 3; ++v)
    for (int u = 0; u < 4; ++u) {
      m.normals(u, v) = normalized(Vec3{0.1 * u, -0.2 * v, -1.0});
      m.mask(u, v) = 1;
    }
  m.mask(2, 1) = 0;

  const std::string p = tmp.file("n.pfm");
  write_pfm(m, p);
  const auto bytes = slurp(p);
  CHECK(bytes.size() >= 2);
  CHECK(bytes[0] == 'P');
  CHECK(bytes[1] == 'F');  // 3-channel header

  const auto loaded = read_pfm(p);
  REQUIRE(std::holds_alternative<NormalMap>(loaded));
  const NormalMap& back = std::get<NormalMap>(loaded);
  CHECK(back.mask == m.mask);
  for (int v = 0; v < 3; ++v)
    for (int u = 0; u < 4; ++u)
      if (m.valid(u, v)) {
        CHECK(back.normals(u, v).x == double(float(m.normals(u, v).x)));
        CHECK(back.normals(u, v).z == double(float(m.normals(u, v).z)));
      }
}

TEST_CASE("malformed PFM headers report the byte offset", "[io]") {
  TempDir tmp;
  const std::string path = tmp.file("bad.pfm");
  {
    std::ofstream f(path, std::ios::binary);
    f << "Px\n2 2\n-1.0\n";
    const float payload[4] = {};
    f.write(reinterpret_cast<const char*>(payload), sizeof payload);
  }
  try {
    read_pfm(path);
    FAIL("expected ParseError");
  } catch (const ParseError& e) {
    CHECK(e.offset == 1);
  }
}

TEST_CASE("truncated PFM payloads are rejected", "[io]") {
  TempDir tmp;
  const std::string path = tmp.file("short.pfm");
  {
    std::ofstream f(path, std::ios::binary);
    f << "Pf\n4 4\n-1.0\n";
    const float payload[3] = {1, 2, 3};  // far too short
    f.write(reinterpret_cast<const char*>(payload), sizeof payload);
  }
  CHECK_THROWS_AS(read_pfm(path), ParseError);
}

TEST_CASE("16-bit PNG depth round trip with scale", "[io]") {
  TempDir tmp;
  DepthGrid g(5, 4);
  for (int v = 0; v < 4; ++v)
    for (int u = 0; u < 5; ++u) g.values(u, v) = (1 + u + 5 * v) * 0.001;  // exact raw multiples
  g.mask(2, 2) = 0;

  const std::string p = tmp.file("d.png");
  write_depth_png16(g, p, 0.001);
  const DepthGrid back = read_depth_png16(p, 0.001);
  REQUIRE(back.width() == 5);
  CHECK(back.mask == g.mask);  // raw 0 masked
  for (int v = 0; v < 4; ++v)
    for (int u = 0; u < 5; ++u)
      if (g.valid(u, v)) CHECK(back.values(u, v) == Catch::Approx(g.values(u, v)).margin(1e-12));
  CHECK_FALSE(back.valid(2, 2));
}

TEST_CASE("non 16-bit-gray PNG input is a format error", "[io]") {
  TempDir tmp;
  RgbImage img;
  img.width = 3;
  img.height = 2;
  img.rgb.assign(18, 100);
  const std::string p = tmp.file("rgb.png");
  write_rgb_png(img, p);
  CHECK_THROWS_AS(read_depth_png16(p, 0.001), FormatError);
}

TEST_CASE("normal_to_rgb maps components to byte channels", "[io]") {
  NormalMap m(3, 1);
  m.normals(0, 0) = Vec3{0, 0, -1};
  m.mask(0, 0) = 1;
  m.normals(1, 0) = Vec3{1, 0, 0};
  m.mask(1, 0) = 1;
  // (2,0) stays masked
  const RgbImage img = normal_to_rgb(m);
  CHECK(img.rgb[0] == 128);
  CHECK(img.rgb[1] == 128);
  CHECK(img.rgb[2] == 0);
  CHECK(img.rgb[3] == 255);
  CHECK(img.rgb[4] == 128);
  CHECK(img.rgb[5] == 128);
  CHECK(img.rgb[6] == 0);
  CHECK(img.rgb[7] == 0);
  CHECK(img.rgb[8] == 0);
}

TEST_CASE("intrinsics files hold four numbers", "[io]") {
  TempDir tmp;
  const CameraIntrinsics k{120.5, 119.5, 80.25, 60.75};
  const std::string p = tmp.file("k.txt");
  write_intrinsics(k, p);
  const CameraIntrinsics back = read_intrinsics(p);
  CHECK(back.fu == k.fu);
  CHECK(back.fv == k.fv);
  CHECK(back.cu == k.cu);
  CHECK(back.cv == k.cv);

  const std::string bad = tmp.file("bad.txt");
  std::ofstream(bad) << "120 120\n";
  CHECK_THROWS_AS(read_intrinsics(bad), FormatError);
  CHECK_THROWS_AS(read_intrinsics(tmp.file("missing.txt")), IoError);
}
