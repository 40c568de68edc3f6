#include <catch2/catch_amalgamated.hpp>

#include <random>

#include "helpers.hpp"
#include "sdn/grid.hpp"

using namespace sdn;

TEST_CASE("back_project maps pixels with depth to camera points", "[grid]") {
  const CameraIntrinsics k{500.0, 500.0, 320.0, 240.0};

  const Vec3 axis = back_project(Pixel{320, 240}, 2.0, k);
  CHECK(axis.x == 0.0);
  CHECK(axis.y == 0.0);
  CHECK(axis.z == 2.0);

  const Vec3 off = back_project(Pixel{320 + 500, 240}, 1.0, k);
  CHECK(off.x == Catch::Approx(1.0));
  CHECK(off.y == 0.0);

  const Vec3 sym = back_project(Pixel{320, 240}, 3.0, k);
  CHECK(sym.x == 0.0);
  CHECK(sym.y == 0.0);
  CHECK(sym.z == 3.0);

  CHECK_THROWS_AS(back_project(Pixel{0, 0}, 0.0, k), InvalidDepthError);
  CHECK_THROWS_AS(back_project(Pixel{0, 0}, -1.0, k), InvalidDepthError);
  CHECK_THROWS_AS(back_project(Pixel{0, 0}, std::numeric_limits<double>::quiet_NaN(), k), InvalidDepthError);
}

TEST_CASE("back_project inverts perspective projection on pixel centers", "[grid]") {
  const CameraIntrinsics k{120.0, 115.0, 79.5, 59.5};
  std::mt19937_64 rng(7);
  std::uniform_int_distribution<int> du(0, 159), dv(0, 119);
  std::uniform_real_distribution<double> dz(0.1, 50.0);
  for (int i = 0; i < 200; ++i) {
    const Pixel p{du(rng), dv(rng)};
    const double z = dz(rng);
    const auto [u, v] = project_to_pixel(back_project(p, z, k), k);
    CHECK(std::abs(u - p.u) < 1e-9);
    CHECK(std::abs(v - p.v) < 1e-9);
  }
}

TEST_CASE("neighbors8 respects borders and scan order", "[grid]") {
  auto interior = neighbors8(Pixel{2, 2}, 4, 4);
  REQUIRE(interior.size() == 8);
  CHECK(interior.front() == Pixel{1, 1});  // row-major scan
  CHECK(interior.back() == Pixel{3, 3});

  CHECK(neighbors8(Pixel{0, 0}, 4, 4).size() == 3);
  CHECK(neighbors8(Pixel{0, 2}, 4, 4).size() == 5);
  CHECK_THROWS_AS(neighbors8(Pixel{4, 0}, 4, 4), IndexError);
}

TEST_CASE("neighbors8 adjacency is symmetric", "[grid]") {
  const int w = 5, h = 4;
  for (int v = 0; v < h; ++v)
    for (int u = 0; u < w; ++u) {
      for (const Pixel q : neighbors8(Pixel{u, v}, w, h)) {
        const auto back = neighbors8(q, w, h);
        CHECK(std::find(back.begin(), back.end(), Pixel{u, v}) != back.end());
      }
    }
}

TEST_CASE("invert_depth flips kind and reciprocates", "[grid]") {
  DepthGrid g = testutil::make_row_grid({2.0}, 1);
  DepthGrid inv = invert_depth(g);
  CHECK(inv.values(0, 0) == 0.5);
  CHECK(inv.kind == DepthKind::InverseDepth);

  DepthGrid one = testutil::make_row_grid({1.0}, 1);
  CHECK(invert_depth(one).values(0, 0) == 1.0);

  DepthGrid bad = testutil::make_row_grid({-1.0}, 1);
  CHECK_THROWS_AS(invert_depth(bad), InvalidDepthError);
}

TEST_CASE("invert_depth round trip is tight on random grids", "[grid]") {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> dz(1e-3, 1e3);
  DepthGrid g = testutil::make_grid(17, 13, [&](int, int) { return dz(rng); });
  g.mask(3, 4) = 0;
  const DepthGrid twice = invert_depth(invert_depth(g));
  CHECK(twice.kind == DepthKind::Depth);
  CHECK(twice.mask == g.mask);
  for (int v = 0; v < g.height(); ++v)
    for (int u = 0; u < g.width(); ++u)
      if (g.valid(u, v))
        CHECK(std::abs(twice.values(u, v) - g.values(u, v)) <= 1e-12 * std::abs(g.values(u, v)));
}

TEST_CASE("normalized is exact on axis-aligned vectors", "[grid]") {
  CHECK(normalized(Vec3{0, 0, 5.3}) == Vec3{0, 0, 1});
  CHECK(normalized(Vec3{-2.7, 0, 0}) == Vec3{-1, 0, 0});
  CHECK_THROWS_AS(normalized(Vec3{0, 0, 0}), DegenerateInputError);
}

TEST_CASE("grid accessors bound-check via at()", "[grid]") {
  Grid<double> g(3, 2, 1.0);
  CHECK(g.at(Pixel{2, 1}) == 1.0);
  CHECK_THROWS_AS(g.at(Pixel{3, 0}), IndexError);
  CHECK_THROWS_AS(g.at(Pixel{0, -1}), IndexError);
}
