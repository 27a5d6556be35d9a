#include <doctest.h>

#include <cmath>
#include <numbers>

#include "swarmsim/geometry.hpp"
#include "swarmsim/rng.hpp"

using namespace swarmsim;

namespace {
constexpr double kPi = std::numbers::pi;
}

TEST_CASE("transform_point basic cases") {
  CHECK(transform_point({{0, 0, 0}, 0}, {1, 2, 3}).x == doctest::Approx(1.0));
  CHECK(transform_point({{0, 0, 0}, 0}, {1, 2, 3}).y == doctest::Approx(2.0));
  CHECK(transform_point({{0, 0, 0}, 0}, {1, 2, 3}).z == doctest::Approx(3.0));

  const Vec3 rotated = transform_point({{0, 0, 0}, kPi / 2}, {1, 0, 0});
  CHECK(rotated.x == doctest::Approx(0.0).epsilon(1e-12));
  CHECK(rotated.y == doctest::Approx(1.0));
  CHECK(rotated.z == doctest::Approx(0.0));

  const Vec3 translated = transform_point({{1, 1, 1}, 0}, {1, 0, 0});
  CHECK(translated.x == doctest::Approx(2.0));
  CHECK(translated.y == doctest::Approx(1.0));
  CHECK(translated.z == doctest::Approx(1.0));
}

TEST_CASE("inverse round-trips points") {
  Rng rng(71);
  for (int i = 0; i < 300; ++i) {
    const Pose pose{{rng.uniform(-10, 10), rng.uniform(-10, 10), rng.uniform(-10, 10)},
                    rng.uniform(-kPi, kPi)};
    const Vec3 p{rng.uniform(-10, 10), rng.uniform(-10, 10), rng.uniform(-10, 10)};
    const Vec3 back = transform_point(pose, transform_point(inverse(pose), p));
    CHECK(std::abs(back.x - p.x) < 1e-9);
    CHECK(std::abs(back.y - p.y) < 1e-9);
    CHECK(std::abs(back.z - p.z) < 1e-9);
  }
}

TEST_CASE("compose keeps yaw normalized") {
  Rng rng(72);
  for (int i = 0; i < 300; ++i) {
    const Pose a{{0, 0, 0}, rng.uniform(-kPi, kPi)};
    const Pose b{{0, 0, 0}, rng.uniform(-kPi, kPi)};
    const Pose c = compose(a, b);
    CHECK(c.yaw >= -kPi);
    CHECK(c.yaw < kPi);
  }
  CHECK(wrap_angle(kPi) == doctest::Approx(-kPi));
  CHECK(wrap_angle(3 * kPi) == doctest::Approx(-kPi));
  CHECK(wrap_angle(-kPi) == doctest::Approx(-kPi));
}

TEST_CASE("project_point pinhole cases") {
  const CameraIntrinsics k{920, 920, 480, 360, 960, 720};
  const Pose cam{{0, 0, 0}, 0};

  const auto on_axis = project_point(cam, k, {1, 0, 0});
  REQUIRE(on_axis.has_value());
  CHECK(on_axis->u == doctest::Approx(480.0));
  CHECK(on_axis->v == doctest::Approx(360.0));

  // 0.1 m to the right at 1 m depth: right of center by fx * 0.1.
  const auto right = project_point(cam, k, {1, -0.1, 0});
  REQUIRE(right.has_value());
  CHECK(right->u == doctest::Approx(572.0));
  CHECK(right->v == doctest::Approx(360.0));

  CHECK(!project_point(cam, k, {-1, 0, 0}).has_value());
  CHECK(!project_point(cam, k, {0, 0.5, 0}).has_value());
}

TEST_CASE("projection is scale invariant along the ray") {
  const CameraIntrinsics k{660, 660, 480, 360, 960, 720};
  const Pose cam{{1, -2, 3}, 0.7};
  Rng rng(73);
  for (int i = 0; i < 200; ++i) {
    const Vec3 p_cam{rng.uniform(0.1, 5.0), rng.uniform(-2, 2), rng.uniform(-2, 2)};
    const double lambda = rng.uniform(0.1, 8.0);
    const Vec3 p1 = transform_point(cam, p_cam);
    const Vec3 p2 = transform_point(cam, p_cam * lambda);
    const auto a = project_point(cam, k, p1);
    const auto b = project_point(cam, k, p2);
    REQUIRE(a.has_value());
    REQUIRE(b.has_value());
    CHECK(std::abs(a->u - b->u) < 1e-9);
    CHECK(std::abs(a->v - b->v) < 1e-9);
  }
}

TEST_CASE("image axes follow the camera convention") {
  const CameraIntrinsics k{660, 660, 480, 360, 960, 720};
  const Pose cam{{0, 0, 1}, 0};
  // A point above the axis lands above image center (smaller v).
  const auto above = project_point(cam, k, {2, 0, 1.5});
  REQUIRE(above.has_value());
  CHECK(above->v < 360.0);
  // A point to the camera's left (+y body) lands left of center.
  const auto left = project_point(cam, k, {2, 0.5, 1});
  REQUIRE(left.has_value());
  CHECK(left->u < 480.0);
}
