#include <doctest.h>

#include <stdexcept>

#include <cmath>

#include "swarmsim/perception.hpp"
#include "swarmsim/rng.hpp"

using namespace swarmsim;

namespace {

ImageBuffer gray_frame(int w, int h) {
  ImageBuffer img = ImageBuffer::filled(w, h, 3, 0);
  for (int y = 0; y < h; ++y)
    for (int x = 0; x < w; ++x) {
      img.at(x, y, 0) = 120;
      img.at(x, y, 1) = 120;
      img.at(x, y, 2) = 120;
    }
  return img;
}

void paint_disc(ImageBuffer& img, double cx, double cy, double r) {
  for (int y = 0; y < img.height; ++y) {
    for (int x = 0; x < img.width; ++x) {
      const double dx = x - cx;
      const double dy = y - cy;
      if (dx * dx + dy * dy <= r * r) {
        img.at(x, y, 0) = 0;
        img.at(x, y, 1) = 200;
        img.at(x, y, 2) = 0;
      }
    }
  }
}

}  // namespace

TEST_CASE("track_frame centered target at the setpoint hovers") {
  ImageBuffer frame = gray_frame(960, 720);
  paint_disc(frame, 480, 360, 15);
  TrackerConfig cfg;
  TrackerState states;
  const TrackResult result = track_frame(frame, cfg, states, 1.0 / 30.0, 1.2);
  CHECK(result.hud.target_locked);
  REQUIRE(result.hud.circle.has_value());
  CHECK(std::abs(result.command.yaw_rate) < 1.0);
  CHECK(std::abs(result.command.vertical) < 1.0);
  CHECK(std::abs(result.command.forward) < 1.0);
  CHECK(result.hud.altitude_m == doctest::Approx(1.2));
}

TEST_CASE("track_frame offset target yaws toward it") {
  ImageBuffer frame = gray_frame(960, 720);
  paint_disc(frame, 572, 360, 15);
  TrackerConfig cfg;
  TrackerState states;
  const TrackResult result = track_frame(frame, cfg, states, 1.0 / 30.0, 0.0);
  CHECK(result.hud.target_locked);
  // dx ~ +92 px through the pure-P X controller: about 0.3 * 92.
  CHECK(result.command.yaw_rate > 25.0);
  CHECK(result.command.yaw_rate < 30.0);
  CHECK(std::abs(result.command.vertical) < 1.5);
}

TEST_CASE("track_frame without a target hovers and freezes the PIDs") {
  const ImageBuffer frame = gray_frame(320, 240);
  TrackerConfig cfg;
  TrackerState states;
  states.z.integral = 7.5;
  states.z.prev_error = 3.0;
  const TrackResult result = track_frame(frame, cfg, states, 1.0 / 30.0, 0.0);
  CHECK(!result.hud.target_locked);
  CHECK(!result.hud.circle.has_value());
  CHECK(result.command.is_hover());
  CHECK(states.z.integral == 7.5);
  CHECK(states.z.prev_error == 3.0);
}

TEST_CASE("track_frame ignores speckle below the area floor") {
  ImageBuffer frame = gray_frame(320, 240);
  paint_disc(frame, 100, 100, 1.0);
  TrackerConfig cfg;
  TrackerState states;
  const TrackResult result = track_frame(frame, cfg, states, 1.0 / 30.0, 0.0);
  CHECK(!result.hud.target_locked);
}

TEST_CASE("track_frame is deterministic") {
  ImageBuffer frame = gray_frame(480, 360);
  paint_disc(frame, 300, 150, 12);
  TrackerConfig cfg;
  TrackerState a, b;
  const TrackResult ra = track_frame(frame, cfg, a, 1.0 / 30.0, 0.5);
  const TrackResult rb = track_frame(frame, cfg, b, 1.0 / 30.0, 0.5);
  CHECK(ra.command == rb.command);
  CHECK(ra.hud.circle->center.x == rb.hud.circle->center.x);
}

TEST_CASE("track_frame rejects malformed frames") {
  TrackerConfig cfg;
  TrackerState states;
  CHECK_THROWS_AS(track_frame(ImageBuffer::filled(8, 8, 1, 0), cfg, states, 0.1, 0.0),
                  std::invalid_argument);
}

TEST_CASE("depth_avoid threshold behavior") {
  const ImageBuffer uniform = ImageBuffer::filled(64, 48, 1, 100);
  CHECK(!depth_avoid(uniform, 200, 0.3).has_value());
  // Exactly at the threshold triggers (inclusive).
  CHECK(depth_avoid(uniform, 100, 0.3).has_value());
}

TEST_CASE("depth_avoid steers away from the obstacle") {
  ImageBuffer depth = ImageBuffer::filled(64, 48, 1, 10);
  depth.at(8, 24) = 255;  // left of center
  const auto cmd = depth_avoid(depth, 200, 0.3);
  REQUIRE(cmd.has_value());
  CHECK(cmd->yaw_rate > 0.0);  // turn rightward, away
  CHECK(cmd->forward == 0.0);

  ImageBuffer below = ImageBuffer::filled(64, 48, 1, 10);
  below.at(32, 40) = 255;  // below center
  const auto climb = depth_avoid(below, 200, 0.3);
  REQUIRE(climb.has_value());
  CHECK(climb->vertical > 0.0);  // climb away
}

TEST_CASE("depth_avoid tie breaks by row-major order") {
  ImageBuffer depth = ImageBuffer::filled(9, 9, 1, 0);
  depth.at(2, 1) = 255;
  depth.at(6, 7) = 255;
  const auto cmd = depth_avoid(depth, 100, 1.0);
  REQUIRE(cmd.has_value());
  // First maximum in scan order is left of center: positive yaw.
  CHECK(cmd->yaw_rate > 0.0);
}

TEST_CASE("depth_avoid rejects color input") {
  CHECK_THROWS_AS(depth_avoid(ImageBuffer::filled(8, 8, 3, 0), 100, 0.3), std::invalid_argument);
}

TEST_CASE("estimate_pose basics") {
  CHECK_THROWS_AS(estimate_pose({}), std::invalid_argument);

  const MarkerObservation one[] = {{4, {{1.0, 2.0, 3.0}, 0.4}}};
  const PoseEstimate single = estimate_pose(one);
  CHECK(single.marker_count == 1);
  CHECK(single.pose.position.x == doctest::Approx(1.0));
  CHECK(single.pose.yaw == doctest::Approx(0.4));
  for (int r = 0; r < 4; ++r)
    for (int c = 0; c < 4; ++c) CHECK(single.covariance(r, c) == 0.0);

  const MarkerObservation two[] = {{0, {{1, 0, 0}, 0}}, {1, {{3, 0, 0}, 0}}};
  const PoseEstimate mean = estimate_pose(two);
  CHECK(mean.pose.position.x == doctest::Approx(2.0));
  CHECK(mean.covariance(0, 0) > 0.0);

  std::vector<MarkerObservation> eight;
  for (int i = 0; i < 8; ++i) eight.push_back({i, {{0.5, -0.25, 1.0}, -1.2}});
  const PoseEstimate exact = estimate_pose(eight);
  CHECK(exact.marker_count == 8);
  CHECK(exact.pose.position.x == doctest::Approx(0.5));
  CHECK(exact.pose.position.y == doctest::Approx(-0.25));
  CHECK(exact.pose.yaw == doctest::Approx(-1.2));
  CHECK(exact.covariance(0, 0) == doctest::Approx(0.0));
}

TEST_CASE("estimate_pose circular mean crosses the wrap") {
  const double pi = 3.14159265358979323846;
  const MarkerObservation obs[] = {{0, {{0, 0, 0}, pi - 0.1}}, {1, {{0, 0, 0}, -pi + 0.1}}};
  const PoseEstimate est = estimate_pose(obs);
  // Mean of angles straddling the wrap sits at the wrap, not at zero.
  CHECK(std::abs(std::abs(est.pose.yaw) - pi) < 1e-9);
}

TEST_CASE("fusing more markers shrinks the position error") {
  Rng rng(31);
  const double sigma = 0.05;
  const int trials = 1000;
  double err1 = 0.0;
  double err8 = 0.0;
  const Pose truth{{1.0, -2.0, 0.7}, 0.3};
  for (int t = 0; t < trials; ++t) {
    std::vector<MarkerObservation> obs;
    for (int i = 0; i < 8; ++i) {
      Pose noisy = truth;
      noisy.position += Vec3{rng.normal(), rng.normal(), rng.normal()} * sigma;
      obs.push_back({i, noisy});
    }
    err1 += (estimate_pose({obs.data(), 1}).pose.position - truth.position).norm();
    err8 += (estimate_pose(obs).pose.position - truth.position).norm();
  }
  const double ratio = err1 / err8;
  CHECK(ratio > 2.2);
  CHECK(ratio < 3.6);
}

TEST_CASE("covariance stays symmetric PSD on noisy input") {
  Rng rng(32);
  std::vector<MarkerObservation> obs;
  for (int i = 0; i < 8; ++i) {
    obs.push_back({i, {{rng.normal(), rng.normal(), rng.normal()}, 0.1 * rng.normal()}});
  }
  const PoseEstimate est = estimate_pose(obs);
  for (int r = 0; r < 4; ++r) {
    CHECK(est.covariance(r, r) >= 0.0);
    for (int c = 0; c < 4; ++c)
      CHECK(est.covariance(r, c) == doctest::Approx(est.covariance(c, r)));
  }
}

TEST_CASE("render_hud") {
  ImageBuffer frame = gray_frame(200, 200);

  HudRecord unlocked;
  unlocked.altitude_m = 1.2;
  const ImageBuffer same = render_hud(frame, unlocked);
  CHECK(same.data == frame.data);

  HudRecord locked;
  locked.target_locked = true;
  locked.circle = Circle{{100.0, 100.0}, 15.0};
  locked.offset_vector = Offset2{0.0, 0.0};
  locked.altitude_m = 1.2;
  const ImageBuffer drawn = render_hud(frame, locked);
  int ring_pixels = 0;
  for (int y = 0; y < 200; ++y) {
    for (int x = 0; x < 200; ++x) {
      if (drawn.at(x, y, 0) == 255 && drawn.at(x, y, 1) == 255 && drawn.at(x, y, 2) == 0) {
        const double d = std::hypot(x - 100.0, y - 100.0);
        CHECK(d == doctest::Approx(15.0).epsilon(0.1));
        ++ring_pixels;
      }
    }
  }
  CHECK(ring_pixels > 40);
  CHECK(locked.altitude_m == doctest::Approx(1.2));  // metadata passes through untouched
}
