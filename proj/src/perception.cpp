#include "swarmsim/perception.hpp"

#include <cmath>
#include <stdexcept>

namespace swarmsim {

TrackResult track_frame(const ImageBuffer& frame, const TrackerConfig& cfg, TrackerState& states,
                        double dt, double altitude_m) {
  if (!frame.valid() || frame.channels != 3)
    throw std::invalid_argument("track_frame: 3-channel frame required");
  if (dt <= 0.0) throw std::invalid_argument("track_frame: dt must be > 0");

  TrackResult result;
  result.hud.altitude_m = altitude_m;

  const ImageBuffer blurred = gaussian_blur_5x5(frame);
  const ImageBuffer hsv = rgb_to_hsv(blurred);
  BinaryMap mask = apply_mask(hsv, cfg.bounds);
  mask = morphology(mask, Morphology::erode, cfg.erode_iterations);
  mask = morphology(mask, Morphology::dilate, cfg.dilate_iterations);

  const std::vector<Component> components = find_external_components(mask);
  if (components.empty() || components.front().area < cfg.min_component_area) {
    // Target lost: hover and keep the PID memory frozen for re-acquisition.
    return result;
  }

  const Component& target = components.front();
  std::vector<Point2> contour;
  contour.reserve(target.contour.size());
  for (const PixelIndex p : target.contour)
    contour.push_back({static_cast<double>(p.x), static_cast<double>(p.y)});
  const Circle circle = min_enclosing_circle(contour);

  const PixelOffsets off = compute_offsets(circle, frame.width, frame.height, cfg.radius_setpoint);
  const double x_out = pid_step(cfg.gains_x, states.x, off.dx, dt);
  const double y_out = pid_step(cfg.gains_y, states.y, off.dy, dt);
  const double z_out = pid_step(cfg.gains_z, states.z, off.dr, dt);

  result.command = assemble_command(x_out, y_out, z_out, cfg.output_limit, cfg.lateral_from_x);
  result.hud.circle = circle;
  result.hud.offset_vector = Offset2{off.dx, off.dy};
  result.hud.target_locked = true;
  return result;
}

std::optional<VelocityCommand> depth_avoid(const ImageBuffer& depth, int intensity_threshold,
                                           double gain, double limit) {
  if (!depth.valid() || depth.channels != 1)
    throw std::invalid_argument("depth_avoid: single-channel depth map required");

  int best = -1;
  std::size_t best_idx = 0;
  for (std::size_t i = 0; i < depth.data.size(); ++i) {
    if (depth.data[i] > best) {
      best = depth.data[i];
      best_idx = i;
    }
  }
  if (best < intensity_threshold) return std::nullopt;

  const int px = static_cast<int>(best_idx % depth.width);
  const int py = static_cast<int>(best_idx / depth.width);
  const double dx = px - depth.width / 2.0;
  const double dy = py - depth.height / 2.0;

  // Steer opposite the obstacle: yaw away from its side, climb when it is
  // below center, descend when above. No forward motion while reacting.
  VelocityCommand cmd;
  cmd.yaw_rate = clamp_output(-gain * dx, limit);
  cmd.vertical = clamp_output(gain * dy, limit);
  return cmd;
}

PoseEstimate estimate_pose(std::span<const MarkerObservation> observations) {
  if (observations.empty()) throw std::invalid_argument("estimate_pose: no fix (empty observation list)");

  const auto n = static_cast<int>(observations.size());
  Vec3 mean_pos;
  double sin_sum = 0.0;
  double cos_sum = 0.0;
  for (const MarkerObservation& obs : observations) {
    mean_pos += obs.camera_pose_estimate.position;
    sin_sum += std::sin(obs.camera_pose_estimate.yaw);
    cos_sum += std::cos(obs.camera_pose_estimate.yaw);
  }
  mean_pos = mean_pos * (1.0 / n);
  const double mean_yaw = wrap_angle(std::atan2(sin_sum, cos_sum));

  PoseEstimate est;
  est.pose = {mean_pos, mean_yaw};
  est.marker_count = n;
  if (n >= 2) {
    // Sample covariance of the observations scaled down to the variance of
    // their mean.
    Cov4 acc;
    for (const MarkerObservation& obs : observations) {
      const Vec3 dp = obs.camera_pose_estimate.position - mean_pos;
      const double d[4] = {dp.x, dp.y, dp.z, wrap_angle(obs.camera_pose_estimate.yaw - mean_yaw)};
      for (int r = 0; r < 4; ++r)
        for (int c = 0; c < 4; ++c) acc(r, c) += d[r] * d[c];
    }
    const double scale = 1.0 / (static_cast<double>(n - 1) * n);
    for (double& v : est.covariance.m) v = 0.0;
    for (int r = 0; r < 4; ++r)
      for (int c = 0; c < 4; ++c) est.covariance(r, c) = acc(r, c) * scale;
  }
  return est;
}

namespace {

void put_pixel(ImageBuffer& img, int x, int y, std::uint8_t r, std::uint8_t g, std::uint8_t b) {
  if (x < 0 || x >= img.width || y < 0 || y >= img.height) return;
  img.at(x, y, 0) = r;
  img.at(x, y, 1) = g;
  img.at(x, y, 2) = b;
}

void draw_circle_outline(ImageBuffer& img, const Circle& c) {
  const int cx = static_cast<int>(std::llround(c.center.x));
  const int cy = static_cast<int>(std::llround(c.center.y));
  int x = static_cast<int>(std::llround(c.radius));
  int y = 0;
  int err = 1 - x;
  // Midpoint circle, yellow like the classic overlay.
  while (x >= y) {
    put_pixel(img, cx + x, cy + y, 255, 255, 0);
    put_pixel(img, cx + y, cy + x, 255, 255, 0);
    put_pixel(img, cx - y, cy + x, 255, 255, 0);
    put_pixel(img, cx - x, cy + y, 255, 255, 0);
    put_pixel(img, cx - x, cy - y, 255, 255, 0);
    put_pixel(img, cx - y, cy - x, 255, 255, 0);
    put_pixel(img, cx + y, cy - x, 255, 255, 0);
    put_pixel(img, cx + x, cy - y, 255, 255, 0);
    ++y;
    if (err < 0) {
      err += 2 * y + 1;
    } else {
      --x;
      err += 2 * (y - x) + 1;
    }
  }
}

void draw_segment(ImageBuffer& img, int x0, int y0, int x1, int y1) {
  const int dx = std::abs(x1 - x0);
  const int dy = -std::abs(y1 - y0);
  const int sx = x0 < x1 ? 1 : -1;
  const int sy = y0 < y1 ? 1 : -1;
  int err = dx + dy;
  while (true) {
    put_pixel(img, x0, y0, 255, 0, 0);
    if (x0 == x1 && y0 == y1) break;
    const int e2 = 2 * err;
    if (e2 >= dy) {
      err += dy;
      x0 += sx;
    }
    if (e2 <= dx) {
      err += dx;
      y0 += sy;
    }
  }
}

}  // namespace

ImageBuffer render_hud(const ImageBuffer& frame, const HudRecord& hud) {
  if (!frame.valid() || frame.channels != 3)
    throw std::invalid_argument("render_hud: 3-channel frame required");
  ImageBuffer out = frame;
  if (!hud.target_locked || !hud.circle) return out;

  draw_circle_outline(out, *hud.circle);
  draw_segment(out, frame.width / 2, frame.height / 2,
               static_cast<int>(std::llround(hud.circle->center.x)),
               static_cast<int>(std::llround(hud.circle->center.y)));
  return out;
}

}  // namespace swarmsim
