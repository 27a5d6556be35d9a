#pragma once

#include <array>
#include <optional>
#include <span>
#include <vector>

#include "swarmsim/control.hpp"
#include "swarmsim/geometry.hpp"
#include "swarmsim/imaging.hpp"

namespace swarmsim {

struct TrackerConfig {
  HsvBounds bounds{{40, 75, 20}, {80, 255, 255}};
  double radius_setpoint = 15.0;
  PidGains gains_x{0.3, 0.0, 0.0};
  PidGains gains_y{0.3, 0.08, 1.0};
  PidGains gains_z{0.9, 0.06, 0.2};
  double output_limit = kDefaultCommandLimit;
  int min_component_area = 20;
  int erode_iterations = 2;
  int dilate_iterations = 2;
  bool lateral_from_x = false;
};

// One PID per plane of motion.
struct TrackerState {
  PidState x;
  PidState y;
  PidState z;

  void reset() {
    x.reset();
    y.reset();
    z.reset();
  }
};

struct Offset2 {
  double dx = 0.0;
  double dy = 0.0;
};

// Overlay data for one processed frame. The circle is present exactly when a
// target is locked; altitude travels as machine-readable metadata next to the
// frame rather than rasterized text.
struct HudRecord {
  std::optional<Circle> circle;
  std::optional<Offset2> offset_vector;
  double altitude_m = 0.0;
  bool target_locked = false;
};

struct TrackResult {
  VelocityCommand command;
  HudRecord hud;
};

// Full per-frame tracking pass: blur, HSV, mask, erode, dilate, external
// components, enclosing circle, one PID step per plane. When no component
// reaches min_component_area the hover command is returned and the PID states
// are left untouched.
TrackResult track_frame(const ImageBuffer& frame, const TrackerConfig& cfg, TrackerState& states,
                        double dt, double altitude_m);

// Reflex that steers away from the brightest (nearest) region of a depth map.
// Returns nothing while the maximum intensity is below the threshold
// (inclusive comparison: max == threshold triggers).
std::optional<VelocityCommand> depth_avoid(const ImageBuffer& depth, int intensity_threshold,
                                           double gain, double limit = kDefaultCommandLimit);

struct MarkerObservation {
  int marker_id = 0;
  Pose camera_pose_estimate;
};

// Row-major 4x4 covariance over (x, y, z, yaw).
struct Cov4 {
  std::array<double, 16> m{};
  double& operator()(int r, int c) { return m[static_cast<std::size_t>(r) * 4 + c]; }
  double operator()(int r, int c) const { return m[static_cast<std::size_t>(r) * 4 + c]; }
};

struct PoseEstimate {
  Pose pose;
  Cov4 covariance;
  int marker_count = 0;
};

// Fuses marker observations: arithmetic mean position, circular mean yaw, and
// the covariance of the mean (zero for a single observation). Throws when the
// observation list is empty (no fix).
PoseEstimate estimate_pose(std::span<const MarkerObservation> observations);

// Draws the enclosing circle and the center-to-target segment onto a copy of
// the frame. Unlocked records return the frame unchanged.
ImageBuffer render_hud(const ImageBuffer& frame, const HudRecord& hud);

}  // namespace swarmsim
