#pragma once

#include <array>
#include <cstdint>
#include <deque>
#include <map>
#include <span>
#include <vector>

#include "swarmsim/control.hpp"
#include "swarmsim/geometry.hpp"
#include "swarmsim/imaging.hpp"
#include "swarmsim/perception.hpp"
#include "swarmsim/rng.hpp"

namespace swarmsim {

struct BatteryState {
  double voltage = 3.8;
  double capacity_ah = 1.1;
  double charge_ah = 1.1;
};

// charge' = max(0, charge - draw*dt/3600); depleted when the charge reaches 0.
std::pair<BatteryState, bool> battery_step(const BatteryState& battery, double draw_amps,
                                           double dt);

struct DroneParams {
  double max_speed = 1.0;       // m/s at command 100
  double max_yaw_rate = 1.0;    // rad/s at command 100
  double tau = 0.2;             // first-order velocity response time constant
  double ir_floor = 0.10;       // m, minimum rangeable altitude while airborne
};

struct DroneState {
  Pose pose;
  Vec3 velocity;       // world frame, m/s
  double yaw_rate = 0.0;  // rad/s, CCW positive
  BatteryState battery;
  bool grounded = false;
};

// Kinematic step: commands map to body-frame target velocities, the response
// is first-order with time constant tau, and position integrates the updated
// velocity. Positive yaw_rate commands turn clockwise (rc convention), which
// is a negative CCW rate. Airborne altitude is clamped to the infrared floor.
DroneState step_drone(const DroneState& state, const VelocityCommand& cmd, double dt,
                      const DroneParams& params, bool* floor_clamped = nullptr);

struct RgbColor {
  std::uint8_t r = 0;
  std::uint8_t g = 0;
  std::uint8_t b = 0;
};

struct Ball {
  int attach_agent = 0;
  Vec3 body_offset;
  double radius = 0.02;  // m
  RgbColor color{0, 200, 0};
};

struct Aabb {
  Vec3 min;
  Vec3 max;
};

struct Scene {
  RgbColor background{120, 120, 120};
  Ball ball;
  std::map<int, Pose> markers;  // marker front normal is the pose's +x axis
  double marker_size = 0.1;     // m, square side
  std::vector<Aabb> walls;
};

// Rasterizes the scene from the camera pose: background fill, then markers and
// the tracked ball painted farther-first. Deterministic.
ImageBuffer render_camera(const Scene& scene, const Pose& camera, const CameraIntrinsics& k,
                          std::span<const DroneState> agents);

// Single-channel depth image over walls + ball: intensity
// clamp(round(255*(1-(d-near)/(far-near)))), nearer surfaces brighter, empty
// rays 0.
ImageBuffer render_depth(const Scene& scene, const Pose& camera, const CameraIntrinsics& k,
                         double near, double far, std::span<const DroneState> agents);

struct WaypointPlan {
  std::vector<Vec3> legs;  // relative displacements, meters
  double speed = 0.4;      // m/s
  double tolerance = 0.05; // m
};

struct WaypointProgress {
  bool initialized = false;
  std::vector<Vec3> targets;  // absolute, resolved on first step
  std::size_t leg = 0;

  bool done(const WaypointPlan& plan) const { return initialized && leg >= plan.legs.size(); }
};

// Commands plan.speed toward the current leg target; a leg completes within
// plan.tolerance and the drone hovers after the last one.
VelocityCommand leader_step(const DroneState& state, const WaypointPlan& plan,
                            WaypointProgress& progress, double dt, const DroneParams& params);

struct FrameQueue {
  std::deque<double> pending;   // arrival timestamps, FIFO
  double service_time = 0.231;  // seconds per frame
  std::size_t capacity = 0;     // 0 = unbounded
  double head_progress = 0.0;   // service seconds already spent on the head

  std::uint64_t arrived = 0;
  std::uint64_t processed = 0;
  std::uint64_t dropped = 0;
};

struct QueueTickResult {
  std::vector<double> latencies;  // completion - arrival, per frame finished this tick
  int processed = 0;
  int dropped = 0;
  std::size_t backlog = 0;
};

// FIFO service consuming `budget` seconds of processing this tick. When the
// queue is bounded and full, the oldest pending frames are dropped to admit
// new arrivals.
QueueTickResult frame_queue_step(FrameQueue& q, std::span<const double> arrivals, double now,
                                 double budget);

// Geometric marker visibility: the center must project inside the image at a
// depth within (near, far) with the camera on the marker's front side. Each
// visible marker yields the true camera pose perturbed by seeded Gaussian
// noise.
std::vector<MarkerObservation> visible_markers(const Scene& scene, const Pose& camera,
                                               const CameraIntrinsics& k, double sigma_pos,
                                               double sigma_yaw, double near, double far,
                                               Rng& rng);

}  // namespace swarmsim
