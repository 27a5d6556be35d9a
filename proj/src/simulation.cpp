#include "swarmsim/simulation.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace swarmsim {

std::pair<BatteryState, bool> battery_step(const BatteryState& battery, double draw_amps,
                                           double dt) {
  if (draw_amps < 0.0) throw std::invalid_argument("battery_step: draw must be >= 0");
  if (dt < 0.0) throw std::invalid_argument("battery_step: dt must be >= 0");
  BatteryState next = battery;
  next.charge_ah = std::max(0.0, battery.charge_ah - draw_amps * dt / 3600.0);
  return {next, next.charge_ah == 0.0};
}

DroneState step_drone(const DroneState& state, const VelocityCommand& cmd, double dt,
                      const DroneParams& params, bool* floor_clamped) {
  if (dt <= 0.0) throw std::invalid_argument("step_drone: dt must be > 0");
  if (floor_clamped) *floor_clamped = false;
  if (state.grounded) return state;

  DroneState next = state;

  const Vec3 target_body{cmd.forward / 100.0 * params.max_speed,
                         -cmd.lateral / 100.0 * params.max_speed,
                         cmd.vertical / 100.0 * params.max_speed};
  Vec3 target_world = rotate_z(state.pose.yaw, {target_body.x, target_body.y, 0.0});
  target_world.z = target_body.z;
  const double target_yaw_rate = -cmd.yaw_rate / 100.0 * params.max_yaw_rate;

  const double alpha = params.tau > 0.0 ? 1.0 - std::exp(-dt / params.tau) : 1.0;
  next.velocity = state.velocity + (target_world - state.velocity) * alpha;
  const double speed = next.velocity.norm();
  if (speed > params.max_speed) next.velocity = next.velocity * (params.max_speed / speed);
  next.yaw_rate = state.yaw_rate + (target_yaw_rate - state.yaw_rate) * alpha;

  next.pose.position += next.velocity * dt;
  next.pose.yaw = wrap_angle(state.pose.yaw + next.yaw_rate * dt);

  if (next.pose.position.z < params.ir_floor) {
    next.pose.position.z = params.ir_floor;
    if (next.velocity.z < 0.0) next.velocity.z = 0.0;
    if (floor_clamped) *floor_clamped = true;
  }
  return next;
}

namespace {

struct Renderable {
  double depth = 0.0;
  int kind = 0;  // 0 = marker, 1 = ball
  int id = 0;
};

// A grounded carrier is a wreck on the floor; its ball is considered hidden.
std::optional<Vec3> ball_world_position(const Scene& scene, std::span<const DroneState> agents) {
  const auto idx = static_cast<std::size_t>(scene.ball.attach_agent);
  if (idx >= agents.size())
    throw std::invalid_argument("render: ball attach_agent out of range");
  if (agents[idx].grounded) return std::nullopt;
  return transform_point(agents[idx].pose, scene.ball.body_offset);
}

void fill_disc(ImageBuffer& img, const ImagePoint& center, double radius_px, RgbColor color) {
  const int x0 = std::max(0, static_cast<int>(std::ceil(center.u - radius_px)));
  const int x1 = std::min(img.width - 1, static_cast<int>(std::floor(center.u + radius_px)));
  const int y0 = std::max(0, static_cast<int>(std::ceil(center.v - radius_px)));
  const int y1 = std::min(img.height - 1, static_cast<int>(std::floor(center.v + radius_px)));
  const double r2 = radius_px * radius_px;
  for (int y = y0; y <= y1; ++y) {
    for (int x = x0; x <= x1; ++x) {
      const double du = x - center.u;
      const double dv = y - center.v;
      if (du * du + dv * dv <= r2) {
        img.at(x, y, 0) = color.r;
        img.at(x, y, 1) = color.g;
        img.at(x, y, 2) = color.b;
      }
    }
  }
}

void fill_rect(ImageBuffer& img, const ImagePoint& center, double half_u, double half_v,
               RgbColor color) {
  const int x0 = std::max(0, static_cast<int>(std::ceil(center.u - half_u)));
  const int x1 = std::min(img.width - 1, static_cast<int>(std::floor(center.u + half_u)));
  const int y0 = std::max(0, static_cast<int>(std::ceil(center.v - half_v)));
  const int y1 = std::min(img.height - 1, static_cast<int>(std::floor(center.v + half_v)));
  for (int y = y0; y <= y1; ++y) {
    for (int x = x0; x <= x1; ++x) {
      img.at(x, y, 0) = color.r;
      img.at(x, y, 1) = color.g;
      img.at(x, y, 2) = color.b;
    }
  }
}

constexpr RgbColor kMarkerColor{40, 40, 40};

}  // namespace

ImageBuffer render_camera(const Scene& scene, const Pose& camera, const CameraIntrinsics& k,
                          std::span<const DroneState> agents) {
  if (!k.valid()) throw std::invalid_argument("render_camera: invalid intrinsics");
  ImageBuffer img = ImageBuffer::filled(k.width, k.height, 3, 0);
  for (int y = 0; y < k.height; ++y) {
    for (int x = 0; x < k.width; ++x) {
      img.at(x, y, 0) = scene.background.r;
      img.at(x, y, 1) = scene.background.g;
      img.at(x, y, 2) = scene.background.b;
    }
  }

  const std::optional<Vec3> ball_pos = ball_world_position(scene, agents);

  std::vector<Renderable> order;
  for (const auto& [id, pose] : scene.markers) {
    const double d = camera_depth(camera, pose.position);
    if (d > 0.0) order.push_back({d, 0, id});
  }
  if (ball_pos) {
    const double ball_depth = camera_depth(camera, *ball_pos);
    if (ball_depth > 0.0) order.push_back({ball_depth, 1, 0});
  }

  std::sort(order.begin(), order.end(), [](const Renderable& a, const Renderable& b) {
    if (a.depth != b.depth) return a.depth > b.depth;  // farther first
    if (a.kind != b.kind) return a.kind < b.kind;
    return a.id < b.id;
  });

  for (const Renderable& r : order) {
    if (r.kind == 0) {
      const Pose& marker = scene.markers.at(r.id);
      const auto center = project_point(camera, k, marker.position);
      if (!center) continue;
      const double d = camera_depth(camera, marker.position);
      fill_rect(img, *center, k.fx * (scene.marker_size / 2.0) / d,
                k.fy * (scene.marker_size / 2.0) / d, kMarkerColor);
    } else {
      const auto center = project_point(camera, k, *ball_pos);
      if (!center) continue;
      const double radius_px =
          static_cast<double>(std::llround(k.fx * scene.ball.radius / r.depth));
      fill_disc(img, *center, radius_px, scene.ball.color);
    }
  }
  return img;
}

ImageBuffer render_depth(const Scene& scene, const Pose& camera, const CameraIntrinsics& k,
                         double near, double far, std::span<const DroneState> agents) {
  if (!k.valid()) throw std::invalid_argument("render_depth: invalid intrinsics");
  if (!(near > 0.0 && near < far)) throw std::invalid_argument("render_depth: need 0 < near < far");

  ImageBuffer img = ImageBuffer::filled(k.width, k.height, 1, 0);
  const std::optional<Vec3> ball_pos = ball_world_position(scene, agents);
  const Vec3 origin = camera.position;
  const double cos_yaw = std::cos(camera.yaw);
  const double sin_yaw = std::sin(camera.yaw);
  const double scale = 255.0 / (far - near);
  const double inf = std::numeric_limits<double>::infinity();

  // The unnormalized ray is (1, -right, up) rotated by yaw, so its world x/y
  // components depend on the column only and z on the row only. Hoisting the
  // reciprocals and partial dot products out of the pixel loop leaves a few
  // multiplies per pixel.
  const int w = k.width;
  const int h = k.height;
  std::vector<double> dx(w), dy(w), inv_dx(w), inv_dy(w), xy2(w), oc_xy(w);
  const Vec3 oc = ball_pos ? origin - *ball_pos : Vec3{};
  for (int x = 0; x < w; ++x) {
    const double right = (x - k.cx) / k.fx;
    dx[x] = cos_yaw + sin_yaw * right;
    dy[x] = sin_yaw - cos_yaw * right;
    inv_dx[x] = 1.0 / dx[x];
    inv_dy[x] = 1.0 / dy[x];
    xy2[x] = dx[x] * dx[x] + dy[x] * dy[x];
    oc_xy[x] = oc.x * dx[x] + oc.y * dy[x];
  }
  const double ball_c = ball_pos ? oc.dot(oc) - scene.ball.radius * scene.ball.radius : 0.0;
  const std::size_t n_walls = scene.walls.size();

  for (int y = 0; y < h; ++y) {
    const double dz = (k.cy - y) / k.fy;
    const double dz2 = dz * dz;
    const double inv_dz = 1.0 / dz;
    const double oc_z = oc.z * dz;
    std::uint8_t* row = img.data.data() + static_cast<std::size_t>(y) * w;

    for (int x = 0; x < w; ++x) {
      const double len2 = xy2[x] + dz2;
      double best_t = inf;  // in unnormalized ray parameter units

      if (ball_pos) {
        const double b = oc_xy[x] + oc_z;
        const double disc = b * b - len2 * ball_c;
        if (disc >= 0.0) {
          const double sq = std::sqrt(disc);
          const double t0 = (-b - sq) / len2;
          if (t0 > 0.0) {
            best_t = t0;
          } else if (-b + sq > 0.0) {
            best_t = 0.0;  // origin inside the ball
          }
        }
      }

      for (std::size_t wi = 0; wi < n_walls; ++wi) {
        const Aabb& box = scene.walls[wi];
        double t0 = (box.min.x - origin.x) * inv_dx[x];
        double t1 = (box.max.x - origin.x) * inv_dx[x];
        if (t0 > t1) std::swap(t0, t1);
        double u0 = (box.min.y - origin.y) * inv_dy[x];
        double u1 = (box.max.y - origin.y) * inv_dy[x];
        if (u0 > u1) std::swap(u0, u1);
        double v0 = (box.min.z - origin.z) * inv_dz;
        double v1 = (box.max.z - origin.z) * inv_dz;
        if (v0 > v1) std::swap(v0, v1);
        const double tmin = std::max({0.0, t0, u0, v0});
        const double tmax = std::min({t1, u1, v1});
        if (tmin <= tmax && tmin < best_t) best_t = tmin;
      }

      if (best_t == inf) continue;
      const double d = best_t * std::sqrt(len2);
      const double value = 255.0 - (d - near) * scale;
      row[x] = static_cast<std::uint8_t>(std::clamp<long long>(std::llround(value), 0, 255));
    }
  }
  return img;
}

VelocityCommand leader_step(const DroneState& state, const WaypointPlan& plan,
                            WaypointProgress& progress, double dt, const DroneParams& params) {
  if (dt <= 0.0) throw std::invalid_argument("leader_step: dt must be > 0");
  if (!progress.initialized) {
    progress.targets.clear();
    Vec3 acc = state.pose.position;
    for (const Vec3& leg : plan.legs) {
      acc += leg;
      progress.targets.push_back(acc);
    }
    progress.leg = 0;
    progress.initialized = true;
  }

  while (progress.leg < progress.targets.size() &&
         (progress.targets[progress.leg] - state.pose.position).norm() <= plan.tolerance) {
    ++progress.leg;
  }
  if (progress.leg >= progress.targets.size()) return {};

  const Vec3 to_target = progress.targets[progress.leg] - state.pose.position;
  const Vec3 dir = to_target * (1.0 / to_target.norm());
  const Vec3 v_world = dir * plan.speed;
  const Vec3 v_body = rotate_z(-state.pose.yaw, {v_world.x, v_world.y, 0.0});

  VelocityCommand cmd;
  cmd.forward = clamp_output(100.0 * v_body.x / params.max_speed, kDefaultCommandLimit);
  cmd.lateral = clamp_output(-100.0 * v_body.y / params.max_speed, kDefaultCommandLimit);
  cmd.vertical = clamp_output(100.0 * v_world.z / params.max_speed, kDefaultCommandLimit);
  return cmd;
}

QueueTickResult frame_queue_step(FrameQueue& q, std::span<const double> arrivals, double now,
                                 double budget) {
  if (budget < 0.0) throw std::invalid_argument("frame_queue_step: budget must be >= 0");

  QueueTickResult result;
  for (const double arrival : arrivals) {
    if (q.capacity > 0 && q.pending.size() >= q.capacity) {
      q.pending.pop_front();
      q.head_progress = 0.0;
      ++q.dropped;
      ++result.dropped;
    }
    q.pending.push_back(arrival);
    ++q.arrived;
  }

  double elapsed = 0.0;
  while (!q.pending.empty() && budget > 0.0) {
    const double needed = q.service_time - q.head_progress;
    if (budget + 1e-12 >= needed) {
      elapsed += needed;
      budget -= needed;
      result.latencies.push_back(now + elapsed - q.pending.front());
      q.pending.pop_front();
      q.head_progress = 0.0;
      ++q.processed;
      ++result.processed;
    } else {
      q.head_progress += budget;
      budget = 0.0;
    }
  }
  result.backlog = q.pending.size();
  return result;
}

std::vector<MarkerObservation> visible_markers(const Scene& scene, const Pose& camera,
                                               const CameraIntrinsics& k, double sigma_pos,
                                               double sigma_yaw, double near, double far,
                                               Rng& rng) {
  if (sigma_pos < 0.0 || sigma_yaw < 0.0)
    throw std::invalid_argument("visible_markers: sigma must be >= 0");

  std::vector<MarkerObservation> observations;
  for (const auto& [id, marker] : scene.markers) {
    const double depth = camera_depth(camera, marker.position);
    if (depth <= near || depth >= far) continue;
    const auto projected = project_point(camera, k, marker.position);
    if (!projected) continue;
    if (projected->u < 0.0 || projected->u >= k.width || projected->v < 0.0 ||
        projected->v >= k.height)
      continue;
    const Vec3 normal = rotate_z(marker.yaw, {1.0, 0.0, 0.0});
    if (normal.dot(camera.position - marker.position) <= 0.0) continue;  // facing away

    MarkerObservation obs;
    obs.marker_id = id;
    obs.camera_pose_estimate.position =
        camera.position + Vec3{rng.normal(), rng.normal(), rng.normal()} * sigma_pos;
    obs.camera_pose_estimate.yaw = wrap_angle(camera.yaw + rng.normal() * sigma_yaw);
    observations.push_back(obs);
  }
  return observations;
}

}  // namespace swarmsim
