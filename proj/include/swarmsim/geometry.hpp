#pragma once

#include <cmath>
#include <numbers>
#include <optional>

namespace swarmsim {

struct Vec3 {
  double x = 0.0;
  double y = 0.0;
  double z = 0.0;

  Vec3 operator+(const Vec3& o) const { return {x + o.x, y + o.y, z + o.z}; }
  Vec3 operator-(const Vec3& o) const { return {x - o.x, y - o.y, z - o.z}; }
  Vec3 operator*(double s) const { return {x * s, y * s, z * s}; }
  Vec3& operator+=(const Vec3& o) {
    x += o.x;
    y += o.y;
    z += o.z;
    return *this;
  }
  double dot(const Vec3& o) const { return x * o.x + y * o.y + z * o.z; }
  double norm() const { return std::sqrt(dot(*this)); }
};

inline Vec3 operator*(double s, const Vec3& v) { return v * s; }

// Normalize an angle to [-pi, pi).
inline double wrap_angle(double a) {
  const double two_pi = 2.0 * std::numbers::pi;
  double r = std::fmod(a + std::numbers::pi, two_pi);
  if (r < 0.0) r += two_pi;
  return r - std::numbers::pi;
}

// World pose of a level-flying body: position plus yaw about +z (CCW). The
// platforms modeled here hover level, so roll and pitch are not carried.
struct Pose {
  Vec3 position;
  double yaw = 0.0;
};

inline Vec3 rotate_z(double yaw, const Vec3& v) {
  const double c = std::cos(yaw);
  const double s = std::sin(yaw);
  return {c * v.x - s * v.y, s * v.x + c * v.y, v.z};
}

// Body -> world.
inline Vec3 transform_point(const Pose& pose, const Vec3& p_body) {
  return rotate_z(pose.yaw, p_body) + pose.position;
}

inline Pose inverse(const Pose& pose) {
  return {rotate_z(-pose.yaw, pose.position) * -1.0, wrap_angle(-pose.yaw)};
}

// transform_point(compose(a, b), p) == transform_point(a, transform_point(b, p))
inline Pose compose(const Pose& a, const Pose& b) {
  return {transform_point(a, b.position), wrap_angle(a.yaw + b.yaw)};
}

struct CameraIntrinsics {
  double fx = 0.0;
  double fy = 0.0;
  double cx = 0.0;
  double cy = 0.0;
  int width = 0;
  int height = 0;

  bool valid() const {
    return fx > 0.0 && fy > 0.0 && width >= 1 && height >= 1 && cx >= 0.0 && cx < width &&
           cy >= 0.0 && cy < height;
  }
};

struct ImagePoint {
  double u = 0.0;
  double v = 0.0;
};

// Pinhole projection. The camera looks along body +x; u grows rightward,
// v grows downward. Points at depth <= 0 are behind the camera.
inline std::optional<ImagePoint> project_point(const Pose& camera, const CameraIntrinsics& k,
                                               const Vec3& p_world) {
  const Vec3 p_cam = rotate_z(-camera.yaw, p_world - camera.position);
  const double depth = p_cam.x;
  if (depth <= 0.0) return std::nullopt;
  const double right = -p_cam.y;
  const double up = p_cam.z;
  return ImagePoint{k.cx + k.fx * right / depth, k.cy - k.fy * up / depth};
}

// Depth of a world point along the camera's optical axis.
inline double camera_depth(const Pose& camera, const Vec3& p_world) {
  return rotate_z(-camera.yaw, p_world - camera.position).x;
}

}  // namespace swarmsim
