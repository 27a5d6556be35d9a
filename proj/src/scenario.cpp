#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <initializer_list>
#include <numbers>
#include <string>

#include "swarmsim/harness.hpp"

namespace swarmsim {

namespace {

using njson = nlohmann::ordered_json;

[[noreturn]] void fail(const std::string& message) { throw ConfigError(message); }

std::string join(const char* ctx, const char* key) { return std::string(ctx) + "." + key; }

void check_keys(const njson& j, const char* ctx, std::initializer_list<const char*> allowed) {
  if (!j.is_object()) fail(std::string(ctx) + " must be an object");
  for (auto it = j.begin(); it != j.end(); ++it) {
    const bool known = std::any_of(allowed.begin(), allowed.end(),
                                   [&](const char* k) { return it.key() == k; });
    if (!known) fail("unknown key \"" + it.key() + "\" in " + ctx);
  }
}

double get_number(const njson& j, const char* ctx, const char* key, double fallback) {
  if (!j.contains(key)) return fallback;
  const njson& v = j.at(key);
  if (!v.is_number()) fail(join(ctx, key) + " must be a number");
  return v.get<double>();
}

std::int64_t get_integer(const njson& j, const char* ctx, const char* key, std::int64_t fallback) {
  if (!j.contains(key)) return fallback;
  const njson& v = j.at(key);
  if (!v.is_number_integer()) fail(join(ctx, key) + " must be an integer");
  return v.get<std::int64_t>();
}

bool get_bool(const njson& j, const char* ctx, const char* key, bool fallback) {
  if (!j.contains(key)) return fallback;
  const njson& v = j.at(key);
  if (!v.is_boolean()) fail(join(ctx, key) + " must be a boolean");
  return v.get<bool>();
}

std::string get_string(const njson& j, const char* ctx, const char* key,
                       const std::string& fallback) {
  if (!j.contains(key)) return fallback;
  const njson& v = j.at(key);
  if (!v.is_string()) fail(join(ctx, key) + " must be a string");
  return v.get<std::string>();
}

Vec3 get_vec3(const njson& j, const std::string& ctx) {
  if (!j.is_array() || j.size() != 3 || !j[0].is_number() || !j[1].is_number() ||
      !j[2].is_number())
    fail(ctx + " must be an array of 3 numbers");
  return {j[0].get<double>(), j[1].get<double>(), j[2].get<double>()};
}

Vec3 get_vec3(const njson& j, const char* ctx, const char* key, const Vec3& fallback) {
  if (!j.contains(key)) return fallback;
  return get_vec3(j.at(key), join(ctx, key));
}

RgbColor get_color(const njson& j, const char* ctx, const char* key, RgbColor fallback) {
  if (!j.contains(key)) return fallback;
  const njson& v = j.at(key);
  if (!v.is_array() || v.size() != 3) fail(join(ctx, key) + " must be an array of 3 integers");
  int c[3];
  for (int i = 0; i < 3; ++i) {
    if (!v[i].is_number_integer()) fail(join(ctx, key) + " must hold integers");
    c[i] = v[i].get<int>();
    if (c[i] < 0 || c[i] > 255) fail(join(ctx, key) + " components must be in [0,255]");
  }
  return {static_cast<std::uint8_t>(c[0]), static_cast<std::uint8_t>(c[1]),
          static_cast<std::uint8_t>(c[2])};
}

HsvTriple get_hsv(const njson& j, const char* ctx, const char* key, HsvTriple fallback) {
  if (!j.contains(key)) return fallback;
  const njson& v = j.at(key);
  if (!v.is_array() || v.size() != 3) fail(join(ctx, key) + " must be an array of 3 integers");
  int c[3];
  for (int i = 0; i < 3; ++i) {
    if (!v[i].is_number_integer()) fail(join(ctx, key) + " must hold integers");
    c[i] = v[i].get<int>();
  }
  if (c[0] < 0 || c[0] > 179) fail(join(ctx, key) + " hue must be in [0,179]");
  if (c[1] < 0 || c[1] > 255 || c[2] < 0 || c[2] > 255)
    fail(join(ctx, key) + " saturation/value must be in [0,255]");
  return {static_cast<std::uint8_t>(c[0]), static_cast<std::uint8_t>(c[1]),
          static_cast<std::uint8_t>(c[2])};
}

Pose get_pose(const njson& j, const std::string& ctx, const Pose& fallback) {
  check_keys(j, ctx.c_str(), {"position", "yaw"});
  Pose pose = fallback;
  if (j.contains("position")) pose.position = get_vec3(j.at("position"), ctx + ".position");
  pose.yaw = wrap_angle(get_number(j, ctx.c_str(), "yaw", fallback.yaw));
  return pose;
}

PidGains get_gains(const njson& j, const char* ctx, const char* key, PidGains fallback) {
  if (!j.contains(key)) return fallback;
  const njson& v = j.at(key);
  const std::string sub = join(ctx, key);
  check_keys(v, sub.c_str(), {"kp", "ki", "kd"});
  return {get_number(v, sub.c_str(), "kp", fallback.kp),
          get_number(v, sub.c_str(), "ki", fallback.ki),
          get_number(v, sub.c_str(), "kd", fallback.kd)};
}

njson vec3_json(const Vec3& v) { return njson::array({v.x, v.y, v.z}); }
njson color_json(RgbColor c) { return njson::array({int(c.r), int(c.g), int(c.b)}); }
njson hsv_json(HsvTriple t) { return njson::array({int(t.h), int(t.s), int(t.v)}); }
njson pose_json(const Pose& p) {
  return njson{{"position", vec3_json(p.position)}, {"yaw", p.yaw}};
}
njson gains_json(const PidGains& g) {
  return njson{{"kp", g.kp}, {"ki", g.ki}, {"kd", g.kd}};
}

}  // namespace

Scene default_scene() {
  Scene scene;
  scene.background = {120, 120, 120};
  scene.ball = Ball{0, {-0.15, 0.0, 0.0}, 0.015, {0, 200, 0}};
  scene.marker_size = 0.1;
  int id = 0;
  for (const double z : {1.0, 1.8}) {
    for (const double y : {-1.5, -0.5, 0.5, 1.5}) {
      scene.markers[id++] = Pose{{4.99, y, z}, -std::numbers::pi};
    }
  }
  scene.walls = {Aabb{{5.0, -3.0, 0.0}, {5.3, 3.0, 3.0}}};
  return scene;
}

Scenario load_scenario(std::string_view json_text) {
  njson j;
  try {
    j = njson::parse(json_text);
  } catch (const njson::parse_error& e) {
    fail(std::string("config is not valid JSON: ") + e.what());
  }

  Scenario s;
  check_keys(j, "config",
             {"duration_s", "tick_dt_s", "seed", "mode", "intrinsics", "drone", "battery",
              "leader_plan", "agents", "scene", "depth", "tracker", "avoidance", "channel",
              "central", "marker_noise", "queue", "failures"});

  s.duration_s = get_number(j, "config", "duration_s", s.duration_s);
  s.tick_dt_s = get_number(j, "config", "tick_dt_s", s.tick_dt_s);
  s.seed = static_cast<std::uint64_t>(get_integer(j, "config", "seed", static_cast<std::int64_t>(s.seed)));

  const std::string mode = get_string(j, "config", "mode", "decentralized");
  if (mode == "decentralized") {
    s.mode = SwarmModeKind::decentralized;
  } else if (mode == "centralized") {
    s.mode = SwarmModeKind::centralized;
  } else {
    fail("config.mode must be \"centralized\" or \"decentralized\"");
  }

  if (j.contains("intrinsics")) {
    const njson& v = j.at("intrinsics");
    check_keys(v, "intrinsics", {"fx", "fy", "cx", "cy", "width", "height"});
    s.intrinsics.fx = get_number(v, "intrinsics", "fx", s.intrinsics.fx);
    s.intrinsics.fy = get_number(v, "intrinsics", "fy", s.intrinsics.fy);
    s.intrinsics.cx = get_number(v, "intrinsics", "cx", s.intrinsics.cx);
    s.intrinsics.cy = get_number(v, "intrinsics", "cy", s.intrinsics.cy);
    s.intrinsics.width = static_cast<int>(get_integer(v, "intrinsics", "width", s.intrinsics.width));
    s.intrinsics.height =
        static_cast<int>(get_integer(v, "intrinsics", "height", s.intrinsics.height));
  }

  if (j.contains("drone")) {
    const njson& v = j.at("drone");
    check_keys(v, "drone", {"max_speed_mps", "max_yaw_rate_rps", "tau_s", "ir_floor_m"});
    s.drone.max_speed = get_number(v, "drone", "max_speed_mps", s.drone.max_speed);
    s.drone.max_yaw_rate = get_number(v, "drone", "max_yaw_rate_rps", s.drone.max_yaw_rate);
    s.drone.tau = get_number(v, "drone", "tau_s", s.drone.tau);
    s.drone.ir_floor = get_number(v, "drone", "ir_floor_m", s.drone.ir_floor);
  }

  if (j.contains("battery")) {
    const njson& v = j.at("battery");
    check_keys(v, "battery", {"voltage_v", "capacity_ah", "draw_a"});
    s.battery.voltage = get_number(v, "battery", "voltage_v", s.battery.voltage);
    s.battery.capacity_ah = get_number(v, "battery", "capacity_ah", s.battery.capacity_ah);
    s.battery.charge_ah = s.battery.capacity_ah;
    s.battery_draw_a = get_number(v, "battery", "draw_a", s.battery_draw_a);
  }

  if (j.contains("leader_plan")) {
    const njson& v = j.at("leader_plan");
    check_keys(v, "leader_plan", {"legs", "speed_mps", "tolerance_m"});
    if (v.contains("legs")) {
      if (!v.at("legs").is_array()) fail("leader_plan.legs must be an array");
      s.plan.legs.clear();
      for (const njson& leg : v.at("legs")) s.plan.legs.push_back(get_vec3(leg, "leader_plan.legs[]"));
    }
    s.plan.speed = get_number(v, "leader_plan", "speed_mps", s.plan.speed);
    s.plan.tolerance = get_number(v, "leader_plan", "tolerance_m", s.plan.tolerance);
  }

  if (j.contains("agents")) {
    const njson& v = j.at("agents");
    check_keys(v, "agents", {"leader_start", "followers"});
    if (v.contains("leader_start"))
      s.leader_start = get_pose(v.at("leader_start"), "agents.leader_start", s.leader_start);
    if (v.contains("followers")) {
      if (!v.at("followers").is_array()) fail("agents.followers must be an array");
      s.follower_starts.clear();
      std::size_t i = 0;
      for (const njson& f : v.at("followers")) {
        s.follower_starts.push_back(
            get_pose(f, "agents.followers[" + std::to_string(i++) + "]", Pose{{-0.81, 0, 1.0}, 0}));
      }
    }
  }

  if (j.contains("scene")) {
    const njson& v = j.at("scene");
    check_keys(v, "scene", {"background_rgb", "ball", "markers", "marker_size_m", "walls"});
    s.scene.background = get_color(v, "scene", "background_rgb", s.scene.background);
    if (v.contains("ball")) {
      const njson& b = v.at("ball");
      check_keys(b, "scene.ball", {"attach_agent", "body_offset", "radius_m", "color_rgb"});
      s.scene.ball.attach_agent =
          static_cast<int>(get_integer(b, "scene.ball", "attach_agent", s.scene.ball.attach_agent));
      s.scene.ball.body_offset =
          get_vec3(b, "scene.ball", "body_offset", s.scene.ball.body_offset);
      s.scene.ball.radius = get_number(b, "scene.ball", "radius_m", s.scene.ball.radius);
      s.scene.ball.color = get_color(b, "scene.ball", "color_rgb", s.scene.ball.color);
    }
    if (v.contains("markers")) {
      if (!v.at("markers").is_array()) fail("scene.markers must be an array");
      s.scene.markers.clear();
      for (const njson& m : v.at("markers")) {
        check_keys(m, "scene.markers[]", {"id", "position", "yaw"});
        if (!m.contains("id")) fail("scene.markers[] entries need an id");
        const int id = static_cast<int>(get_integer(m, "scene.markers[]", "id", 0));
        if (s.scene.markers.count(id)) fail("scene.markers ids must be unique (duplicate " +
                                            std::to_string(id) + ")");
        Pose pose;
        if (m.contains("position")) pose.position = get_vec3(m.at("position"), "scene.markers[].position");
        pose.yaw = wrap_angle(get_number(m, "scene.markers[]", "yaw", 0.0));
        s.scene.markers[id] = pose;
      }
    }
    s.scene.marker_size = get_number(v, "scene", "marker_size_m", s.scene.marker_size);
    if (v.contains("walls")) {
      if (!v.at("walls").is_array()) fail("scene.walls must be an array");
      s.scene.walls.clear();
      for (const njson& w : v.at("walls")) {
        check_keys(w, "scene.walls[]", {"min", "max"});
        Aabb box;
        if (w.contains("min")) box.min = get_vec3(w.at("min"), "scene.walls[].min");
        if (w.contains("max")) box.max = get_vec3(w.at("max"), "scene.walls[].max");
        s.scene.walls.push_back(box);
      }
    }
  }

  if (j.contains("depth")) {
    const njson& v = j.at("depth");
    check_keys(v, "depth", {"near_m", "far_m"});
    s.depth.near_m = get_number(v, "depth", "near_m", s.depth.near_m);
    s.depth.far_m = get_number(v, "depth", "far_m", s.depth.far_m);
  }

  if (j.contains("tracker")) {
    const njson& v = j.at("tracker");
    check_keys(v, "tracker",
               {"hsv_lo", "hsv_hi", "radius_setpoint_px", "gains_x", "gains_y", "gains_z",
                "output_limit", "min_component_area", "erode_iterations", "dilate_iterations",
                "lateral_from_x"});
    const HsvTriple lo = get_hsv(v, "tracker", "hsv_lo", s.tracker.bounds.lo());
    const HsvTriple hi = get_hsv(v, "tracker", "hsv_hi", s.tracker.bounds.hi());
    try {
      s.tracker.bounds = HsvBounds(lo, hi);
    } catch (const std::invalid_argument& e) {
      fail(std::string("tracker bounds invalid: ") + e.what());
    }
    s.tracker.radius_setpoint =
        get_number(v, "tracker", "radius_setpoint_px", s.tracker.radius_setpoint);
    s.tracker.gains_x = get_gains(v, "tracker", "gains_x", s.tracker.gains_x);
    s.tracker.gains_y = get_gains(v, "tracker", "gains_y", s.tracker.gains_y);
    s.tracker.gains_z = get_gains(v, "tracker", "gains_z", s.tracker.gains_z);
    s.tracker.output_limit = get_number(v, "tracker", "output_limit", s.tracker.output_limit);
    s.tracker.min_component_area = static_cast<int>(
        get_integer(v, "tracker", "min_component_area", s.tracker.min_component_area));
    s.tracker.erode_iterations =
        static_cast<int>(get_integer(v, "tracker", "erode_iterations", s.tracker.erode_iterations));
    s.tracker.dilate_iterations = static_cast<int>(
        get_integer(v, "tracker", "dilate_iterations", s.tracker.dilate_iterations));
    s.tracker.lateral_from_x = get_bool(v, "tracker", "lateral_from_x", s.tracker.lateral_from_x);
  }

  if (j.contains("avoidance")) {
    const njson& v = j.at("avoidance");
    check_keys(v, "avoidance", {"intensity_threshold", "gain"});
    s.avoidance.intensity_threshold = static_cast<int>(
        get_integer(v, "avoidance", "intensity_threshold", s.avoidance.intensity_threshold));
    s.avoidance.gain = get_number(v, "avoidance", "gain", s.avoidance.gain);
  }

  if (j.contains("channel")) {
    const njson& v = j.at("channel");
    check_keys(v, "channel", {"latency_s", "jitter_s", "loss_prob"});
    s.channel.latency_s = get_number(v, "channel", "latency_s", s.channel.latency_s);
    s.channel.jitter_s = get_number(v, "channel", "jitter_s", s.channel.jitter_s);
    s.channel.loss_prob = get_number(v, "channel", "loss_prob", s.channel.loss_prob);
  }

  if (j.contains("central")) {
    const njson& v = j.at("central");
    check_keys(v, "central", {"desired_offset", "kp", "staleness_timeout_s"});
    s.central.desired_offset = get_vec3(v, "central", "desired_offset", s.central.desired_offset);
    s.central.kp = get_number(v, "central", "kp", s.central.kp);
    s.central.staleness_timeout_s =
        get_number(v, "central", "staleness_timeout_s", s.central.staleness_timeout_s);
  }

  if (j.contains("marker_noise")) {
    const njson& v = j.at("marker_noise");
    check_keys(v, "marker_noise", {"sigma_pos_m", "sigma_yaw_rad"});
    s.marker_noise.sigma_pos_m = get_number(v, "marker_noise", "sigma_pos_m", 0.0);
    s.marker_noise.sigma_yaw_rad = get_number(v, "marker_noise", "sigma_yaw_rad", 0.0);
  }

  if (j.contains("queue")) {
    const njson& v = j.at("queue");
    check_keys(v, "queue", {"service_time_s", "capacity"});
    s.queue.service_time_s = get_number(v, "queue", "service_time_s", s.queue.service_time_s);
    const std::int64_t cap =
        get_integer(v, "queue", "capacity", static_cast<std::int64_t>(s.queue.capacity));
    if (cap < 0) fail("queue.capacity must be >= 0");
    s.queue.capacity = static_cast<std::uint64_t>(cap);
  }

  if (j.contains("failures")) {
    if (!j.at("failures").is_array()) fail("config.failures must be an array");
    for (const njson& f : j.at("failures")) {
      check_keys(f, "failures[]", {"kind", "at_s"});
      FailureSpec spec;
      const std::string kind = get_string(f, "failures[]", "kind", "");
      if (kind == "central") {
        spec.kind = FailureKind::central;
      } else if (kind == "leader") {
        spec.kind = FailureKind::leader;
      } else {
        fail("failures[].kind must be \"central\" or \"leader\"");
      }
      spec.at_s = get_number(f, "failures[]", "at_s", 0.0);
      s.failures.push_back(spec);
    }
  }

  validate_scenario(s);
  return s;
}

void validate_scenario(const Scenario& s) {
  const auto positive = [](double v, const char* name) {
    if (!(v > 0.0) || !std::isfinite(v)) fail(std::string(name) + " must be > 0");
  };
  const auto non_negative = [](double v, const char* name) {
    if (!(v >= 0.0) || !std::isfinite(v)) fail(std::string(name) + " must be >= 0");
  };

  positive(s.duration_s, "config.duration_s");
  positive(s.tick_dt_s, "config.tick_dt_s");
  positive(s.intrinsics.fx, "intrinsics.fx");
  positive(s.intrinsics.fy, "intrinsics.fy");
  if (s.intrinsics.width < 1 || s.intrinsics.height < 1)
    fail("intrinsics.width/height must be >= 1");
  if (s.intrinsics.cx < 0.0 || s.intrinsics.cx >= s.intrinsics.width)
    fail("intrinsics.cx must lie in [0, width)");
  if (s.intrinsics.cy < 0.0 || s.intrinsics.cy >= s.intrinsics.height)
    fail("intrinsics.cy must lie in [0, height)");
  positive(s.drone.max_speed, "drone.max_speed_mps");
  positive(s.drone.max_yaw_rate, "drone.max_yaw_rate_rps");
  non_negative(s.drone.tau, "drone.tau_s");
  non_negative(s.drone.ir_floor, "drone.ir_floor_m");
  positive(s.battery.voltage, "battery.voltage_v");
  positive(s.battery.capacity_ah, "battery.capacity_ah");
  non_negative(s.battery_draw_a, "battery.draw_a");
  positive(s.plan.speed, "leader_plan.speed_mps");
  positive(s.plan.tolerance, "leader_plan.tolerance_m");
  if (s.follower_starts.empty()) fail("agents.followers must name at least one follower");
  positive(s.scene.ball.radius, "scene.ball.radius_m");
  if (s.scene.ball.attach_agent < 0 ||
      s.scene.ball.attach_agent > static_cast<int>(s.follower_starts.size()))
    fail("scene.ball.attach_agent must reference an existing agent");
  positive(s.scene.marker_size, "scene.marker_size_m");
  for (const Aabb& wall : s.scene.walls) {
    if (!(wall.min.x <= wall.max.x && wall.min.y <= wall.max.y && wall.min.z <= wall.max.z))
      fail("scene.walls[] min must not exceed max");
  }
  if (!(s.depth.near_m > 0.0 && s.depth.near_m < s.depth.far_m))
    fail("depth must satisfy 0 < near_m < far_m");
  positive(s.tracker.radius_setpoint, "tracker.radius_setpoint_px");
  if (s.tracker.min_component_area < 1) fail("tracker.min_component_area must be >= 1");
  if (s.tracker.erode_iterations < 1) fail("tracker.erode_iterations must be >= 1");
  if (s.tracker.dilate_iterations < 1) fail("tracker.dilate_iterations must be >= 1");
  positive(s.tracker.output_limit, "tracker.output_limit");
  for (const auto* g : {&s.tracker.gains_x, &s.tracker.gains_y, &s.tracker.gains_z}) {
    if (g->kp < 0.0 || g->ki < 0.0 || g->kd < 0.0 || !std::isfinite(g->kp) ||
        !std::isfinite(g->ki) || !std::isfinite(g->kd))
      fail("tracker gains must be finite and >= 0");
  }
  if (s.avoidance.intensity_threshold < 0 || s.avoidance.intensity_threshold > 255)
    fail("avoidance.intensity_threshold must be in [0,255]");
  non_negative(s.avoidance.gain, "avoidance.gain");
  non_negative(s.channel.latency_s, "channel.latency_s");
  non_negative(s.channel.jitter_s, "channel.jitter_s");
  if (s.channel.loss_prob < 0.0 || s.channel.loss_prob > 1.0)
    fail("channel.loss_prob must be in [0,1]");
  positive(s.central.kp, "central.kp");
  positive(s.central.staleness_timeout_s, "central.staleness_timeout_s");
  non_negative(s.marker_noise.sigma_pos_m, "marker_noise.sigma_pos_m");
  non_negative(s.marker_noise.sigma_yaw_rad, "marker_noise.sigma_yaw_rad");
  positive(s.queue.service_time_s, "queue.service_time_s");
  for (const FailureSpec& f : s.failures) non_negative(f.at_s, "failures[].at_s");
}

std::string serialize_scenario(const Scenario& s) {
  njson j;
  j["duration_s"] = s.duration_s;
  j["tick_dt_s"] = s.tick_dt_s;
  j["seed"] = s.seed;
  j["mode"] = to_string(s.mode);
  j["intrinsics"] = njson{{"fx", s.intrinsics.fx},         {"fy", s.intrinsics.fy},
                          {"cx", s.intrinsics.cx},         {"cy", s.intrinsics.cy},
                          {"width", s.intrinsics.width},   {"height", s.intrinsics.height}};
  j["drone"] = njson{{"max_speed_mps", s.drone.max_speed},
                     {"max_yaw_rate_rps", s.drone.max_yaw_rate},
                     {"tau_s", s.drone.tau},
                     {"ir_floor_m", s.drone.ir_floor}};
  j["battery"] = njson{{"voltage_v", s.battery.voltage},
                       {"capacity_ah", s.battery.capacity_ah},
                       {"draw_a", s.battery_draw_a}};
  njson legs = njson::array();
  for (const Vec3& leg : s.plan.legs) legs.push_back(vec3_json(leg));
  j["leader_plan"] =
      njson{{"legs", legs}, {"speed_mps", s.plan.speed}, {"tolerance_m", s.plan.tolerance}};
  njson followers = njson::array();
  for (const Pose& f : s.follower_starts) followers.push_back(pose_json(f));
  j["agents"] = njson{{"leader_start", pose_json(s.leader_start)}, {"followers", followers}};
  njson markers = njson::array();
  for (const auto& [id, pose] : s.scene.markers) {
    markers.push_back(
        njson{{"id", id}, {"position", vec3_json(pose.position)}, {"yaw", pose.yaw}});
  }
  njson walls = njson::array();
  for (const Aabb& wall : s.scene.walls)
    walls.push_back(njson{{"min", vec3_json(wall.min)}, {"max", vec3_json(wall.max)}});
  j["scene"] = njson{{"background_rgb", color_json(s.scene.background)},
                     {"ball", njson{{"attach_agent", s.scene.ball.attach_agent},
                                    {"body_offset", vec3_json(s.scene.ball.body_offset)},
                                    {"radius_m", s.scene.ball.radius},
                                    {"color_rgb", color_json(s.scene.ball.color)}}},
                     {"markers", markers},
                     {"marker_size_m", s.scene.marker_size},
                     {"walls", walls}};
  j["depth"] = njson{{"near_m", s.depth.near_m}, {"far_m", s.depth.far_m}};
  j["tracker"] = njson{{"hsv_lo", hsv_json(s.tracker.bounds.lo())},
                       {"hsv_hi", hsv_json(s.tracker.bounds.hi())},
                       {"radius_setpoint_px", s.tracker.radius_setpoint},
                       {"gains_x", gains_json(s.tracker.gains_x)},
                       {"gains_y", gains_json(s.tracker.gains_y)},
                       {"gains_z", gains_json(s.tracker.gains_z)},
                       {"output_limit", s.tracker.output_limit},
                       {"min_component_area", s.tracker.min_component_area},
                       {"erode_iterations", s.tracker.erode_iterations},
                       {"dilate_iterations", s.tracker.dilate_iterations},
                       {"lateral_from_x", s.tracker.lateral_from_x}};
  j["avoidance"] = njson{{"intensity_threshold", s.avoidance.intensity_threshold},
                         {"gain", s.avoidance.gain}};
  j["channel"] = njson{{"latency_s", s.channel.latency_s},
                       {"jitter_s", s.channel.jitter_s},
                       {"loss_prob", s.channel.loss_prob}};
  j["central"] = njson{{"desired_offset", vec3_json(s.central.desired_offset)},
                       {"kp", s.central.kp},
                       {"staleness_timeout_s", s.central.staleness_timeout_s}};
  j["marker_noise"] = njson{{"sigma_pos_m", s.marker_noise.sigma_pos_m},
                            {"sigma_yaw_rad", s.marker_noise.sigma_yaw_rad}};
  j["queue"] = njson{{"service_time_s", s.queue.service_time_s}, {"capacity", s.queue.capacity}};
  njson failures = njson::array();
  for (const FailureSpec& f : s.failures) {
    failures.push_back(
        njson{{"kind", f.kind == FailureKind::central ? "central" : "leader"}, {"at_s", f.at_s}});
  }
  j["failures"] = failures;
  return j.dump(2) + "\n";
}

const char* to_string(SwarmModeKind mode) {
  return mode == SwarmModeKind::centralized ? "centralized" : "decentralized";
}

}  // namespace swarmsim
