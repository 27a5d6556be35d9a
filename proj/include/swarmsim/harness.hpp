#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "swarmsim/coordination.hpp"
#include "swarmsim/simulation.hpp"

namespace swarmsim {

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct ChannelParams {
  double latency_s = 0.0;
  double jitter_s = 0.0;
  double loss_prob = 0.0;
};

struct MarkerNoiseParams {
  double sigma_pos_m = 0.0;
  double sigma_yaw_rad = 0.0;
};

struct DepthParams {
  double near_m = 0.3;
  double far_m = 10.0;
};

struct QueueParams {
  double service_time_s = 0.231;
  std::uint64_t capacity = 0;  // 0 = unbounded
};

struct FailureSpec {
  FailureKind kind = FailureKind::central;
  double at_s = 0.0;
};

Scene default_scene();

// Declarative experiment description. The defaults reproduce the reference
// experiment: the leader climbs 0.5 m then flies 1.5 m forward at 0.4 m/s
// while one follower tracks the green ball attached to its back.
struct Scenario {
  double duration_s = 20.0;
  double tick_dt_s = 1.0 / 30.0;
  std::uint64_t seed = 1;
  SwarmModeKind mode = SwarmModeKind::decentralized;
  CameraIntrinsics intrinsics{660.0, 660.0, 480.0, 360.0, 960, 720};
  DroneParams drone;
  BatteryState battery;
  double battery_draw_a = 6.6;
  WaypointPlan plan{{{0.0, 0.0, 0.5}, {1.5, 0.0, 0.0}}, 0.4, 0.05};
  Pose leader_start{{0.0, 0.0, 1.0}, 0.0};
  std::vector<Pose> follower_starts{{{-0.81, 0.0, 1.0}, 0.0}};
  Scene scene = default_scene();
  DepthParams depth;
  TrackerConfig tracker;
  AvoidanceConfig avoidance;
  ChannelParams channel;
  CentralParams central;
  MarkerNoiseParams marker_noise;
  QueueParams queue;
  std::vector<FailureSpec> failures;
};

// Parses and validates a scenario document, filling defaults for absent
// fields. Unknown keys and invariant violations raise ConfigError naming the
// offending key or field.
Scenario load_scenario(std::string_view json_text);
std::string serialize_scenario(const Scenario& s);
void validate_scenario(const Scenario& s);

// One CSV row; emitted per agent per tick. Pose columns hold the state after
// the tick integrates, time_s is the tick's command time.
struct MetricsRecord {
  std::int64_t tick = 0;
  double time_s = 0.0;
  int agent = 0;
  double x = 0.0, y = 0.0, z = 0.0, yaw = 0.0;
  double tracking_error_m = 0.0;
  double dx = 0.0, dy = 0.0, radius = 0.0;
  bool locked = false;
  double staleness_s = 0.0;
  std::int64_t backlog = 0;
  std::int64_t dropped = 0;
  double battery_ah = 0.0;
  std::string event;
};

struct Summary {
  std::int64_t ticks = 0;
  int agents = 0;
  double duration_s = 0.0;
  double tick_dt_s = 0.0;
  double rms_tracking_error_m = 0.0;
  double final_tracking_error_m = 0.0;
  double lock_ratio = 0.0;
  double first_lock_time_s = -1.0;
  double lock_ratio_after_first_lock = 0.0;
  double mean_staleness_s = -1.0;
  std::int64_t messages_sent = 0;
  std::int64_t messages_delivered = 0;
  std::int64_t messages_dropped = 0;
  std::int64_t messages_in_flight = 0;
  std::int64_t frames_arrived = 0;
  std::int64_t frames_processed = 0;
  std::int64_t frames_dropped = 0;
  std::int64_t backlog_final = 0;
  double effective_fps = 0.0;
  double mean_frame_latency_s = -1.0;
  double completion_time_s = -1.0;
  double min_airborne_z_m = -1.0;
  double mean_localization_error_m = -1.0;
  std::vector<double> battery_final_ah;
};

struct AppliedCommandRecord {
  std::int64_t tick = 0;
  double time_s = 0.0;
  int agent = 0;
  VelocityCommand command;
  double staleness_s = -1.0;
  bool stale_hover = false;
};

struct RunResult {
  std::vector<MetricsRecord> metrics;
  Summary summary;
  std::vector<AppliedCommandRecord> command_log;  // followers only
};

struct RunOptions {
  std::filesystem::path frame_dir;  // empty: no frame dumps
};

RunResult run_scenario(const Scenario& s, const RunOptions& options = {});

std::string metrics_to_csv(std::span<const MetricsRecord> metrics);
std::string summary_to_json(const Summary& summary);

// Writes metrics.csv and summary.json into `dir` (created if needed).
void write_outputs(const RunResult& result, const std::filesystem::path& dir);

struct CompareRow {
  double loss_prob = 0.0;
  double latency_s = 0.0;
  SwarmModeKind mode = SwarmModeKind::centralized;
  double rms_tracking_error_m = 0.0;
  double lock_ratio = 0.0;
  double mean_staleness_s = -1.0;
  std::int64_t dropped = 0;
};

// Runs both architectures over the channel parameter grid with matched seeds.
std::vector<CompareRow> compare_architectures(const Scenario& base, std::span<const double> losses,
                                              std::span<const double> latencies);
std::string report_to_csv(std::span<const CompareRow> rows);

const char* to_string(SwarmModeKind mode);

}  // namespace swarmsim
