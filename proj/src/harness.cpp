#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <string>

#include "swarmsim/harness.hpp"

namespace swarmsim {

namespace {

void append_number(std::string& out, double v) {
  if (v == 0.0) v = 0.0;  // fold -0 into 0
  char buf[32];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v);
  out.append(buf, res.ptr);
}

void append_number(std::string& out, std::int64_t v) { out += std::to_string(v); }

std::int64_t tick_count(double duration, double dt) {
  return static_cast<std::int64_t>(std::floor(duration / dt + 1e-9));
}

// A failed or depleted drone loses thrust and sinks until it grounds.
constexpr double kFallSpeed = 1.0;  // m/s

struct AgentFlags {
  bool depleted = false;
  bool powered(bool alive) const { return alive && !depleted; }
};

}  // namespace

RunResult run_scenario(const Scenario& s, const RunOptions& options) {
  validate_scenario(s);

  const std::int64_t ticks = tick_count(s.duration_s, s.tick_dt_s);
  const double dt = s.tick_dt_s;
  const CameraIntrinsics& k = s.intrinsics;

  Rng root(s.seed);
  Rng rng_channel = root.substream("channel");
  Rng rng_markers = root.substream("marker-noise");

  std::vector<DroneState> agents;
  {
    DroneState leader;
    leader.pose = s.leader_start;
    leader.battery = s.battery;
    agents.push_back(leader);
    for (const Pose& start : s.follower_starts) {
      DroneState follower;
      follower.pose = start;
      follower.battery = s.battery;
      agents.push_back(follower);
    }
  }
  const int n_agents = static_cast<int>(agents.size());
  const int n_followers = n_agents - 1;

  SwarmMode mode{s.mode, true, true};
  std::vector<bool> failure_applied(s.failures.size(), false);
  std::vector<AgentFlags> flags(n_agents);

  WaypointProgress progress;
  FrameQueue queue;
  queue.service_time = s.queue.service_time_s;
  queue.capacity = s.queue.capacity;

  Channel channel;
  channel.latency_s = s.channel.latency_s;
  channel.jitter_s = s.channel.jitter_s;
  channel.loss_prob = s.channel.loss_prob;

  CentralParams central_params = s.central;
  central_params.max_speed = s.drone.max_speed;
  central_params.output_limit = s.tracker.output_limit;
  std::vector<int> follower_ids;
  for (int i = 1; i < n_agents; ++i) follower_ids.push_back(i);
  CentralController central(central_params, 0, follower_ids);

  std::vector<TrackerState> tracker_states(n_followers);

  struct LatestCommand {
    bool any = false;
    CommandPayload payload;
  };
  std::vector<LatestCommand> latest_command(n_followers);
  std::vector<Message> central_inbox;

  RunResult result;
  result.metrics.reserve(static_cast<std::size_t>(ticks) * n_agents);
  Summary& summary = result.summary;
  summary.agents = n_agents;
  summary.ticks = ticks;
  summary.duration_s = s.duration_s;
  summary.tick_dt_s = dt;

  double track_err_sq_sum = 0.0;
  std::int64_t track_err_count = 0;
  std::int64_t locked_count = 0;
  std::int64_t follower_rows = 0;
  std::int64_t first_lock_tick = -1;
  std::int64_t locked_after_first = 0;
  std::int64_t rows_after_first = 0;
  double staleness_sum = 0.0;
  std::int64_t staleness_count = 0;
  double frame_latency_sum = 0.0;
  std::int64_t frame_latency_count = 0;
  double loc_err_sum = 0.0;
  std::int64_t loc_err_count = 0;
  double min_airborne_z = std::numeric_limits<double>::infinity();
  double final_track_err_sum = 0.0;

  std::ofstream frames_csv;
  if (!options.frame_dir.empty()) {
    std::filesystem::create_directories(options.frame_dir);
    frames_csv.open(options.frame_dir / "frames.csv");
    frames_csv << "tick,altitude_m,locked,dx,dy,radius\n";
  }

  for (std::int64_t tick = 0; tick < ticks; ++tick) {
    const double now = static_cast<double>(tick) * dt;
    std::vector<std::string> events(n_agents);
    const auto add_event = [&](int agent, const char* name) {
      if (!events[agent].empty()) events[agent] += ';';
      events[agent] += name;
    };

    for (std::size_t i = 0; i < s.failures.size(); ++i) {
      if (failure_applied[i] || now + 1e-12 < s.failures[i].at_s) continue;
      mode = inject_failure(mode, s.failures[i].kind);
      failure_applied[i] = true;
      // A dead central is architecturally invisible to decentralized agents;
      // annotating it would break the trace-identity contract.
      if (s.failures[i].kind == FailureKind::leader) {
        add_event(0, "leader_failed");
      } else if (mode.mode == SwarmModeKind::centralized) {
        for (int a = 1; a < n_agents; ++a) add_event(a, "central_failed");
      }
    }

    // Leader waypoint controller.
    VelocityCommand leader_cmd;
    const bool leader_powered = flags[0].powered(mode.leader_alive);
    if (leader_powered && !agents[0].grounded) {
      leader_cmd = leader_step(agents[0], s.plan, progress, dt, s.drone);
      if (progress.done(s.plan) && summary.completion_time_s < 0.0)
        summary.completion_time_s = now;
    }

    // Follower control, either local perception or the command channel.
    std::vector<VelocityCommand> follower_cmds(n_followers);
    std::vector<HudRecord> huds(n_followers);
    std::vector<double> row_staleness(n_followers, 0.0);

    if (mode.mode == SwarmModeKind::decentralized) {
      for (int f = 0; f < n_followers; ++f) {
        const int agent = f + 1;
        if (!flags[agent].powered(true) || agents[agent].grounded) continue;
        const Pose cam = agents[agent].pose;
        const ImageBuffer frame = render_camera(s.scene, cam, k, agents);
        const ImageBuffer depth =
            render_depth(s.scene, cam, k, s.depth.near_m, s.depth.far_m, agents);
        const TrackResult step = decentralized_step(frame, depth, s.tracker, s.avoidance,
                                                    tracker_states[f], dt, cam.position.z);
        follower_cmds[f] = step.command;
        huds[f] = step.hud;

        if (!s.scene.markers.empty()) {
          const auto observations =
              visible_markers(s.scene, cam, k, s.marker_noise.sigma_pos_m,
                              s.marker_noise.sigma_yaw_rad, s.depth.near_m, s.depth.far_m,
                              rng_markers);
          if (!observations.empty()) {
            const PoseEstimate estimate = estimate_pose(observations);
            loc_err_sum += (estimate.pose.position - cam.position).norm();
            ++loc_err_count;
          }
        }

        if (f == 0 && !options.frame_dir.empty()) {
          char name[32];
          std::snprintf(name, sizeof(name), "tick_%06lld", static_cast<long long>(tick));
          write_image(render_hud(frame, step.hud), options.frame_dir / (std::string(name) + ".ppm"));
          write_image(depth, options.frame_dir / (std::string(name) + ".pgm"));
          std::string row = std::to_string(tick);
          row += ',';
          append_number(row, step.hud.altitude_m);
          row += ',';
          row += step.hud.target_locked ? '1' : '0';
          row += ',';
          append_number(row, step.hud.offset_vector ? step.hud.offset_vector->dx : 0.0);
          row += ',';
          append_number(row, step.hud.offset_vector ? step.hud.offset_vector->dy : 0.0);
          row += ',';
          append_number(row, step.hud.circle ? step.hud.circle->radius : 0.0);
          frames_csv << row << '\n';
        }
      }
    } else {
      // Telemetry out (leader first, then followers by id).
      const auto send_telemetry = [&](int agent) {
        Message m;
        m.kind = MessageKind::telemetry;
        m.sender = agent;
        m.receiver = -1;  // central
        m.sent_at = now;
        m.payload = TelemetrySnapshot{agent, agents[agent].pose, agents[agent].velocity,
                                      agents[agent].battery.charge_ah};
        channel_send(channel, std::move(m), now, rng_channel);
      };
      if (leader_powered && !agents[0].grounded) send_telemetry(0);
      for (int f = 0; f < n_followers; ++f) {
        if (flags[f + 1].powered(true) && !agents[f + 1].grounded) send_telemetry(f + 1);
      }

      if (mode.central_alive) {
        const auto commands = central.central_step(central_inbox, now);
        for (const AddressedCommand& out : commands) {
          Message m;
          m.kind = MessageKind::command;
          m.sender = -1;
          m.receiver = out.receiver;
          m.sent_at = now;
          m.payload = CommandPayload{out.command, out.telemetry_sent_at};
          channel_send(channel, std::move(m), now, rng_channel);
        }
      }
      central_inbox.clear();

      if (!options.frame_dir.empty() && n_followers > 0 && !agents[1].grounded) {
        // No tracker runs here, but the camera still exists; dump raw views.
        char name[32];
        std::snprintf(name, sizeof(name), "tick_%06lld", static_cast<long long>(tick));
        const Pose cam = agents[1].pose;
        write_image(render_camera(s.scene, cam, k, agents),
                    options.frame_dir / (std::string(name) + ".ppm"));
        write_image(render_depth(s.scene, cam, k, s.depth.near_m, s.depth.far_m, agents),
                    options.frame_dir / (std::string(name) + ".pgm"));
        frames_csv << tick << ',';
        std::string row;
        append_number(row, cam.position.z);
        frames_csv << row << ",0,0,0,0\n";
      }

      for (int f = 0; f < n_followers; ++f) {
        const LatestCommand& latest = latest_command[f];
        double staleness = -1.0;
        bool stale_hover = true;
        if (latest.any) {
          staleness = now - latest.payload.telemetry_sent_at;
          if (staleness <= central_params.staleness_timeout_s) {
            follower_cmds[f] = latest.payload.command;
            stale_hover = false;
          }
        }
        row_staleness[f] = stale_hover ? -1.0 : staleness;
        if (!stale_hover) {
          staleness_sum += staleness;
          ++staleness_count;
        }
        result.command_log.push_back(
            {tick, now, f + 1, follower_cmds[f], staleness, stale_hover});
      }
    }
    if (mode.mode == SwarmModeKind::decentralized) {
      for (int f = 0; f < n_followers; ++f) {
        result.command_log.push_back({tick, now, f + 1, follower_cmds[f], -1.0, false});
      }
    }

    // Channel deliveries become visible next tick.
    for (Message& m : channel_poll(channel, now)) {
      if (m.kind == MessageKind::telemetry) {
        central_inbox.push_back(std::move(m));
      } else if (m.receiver >= 1 && m.receiver < n_agents) {
        latest_command[m.receiver - 1] = {true, std::get<CommandPayload>(m.payload)};
      }
    }

    // Dynamics, agent id ascending.
    for (int a = 0; a < n_agents; ++a) {
      const bool alive = a == 0 ? mode.leader_alive : true;
      if (agents[a].grounded) continue;
      if (!flags[a].powered(alive)) {
        DroneState& d = agents[a];
        d.velocity = {0.0, 0.0, -kFallSpeed};
        d.yaw_rate = 0.0;
        d.pose.position.z -= kFallSpeed * dt;
        if (d.pose.position.z <= 0.0) {
          d.pose.position.z = 0.0;
          d.velocity = {};
          d.grounded = true;
          add_event(a, "grounded");
        }
        continue;
      }
      const VelocityCommand& cmd = a == 0 ? leader_cmd : follower_cmds[a - 1];
      bool clamped = false;
      agents[a] = step_drone(agents[a], cmd, dt, s.drone, &clamped);
      if (clamped) add_event(a, "floor");
      min_airborne_z = std::min(min_airborne_z, agents[a].pose.position.z);
    }

    // Battery drain for powered airborne agents.
    for (int a = 0; a < n_agents; ++a) {
      const bool alive = a == 0 ? mode.leader_alive : true;
      if (agents[a].grounded || !flags[a].powered(alive)) continue;
      const auto [next, depleted] = battery_step(agents[a].battery, s.battery_draw_a, dt);
      agents[a].battery = next;
      if (depleted && !flags[a].depleted) {
        flags[a].depleted = true;
        add_event(a, "depleted");
      }
    }

    // Frame backlog bookkeeping: one camera frame arrives per tick.
    const double arrival = now;
    const QueueTickResult queue_result = frame_queue_step(queue, {&arrival, 1}, now, dt);
    for (const double latency : queue_result.latencies) frame_latency_sum += latency;
    frame_latency_count += queue_result.processed;

    // Metrics rows.
    const Vec3 offset_point = transform_point(agents[0].pose, s.central.desired_offset);
    for (int a = 0; a < n_agents; ++a) {
      MetricsRecord row;
      row.tick = tick;
      row.time_s = now;
      row.agent = a;
      row.x = agents[a].pose.position.x;
      row.y = agents[a].pose.position.y;
      row.z = agents[a].pose.position.z;
      row.yaw = agents[a].pose.yaw;
      row.backlog = static_cast<std::int64_t>(queue_result.backlog);
      row.dropped = static_cast<std::int64_t>(channel.dropped);
      row.battery_ah = agents[a].battery.charge_ah;
      row.event = events[a];
      if (a >= 1) {
        const int f = a - 1;
        row.tracking_error_m = (agents[a].pose.position - offset_point).norm();
        row.locked = huds[f].target_locked;
        if (huds[f].offset_vector) {
          row.dx = huds[f].offset_vector->dx;
          row.dy = huds[f].offset_vector->dy;
        }
        if (huds[f].circle) row.radius = huds[f].circle->radius;
        row.staleness_s = mode.mode == SwarmModeKind::centralized ? row_staleness[f] : 0.0;

        track_err_sq_sum += row.tracking_error_m * row.tracking_error_m;
        ++track_err_count;
        ++follower_rows;
        if (row.locked) {
          ++locked_count;
          if (first_lock_tick < 0) first_lock_tick = tick;
        }
        if (first_lock_tick >= 0 && tick >= first_lock_tick) {
          ++rows_after_first;
          if (row.locked) ++locked_after_first;
        }
        if (tick == ticks - 1) final_track_err_sum += row.tracking_error_m;
      }
      result.metrics.push_back(std::move(row));
    }
  }

  if (track_err_count > 0)
    summary.rms_tracking_error_m = std::sqrt(track_err_sq_sum / track_err_count);
  if (ticks > 0 && n_followers > 0) summary.final_tracking_error_m = final_track_err_sum / n_followers;
  if (follower_rows > 0) summary.lock_ratio = static_cast<double>(locked_count) / follower_rows;
  if (first_lock_tick >= 0) {
    summary.first_lock_time_s = static_cast<double>(first_lock_tick) * dt;
    summary.lock_ratio_after_first_lock =
        rows_after_first > 0 ? static_cast<double>(locked_after_first) / rows_after_first : 0.0;
  }
  if (staleness_count > 0) summary.mean_staleness_s = staleness_sum / staleness_count;
  summary.messages_sent = static_cast<std::int64_t>(channel.sent);
  summary.messages_delivered = static_cast<std::int64_t>(channel.delivered);
  summary.messages_dropped = static_cast<std::int64_t>(channel.dropped);
  summary.messages_in_flight = static_cast<std::int64_t>(channel.in_flight.size());
  summary.frames_arrived = static_cast<std::int64_t>(queue.arrived);
  summary.frames_processed = static_cast<std::int64_t>(queue.processed);
  summary.frames_dropped = static_cast<std::int64_t>(queue.dropped);
  summary.backlog_final = static_cast<std::int64_t>(queue.pending.size());
  if (ticks > 0) summary.effective_fps = static_cast<double>(queue.processed) / (ticks * dt);
  if (frame_latency_count > 0)
    summary.mean_frame_latency_s = frame_latency_sum / frame_latency_count;
  if (loc_err_count > 0) summary.mean_localization_error_m = loc_err_sum / loc_err_count;
  if (std::isfinite(min_airborne_z)) summary.min_airborne_z_m = min_airborne_z;
  summary.battery_final_ah.reserve(agents.size());
  for (const DroneState& agent : agents) summary.battery_final_ah.push_back(agent.battery.charge_ah);
  return result;
}

std::string metrics_to_csv(std::span<const MetricsRecord> metrics) {
  std::string out =
      "tick,time_s,agent,x,y,z,yaw,tracking_error_m,dx,dy,radius,locked,staleness_s,backlog,"
      "dropped,battery_ah,event\n";
  for (const MetricsRecord& r : metrics) {
    append_number(out, r.tick);
    out += ',';
    append_number(out, r.time_s);
    out += ',';
    append_number(out, static_cast<std::int64_t>(r.agent));
    out += ',';
    append_number(out, r.x);
    out += ',';
    append_number(out, r.y);
    out += ',';
    append_number(out, r.z);
    out += ',';
    append_number(out, r.yaw);
    out += ',';
    append_number(out, r.tracking_error_m);
    out += ',';
    append_number(out, r.dx);
    out += ',';
    append_number(out, r.dy);
    out += ',';
    append_number(out, r.radius);
    out += ',';
    out += r.locked ? '1' : '0';
    out += ',';
    append_number(out, r.staleness_s);
    out += ',';
    append_number(out, r.backlog);
    out += ',';
    append_number(out, r.dropped);
    out += ',';
    append_number(out, r.battery_ah);
    out += ',';
    out += r.event;
    out += '\n';
  }
  return out;
}

namespace {

void append_json_number(std::string& out, double v) {
  if (v == 0.0) v = 0.0;
  if (!std::isfinite(v)) {
    out += "null";
    return;
  }
  char buf[32];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v);
  out.append(buf, res.ptr);
}

void field(std::string& out, const char* name, double v, bool last = false) {
  out += "  \"";
  out += name;
  out += "\": ";
  append_json_number(out, v);
  if (!last) out += ',';
  out += '\n';
}

void field(std::string& out, const char* name, std::int64_t v, bool last = false) {
  out += "  \"";
  out += name;
  out += "\": ";
  out += std::to_string(v);
  if (!last) out += ',';
  out += '\n';
}

}  // namespace

std::string summary_to_json(const Summary& s) {
  std::string out = "{\n";
  field(out, "ticks", s.ticks);
  field(out, "agents", static_cast<std::int64_t>(s.agents));
  field(out, "duration_s", s.duration_s);
  field(out, "tick_dt_s", s.tick_dt_s);
  field(out, "rms_tracking_error_m", s.rms_tracking_error_m);
  field(out, "final_tracking_error_m", s.final_tracking_error_m);
  field(out, "lock_ratio", s.lock_ratio);
  field(out, "first_lock_time_s", s.first_lock_time_s);
  field(out, "lock_ratio_after_first_lock", s.lock_ratio_after_first_lock);
  field(out, "mean_staleness_s", s.mean_staleness_s);
  field(out, "messages_sent", s.messages_sent);
  field(out, "messages_delivered", s.messages_delivered);
  field(out, "messages_dropped", s.messages_dropped);
  field(out, "messages_in_flight", s.messages_in_flight);
  field(out, "frames_arrived", s.frames_arrived);
  field(out, "frames_processed", s.frames_processed);
  field(out, "frames_dropped", s.frames_dropped);
  field(out, "backlog_final", s.backlog_final);
  field(out, "effective_fps", s.effective_fps);
  field(out, "mean_frame_latency_s", s.mean_frame_latency_s);
  field(out, "completion_time_s", s.completion_time_s);
  field(out, "min_airborne_z_m", s.min_airborne_z_m);
  field(out, "mean_localization_error_m", s.mean_localization_error_m);
  out += "  \"battery_final_ah\": [";
  for (std::size_t i = 0; i < s.battery_final_ah.size(); ++i) {
    if (i) out += ", ";
    append_json_number(out, s.battery_final_ah[i]);
  }
  out += "]\n}\n";
  return out;
}

void write_outputs(const RunResult& result, const std::filesystem::path& dir) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw std::runtime_error("write_outputs: cannot create " + dir.string());

  const auto write_file = [&](const std::filesystem::path& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("write_outputs: cannot open " + path.string());
    out << content;
    if (!out) throw std::runtime_error("write_outputs: short write to " + path.string());
  };
  write_file(dir / "metrics.csv", metrics_to_csv(result.metrics));
  write_file(dir / "summary.json", summary_to_json(result.summary));
}

std::vector<CompareRow> compare_architectures(const Scenario& base, std::span<const double> losses,
                                              std::span<const double> latencies) {
  std::vector<CompareRow> rows;
  for (const double loss : losses) {
    for (const double latency : latencies) {
      for (const SwarmModeKind mode : {SwarmModeKind::centralized, SwarmModeKind::decentralized}) {
        Scenario s = base;
        s.channel.loss_prob = loss;
        s.channel.latency_s = latency;
        s.mode = mode;
        const RunResult run = run_scenario(s);
        CompareRow row;
        row.loss_prob = loss;
        row.latency_s = latency;
        row.mode = mode;
        row.rms_tracking_error_m = run.summary.rms_tracking_error_m;
        row.lock_ratio = run.summary.lock_ratio;
        row.mean_staleness_s = run.summary.mean_staleness_s;
        row.dropped = run.summary.messages_dropped;
        rows.push_back(row);
      }
    }
  }
  return rows;
}

std::string report_to_csv(std::span<const CompareRow> rows) {
  std::string out = "loss,latency_s,mode,rms_tracking_error_m,lock_ratio,mean_staleness_s,dropped\n";
  for (const CompareRow& r : rows) {
    append_number(out, r.loss_prob);
    out += ',';
    append_number(out, r.latency_s);
    out += ',';
    out += to_string(r.mode);
    out += ',';
    append_number(out, r.rms_tracking_error_m);
    out += ',';
    append_number(out, r.lock_ratio);
    out += ',';
    append_number(out, r.mean_staleness_s);
    out += ',';
    append_number(out, r.dropped);
    out += '\n';
  }
  return out;
}

}  // namespace swarmsim
