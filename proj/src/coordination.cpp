#include "swarmsim/coordination.hpp"

#include <algorithm>
#include <stdexcept>

namespace swarmsim {

void channel_send(Channel& ch, Message message, double now, Rng& rng) {
  if (now < message.sent_at) throw std::invalid_argument("channel_send: now precedes sent_at");
  ++ch.sent;
  // Both draws happen unconditionally so the stream stays aligned across
  // channel parameter sweeps with a shared seed.
  const double u_loss = rng.uniform();
  const double u_jitter = rng.uniform();
  if (u_loss < ch.loss_prob) {
    ++ch.dropped;
    return;
  }
  Channel::InFlight entry;
  entry.message = std::move(message);
  entry.deliver_at = now + ch.latency_s + ch.jitter_s * u_jitter;
  entry.seq = ch.next_seq++;
  ch.in_flight.push_back(std::move(entry));
}

std::vector<Message> channel_poll(Channel& ch, double now) {
  std::vector<Channel::InFlight> due;
  std::vector<Channel::InFlight> keep;
  keep.reserve(ch.in_flight.size());
  for (auto& entry : ch.in_flight) {
    if (entry.deliver_at <= now + 1e-12) {
      due.push_back(std::move(entry));
    } else {
      keep.push_back(std::move(entry));
    }
  }
  ch.in_flight = std::move(keep);
  std::sort(due.begin(), due.end(), [](const Channel::InFlight& a, const Channel::InFlight& b) {
    if (a.deliver_at != b.deliver_at) return a.deliver_at < b.deliver_at;
    return a.seq < b.seq;
  });
  std::vector<Message> out;
  out.reserve(due.size());
  for (auto& entry : due) {
    out.push_back(std::move(entry.message));
    ++ch.delivered;
  }
  return out;
}

std::vector<AddressedCommand> CentralController::central_step(std::span<const Message> inbox,
                                                              double now) {
  for (const Message& m : inbox) {
    if (m.kind != MessageKind::telemetry) continue;
    const auto& snapshot = std::get<TelemetrySnapshot>(m.payload);
    Known& slot = latest_[snapshot.agent_id];
    if (!slot.seen || m.sent_at >= slot.sent_at) {
      slot.snapshot = snapshot;
      slot.sent_at = m.sent_at;
      slot.seen = true;
    }
  }

  std::vector<AddressedCommand> commands;
  commands.reserve(follower_ids_.size());

  const auto leader_it = latest_.find(leader_id_);
  const bool leader_known = leader_it != latest_.end() && leader_it->second.seen;
  const double leader_age = leader_known ? now - leader_it->second.sent_at : 0.0;
  const bool leader_fresh = leader_known && leader_age <= params_.staleness_timeout_s;

  for (const int follower : follower_ids_) {
    AddressedCommand out;
    out.receiver = follower;

    const auto follower_it = latest_.find(follower);
    const bool follower_known = follower_it != latest_.end() && follower_it->second.seen;
    if (!leader_fresh || !follower_known) {
      // Fail-safe: without a fresh leader picture (or any follower picture)
      // command a hover.
      out.stale_hover = true;
      out.telemetry_sent_at = leader_known ? leader_it->second.sent_at : now;
      out.staleness_s = leader_known ? leader_age : -1.0;
      commands.push_back(out);
      continue;
    }

    const Pose& leader_pose = leader_it->second.snapshot.pose;
    const Pose& follower_pose = follower_it->second.snapshot.pose;
    const Vec3 target = transform_point(leader_pose, params_.desired_offset);
    const Vec3 error_world = target - follower_pose.position;
    const Vec3 v_des = error_world * params_.kp;  // m/s
    const Vec3 v_body = rotate_z(-follower_pose.yaw, {v_des.x, v_des.y, 0.0});

    out.command.forward =
        clamp_output(100.0 * v_body.x / params_.max_speed, params_.output_limit);
    out.command.lateral =
        clamp_output(-100.0 * v_body.y / params_.max_speed, params_.output_limit);
    out.command.vertical = clamp_output(100.0 * v_des.z / params_.max_speed, params_.output_limit);
    out.telemetry_sent_at = leader_it->second.sent_at;
    out.staleness_s = leader_age;
    commands.push_back(out);
  }
  return commands;
}

TrackResult decentralized_step(const ImageBuffer& frame, const ImageBuffer& depth,
                               const TrackerConfig& tracker_cfg, const AvoidanceConfig& avoid_cfg,
                               TrackerState& states, double dt, double altitude_m) {
  TrackResult result = track_frame(frame, tracker_cfg, states, dt, altitude_m);
  const auto avoidance =
      depth_avoid(depth, avoid_cfg.intensity_threshold, avoid_cfg.gain, tracker_cfg.output_limit);
  if (avoidance) result.command = *avoidance;
  return result;
}

SwarmMode inject_failure(SwarmMode mode, FailureKind kind) {
  switch (kind) {
    case FailureKind::central:
      mode.central_alive = false;
      break;
    case FailureKind::leader:
      mode.leader_alive = false;
      break;
  }
  return mode;
}

}  // namespace swarmsim
