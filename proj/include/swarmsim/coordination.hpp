#pragma once

#include <cstdint>
#include <map>
#include <span>
#include <variant>
#include <vector>

#include "swarmsim/control.hpp"
#include "swarmsim/geometry.hpp"
#include "swarmsim/perception.hpp"
#include "swarmsim/rng.hpp"

namespace swarmsim {

struct TelemetrySnapshot {
  int agent_id = 0;
  Pose pose;
  Vec3 velocity;
  double battery_charge_ah = 0.0;
};

// A follower command carries the send time of the leader telemetry it was
// computed from, so end-to-end information age is measurable at application.
struct CommandPayload {
  VelocityCommand command;
  double telemetry_sent_at = 0.0;
};

enum class MessageKind { telemetry, command };

struct Message {
  MessageKind kind = MessageKind::telemetry;
  int sender = 0;
  int receiver = 0;
  std::variant<TelemetrySnapshot, CommandPayload> payload;
  double sent_at = 0.0;
};

// Lossy, latent point-to-point channel. Loss is decided with one Bernoulli
// draw at send time; surviving messages deliver at send + latency (+ uniform
// jitter).
struct Channel {
  double latency_s = 0.0;
  double jitter_s = 0.0;
  double loss_prob = 0.0;

  struct InFlight {
    Message message;
    double deliver_at = 0.0;
    std::uint64_t seq = 0;
  };
  std::vector<InFlight> in_flight;
  std::uint64_t next_seq = 0;
  std::uint64_t sent = 0;
  std::uint64_t delivered = 0;
  std::uint64_t dropped = 0;
};

void channel_send(Channel& ch, Message message, double now, Rng& rng);

// Messages due by `now`, ordered by delivery time (ties by send order).
std::vector<Message> channel_poll(Channel& ch, double now);

struct CentralParams {
  Vec3 desired_offset{-0.81, 0.0, 0.0};  // body-frame point behind the leader
  double kp = 1.0;                        // (m/s) per m of position error
  double staleness_timeout_s = 0.5;
  double output_limit = kDefaultCommandLimit;
  double max_speed = 1.0;  // command scale, m/s at 100
};

struct AddressedCommand {
  int receiver = 0;
  VelocityCommand command;
  double telemetry_sent_at = 0.0;
  double staleness_s = 0.0;  // age of the leader telemetry when computed
  bool stale_hover = false;  // fail-safe hover because telemetry went stale
};

// The central coordinator: ingests telemetry and emits one pursuit command per
// follower toward a fixed offset point behind the last known leader pose.
// Followers whose leader picture is older than the staleness timeout get a
// hover command.
class CentralController {
 public:
  CentralController(CentralParams params, int leader_id, std::vector<int> follower_ids)
      : params_(params), leader_id_(leader_id), follower_ids_(std::move(follower_ids)) {}

  std::vector<AddressedCommand> central_step(std::span<const Message> inbox, double now);

  const CentralParams& params() const { return params_; }

 private:
  struct Known {
    TelemetrySnapshot snapshot;
    double sent_at = 0.0;
    bool seen = false;
  };

  CentralParams params_;
  int leader_id_;
  std::vector<int> follower_ids_;
  std::map<int, Known> latest_;
};

struct AvoidanceConfig {
  int intensity_threshold = 250;
  double gain = 0.3;
};

// Fully local follower step: the avoidance reflex strictly overrides the
// tracker command; no channel interaction.
TrackResult decentralized_step(const ImageBuffer& frame, const ImageBuffer& depth,
                               const TrackerConfig& tracker_cfg, const AvoidanceConfig& avoid_cfg,
                               TrackerState& states, double dt, double altitude_m);

enum class SwarmModeKind { centralized, decentralized };

struct SwarmMode {
  SwarmModeKind mode = SwarmModeKind::decentralized;
  bool central_alive = true;
  bool leader_alive = true;
};

enum class FailureKind { central, leader };

// From the moment a failure is injected the named entity emits nothing; the
// caller applies this at the scheduled time.
SwarmMode inject_failure(SwarmMode mode, FailureKind kind);

}  // namespace swarmsim
