#pragma once

#include <optional>

namespace swarmsim {

struct PidGains {
  double kp = 0.0;
  double ki = 0.0;
  double kd = 0.0;
};

// Integrator and derivative memory of one controller. The first step after a
// reset has a zero derivative term.
struct PidState {
  double integral = 0.0;
  std::optional<double> prev_error;

  void reset() {
    integral = 0.0;
    prev_error.reset();
  }
};

// Named-axis command record on the vendor rc scale. Positive forward moves
// along body +x, positive lateral strafes right, positive vertical climbs,
// positive yaw_rate turns clockwise (viewed from above).
struct VelocityCommand {
  double forward = 0.0;
  double lateral = 0.0;
  double vertical = 0.0;
  double yaw_rate = 0.0;

  bool is_hover() const {
    return forward == 0.0 && lateral == 0.0 && vertical == 0.0 && yaw_rate == 0.0;
  }
  bool operator==(const VelocityCommand&) const = default;
};

inline constexpr double kDefaultCommandLimit = 100.0;

// One PID update: kp*e + ki*(integral + e*dt) + kd*(e - prev)/dt.
// Throws on dt <= 0.
double pid_step(const PidGains& gains, PidState& state, double error, double dt);

double clamp_output(double output, double limit);

// Maps the three plane controllers onto command axes: the horizontal-offset
// controller drives yaw_rate, the vertical-offset controller drives vertical
// velocity (sign flipped, image v grows downward), the radius controller
// drives forward velocity. Lateral stays zero unless lateral_from_x couples
// the horizontal controller to strafing as well.
VelocityCommand assemble_command(double x_out, double y_out, double z_out, double limit,
                                 bool lateral_from_x = false);

}  // namespace swarmsim
