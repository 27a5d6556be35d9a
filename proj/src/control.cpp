#include "swarmsim/control.hpp"

#include <algorithm>
#include <stdexcept>

namespace swarmsim {

double pid_step(const PidGains& gains, PidState& state, double error, double dt) {
  if (dt <= 0.0) throw std::invalid_argument("pid_step: dt must be > 0");
  state.integral += error * dt;
  double derivative = 0.0;
  if (state.prev_error) derivative = (error - *state.prev_error) / dt;
  state.prev_error = error;
  return gains.kp * error + gains.ki * state.integral + gains.kd * derivative;
}

double clamp_output(double output, double limit) {
  if (limit <= 0.0) throw std::invalid_argument("clamp_output: limit must be > 0");
  return std::min(std::max(output, -limit), limit);
}

VelocityCommand assemble_command(double x_out, double y_out, double z_out, double limit,
                                 bool lateral_from_x) {
  VelocityCommand cmd;
  cmd.yaw_rate = clamp_output(x_out, limit);
  cmd.vertical = clamp_output(-y_out, limit);
  cmd.forward = clamp_output(z_out, limit);
  cmd.lateral = lateral_from_x ? clamp_output(x_out, limit) : 0.0;
  return cmd;
}

}  // namespace swarmsim
