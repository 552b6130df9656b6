#pragma once

namespace kuramoto {

/// One classical fourth-order Runge-Kutta step of y' = f(y) for an autonomous
/// field. `State` is any Eigen vector type.
template <typename State, typename Field>
State rk4_step(const Field& f, const State& y, double dt) {
  const State k1 = f(y);
  const State k2 = f(State(y + 0.5 * dt * k1));
  const State k3 = f(State(y + 0.5 * dt * k2));
  const State k4 = f(State(y + dt * k3));
  return y + (dt / 6.0) * (k1 + 2.0 * (k2 + k3) + k4);
}

}  // namespace kuramoto
