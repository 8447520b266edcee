#include "safefilter/dynamics.hpp"

#include <stdexcept>

namespace safefilter {

namespace {

template<class... Ts>
struct Overloaded : Ts...
{
  using Ts::operator()...;
};

// Integrates an acceleration request through the clamp and the speed cap.
PlantState accelerate(const PlantState & state, const Vector & accel, double max_accel, double dt)
{
  PlantState next;
  next.velocity = saturate(state.velocity + saturate(accel, max_accel) * dt, kMaxPlantSpeed);
  next.position = state.position + next.velocity * dt;
  return next;
}

}  // namespace

void validate(const PlantModel & model)
{
  std::visit(
    Overloaded{
      [](const SingleIntegrator &) {},
      [](const DoubleIntegrator & m) {
        if (!(m.tracking_gain > 0.0) || !(m.max_accel > 0.0)) {
          throw std::invalid_argument("double integrator: tracking_gain and max_accel must be > 0");
        }
      },
      [](const VelocityLag & m) {
        if (!(m.time_constant > 0.0) || !(m.max_accel > 0.0)) {
          throw std::invalid_argument("velocity lag: time_constant and max_accel must be > 0");
        }
      },
    },
    model);
}

PlantState step(const PlantState & state, const Vector & v_command, const PlantModel & model,
                double dt)
{
  if (!(dt > 0.0)) {
    throw std::invalid_argument("step: dt must be > 0");
  }
  require_same_size(state.position.size(), v_command.size(), "step");
  require_same_size(state.velocity.size(), v_command.size(), "step");

  return std::visit(
    Overloaded{
      [&](const SingleIntegrator &) {
        const Vector v = saturate(v_command, kMaxPlantSpeed);
        return PlantState{state.position + v * dt, v};
      },
      [&](const DoubleIntegrator & m) {
        const Vector u = -m.tracking_gain * (state.velocity - v_command);
        return accelerate(state, u, m.max_accel, dt);
      },
      [&](const VelocityLag & m) {
        const Vector a = (v_command - state.velocity) / m.time_constant;
        return accelerate(state, a, m.max_accel, dt);
      },
    },
    model);
}

}  // namespace safefilter
