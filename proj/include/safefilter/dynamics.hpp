#ifndef SAFEFILTER_DYNAMICS_HPP_
#define SAFEFILTER_DYNAMICS_HPP_

#include <variant>

#include "safefilter/core.hpp"

namespace safefilter {

struct PlantState
{
  Vector position;
  Vector velocity;
};

/// x' = v_command.
struct SingleIntegrator
{
};

/// x' = v, v' = -K (v - v_command) with |v'| <= max_accel.
struct DoubleIntegrator
{
  double tracking_gain{4.0};
  double max_accel{10.0};
};

/// First-order velocity lag v' = (v_command - v) / tau, a stand-in for a
/// multirotor velocity loop.
struct VelocityLag
{
  double time_constant{0.25};
  double max_accel{10.0};
};

using PlantModel = std::variant<SingleIntegrator, DoubleIntegrator, VelocityLag>;

/// Physical speed cap enforced after every step [m/s].
inline constexpr double kMaxPlantSpeed = 5.0;

void validate(const PlantModel & model);

/// Advances the plant by dt with semi-implicit Euler.
PlantState step(const PlantState & state, const Vector & v_command, const PlantModel & model,
                double dt);

}  // namespace safefilter

#endif  // SAFEFILTER_DYNAMICS_HPP_
