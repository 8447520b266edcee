#ifndef SAFEFILTER_APF_HPP_
#define SAFEFILTER_APF_HPP_

#include <cmath>
#include <span>

#include "safefilter/core.hpp"

namespace safefilter {

/// Scalar value of a potential together with its gradient.
template<typename Scalar>
struct PotentialEval
{
  Scalar value;
  VectorX<Scalar> gradient;
};

/// Quadratic attractive potential (1/2) K_att |x - goal|^2.
///
/// It satisfies the quadratic sandwich c_lower |x - goal|^2 <= U <= c_upper |x - goal|^2
/// with equality, c_lower = c_upper = K_att / 2.
template<typename Scalar>
struct AttractivePotential
{
  VectorX<Scalar> goal;
  Scalar K_att{1};

  Scalar value(const VectorX<Scalar> & x) const
  {
    require_same_size(x.size(), goal.size(), "attractive_value");
    return Scalar(0.5) * K_att * (x - goal).squaredNorm();
  }

  VectorX<Scalar> gradient(const VectorX<Scalar> & x) const
  {
    require_same_size(x.size(), goal.size(), "attractive_gradient");
    return K_att * (x - goal);
  }

  Scalar c_lower() const { return Scalar(0.5) * K_att; }
  Scalar c_upper() const { return Scalar(0.5) * K_att; }
};

template<typename Scalar>
Scalar attractive_value(const VectorX<Scalar> & x, const VectorX<Scalar> & goal, Scalar K_att)
{
  return AttractivePotential<Scalar>{goal, K_att}.value(x);
}

template<typename Scalar>
VectorX<Scalar> attractive_gradient(const VectorX<Scalar> & x, const VectorX<Scalar> & goal,
                                    Scalar K_att)
{
  return AttractivePotential<Scalar>{goal, K_att}.gradient(x);
}

/// Khatib repulsive potential as a function of the shell distance rho.
/// Zero beyond rho0, (1/2) K_rep (1/rho - 1/rho0)^2 inside. Throws
/// InsideObstacle for rho <= 0.
template<typename Scalar>
Scalar repulsive_value_khatib(Scalar rho, Scalar K_rep, Scalar rho0)
{
  if (!(rho > Scalar(0))) {
    throw InsideObstacle("repulsive_value_khatib: rho <= 0");
  }
  if (rho > rho0) {
    return Scalar(0);
  }
  const Scalar s = Scalar(1) / rho - Scalar(1) / rho0;
  return Scalar(0.5) * K_rep * s * s;
}

/// dU/drho of the Khatib potential (non-positive).
template<typename Scalar>
Scalar repulsive_slope_khatib(Scalar rho, Scalar K_rep, Scalar rho0)
{
  if (!(rho > Scalar(0))) {
    throw InsideObstacle("repulsive_slope_khatib: rho <= 0");
  }
  if (rho > rho0) {
    return Scalar(0);
  }
  return -K_rep / (rho * rho) * (Scalar(1) / rho - Scalar(1) / rho0);
}

/// Gradient of the Khatib potential about a point obstacle x_obs.
/// The direction is the chain-rule direction (x - x_obs) / |x - x_obs|.
template<typename Scalar>
VectorX<Scalar> repulsive_gradient_khatib(const VectorX<Scalar> & x, const VectorX<Scalar> & x_obs,
                                          Scalar rho, Scalar K_rep, Scalar rho0)
{
  require_same_size(x.size(), x_obs.size(), "repulsive_gradient_khatib");
  const Scalar slope = repulsive_slope_khatib(rho, K_rep, rho0);
  const VectorX<Scalar> offset = x - x_obs;
  const Scalar r = offset.norm();
  if (!(r > Scalar(0))) {
    throw DegenerateDirection("repulsive_gradient_khatib: x coincides with x_obs");
  }
  if (slope == Scalar(0)) {
    return VectorX<Scalar>::Zero(x.size());
  }
  return slope * offset / r;
}

/// Khatib potential against one obstacle, with rho = distance - D_obs
/// measured to the closest surface point.
template<typename Scalar>
PotentialEval<Scalar> khatib_potential(const VectorX<Scalar> & x, const BasicObstacle<Scalar> & obs,
                                       const BasicControllerConfig<Scalar> & cfg)
{
  const Scalar rho = distance_to_obstacle(x, obs) - cfg.D_obs;
  const Scalar value = repulsive_value_khatib(rho, cfg.K_rep, cfg.rho0);
  if (rho > cfg.rho0) {
    return {value, VectorX<Scalar>::Zero(x.size())};
  }
  const auto q = query_surface(x, obs);
  return {value, repulsive_slope_khatib(rho, cfg.K_rep, cfg.rho0) * q.normal};
}

/// Sum of the Khatib potentials of every obstacle in the scene.
template<typename Scalar>
PotentialEval<Scalar> khatib_potential(const VectorX<Scalar> & x, const BasicScene<Scalar> & scene,
                                       const BasicControllerConfig<Scalar> & cfg)
{
  PotentialEval<Scalar> total{Scalar(0), VectorX<Scalar>::Zero(x.size())};
  for (const auto & obs : scene.obstacles) {
    const auto e = khatib_potential(x, obs, cfg);
    total.value += e.value;
    total.gradient += e.gradient;
  }
  return total;
}

/// Gaussian repulsive force (x - x_i) K_rep exp(-|x - x_i|^2 / rho0).
/// This variant is a force field only; no potential is exposed.
template<typename Scalar>
VectorX<Scalar> repulsive_force_gaussian(const VectorX<Scalar> & x, const VectorX<Scalar> & x_i,
                                         Scalar K_rep, Scalar rho0)
{
  require_same_size(x.size(), x_i.size(), "repulsive_force_gaussian");
  const VectorX<Scalar> offset = x - x_i;
  return offset * (K_rep * std::exp(-offset.squaredNorm() / rho0));
}

/// Unsaturated APF field -grad U_att - sum_i grad U_rep,i.
template<typename Scalar>
VectorX<Scalar> apf_force(const VectorX<Scalar> & x, const BasicScene<Scalar> & scene,
                          const BasicControllerConfig<Scalar> & cfg)
{
  const AttractivePotential<Scalar> att{scene.goal, cfg.K_att};
  return -att.gradient(x) - khatib_potential(x, scene, cfg).gradient;
}

/// Classical APF velocity command with Khatib repulsion, saturated to v_max.
template<typename Scalar>
VectorX<Scalar> apf_velocity(const VectorX<Scalar> & x, const BasicScene<Scalar> & scene,
                             const BasicControllerConfig<Scalar> & cfg)
{
  return saturate(apf_force(x, scene, cfg), cfg.v_max);
}

/// APF velocity command with Gaussian repulsion from each point in `points`
/// (scan hits or closest obstacle points), saturated to v_max.
template<typename Scalar>
VectorX<Scalar> apf_gaussian_velocity(const VectorX<Scalar> & x, const VectorX<Scalar> & goal,
                                      std::span<const VectorX<Scalar>> points,
                                      const BasicControllerConfig<Scalar> & cfg)
{
  VectorX<Scalar> v = -attractive_gradient(x, goal, cfg.K_att);
  for (const auto & p : points) {
    v += repulsive_force_gaussian(x, p, cfg.K_rep, cfg.rho0);
  }
  return saturate(v, cfg.v_max);
}

}  // namespace safefilter

#endif  // SAFEFILTER_APF_HPP_
