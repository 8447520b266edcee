#ifndef SAFEFILTER_CBF_HPP_
#define SAFEFILTER_CBF_HPP_

#include <concepts>
#include <functional>
#include <stdexcept>

#include "safefilter/apf.hpp"
#include "safefilter/core.hpp"

namespace safefilter {

template<typename Scalar>
using MatrixX = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;

/// Barrier value h(x) and its gradient. h >= 0 is the safe set.
template<typename Scalar>
struct BarrierEval
{
  Scalar h;
  VectorX<Scalar> grad_h;
};

/// Linear extended class-K function alpha(h) = gain * h.
template<typename Scalar>
struct LinearClassK
{
  Scalar gain{1};

  Scalar operator()(Scalar h) const { return gain * h; }
};

template<typename F, typename Scalar>
concept ClassKFunction = std::invocable<const F &, Scalar> &&
  std::convertible_to<std::invoke_result_t<const F &, Scalar>, Scalar>;

/// Control-affine plant x' = f(x) + g(x) u.
template<typename Scalar>
struct AffinePlant
{
  std::function<VectorX<Scalar>(const VectorX<Scalar> &)> drift;
  std::function<MatrixX<Scalar>(const VectorX<Scalar> &)> actuation;
};

template<typename Scalar>
struct FilterResult
{
  VectorX<Scalar> value;
  bool intervened{false};
};

/// Distance barrier of the closest obstacle: h = distance - D_obs with the
/// outward normal as gradient. Ties go to the lowest obstacle index.
template<typename Scalar>
BarrierEval<Scalar> distance_barrier(const VectorX<Scalar> & x, const BasicScene<Scalar> & scene,
                                     Scalar D_obs)
{
  const auto closest = closest_obstacle(x, scene);
  const auto q = query_surface(x, scene.obstacles[closest.index]);
  return {q.distance - D_obs, q.normal};
}

/// Barrier built from a repulsive potential: h = 1/(1 + U) - delta,
/// grad h = -grad U / (1 + U)^2.
template<typename Scalar>
BarrierEval<Scalar> barrier_from_apf(Scalar U_rep, const VectorX<Scalar> & U_rep_gradient,
                                     Scalar delta)
{
  if (!(U_rep >= Scalar(0))) {
    throw std::invalid_argument("barrier_from_apf: repulsive potential must be >= 0");
  }
  if (!(delta > Scalar(0) && delta < Scalar(1))) {
    throw std::invalid_argument("barrier_from_apf: delta must lie in (0, 1)");
  }
  const Scalar s = Scalar(1) + U_rep;
  return {Scalar(1) / s - delta, -U_rep_gradient / (s * s)};
}

/// Min-norm filter for the single integrator:
///   argmin |v - v_des|^2  s.t.  grad_h' v >= -alpha(h)
/// solved in closed form. The output is v_des untouched when the nominal
/// input already satisfies the constraint.
template<typename Scalar, ClassKFunction<Scalar> Alpha = LinearClassK<Scalar>>
FilterResult<Scalar> filter_single_integrator(const VectorX<Scalar> & v_des,
                                              const BarrierEval<Scalar> & be, const Alpha & alpha)
{
  require_same_size(v_des.size(), be.grad_h.size(), "filter_single_integrator");
  const Scalar gg = be.grad_h.squaredNorm();
  if (!(gg > Scalar(0))) {
    throw DegenerateDirection("filter_single_integrator: zero barrier gradient");
  }
  const Scalar psi = be.grad_h.dot(v_des) + alpha(be.h);
  if (psi >= Scalar(0)) {
    return {v_des, false};
  }
  return {v_des - be.grad_h * (psi / gg), true};
}

/// Min-norm filter for a control-affine plant:
///   argmin |u - u_des|^2  s.t.  L_f h + L_g h u >= -alpha(h)
/// Throws InfeasibleConstraint when L_g h = 0 and the drift alone violates
/// the constraint.
template<typename Scalar, ClassKFunction<Scalar> Alpha = LinearClassK<Scalar>>
FilterResult<Scalar> filter_affine(const VectorX<Scalar> & u_des, const AffinePlant<Scalar> & plant,
                                   const VectorX<Scalar> & x, const BarrierEval<Scalar> & be,
                                   const Alpha & alpha)
{
  require_same_size(x.size(), be.grad_h.size(), "filter_affine");
  const VectorX<Scalar> f = plant.drift(x);
  const MatrixX<Scalar> g = plant.actuation(x);
  require_same_size(f.size(), x.size(), "filter_affine drift");
  require_same_size(g.rows(), x.size(), "filter_affine actuation rows");
  require_same_size(g.cols(), u_des.size(), "filter_affine actuation cols");

  const Scalar Lf_h = be.grad_h.dot(f);
  const VectorX<Scalar> Lg_h = g.transpose() * be.grad_h;  // L_g h as a column
  const Scalar psi = Lf_h + Lg_h.dot(u_des) + alpha(be.h);
  if (psi >= Scalar(0)) {
    return {u_des, false};
  }
  const Scalar norm2 = Lg_h.squaredNorm();
  if (!(norm2 > Scalar(0))) {
    throw InfeasibleConstraint("filter_affine: L_g h = 0 and L_f h + alpha(h) < 0");
  }
  return {u_des - Lg_h * (psi / norm2), true};
}

/// Nominal and filtered velocity for one control tick.
template<typename Scalar>
struct SafeCommand
{
  VectorX<Scalar> v_des;
  VectorX<Scalar> v_star;
  BarrierEval<Scalar> barrier;
  bool intervened{false};
};

/// P-controller toward the goal filtered through the distance barrier of the
/// closest obstacle. An empty scene passes v_des through.
template<typename Scalar>
SafeCommand<Scalar> cbf_command(const VectorX<Scalar> & x, const BasicScene<Scalar> & scene,
                                const BasicControllerConfig<Scalar> & cfg)
{
  const VectorX<Scalar> v_des = -attractive_gradient(x, scene.goal, cfg.K_att);
  if (scene.obstacles.empty()) {
    const Scalar inf = std::numeric_limits<Scalar>::infinity();
    return {v_des, saturate(v_des, cfg.v_max), {inf, VectorX<Scalar>::Zero(x.size())}, false};
  }
  const auto be = distance_barrier(x, scene, cfg.D_obs);
  const auto r = filter_single_integrator(v_des, be, LinearClassK<Scalar>{cfg.alpha_gain});
  return {v_des, saturate(r.value, cfg.v_max), be, r.intervened};
}

/// Attractive potential as nominal velocity, filtered through the barrier
/// obtained from the summed Khatib repulsive potential. Where the repulsive
/// potential is identically zero the gradient vanishes while h = 1 - delta > 0,
/// and the nominal velocity passes through.
template<typename Scalar>
SafeCommand<Scalar> apf_cbf_command(const VectorX<Scalar> & x, const BasicScene<Scalar> & scene,
                                    const BasicControllerConfig<Scalar> & cfg)
{
  const VectorX<Scalar> v_des = -attractive_gradient(x, scene.goal, cfg.K_att);
  const auto pot = khatib_potential(x, scene, cfg);
  const auto be = barrier_from_apf(pot.value, pot.gradient, cfg.delta);
  if (be.grad_h.squaredNorm() == Scalar(0)) {
    return {v_des, saturate(v_des, cfg.v_max), be, false};
  }
  if (be.h <= Scalar(0) && !scene.obstacles.empty() &&
      closest_obstacle(x, scene).distance > cfg.rho0 + cfg.D_obs)
  {
    throw std::invalid_argument("apf_cbf_command: delta too large, h <= 0 outside region of influence");
  }
  const auto r = filter_single_integrator(v_des, be, LinearClassK<Scalar>{cfg.alpha_gain});
  return {v_des, saturate(r.value, cfg.v_max), be, r.intervened};
}

template<typename Scalar>
VectorX<Scalar> apf_cbf_velocity(const VectorX<Scalar> & x, const BasicScene<Scalar> & scene,
                                 const BasicControllerConfig<Scalar> & cfg)
{
  return apf_cbf_command(x, scene, cfg).v_star;
}

}  // namespace safefilter

#endif  // SAFEFILTER_CBF_HPP_
