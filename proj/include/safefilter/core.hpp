#ifndef SAFEFILTER_CORE_HPP_
#define SAFEFILTER_CORE_HPP_

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <stdexcept>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "safefilter/errors.hpp"

namespace safefilter {

template<typename Scalar>
using VectorX = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

using Vector = VectorX<double>;

/// Solid ball of the given radius. A zero radius models a point obstacle.
template<typename Scalar>
struct Circle
{
  VectorX<Scalar> center;
  Scalar radius{0};
};

/// Capsule around the segment a-b. Thickness is the capsule radius.
template<typename Scalar>
struct Segment
{
  VectorX<Scalar> a;
  VectorX<Scalar> b;
  Scalar thickness{0};
};

template<typename Scalar>
using BasicObstacle = std::variant<Circle<Scalar>, Segment<Scalar>>;

template<typename Scalar>
struct Box
{
  VectorX<Scalar> lo;
  VectorX<Scalar> hi;
};

template<typename Scalar>
struct BasicScene
{
  VectorX<Scalar> goal;
  std::vector<BasicObstacle<Scalar>> obstacles;
  Box<Scalar> bounds;
};

/// Gains and shaping parameters shared by the APF and CBF controllers.
template<typename Scalar>
struct BasicControllerConfig
{
  Scalar K_att{1};
  Scalar K_rep{1};
  Scalar rho0{1};           // region of influence [m]
  Scalar D_obs{0.5};        // minimum distance [m]
  Scalar alpha_gain{1};     // linear class-K gain [1/s]
  Scalar delta{0.001};      // APF barrier offset, in (0,1)
  Scalar tracking_gain{4};  // velocity tracking gain [1/s]
  Scalar v_max{2};          // command saturation [m/s]
};

using Obstacle = BasicObstacle<double>;
using Scene = BasicScene<double>;
using ControllerConfig = BasicControllerConfig<double>;

/// Signed distance from a point to an obstacle surface together with the
/// outward unit normal and the surface point closest to x.
template<typename Scalar>
struct SurfaceQuery
{
  Scalar distance;
  VectorX<Scalar> normal;
  VectorX<Scalar> surface_point;
};

namespace detail {

template<typename Scalar>
VectorX<Scalar> closest_on_segment(const VectorX<Scalar> & x, const Segment<Scalar> & s)
{
  const VectorX<Scalar> ab = s.b - s.a;
  const Scalar len2 = ab.squaredNorm();
  if (len2 <= Scalar(0)) {
    return s.a;
  }
  Scalar t = (x - s.a).dot(ab) / len2;
  t = std::clamp(t, Scalar(0), Scalar(1));
  return s.a + t * ab;
}

// Core point of the obstacle (center or closest point on the centerline) and
// the radius of the shape around it.
template<typename Scalar>
std::pair<VectorX<Scalar>, Scalar> core_point(const VectorX<Scalar> & x,
                                              const BasicObstacle<Scalar> & obs)
{
  if (const auto * c = std::get_if<Circle<Scalar>>(&obs)) {
    require_same_size(x.size(), c->center.size(), "distance_to_obstacle");
    return {c->center, c->radius};
  }
  const auto & s = std::get<Segment<Scalar>>(obs);
  require_same_size(x.size(), s.a.size(), "distance_to_obstacle");
  return {closest_on_segment(x, s), s.thickness};
}

}  // namespace detail

/// Euclidean distance from x to the obstacle surface, negative inside.
template<typename Scalar>
Scalar distance_to_obstacle(const VectorX<Scalar> & x, const BasicObstacle<Scalar> & obs)
{
  const auto [core, radius] = detail::core_point(x, obs);
  return (x - core).norm() - radius;
}

/// Distance plus the outward normal. Throws DegenerateDirection when x sits on
/// the obstacle's center (or centerline) where the normal is undefined.
template<typename Scalar>
SurfaceQuery<Scalar> query_surface(const VectorX<Scalar> & x, const BasicObstacle<Scalar> & obs)
{
  const auto [core, radius] = detail::core_point(x, obs);
  const VectorX<Scalar> offset = x - core;
  const Scalar r = offset.norm();
  if (!(r > Scalar(0))) {
    throw DegenerateDirection("query_surface: point coincides with obstacle core");
  }
  const VectorX<Scalar> n = offset / r;
  return {r - radius, n, core + radius * n};
}

template<typename Scalar>
struct ClosestObstacle
{
  std::size_t index;
  Scalar distance;
};

/// Obstacle with minimum signed distance; ties go to the lowest index.
template<typename Scalar>
ClosestObstacle<Scalar> closest_obstacle(const VectorX<Scalar> & x, const BasicScene<Scalar> & scene)
{
  if (scene.obstacles.empty()) {
    throw std::invalid_argument("closest_obstacle: scene has no obstacles");
  }
  ClosestObstacle<Scalar> best{0, std::numeric_limits<Scalar>::infinity()};
  for (std::size_t i = 0; i < scene.obstacles.size(); ++i) {
    const Scalar d = distance_to_obstacle(x, scene.obstacles[i]);
    if (d < best.distance) {
      best = {i, d};
    }
  }
  return best;
}

/// Minimum distance to any obstacle, +inf for an empty scene.
template<typename Scalar>
Scalar clearance(const VectorX<Scalar> & x, const BasicScene<Scalar> & scene)
{
  Scalar d = std::numeric_limits<Scalar>::infinity();
  for (const auto & obs : scene.obstacles) {
    d = std::min(d, distance_to_obstacle(x, obs));
  }
  return d;
}

/// Scales v down to norm v_max if it is longer.
template<typename Derived>
typename Derived::PlainObject saturate(const Eigen::MatrixBase<Derived> & v,
                                       typename Derived::Scalar v_max)
{
  const auto n = v.norm();
  if (n > v_max && n > 0) {
    return v * (v_max / n);
  }
  return v;
}

template<typename Scalar>
void validate(const BasicControllerConfig<Scalar> & cfg)
{
  auto positive = [](Scalar v, const char * name) {
    if (!(v > Scalar(0))) {
      throw std::invalid_argument(std::string("controller config: ") + name + " must be > 0");
    }
  };
  positive(cfg.K_att, "K_att");
  positive(cfg.K_rep, "K_rep");
  positive(cfg.rho0, "rho0");
  positive(cfg.alpha_gain, "alpha");
  positive(cfg.delta, "delta");
  positive(cfg.tracking_gain, "tracking_gain");
  positive(cfg.v_max, "v_max");
  if (!(cfg.D_obs >= Scalar(0))) {
    throw std::invalid_argument("controller config: D_obs must be >= 0");
  }
  if (!(cfg.delta < Scalar(1))) {
    throw std::invalid_argument("controller config: delta must be < 1");
  }
}

template<typename Scalar>
void validate(const BasicObstacle<Scalar> & obs)
{
  if (const auto * c = std::get_if<Circle<Scalar>>(&obs)) {
    if (!(c->radius >= Scalar(0))) {
      throw std::invalid_argument("circle radius must be >= 0");
    }
    return;
  }
  const auto & s = std::get<Segment<Scalar>>(obs);
  require_same_size(s.a.size(), s.b.size(), "segment");
  if (!(s.thickness >= Scalar(0))) {
    throw std::invalid_argument("segment thickness must be >= 0");
  }
  if ((s.a - s.b).norm() == Scalar(0)) {
    throw std::invalid_argument("segment endpoints must be distinct");
  }
}

/// Checks obstacle shapes and that the goal lies strictly outside every obstacle.
template<typename Scalar>
void validate(const BasicScene<Scalar> & scene)
{
  for (const auto & obs : scene.obstacles) {
    validate(obs);
  }
  if (!scene.obstacles.empty() && !(clearance(scene.goal, scene) > Scalar(0))) {
    throw std::invalid_argument("scene goal must lie strictly outside every obstacle");
  }
}

}  // namespace safefilter

#endif  // SAFEFILTER_CORE_HPP_
