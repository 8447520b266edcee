#ifndef SAFEFILTER_SENSING_HPP_
#define SAFEFILTER_SENSING_HPP_

#include <cstdint>
#include <numbers>
#include <vector>

#include "safefilter/cbf.hpp"
#include "safefilter/core.hpp"

namespace safefilter {

/// Planar scanning range finder. Defaults follow a 1080-beam, 270 degree unit.
struct LidarSpec
{
  int beam_count{1080};
  double fov{1.5 * std::numbers::pi};  // [rad]
  double max_range{10.0};              // [m]
  double mount_yaw{0.0};               // [rad], relative to the body heading
  double range_noise{0.0};             // half-width of uniform additive noise [m]
  std::uint64_t seed{0};
};

struct Beam
{
  double angle;  // world frame [rad]
  double range;  // [m]
  bool hit;
};

struct Scan
{
  Vector origin;
  double max_range{10.0};
  std::vector<Beam> beams;

  /// World-frame points x_i of every beam that hit something.
  std::vector<Vector> hit_points() const;
};

void validate(const LidarSpec & spec);

/// Angle of beam i relative to the sensor frame; beams sit at the centers of
/// fov / beam_count wide bins.
double beam_angle(const LidarSpec & spec, int i);

/// Analytic ray cast of every beam against the scene's circles and capsules.
/// Throws InsideObstacle if the origin lies inside an obstacle.
Scan scan(const Vector & origin, double heading, const Scene & scene, const LidarSpec & spec);

/// h = min_i |origin - x_i| - D_obs over hit points, gradient pointing from the
/// closest hit back to the origin. Throws NoObstacleInView for an empty scan.
BarrierEval<double> scan_barrier(const Scan & scan, double D_obs);

}  // namespace safefilter

#endif  // SAFEFILTER_SENSING_HPP_
