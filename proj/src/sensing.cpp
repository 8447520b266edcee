#include "safefilter/sensing.hpp"

#include <cmath>
#include <limits>
#include <optional>
#include <random>
#include <stdexcept>

namespace safefilter {

namespace {

using Eigen::Vector2d;

double cross(const Vector2d & a, const Vector2d & b) { return a.x() * b.y() - a.y() * b.x(); }

// Smallest t > 0 with |o + t d - c| = r, origin assumed outside the disc.
std::optional<double> ray_circle(const Vector2d & o, const Vector2d & d, const Vector2d & c,
                                 double r)
{
  const Vector2d f = o - c;
  const double b = f.dot(d);
  const double disc = b * b - (f.squaredNorm() - r * r);
  if (disc < 0.0) {
    return std::nullopt;
  }
  const double sq = std::sqrt(disc);
  for (double t : {-b - sq, -b + sq}) {
    if (t > 0.0) {
      return t;
    }
  }
  return std::nullopt;
}

std::optional<double> ray_segment(const Vector2d & o, const Vector2d & d, const Vector2d & p,
                                  const Vector2d & q)
{
  const Vector2d e = q - p;
  const double denom = cross(d, e);
  if (std::abs(denom) < 1e-15) {
    return std::nullopt;
  }
  const Vector2d w = p - o;
  const double t = cross(w, e) / denom;
  const double s = cross(w, d) / denom;
  if (t > 0.0 && s >= 0.0 && s <= 1.0) {
    return t;
  }
  return std::nullopt;
}

std::optional<double> ray_obstacle(const Vector2d & o, const Vector2d & d, const Obstacle & obs)
{
  if (const auto * c = std::get_if<Circle<double>>(&obs)) {
    return ray_circle(o, d, c->center.head<2>(), c->radius);
  }
  const auto & s = std::get<Segment<double>>(obs);
  const Vector2d a = s.a.head<2>();
  const Vector2d b = s.b.head<2>();
  if (s.thickness == 0.0) {
    return ray_segment(o, d, a, b);
  }
  const Vector2d dir = (b - a).normalized();
  const Vector2d n(-dir.y(), dir.x());
  std::optional<double> best;
  auto keep = [&best](std::optional<double> t) {
    if (t && (!best || *t < *best)) {
      best = t;
    }
  };
  keep(ray_circle(o, d, a, s.thickness));
  keep(ray_circle(o, d, b, s.thickness));
  keep(ray_segment(o, d, a + s.thickness * n, b + s.thickness * n));
  keep(ray_segment(o, d, a - s.thickness * n, b - s.thickness * n));
  return best;
}

}  // namespace

std::vector<Vector> Scan::hit_points() const
{
  std::vector<Vector> points;
  for (const auto & beam : beams) {
    if (beam.hit) {
      Vector p(2);
      p << origin[0] + beam.range * std::cos(beam.angle), origin[1] + beam.range * std::sin(beam.angle);
      points.push_back(std::move(p));
    }
  }
  return points;
}

void validate(const LidarSpec & spec)
{
  if (spec.beam_count <= 0) {
    throw std::invalid_argument("lidar: beam_count must be > 0");
  }
  if (!(spec.fov > 0.0 && spec.fov <= 2.0 * std::numbers::pi + 1e-12)) {
    throw std::invalid_argument("lidar: fov must lie in (0, 2*pi]");
  }
  if (!(spec.max_range > 0.0)) {
    throw std::invalid_argument("lidar: max_range must be > 0");
  }
  if (!(spec.range_noise >= 0.0)) {
    throw std::invalid_argument("lidar: range_noise must be >= 0");
  }
}

double beam_angle(const LidarSpec & spec, int i)
{
  return spec.mount_yaw - 0.5 * spec.fov + (i + 0.5) * spec.fov / spec.beam_count;
}

Scan scan(const Vector & origin, double heading, const Scene & scene, const LidarSpec & spec)
{
  require_same_size(origin.size(), 2, "scan");
  validate(spec);
  if (clearance(origin, scene) <= 0.0) {
    throw InsideObstacle("scan: origin inside an obstacle");
  }

  std::mt19937_64 rng(spec.seed);
  std::uniform_real_distribution<double> noise(-spec.range_noise, spec.range_noise);

  const Vector2d o = origin.head<2>();
  Scan out{origin, spec.max_range, {}};
  out.beams.reserve(static_cast<std::size_t>(spec.beam_count));
  for (int i = 0; i < spec.beam_count; ++i) {
    const double angle = heading + beam_angle(spec, i);
    const Vector2d d(std::cos(angle), std::sin(angle));
    double range = std::numeric_limits<double>::infinity();
    for (const auto & obs : scene.obstacles) {
      if (auto t = ray_obstacle(o, d, obs); t && *t < range) {
        range = *t;
      }
    }
    if (range <= spec.max_range) {
      if (spec.range_noise > 0.0) {
        range = std::clamp(range + noise(rng), 1e-9, spec.max_range);
      }
      out.beams.push_back({angle, range, true});
    } else {
      out.beams.push_back({angle, spec.max_range, false});
    }
  }
  return out;
}

BarrierEval<double> scan_barrier(const Scan & scan, double D_obs)
{
  const Beam * closest = nullptr;
  for (const auto & beam : scan.beams) {
    if (beam.hit && (closest == nullptr || beam.range < closest->range)) {
      closest = &beam;
    }
  }
  if (closest == nullptr) {
    throw NoObstacleInView("scan_barrier: no hit points in scan");
  }
  Vector grad(2);
  grad << -std::cos(closest->angle), -std::sin(closest->angle);
  return {closest->range - D_obs, grad};
}

}  // namespace safefilter
