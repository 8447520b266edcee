#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "oracles.hpp"
#include "safefilter/core.hpp"

namespace {

using safefilter::Circle;
using safefilter::Obstacle;
using safefilter::Scene;
using safefilter::Segment;
using safefilter::Vector;

Vector v2(double x, double y)
{
  return Vector{{x, y}};
}

TEST(Distance, CircleOutsideAndInside)
{
  const Obstacle c = Circle<double>{v2(0, 0), 0.5};
  EXPECT_DOUBLE_EQ(safefilter::distance_to_obstacle(v2(1, 0), c), 0.5);
  EXPECT_DOUBLE_EQ(safefilter::distance_to_obstacle(v2(0, 0), c), -0.5);
}

TEST(Distance, SegmentAbove)
{
  const Obstacle s = Segment<double>{v2(-1, 0), v2(1, 0), 0.0};
  EXPECT_DOUBLE_EQ(safefilter::distance_to_obstacle(v2(0, 1), s), 1.0);
}

TEST(Distance, SegmentMatchesOracle)
{
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> u(-3.0, 3.0);
  for (int k = 0; k < 200; ++k) {
    const Vector a = v2(u(rng), u(rng));
    const Vector b = v2(u(rng), u(rng));
    const Vector p = v2(u(rng), u(rng));
    const double th = 0.1 * std::abs(u(rng));
    const Obstacle s = Segment<double>{a, b, th};
    EXPECT_NEAR(safefilter::distance_to_obstacle(p, s), oracle::segment_distance(p, a, b) - th, 1e-7);
  }
}

TEST(Distance, ThreeDimensional)
{
  const Obstacle c = Circle<double>{Vector{{0.0, 0.0, 0.0}}, 1.0};
  EXPECT_DOUBLE_EQ(safefilter::distance_to_obstacle(Vector{{0.0, 0.0, 3.0}}, c), 2.0);
}

TEST(Distance, DimensionMismatchThrows)
{
  const Obstacle c = Circle<double>{v2(0, 0), 0.5};
  EXPECT_THROW(safefilter::distance_to_obstacle(Vector{{1.0, 0.0, 0.0}}, c),
               safefilter::DimensionMismatch);
}

TEST(Distance, OneLipschitz)
{
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(-4.0, 4.0);
  const std::vector<Obstacle> obs = {Circle<double>{v2(0.5, -1), 0.7},
                                     Segment<double>{v2(-2, 1), v2(2, 2), 0.2}};
  for (int k = 0; k < 1000; ++k) {
    const Vector x1 = v2(u(rng), u(rng));
    const Vector x2 = v2(u(rng), u(rng));
    for (const auto & o : obs) {
      const double d1 = safefilter::distance_to_obstacle(x1, o);
      const double d2 = safefilter::distance_to_obstacle(x2, o);
      EXPECT_LE(std::abs(d1 - d2), (x1 - x2).norm() + 1e-12);
    }
  }
}

TEST(Closest, ExampleScene)
{
  Scene scene{v2(3, 5), {Circle<double>{v2(1, 2), 0.5}, Circle<double>{v2(2.5, 3), 0.5}}, {}};
  const auto c = safefilter::closest_obstacle(v2(0, 0), scene);
  EXPECT_EQ(c.index, 0u);
  EXPECT_NEAR(c.distance, std::sqrt(5.0) - 0.5, 1e-12);
}

TEST(Closest, TieGoesToLowestIndex)
{
  Scene scene{v2(5, 5), {Circle<double>{v2(1, 0), 0.2}, Circle<double>{v2(-1, 0), 0.2}}, {}};
  EXPECT_EQ(safefilter::closest_obstacle(v2(0, 0), scene).index, 0u);
  std::swap(scene.obstacles[0], scene.obstacles[1]);
  EXPECT_EQ(safefilter::closest_obstacle(v2(0, 0), scene).index, 0u);
}

TEST(Closest, SingleObstacle)
{
  Scene scene{v2(5, 5), {Circle<double>{v2(3, 4), 1.0}}, {}};
  const auto c = safefilter::closest_obstacle(v2(0, 0), scene);
  EXPECT_EQ(c.index, 0u);
  EXPECT_DOUBLE_EQ(c.distance, 4.0);
}

TEST(Closest, EmptySceneThrows)
{
  Scene scene{v2(5, 5), {}, {}};
  EXPECT_THROW(safefilter::closest_obstacle(v2(0, 0), scene), std::invalid_argument);
  EXPECT_TRUE(std::isinf(safefilter::clearance(v2(0, 0), scene)));
}

TEST(Closest, MatchesBruteForce)
{
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> u(-5.0, 5.0);
  for (int trial = 0; trial < 50; ++trial) {
    Scene scene{v2(9, 9), {}, {}};
    for (int i = 0; i < 6; ++i) {
      if (i % 2 == 0) {
        scene.obstacles.push_back(Circle<double>{v2(u(rng), u(rng)), 0.1 + 0.05 * std::abs(u(rng))});
      } else {
        scene.obstacles.push_back(Segment<double>{v2(u(rng), u(rng)), v2(u(rng), u(rng)), 0.05});
      }
    }
    const Vector x = v2(u(rng), u(rng));
    double best = INFINITY;
    std::size_t idx = 0;
    for (std::size_t i = 0; i < scene.obstacles.size(); ++i) {
      const double d = safefilter::distance_to_obstacle(x, scene.obstacles[i]);
      if (d < best) {
        best = d;
        idx = i;
      }
    }
    const auto c = safefilter::closest_obstacle(x, scene);
    EXPECT_EQ(c.index, idx);
    EXPECT_EQ(c.distance, best);
  }
}

TEST(Surface, NormalAndPoint)
{
  const Obstacle s = Segment<double>{v2(-1, 0), v2(1, 0), 0.25};
  const auto q = safefilter::query_surface(v2(2, 1), s);
  EXPECT_NEAR(q.distance, std::sqrt(2.0) - 0.25, 1e-12);
  EXPECT_NEAR(q.normal[0], 1 / std::sqrt(2.0), 1e-12);
  EXPECT_NEAR(q.surface_point[1], 0.25 / std::sqrt(2.0), 1e-12);
  EXPECT_THROW(safefilter::query_surface(v2(0, 0), s), safefilter::DegenerateDirection);
}

TEST(Validate, RejectsBadShapes)
{
  EXPECT_THROW(safefilter::validate(Obstacle{Circle<double>{v2(0, 0), -1}}), std::invalid_argument);
  EXPECT_THROW(safefilter::validate(Obstacle{Segment<double>{v2(0, 0), v2(0, 0), 0}}),
               std::invalid_argument);
  Scene scene{v2(0, 0), {Circle<double>{v2(0, 0), 1}}, {}};
  EXPECT_THROW(safefilter::validate(scene), std::invalid_argument);
  safefilter::ControllerConfig cfg;
  cfg.delta = 1.0;
  EXPECT_THROW(safefilter::validate(cfg), std::invalid_argument);
}

TEST(Saturate, ScalesLongVectorsOnly)
{
  EXPECT_EQ(safefilter::saturate(v2(0.3, 0.4), 1.0), v2(0.3, 0.4));
  const Vector s = safefilter::saturate(v2(3, 4), 1.0);
  EXPECT_NEAR(s.norm(), 1.0, 1e-15);
  EXPECT_NEAR(s[0], 0.6, 1e-15);
}

}  // namespace
