#include <gtest/gtest.h>

#include <cmath>

#include "safefilter/dynamics.hpp"

namespace {

using safefilter::DoubleIntegrator;
using safefilter::PlantState;
using safefilter::SingleIntegrator;
using safefilter::Vector;
using safefilter::VelocityLag;

Vector v2(double x, double y)
{
  return Vector{{x, y}};
}

PlantState at_rest()
{
  return {v2(0, 0), v2(0, 0)};
}

TEST(Step, SingleIntegratorIsExact)
{
  const auto s = safefilter::step(at_rest(), v2(1, 0), SingleIntegrator{}, 0.1);
  EXPECT_EQ(s.position, v2(0.1, 0));
  const Vector cmd = v2(0.37, -1.21);
  const PlantState p{v2(0.3, 0.7), v2(0, 0)};
  const auto q = safefilter::step(p, cmd, SingleIntegrator{}, 0.013);
  EXPECT_EQ(q.position, (p.position + cmd * 0.013).eval());
}

TEST(Step, DoubleIntegratorTrackingLaw)
{
  const auto s = safefilter::step(at_rest(), v2(1, 0), DoubleIntegrator{2.0, 10.0}, 0.1);
  // u = (2, 0), semi-implicit Euler
  EXPECT_DOUBLE_EQ(s.velocity[0], 0.2);
  EXPECT_DOUBLE_EQ(s.position[0], 0.02);
}

TEST(Step, VelocityLag)
{
  const auto s = safefilter::step(at_rest(), v2(1, 0), VelocityLag{0.5, 10.0}, 0.05);
  EXPECT_DOUBLE_EQ(s.velocity[0], 0.1);
  EXPECT_DOUBLE_EQ(s.velocity[1], 0.0);
}

TEST(Step, DoubleIntegratorDecayRatio)
{
  const double K = 4.0;
  const double dt = 0.01;
  PlantState s = at_rest();
  const Vector cmd = v2(0.3, 0.2);
  double err = (s.velocity - cmd).norm();
  for (int k = 0; k < 200; ++k) {
    s = safefilter::step(s, cmd, DoubleIntegrator{K, 100.0}, dt);
    const double next = (s.velocity - cmd).norm();
    EXPECT_NEAR(next / err, 1.0 - K * dt, 1e-9);
    err = next;
    if (err < 1e-250) {
      break;
    }
  }
}

TEST(Step, ZeroCommandEnergyNonIncreasing)
{
  PlantState s{v2(0, 0), v2(3, -1)};
  double speed = s.velocity.norm();
  for (int k = 0; k < 500; ++k) {
    s = safefilter::step(s, v2(0, 0), DoubleIntegrator{4.0, 2.0}, 0.01);
    EXPECT_LE(s.velocity.norm(), speed + 1e-15);
    speed = s.velocity.norm();
  }
}

TEST(Step, AccelerationClampAndSpeedCap)
{
  const auto s = safefilter::step(at_rest(), v2(100, 0), DoubleIntegrator{4.0, 10.0}, 0.1);
  EXPECT_DOUBLE_EQ(s.velocity[0], 1.0);
  PlantState p = at_rest();
  for (int k = 0; k < 1000; ++k) {
    p = safefilter::step(p, v2(100, 100), VelocityLag{0.1, 50.0}, 0.01);
    EXPECT_LE(p.velocity.norm(), safefilter::kMaxPlantSpeed + 1e-12);
  }
  const auto q = safefilter::step(at_rest(), v2(30, 40), SingleIntegrator{}, 1.0);
  EXPECT_NEAR(q.position.norm(), safefilter::kMaxPlantSpeed, 1e-12);
}

TEST(Step, Errors)
{
  EXPECT_THROW(safefilter::step(at_rest(), v2(1, 0), SingleIntegrator{}, 0.0), std::invalid_argument);
  EXPECT_THROW(safefilter::step(at_rest(), v2(1, 0), SingleIntegrator{}, -0.1), std::invalid_argument);
  EXPECT_THROW(safefilter::step(at_rest(), Vector{{1.0, 0.0, 0.0}}, SingleIntegrator{}, 0.1),
               safefilter::DimensionMismatch);
  EXPECT_THROW(safefilter::validate(safefilter::PlantModel{DoubleIntegrator{0.0, 1.0}}),
               std::invalid_argument);
  EXPECT_THROW(safefilter::validate(safefilter::PlantModel{VelocityLag{0.1, -1.0}}),
               std::invalid_argument);
}

}  // namespace
