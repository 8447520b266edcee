#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "oracles.hpp"
#include "safefilter/apf.hpp"

namespace {

using safefilter::Circle;
using safefilter::ControllerConfig;
using safefilter::Obstacle;
using safefilter::Scene;
using safefilter::Vector;

Vector v2(double x, double y)
{
  return Vector{{x, y}};
}

void expect_relative(const Vector & got, const Vector & want, double tol)
{
  const double scale = std::max(1.0, want.norm());
  EXPECT_LE((got - want).norm() / scale, tol) << got.transpose() << " vs " << want.transpose();
}

TEST(Attractive, Values)
{
  EXPECT_DOUBLE_EQ(safefilter::attractive_value(v2(3, 5), v2(3, 5), 1.0), 0.0);
  EXPECT_DOUBLE_EQ(safefilter::attractive_value(v2(0, 0), v2(3, 5), 1.0), 17.0);
  EXPECT_DOUBLE_EQ(safefilter::attractive_value(v2(0.3, -1), v2(3, 5), 2.0),
                   2.0 * safefilter::attractive_value(v2(0.3, -1), v2(3, 5), 1.0));
  const safefilter::AttractivePotential<double> p{v2(3, 5), 1.4};
  EXPECT_DOUBLE_EQ(p.c_lower(), 0.7);
  EXPECT_DOUBLE_EQ(p.value(v2(1, 1)), p.c_upper() * (v2(1, 1) - v2(3, 5)).squaredNorm());
}

TEST(Attractive, Gradient)
{
  EXPECT_EQ(safefilter::attractive_gradient(v2(0, 0), v2(3, 5), 1.0), v2(-3, -5));
  EXPECT_EQ(safefilter::attractive_gradient(v2(3, 5), v2(3, 5), 1.0), v2(0, 0));
}

TEST(Attractive, FiniteDifference)
{
  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> u(-5.0, 5.0);
  const Vector goal = v2(3, 5);
  for (int k = 0; k < 100; ++k) {
    const Vector x = v2(u(rng), u(rng));
    const auto fd = oracle::fd_gradient(
      [&](const Vector & y) { return safefilter::attractive_value(y, goal, 1.3); }, x);
    expect_relative(safefilter::attractive_gradient(x, goal, 1.3), fd, 1e-5);
  }
}

TEST(Khatib, Values)
{
  EXPECT_EQ(safefilter::repulsive_value_khatib(2.0, 1.0, 1.0), 0.0);
  EXPECT_EQ(safefilter::repulsive_value_khatib(1.0, 1.0, 1.0), 0.0);
  EXPECT_DOUBLE_EQ(safefilter::repulsive_value_khatib(0.5, 1.0, 1.0), 0.5);
  EXPECT_THROW(safefilter::repulsive_value_khatib(0.0, 1.0, 1.0), safefilter::InsideObstacle);
  EXPECT_THROW(safefilter::repulsive_value_khatib(-0.1, 1.0, 1.0), safefilter::InsideObstacle);
}

TEST(Khatib, BlowsUpAtShell)
{
  EXPECT_GT(safefilter::repulsive_value_khatib(1e-6, 1.0, 1.0), 1e11);
}

TEST(Khatib, ContinuousAtRho0)
{
  const double rho0 = 0.7;
  const double eps = 1e-9;
  EXPECT_NEAR(safefilter::repulsive_value_khatib(rho0 - eps, 2.0, rho0), 0.0, 1e-15);
  EXPECT_NEAR(safefilter::repulsive_slope_khatib(rho0 - eps, 2.0, rho0), 0.0, 1e-7);
  EXPECT_EQ(safefilter::repulsive_slope_khatib(rho0 + eps, 2.0, rho0), 0.0);
}

TEST(Khatib, GradientOutsideInfluenceIsZero)
{
  const Vector g = safefilter::repulsive_gradient_khatib(v2(3, 0), v2(0, 0), 2.5, 1.0, 1.0);
  EXPECT_EQ(g, v2(0, 0));
}

TEST(Khatib, ForcePointsAway)
{
  const Vector x = v2(0.8, 0.6);
  const Vector g = safefilter::repulsive_gradient_khatib(x, v2(0, 0), 0.5, 1.0, 1.0);
  const Vector force = -g;
  EXPECT_NEAR(std::abs(force.normalized().dot(x.normalized())), 1.0, 1e-12);
  EXPECT_GT(force.dot(x), 0.0);
}

TEST(Khatib, FiniteDifferencePointObstacle)
{
  std::mt19937_64 rng(2);
  std::uniform_real_distribution<double> ang(0.0, 2.0 * M_PI);
  std::uniform_real_distribution<double> frac(0.05, 0.95);
  const double D = 0.5;
  const double rho0 = 1.0;
  const Vector obs = v2(1, 2);
  for (int k = 0; k < 100; ++k) {
    const double r = D + frac(rng) * rho0;
    const double a = ang(rng);
    const Vector x = obs + r * v2(std::cos(a), std::sin(a));
    auto U = [&](const Vector & y) {
      return safefilter::repulsive_value_khatib((y - obs).norm() - D, 1.0, rho0);
    };
    const Vector g = safefilter::repulsive_gradient_khatib(x, obs, r - D, 1.0, rho0);
    expect_relative(g, oracle::fd_gradient(U, x, 1e-7), 1e-5);
  }
}

TEST(Khatib, SceneSumMatchesFiniteDifference)
{
  std::mt19937_64 rng(4);
  std::uniform_real_distribution<double> u(-1.0, 4.0);
  ControllerConfig cfg;
  cfg.D_obs = 0.3;
  cfg.rho0 = 1.0;
  cfg.K_rep = 1.5;
  Scene scene{v2(3, 5),
              {Circle<double>{v2(1, 2), 0.2}, safefilter::Segment<double>{v2(2, 0), v2(3, 1), 0.1}},
              {}};
  int checked = 0;
  while (checked < 100) {
    const Vector x = v2(u(rng), u(rng));
    const double c = safefilter::clearance(x, scene);
    if (c < cfg.D_obs + 0.05) {
      continue;
    }
    auto U = [&](const Vector & y) { return safefilter::khatib_potential(y, scene, cfg).value; };
    const auto e = safefilter::khatib_potential(x, scene, cfg);
    expect_relative(e.gradient, oracle::fd_gradient(U, x, 1e-7), 1e-5);
    ++checked;
  }
}

TEST(Khatib, RotationalSymmetry)
{
  std::mt19937_64 rng(6);
  std::uniform_real_distribution<double> ang(-M_PI, M_PI);
  ControllerConfig cfg;
  cfg.D_obs = 0.2;
  cfg.rho0 = 1.0;
  const Vector center = v2(0.4, -0.3);
  const Obstacle obs = Circle<double>{center, 0.5};
  const Vector x = center + v2(1.1, 0.2);
  const auto g0 = safefilter::khatib_potential(x, obs, cfg).gradient;
  for (int k = 0; k < 50; ++k) {
    const double a = ang(rng);
    const Eigen::Matrix2d R = Eigen::Rotation2Dd(a).toRotationMatrix();
    const Vector xr = center + R * (x - center);
    const Vector g = safefilter::khatib_potential(xr, obs, cfg).gradient;
    EXPECT_LE((g - R * g0).norm(), 1e-9);
  }
}

TEST(Gaussian, Force)
{
  const Vector f = safefilter::repulsive_force_gaussian(v2(1, 0), v2(0, 0), 2.0, 1.0);
  EXPECT_NEAR(f[0], 2.0 * std::exp(-1.0), 1e-15);
  EXPECT_EQ(f[1], 0.0);
  EXPECT_EQ(safefilter::repulsive_force_gaussian(v2(1, 1), v2(1, 1), 2.0, 1.0), v2(0, 0));
  const double rho0 = 0.5;
  const Vector far = v2(std::sqrt(30.0 * rho0), 0.0);
  EXPECT_LT(safefilter::repulsive_force_gaussian(far, v2(0, 0), 1.0, rho0).norm(), 1e-12);
}

TEST(Apf, NoObstaclesIsNegatedAttractiveGradient)
{
  ControllerConfig cfg;
  cfg.K_att = 1.7;
  Scene scene{v2(3, 5), {}, {}};
  const Vector x = v2(-2, 0.5);
  EXPECT_EQ(safefilter::apf_force(x, scene, cfg), -safefilter::attractive_gradient(x, scene.goal, 1.7));
  EXPECT_EQ(safefilter::apf_velocity(scene.goal, scene, cfg), v2(0, 0));
}

TEST(Apf, FarObstacleIgnoredAndSaturated)
{
  ControllerConfig cfg;
  cfg.rho0 = 1.0;
  cfg.D_obs = 0.5;
  cfg.v_max = 2.0;
  Scene scene{v2(3, 5), {Circle<double>{v2(-5, -5), 0.0}}, {}};
  const Vector v = safefilter::apf_velocity(v2(0, 0), scene, cfg);
  EXPECT_NEAR(v.norm(), 2.0, 1e-12);
  EXPECT_NEAR(v.normalized().dot(v2(3, 5).normalized()), 1.0, 1e-12);
}

TEST(Apf, GaussianVelocityNoPoints)
{
  ControllerConfig cfg;
  cfg.v_max = 100.0;
  const std::vector<Vector> none;
  EXPECT_EQ(safefilter::apf_gaussian_velocity<double>(v2(0, 0), v2(1, 1), none, cfg), v2(1, 1));
}

}  // namespace
