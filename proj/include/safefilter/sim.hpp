#ifndef SAFEFILTER_SIM_HPP_
#define SAFEFILTER_SIM_HPP_

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "safefilter/cbf.hpp"
#include "safefilter/core.hpp"
#include "safefilter/dynamics.hpp"
#include "safefilter/sensing.hpp"

namespace safefilter {

enum class ControllerKind { apf, apf_gaussian, cbf, apf_cbf };

std::string_view to_string(ControllerKind kind);
std::optional<ControllerKind> parse_controller(std::string_view name);

/// Everything needed to reproduce one closed-loop run.
struct ScenarioSpec
{
  std::string name;
  Scene scene;
  Vector start;
  PlantModel plant{SingleIntegrator{}};
  ControllerKind controller{ControllerKind::cbf};
  ControllerConfig cfg;
  /// Scan-based barrier and repulsion when set, scene geometry otherwise.
  std::optional<LidarSpec> lidar;
  double heading{0.0};  // sensor heading [rad]
  double dt{0.01};
  double horizon{30.0};
  double goal_tolerance{0.05};
  /// Penetration of the D_obs shell tolerated before a run counts as a collision.
  double collision_tolerance{1e-3};
  double stuck_speed{0.01};
  double stuck_duration{1.0};
};

void validate(const ScenarioSpec & spec);

struct LogRow
{
  double t;
  Vector position;
  Vector velocity;
  Vector v_des;
  Vector v_star;
  double h;
  double clearance;  // distance to the nearest obstacle surface [m]
  bool intervened;
};

enum class TerminalKind { reached_goal, stuck, horizon_expired, collision, fault };

std::string_view to_string(TerminalKind kind);

struct Terminal
{
  TerminalKind kind{TerminalKind::horizon_expired};
  double t{0.0};
  std::string detail;
};

struct TrajectoryLog
{
  std::vector<LogRow> rows;
  Terminal terminal;
};

struct Metrics
{
  bool reached{false};
  std::optional<double> time_to_goal;
  double min_clearance{0.0};
  double path_length{0.0};
  double oscillation_index{0.0};  // excess turning [rad]
  int reversal_count{0};
  bool stuck{false};
  double min_h{0.0};
  int interventions{0};
};

/// Nominal and safe command of the spec's controller at position x.
/// Scan-based when spec.lidar is set.
SafeCommand<double> control(const ScenarioSpec & spec, const Vector & x);

/// Runs the closed loop until goal, collision, stuck detection or horizon.
/// Controller errors end the run with a Collision or Fault terminal.
TrajectoryLog run(const ScenarioSpec & spec);

/// Heading-based oscillation index: total absolute heading change minus the
/// absolute net change, over ticks with speed above min_speed.
double oscillation_index(const std::vector<Vector> & velocities, double min_speed = 0.05);

/// Number of consecutive velocity pairs with negative inner product.
int reversal_count(const std::vector<Vector> & velocities);

Metrics compute_metrics(const TrajectoryLog & log, const ScenarioSpec & spec);

/// The two-point-obstacle planar example: start (0,0), goal (3,5),
/// obstacles at (1,2) and (2.5,3), D_obs = 0.5.
ScenarioSpec example_scenario(ControllerKind controller, PlantModel plant = SingleIntegrator{});

/// The five scan-based obstacle courses, goal 5 m ahead along x.
std::vector<ScenarioSpec> canonical_scenarios();

}  // namespace safefilter

#endif  // SAFEFILTER_SIM_HPP_
