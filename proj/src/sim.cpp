#include "safefilter/sim.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

#include "safefilter/apf.hpp"

namespace safefilter {

namespace {

Vector vec2(double x, double y)
{
  Vector v(2);
  v << x, y;
  return v;
}

double wrap_angle(double a)
{
  a = std::remainder(a, 2.0 * std::numbers::pi);
  if (a <= -std::numbers::pi) {
    a += 2.0 * std::numbers::pi;
  }
  return a;
}

// Closest scan hit as a single point obstacle, for the Khatib-based controllers.
Scene closest_hit_scene(const Scene & scene, const Scan & s)
{
  Scene out{scene.goal, {}, scene.bounds};
  const auto b = scan_barrier(s, 0.0);
  const Vector p = s.origin - b.h * b.grad_h;
  out.obstacles.push_back(Circle<double>{p, 0.0});
  return out;
}

std::vector<Vector> closest_surface_points(const Vector & x, const Scene & scene)
{
  std::vector<Vector> pts;
  pts.reserve(scene.obstacles.size());
  for (const auto & obs : scene.obstacles) {
    pts.push_back(query_surface(x, obs).surface_point);
  }
  return pts;
}

SafeCommand<double> apf_command(const Vector & x, const Scene & scene, const ControllerConfig & cfg)
{
  const Vector v_des = -attractive_gradient(x, scene.goal, cfg.K_att);
  const auto rep = khatib_potential(x, scene, cfg);
  const Vector v = saturate(Vector(v_des - rep.gradient), cfg.v_max);
  const double h = scene.obstacles.empty() ? std::numeric_limits<double>::infinity()
                                           : clearance(x, scene) - cfg.D_obs;
  return {v_des, v, {h, Vector::Zero(x.size())}, rep.gradient.squaredNorm() > 0.0};
}

SafeCommand<double> gaussian_command(const Vector & x, const Vector & goal,
                                     const std::vector<Vector> & points, double h,
                                     const ControllerConfig & cfg)
{
  const Vector v_des = -attractive_gradient(x, goal, cfg.K_att);
  const Vector v = apf_gaussian_velocity<double>(x, goal, points, cfg);
  return {v_des, v, {h, Vector::Zero(x.size())}, !points.empty()};
}

Terminal terminal_for(const std::exception & e, double t)
{
  if (dynamic_cast<const InsideObstacle *>(&e) != nullptr) {
    return {TerminalKind::collision, t, e.what()};
  }
  return {TerminalKind::fault, t, e.what()};
}

}  // namespace

std::string_view to_string(ControllerKind kind)
{
  switch (kind) {
    case ControllerKind::apf: return "apf";
    case ControllerKind::apf_gaussian: return "apf-gaussian";
    case ControllerKind::cbf: return "cbf";
    case ControllerKind::apf_cbf: return "apf-cbf";
  }
  return "?";
}

std::optional<ControllerKind> parse_controller(std::string_view name)
{
  for (auto k : {ControllerKind::apf, ControllerKind::apf_gaussian, ControllerKind::cbf,
                 ControllerKind::apf_cbf})
  {
    if (to_string(k) == name) {
      return k;
    }
  }
  return std::nullopt;
}

std::string_view to_string(TerminalKind kind)
{
  switch (kind) {
    case TerminalKind::reached_goal: return "reached_goal";
    case TerminalKind::stuck: return "stuck";
    case TerminalKind::horizon_expired: return "horizon_expired";
    case TerminalKind::collision: return "collision";
    case TerminalKind::fault: return "fault";
  }
  return "?";
}

void validate(const ScenarioSpec & spec)
{
  if (spec.start.size() != 2 || spec.scene.goal.size() != 2) {
    throw std::invalid_argument("scenario: start and goal must be planar");
  }
  validate(spec.scene);
  validate(spec.cfg);
  validate(spec.plant);
  if (spec.lidar) {
    validate(*spec.lidar);
  }
  if (!(spec.dt > 0.0)) {
    throw std::invalid_argument("scenario: dt must be > 0");
  }
  if (!(spec.horizon > spec.dt)) {
    throw std::invalid_argument("scenario: horizon must exceed dt");
  }
  if (!(spec.goal_tolerance > 0.0)) {
    throw std::invalid_argument("scenario: goal_tolerance must be > 0");
  }
  if (!(clearance(spec.start, spec.scene) > spec.cfg.D_obs)) {
    throw std::invalid_argument("scenario: start must be strictly outside the D_obs shell");
  }
}

SafeCommand<double> control(const ScenarioSpec & spec, const Vector & x)
{
  const auto & cfg = spec.cfg;
  if (!spec.lidar) {
    switch (spec.controller) {
      case ControllerKind::apf: return apf_command(x, spec.scene, cfg);
      case ControllerKind::apf_gaussian: {
        const double h = spec.scene.obstacles.empty() ? std::numeric_limits<double>::infinity()
                                                      : clearance(x, spec.scene) - cfg.D_obs;
        return gaussian_command(x, spec.scene.goal, closest_surface_points(x, spec.scene), h, cfg);
      }
      case ControllerKind::cbf: return cbf_command(x, spec.scene, cfg);
      case ControllerKind::apf_cbf: return apf_cbf_command(x, spec.scene, cfg);
    }
  }

  const Scan s = scan(x, spec.heading, spec.scene, *spec.lidar);
  const auto points = s.hit_points();
  if (points.empty()) {
    const Scene empty{spec.scene.goal, {}, spec.scene.bounds};
    return spec.controller == ControllerKind::apf_cbf ? apf_cbf_command(x, empty, cfg)
                                                      : cbf_command(x, empty, cfg);
  }
  switch (spec.controller) {
    case ControllerKind::apf: return apf_command(x, closest_hit_scene(spec.scene, s), cfg);
    case ControllerKind::apf_gaussian:
      return gaussian_command(x, spec.scene.goal, points, scan_barrier(s, cfg.D_obs).h, cfg);
    case ControllerKind::cbf: {
      const Vector v_des = -attractive_gradient(x, spec.scene.goal, cfg.K_att);
      const auto be = scan_barrier(s, cfg.D_obs);
      const auto r = filter_single_integrator(v_des, be, LinearClassK<double>{cfg.alpha_gain});
      return {v_des, saturate(r.value, cfg.v_max), be, r.intervened};
    }
    case ControllerKind::apf_cbf: return apf_cbf_command(x, closest_hit_scene(spec.scene, s), cfg);
  }
  throw std::logic_error("control: unknown controller");
}

TrajectoryLog run(const ScenarioSpec & spec)
{
  validate(spec);
  TrajectoryLog log;
  const auto n = spec.start.size();
  PlantState state{spec.start, Vector::Zero(n)};
  const double shell = spec.cfg.D_obs - spec.collision_tolerance;
  const auto stuck_ticks = static_cast<long>(std::ceil(spec.stuck_duration / spec.dt - 1e-9));
  long slow_ticks = 0;

  for (long k = 0;; ++k) {
    const double t = static_cast<double>(k) * spec.dt;
    const Vector & x = state.position;
    const double clr = clearance(x, spec.scene);

    LogRow row{t, x, state.velocity, Vector::Zero(n), Vector::Zero(n), clr - spec.cfg.D_obs, clr,
               false};
    std::optional<Terminal> fail;
    if (clr < shell) {
      fail = Terminal{TerminalKind::collision, t, "entered the D_obs shell"};
    } else {
      try {
        const auto cmd = control(spec, x);
        row.v_des = cmd.v_des;
        row.v_star = cmd.v_star;
        row.h = cmd.barrier.h;
        row.intervened = cmd.intervened;
      } catch (const SafetyError & e) {
        fail = terminal_for(e, t);
      } catch (const std::invalid_argument & e) {
        fail = terminal_for(e, t);
      }
    }
    log.rows.push_back(row);

    if (fail) {
      log.terminal = *fail;
      return log;
    }
    if ((x - spec.scene.goal).norm() <= spec.goal_tolerance) {
      log.terminal = {TerminalKind::reached_goal, t, {}};
      return log;
    }
    slow_ticks = row.v_star.norm() < spec.stuck_speed ? slow_ticks + 1 : 0;
    if (slow_ticks >= stuck_ticks) {
      log.terminal = {TerminalKind::stuck, t, {}};
      return log;
    }
    if (t + spec.dt > spec.horizon + 1e-9) {
      log.terminal = {TerminalKind::horizon_expired, t, {}};
      return log;
    }
    state = step(state, row.v_star, spec.plant, spec.dt);
  }
}

double oscillation_index(const std::vector<Vector> & velocities, double min_speed)
{
  double total = 0.0;
  double net = 0.0;
  std::optional<double> prev;
  for (const auto & v : velocities) {
    if (!(v.norm() > min_speed)) {
      continue;
    }
    const double theta = std::atan2(v[1], v[0]);
    if (prev) {
      const double d = wrap_angle(theta - *prev);
      total += std::abs(d);
      net += d;
    }
    prev = theta;
  }
  return std::max(0.0, total - std::abs(net));
}

int reversal_count(const std::vector<Vector> & velocities)
{
  int count = 0;
  for (std::size_t k = 1; k < velocities.size(); ++k) {
    if (velocities[k].dot(velocities[k - 1]) < 0.0) {
      ++count;
    }
  }
  return count;
}

Metrics compute_metrics(const TrajectoryLog & log, const ScenarioSpec & spec)
{
  Metrics m;
  if (log.rows.empty()) {
    return m;
  }
  m.reached = log.terminal.kind == TerminalKind::reached_goal;
  if (m.reached) {
    m.time_to_goal = log.terminal.t;
  }
  m.min_clearance = std::numeric_limits<double>::infinity();
  m.min_h = std::numeric_limits<double>::infinity();
  std::vector<Vector> velocities;
  velocities.reserve(log.rows.size());
  long slow = 0;
  long longest_slow = 0;
  for (std::size_t k = 0; k < log.rows.size(); ++k) {
    const auto & r = log.rows[k];
    m.min_clearance = std::min(m.min_clearance, r.clearance);
    m.min_h = std::min(m.min_h, r.h);
    m.interventions += r.intervened ? 1 : 0;
    if (k > 0) {
      m.path_length += (r.position - log.rows[k - 1].position).norm();
    }
    velocities.push_back(r.velocity);
    slow = r.v_star.norm() < spec.stuck_speed ? slow + 1 : 0;
    longest_slow = std::max(longest_slow, slow);
  }
  m.oscillation_index = oscillation_index(velocities);
  m.reversal_count = reversal_count(velocities);
  m.stuck = !m.reached && static_cast<double>(longest_slow) * spec.dt >= spec.stuck_duration - 1e-9;
  return m;
}

ScenarioSpec example_scenario(ControllerKind controller, PlantModel plant)
{
  ScenarioSpec spec;
  spec.name = "example1";
  spec.scene.goal = vec2(3.0, 5.0);
  spec.scene.obstacles = {Circle<double>{vec2(1.0, 2.0), 0.0}, Circle<double>{vec2(2.5, 3.0), 0.0}};
  spec.scene.bounds = {vec2(-1.0, -1.0), vec2(5.0, 6.0)};
  spec.start = vec2(0.0, 0.0);
  spec.plant = plant;
  spec.controller = controller;
  spec.cfg.D_obs = 0.5;
  spec.horizon = 30.0;
  return spec;
}

std::vector<ScenarioSpec> canonical_scenarios()
{
  ScenarioSpec base;
  base.scene.goal = vec2(5.0, 0.0);
  base.scene.bounds = {vec2(-1.0, -3.0), vec2(6.0, 3.0)};
  base.start = vec2(0.0, 0.0);
  base.plant = VelocityLag{0.25, 10.0};
  base.controller = ControllerKind::cbf;
  base.cfg.K_att = 0.2;  // nominal speed at the waypoint equals v_max
  base.cfg.K_rep = 5.0;
  base.cfg.rho0 = 0.03;
  base.cfg.D_obs = 0.3;
  base.cfg.alpha_gain = 1.0;
  base.cfg.v_max = 1.0;
  base.lidar = LidarSpec{};
  base.dt = 0.02;
  base.horizon = 60.0;

  constexpr double kPillar = 0.3;
  constexpr double kWall = 0.05;
  constexpr double kDoorX = 2.5;
  constexpr double kLateral = 0.1;  // start offset in the symmetric courses
  // Capsules whose inner centerline ends sit at +-edge, leaving a gap of
  // 2 (edge - kWall) between their surfaces.
  auto door = [&](double edge) {
    return std::vector<Obstacle>{
      Segment<double>{vec2(kDoorX, edge), vec2(kDoorX, 4.0), kWall},
      Segment<double>{vec2(kDoorX, -edge), vec2(kDoorX, -4.0), kWall},
    };
  };

  std::vector<ScenarioSpec> out(5, base);
  out[0].name = "scenario1_offset_pair";
  out[0].scene.obstacles = {Circle<double>{vec2(1.5, 0.75), kPillar},
                            Circle<double>{vec2(3.5, -0.75), kPillar}};
  out[1].name = "scenario2_edge_on_path";
  out[1].scene.obstacles = {Circle<double>{vec2(2.5, kPillar), kPillar}};
  out[2].name = "scenario3_doorway_1m";
  out[2].start = vec2(0.0, kLateral);
  out[2].scene.obstacles = door(0.55);
  out[3].name = "scenario4_doorway_0p7m";
  out[3].start = vec2(0.0, kLateral);
  out[3].scene.obstacles = door(0.4);
  out[4].name = "scenario5_wall";
  out[4].start = vec2(0.0, kLateral);
  out[4].scene.obstacles = {Segment<double>{vec2(kDoorX, -4.0), vec2(kDoorX, 4.0), kWall}};
  return out;
}

}  // namespace safefilter
