#include "safefilter/io.hpp"

#include <algorithm>
#include <array>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <istream>
#include <numbers>
#include <optional>
#include <ostream>
#include <sstream>

#include <toml.hpp>

namespace safefilter {

namespace {

int line_of(const toml::node & n)
{
  return static_cast<int>(n.source().begin.line);
}

std::string fmt17(double v)
{
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

// Shortest literal that reads back to the same double, always as a TOML float.
std::string toml_float(double v)
{
  char buf[40];
  const auto r = std::to_chars(buf, buf + sizeof buf, v);
  std::string s(buf, r.ptr);
  if (s.find_first_of(".eEn") == std::string::npos) {
    s += ".0";
  }
  return s;
}

class Reader
{
public:
  explicit Reader(std::string source) : source_(std::move(source)) {}

  [[noreturn]] void fail(int line, const std::string & field, const std::string & msg) const
  {
    throw ScenarioError(source_, line, field, msg);
  }

  void check_keys(const toml::table & t, std::initializer_list<std::string_view> allowed,
                  const std::string & prefix) const
  {
    for (const auto & [k, v] : t) {
      if (std::find(allowed.begin(), allowed.end(), k.str()) == allowed.end()) {
        fail(line_of(v), prefix + std::string(k.str()), "unknown key");
      }
    }
  }

  const toml::table & table(const toml::table & t, std::string_view key, bool required) const
  {
    static const toml::table empty;
    const toml::node * n = t.get(key);
    if (n == nullptr) {
      if (required) {
        fail(line_of(t), std::string(key), "missing section");
      }
      return empty;
    }
    const auto * tbl = n->as_table();
    if (tbl == nullptr) {
      fail(line_of(*n), std::string(key), "expected a table");
    }
    return *tbl;
  }

  double number(const toml::table & t, std::string_view key, const std::string & field,
                std::optional<double> fallback) const
  {
    const toml::node * n = t.get(key);
    if (n == nullptr) {
      if (!fallback) {
        fail(line_of(t), field, "missing value");
      }
      return *fallback;
    }
    const auto v = n->value<double>();
    if (!v || !(n->is_floating_point() || n->is_integer())) {
      fail(line_of(*n), field, "expected a number");
    }
    return *v;
  }

  std::string text(const toml::table & t, std::string_view key, const std::string & field,
                   std::optional<std::string> fallback) const
  {
    const toml::node * n = t.get(key);
    if (n == nullptr) {
      if (!fallback) {
        fail(line_of(t), field, "missing value");
      }
      return *fallback;
    }
    const auto v = n->value<std::string>();
    if (!v || !n->is_string()) {
      fail(line_of(*n), field, "expected a string");
    }
    return *v;
  }

  Vector point(const toml::table & t, std::string_view key, const std::string & field) const
  {
    const toml::node * n = t.get(key);
    if (n == nullptr) {
      fail(line_of(t), field, "missing value");
    }
    const auto * arr = n->as_array();
    if (arr == nullptr || arr->size() != 2) {
      fail(line_of(*n), field, "expected [x, y]");
    }
    Vector v(2);
    for (std::size_t i = 0; i < 2; ++i) {
      const auto c = (*arr)[i].value<double>();
      if (!c) {
        fail(line_of(*n), field, "expected [x, y]");
      }
      v[static_cast<Eigen::Index>(i)] = *c;
    }
    return v;
  }

private:
  std::string source_;
};

Obstacle read_obstacle(const Reader & r, const toml::table & t, const std::string & field)
{
  const std::string type = r.text(t, "type", field + ".type", std::nullopt);
  if (type == "circle") {
    r.check_keys(t, {"type", "center", "radius"}, field + ".");
    return Circle<double>{r.point(t, "center", field + ".center"),
                          r.number(t, "radius", field + ".radius", 0.0)};
  }
  if (type == "segment") {
    r.check_keys(t, {"type", "a", "b", "thickness"}, field + ".");
    return Segment<double>{r.point(t, "a", field + ".a"), r.point(t, "b", field + ".b"),
                           r.number(t, "thickness", field + ".thickness", 0.0)};
  }
  r.fail(line_of(*t.get("type")), field + ".type", "expected \"circle\" or \"segment\"");
}

PlantModel read_plant(const Reader & r, const toml::table & t, double tracking_gain)
{
  const std::string model = r.text(t, "model", "plant.model", std::string("single_integrator"));
  if (model == "single_integrator") {
    r.check_keys(t, {"model"}, "plant.");
    return SingleIntegrator{};
  }
  if (model == "double_integrator") {
    r.check_keys(t, {"model", "max_accel"}, "plant.");
    return DoubleIntegrator{tracking_gain, r.number(t, "max_accel", "plant.max_accel", 10.0)};
  }
  if (model == "velocity_lag") {
    r.check_keys(t, {"model", "time_constant", "max_accel"}, "plant.");
    return VelocityLag{r.number(t, "time_constant", "plant.time_constant", 0.25),
                       r.number(t, "max_accel", "plant.max_accel", 10.0)};
  }
  r.fail(line_of(*t.get("model")), "plant.model",
         "expected single_integrator, double_integrator or velocity_lag");
}

double deg(double rad)
{
  return rad * 180.0 / std::numbers::pi;
}

double rad(double deg)
{
  return deg * std::numbers::pi / 180.0;
}

std::string point_str(const Vector & v)
{
  return "[" + toml_float(v[0]) + ", " + toml_float(v[1]) + "]";
}

double parse_double(std::string_view key, std::string_view text)
{
  double v = 0.0;
  const auto * end = text.data() + text.size();
  const auto [p, ec] = std::from_chars(text.data(), end, v);
  if (ec != std::errc() || p != end) {
    throw std::invalid_argument("override " + std::string(key) + ": not a number: " +
                                std::string(text));
  }
  return v;
}

constexpr std::array<std::string_view, 18> kOverrideKeys{
  "K_att",   "K_rep",      "rho0",        "D_obs",          "alpha",         "delta",
  "tracking_gain", "v_max", "dt",         "horizon",        "goal_tolerance", "time_constant",
  "max_accel", "range_noise", "seed",     "controller",     "name",          "heading_deg",
};

}  // namespace

ScenarioError::ScenarioError(const std::string & source, int line, const std::string & field,
                             const std::string & message)
: std::runtime_error(source + (line > 0 ? ":" + std::to_string(line) : std::string()) + ": " +
                     (field.empty() ? std::string() : field + ": ") + message),
  line_(line),
  field_(field)
{
}

ScenarioSpec parse_scenario(std::string_view text, const std::string & source)
{
  toml::table root;
  try {
    root = toml::parse(text, source);
  } catch (const toml::parse_error & e) {
    throw ScenarioError(source, static_cast<int>(e.source().begin.line), "",
                        std::string(e.description()));
  }
  const Reader r(source);
  r.check_keys(root, {"name", "scene", "start", "plant", "controller", "lidar", "sim"}, "");

  ScenarioSpec spec;
  spec.name = r.text(root, "name", "name", std::nullopt);

  const auto & scene = r.table(root, "scene", true);
  r.check_keys(scene, {"goal", "bounds", "obstacles"}, "scene.");
  spec.scene.goal = r.point(scene, "goal", "scene.goal");
  if (const auto * b = scene.get("bounds")) {
    const auto * bt = b->as_table();
    if (bt == nullptr) {
      r.fail(line_of(*b), "scene.bounds", "expected { lo = [x, y], hi = [x, y] }");
    }
    r.check_keys(*bt, {"lo", "hi"}, "scene.bounds.");
    spec.scene.bounds = {r.point(*bt, "lo", "scene.bounds.lo"), r.point(*bt, "hi", "scene.bounds.hi")};
    if (!(spec.scene.bounds.lo.array() < spec.scene.bounds.hi.array()).all()) {
      r.fail(line_of(*b), "scene.bounds", "lo must be below hi");
    }
  } else {
    r.fail(line_of(scene), "scene.bounds", "missing value");
  }
  if (const auto * o = scene.get("obstacles")) {
    const auto * arr = o->as_array();
    if (arr == nullptr) {
      r.fail(line_of(*o), "scene.obstacles", "expected an array of tables");
    }
    for (std::size_t i = 0; i < arr->size(); ++i) {
      const std::string field = "scene.obstacles[" + std::to_string(i) + "]";
      const auto * t = (*arr)[i].as_table();
      if (t == nullptr) {
        r.fail(line_of((*arr)[i]), field, "expected a table");
      }
      spec.scene.obstacles.push_back(read_obstacle(r, *t, field));
    }
  }

  const auto & start = r.table(root, "start", true);
  r.check_keys(start, {"position", "heading_deg"}, "start.");
  spec.start = r.point(start, "position", "start.position");
  spec.heading = rad(r.number(start, "heading_deg", "start.heading_deg", 0.0));

  const auto & ctl = r.table(root, "controller", true);
  r.check_keys(ctl,
               {"kind", "K_att", "K_rep", "rho0", "D_obs", "alpha", "delta", "tracking_gain", "v_max"},
               "controller.");
  const std::string kind = r.text(ctl, "kind", "controller.kind", std::string("cbf"));
  const auto parsed = parse_controller(kind);
  if (!parsed) {
    r.fail(line_of(*ctl.get("kind")), "controller.kind", "expected apf, apf-gaussian, cbf or apf-cbf");
  }
  spec.controller = *parsed;
  const ControllerConfig d;
  spec.cfg.K_att = r.number(ctl, "K_att", "controller.K_att", d.K_att);
  spec.cfg.K_rep = r.number(ctl, "K_rep", "controller.K_rep", d.K_rep);
  spec.cfg.rho0 = r.number(ctl, "rho0", "controller.rho0", d.rho0);
  spec.cfg.D_obs = r.number(ctl, "D_obs", "controller.D_obs", d.D_obs);
  spec.cfg.alpha_gain = r.number(ctl, "alpha", "controller.alpha", d.alpha_gain);
  spec.cfg.delta = r.number(ctl, "delta", "controller.delta", d.delta);
  spec.cfg.tracking_gain = r.number(ctl, "tracking_gain", "controller.tracking_gain", d.tracking_gain);
  spec.cfg.v_max = r.number(ctl, "v_max", "controller.v_max", d.v_max);

  spec.plant = read_plant(r, r.table(root, "plant", false), spec.cfg.tracking_gain);

  if (root.contains("lidar")) {
    const auto & l = r.table(root, "lidar", false);
    r.check_keys(l, {"beam_count", "fov_deg", "max_range", "mount_yaw_deg", "range_noise", "seed"},
                 "lidar.");
    const LidarSpec ld;
    LidarSpec spec_l;
    const double beams = r.number(l, "beam_count", "lidar.beam_count", ld.beam_count);
    if (beams != std::floor(beams) || beams < 1.0 || beams > 1e6) {
      r.fail(line_of(*l.get("beam_count")), "lidar.beam_count", "expected a positive integer");
    }
    spec_l.beam_count = static_cast<int>(beams);
    spec_l.fov = rad(r.number(l, "fov_deg", "lidar.fov_deg", deg(ld.fov)));
    spec_l.max_range = r.number(l, "max_range", "lidar.max_range", ld.max_range);
    spec_l.mount_yaw = rad(r.number(l, "mount_yaw_deg", "lidar.mount_yaw_deg", 0.0));
    spec_l.range_noise = r.number(l, "range_noise", "lidar.range_noise", 0.0);
    const double seed = r.number(l, "seed", "lidar.seed", 0.0);
    if (seed < 0.0 || seed != std::floor(seed)) {
      r.fail(line_of(*l.get("seed")), "lidar.seed", "expected a non-negative integer");
    }
    spec_l.seed = static_cast<std::uint64_t>(seed);
    spec.lidar = spec_l;
  }

  const auto & sim = r.table(root, "sim", false);
  r.check_keys(sim,
               {"dt", "horizon", "goal_tolerance", "collision_tolerance", "stuck_speed",
                "stuck_duration"},
               "sim.");
  const ScenarioSpec ds;
  spec.dt = r.number(sim, "dt", "sim.dt", ds.dt);
  spec.horizon = r.number(sim, "horizon", "sim.horizon", ds.horizon);
  spec.goal_tolerance = r.number(sim, "goal_tolerance", "sim.goal_tolerance", ds.goal_tolerance);
  spec.collision_tolerance =
    r.number(sim, "collision_tolerance", "sim.collision_tolerance", ds.collision_tolerance);
  spec.stuck_speed = r.number(sim, "stuck_speed", "sim.stuck_speed", ds.stuck_speed);
  spec.stuck_duration = r.number(sim, "stuck_duration", "sim.stuck_duration", ds.stuck_duration);

  try {
    validate(spec);
  } catch (const std::invalid_argument & e) {
    throw ScenarioError(source, 0, "", e.what());
  }
  return spec;
}

ScenarioSpec load_scenario(const std::filesystem::path & path)
{
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw ScenarioError(path.string(), 0, "", "cannot open file");
  }
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_scenario(ss.str(), path.string());
}

std::string to_toml(const ScenarioSpec & spec)
{
  std::ostringstream o;
  o << "name = \"" << spec.name << "\"\n\n[scene]\n";
  o << "goal = " << point_str(spec.scene.goal) << "\n";
  o << "bounds = { lo = " << point_str(spec.scene.bounds.lo)
    << ", hi = " << point_str(spec.scene.bounds.hi) << " }\n";
  o << "obstacles = [\n";
  for (const auto & obs : spec.scene.obstacles) {
    if (const auto * c = std::get_if<Circle<double>>(&obs)) {
      o << "  { type = \"circle\", center = " << point_str(c->center)
        << ", radius = " << toml_float(c->radius) << " },\n";
    } else {
      const auto & s = std::get<Segment<double>>(obs);
      o << "  { type = \"segment\", a = " << point_str(s.a) << ", b = " << point_str(s.b)
        << ", thickness = " << toml_float(s.thickness) << " },\n";
    }
  }
  o << "]\n\n[start]\nposition = " << point_str(spec.start) << "\n";
  o << "heading_deg = " << toml_float(deg(spec.heading)) << "\n\n[plant]\n";
  if (std::holds_alternative<SingleIntegrator>(spec.plant)) {
    o << "model = \"single_integrator\"\n";
  } else if (const auto * di = std::get_if<DoubleIntegrator>(&spec.plant)) {
    o << "model = \"double_integrator\"\nmax_accel = " << toml_float(di->max_accel) << "\n";
  } else {
    const auto & lag = std::get<VelocityLag>(spec.plant);
    o << "model = \"velocity_lag\"\ntime_constant = " << toml_float(lag.time_constant)
      << "\nmax_accel = " << toml_float(lag.max_accel) << "\n";
  }
  const auto & c = spec.cfg;
  o << "\n[controller]\nkind = \"" << to_string(spec.controller) << "\"\n";
  o << "K_att = " << toml_float(c.K_att) << "\nK_rep = " << toml_float(c.K_rep)
    << "\nrho0 = " << toml_float(c.rho0) << "\nD_obs = " << toml_float(c.D_obs)
    << "\nalpha = " << toml_float(c.alpha_gain) << "\ndelta = " << toml_float(c.delta)
    << "\ntracking_gain = " << toml_float(c.tracking_gain) << "\nv_max = " << toml_float(c.v_max)
    << "\n";
  if (spec.lidar) {
    const auto & l = *spec.lidar;
    o << "\n[lidar]\nbeam_count = " << l.beam_count << "\nfov_deg = " << toml_float(deg(l.fov))
      << "\nmax_range = " << toml_float(l.max_range)
      << "\nmount_yaw_deg = " << toml_float(deg(l.mount_yaw))
      << "\nrange_noise = " << toml_float(l.range_noise) << "\nseed = " << l.seed << "\n";
  }
  o << "\n[sim]\ndt = " << toml_float(spec.dt) << "\nhorizon = " << toml_float(spec.horizon)
    << "\ngoal_tolerance = " << toml_float(spec.goal_tolerance)
    << "\ncollision_tolerance = " << toml_float(spec.collision_tolerance)
    << "\nstuck_speed = " << toml_float(spec.stuck_speed)
    << "\nstuck_duration = " << toml_float(spec.stuck_duration) << "\n";
  return o.str();
}

std::string content_hash(const ScenarioSpec & spec)
{
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char ch : to_toml(spec)) {
    h ^= ch;
    h *= 0x100000001b3ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

std::span<const std::string_view> override_keys()
{
  return kOverrideKeys;
}

void apply_override(ScenarioSpec & spec, std::string_view assignment)
{
  const auto eq = assignment.find('=');
  if (eq == std::string_view::npos || eq == 0) {
    throw std::invalid_argument("override must look like key=value: " + std::string(assignment));
  }
  const std::string_view key = assignment.substr(0, eq);
  const std::string_view value = assignment.substr(eq + 1);
  if (key == "controller") {
    const auto k = parse_controller(value);
    if (!k) {
      throw std::invalid_argument("override controller: unknown controller " + std::string(value));
    }
    spec.controller = *k;
    return;
  }
  if (key == "name") {
    spec.name = std::string(value);
    return;
  }
  const double v = parse_double(key, value);
  auto & c = spec.cfg;
  if (key == "K_att") c.K_att = v;
  else if (key == "K_rep") c.K_rep = v;
  else if (key == "rho0") c.rho0 = v;
  else if (key == "D_obs") c.D_obs = v;
  else if (key == "alpha") c.alpha_gain = v;
  else if (key == "delta") c.delta = v;
  else if (key == "v_max") c.v_max = v;
  else if (key == "dt") spec.dt = v;
  else if (key == "horizon") spec.horizon = v;
  else if (key == "goal_tolerance") spec.goal_tolerance = v;
  else if (key == "heading_deg") spec.heading = rad(v);
  else if (key == "tracking_gain") {
    c.tracking_gain = v;
    if (auto * di = std::get_if<DoubleIntegrator>(&spec.plant)) {
      di->tracking_gain = v;
    }
  } else if (key == "time_constant" || key == "max_accel") {
    if (auto * lag = std::get_if<VelocityLag>(&spec.plant)) {
      (key == "time_constant" ? lag->time_constant : lag->max_accel) = v;
    } else if (auto * di = std::get_if<DoubleIntegrator>(&spec.plant); di && key == "max_accel") {
      di->max_accel = v;
    } else {
      throw std::invalid_argument("override " + std::string(key) + ": plant has no such field");
    }
  } else if (key == "range_noise" || key == "seed") {
    if (!spec.lidar) {
      throw std::invalid_argument("override " + std::string(key) + ": scenario has no lidar");
    }
    if (key == "range_noise") {
      spec.lidar->range_noise = v;
    } else {
      if (v < 0.0 || v != std::floor(v)) {
        throw std::invalid_argument("override seed: expected a non-negative integer");
      }
      spec.lidar->seed = static_cast<std::uint64_t>(v);
    }
  } else {
    throw std::invalid_argument("unknown override key: " + std::string(key));
  }
}

void write_csv(std::ostream & out, const TrajectoryLog & log)
{
  out << kCsvHeader << "\n";
  for (const auto & r : log.rows) {
    out << fmt17(r.t) << ',' << fmt17(r.position[0]) << ',' << fmt17(r.position[1]) << ','
        << fmt17(r.velocity[0]) << ',' << fmt17(r.velocity[1]) << ',' << fmt17(r.v_des[0]) << ','
        << fmt17(r.v_des[1]) << ',' << fmt17(r.v_star[0]) << ',' << fmt17(r.v_star[1]) << ','
        << fmt17(r.h) << ',' << fmt17(r.clearance) << ',' << (r.intervened ? 1 : 0) << "\n";
  }
}

std::vector<LogRow> read_csv(std::istream & in)
{
  std::string line;
  if (!std::getline(in, line) || line != kCsvHeader) {
    throw std::runtime_error("read_csv: missing or unexpected header");
  }
  std::vector<LogRow> rows;
  int lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) {
      continue;
    }
    std::array<double, 12> f{};
    std::size_t pos = 0;
    for (std::size_t i = 0; i < f.size(); ++i) {
      const std::size_t end = i + 1 < f.size() ? line.find(',', pos) : line.size();
      if (end == std::string::npos) {
        throw std::runtime_error("read_csv: line " + std::to_string(lineno) + ": too few fields");
      }
      const std::string cell = line.substr(pos, end - pos);
      char * stop = nullptr;
      f[i] = std::strtod(cell.c_str(), &stop);
      if (cell.empty() || *stop != '\0') {
        throw std::runtime_error("read_csv: line " + std::to_string(lineno) + ": bad number '" +
                                 cell + "'");
      }
      pos = end + 1;
    }
    auto v2 = [](double a, double b) {
      Vector v(2);
      v << a, b;
      return v;
    };
    rows.push_back({f[0], v2(f[1], f[2]), v2(f[3], f[4]), v2(f[5], f[6]), v2(f[7], f[8]), f[9],
                    f[10], f[11] != 0.0});
  }
  return rows;
}

namespace {

constexpr std::array<const char *, 6> kPalette{"#1f77b4", "#d62728", "#2ca02c",
                                               "#9467bd", "#ff7f0e", "#17becf"};

struct Frame
{
  double x0, y0, scale, left, top, height;

  double px(double x) const { return left + (x - x0) * scale; }
  double py(double y) const { return top + height - (y - y0) * scale; }
};

std::string num(double v)
{
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f", v);
  return buf;
}

}  // namespace

std::string render_svg(const ScenarioSpec & spec, std::span<const PlotSeries> series)
{
  constexpr double kWidth = 640.0;
  constexpr double kMargin = 40.0;
  constexpr double kSpeedHeight = 160.0;
  const Vector lo = spec.scene.bounds.lo;
  const Vector hi = spec.scene.bounds.hi;
  const double span_x = hi[0] - lo[0];
  const double span_y = hi[1] - lo[1];
  const double scale = (kWidth - 2.0 * kMargin) / span_x;
  const Frame map{lo[0], lo[1], scale, kMargin, kMargin, span_y * scale};
  const double speed_top = map.top + map.height + 2.0 * kMargin;
  const double total_h = speed_top + kSpeedHeight + kMargin;

  std::ostringstream o;
  o << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << num(kWidth) << "\" height=\""
    << num(total_h) << "\" font-family=\"sans-serif\" font-size=\"11\">\n";
  o << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  o << "<text x=\"" << num(kMargin) << "\" y=\"20\" font-size=\"14\">" << spec.name << "</text>\n";
  o << "<rect x=\"" << num(map.left) << "\" y=\"" << num(map.top) << "\" width=\""
    << num(span_x * scale) << "\" height=\"" << num(map.height)
    << "\" fill=\"none\" stroke=\"#888\"/>\n";

  const double shell = spec.cfg.D_obs;
  for (const auto & obs : spec.scene.obstacles) {
    if (const auto * c = std::get_if<Circle<double>>(&obs)) {
      const double cx = map.px(c->center[0]);
      const double cy = map.py(c->center[1]);
      o << "<circle cx=\"" << num(cx) << "\" cy=\"" << num(cy) << "\" r=\""
        << num((c->radius + shell) * scale)
        << "\" fill=\"none\" stroke=\"#aaa\" stroke-dasharray=\"4 3\"/>\n";
      o << "<circle cx=\"" << num(cx) << "\" cy=\"" << num(cy) << "\" r=\""
        << num(std::max(c->radius * scale, 3.0)) << "\" fill=\"#444\"/>\n";
    } else {
      const auto & s = std::get<Segment<double>>(obs);
      const std::string coords = "x1=\"" + num(map.px(s.a[0])) + "\" y1=\"" + num(map.py(s.a[1])) +
                                 "\" x2=\"" + num(map.px(s.b[0])) + "\" y2=\"" +
                                 num(map.py(s.b[1])) + "\"";
      o << "<line " << coords << " stroke=\"#ddd\" stroke-linecap=\"round\" stroke-width=\""
        << num(2.0 * (s.thickness + shell) * scale) << "\"/>\n";
      o << "<line " << coords << " stroke=\"#444\" stroke-linecap=\"round\" stroke-width=\""
        << num(std::max(2.0 * s.thickness * scale, 2.0)) << "\"/>\n";
    }
  }

  const double gx = map.px(spec.scene.goal[0]);
  const double gy = map.py(spec.scene.goal[1]);
  o << "<path d=\"M" << num(gx - 6) << ' ' << num(gy - 6) << " L" << num(gx + 6) << ' '
    << num(gy + 6) << " M" << num(gx - 6) << ' ' << num(gy + 6) << " L" << num(gx + 6) << ' '
    << num(gy - 6) << "\" stroke=\"#000\" stroke-width=\"2\"/>\n";
  o << "<circle cx=\"" << num(map.px(spec.start[0])) << "\" cy=\"" << num(map.py(spec.start[1]))
    << "\" r=\"4\" fill=\"none\" stroke=\"#000\"/>\n";

  double t_max = 0.0;
  double v_peak = 0.0;
  for (const auto & s : series) {
    if (s.log != nullptr && !s.log->rows.empty()) {
      t_max = std::max(t_max, s.log->rows.back().t);
      for (const auto & r : s.log->rows) {
        v_peak = std::max(v_peak, r.velocity.norm());
      }
    }
  }
  t_max = std::max(t_max, 1e-9);
  v_peak = std::max(v_peak, 1e-9) * 1.1;
  const double plot_w = kWidth - 2.0 * kMargin;

  o << "<rect x=\"" << num(kMargin) << "\" y=\"" << num(speed_top) << "\" width=\"" << num(plot_w)
    << "\" height=\"" << num(kSpeedHeight) << "\" fill=\"none\" stroke=\"#888\"/>\n";
  o << "<text x=\"" << num(kMargin) << "\" y=\"" << num(speed_top - 6) << "\">|v| [m/s], peak "
    << num(v_peak / 1.1) << ", t in [0, " << num(t_max) << "] s</text>\n";

  for (std::size_t i = 0; i < series.size(); ++i) {
    const auto & s = series[i];
    if (s.log == nullptr || s.log->rows.empty()) {
      continue;
    }
    const char * color = kPalette[i % kPalette.size()];
    o << "<polyline fill=\"none\" stroke=\"" << color << "\" stroke-width=\"1.5\" points=\"";
    for (const auto & r : s.log->rows) {
      o << num(map.px(r.position[0])) << ',' << num(map.py(r.position[1])) << ' ';
    }
    o << "\"/>\n";
    o << "<polyline fill=\"none\" stroke=\"" << color << "\" stroke-width=\"1.2\" points=\"";
    for (const auto & r : s.log->rows) {
      o << num(kMargin + r.t / t_max * plot_w) << ','
        << num(speed_top + kSpeedHeight - r.velocity.norm() / v_peak * kSpeedHeight) << ' ';
    }
    o << "\"/>\n";
    const double ly = map.top + 14.0 * static_cast<double>(i + 1);
    o << "<text x=\"" << num(map.left + 6) << "\" y=\"" << num(ly) << "\" fill=\"" << color
      << "\">" << s.label << " (" << to_string(s.log->terminal.kind) << ")</text>\n";
  }
  o << "</svg>\n";
  return o.str();
}

}  // namespace safefilter
