#include "safefilter/teleop.hpp"

#include <cmath>
#include <cstdlib>
#include <limits>
#include <stdexcept>

#include <nlohmann/json.hpp>

namespace safefilter::teleop {

namespace {

using nlohmann::json;

json point(const Vector & v)
{
  return json::array({v[0], v[1]});
}

}  // namespace

std::optional<CommandMsg> parse_command(std::string_view line)
{
  while (!line.empty() && (line.back() == '\n' || line.back() == '\r')) {
    line.remove_suffix(1);
  }
  const json j = json::parse(line, nullptr, false);
  if (j.is_discarded() || !j.is_object()) {
    return std::nullopt;
  }
  const auto type = j.find("type");
  const auto vx = j.find("vx");
  const auto vy = j.find("vy");
  const auto seq = j.find("seq");
  if (type == j.end() || vx == j.end() || vy == j.end() || seq == j.end()) {
    return std::nullopt;
  }
  if (!type->is_string() || type->get<std::string>() != "cmd" || !vx->is_number() ||
      !vy->is_number() || !seq->is_number_integer())
  {
    return std::nullopt;
  }
  CommandMsg cmd{vx->get<double>(), vy->get<double>(), seq->get<std::int64_t>()};
  if (!std::isfinite(cmd.vx) || !std::isfinite(cmd.vy)) {
    return std::nullopt;
  }
  return cmd;
}

std::string encode(const StateMsg & msg)
{
  json j = {
    {"type", "state"},
    {"t", msg.t},
    {"x", msg.x},
    {"y", msg.y},
    {"vx", msg.vx},
    {"vy", msg.vy},
    {"vdes_x", msg.vdes_x},
    {"vdes_y", msg.vdes_y},
    {"h", msg.h ? json(*msg.h) : json(nullptr)},
    {"intervened", msg.intervened},
    {"scan", msg.scan},
  };
  return j.dump() + "\n";
}

std::string encode_scene(const ScenarioSpec & spec)
{
  json obstacles = json::array();
  for (const auto & obs : spec.scene.obstacles) {
    if (const auto * c = std::get_if<Circle<double>>(&obs)) {
      obstacles.push_back({{"type", "circle"}, {"center", point(c->center)}, {"radius", c->radius}});
    } else {
      const auto & s = std::get<Segment<double>>(obs);
      obstacles.push_back(
        {{"type", "segment"}, {"a", point(s.a)}, {"b", point(s.b)}, {"thickness", s.thickness}});
    }
  }
  json j = {
    {"type", "scene"},
    {"name", spec.name},
    {"goal", point(spec.scene.goal)},
    {"bounds", {{"lo", point(spec.scene.bounds.lo)}, {"hi", point(spec.scene.bounds.hi)}}},
    {"obstacles", obstacles},
    {"start", point(spec.start)},
    {"D_obs", spec.cfg.D_obs},
    {"v_max", spec.cfg.v_max},
  };
  return j.dump() + "\n";
}

unsigned short port_from_env(unsigned short fallback)
{
  const char * env = std::getenv("SAFEFILTER_TELEOP_PORT");
  if (env == nullptr || *env == '\0') {
    return fallback;
  }
  char * end = nullptr;
  const long v = std::strtol(env, &end, 10);
  if (*end != '\0' || v < 0 || v > 65535) {
    throw std::invalid_argument("SAFEFILTER_TELEOP_PORT must be a port number");
  }
  return static_cast<unsigned short>(v);
}

Session::Session(ScenarioSpec spec)
: spec_(std::move(spec)),
  state_{spec_.start, Vector::Zero(spec_.start.size())},
  min_h_(std::numeric_limits<double>::infinity())
{
  if (!spec_.lidar) {
    throw std::invalid_argument("teleop: scene needs a [lidar] section");
  }
  validate(spec_);
}

bool Session::submit(const CommandMsg & cmd)
{
  if (have_seq_ && cmd.seq <= last_seq_) {
    ++stale_;
    return false;
  }
  have_seq_ = true;
  last_seq_ = cmd.seq;
  mailbox_ = cmd;
  return true;
}

bool Session::submit_line(std::string_view line)
{
  const auto cmd = parse_command(line);
  if (!cmd) {
    ++malformed_;
    return false;
  }
  return submit(*cmd);
}

StateMsg Session::tick()
{
  const auto & cfg = spec_.cfg;
  const Vector & x = state_.position;
  Vector v_des = Vector::Zero(2);
  if (mailbox_) {
    v_des << mailbox_->vx, mailbox_->vy;
    v_des = saturate(v_des, cfg.v_max);
  }

  StateMsg msg;
  msg.t = t_;
  msg.x = x[0];
  msg.y = x[1];
  msg.vx = state_.velocity[0];
  msg.vy = state_.velocity[1];
  msg.vdes_x = v_des[0];
  msg.vdes_y = v_des[1];
  min_h_ = std::min(min_h_, clearance(x, spec_.scene) - cfg.D_obs);

  Vector v_star = Vector::Zero(2);
  try {
    const Scan s = scan(x, spec_.heading, spec_.scene, *spec_.lidar);
    for (std::size_t i = 0; i < s.beams.size(); i += kScanDecimation) {
      msg.scan.push_back(s.beams[i].range);
    }
    try {
      const auto be = scan_barrier(s, cfg.D_obs);
      const auto r = filter_single_integrator(v_des, be, LinearClassK<double>{cfg.alpha_gain});
      v_star = saturate(r.value, cfg.v_max);
      msg.h = be.h;
      msg.intervened = r.intervened;
    } catch (const NoObstacleInView &) {
      v_star = v_des;
    }
  } catch (const InsideObstacle &) {
    msg.intervened = true;
  }

  state_ = step(state_, v_star, spec_.plant, spec_.dt);
  t_ += spec_.dt;
  return msg;
}

}  // namespace safefilter::teleop
