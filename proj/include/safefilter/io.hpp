#ifndef SAFEFILTER_IO_HPP_
#define SAFEFILTER_IO_HPP_

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "safefilter/sim.hpp"

namespace safefilter {

/// Scenario file problem, with the offending field and source line (0 when unknown).
class ScenarioError : public std::runtime_error
{
public:
  ScenarioError(const std::string & source, int line, const std::string & field,
                const std::string & message);

  int line() const { return line_; }
  const std::string & field() const { return field_; }

private:
  int line_;
  std::string field_;
};

/// Parses and validates a scenario from TOML text. `source` only labels errors.
ScenarioSpec parse_scenario(std::string_view text, const std::string & source = "<string>");

ScenarioSpec load_scenario(const std::filesystem::path & path);

/// Canonical TOML form. parse_scenario(to_toml(s)) reproduces s.
std::string to_toml(const ScenarioSpec & spec);

/// FNV-1a over the canonical TOML form, as 16 hex digits.
std::string content_hash(const ScenarioSpec & spec);

/// Applies one `key=value` override. Keys are the controller fields (K_att, K_rep,
/// rho0, D_obs, alpha, delta, tracking_gain, v_max), simulation fields (dt, horizon,
/// goal_tolerance), plant fields (time_constant, max_accel), lidar fields
/// (range_noise, seed), heading_deg, controller and name.
void apply_override(ScenarioSpec & spec, std::string_view assignment);

/// Names accepted by apply_override.
std::span<const std::string_view> override_keys();

inline constexpr std::string_view kCsvHeader =
  "t,px,py,vx,vy,vdes_x,vdes_y,vstar_x,vstar_y,h,clearance,intervened";

/// Trajectory rows as CSV at 17 significant digits.
void write_csv(std::ostream & out, const TrajectoryLog & log);

/// Inverse of write_csv for planar logs. Throws std::runtime_error on malformed input.
std::vector<LogRow> read_csv(std::istream & in);

struct PlotSeries
{
  std::string label;
  const TrajectoryLog * log;
};

/// Top-down plot of the scene with one trajectory per series, plus a speed-vs-time
/// panel underneath.
std::string render_svg(const ScenarioSpec & spec, std::span<const PlotSeries> series);

}  // namespace safefilter

#endif  // SAFEFILTER_IO_HPP_
