#ifndef SAFEFILTER_TELEOP_HPP_
#define SAFEFILTER_TELEOP_HPP_

#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "safefilter/sim.hpp"

namespace safefilter::teleop {

inline constexpr unsigned short kDefaultPort = 8090;
inline constexpr int kScanDecimation = 8;

/// Desired velocity from a client, {"type":"cmd","vx":..,"vy":..,"seq":..}.
struct CommandMsg
{
  double vx{0.0};
  double vy{0.0};
  std::int64_t seq{0};
};

/// Per-tick state broadcast, {"type":"state",...}. h is null when nothing is in view.
struct StateMsg
{
  double t{0.0};
  double x{0.0};
  double y{0.0};
  double vx{0.0};
  double vy{0.0};
  double vdes_x{0.0};
  double vdes_y{0.0};
  std::optional<double> h;
  bool intervened{false};
  std::vector<double> scan;  // every kScanDecimation-th beam range [m]
};

/// Parses one command line. Anything that is not a well-formed CommandMsg
/// yields nullopt.
std::optional<CommandMsg> parse_command(std::string_view line);

/// Single-line encodings, each terminated by '\n'.
std::string encode(const StateMsg & msg);
std::string encode_scene(const ScenarioSpec & spec);

/// Port from $SAFEFILTER_TELEOP_PORT, else `fallback`.
unsigned short port_from_env(unsigned short fallback = kDefaultPort);

/// Simulation side of the bridge. Not thread-safe; the server drives it from
/// one thread.
class Session
{
public:
  /// Requires spec.lidar.
  explicit Session(ScenarioSpec spec);

  /// Latest-wins mailbox. Commands with seq <= the last accepted seq are dropped.
  /// Returns whether the command was accepted.
  bool submit(const CommandMsg & cmd);

  /// Parses and submits one line; malformed lines are counted and dropped.
  bool submit_line(std::string_view line);

  /// Advances one tick with the most recent command (zero before the first).
  StateMsg tick();

  const ScenarioSpec & spec() const { return spec_; }
  const PlantState & state() const { return state_; }
  double time() const { return t_; }
  long malformed() const { return malformed_; }
  long stale() const { return stale_; }
  double min_h() const { return min_h_; }

private:
  ScenarioSpec spec_;
  PlantState state_;
  double t_{0.0};
  std::optional<CommandMsg> mailbox_;
  std::int64_t last_seq_{0};
  bool have_seq_{false};
  long malformed_{0};
  long stale_{0};
  double min_h_;
};

/// Websocket server around a Session. Binds in the constructor (throws
/// std::runtime_error when the port is taken; port 0 picks a free one) and
/// ticks at tick_hz while run() is active. The session's dt becomes 1/tick_hz.
class Server
{
public:
  Server(ScenarioSpec spec, unsigned short port, double tick_hz = 50.0);
  ~Server();
  Server(const Server &) = delete;
  Server & operator=(const Server &) = delete;

  unsigned short port() const;

  /// Blocks until stop() is called.
  void run();

  /// Thread-safe.
  void stop();

  /// Counters, safe to read from any thread.
  long ticks() const;
  long clients() const;
  long malformed() const;

private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

}  // namespace safefilter::teleop

#endif  // SAFEFILTER_TELEOP_HPP_
