#include "cli.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <csignal>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <ostream>
#include <sstream>
#include <thread>

#include <CLI11.hpp>

#ifdef SAFEFILTER_HAVE_TELEOP
#include "safefilter/teleop.hpp"
#endif

#ifndef SAFEFILTER_SCENARIO_DIR
#define SAFEFILTER_SCENARIO_DIR "scenarios"
#endif

namespace safefilter::cli {

namespace fs = std::filesystem;

namespace {

std::string fixed(double v, int digits = 4)
{
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", digits, v);
  return buf;
}

bool collided(const RunReport & r)
{
  return r.log.terminal.kind == TerminalKind::collision;
}

void write_file(const fs::path & path, const std::string & text)
{
  std::ofstream out(path, std::ios::binary);
  out << text;
  if (!out) {
    throw std::runtime_error("cannot write " + path.string());
  }
}

void write_artifacts(RunReport & r, const fs::path & dir, const std::string & stem)
{
  fs::create_directories(dir);
  r.csv = dir / (stem + ".csv");
  r.svg = dir / (stem + ".svg");
  std::ofstream csv(r.csv, std::ios::binary);
  write_csv(csv, r.log);
  if (!csv) {
    throw std::runtime_error("cannot write " + r.csv.string());
  }
  const PlotSeries s{std::string(to_string(r.spec.controller)), &r.log};
  write_file(r.svg, render_svg(r.spec, std::span<const PlotSeries>(&s, 1)));
}

std::vector<double> parse_values(const std::vector<std::string> & raw)
{
  std::vector<double> out;
  for (const auto & item : raw) {
    std::stringstream ss(item);
    std::string tok;
    while (std::getline(ss, tok, ',')) {
      if (tok.empty()) {
        continue;
      }
      char * end = nullptr;
      const double v = std::strtod(tok.c_str(), &end);
      if (*end != '\0') {
        throw CLI::ValidationError("--values", "not a number: " + tok);
      }
      out.push_back(v);
    }
  }
  return out;
}

const char * kMetricsHeader =
  "label,name,hash,controller,terminal,t_end,reached,time_to_goal,min_clearance,path_length,"
  "oscillation_index,reversal_count,stuck,min_h,interventions";

std::string metrics_row(const std::string & label, const RunReport & r)
{
  const auto & m = r.metrics;
  std::ostringstream o;
  o << label << ',' << r.name << ',' << r.hash << ',' << to_string(r.spec.controller) << ','
    << to_string(r.log.terminal.kind) << ',' << fixed(r.log.terminal.t, 4) << ',' << m.reached
    << ',' << (m.time_to_goal ? fixed(*m.time_to_goal, 4) : std::string()) << ','
    << fixed(m.min_clearance, 6) << ',' << fixed(m.path_length, 6) << ','
    << fixed(m.oscillation_index, 6) << ',' << m.reversal_count << ',' << m.stuck << ','
    << fixed(m.min_h, 6) << ',' << m.interventions;
  return o.str();
}

// Set by SIGINT/SIGTERM while the teleop bridge runs.
std::atomic<bool> g_interrupted{false};

}  // namespace

fs::path default_out_dir()
{
  const char * env = std::getenv("SAFEFILTER_OUT");
  return (env != nullptr && *env != '\0') ? fs::path(env) : fs::path("out");
}

ScenarioSpec prepare(const fs::path & scenario, const RunOptions & opts)
{
  ScenarioSpec spec = load_scenario(scenario);
  if (opts.controller) {
    spec.controller = *opts.controller;
  }
  for (const auto & o : opts.overrides) {
    apply_override(spec, o);
  }
  if (opts.dt) {
    spec.dt = *opts.dt;
  }
  if (opts.seed && spec.lidar) {
    spec.lidar->seed = *opts.seed;
  }
  validate(spec);
  return spec;
}

RunReport execute(const ScenarioSpec & spec)
{
  RunReport r;
  r.name = spec.name;
  r.hash = content_hash(spec);
  r.spec = spec;
  r.log = run(spec);
  r.metrics = compute_metrics(r.log, spec);
  return r;
}

std::vector<RunReport> execute_all(const std::vector<ScenarioSpec> & specs, unsigned workers)
{
  std::vector<RunReport> out(specs.size());
  if (workers == 0) {
    workers = std::max(1u, std::thread::hardware_concurrency());
  }
  workers = std::min<unsigned>(workers, static_cast<unsigned>(std::max<std::size_t>(1, specs.size())));
  std::atomic<std::size_t> next{0};
  std::vector<std::thread> pool;
  for (unsigned w = 0; w < workers; ++w) {
    pool.emplace_back([&] {
      for (std::size_t i = next++; i < specs.size(); i = next++) {
        out[i] = execute(specs[i]);
      }
    });
  }
  for (auto & t : pool) {
    t.join();
  }
  return out;
}

std::string summary(const RunReport & r)
{
  const auto & m = r.metrics;
  std::ostringstream o;
  o << r.name << " [" << r.hash << "] controller=" << to_string(r.spec.controller)
    << " terminal=" << to_string(r.log.terminal.kind) << " t=" << fixed(r.log.terminal.t, 2)
    << " reached=" << (m.reached ? "yes" : "no") << " stuck=" << (m.stuck ? "yes" : "no")
    << " min_clearance=" << fixed(m.min_clearance) << " min_h=" << fixed(m.min_h)
    << " path=" << fixed(m.path_length, 3) << " osc=" << fixed(m.oscillation_index)
    << " reversals=" << m.reversal_count << " interventions=" << m.interventions;
  return o.str();
}

int main(int argc, const char * const * argv, std::ostream & out, std::ostream & err)
{
  CLI::App app{"Potential-field and control-barrier-function safety filter simulator"};
  app.require_subcommand(1);

  fs::path out_dir = default_out_dir();
  RunOptions opts;
  std::string controller_name;
  std::optional<double> dt;
  std::optional<unsigned long long> seed;

  auto add_common = [&](CLI::App * sub) {
    sub->add_option("--out", out_dir, "Output directory (default $SAFEFILTER_OUT or ./out)");
    sub->add_option("--set", opts.overrides, "Override a scenario field, key=value (repeatable)");
    sub->add_option("--controller", controller_name, "apf | apf-gaussian | cbf | apf-cbf")
      ->check(CLI::IsMember({"apf", "apf-gaussian", "cbf", "apf-cbf"}));
    sub->add_option("--dt", dt, "Time step [s]")->check(CLI::PositiveNumber);
    sub->add_option("--seed", seed, "LIDAR noise seed");
  };

  fs::path scenario;
  auto * run_cmd = app.add_subcommand("run", "Run one scenario, write CSV and SVG");
  run_cmd->add_option("scenario", scenario, "Scenario file")->required();
  add_common(run_cmd);

  std::string param;
  std::vector<std::string> raw_values;
  auto * sweep_cmd = app.add_subcommand("sweep", "Run a scenario over values of one parameter");
  sweep_cmd->add_option("scenario", scenario, "Scenario file")->required();
  sweep_cmd->add_option("--param", param, "Parameter to vary")->required();
  sweep_cmd->add_option("--values", raw_values, "Values, comma separated or repeated")->required();
  unsigned workers = 0;
  sweep_cmd->add_option("--jobs", workers, "Worker threads (default: hardware concurrency)");
  add_common(sweep_cmd);

  auto * compare_cmd = app.add_subcommand("compare", "Run the APF and CBF controllers on one scene");
  compare_cmd->add_option("scenario", scenario, "Scenario file")->required();
  add_common(compare_cmd);

  fs::path scenario_dir = SAFEFILTER_SCENARIO_DIR;
  auto * list_cmd = app.add_subcommand("scenarios", "List bundled scenario files");
  list_cmd->add_option("--dir", scenario_dir, "Scenario directory");

  unsigned short port = 0;
  double tick_hz = 50.0;
  auto * teleop_cmd = app.add_subcommand("teleop", "Serve a scene over the websocket teleop bridge");
  teleop_cmd->add_option("scene", scenario, "Scenario file with a [lidar] section")->required();
  teleop_cmd->add_option("--port", port, "Port (default $SAFEFILTER_TELEOP_PORT or 8090)");
  teleop_cmd->add_option("--tick-hz", tick_hz, "Simulation rate [Hz]")->check(CLI::PositiveNumber);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError & e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kOk : kUsage;
  }

  if (!controller_name.empty()) {
    opts.controller = parse_controller(controller_name);
  }
  opts.dt = dt;
  opts.seed = seed;

  try {
    if (*run_cmd) {
      RunReport r = execute(prepare(scenario, opts));
      write_artifacts(r, out_dir, r.name);
      out << summary(r) << "\n";
      out << "wrote " << r.csv.string() << " " << r.svg.string() << "\n";
      return collided(r) ? kSafetyFailure : kOk;
    }

    if (*sweep_cmd) {
      const auto names = override_keys();
      if (std::find(names.begin(), names.end(), param) == names.end() || param == "controller" ||
          param == "name")
      {
        err << "sweep: unknown parameter '" << param << "'\n";
        return kUsage;
      }
      const auto values = parse_values(raw_values);
      if (values.empty()) {
        err << "sweep: no values given\n";
        return kUsage;
      }
      const ScenarioSpec base = prepare(scenario, opts);
      std::vector<ScenarioSpec> specs;
      std::vector<std::string> labels;
      for (double v : values) {
        ScenarioSpec s = base;
        std::ostringstream a;
        a.precision(17);
        a << param << '=' << v;
        apply_override(s, a.str());
        validate(s);
        std::ostringstream label;
        label << param << '=' << v;
        labels.push_back(label.str());
        specs.push_back(std::move(s));
      }
      auto reports = execute_all(specs, workers);
      fs::create_directories(out_dir);
      const std::string stem = base.name + "_sweep_" + param;
      std::ofstream table(out_dir / (stem + ".csv"), std::ios::binary);
      table << kMetricsHeader << "\n";
      std::vector<PlotSeries> series;
      bool any_collision = false;
      for (std::size_t i = 0; i < reports.size(); ++i) {
        table << metrics_row(labels[i], reports[i]) << "\n";
        series.push_back({labels[i], &reports[i].log});
        out << labels[i] << ": " << summary(reports[i]) << "\n";
        any_collision = any_collision || collided(reports[i]);
      }
      write_file(out_dir / (stem + ".svg"), render_svg(base, series));
      out << "wrote " << (out_dir / (stem + ".csv")).string() << " "
          << (out_dir / (stem + ".svg")).string() << "\n";
      return any_collision ? kSafetyFailure : kOk;
    }

    if (*compare_cmd) {
      const ScenarioSpec base = prepare(scenario, opts);
      ScenarioSpec apf = base;
      apf.controller = base.lidar ? ControllerKind::apf_gaussian : ControllerKind::apf;
      if (base.controller == ControllerKind::apf || base.controller == ControllerKind::apf_gaussian) {
        apf.controller = base.controller;
      }
      ScenarioSpec cbf = base;
      cbf.controller = ControllerKind::cbf;
      auto reports = execute_all({apf, cbf}, 2);
      fs::create_directories(out_dir);
      const std::string stem = base.name + "_compare";
      std::ofstream table(out_dir / (stem + ".csv"), std::ios::binary);
      table << kMetricsHeader << "\n";
      std::vector<PlotSeries> series;
      for (auto & r : reports) {
        const std::string label(to_string(r.spec.controller));
        table << metrics_row(label, r) << "\n";
        series.push_back({label, &r.log});
        write_artifacts(r, out_dir, base.name + "_" + label);
      }
      write_file(out_dir / (stem + ".svg"), render_svg(base, series));

      const auto & a = reports[0].metrics;
      const auto & c = reports[1].metrics;
      char line[160];
      out << "metric             " << to_string(apf.controller) << "          cbf        diff\n";
      auto row = [&](const char * name, double x, double y) {
        std::snprintf(line, sizeof line, "%-18s %12.4f %12.4f %11.4f\n", name, x, y, x - y);
        out << line;
      };
      row("reached", a.reached, c.reached);
      row("min_clearance", a.min_clearance, c.min_clearance);
      row("min_h", a.min_h, c.min_h);
      row("path_length", a.path_length, c.path_length);
      row("oscillation_index", a.oscillation_index, c.oscillation_index);
      row("reversal_count", a.reversal_count, c.reversal_count);
      row("interventions", a.interventions, c.interventions);
      out << "terminals: " << to_string(reports[0].log.terminal.kind) << " / "
          << to_string(reports[1].log.terminal.kind) << "\n";
      out << "wrote " << (out_dir / (stem + ".svg")).string() << "\n";
      return (collided(reports[0]) || collided(reports[1])) ? kSafetyFailure : kOk;
    }

    if (*list_cmd) {
      std::vector<fs::path> files;
      if (!fs::is_directory(scenario_dir)) {
        err << "scenarios: no such directory " << scenario_dir.string() << "\n";
        return kUsage;
      }
      for (const auto & e : fs::directory_iterator(scenario_dir)) {
        if (e.path().extension() == ".toml") {
          files.push_back(e.path());
        }
      }
      std::sort(files.begin(), files.end());
      for (const auto & f : files) {
        const ScenarioSpec s = load_scenario(f);
        out << s.name << "  " << content_hash(s) << "  " << to_string(s.controller) << "  "
            << (s.lidar ? "lidar" : "geometric") << "  " << f.string() << "\n";
      }
      return kOk;
    }

    if (*teleop_cmd) {
#ifdef SAFEFILTER_HAVE_TELEOP
      const ScenarioSpec spec = load_scenario(scenario);
      if (teleop_cmd->count("--port") == 0) {
        port = teleop::port_from_env();
      }
      teleop::Server server(spec, port, tick_hz);
      out << "teleop bridge on ws://127.0.0.1:" << server.port() << " (" << spec.name << ")\n";
      out.flush();
      std::signal(SIGINT, [](int) { g_interrupted = true; });
      std::signal(SIGTERM, [](int) { g_interrupted = true; });
      std::thread watcher([&] {
        while (!g_interrupted) {
          std::this_thread::sleep_for(std::chrono::milliseconds(50));
        }
        server.stop();
      });
      server.run();
      g_interrupted = true;
      watcher.join();
      out << "served " << server.ticks() << " ticks, " << server.malformed()
          << " malformed messages\n";
      return kOk;
#else
      err << "teleop: built without the teleop bridge\n";
      return kUsage;
#endif
    }
  } catch (const ScenarioError & e) {
    err << "error: " << e.what() << "\n";
    return kUsage;
  } catch (const std::invalid_argument & e) {
    err << "error: " << e.what() << "\n";
    return kUsage;
  } catch (const CLI::Error & e) {
    err << "error: " << e.what() << "\n";
    return kUsage;
  }
  return kUsage;
}

}  // namespace safefilter::cli
