// Command-line front end: verification battery, coupled swimmer runs, the
// largest-stable-step benchmark, and Stokes field probes. Exit codes:
// 0 success, 1 verification failure, 2 config/usage error, 3 numerical error.
// Wall-clock timings go to the console only, never into output files, so two
// runs with the same config and seed produce bitwise-identical artifacts.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"

#include "cosserat/config.hpp"
#include "cosserat/errors.hpp"
#include "cosserat/stokes.hpp"
#include "cosserat/svg.hpp"
#include "cosserat/swimmer.hpp"
#include "cosserat/trace_io.hpp"
#include "cosserat/verify.hpp"

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

std::string num17(double x) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", x);
  return buf;
}

int cmd_verify(const std::string& out_dir, std::uint64_t seed) {
  cosserat::VerificationOptions opts;
  opts.seed = seed;
  const auto t0 = Clock::now();
  const cosserat::VerificationReport report = cosserat::run_verification(opts);
  const double wall = seconds_since(t0);
  std::cout << cosserat::format_report(report);
  std::cout << "battery wall time: " << wall << " s\n";

  cosserat::write_report_csv(report, out_dir + "/verify_report.csv");
  cosserat::PlotSeries margin;
  margin.label = "log10 margin (negative = pass)";
  for (std::size_t i = 0; i < report.rows.size(); ++i) {
    const cosserat::VerificationRow& r = report.rows[i];
    const double ratio = r.relation == cosserat::Relation::le
                             ? r.measured / r.threshold
                             : r.threshold / (r.measured != 0.0 ? r.measured : 1e-300);
    margin.x.push_back(static_cast<double>(i + 1));
    margin.y.push_back(std::log10(std::max(ratio, 1e-18)));
  }
  cosserat::emit_plot(out_dir + "/verify_report.svg", cosserat::PlotKind::trace, {margin},
                      "verification battery", "check index", "log10(measured/threshold)");
  return report.all_pass ? 0 : 1;
}

int cmd_run(const std::string& config_path, const std::string& out_dir,
            std::size_t stride_override) {
  cosserat::ConfigMap map = cosserat::ConfigMap::from_file(config_path);
  cosserat::SimulationRunConfig cfg = cosserat::parse_simulation_config(map);
  if (stride_override > 0) cfg.stride = stride_override;

  const cosserat::RodState initial = cosserat::init_swimmer(cfg.swimmer.rod);
  const auto t0 = Clock::now();
  const cosserat::SimulationTrace trace =
      cosserat::run_simulation(cfg.swimmer, initial, cfg.dt, cfg.steps, cfg.stride);
  const double wall = seconds_since(t0);

  cosserat::write_trace(trace, out_dir + "/trace.csv");

  const int ax0 = cfg.plot_plane[0] == 'x' ? 0 : 1;
  const int ax1 = cfg.plot_plane[1] == 'y' ? 1 : 2;
  std::vector<cosserat::PlotSeries> series;
  const std::size_t nf = trace.frames.size();
  std::vector<std::size_t> picks{0, nf / 3, (2 * nf) / 3, nf - 1};
  picks.erase(std::unique(picks.begin(), picks.end()), picks.end());
  for (std::size_t idx : picks) {
    const cosserat::TraceFrame& f = trace.frames[idx];
    cosserat::PlotSeries s;
    char label[48];
    std::snprintf(label, sizeof(label), "t = %.4g", f.time);
    s.label = label;
    for (const cosserat::Vec3& x : f.positions) {
      s.x.push_back(x[ax0]);
      s.y.push_back(x[ax1]);
    }
    series.push_back(std::move(s));
  }
  const std::string axis_names = "xyz";
  cosserat::emit_plot(out_dir + "/centerline.svg", cosserat::PlotKind::centerline, series,
                      "swimmer centerline", std::string(1, axis_names[ax0]),
                      std::string(1, axis_names[ax1]));

  const std::size_t steps_done = trace.frames.back().step;
  std::cout << "steps completed: " << steps_done << "/" << cfg.steps << "\n";
  if (trace.frames.size() >= 2 && trace.frames.back().time > trace.frames.front().time) {
    const cosserat::SwimMetrics m = cosserat::trace_metrics(trace);
    std::cout << "net displacement: " << m.displacement.transpose() << "  (|d| = "
              << m.displacement.norm() << ")\n"
              << "mean speed: " << m.mean_speed << "\n"
              << "base roll rate: " << m.base_roll_rate << "\n";
  }
  std::cout << "wall time: " << wall << " s ("
            << static_cast<double>(steps_done) / std::max(wall, 1e-12) << " steps/s)\n";
  if (trace.status != "ok") {
    std::cerr << "numerical failure: " << trace.status << "\n";
    return 3;
  }
  return 0;
}

int cmd_bench_stiffness(const std::string& config_path, const std::string& out_dir) {
  cosserat::ConfigMap map = cosserat::ConfigMap::from_file(config_path);
  const cosserat::StiffnessBenchConfig cfg = cosserat::parse_stiffness_config(map);
  const cosserat::RodScenario scenario = cosserat::make_bent_rod_scenario(
      cfg.rod, cfg.bend_amplitude, cfg.bend_mode, cfg.hf_amplitude);

  auto search = [&](cosserat::StepperKind kind, const char* name,
                    cosserat::StableStepResult& out) {
    const auto t0 = Clock::now();
    out = cosserat::stable_step_search(kind, scenario, cfg.range, cfg.window_steps);
    const double wall = seconds_since(t0);
    const double probed_steps =
        static_cast<double>(out.probes) * static_cast<double>(cfg.window_steps);
    std::cout << name << ": dt_max = " << out.dt_max << " (" << out.probes << " probes, "
              << wall << " s, ~" << probed_steps / std::max(wall, 1e-12) << " steps/s)\n";
  };
  cosserat::StableStepResult semi, full;
  search(cosserat::StepperKind::semi_analytical, "semi-analytical", semi);
  search(cosserat::StepperKind::full_numeric, "full-numeric", full);
  const double ratio = semi.dt_max / full.dt_max;
  std::cout << "dt_max ratio (semi-analytical / full-numeric): " << ratio << "\n";

  std::ofstream csv(out_dir + "/bench_stiffness.csv", std::ios::binary);
  if (!csv) throw cosserat::IoError("cannot open bench_stiffness.csv for writing");
  csv << "quantity,value\n"
      << "dt_max_semi_analytical," << num17(semi.dt_max) << "\n"
      << "dt_max_full_numeric," << num17(full.dt_max) << "\n"
      << "dt_ratio," << num17(ratio) << "\n"
      << "probes_semi_analytical," << semi.probes << "\n"
      << "probes_full_numeric," << full.probes << "\n"
      << "window_steps," << cfg.window_steps << "\n"
      << "nodes," << cfg.rod.n_nodes << "\n";
  if (!csv) throw cosserat::IoError("write failed: bench_stiffness.csv");

  auto history_series = [](const cosserat::StableStepResult& r, const std::string& label) {
    cosserat::PlotSeries s;
    s.label = label;
    for (std::size_t i = 0; i < r.history.size(); ++i) {
      s.x.push_back(static_cast<double>(i + 1));
      s.y.push_back(r.history[i].first);
    }
    return s;
  };
  cosserat::emit_plot(out_dir + "/bench_stiffness.svg", cosserat::PlotKind::convergence,
                      {history_series(semi, "semi-analytical"),
                       history_series(full, "full-numeric")},
                      "largest stable step search", "probe", "dt");
  return 0;
}

int cmd_stokes_probe(const std::string& config_path, const std::string& out_dir) {
  cosserat::ConfigMap map = cosserat::ConfigMap::from_file(config_path);
  const cosserat::StokesProbeConfig cfg = cosserat::parse_stokes_probe_config(map);

  // Explicit Vec3 return: a deduced type here would be an Eigen expression
  // template referencing dead temporaries.
  auto field = [&](const cosserat::Vec3& x) -> cosserat::Vec3 {
    return cosserat::velocity_at(x, cfg.forces, cfg.fluid) +
           cosserat::rodlet_velocity_at(x, cfg.torques, cfg.fluid);
  };
  std::ofstream csv(out_dir + "/stokes_probe.csv", std::ios::binary);
  if (!csv) throw cosserat::IoError("cannot open stokes_probe.csv for writing");
  csv << "i,j,k,x,y,z,ux,uy,uz,pressure,divergence\n";
  const std::size_t n = cfg.grid.n;
  double max_speed = 0.0, max_div = 0.0;
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j)
      for (std::size_t k = 0; k < n; ++k) {
        cosserat::Vec3 frac(static_cast<double>(i), static_cast<double>(j),
                            static_cast<double>(k));
        if (n > 1) frac /= static_cast<double>(n - 1);
        const cosserat::Vec3 x =
            cfg.grid.lo + (cfg.grid.hi - cfg.grid.lo).cwiseProduct(frac);
        const cosserat::Vec3 u = field(x);
        const double p = cosserat::pressure_at(x, cfg.forces, cfg.fluid);
        double div = 0.0;
        for (int c = 0; c < 3; ++c) {
          const cosserat::Vec3 e = cfg.fd_step * cosserat::Vec3::Unit(c);
          div += (field(x + e)[c] - field(x - e)[c]) / (2.0 * cfg.fd_step);
        }
        max_speed = std::max(max_speed, u.norm());
        max_div = std::max(max_div, std::abs(div));
        csv << i << ',' << j << ',' << k << ',' << num17(x[0]) << ',' << num17(x[1]) << ','
            << num17(x[2]) << ',' << num17(u[0]) << ',' << num17(u[1]) << ',' << num17(u[2])
            << ',' << num17(p) << ',' << num17(div) << '\n';
      }
  if (!csv) throw cosserat::IoError("write failed: stokes_probe.csv");
  std::cout << "probed " << n * n * n << " points; max |u| = " << max_speed
            << ", max |div u| = " << max_div << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Cosserat rod kinematics, semi-analytical dynamics and Stokes-coupled swimmers"};
  app.require_subcommand(1);

  std::string out_dir = ".";
  std::uint64_t seed = 12345;
  std::size_t stride_override = 0;
  app.add_option("--out", out_dir, "output directory (created if missing)");
  app.add_option("--seed", seed, "seed for randomized checks");
  app.add_option("--stride", stride_override, "override the trace recording stride");

  CLI::App* verify_cmd = app.add_subcommand("verify", "run the built-in property battery");
  std::string run_config;
  CLI::App* run_cmd = app.add_subcommand("run", "simulate a coupled swimmer");
  run_cmd->add_option("config", run_config, "simulation config file")->required();
  std::string bench_config;
  CLI::App* bench_cmd =
      app.add_subcommand("bench-stiffness", "compare largest stable steps of both steppers");
  bench_cmd->add_option("config", bench_config, "benchmark config file")->required();
  std::string probe_config;
  CLI::App* probe_cmd =
      app.add_subcommand("stokes-probe", "evaluate fluid fields on a lattice");
  probe_cmd->add_option("config", probe_config, "probe config file")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    std::filesystem::create_directories(out_dir);
    if (verify_cmd->parsed()) return cmd_verify(out_dir, seed);
    if (run_cmd->parsed()) return cmd_run(run_config, out_dir, stride_override);
    if (bench_cmd->parsed()) return cmd_bench_stiffness(bench_config, out_dir);
    if (probe_cmd->parsed()) return cmd_stokes_probe(probe_config, out_dir);
  } catch (const cosserat::ParseError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const cosserat::ValidationError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const cosserat::IoError& e) {
    std::cerr << "io error: " << e.what() << "\n";
    return 2;
  } catch (const cosserat::Error& e) {
    std::cerr << "numerical error: " << e.what() << "\n";
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  }
  return 0;
}
