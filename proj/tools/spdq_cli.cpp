// spdq -- command-line driver for the spatial prisoner's dilemma simulator.
//
//   spdq run      single run, prints the tail summary
//   spdq sweep    Cartesian grid over b / rho / p_d with replicas, writes CSV
//   spdq snapshot single run dumping state/action grids at chosen MCS

#include <algorithm>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <random>
#include <set>
#include <string>
#include <thread>
#include <vector>

#include "CLI11.hpp"
#include "spdq/spdq.hpp"

namespace {

using namespace spdq;

const std::vector<std::string> kConfigKeys = {
    "L",          "rho",           "b",    "p_d",       "alpha",
    "gamma",      "epsilon",       "action_set",        "n_mcs",
    "replicas",   "tail_fraction", "seed", "init_mode", "update_on_failed_move",
    "persist_reward", "best_includes_self"};

// Raw flag text keyed by config key; applied after the config file so flags win.
struct ConfigFlags {
  std::string config_file;
  std::map<std::string, std::string> raw;
  std::map<std::string, CLI::Option*> opts;

  void attach(CLI::App& app) {
    app.add_option("--config", config_file, "key=value configuration file")
        ->check(CLI::ExistingFile);
    for (const auto& key : kConfigKeys) opts[key] = app.add_option("--" + key, raw[key]);
  }

  SimConfig resolve() const {
    SimConfig c;
    bool seeded = false;
    if (!config_file.empty()) {
      const auto settings = parse_settings(read_text_file(config_file));
      for (const auto& [k, v] : settings) {
        try {
          apply_setting(c, k, v);
        } catch (const std::invalid_argument& e) {
          throw std::invalid_argument(config_file + ": " + e.what());
        }
        seeded = seeded || k == "seed";
      }
    }
    for (const auto& key : kConfigKeys) {
      if (opts.at(key)->count() == 0) continue;
      apply_setting(c, key, raw.at(key));
      seeded = seeded || key == "seed";
    }
    if (!seeded) {
      std::random_device rd;
      c.seed = (static_cast<std::uint64_t>(rd()) << 32) | rd();
      std::cerr << "no --seed given; using seed " << c.seed << '\n';
    }
    c.validate();
    return c;
  }
};

void print_summary(std::ostream& out, const SimConfig& c, const RunSummary& s) {
  out << "seed=" << c.seed << '\n' << "f_C=" << format_double(s.f_C) << '\n';
  for (ActionKind a : actions(c.action_set)) {
    const auto i = index_of(a);
    out << "frac_" << to_char(a) << '=' << format_optional(s.action_fraction[i]) << '\n';
    out << "corr_" << to_char(a) << '=' << format_optional(s.correlation[i]) << '\n';
  }
}

void write_manifest(const std::string& path, const std::vector<JobInfo>& jobs) {
  if (path.empty()) return;
  auto out = open_for_write(path);
  out << manifest_json(jobs).dump(2) << '\n';
  close_checked(out, path);
}

void write_results(const std::string& path, const std::vector<SweepRow>& rows) {
  if (path.empty()) {
    write_results_csv(std::cout, rows);
    return;
  }
  auto out = open_for_write(path);
  write_results_csv(out, rows);
  close_checked(out, path);
}

int cmd_run(const ConfigFlags& flags, const std::string& output, const std::string& series,
            const std::string& manifest, const std::string& dump_q) {
  const SimConfig c = flags.resolve();
  std::optional<World> final_world;
  const RunResult result = run_single(c, {{}, [&](const World& w) {
    if (!dump_q.empty() && w.mcs_clock() == c.resolved_n_mcs()) final_world = w;
  }});
  print_summary(std::cout, c, result.summary);

  if (!output.empty()) {
    SimConfig row_config = c;
    row_config.replicas = 1;
    write_results(output, {{row_config, aggregate({result.summary})}});
  }
  if (!series.empty()) {
    auto out = open_for_write(series);
    write_series_csv(out, result.series);
    close_checked(out, series);
  }
  write_manifest(manifest, {{0, 0, c}});
  if (!dump_q.empty()) {
    auto out = open_for_write(dump_q);
    write_qtables(out, *final_world);
    close_checked(out, dump_q);
  }
  return 0;
}

int cmd_sweep(const ConfigFlags& flags, const std::vector<double>& b_values,
              const std::vector<double>& rho_values, const std::vector<double>& p_d_values,
              unsigned workers, const std::string& output, const std::string& series_dir,
              const std::string& manifest) {
  SweepSpec spec{flags.resolve(), b_values, rho_values, p_d_values};
  write_manifest(manifest, plan_jobs(spec));
  SweepOptions options;
  options.workers = workers;
  if (!series_dir.empty()) {
    options.on_run = [&](const JobInfo& job, const RunResult& run) {
      const auto path = std::filesystem::path(series_dir) /
                        ("series_cell" + std::to_string(job.cell) + "_rep" +
                         std::to_string(job.replica) + ".csv");
      auto out = open_for_write(path);
      write_series_csv(out, run.series);
      close_checked(out, path);
    };
  }
  write_results(output, run_sweep(spec, options));
  return 0;
}

int cmd_snapshot(const ConfigFlags& flags, std::vector<std::int64_t> at, const std::string& dir,
                 bool dump_q) {
  const SimConfig c = flags.resolve();
  if (at.empty()) at = {0, 10, 100, 1'000, 10'000, 100'000};
  const std::set<std::int64_t> wanted(at.begin(), at.end());
  const RunResult result = run_single(c, {{}, [&](const World& w) {
    if (!wanted.count(w.mcs_clock())) return;
    const std::string stem = "mcs" + std::to_string(w.mcs_clock());
    dump_snapshot(w, dir, stem);
    if (dump_q) {
      const auto path = std::filesystem::path(dir) / (stem + "_q.txt");
      auto out = open_for_write(path);
      write_qtables(out, w);
      close_checked(out, path);
    }
  }});
  {
    const auto path = std::filesystem::path(dir) / "series.csv";
    auto out = open_for_write(path);
    write_series_csv(out, result.series);
    close_checked(out, path);
  }
  write_manifest((std::filesystem::path(dir) / "manifest.json").string(), {{0, 0, c}});
  print_summary(std::cout, c, result.summary);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Spatial prisoner's dilemma with independent Q-learning agents"};
  app.require_subcommand(1);

  ConfigFlags run_flags, sweep_flags, snap_flags;
  std::string run_output, run_series, run_manifest, run_dump_q;
  auto* run = app.add_subcommand("run", "single simulation run");
  run_flags.attach(*run);
  run->add_option("--output", run_output, "results CSV (one row)");
  run->add_option("--series", run_series, "per-MCS series CSV");
  run->add_option("--manifest", run_manifest, "run manifest (JSON)");
  run->add_option("--dump-q", run_dump_q, "final Q-tables");

  std::vector<double> b_values, rho_values, p_d_values;
  unsigned workers = std::max(1u, std::thread::hardware_concurrency());
  std::string sweep_output, series_dir, sweep_manifest;
  auto* sweep = app.add_subcommand("sweep", "parameter grid with replicas");
  sweep_flags.attach(*sweep);
  sweep->add_option("--b_values", b_values, "temptation values")->delimiter(',');
  sweep->add_option("--rho_values", rho_values, "density values")->delimiter(',');
  sweep->add_option("--p_d_values", p_d_values, "mobility values")->delimiter(',');
  sweep->add_option("--workers", workers, "concurrent jobs")->check(CLI::PositiveNumber);
  sweep->add_option("--output", sweep_output, "results CSV (stdout if omitted)");
  sweep->add_option("--series-dir", series_dir, "write one per-MCS series CSV per job");
  sweep->add_option("--manifest", sweep_manifest, "run manifest (JSON)");

  std::vector<std::int64_t> snapshot_at;
  std::string snapshot_dir = "snapshots";
  bool snapshot_q = false;
  auto* snapshot = app.add_subcommand("snapshot", "single run with grid dumps");
  snap_flags.attach(*snapshot);
  snapshot->add_option("--at", snapshot_at, "MCS values to dump (default 0,10,...,1e5)")
      ->delimiter(',');
  snapshot->add_option("--out-dir", snapshot_dir, "output directory");
  snapshot->add_flag("--dump-q", snapshot_q, "also dump Q-tables at each snapshot");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*run) return cmd_run(run_flags, run_output, run_series, run_manifest, run_dump_q);
    if (*sweep)
      return cmd_sweep(sweep_flags, b_values, rho_values, p_d_values, workers, sweep_output,
                       series_dir, sweep_manifest);
    if (*snapshot) return cmd_snapshot(snap_flags, snapshot_at, snapshot_dir, snapshot_q);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
