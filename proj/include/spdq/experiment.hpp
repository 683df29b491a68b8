#pragma once
/*
experiment.hpp -- single runs, replicated runs and parameter sweeps.

Job seeds depend only on (base seed, cell index, replica index), so results
are independent of how many workers execute the jobs.
*/

#include <algorithm>
#include <array>
#include <atomic>
#include <cmath>
#include <cstdint>
#include <exception>
#include <functional>
#include <mutex>
#include <optional>
#include <random>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

#include "config.hpp"
#include "dynamics.hpp"
#include "metrics.hpp"

namespace spdq {

struct RunSummary {
  double f_C = 0.0;
  std::array<std::optional<double>, 5> action_fraction{};  // admissible actions only
  std::array<std::optional<double>, 5> correlation{};      // mean over defined tail values
};

struct RunResult {
  std::vector<MetricsRecord> series;  // one record per MCS, mcs = 1..n_mcs
  RunSummary summary;
};

using McsObserver = std::function<void(const World&)>;
using WorldPrep = std::function<void(World&)>;

struct RunHooks {
  WorldPrep prepare;     // applied once to the freshly built world
  McsObserver observer;  // sees the initial world and the world after every MCS
};

inline World make_world(const SimConfig& config) {
  return World(config.L, config.rho, config.dynamics(), config.seed, config.init_mode);
}

inline RunSummary summarize(std::span<const MetricsRecord> series, ActionSet set,
                            double tail_fraction) {
  SPDQ_EXPECTS(!series.empty(), "summarize: empty series");
  std::vector<double> column(series.size());
  auto tail_of = [&](auto field) {
    for (std::size_t i = 0; i < series.size(); ++i) column[i] = field(series[i]);
    return tail_average(column, tail_fraction);
  };
  RunSummary s;
  s.f_C = tail_of([](const MetricsRecord& r) { return r.f_C; });
  const auto k = static_cast<std::size_t>(
      std::ceil(tail_fraction * static_cast<double>(series.size())));
  const std::size_t start = series.size() - std::clamp<std::size_t>(k, 1, series.size());
  for (ActionKind a : actions(set)) {
    const std::size_t i = index_of(a);
    s.action_fraction[i] = tail_of([i](const MetricsRecord& r) { return r.action_fraction[i]; });
    double sum = 0.0;
    std::size_t defined = 0;
    for (std::size_t t = start; t < series.size(); ++t) {
      if (const auto& c = series[t].correlation[i]) {
        sum += *c;
        ++defined;
      }
    }
    if (defined > 0) s.correlation[i] = sum / static_cast<double>(defined);
  }
  return s;
}

/// Runs n_mcs MCS on an existing world and records the observables after each.
inline RunResult run_world(World& world, const SimConfig& config,
                           const McsObserver& observer = {}) {
  const std::int64_t n = config.resolved_n_mcs();
  RunResult result;
  result.series.reserve(static_cast<std::size_t>(n));
  if (observer) observer(world);
  for (std::int64_t t = 0; t < n; ++t) {
    world.mcs();
    result.series.push_back(measure(world));
    if (observer) observer(world);
  }
  result.summary = summarize(result.series, config.action_set, config.tail_fraction);
  return result;
}

inline RunResult run_single(const SimConfig& config, const RunHooks& hooks = {}) {
  config.validate();
  World world = make_world(config);
  if (hooks.prepare) hooks.prepare(world);
  return run_world(world, config, hooks.observer);
}

inline std::uint64_t derive_seed(std::uint64_t base, std::size_t cell, std::size_t replica) {
  std::seed_seq seq{static_cast<std::uint32_t>(base), static_cast<std::uint32_t>(base >> 32),
                    static_cast<std::uint32_t>(cell), static_cast<std::uint32_t>(replica)};
  std::array<std::uint32_t, 2> out{};
  seq.generate(out.begin(), out.end());
  return (static_cast<std::uint64_t>(out[0]) << 32) | out[1];
}

struct ReplicatedSummary {
  std::size_t replicas = 0;
  double f_C_mean = 0.0;
  double f_C_stderr = 0.0;  // sample standard deviation / sqrt(replicas); 0 for one replica
  std::array<std::optional<double>, 5> action_mean{};
  std::array<std::optional<double>, 5> correlation_mean{};
  std::vector<RunSummary> runs;
};

inline ReplicatedSummary aggregate(std::vector<RunSummary> runs) {
  SPDQ_EXPECTS(!runs.empty(), "aggregate: no runs");
  ReplicatedSummary agg;
  agg.replicas = runs.size();
  const double n = static_cast<double>(runs.size());
  double sum = 0.0;
  for (const auto& r : runs) sum += r.f_C;
  agg.f_C_mean = sum / n;
  if (runs.size() > 1) {
    double ss = 0.0;
    for (const auto& r : runs) ss += (r.f_C - agg.f_C_mean) * (r.f_C - agg.f_C_mean);
    agg.f_C_stderr = std::sqrt(ss / (n - 1.0)) / std::sqrt(n);
  }
  auto mean_defined = [&](auto field) -> std::optional<double> {
    double total = 0.0;
    std::size_t count = 0;
    for (const auto& r : runs) {
      if (const auto& v = field(r)) {
        total += *v;
        ++count;
      }
    }
    if (count == 0) return std::nullopt;
    return total / static_cast<double>(count);
  };
  for (std::size_t k = 0; k < 5; ++k) {
    agg.action_mean[k] = mean_defined([k](const RunSummary& r) { return r.action_fraction[k]; });
    agg.correlation_mean[k] = mean_defined([k](const RunSummary& r) { return r.correlation[k]; });
  }
  agg.runs = std::move(runs);
  return agg;
}

struct SweepSpec {
  SimConfig base;
  std::vector<double> b_values;
  std::vector<double> rho_values;
  std::vector<double> p_d_values;

  /// Cartesian product in (b, rho, p_d) nesting order, b outermost. An empty
  /// axis keeps the base value.
  std::vector<SimConfig> cells() const {
    if (b_values.empty() && rho_values.empty() && p_d_values.empty())
      throw std::invalid_argument("sweep needs at least one non-empty axis");
    auto axis = [](const std::vector<double>& v, double fallback) {
      return v.empty() ? std::vector<double>{fallback} : v;
    };
    std::vector<SimConfig> out;
    for (double b : axis(b_values, base.b)) {
      for (double rho : axis(rho_values, base.rho)) {
        for (double p_d : axis(p_d_values, base.p_d)) {
          SimConfig c = base;
          c.b = b;
          c.rho = rho;
          c.p_d = p_d;
          out.push_back(c);
        }
      }
    }
    return out;
  }
};

struct JobInfo {
  std::size_t cell = 0;
  std::size_t replica = 0;
  SimConfig config;  // seed already derived
};

/// Jobs in deterministic order: cell-major, then replica.
inline std::vector<JobInfo> plan_jobs(const SweepSpec& spec) {
  std::vector<JobInfo> jobs;
  const auto cells = spec.cells();
  for (std::size_t c = 0; c < cells.size(); ++c) {
    cells[c].validate();
    for (std::size_t r = 0; r < static_cast<std::size_t>(cells[c].replicas); ++r) {
      JobInfo job{c, r, cells[c]};
      job.config.seed = derive_seed(spec.base.seed, c, r);
      jobs.push_back(job);
    }
  }
  return jobs;
}

struct SweepRow {
  SimConfig config;  // cell configuration (base seed)
  ReplicatedSummary summary;
};

struct SweepOptions {
  unsigned workers = 1;
  WorldPrep prepare;  // applied to every job's initial world
  // Called from worker threads once per finished job.
  std::function<void(const JobInfo&, const RunResult&)> on_run;
};

inline std::string describe_cell(const SimConfig& c) {
  return "b=" + format_double(c.b) + " rho=" + format_double(c.rho) +
         " p_d=" + format_double(c.p_d);
}

inline std::vector<SweepRow> run_sweep(const SweepSpec& spec, const SweepOptions& options = {}) {
  const auto cells = spec.cells();
  const auto jobs = plan_jobs(spec);
  std::vector<RunSummary> results(jobs.size());

  std::atomic<std::size_t> next{0};
  std::atomic<bool> abort{false};
  std::mutex error_mutex;
  std::optional<std::size_t> failed_job;
  std::exception_ptr failure;

  auto worker = [&] {
    while (!abort.load()) {
      const std::size_t j = next.fetch_add(1);
      if (j >= jobs.size()) return;
      try {
        RunResult run = run_single(jobs[j].config, {options.prepare, {}});
        if (options.on_run) options.on_run(jobs[j], run);
        results[j] = run.summary;
      } catch (...) {
        std::lock_guard lock(error_mutex);
        if (!failed_job || j < *failed_job) {
          failed_job = j;
          failure = std::current_exception();
        }
        abort = true;
      }
    }
  };

  const unsigned n_workers =
      std::max(1u, std::min<unsigned>(options.workers, static_cast<unsigned>(jobs.size())));
  if (n_workers == 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    for (unsigned w = 0; w < n_workers; ++w) pool.emplace_back(worker);
  }

  if (failed_job) {
    const JobInfo& job = jobs[*failed_job];
    std::string what = "unknown error";
    try {
      std::rethrow_exception(failure);
    } catch (const std::exception& e) {
      what = e.what();
    } catch (...) {
    }
    throw std::runtime_error("sweep cell " + std::to_string(job.cell) + " (" +
                             describe_cell(job.config) + "), replica " +
                             std::to_string(job.replica) + " failed: " + what);
  }

  std::vector<SweepRow> rows;
  rows.reserve(cells.size());
  std::size_t j = 0;
  for (const SimConfig& cell : cells) {
    std::vector<RunSummary> runs;
    for (int r = 0; r < cell.replicas; ++r) runs.push_back(results[j++]);
    rows.push_back({cell, aggregate(std::move(runs))});
  }
  return rows;
}

/// `replicas` independent runs of one configuration (a one-cell sweep).
inline ReplicatedSummary run_replicated(const SimConfig& config, unsigned workers = 1,
                                        WorldPrep prepare = {}) {
  SweepSpec spec;
  spec.base = config;
  spec.b_values = {config.b};
  return run_sweep(spec, {workers, std::move(prepare), {}}).front().summary;
}

}  // namespace spdq
