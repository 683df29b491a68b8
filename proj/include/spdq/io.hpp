#pragma once
/*
io.hpp -- file formats.

Results CSV (one row per sweep cell, header always present):
  action_set,L,rho,b,p_d,alpha,gamma,epsilon,n_mcs,replicas,f_C_mean,f_C_stderr,
  C_mean,D_mean,M_mean,B_mean,P_mean
Action columns hold the tail-averaged fraction of players whose last action was
that action; they are empty for actions outside the run's action set.

Series CSV (one row per MCS):
  mcs,f_C,frac_C,frac_D,frac_M,frac_B,frac_P,corr_C,corr_D,corr_M,corr_B,corr_P
Undefined correlations (constant indicator) are empty fields.

Snapshot grids: L lines of L space-separated integers.
  state grid:  0 hole, 1 C, 2 D
  action grid: 0 hole, 1 C, 2 D, 3 M, 4 B, 5 P   (last action taken)

Q-table dump: one line per agent in handle order, 2n space-separated values,
state-C row first, columns in action-set order.

Manifest: JSON array, one object per job {cell, replica, seed, config{...}}.
*/

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <optional>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

#include "config.hpp"
#include "experiment.hpp"
#include "metrics.hpp"

namespace spdq {

inline constexpr const char* kResultsHeader =
    "action_set,L,rho,b,p_d,alpha,gamma,epsilon,n_mcs,replicas,f_C_mean,f_C_stderr,"
    "C_mean,D_mean,M_mean,B_mean,P_mean";

inline constexpr const char* kSeriesHeader =
    "mcs,f_C,frac_C,frac_D,frac_M,frac_B,frac_P,corr_C,corr_D,corr_M,corr_B,corr_P";

inline std::string format_optional(const std::optional<double>& v) {
  return v ? format_double(*v) : std::string{};
}

inline void write_results_csv(std::ostream& out, const std::vector<SweepRow>& rows) {
  out << kResultsHeader << '\n';
  for (const auto& row : rows) {
    const SimConfig& c = row.config;
    out << to_string(c.action_set) << ',' << c.L << ',' << format_double(c.rho) << ','
        << format_double(c.b) << ',' << format_double(c.p_d) << ',' << format_double(c.alpha)
        << ',' << format_double(c.gamma) << ',' << format_double(c.resolved_epsilon()) << ','
        << c.resolved_n_mcs() << ',' << row.summary.replicas << ','
        << format_double(row.summary.f_C_mean) << ',' << format_double(row.summary.f_C_stderr);
    for (const auto& m : row.summary.action_mean) out << ',' << format_optional(m);
    out << '\n';
  }
}

inline void write_series_csv(std::ostream& out, const std::vector<MetricsRecord>& series) {
  out << kSeriesHeader << '\n';
  for (const auto& r : series) {
    out << r.mcs << ',' << format_double(r.f_C);
    for (double f : r.action_fraction) out << ',' << format_double(f);
    for (const auto& c : r.correlation) out << ',' << format_optional(c);
    out << '\n';
  }
}

inline std::ofstream open_for_write(const std::filesystem::path& path) {
  if (path.has_parent_path()) {
    std::error_code ec;
    std::filesystem::create_directories(path.parent_path(), ec);
  }
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open " + path.string() + " for writing");
  return out;
}

inline void close_checked(std::ofstream& out, const std::filesystem::path& path) {
  out.close();
  if (!out) throw std::runtime_error("write to " + path.string() + " failed");
}

struct Grid {
  int side = 0;
  std::vector<int> codes;  // row-major

  int at(int row, int col) const { return codes[static_cast<std::size_t>(row) * side + col]; }
  friend bool operator==(const Grid&, const Grid&) = default;
};

constexpr int state_code(Strategy s) { return s == Strategy::Cooperate ? 1 : 2; }
constexpr int action_code(ActionKind a) { return static_cast<int>(index_of(a)) + 1; }

inline Grid state_grid(const World& world) {
  const Lattice& lat = world.lattice();
  Grid g{lat.side(), std::vector<int>(lat.site_count(), 0)};
  for (const Agent& a : world.agents()) g.codes[a.site] = state_code(a.strategy);
  return g;
}

inline Grid action_grid(const World& world) {
  const Lattice& lat = world.lattice();
  Grid g{lat.side(), std::vector<int>(lat.site_count(), 0)};
  for (const Agent& a : world.agents()) g.codes[a.site] = action_code(a.last_action);
  return g;
}

inline void write_grid(std::ostream& out, const Grid& g) {
  for (int r = 0; r < g.side; ++r) {
    for (int c = 0; c < g.side; ++c) {
      if (c) out << ' ';
      out << g.at(r, c);
    }
    out << '\n';
  }
}

inline Grid parse_grid(std::istream& in) {
  Grid g;
  std::string line;
  while (std::getline(in, line)) {
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    std::istringstream row(line);
    std::vector<int> values;
    for (int v; row >> v;) values.push_back(v);
    if (!row.eof()) throw std::runtime_error("grid: non-integer token");
    if (g.side == 0) g.side = static_cast<int>(values.size());
    if (static_cast<int>(values.size()) != g.side)
      throw std::runtime_error("grid: ragged row");
    g.codes.insert(g.codes.end(), values.begin(), values.end());
  }
  if (g.side == 0 || g.codes.size() != static_cast<std::size_t>(g.side) * g.side)
    throw std::runtime_error("grid: expected a square grid");
  return g;
}

inline Grid read_grid(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open grid file " + path.string());
  try {
    return parse_grid(in);
  } catch (const std::runtime_error& e) {
    throw std::runtime_error(path.string() + ": " + e.what());
  }
}

struct SnapshotPaths {
  std::filesystem::path state;
  std::filesystem::path action;
};

/// Writes <dir>/<stem>_state.txt and <dir>/<stem>_action.txt.
inline SnapshotPaths dump_snapshot(const World& world, const std::filesystem::path& dir,
                                   const std::string& stem) {
  SnapshotPaths paths{dir / (stem + "_state.txt"), dir / (stem + "_action.txt")};
  auto state = open_for_write(paths.state);
  write_grid(state, state_grid(world));
  close_checked(state, paths.state);
  auto action = open_for_write(paths.action);
  write_grid(action, action_grid(world));
  close_checked(action, paths.action);
  return paths;
}

inline void write_qtables(std::ostream& out, const World& world) {
  for (const Agent& a : world.agents()) {
    bool first = true;
    for (Strategy s : {Strategy::Cooperate, Strategy::Defect}) {
      for (double v : a.q.row(s)) {
        if (!first) out << ' ';
        out << format_double(v);
        first = false;
      }
    }
    out << '\n';
  }
}

inline nlohmann::json to_json(const SimConfig& c) {
  nlohmann::json j = nlohmann::json::object();
  for (const auto& [k, v] : settings_of(c)) j[k] = v;
  return j;
}

inline nlohmann::json manifest_json(const std::vector<JobInfo>& jobs) {
  nlohmann::json arr = nlohmann::json::array();
  for (const auto& job : jobs) {
    arr.push_back({{"cell", job.cell},
                   {"replica", job.replica},
                   {"seed", job.config.seed},
                   {"config", to_json(job.config)}});
  }
  return arr;
}

}  // namespace spdq
