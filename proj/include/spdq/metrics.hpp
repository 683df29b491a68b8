#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <optional>
#include <span>

#include "contract.hpp"
#include "dynamics.hpp"

namespace spdq {

struct MetricsRecord {
  std::int64_t mcs = 0;
  double f_C = 0.0;
  std::array<double, 5> action_fraction{};                 // indexed by ActionKind
  std::array<std::optional<double>, 5> correlation{};     // state C vs last_action == a
};

inline double cooperator_fraction(const World& world) {
  SPDQ_EXPECTS(world.player_count() >= 1, "cooperator_fraction: world has no players");
  std::size_t coop = 0;
  for (const Agent& a : world.agents()) coop += a.strategy == Strategy::Cooperate;
  return static_cast<double>(coop) / static_cast<double>(world.player_count());
}

/// Pearson correlation between two 0/1 indicators from their counts.
/// nullopt when either indicator has zero variance.
inline std::optional<double> binary_pearson(std::size_t n, std::size_t n_x, std::size_t n_y,
                                            std::size_t n_xy) {
  const double dn = static_cast<double>(n);
  const double vx = static_cast<double>(n_x) * (dn - static_cast<double>(n_x));
  const double vy = static_cast<double>(n_y) * (dn - static_cast<double>(n_y));
  if (vx <= 0.0 || vy <= 0.0) return std::nullopt;
  const double cov = dn * static_cast<double>(n_xy) - static_cast<double>(n_x) * static_cast<double>(n_y);
  return cov / std::sqrt(vx * vy);
}

/// Correlation over players (holes excluded) between indicator(strategy == C)
/// and indicator(last_action == action).
inline std::optional<double> state_action_correlation(const World& world, ActionKind action) {
  SPDQ_EXPECTS(world.player_count() >= 2, "state_action_correlation: needs at least 2 players");
  std::size_t n_c = 0, n_a = 0, n_ca = 0;
  for (const Agent& a : world.agents()) {
    const bool c = a.strategy == Strategy::Cooperate;
    const bool hit = a.last_action == action;
    n_c += c;
    n_a += hit;
    n_ca += c && hit;
  }
  return binary_pearson(world.player_count(), n_c, n_a, n_ca);
}

/// Mean of the last ceil(fraction * size) entries.
inline double tail_average(std::span<const double> series, double fraction) {
  SPDQ_EXPECTS(!series.empty(), "tail_average: empty series");
  SPDQ_EXPECTS(fraction > 0.0 && fraction <= 1.0, "tail_average: fraction must lie in (0, 1]");
  auto k = static_cast<std::size_t>(std::ceil(fraction * static_cast<double>(series.size())));
  k = std::clamp<std::size_t>(k, 1, series.size());
  double sum = 0.0;
  for (std::size_t i = series.size() - k; i < series.size(); ++i) sum += series[i];
  return sum / static_cast<double>(k);
}

/// All observables in one pass over the players.
inline MetricsRecord measure(const World& world) {
  MetricsRecord rec;
  rec.mcs = world.mcs_clock();
  const std::size_t n = world.player_count();
  SPDQ_EXPECTS(n >= 1, "measure: world has no players");
  std::size_t n_c = 0;
  std::array<std::size_t, 5> n_a{}, n_ca{};
  for (const Agent& a : world.agents()) {
    const bool c = a.strategy == Strategy::Cooperate;
    n_c += c;
    ++n_a[index_of(a.last_action)];
    if (c) ++n_ca[index_of(a.last_action)];
  }
  const double dn = static_cast<double>(n);
  rec.f_C = static_cast<double>(n_c) / dn;
  for (std::size_t k = 0; k < 5; ++k) {
    rec.action_fraction[k] = static_cast<double>(n_a[k]) / dn;
    if (n >= 2) rec.correlation[k] = binary_pearson(n, n_c, n_a[k], n_ca[k]);
  }
  return rec;
}

}  // namespace spdq
