#pragma once

#include <cstdint>
#include <stdexcept>

#include "lattice.hpp"

namespace spdq {

enum class Strategy : std::uint8_t { Cooperate = 0, Defect = 1 };

constexpr char to_char(Strategy s) { return s == Strategy::Cooperate ? 'C' : 'D'; }

// Weak prisoner's dilemma: R = 1, T = b, S = P = 0.
struct PayoffParams {
  double b = 1.4;

  void validate() const {
    if (!(b > 1.0 && b < 2.0)) throw std::invalid_argument("temptation b must lie in (1, 2)");
  }
};

constexpr double pair_payoff(Strategy mine, Strategy theirs, PayoffParams params) {
  if (theirs == Strategy::Defect) return 0.0;
  return mine == Strategy::Cooperate ? 1.0 : params.b;
}

/// Payoff collected by the agent at `site` against its occupied von Neumann
/// neighbours. Empty neighbours are skipped. `strategy_of` maps an AgentHandle
/// to that agent's current Strategy.
template <class StrategyOf>
double site_payoff(const Lattice& lattice, SiteIndex site, StrategyOf&& strategy_of,
                   PayoffParams params) {
  const std::size_t i = lattice.flat(site);
  const AgentHandle focal = lattice.at_flat(i);
  SPDQ_EXPECTS(focal != kNoAgent, "site_payoff: site is empty");
  const Strategy mine = strategy_of(focal);
  double total = 0.0;
  for (std::int32_t n : lattice.neighbor_flat(i)) {
    const AgentHandle other = lattice.at_flat(static_cast<std::size_t>(n));
    if (other != kNoAgent) total += pair_payoff(mine, strategy_of(other), params);
  }
  return total;
}

}  // namespace spdq
