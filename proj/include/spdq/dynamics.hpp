#pragma once
/*
dynamics.hpp -- action semantics and the asynchronous Monte Carlo scheduler.

One sample: pick a player uniformly (with replacement), choose an action
epsilon-greedily, carry it out, then apply the Q-update unless the action was a
skipped move. One MCS is L^2 samples.

RNG draw order within a sample:
  player pick -> exploration draw -> action/tie draw -> p_d draw -> vacancy pick
Copy-the-best draws a tie-break only when several neighbours share the best
payoff.
*/

#include <cstdint>
#include <optional>
#include <random>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "contract.hpp"
#include "game.hpp"
#include "lattice.hpp"
#include "learning.hpp"

namespace spdq {

using Engine = std::mt19937_64;

enum class InitMode : std::uint8_t { Random, Striped };

inline std::string_view to_string(InitMode m) {
  return m == InitMode::Random ? "random" : "striped";
}

inline InitMode parse_init_mode(std::string_view s) {
  if (s == "random") return InitMode::Random;
  if (s == "striped") return InitMode::Striped;
  throw std::invalid_argument("unknown init mode '" + std::string(s) +
                              "' (expected random or striped)");
}

// Reward credited to a persisting agent.
enum class PersistReward : std::uint8_t { Stale, Zero };

struct Agent {
  AgentHandle id = kNoAgent;
  std::size_t site = 0;  // flat lattice index
  Strategy strategy = Strategy::Cooperate;
  double last_payoff = 0.0;
  ActionKind last_action = ActionKind::C;
  QTable q;
};

struct DynamicsParams {
  PayoffParams payoff;
  LearningParams learning;
  double p_d = 0.0;
  ActionSet action_set = ActionSet::Static;

  // Model variants for readings the reference model leaves open. Defaults are
  // the canonical choices.
  bool update_on_failed_move = true;  // reward-0 Q-update when M is skipped
  PersistReward persist_reward = PersistReward::Stale;
  bool best_includes_self = true;

  void validate() const {
    payoff.validate();
    learning.validate();
    if (!(p_d >= 0.0 && p_d <= 1.0)) throw std::invalid_argument("p_d must lie in [0, 1]");
  }
};

struct ActOutcome {
  bool skipped = false;
  double reward = 0.0;
  Strategy next_state = Strategy::Cooperate;

  static ActOutcome skip() { return {true, 0.0, Strategy::Cooperate}; }
};

struct StepRecord {
  AgentHandle agent = kNoAgent;
  Selection selection{};
  ActOutcome outcome{};
};

class World {
 public:
  World(int L, double rho, DynamicsParams params, std::uint64_t seed,
        InitMode init = InitMode::Random)
      : params_(params), rng_(seed), lattice_(check_then_build(L, rho, params, rng_)) {
    agents_.resize(lattice_.player_count());
    for (std::size_t i = 0; i < lattice_.site_count(); ++i) {
      const AgentHandle h = lattice_.at_flat(i);
      if (h != kNoAgent) agents_[static_cast<std::size_t>(h)].site = i;
    }
    const int band = std::max(1, L / 10);
    std::bernoulli_distribution coin(0.5);
    for (std::size_t h = 0; h < agents_.size(); ++h) {
      Agent& a = agents_[h];
      a.id = static_cast<AgentHandle>(h);
      if (init == InitMode::Random) {
        a.strategy = coin(rng_) ? Strategy::Cooperate : Strategy::Defect;
      } else {
        const int row = lattice_.site_of(a.site).row;
        a.strategy = (row / band) % 2 == 0 ? Strategy::Cooperate : Strategy::Defect;
      }
      a.q = QTable::zeros(params_.action_set);
      a.last_action = initial_action(a.strategy);
    }
  }

  /// Hand-built world: `layout` holds L*L row-major cells, nullopt for a hole.
  /// Handles are assigned in row-major order.
  static World from_layout(int L, std::span<const std::optional<Strategy>> layout,
                           DynamicsParams params, std::uint64_t seed) {
    if (layout.size() != static_cast<std::size_t>(L) * L)
      throw std::invalid_argument("layout size must be L*L");
    return World(L, layout, params, seed);
  }

  const DynamicsParams& params() const { return params_; }
  const Lattice& lattice() const { return lattice_; }
  std::span<const Agent> agents() const { return agents_; }
  Agent& agent(AgentHandle h) { return agents_.at(static_cast<std::size_t>(h)); }
  const Agent& agent(AgentHandle h) const { return agents_.at(static_cast<std::size_t>(h)); }
  std::size_t player_count() const { return lattice_.player_count(); }
  std::int64_t mcs_clock() const { return mcs_clock_; }
  std::uint64_t samples_taken() const { return samples_; }
  Engine& rng() { return rng_; }

  SiteIndex site_of(AgentHandle h) const { return lattice_.site_of(agent(h).site); }

  /// Plays one round at the agent's current site and stores the payoff.
  double play(AgentHandle h) {
    Agent& a = agent(h);
    const double pay =
        site_payoff(lattice_, lattice_.site_of(a.site),
                    [this](AgentHandle o) { return agents_[static_cast<std::size_t>(o)].strategy; },
                    params_.payoff);
    a.last_payoff = pay;
    return pay;
  }

  ActOutcome act_strategy(AgentHandle h, Strategy chosen) {
    agent(h).strategy = chosen;
    return {false, play(h), chosen};
  }

  ActOutcome act_move(AgentHandle h) {
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    if (!(unit(rng_) < params_.p_d)) return ActOutcome::skip();
    Agent& a = agent(h);
    const SiteIndex from = lattice_.site_of(a.site);
    const NeighborList vacant = lattice_.vacant_neighbors(from);
    if (vacant.empty()) return ActOutcome::skip();
    const SiteIndex to =
        vacant.size() == 1
            ? vacant[0]
            : vacant[static_cast<std::size_t>(
                  std::uniform_int_distribution<int>(0, vacant.count - 1)(rng_))];
    lattice_.relocate(from, to);
    a.site = lattice_.flat(to);
    return {false, play(h), a.strategy};
  }

  ActOutcome act_copy_best(AgentHandle h) {
    Agent& a = agent(h);
    std::array<AgentHandle, 4> tied{};
    int n_tied = 0;
    double best = -1.0;
    for (std::int32_t n : lattice_.neighbor_flat(a.site)) {
      const AgentHandle o = lattice_.at_flat(static_cast<std::size_t>(n));
      if (o == kNoAgent) continue;
      const double pay = agents_[static_cast<std::size_t>(o)].last_payoff;
      if (pay > best) {
        best = pay;
        n_tied = 0;
      }
      if (pay == best) tied[n_tied++] = o;
    }
    const bool keep_own =
        n_tied == 0 || (params_.best_includes_self && a.last_payoff >= best);
    if (!keep_own) {
      const AgentHandle model =
          n_tied == 1 ? tied[0]
                      : tied[static_cast<std::size_t>(
                            std::uniform_int_distribution<int>(0, n_tied - 1)(rng_))];
      a.strategy = agents_[static_cast<std::size_t>(model)].strategy;
    }
    return {false, play(h), a.strategy};
  }

  ActOutcome act_persist(AgentHandle h) {
    const Agent& a = agent(h);
    const double reward = params_.persist_reward == PersistReward::Stale ? a.last_payoff : 0.0;
    return {false, reward, a.strategy};
  }

  ActOutcome dispatch(AgentHandle h, ActionKind action) {
    switch (action) {
      case ActionKind::C: return act_strategy(h, Strategy::Cooperate);
      case ActionKind::D: return act_strategy(h, Strategy::Defect);
      case ActionKind::M: return act_move(h);
      case ActionKind::B: return act_copy_best(h);
      case ActionKind::P: return act_persist(h);
    }
    throw contract_violation("dispatch: unknown action");
  }

  StepRecord sample_step() {
    SPDQ_EXPECTS(!agents_.empty(), "sample_step: world has no players");
    ++samples_;
    const auto h = static_cast<AgentHandle>(
        std::uniform_int_distribution<std::size_t>(0, agents_.size() - 1)(rng_));
    const Strategy state = agent(h).strategy;
    const Selection sel =
        select_action(agent(h).q, state, params_.action_set, params_.learning, rng_);
    ActOutcome out = dispatch(h, sel.action);
    Agent& a = agent(h);
    if (out.skipped) {
      if (params_.update_on_failed_move)
        update_q(a.q, state, sel.column, 0.0, a.strategy, params_.learning);
      return {h, sel, out};
    }
    update_q(a.q, state, sel.column, out.reward, out.next_state, params_.learning);
    a.strategy = out.next_state;
    a.last_action = sel.action;
    return {h, sel, out};
  }

  void mcs() {
    const std::size_t samples = lattice_.site_count();
    for (std::size_t i = 0; i < samples; ++i) sample_step();
    ++mcs_clock_;
  }

  /// Full consistency check of the agent <-> site bijection.
  void audit() const {
    SPDQ_EXPECTS(lattice_.count_occupied() == lattice_.player_count(),
                 "audit: player count disagrees with occupancy");
    SPDQ_EXPECTS(agents_.size() == lattice_.player_count(), "audit: agent count mismatch");
    for (const Agent& a : agents_) {
      SPDQ_EXPECTS(lattice_.at_flat(a.site) == a.id, "audit: agent not found at its site");
    }
  }

 private:
  World(int L, std::span<const std::optional<Strategy>> layout, DynamicsParams params,
        std::uint64_t seed)
      : params_(params), rng_(seed), lattice_(L) {
    params_.validate();
    for (std::size_t i = 0; i < layout.size(); ++i) {
      if (!layout[i]) continue;
      const auto h = static_cast<AgentHandle>(agents_.size());
      lattice_.place(lattice_.site_of(i), h);
      Agent a;
      a.id = h;
      a.site = i;
      a.strategy = *layout[i];
      a.q = QTable::zeros(params_.action_set);
      a.last_action = initial_action(a.strategy);
      agents_.push_back(a);
    }
  }

  static Lattice check_then_build(int L, double rho, const DynamicsParams& params, Engine& rng) {
    params.validate();
    return build_lattice(L, rho, rng);
  }

  ActionKind initial_action(Strategy s) const {
    if (admits(params_.action_set, ActionKind::C))
      return s == Strategy::Cooperate ? ActionKind::C : ActionKind::D;
    return ActionKind::B;
  }

  DynamicsParams params_;
  Engine rng_;
  Lattice lattice_;
  std::vector<Agent> agents_;
  std::int64_t mcs_clock_ = 0;
  std::uint64_t samples_ = 0;
};

}  // namespace spdq
