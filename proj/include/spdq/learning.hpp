#pragma once
/*
learning.hpp -- per-agent tabular Q-learning.

State space is the agent's strategy in the previous round, {C, D}. The action
space depends on the ActionSet chosen for the simulation; the listed order of
each set fixes the Q-table column order.
*/

#include <array>
#include <cmath>
#include <cstdint>
#include <optional>
#include <random>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>

#include "contract.hpp"
#include "game.hpp"

namespace spdq {

enum class ActionKind : std::uint8_t { C = 0, D = 1, M = 2, B = 3, P = 4 };
inline constexpr std::array<ActionKind, 5> kAllActions{ActionKind::C, ActionKind::D,
                                                       ActionKind::M, ActionKind::B,
                                                       ActionKind::P};

enum class ActionSet : std::uint8_t { Static, Mobile, Best, PersistBest };

constexpr char to_char(ActionKind a) {
  constexpr std::array<char, 5> names{'C', 'D', 'M', 'B', 'P'};
  return names[static_cast<std::size_t>(a)];
}

constexpr std::size_t index_of(ActionKind a) { return static_cast<std::size_t>(a); }

inline std::span<const ActionKind> actions(ActionSet set) {
  static constexpr std::array<ActionKind, 2> kStatic{ActionKind::C, ActionKind::D};
  static constexpr std::array<ActionKind, 3> kMobile{ActionKind::C, ActionKind::D, ActionKind::M};
  static constexpr std::array<ActionKind, 2> kBest{ActionKind::B, ActionKind::M};
  static constexpr std::array<ActionKind, 3> kPersistBest{ActionKind::B, ActionKind::P,
                                                          ActionKind::M};
  switch (set) {
    case ActionSet::Static: return kStatic;
    case ActionSet::Mobile: return kMobile;
    case ActionSet::Best: return kBest;
    case ActionSet::PersistBest: return kPersistBest;
  }
  return {};
}

/// Q-table column of `a` in `set`, or nullopt if the action is not admissible.
inline std::optional<int> column_of(ActionSet set, ActionKind a) {
  const auto acts = actions(set);
  for (std::size_t i = 0; i < acts.size(); ++i) {
    if (acts[i] == a) return static_cast<int>(i);
  }
  return std::nullopt;
}

inline bool admits(ActionSet set, ActionKind a) { return column_of(set, a).has_value(); }

inline std::string_view to_string(ActionSet set) {
  switch (set) {
    case ActionSet::Static: return "static";
    case ActionSet::Mobile: return "mobile";
    case ActionSet::Best: return "best";
    case ActionSet::PersistBest: return "persist_best";
  }
  return "?";
}

inline ActionSet parse_action_set(std::string_view s) {
  if (s == "static" || s == "S") return ActionSet::Static;
  if (s == "mobile" || s == "M") return ActionSet::Mobile;
  if (s == "best" || s == "B") return ActionSet::Best;
  if (s == "persist_best" || s == "PB" || s == "BP") return ActionSet::PersistBest;
  throw std::invalid_argument("unknown action set '" + std::string(s) +
                              "' (expected static, mobile, best or persist_best)");
}

// 2 x n action values; row 0 is state C, row 1 is state D.
class QTable {
 public:
  static constexpr int kMaxActions = 3;

  QTable() = default;
  explicit QTable(int n_actions) : n_(n_actions) {
    SPDQ_EXPECTS(n_actions >= 1 && n_actions <= kMaxActions, "QTable: bad action count");
  }
  static QTable zeros(ActionSet set) { return QTable(static_cast<int>(actions(set).size())); }

  int columns() const { return n_; }

  double& operator()(Strategy state, int column) { return values_[offset(state, column)]; }
  double operator()(Strategy state, int column) const { return values_[offset(state, column)]; }

  std::span<const double> row(Strategy state) const {
    return {values_.data() + static_cast<std::size_t>(state) * kMaxActions,
            static_cast<std::size_t>(n_)};
  }

  double row_max(Strategy state) const {
    const auto r = row(state);
    double m = r[0];
    for (std::size_t i = 1; i < r.size(); ++i) m = r[i] > m ? r[i] : m;
    return m;
  }

  friend bool operator==(const QTable&, const QTable&) = default;

 private:
  std::size_t offset(Strategy state, int column) const {
    return static_cast<std::size_t>(state) * kMaxActions + static_cast<std::size_t>(column);
  }

  int n_ = 2;
  std::array<double, 2 * kMaxActions> values_{};
};

struct LearningParams {
  double alpha = 0.75;
  double gamma = 0.8;
  double epsilon = 0.02;

  void validate() const {
    if (!(alpha > 0.0 && alpha <= 1.0)) throw std::invalid_argument("alpha must lie in (0, 1]");
    if (!(gamma >= 0.0 && gamma < 1.0)) throw std::invalid_argument("gamma must lie in [0, 1)");
    if (!(epsilon >= 0.0 && epsilon <= 1.0))
      throw std::invalid_argument("epsilon must lie in [0, 1]");
  }
};

struct Selection {
  ActionKind action;
  int column;
  bool explored;
};

/// Epsilon-greedy choice on row `state`. Greedy ties are broken uniformly.
/// Draw order: exploration draw, then the action or tie draw (only when needed).
template <std::uniform_random_bit_generator Rng>
Selection select_action(const QTable& q, Strategy state, ActionSet set,
                        const LearningParams& params, Rng& rng) {
  const auto acts = actions(set);
  const int n = static_cast<int>(acts.size());
  SPDQ_EXPECTS(q.columns() == n, "select_action: Q-table does not match action set");

  std::uniform_real_distribution<double> unit(0.0, 1.0);
  if (unit(rng) < params.epsilon) {
    const int col = std::uniform_int_distribution<int>(0, n - 1)(rng);
    return {acts[col], col, true};
  }

  const auto row = q.row(state);
  std::array<int, QTable::kMaxActions> best{};
  int n_best = 0;
  double top = row[0];
  for (int c = 0; c < n; ++c) {
    if (row[c] > top) {
      top = row[c];
      n_best = 0;
    }
    if (row[c] == top) best[n_best++] = c;
  }
  const int col = n_best == 1 ? best[0]
                              : best[std::uniform_int_distribution<int>(0, n_best - 1)(rng)];
  return {acts[col], col, false};
}

/// Q[s,a] <- (1 - alpha) Q[s,a] + alpha (reward + gamma max_a' Q[s',a']).
inline void update_q(QTable& q, Strategy state, int column, double reward, Strategy next_state,
                     const LearningParams& params) {
  SPDQ_EXPECTS(std::isfinite(reward), "update_q: reward must be finite");
  SPDQ_EXPECTS(column >= 0 && column < q.columns(), "update_q: column out of range");
  const double target = reward + params.gamma * q.row_max(next_state);
  double& entry = q(state, column);
  entry = (1.0 - params.alpha) * entry + params.alpha * target;
}

inline void update_q(QTable& q, Strategy state, ActionKind action, ActionSet set, double reward,
                     Strategy next_state, const LearningParams& params) {
  const auto col = column_of(set, action);
  SPDQ_EXPECTS(col.has_value(), "update_q: action not admissible in this action set");
  update_q(q, state, *col, reward, next_state, params);
}

}  // namespace spdq
