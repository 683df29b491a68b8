#pragma once
/*
config.hpp -- simulation configuration.

A SimConfig can be filled from a key=value text file and from command-line
flags; both go through apply_setting(), so keys and flag names are identical:

  L rho b p_d alpha gamma epsilon action_set n_mcs replicas tail_fraction seed
  init_mode update_on_failed_move persist_reward best_includes_self

epsilon and n_mcs default by action set when left unset (0.02 / 2e4 for the
static and mobile sets, 0.15 / 1e5 for best and persist_best).
*/

#include <charconv>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "dynamics.hpp"

namespace spdq {

/// Shortest decimal form that round-trips to the same double.
inline std::string format_double(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

struct SimConfig {
  int L = 100;
  double rho = 1.0;
  double b = 1.4;
  double p_d = 0.0;
  double alpha = 0.75;
  double gamma = 0.8;
  std::optional<double> epsilon;
  ActionSet action_set = ActionSet::Static;
  std::optional<std::int64_t> n_mcs;
  int replicas = 10;
  double tail_fraction = 0.1;
  std::uint64_t seed = 0;
  InitMode init_mode = InitMode::Random;

  bool update_on_failed_move = true;
  PersistReward persist_reward = PersistReward::Stale;
  bool best_includes_self = true;

  bool knowledge_free() const {
    return action_set == ActionSet::Static || action_set == ActionSet::Mobile;
  }
  double resolved_epsilon() const { return epsilon.value_or(knowledge_free() ? 0.02 : 0.15); }
  std::int64_t resolved_n_mcs() const {
    return n_mcs.value_or(knowledge_free() ? 20'000 : 100'000);
  }

  /// Copy with every defaulted field made explicit.
  SimConfig resolved() const {
    SimConfig c = *this;
    c.epsilon = resolved_epsilon();
    c.n_mcs = resolved_n_mcs();
    return c;
  }

  DynamicsParams dynamics() const {
    DynamicsParams p;
    p.payoff.b = b;
    p.learning = {alpha, gamma, resolved_epsilon()};
    p.p_d = p_d;
    p.action_set = action_set;
    p.update_on_failed_move = update_on_failed_move;
    p.persist_reward = persist_reward;
    p.best_includes_self = best_includes_self;
    return p;
  }

  void validate() const {
    if (L < 2) throw std::invalid_argument("L must be >= 2");
    if (!(rho > 0.0 && rho <= 1.0)) throw std::invalid_argument("rho must lie in (0, 1]");
    dynamics().validate();
    if (resolved_n_mcs() < 1) throw std::invalid_argument("n_mcs must be >= 1");
    if (replicas < 1) throw std::invalid_argument("replicas must be >= 1");
    if (!(tail_fraction > 0.0 && tail_fraction <= 1.0))
      throw std::invalid_argument("tail_fraction must lie in (0, 1]");
    if (player_count_for(L, rho) < 1)
      throw std::invalid_argument("rho * L^2 rounds to zero players");
  }
};

namespace detail {

template <class T>
T parse_number(std::string_view key, std::string_view text) {
  T value{};
  const auto* first = text.data();
  const auto* last = text.data() + text.size();
  const auto res = std::from_chars(first, last, value);
  if (res.ec != std::errc{} || res.ptr != last)
    throw std::invalid_argument("invalid value '" + std::string(text) + "' for " +
                                std::string(key));
  return value;
}

inline bool parse_bool(std::string_view key, std::string_view text) {
  if (text == "true" || text == "1" || text == "yes") return true;
  if (text == "false" || text == "0" || text == "no") return false;
  throw std::invalid_argument("invalid boolean '" + std::string(text) + "' for " +
                              std::string(key));
}

inline std::string_view trim(std::string_view s) {
  const auto ws = " \t\r\n";
  const auto b = s.find_first_not_of(ws);
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(ws);
  return s.substr(b, e - b + 1);
}

}  // namespace detail

inline void apply_setting(SimConfig& c, std::string_view key, std::string_view value) {
  using detail::parse_bool;
  using detail::parse_number;
  value = detail::trim(value);
  if (key == "L") c.L = parse_number<int>(key, value);
  else if (key == "rho") c.rho = parse_number<double>(key, value);
  else if (key == "b") c.b = parse_number<double>(key, value);
  else if (key == "p_d") c.p_d = parse_number<double>(key, value);
  else if (key == "alpha") c.alpha = parse_number<double>(key, value);
  else if (key == "gamma") c.gamma = parse_number<double>(key, value);
  else if (key == "epsilon") c.epsilon = parse_number<double>(key, value);
  else if (key == "action_set") c.action_set = parse_action_set(value);
  else if (key == "n_mcs") {
    const double n = parse_number<double>(key, value);  // accepts 2e4
    if (n != std::floor(n)) throw std::invalid_argument("n_mcs must be an integer");
    c.n_mcs = static_cast<std::int64_t>(n);
  }
  else if (key == "replicas") c.replicas = parse_number<int>(key, value);
  else if (key == "tail_fraction") c.tail_fraction = parse_number<double>(key, value);
  else if (key == "seed") c.seed = parse_number<std::uint64_t>(key, value);
  else if (key == "init_mode") c.init_mode = parse_init_mode(value);
  else if (key == "update_on_failed_move") c.update_on_failed_move = parse_bool(key, value);
  else if (key == "persist_reward") {
    if (value == "stale") c.persist_reward = PersistReward::Stale;
    else if (value == "zero") c.persist_reward = PersistReward::Zero;
    else throw std::invalid_argument("persist_reward must be 'stale' or 'zero'");
  } else if (key == "best_includes_self") c.best_includes_self = parse_bool(key, value);
  else throw std::invalid_argument("unknown configuration key '" + std::string(key) + "'");
}

/// Every field as (key, value) text, in a fixed order. Unset optionals are
/// written with their resolved default.
inline std::vector<std::pair<std::string, std::string>> settings_of(const SimConfig& c) {
  return {
      {"L", std::to_string(c.L)},
      {"rho", format_double(c.rho)},
      {"b", format_double(c.b)},
      {"p_d", format_double(c.p_d)},
      {"alpha", format_double(c.alpha)},
      {"gamma", format_double(c.gamma)},
      {"epsilon", format_double(c.resolved_epsilon())},
      {"action_set", std::string(to_string(c.action_set))},
      {"n_mcs", std::to_string(c.resolved_n_mcs())},
      {"replicas", std::to_string(c.replicas)},
      {"tail_fraction", format_double(c.tail_fraction)},
      {"seed", std::to_string(c.seed)},
      {"init_mode", std::string(to_string(c.init_mode))},
      {"update_on_failed_move", c.update_on_failed_move ? "true" : "false"},
      {"persist_reward", c.persist_reward == PersistReward::Stale ? "stale" : "zero"},
      {"best_includes_self", c.best_includes_self ? "true" : "false"},
  };
}

/// Splits `key = value` lines into pairs. Blank lines and '#' comments are
/// ignored.
inline std::vector<std::pair<std::string, std::string>> parse_settings(std::string_view text) {
  std::vector<std::pair<std::string, std::string>> out;
  std::size_t line_no = 0;
  while (!text.empty()) {
    const auto nl = text.find('\n');
    std::string_view line = text.substr(0, nl);
    text = nl == std::string_view::npos ? std::string_view{} : text.substr(nl + 1);
    ++line_no;
    if (const auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
    line = detail::trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string_view::npos)
      throw std::invalid_argument("config line " + std::to_string(line_no) +
                                  ": expected key = value");
    out.emplace_back(detail::trim(line.substr(0, eq)), detail::trim(line.substr(eq + 1)));
  }
  return out;
}

inline SimConfig parse_config_text(std::string_view text, SimConfig base = {}) {
  for (const auto& [k, v] : parse_settings(text)) apply_setting(base, k, v);
  return base;
}

inline std::string read_text_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open config file " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

inline SimConfig load_config_file(const std::string& path, SimConfig base = {}) {
  const std::string text = read_text_file(path);
  try {
    return parse_config_text(text, std::move(base));
  } catch (const std::invalid_argument& e) {
    throw std::invalid_argument(path + ": " + e.what());
  }
}

inline std::string to_config_text(const SimConfig& c) {
  std::string out;
  for (const auto& [k, v] : settings_of(c)) out += k + " = " + v + "\n";
  return out;
}

}  // namespace spdq
