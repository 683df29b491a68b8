#pragma once
/*
lattice.hpp -- diluted L x L square lattice with periodic boundaries.

Each site is either empty or holds exactly one agent handle. Handles are stable
ids decoupled from position, so per-agent state travels with the agent when it
is relocated. Neighbour order is always (N, S, W, E).
*/

#include <algorithm>
#include <array>
#include <cmath>
#include <compare>
#include <cstddef>
#include <cstdint>
#include <numeric>
#include <random>
#include <stdexcept>
#include <vector>

#include "contract.hpp"

namespace spdq {

using AgentHandle = std::int32_t;
inline constexpr AgentHandle kNoAgent = -1;

struct SiteIndex {
  int row = 0;
  int col = 0;
  friend constexpr auto operator<=>(const SiteIndex&, const SiteIndex&) = default;
};

constexpr int wrap_coord(int x, int L) {
  const int m = x % L;
  return m < 0 ? m + L : m;
}

constexpr SiteIndex wrap(int row, int col, int L) {
  return {wrap_coord(row, L), wrap_coord(col, L)};
}

/// von Neumann neighbourhood under periodic wrap, ordered (N, S, W, E).
constexpr std::array<SiteIndex, 4> neighbors(SiteIndex s, int L) {
  return {wrap(s.row - 1, s.col, L), wrap(s.row + 1, s.col, L),
          wrap(s.row, s.col - 1, L), wrap(s.row, s.col + 1, L)};
}

/// Number of players for density rho on an L x L lattice (round half up).
inline std::size_t player_count_for(int L, double rho) {
  const double sites = static_cast<double>(L) * static_cast<double>(L);
  return static_cast<std::size_t>(std::floor(rho * sites + 0.5));
}

// Fixed-capacity list of up to four sites; avoids heap traffic in the sweep
// kernel.
struct NeighborList {
  std::array<SiteIndex, 4> sites{};
  int count = 0;

  void push_back(SiteIndex s) { sites[count++] = s; }
  std::size_t size() const { return static_cast<std::size_t>(count); }
  bool empty() const { return count == 0; }
  const SiteIndex& operator[](std::size_t i) const { return sites[i]; }
  const SiteIndex* begin() const { return sites.data(); }
  const SiteIndex* end() const { return sites.data() + count; }
};

class Lattice {
 public:
  explicit Lattice(int side_length)
      : side_(side_length),
        cells_(static_cast<std::size_t>(side_length) * side_length, kNoAgent),
        neighbor_table_(cells_.size()) {
    if (side_length < 2) throw std::invalid_argument("lattice side length must be >= 2");
    for (std::size_t i = 0; i < cells_.size(); ++i) {
      const auto nb = neighbors(site_of(i), side_);
      for (int k = 0; k < 4; ++k) neighbor_table_[i][k] = static_cast<std::int32_t>(flat(nb[k]));
    }
  }

  int side() const { return side_; }
  std::size_t site_count() const { return cells_.size(); }
  std::size_t player_count() const { return player_count_; }

  std::size_t flat(SiteIndex s) const {
    return static_cast<std::size_t>(s.row) * side_ + static_cast<std::size_t>(s.col);
  }
  SiteIndex site_of(std::size_t flat_index) const {
    return {static_cast<int>(flat_index / side_), static_cast<int>(flat_index % side_)};
  }
  bool contains(SiteIndex s) const {
    return s.row >= 0 && s.row < side_ && s.col >= 0 && s.col < side_;
  }

  AgentHandle at(SiteIndex s) const { return cells_[flat(s)]; }
  AgentHandle at_flat(std::size_t i) const { return cells_[i]; }
  bool occupied(SiteIndex s) const { return at(s) != kNoAgent; }

  /// Flat indices of the (N, S, W, E) neighbours of a flat site.
  const std::array<std::int32_t, 4>& neighbor_flat(std::size_t i) const {
    return neighbor_table_[i];
  }

  NeighborList vacant_neighbors(SiteIndex s) const {
    NeighborList out;
    for (std::int32_t n : neighbor_table_[flat(s)]) {
      if (cells_[n] == kNoAgent) out.push_back(site_of(n));
    }
    return out;
  }

  void place(SiteIndex s, AgentHandle h) {
    SPDQ_EXPECTS(contains(s), "place: site outside lattice");
    SPDQ_EXPECTS(h != kNoAgent, "place: invalid handle");
    SPDQ_EXPECTS(!occupied(s), "place: site already occupied");
    cells_[flat(s)] = h;
    ++player_count_;
  }

  void relocate(SiteIndex from, SiteIndex to) {
    SPDQ_EXPECTS(contains(from) && contains(to), "relocate: site outside lattice");
    SPDQ_EXPECTS(occupied(from), "relocate: origin is empty");
    SPDQ_EXPECTS(!occupied(to), "relocate: destination is occupied");
    const auto& nb = neighbor_table_[flat(from)];
    SPDQ_EXPECTS(std::find(nb.begin(), nb.end(), static_cast<std::int32_t>(flat(to))) != nb.end(),
                 "relocate: destination is not a neighbour");
    cells_[flat(to)] = cells_[flat(from)];
    cells_[flat(from)] = kNoAgent;
  }

  std::size_t count_occupied() const {
    return static_cast<std::size_t>(
        std::count_if(cells_.begin(), cells_.end(), [](AgentHandle h) { return h != kNoAgent; }));
  }

 private:
  int side_;
  std::size_t player_count_ = 0;
  std::vector<AgentHandle> cells_;
  std::vector<std::array<std::int32_t, 4>> neighbor_table_;
};

/// Occupies round(rho * L^2) sites drawn uniformly without replacement.
/// Handles 0..N-1 are assigned in row-major order of the chosen sites.
template <std::uniform_random_bit_generator Rng>
Lattice build_lattice(int L, double rho, Rng& rng) {
  if (L < 2) throw std::invalid_argument("lattice side length must be >= 2");
  if (!(rho > 0.0 && rho <= 1.0)) throw std::invalid_argument("density rho must lie in (0, 1]");
  Lattice lattice(L);
  const std::size_t n = player_count_for(L, rho);
  std::vector<std::size_t> all(lattice.site_count());
  std::iota(all.begin(), all.end(), std::size_t{0});
  std::vector<std::size_t> chosen;
  chosen.reserve(n);
  std::sample(all.begin(), all.end(), std::back_inserter(chosen), n, rng);
  AgentHandle next = 0;
  for (std::size_t i : chosen) lattice.place(lattice.site_of(i), next++);
  return lattice;
}

}  // namespace spdq
