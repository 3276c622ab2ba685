#pragma once

#include <cstdint>
#include <iosfwd>
#include <vector>

#include "relaxmitl/cost.hpp"
#include "relaxmitl/product.hpp"

namespace relaxmitl::energy {

using product::StateId;

/// Edge cost used for the shortest-path energy.
enum class EdgeCostMode : std::uint8_t {
  /// w * (1 + alpha * v_d(s')): strictly positive and unaffected by clock
  /// expiry, so energy descent survives deadlines that lapse on their own.
  DiscreteWeighted,
  /// w * (1 + (1-alpha) v_c(s') + alpha v_d(s')).
  ViolationWeighted,
  /// w * ((1-alpha) v_c(s') + alpha v_d(s')); can be zero, for comparison only.
  PathWeight,
};

struct EnergyOptions {
  double alpha = 0.8;
  EdgeCostMode mode = EdgeCostMode::DiscreteWeighted;
};

struct EnergyTable {
  std::vector<Cost> J;
  /// sorted
  std::vector<StateId> fstar;
  std::uint64_t version = 0;

  bool in_fstar(StateId p) const;
};

/// Accepting states that can reach an accepting cycle in one or more steps.
/// Computed from the fixed transition graph, so blocking never changes it.
std::vector<StateId> largest_self_reachable(const product::Rpa& rpa);

Cost edge_cost(const product::Rpa& rpa, StateId from, StateId to, const EnergyOptions& opts);

/// Multi-source Dijkstra from F* over reversed transitions.
EnergyTable compute_energy(const product::Rpa& rpa, std::vector<StateId> fstar, const EnergyOptions& opts);

/// Apply sensed label changes to the product and recompute J. F* is reused.
/// An empty `info` returns `table` untouched.
EnergyTable automaton_update(product::Rpa& rpa, StateId current, const std::vector<wts::LabelDelta>& info,
                             const EnergyTable& table, const EnergyOptions& opts);

/// id,q,x,y,s,J
void write_energy_csv(std::ostream& os, const product::Rpa& rpa, const EnergyTable& table);

}  // namespace relaxmitl::energy
