#pragma once

#include <cstddef>
#include <cstdint>
#include <utility>
#include <vector>

#include "relaxmitl/cost.hpp"
#include "relaxmitl/relaxed_tba.hpp"
#include "relaxmitl/wts.hpp"

namespace relaxmitl::product {

using StateId = std::size_t;

struct RpaStats {
  std::size_t states = 0;
  std::size_t transitions = 0;
  std::size_t accepting = 0;
  std::size_t wts_states = 0;
  std::size_t tba_states = 0;
};

/// Relaxed product automaton. Every pair (q, s) is a state with id
/// q * |S| + s, so |P| = |Q| * |S|.
///
/// Transitions are fixed at construction from the soft labels: ((q,s),(q',s'))
/// exists iff (q,q') is a grid move and some TBA edge s -> s' admits the soft
/// labels of q'. Hard atoms (obstacles) are dynamic: a transition into a cell
/// currently labeled with a hard atom is blocked, i.e. it would end in the
/// sink and costs infinity. Blocking never changes the graph itself.
class Rpa {
 public:
  Rpa(wts::Wts w, tba::RelaxedTba t);

  const wts::Wts& wts() const { return wts_; }
  const tba::RelaxedTba& tba() const { return tba_; }

  std::size_t size() const { return wts_.size() * ns_; }
  StateId id(wts::StateId q, tba::StateId s) const { return q * ns_ + s; }
  wts::StateId cell_of(StateId p) const { return p / ns_; }
  tba::StateId tba_of(StateId p) const { return p % ns_; }

  StateId initial() const { return id(wts_.initial(), tba_.initial); }
  bool accepting(StateId p) const { return tba_of(p) == tba_.accepting; }
  bool sink(StateId p) const { return tba_of(p) == tba_.sink; }

  const std::vector<StateId>& successors(StateId p) const { return succ_.at(p); }
  const std::vector<StateId>& predecessors(StateId p) const { return pred_.at(p); }
  bool has_transition(StateId from, StateId to) const;

  /// Cell currently carries a hard atom.
  bool blocked_cell(wts::StateId q) const { return (wts_.label(q) & tba_.hard_atoms) != 0; }
  /// Transition whose target cell is currently blocked.
  bool blocked(StateId to) const { return blocked_cell(cell_of(to)); }

  /// Replace the knowledge label of a cell. Only hard atoms may change.
  void set_label(wts::StateId q, wts::AtomSet label);
  std::uint64_t version() const { return version_; }

  /// (1-alpha) v_c(s') + alpha v_d(s'); infinity into the sink or a blocked cell.
  Cost violation_weight(StateId from, StateId to, double alpha) const;
  double weight(StateId from, StateId to) const { return wts_.weight(cell_of(from), cell_of(to)); }

  RpaStats stats() const;

 private:
  wts::Wts wts_;
  tba::RelaxedTba tba_;
  std::size_t ns_ = 0;
  std::vector<std::vector<StateId>> succ_;
  std::vector<std::vector<StateId>> pred_;
  std::uint64_t version_ = 0;
};

/// Sum over steps of w(p_k, p_{k+1}) * violation_weight(p_k, p_{k+1}).
Cost path_weight(const Rpa& rpa, const std::vector<StateId>& path, double alpha);

/// Continuous and discrete violation sums of a run: each step contributes
/// v(s_{k+1}) * (tau_{k+1} - tau_k).
std::pair<Cost, Cost> run_violation_costs(const Rpa& rpa, const std::vector<StateId>& path);

}  // namespace relaxmitl::product
