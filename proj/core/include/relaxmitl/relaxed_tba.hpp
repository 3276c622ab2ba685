#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "relaxmitl/cost.hpp"
#include "relaxmitl/mitl.hpp"

namespace relaxmitl::tba {

/// Bit i set <=> alphabet[i] holds. Alphabets are limited to 64 atoms.
using AtomSet = std::uint64_t;
using StateId = std::size_t;
using ClockId = std::size_t;

inline constexpr std::size_t kMaxAtoms = 64;

enum class Status : std::uint8_t { Unc, Vio, Sat };

/// One status per soft conjunct (a sub-formula evaluation).
using Evaluation = std::vector<Status>;

std::string to_string(Status s);

/// Admissible statuses of a conjunct, ordered unc < vio < sat.
std::vector<Status> evaluation_set(const mitl::SubFormula& f);

/// Indices of conjuncts whose status differs.
std::vector<std::size_t> distance_set(const Evaluation& a, const Evaluation& b);

enum class Rel : std::uint8_t { Less, LessEq, Eq, GreaterEq, Greater };

struct ClockConstraint {
  ClockId clock;
  Rel rel;
  double constant;

  bool holds(double v) const;
  bool operator==(const ClockConstraint&) const = default;
};

/// A stopped clock carries no value; constraints over it are false.
using ClockValuation = std::vector<std::optional<double>>;

struct Guard {
  std::vector<ClockConstraint> constraints;
  /// Clocks that must be running / stopped.
  std::vector<ClockId> running;
  std::vector<ClockId> stopped;

  bool trivial() const { return constraints.empty() && running.empty() && stopped.empty(); }
  bool satisfied_by(const ClockValuation& v) const;
  /// Guard with every constraint over `clock` removed.
  Guard without_clock(ClockId clock) const;
  bool operator==(const Guard&) const = default;
};

enum class ClockOp : std::uint8_t { Reset, Stop };

struct ClockAction {
  ClockId clock;
  ClockOp op;
  bool operator==(const ClockAction&) const = default;
};

/// Symbol set as atom constraints: symbol a is admitted iff must ⊆ a and a ∩ must_not = ∅.
struct SymbolConstraint {
  AtomSet must = 0;
  AtomSet must_not = 0;

  bool matches(AtomSet a) const { return (a & must) == must && (a & must_not) == 0; }
  bool consistent() const { return (must & must_not) == 0; }
  bool operator==(const SymbolConstraint&) const = default;
};

/// Which construction step produced an edge.
enum class EdgeStep : std::uint8_t {
  Progress = 1,            // edges an unrelaxed automaton would have (plus hard-violation edges)
  DiscreteRecovery = 2,    // non-bounded conjuncts leave vio
  ContinuousRecovery = 3,  // bounded conjuncts reach sat after their deadline
  SelfLoop = 4,
};

struct Edge {
  StateId from;
  StateId to;
  Guard guard;
  SymbolConstraint symbols;
  std::vector<ClockAction> actions;
  EdgeStep step;
  /// Source reached the accepting evaluation; recurrent obligations restart.
  bool rearm = false;
};

struct Clock {
  ClockId id;
  std::size_t owner;  // soft conjunct index
  mitl::TimeInterval interval;
};

struct ViolationCost {
  Cost continuous;
  Cost discrete;
  bool operator==(const ViolationCost&) const = default;
};

class ConstructionError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct BuildOptions {
  std::size_t max_soft_conjuncts = 20;
  bool prune = true;
  /// Time step used by the reachability exploration behind pruning.
  double time_step = 1.0;
};

/// Evaluation states plus sink. Evaluations are enumerated in reflected
/// mixed-radix Gray order with conjunct 0 varying fastest, so neighbouring
/// ids differ in exactly one conjunct. The sink is always the last state.
struct StateSet {
  std::vector<Evaluation> evaluations;
  StateId initial = 0;
  StateId accepting = 0;
  StateId sink = 0;
};

StateSet build_states(const std::vector<mitl::SubFormula>& soft, std::size_t max_conjuncts = 20);

class RelaxedTba {
 public:
  std::vector<std::string> alphabet;
  AtomSet hard_atoms = 0;
  /// Soft conjuncts after until-splitting; indices match Evaluation positions.
  std::vector<mitl::SubFormula> conjuncts;
  std::vector<mitl::TemporalClass> classes;
  std::vector<Clock> clocks;
  /// clock owned by each conjunct, if any
  std::vector<std::optional<ClockId>> conjunct_clock;
  /// AlwaysUntilFlag conjunct -> index of the bounded eventuality it waits for
  std::vector<std::optional<std::size_t>> partner;

  /// evaluations[s] for s < sink; the sink has no evaluation.
  std::vector<Evaluation> evaluations;
  StateId initial = 0;
  StateId accepting = 0;
  StateId sink = 0;
  std::vector<Edge> edges;
  /// State count before reachability pruning.
  std::size_t raw_state_count = 0;

  std::size_t state_count() const { return evaluations.size() + 1; }
  bool is_sink(StateId s) const { return s == sink; }

  ViolationCost violation(StateId s) const;
  SymbolConstraint label_map(StateId s) const;
  Guard clock_map(StateId s) const;

  /// Outgoing edge indices per state (valid after finalize()).
  const std::vector<std::size_t>& out_edges(StateId s) const { return out_.at(s); }

  /// Valuation at time 0: bounded-eventuality clocks run, response clocks wait for their trigger.
  ClockValuation initial_valuation() const;

  /// Unique edge enabled at `s` for `symbol` under `v` (v already advanced to arrival time).
  std::optional<std::size_t> match(StateId s, AtomSet symbol, const ClockValuation& v) const;

  static void apply_actions(const Edge& e, ClockValuation& v);
  static void elapse(ClockValuation& v, double dt);

  AtomSet atom(const std::string& name) const;
  std::string describe(StateId s) const;
  std::string describe(const SymbolConstraint& c) const;
  std::string describe(const Guard& g) const;

  void finalize();

 private:
  std::vector<std::vector<std::size_t>> out_;
};

/// Continuous cost counts bounded conjuncts in vio; discrete cost is 1 iff a
/// non-bounded conjunct is in vio; the sink costs infinity on both.
ViolationCost violation_costs(const RelaxedTba& tba, StateId s);

/// Edge construction over the state set already stored in `tba`.
std::vector<Edge> build_edges(const RelaxedTba& tba);

/// Keep states reachable from the initial state (plus the sink) and the
/// edges exercised while reaching them. Throws ConstructionError when the
/// accepting state is unreachable.
RelaxedTba prune_unreachable(const RelaxedTba& tba, double time_step = 1.0);

RelaxedTba build_relaxed_tba(const mitl::Formula& f, const BuildOptions& opts = {});

}  // namespace relaxmitl::tba
