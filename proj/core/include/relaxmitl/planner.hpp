#pragma once

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <optional>
#include <stdexcept>
#include <string>
#include <span>
#include <vector>

#include "relaxmitl/energy.hpp"
#include "relaxmitl/product.hpp"
#include "relaxmitl/sim.hpp"

namespace relaxmitl::planner {

using product::StateId;

enum class ConstraintCase : std::uint8_t { Initial, C1, C2, C3 };

std::string to_string(ConstraintCase c);

struct PlannerConfig {
  int horizon = 4;
  double alpha = 0.8;
  double beta = 10.0;
  int sense_range = 4;
  energy::EdgeCostMode cost_mode = energy::EdgeCostMode::DiscreteWeighted;

  /// Throws std::invalid_argument on out-of-range parameters.
  void validate() const;
  energy::EnergyOptions energy_options() const { return {alpha, cost_mode}; }
};

class NoAcceptingRun : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class Infeasible : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Product state of the agent together with the TBA clock valuation.
struct AgentState {
  StateId p = 0;
  tba::ClockValuation clocks;
  double time = 0.0;
};

AgentState initial_agent_state(const product::Rpa& rpa);

/// Move to cell q2: advance clocks by the move weight, take the TBA edge
/// enabled by the labels of q2, apply its clock actions. nullopt when the
/// cell is blocked or not adjacent.
std::optional<AgentState> successor(const product::Rpa& rpa, const AgentState& a, wts::StateId q2);

struct Path {
  /// states[0] is the origin; states[1..N] the predicted states.
  std::vector<StateId> states;
  /// agent state after each predicted step (size N)
  std::vector<AgentState> agents;
};

/// Every horizon-N continuation from `from`; blocked cells are pruned.
std::vector<Path> enumerate_paths(const product::Rpa& rpa, const AgentState& from, int N);

/// Same enumeration, handing each path to `visit` instead of storing it.
/// Returns the number of paths visited.
std::size_t for_each_path(const product::Rpa& rpa, const AgentState& from, int N,
                          const std::function<void(const Path&)>& visit);

/// Accumulated reward minus beta times the violation path weight.
double utility(const product::Rpa& rpa, const std::vector<StateId>& path, const std::vector<double>& rewards,
               double alpha, double beta);

struct PlanStep {
  int k = 0;
  AgentState origin;
  AgentState chosen;
  /// p_{1|k} .. p_{N|k}
  std::vector<StateId> predicted;
  double utility = 0.0;
  double reward = 0.0;
  Cost weight;
  Cost terminal_energy;
  ConstraintCase constraint = ConstraintCase::Initial;
  /// 1-based index of the first zero-energy state of the previous plan (C2 only)
  std::size_t i0 = 0;
  bool fallback = false;
  std::size_t candidates = 0;
  std::size_t feasible = 0;
};

/// Strict preference: higher utility, then lower terminal energy, then the
/// lexicographically smaller state sequence.
bool better(const PlanStep& a, const PlanStep& b);

PlanStep initial_plan(const product::Rpa& rpa, const energy::EnergyTable& table, const std::vector<double>& rewards,
                      const PlannerConfig& cfg, const AgentState& start);

/// Which case governs the next step, from J at the current state and the
/// energies along the previous prediction. Sets *i0 for C2.
ConstraintCase active_case(const energy::EnergyTable& table, StateId current, const std::vector<StateId>& prev_predicted,
                           std::size_t* i0 = nullptr);

/// Does `predicted` satisfy constraint `c` against the previous prediction?
bool admissible(const energy::EnergyTable& table, ConstraintCase c, std::size_t i0,
                std::span<const StateId> predicted, const std::vector<StateId>& prev_predicted);

PlanStep rhc_step(const AgentState& current, const PlanStep& prev, const product::Rpa& rpa,
                  const energy::EnergyTable& table, const std::vector<double>& rewards, const PlannerConfig& cfg);

/// Smallest beta above which a violation-free feasible path beats any
/// violating one: N * r_max / (w_min * min positive of {1-alpha, alpha}).
double beta_priority_bound(int N, double r_max, double w_min, double alpha);

struct TraceRecord {
  int k = 0;
  wts::Cell cell;
  StateId p = 0;
  tba::StateId s = 0;
  Cost energy;
  ConstraintCase constraint = ConstraintCase::C3;
  std::size_t i0 = 0;
  bool fallback = false;
  double utility = 0.0;
  std::vector<StateId> predicted;
  double reward = 0.0;
  double cumulative_reward = 0.0;
  Cost cumulative_vc;
  Cost cumulative_vd;
  std::size_t info = 0;
  bool obstacle_hit = false;
};

struct Episode {
  PlanStep initial;
  /// energy of the state reached by the initial plan's first move
  Cost initial_energy;
  double initial_reward = 0.0;
  std::vector<PlanStep> steps;
  std::vector<TraceRecord> trace;
  /// executed product run p0, p*_0, p*_1, ...
  std::vector<StateId> run;
  /// wall-clock seconds spent sensing, updating and planning per step
  std::vector<double> step_seconds;
};

/// Sense, update, observe rewards, plan, move, let the world evolve; `steps`
/// receding-horizon steps after the initial plan.
/// Parse the scenario formula and compose it with the agent's prior map.
product::Rpa scenario_product(const sim::Scenario& sc, const sim::Environment& env, const tba::BuildOptions& opts = {});
PlannerConfig scenario_config(const sim::Scenario& sc);

Episode run_loop(product::Rpa& rpa, sim::Environment& env, const PlannerConfig& cfg, int steps,
                 const sim::SensorModel& sensor);

void write_trace(std::ostream& os, const product::Rpa& rpa, const Episode& ep);
/// k,cell_x,cell_y,J,case,cumulative_reward,cumulative_vc,cumulative_vd
void write_series(std::ostream& os, const Episode& ep);

}  // namespace relaxmitl::planner
