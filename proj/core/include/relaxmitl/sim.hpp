#pragma once

#include <cstdint>
#include <iosfwd>
#include <random>
#include <string>
#include <utility>
#include <vector>

#include "relaxmitl/wts.hpp"

namespace relaxmitl::sim {

using wts::AtomSet;
using wts::Cell;
using wts::StateId;

enum class Norm : std::uint8_t { Manhattan, Chebyshev };

struct SensorModel {
  int range = 4;
  Norm norm = Norm::Manhattan;

  int distance(Cell a, Cell b) const;
  bool covers(Cell agent, Cell c) const { return distance(agent, c) <= range; }
};

struct PlannerParams {
  int horizon = 4;
  double alpha = 0.8;
  double beta = 10.0;
};

/// Everything needed to reproduce an episode.
struct Scenario {
  int width = 10;
  int height = 10;
  Cell start{0, 0};
  std::string formula;
  /// Alphabet order fixes the atom bit positions; inferred from the formula when empty.
  std::vector<std::string> alphabet;
  /// Static points of interest (soft atoms).
  std::vector<std::pair<Cell, std::string>> labels;
  std::string obstacle_atom = "obstacle";
  /// Initial obstacle cells; `obstacle_count` extra ones are placed at random.
  std::vector<Cell> obstacles;
  int obstacle_count = 0;
  double p_move = 0.5;
  /// Obstacles are part of the agent's prior map (still sensed every step).
  bool obstacles_known = false;
  double r_max = 1.0;
  std::uint64_t seed = 1;
  int steps = 50;
  PlannerParams planner;
  SensorModel sensor;
};

/// Ground truth: static labels, moving obstacles and the reward field.
class Environment {
 public:
  explicit Environment(const Scenario& sc);

  int width() const { return width_; }
  int height() const { return height_; }
  std::size_t size() const { return static_labels_.size(); }
  std::uint64_t k() const { return k_; }
  const std::vector<std::string>& alphabet() const { return alphabet_; }
  AtomSet obstacle_bit() const { return obstacle_bit_; }

  Cell cell(StateId q) const { return {static_cast<int>(q % width_), static_cast<int>(q / width_)}; }
  StateId id(Cell c) const { return static_cast<StateId>(c.y) * width_ + c.x; }
  bool in_bounds(Cell c) const { return c.x >= 0 && c.y >= 0 && c.x < width_ && c.y < height_; }

  AtomSet true_label(StateId q) const;
  AtomSet static_label(StateId q) const { return static_labels_.at(q); }
  const std::vector<StateId>& obstacles() const { return obstacles_; }
  bool obstacle_at(StateId q) const;

  StateId agent() const { return agent_; }
  /// Moves the agent and collects the reward of the new cell.
  double move_agent(StateId q);

  /// Rewards of the current step (collected cells read 0).
  const std::vector<double>& rewards() const { return rewards_; }

  /// Obstacles take one lazy random-walk step; rewards resampled for k+1.
  void step();

 private:
  int width_;
  int height_;
  std::vector<std::string> alphabet_;
  AtomSet obstacle_bit_ = 0;
  std::vector<AtomSet> static_labels_;
  std::vector<StateId> obstacles_;
  StateId agent_;
  double p_move_;
  std::uint64_t k_ = 0;
  std::mt19937_64 rng_;
  wts::UniformRewardField field_;
  std::vector<double> rewards_;
};

/// Label deltas between ground truth and `knowledge` for every cell in range.
std::vector<wts::LabelDelta> sense(const Environment& env, const wts::Wts& knowledge, StateId cell,
                                   const SensorModel& sensor);

/// Rewards as seen from `cell`: zero outside sensing range.
std::vector<double> sensed_rewards(const Environment& env, StateId cell, const SensorModel& sensor);

void step_environment(Environment& env);

/// Agent's prior map: static labels, plus obstacles when they are known.
wts::Wts initial_knowledge(const Environment& env, const Scenario& sc);

/// Resolved alphabet of a scenario (explicit, or collected from the formula).
std::vector<std::string> scenario_alphabet(const Scenario& sc);

/// 10x10 Pac-Man world: agent bottom-left, cherries at the top-right and
/// bottom-right corners, pear upper-left, a grass wall in between.
Scenario case_study_scenario();

/// The same layout stretched to an n x n workspace, obstacle count scaled by
/// area. `centered` starts the agent mid-grid, which keeps the local branching
/// of the first steps comparable across sizes.
Scenario scaled_case_study(int n, int obstacles_per_100_cells = 0, bool centered = false);

Scenario load_scenario(std::istream& is);
Scenario load_scenario_file(const std::string& path);
void save_scenario(std::ostream& os, const Scenario& sc);

}  // namespace relaxmitl::sim
