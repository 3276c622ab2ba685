#pragma once

#include <cstddef>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace relaxmitl::wts {

using AtomSet = std::uint64_t;
using StateId = std::size_t;

struct Cell {
  int x = 0;
  int y = 0;
  bool operator==(const Cell&) const = default;
};

struct Transition {
  StateId to;
  double weight;
};

/// Observed label of one cell that differs from current knowledge.
struct LabelDelta {
  StateId cell;
  AtomSet label;
  bool operator==(const LabelDelta&) const = default;
};

/// Grid-abstracted weighted transition system. Cell (x, y) has id y*width + x,
/// y grows upwards. Only the labeling is mutable after construction.
class Wts {
 public:
  static Wts from_grid(int width, int height, std::vector<std::string> alphabet, std::vector<AtomSet> labels,
                       Cell q0, double unit_weight = 1.0, bool self_loops = false);

  int width() const { return width_; }
  int height() const { return height_; }
  std::size_t size() const { return labels_.size(); }
  StateId initial() const { return q0_; }
  const std::vector<std::string>& alphabet() const { return alphabet_; }

  bool in_bounds(Cell c) const { return c.x >= 0 && c.y >= 0 && c.x < width_ && c.y < height_; }
  StateId id(Cell c) const;
  Cell cell(StateId q) const { return {static_cast<int>(q % width_), static_cast<int>(q / width_)}; }

  const std::vector<Transition>& successors(StateId q) const { return succ_.at(q); }
  /// Weight of (q, q2); throws if not a transition.
  double weight(StateId q, StateId q2) const;
  bool adjacent(StateId q, StateId q2) const;
  std::size_t transition_count() const;

  AtomSet label(StateId q) const { return labels_.at(q); }
  void set_label(StateId q, AtomSet l) { labels_.at(q) = l; }
  const std::vector<AtomSet>& labels() const { return labels_; }

  AtomSet atom(const std::string& name) const;

 private:
  int width_ = 0;
  int height_ = 0;
  StateId q0_ = 0;
  std::vector<std::string> alphabet_;
  std::vector<AtomSet> labels_;
  std::vector<std::vector<Transition>> succ_;
};

struct TimedRun {
  std::vector<std::pair<StateId, double>> points;
};

/// Timestamps a trajectory: tau_0 = 0, tau_{i+1} = tau_i + w(q_i, q_{i+1}).
TimedRun timed_run(const Wts& w, const std::vector<StateId>& trajectory);

/// Sum of rewards over path[1..]; path[0] is the current cell and earns nothing.
double accumulate_reward(const std::vector<StateId>& path, const std::vector<double>& rewards);

/// Uniform [0, r_max] rewards, a pure function of (seed, k, q).
class UniformRewardField {
 public:
  UniformRewardField(std::uint64_t seed, double r_max);

  std::vector<double> snapshot(std::uint64_t k, std::size_t cells) const;
  double at(std::uint64_t k, StateId q, std::size_t cells) const { return snapshot(k, cells).at(q); }
  double r_max() const { return r_max_; }

 private:
  std::uint64_t seed_;
  double r_max_;
};

}  // namespace relaxmitl::wts
