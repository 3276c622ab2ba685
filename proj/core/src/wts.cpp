#include "relaxmitl/wts.hpp"

#include <algorithm>
#include <random>

namespace relaxmitl::wts {

Wts Wts::from_grid(int width, int height, std::vector<std::string> alphabet, std::vector<AtomSet> labels, Cell q0,
                   double unit_weight, bool self_loops) {
  if (width < 1 || height < 1) throw std::invalid_argument("grid dimensions must be positive");
  if (!(unit_weight > 0.0)) throw std::invalid_argument("transition weight must be positive");
  Wts w;
  w.width_ = width;
  w.height_ = height;
  if (!w.in_bounds(q0)) throw std::invalid_argument("initial cell out of bounds");
  const std::size_t n = static_cast<std::size_t>(width) * static_cast<std::size_t>(height);
  if (labels.empty()) labels.assign(n, 0);
  if (labels.size() != n) throw std::invalid_argument("label vector does not match grid size");
  w.q0_ = w.id(q0);
  w.alphabet_ = std::move(alphabet);
  w.labels_ = std::move(labels);
  w.succ_.resize(n);

  // fixed move order: left, right, down, up
  static constexpr int dx[] = {-1, 1, 0, 0};
  static constexpr int dy[] = {0, 0, -1, 1};
  for (StateId q = 0; q < n; ++q) {
    const Cell c = w.cell(q);
    if (self_loops) w.succ_[q].push_back({q, unit_weight});
    for (int d = 0; d < 4; ++d) {
      const Cell nb{c.x + dx[d], c.y + dy[d]};
      if (w.in_bounds(nb)) w.succ_[q].push_back({w.id(nb), unit_weight});
    }
    std::sort(w.succ_[q].begin(), w.succ_[q].end(), [](auto& a, auto& b) { return a.to < b.to; });
  }
  return w;
}

StateId Wts::id(Cell c) const {
  if (!in_bounds(c)) throw std::out_of_range("cell out of bounds");
  return static_cast<StateId>(c.y) * width_ + c.x;
}

double Wts::weight(StateId q, StateId q2) const {
  for (const auto& t : succ_.at(q))
    if (t.to == q2) return t.weight;
  throw std::invalid_argument("not a transition");
}

bool Wts::adjacent(StateId q, StateId q2) const {
  const auto& s = succ_.at(q);
  return std::any_of(s.begin(), s.end(), [&](const Transition& t) { return t.to == q2; });
}

std::size_t Wts::transition_count() const {
  std::size_t n = 0;
  for (const auto& s : succ_) n += s.size();
  return n;
}

AtomSet Wts::atom(const std::string& name) const {
  auto it = std::find(alphabet_.begin(), alphabet_.end(), name);
  if (it == alphabet_.end()) throw std::invalid_argument("unknown atom '" + name + "'");
  return AtomSet{1} << (it - alphabet_.begin());
}

TimedRun timed_run(const Wts& w, const std::vector<StateId>& trajectory) {
  TimedRun run;
  double t = 0.0;
  for (std::size_t i = 0; i < trajectory.size(); ++i) {
    if (i > 0) t += w.weight(trajectory[i - 1], trajectory[i]);
    run.points.emplace_back(trajectory[i], t);
  }
  return run;
}

double accumulate_reward(const std::vector<StateId>& path, const std::vector<double>& rewards) {
  double r = 0.0;
  for (std::size_t i = 1; i < path.size(); ++i) r += rewards.at(path[i]);
  return r;
}

UniformRewardField::UniformRewardField(std::uint64_t seed, double r_max) : seed_(seed), r_max_(r_max) {
  if (!(r_max >= 0.0)) throw std::invalid_argument("reward bound must be non-negative");
}

std::vector<double> UniformRewardField::snapshot(std::uint64_t k, std::size_t cells) const {
  std::seed_seq seq{static_cast<std::uint32_t>(seed_), static_cast<std::uint32_t>(seed_ >> 32),
                    static_cast<std::uint32_t>(k), static_cast<std::uint32_t>(k >> 32)};
  std::mt19937_64 rng(seq);
  std::uniform_real_distribution<double> dist(0.0, r_max_);
  std::vector<double> out(cells);
  for (auto& r : out) r = r_max_ > 0.0 ? dist(rng) : 0.0;
  return out;
}

}  // namespace relaxmitl::wts
