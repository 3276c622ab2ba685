#include "relaxmitl/product.hpp"

#include <algorithm>
#include <stdexcept>

namespace relaxmitl::product {

Rpa::Rpa(wts::Wts w, tba::RelaxedTba t) : wts_(std::move(w)), tba_(std::move(t)), ns_(tba_.state_count()) {
  if (wts_.alphabet() != tba_.alphabet) throw std::invalid_argument("WTS and TBA alphabets differ");
  if (blocked_cell(wts_.initial())) throw std::invalid_argument("initial cell carries a hard-constrained label");

  const std::size_t n = size();
  succ_.resize(n);
  pred_.resize(n);
  std::vector<tba::StateId> targets;
  for (wts::StateId q = 0; q < wts_.size(); ++q) {
    for (const auto& tr : wts_.successors(q)) {
      const wts::AtomSet soft = wts_.label(tr.to) & ~tba_.hard_atoms;
      for (tba::StateId s = 0; s < ns_; ++s) {
        targets.clear();
        for (std::size_t ei : tba_.out_edges(s)) {
          const tba::Edge& e = tba_.edges[ei];
          if (e.symbols.matches(soft)) targets.push_back(e.to);
        }
        std::sort(targets.begin(), targets.end());
        targets.erase(std::unique(targets.begin(), targets.end()), targets.end());
        for (tba::StateId s2 : targets) succ_[id(q, s)].push_back(id(tr.to, s2));
      }
    }
  }
  for (StateId p = 0; p < n; ++p) {
    std::sort(succ_[p].begin(), succ_[p].end());
    for (StateId p2 : succ_[p]) pred_[p2].push_back(p);
  }
}

bool Rpa::has_transition(StateId from, StateId to) const {
  const auto& s = succ_.at(from);
  return std::binary_search(s.begin(), s.end(), to);
}

void Rpa::set_label(wts::StateId q, wts::AtomSet label) {
  if ((label ^ wts_.label(q)) & ~tba_.hard_atoms)
    throw std::invalid_argument("only hard-constrained atoms may change after construction");
  if (label == wts_.label(q)) return;
  wts_.set_label(q, label);
  ++version_;
}

Cost Rpa::violation_weight(StateId /*from*/, StateId to, double alpha) const {
  if (sink(to) || blocked(to)) return Cost::infinity();
  const tba::ViolationCost v = tba_.violation(tba_of(to));
  return v.continuous * (1.0 - alpha) + v.discrete * alpha;
}

RpaStats Rpa::stats() const {
  RpaStats s;
  s.states = size();
  for (const auto& v : succ_) s.transitions += v.size();
  s.accepting = wts_.size();
  s.wts_states = wts_.size();
  s.tba_states = ns_;
  return s;
}

Cost path_weight(const Rpa& rpa, const std::vector<StateId>& path, double alpha) {
  Cost total;
  for (std::size_t i = 0; i + 1 < path.size(); ++i)
    total += rpa.violation_weight(path[i], path[i + 1], alpha) * rpa.weight(path[i], path[i + 1]);
  return total;
}

std::pair<Cost, Cost> run_violation_costs(const Rpa& rpa, const std::vector<StateId>& path) {
  Cost c, d;
  for (std::size_t i = 0; i + 1 < path.size(); ++i) {
    const double dt = rpa.weight(path[i], path[i + 1]);
    const tba::ViolationCost v = rpa.tba().violation(rpa.tba_of(path[i + 1]));
    c += v.continuous * dt;
    d += v.discrete * dt;
  }
  return {c, d};
}

}  // namespace relaxmitl::product
