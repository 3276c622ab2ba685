#include "relaxmitl/energy.hpp"

#include <algorithm>
#include <deque>
#include <functional>
#include <limits>
#include <ostream>
#include <queue>

namespace relaxmitl::energy {

bool EnergyTable::in_fstar(StateId p) const { return std::binary_search(fstar.begin(), fstar.end(), p); }

namespace {

// Iterative Tarjan; returns component id per state and whether each component has a cycle.
struct Scc {
  std::vector<std::size_t> comp;
  std::vector<bool> cyclic;
};

Scc tarjan(const product::Rpa& rpa) {
  const std::size_t n = rpa.size();
  constexpr std::size_t none = std::numeric_limits<std::size_t>::max();
  std::vector<std::size_t> index(n, none), low(n, 0);
  std::vector<bool> on_stack(n, false);
  std::vector<StateId> stack;
  Scc out;
  out.comp.assign(n, none);
  std::size_t counter = 0;

  struct Frame {
    StateId v;
    std::size_t next;
  };
  std::vector<Frame> call;
  for (StateId root = 0; root < n; ++root) {
    if (index[root] != none) continue;
    call.push_back({root, 0});
    index[root] = low[root] = counter++;
    stack.push_back(root);
    on_stack[root] = true;
    while (!call.empty()) {
      Frame& f = call.back();
      const auto& succ = rpa.successors(f.v);
      if (f.next < succ.size()) {
        StateId w = succ[f.next++];
        if (index[w] == none) {
          index[w] = low[w] = counter++;
          stack.push_back(w);
          on_stack[w] = true;
          call.push_back({w, 0});
        } else if (on_stack[w]) {
          low[f.v] = std::min(low[f.v], index[w]);
        }
        continue;
      }
      const StateId v = f.v;
      call.pop_back();
      if (!call.empty()) low[call.back().v] = std::min(low[call.back().v], low[v]);
      if (low[v] != index[v]) continue;
      const std::size_t c = out.cyclic.size();
      std::size_t members = 0;
      StateId w;
      do {
        w = stack.back();
        stack.pop_back();
        on_stack[w] = false;
        out.comp[w] = c;
        ++members;
      } while (w != v);
      out.cyclic.push_back(members > 1 || rpa.has_transition(v, v));
    }
  }
  return out;
}

}  // namespace

std::vector<StateId> largest_self_reachable(const product::Rpa& rpa) {
  const Scc scc = tarjan(rpa);
  const std::size_t n = rpa.size();
  std::vector<bool> reaches(n, false);
  std::deque<StateId> queue;
  for (StateId p = 0; p < n; ++p) {
    if (!rpa.accepting(p) || !scc.cyclic[scc.comp[p]]) continue;
    for (StateId pr : rpa.predecessors(p))
      if (!reaches[pr]) {
        reaches[pr] = true;
        queue.push_back(pr);
      }
  }
  while (!queue.empty()) {
    StateId p = queue.front();
    queue.pop_front();
    for (StateId pr : rpa.predecessors(p))
      if (!reaches[pr]) {
        reaches[pr] = true;
        queue.push_back(pr);
      }
  }
  std::vector<StateId> out;
  for (StateId p = 0; p < n; ++p)
    if (rpa.accepting(p) && reaches[p]) out.push_back(p);
  return out;
}

Cost edge_cost(const product::Rpa& rpa, StateId from, StateId to, const EnergyOptions& opts) {
  if (rpa.sink(to) || rpa.blocked(to)) return Cost::infinity();
  const tba::ViolationCost v = rpa.tba().violation(rpa.tba_of(to));
  const double w = rpa.weight(from, to);
  switch (opts.mode) {
    case EdgeCostMode::DiscreteWeighted:
      return (Cost{1.0} + v.discrete * opts.alpha) * w;
    case EdgeCostMode::ViolationWeighted:
      return (Cost{1.0} + rpa.violation_weight(from, to, opts.alpha)) * w;
    case EdgeCostMode::PathWeight:
      return rpa.violation_weight(from, to, opts.alpha) * w;
  }
  return Cost::infinity();
}

EnergyTable compute_energy(const product::Rpa& rpa, std::vector<StateId> fstar, const EnergyOptions& opts) {
  EnergyTable t;
  std::sort(fstar.begin(), fstar.end());
  t.fstar = std::move(fstar);
  t.J.assign(rpa.size(), Cost::infinity());

  using Item = std::pair<double, StateId>;
  std::priority_queue<Item, std::vector<Item>, std::greater<>> heap;
  for (StateId p : t.fstar) {
    t.J[p] = Cost::zero();
    heap.emplace(0.0, p);
  }
  std::vector<bool> done(rpa.size(), false);
  while (!heap.empty()) {
    auto [d, u] = heap.top();
    heap.pop();
    if (done[u]) continue;
    done[u] = true;
    for (StateId p : rpa.predecessors(u)) {
      if (done[p] || t.in_fstar(p)) continue;
      const Cost c = edge_cost(rpa, p, u, opts);
      if (c.is_infinite()) continue;
      const Cost cand = Cost{d} + c;
      if (cand < t.J[p]) {
        t.J[p] = cand;
        heap.emplace(cand.value(), p);
      }
    }
  }
  return t;
}

EnergyTable automaton_update(product::Rpa& rpa, StateId /*current*/, const std::vector<wts::LabelDelta>& info,
                             const EnergyTable& table, const EnergyOptions& opts) {
  if (info.empty()) return table;
  for (const auto& d : info) rpa.set_label(d.cell, d.label);
  EnergyTable next = compute_energy(rpa, table.fstar, opts);
  next.version = table.version + 1;
  return next;
}

void write_energy_csv(std::ostream& os, const product::Rpa& rpa, const EnergyTable& table) {
  os << "id,q,x,y,s,J\n";
  for (StateId p = 0; p < rpa.size(); ++p) {
    const auto q = rpa.cell_of(p);
    const auto c = rpa.wts().cell(q);
    os << p << ',' << q << ',' << c.x << ',' << c.y << ',' << rpa.tba_of(p) << ',' << table.J[p] << '\n';
  }
}

}  // namespace relaxmitl::energy
