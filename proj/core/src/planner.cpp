#include "relaxmitl/planner.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <ostream>

#include "json.hpp"

namespace relaxmitl::planner {

std::string to_string(ConstraintCase c) {
  switch (c) {
    case ConstraintCase::Initial: return "initial";
    case ConstraintCase::C1: return "C1";
    case ConstraintCase::C2: return "C2";
    case ConstraintCase::C3: return "C3";
  }
  return "?";
}

void PlannerConfig::validate() const {
  if (horizon < 1) throw std::invalid_argument("horizon must be at least 1");
  if (!(alpha >= 0.0 && alpha <= 1.0)) throw std::invalid_argument("alpha must lie in [0, 1]");
  if (!(beta >= 0.0)) throw std::invalid_argument("beta must be non-negative");
  if (sense_range < horizon) throw std::invalid_argument("sensing range must be at least the horizon");
}

AgentState initial_agent_state(const product::Rpa& rpa) {
  return {rpa.initial(), rpa.tba().initial_valuation(), 0.0};
}

std::optional<AgentState> successor(const product::Rpa& rpa, const AgentState& a, wts::StateId q2) {
  const wts::StateId q = rpa.cell_of(a.p);
  if (!rpa.wts().adjacent(q, q2) || rpa.blocked_cell(q2)) return std::nullopt;
  const double w = rpa.wts().weight(q, q2);
  AgentState next{0, a.clocks, a.time + w};
  tba::RelaxedTba::elapse(next.clocks, w);
  const auto& t = rpa.tba();
  const auto ei = t.match(rpa.tba_of(a.p), rpa.wts().label(q2), next.clocks);
  if (!ei) return std::nullopt;
  const tba::Edge& e = t.edges[*ei];
  tba::RelaxedTba::apply_actions(e, next.clocks);
  next.p = rpa.id(q2, e.to);
  return next;
}

namespace {

void extend(const product::Rpa& rpa, const AgentState& a, int depth, Path& cur,
            const std::function<void(const Path&)>& visit, std::size_t& count) {
  if (depth == 0) {
    ++count;
    visit(cur);
    return;
  }
  for (const auto& tr : rpa.wts().successors(rpa.cell_of(a.p))) {
    auto next = successor(rpa, a, tr.to);
    if (!next) continue;
    cur.states.push_back(next->p);
    cur.agents.push_back(*next);
    extend(rpa, *next, depth - 1, cur, visit, count);
    cur.states.pop_back();
    cur.agents.pop_back();
  }
}

std::vector<wts::StateId> cells(const product::Rpa& rpa, const std::vector<StateId>& states) {
  std::vector<wts::StateId> out;
  out.reserve(states.size());
  for (StateId p : states) out.push_back(rpa.cell_of(p));
  return out;
}

// Cheap summary of a leaf; a PlanStep is only materialized for winners.
struct Score {
  double utility;
  double reward;
  Cost weight;
  Cost terminal;
};

Score score(const product::Rpa& rpa, const energy::EnergyTable& table, const std::vector<double>& rewards,
            const PlannerConfig& cfg, const Path& path) {
  Score sc{0.0, 0.0, Cost::zero(), table.J.at(path.states.back())};
  for (std::size_t i = 1; i < path.states.size(); ++i) {
    sc.reward += rewards.at(rpa.cell_of(path.states[i]));
    sc.weight += rpa.violation_weight(path.states[i - 1], path.states[i], cfg.alpha) *
                 rpa.weight(path.states[i - 1], path.states[i]);
  }
  sc.utility = sc.weight.is_infinite() ? -std::numeric_limits<double>::infinity()
                                       : sc.reward - cfg.beta * sc.weight.value();
  return sc;
}

// Same order as better(), without building the candidate.
bool beats(const Score& s, const Path& p, const PlanStep& best) {
  if (s.utility != best.utility) return s.utility > best.utility;
  if (s.terminal != best.terminal_energy) return s.terminal < best.terminal_energy;
  return std::lexicographical_compare(p.states.begin() + 1, p.states.end(), best.predicted.begin(),
                                      best.predicted.end());
}

PlanStep materialize(const Score& s, const AgentState& origin, const Path& path) {
  PlanStep out;
  out.origin = origin;
  out.chosen = path.agents.front();
  out.predicted.assign(path.states.begin() + 1, path.states.end());
  out.reward = s.reward;
  out.weight = s.weight;
  out.utility = s.utility;
  out.terminal_energy = s.terminal;
  return out;
}

}  // namespace

std::size_t for_each_path(const product::Rpa& rpa, const AgentState& from, int N,
                          const std::function<void(const Path&)>& visit) {
  if (N < 1) throw std::invalid_argument("horizon must be at least 1");
  Path cur;
  cur.states.reserve(N + 1);
  cur.agents.reserve(N);
  cur.states.push_back(from.p);
  std::size_t count = 0;
  extend(rpa, from, N, cur, visit, count);
  return count;
}

std::vector<Path> enumerate_paths(const product::Rpa& rpa, const AgentState& from, int N) {
  std::vector<Path> out;
  for_each_path(rpa, from, N, [&](const Path& p) { out.push_back(p); });
  return out;
}

double utility(const product::Rpa& rpa, const std::vector<StateId>& path, const std::vector<double>& rewards,
               double alpha, double beta) {
  const Cost w = product::path_weight(rpa, path, alpha);
  if (w.is_infinite()) return -std::numeric_limits<double>::infinity();
  return wts::accumulate_reward(cells(rpa, path), rewards) - beta * w.value();
}

bool better(const PlanStep& a, const PlanStep& b) {
  if (a.utility != b.utility) return a.utility > b.utility;
  if (a.terminal_energy != b.terminal_energy) return a.terminal_energy < b.terminal_energy;
  return a.predicted < b.predicted;
}

PlanStep initial_plan(const product::Rpa& rpa, const energy::EnergyTable& table, const std::vector<double>& rewards,
                      const PlannerConfig& cfg, const AgentState& start) {
  cfg.validate();
  if (table.J.at(start.p).is_infinite())
    throw NoAcceptingRun("there does not exist an accepting run from the initial state");
  PlanStep best;
  bool have = false;
  const std::size_t n = for_each_path(rpa, start, cfg.horizon, [&](const Path& p) {
    const Score s = score(rpa, table, rewards, cfg, p);
    if (!have || beats(s, p, best)) {
      best = materialize(s, start, p);
      have = true;
    }
  });
  if (n == 0) throw Infeasible("no admissible move from the initial state");
  best.constraint = ConstraintCase::Initial;
  best.candidates = best.feasible = n;
  return best;
}

ConstraintCase active_case(const energy::EnergyTable& table, StateId current, const std::vector<StateId>& prev_predicted,
                           std::size_t* i0) {
  if (i0) *i0 = 0;
  if (table.J.at(current).is_zero()) return ConstraintCase::C3;
  for (std::size_t i = 0; i < prev_predicted.size(); ++i) {
    if (table.J.at(prev_predicted[i]).is_zero()) {
      if (i0) *i0 = i + 1;
      return ConstraintCase::C2;
    }
  }
  return ConstraintCase::C1;
}

bool admissible(const energy::EnergyTable& table, ConstraintCase c, std::size_t i0,
                std::span<const StateId> predicted, const std::vector<StateId>& prev_predicted) {
  const Cost terminal = table.J.at(predicted.back());
  switch (c) {
    case ConstraintCase::Initial:
      return true;
    case ConstraintCase::C3:
      return terminal.is_finite();
    case ConstraintCase::C2: {
      // the previous window advanced by one step, so its zero moved to i0-1
      const std::size_t by = std::max<std::size_t>(i0 > 0 ? i0 - 1 : 1, 1);
      for (std::size_t j = 0; j < std::min(by, predicted.size()); ++j)
        if (table.J.at(predicted[j]).is_zero()) return true;
      return false;
    }
    case ConstraintCase::C1: {
      if (prev_predicted.empty()) return terminal.is_finite();
      return terminal < table.J.at(prev_predicted.back());
    }
  }
  return false;
}

PlanStep rhc_step(const AgentState& current, const PlanStep& prev, const product::Rpa& rpa,
                  const energy::EnergyTable& table, const std::vector<double>& rewards, const PlannerConfig& cfg) {
  cfg.validate();
  std::size_t i0 = 0;
  const ConstraintCase c = active_case(table, current.p, prev.predicted, &i0);
  PlanStep best, rescue;
  bool have_best = false, have_rescue = false;
  std::size_t feasible = 0;
  const std::size_t n = for_each_path(rpa, current, cfg.horizon, [&](const Path& p) {
    const Score s = score(rpa, table, rewards, cfg, p);
    if (admissible(table, c, i0, std::span<const StateId>(p.states).subspan(1), prev.predicted)) {
      ++feasible;
      if (!have_best || beats(s, p, best)) {
        best = materialize(s, current, p);
        have_best = true;
      }
    }
    // fallback ranking: lowest terminal energy first
    if (!have_rescue || s.terminal < rescue.terminal_energy ||
        (s.terminal == rescue.terminal_energy && beats(s, p, rescue))) {
      rescue = materialize(s, current, p);
      have_rescue = true;
    }
  });
  if (n == 0) throw Infeasible("agent is enclosed: no admissible move");
  PlanStep out = have_best ? std::move(best) : std::move(rescue);
  out.fallback = !have_best;
  out.constraint = c;
  out.i0 = i0;
  out.k = prev.k + 1;
  out.candidates = n;
  out.feasible = feasible;
  return out;
}

double beta_priority_bound(int N, double r_max, double w_min, double alpha) {
  double inc = std::numeric_limits<double>::infinity();
  if (alpha > 0.0) inc = std::min(inc, alpha);
  if (alpha < 1.0) inc = std::min(inc, 1.0 - alpha);
  return N * r_max / (w_min * inc);
}

// ---------------------------------------------------------------------------

product::Rpa scenario_product(const sim::Scenario& sc, const sim::Environment& env, const tba::BuildOptions& opts) {
  const mitl::Formula f = mitl::parse(sc.formula, env.alphabet());
  return product::Rpa(sim::initial_knowledge(env, sc), tba::build_relaxed_tba(f, opts));
}

PlannerConfig scenario_config(const sim::Scenario& sc) {
  PlannerConfig cfg;
  cfg.horizon = sc.planner.horizon;
  cfg.alpha = sc.planner.alpha;
  cfg.beta = sc.planner.beta;
  cfg.sense_range = sc.sensor.range;
  return cfg;
}

Episode run_loop(product::Rpa& rpa, sim::Environment& env, const PlannerConfig& cfg, int steps,
                 const sim::SensorModel& sensor) {
  cfg.validate();
  if (steps < 0) throw std::invalid_argument("step count must be non-negative");
  if (sensor.range < cfg.horizon) throw std::invalid_argument("sensing range must be at least the horizon");
  if (env.agent() != rpa.wts().initial()) throw std::invalid_argument("environment and product disagree on the start");
  using clock = std::chrono::steady_clock;
  const auto opts = cfg.energy_options();

  Episode ep;
  AgentState a = initial_agent_state(rpa);
  ep.run.push_back(a.p);
  Cost cum_vc, cum_vd;
  double cum_reward = 0.0;

  auto t0 = clock::now();
  energy::EnergyTable table = energy::compute_energy(rpa, energy::largest_self_reachable(rpa), opts);
  auto info = sim::sense(env, rpa.wts(), rpa.cell_of(a.p), sensor);
  table = energy::automaton_update(rpa, a.p, info, table, opts);
  PlanStep prev = initial_plan(rpa, table, sim::sensed_rewards(env, rpa.cell_of(a.p), sensor), cfg, a);
  ep.step_seconds.push_back(std::chrono::duration<double>(clock::now() - t0).count());

  auto execute = [&](const AgentState& next) {
    const double dt = next.time - a.time;
    a = next;
    ep.run.push_back(a.p);
    const wts::StateId q = rpa.cell_of(a.p);
    const double r = env.move_agent(q);
    cum_reward += r;
    const auto v = rpa.tba().violation(rpa.tba_of(a.p));
    cum_vc += v.continuous * dt;
    cum_vd += v.discrete * dt;
    return r;
  };

  ep.initial = prev;
  ep.initial_reward = execute(prev.chosen);
  ep.initial_energy = table.J.at(a.p);
  env.step();

  for (int k = 1; k <= steps; ++k) {
    t0 = clock::now();
    info = sim::sense(env, rpa.wts(), rpa.cell_of(a.p), sensor);
    table = energy::automaton_update(rpa, a.p, info, table, opts);
    PlanStep step = rhc_step(a, prev, rpa, table, sim::sensed_rewards(env, rpa.cell_of(a.p), sensor), cfg);
    step.k = k;
    ep.step_seconds.push_back(std::chrono::duration<double>(clock::now() - t0).count());

    TraceRecord rec;
    rec.reward = execute(step.chosen);
    rec.k = k;
    rec.p = a.p;
    rec.cell = rpa.wts().cell(rpa.cell_of(a.p));
    rec.s = rpa.tba_of(a.p);
    rec.energy = table.J.at(a.p);
    rec.constraint = step.constraint;
    rec.i0 = step.i0;
    rec.fallback = step.fallback;
    rec.utility = step.utility;
    rec.predicted = step.predicted;
    rec.cumulative_reward = cum_reward;
    rec.cumulative_vc = cum_vc;
    rec.cumulative_vd = cum_vd;
    rec.info = info.size();
    rec.obstacle_hit = env.obstacle_at(rpa.cell_of(a.p));
    ep.trace.push_back(std::move(rec));
    ep.steps.push_back(step);
    env.step();
    prev = std::move(step);
  }
  return ep;
}

namespace {

nlohmann::ordered_json cost_json(const Cost& c) {
  if (c.is_infinite()) return "inf";
  return c.value();
}

nlohmann::ordered_json path_json(const product::Rpa& rpa, const std::vector<StateId>& states) {
  auto arr = nlohmann::ordered_json::array();
  for (StateId p : states) {
    const auto c = rpa.wts().cell(rpa.cell_of(p));
    arr.push_back({c.x, c.y, rpa.tba_of(p)});
  }
  return arr;
}

}  // namespace

void write_trace(std::ostream& os, const product::Rpa& rpa, const Episode& ep) {
  using nlohmann::ordered_json;
  ordered_json h;
  h["schema_version"] = 1;
  h["type"] = "header";
  h["width"] = rpa.wts().width();
  h["height"] = rpa.wts().height();
  h["tba_states"] = rpa.tba().state_count();
  h["product_states"] = rpa.size();
  h["steps"] = ep.trace.size();
  const auto start = rpa.wts().cell(rpa.wts().initial());
  h["start"] = {start.x, start.y};
  ordered_json init;
  const auto c0 = rpa.wts().cell(rpa.cell_of(ep.initial.chosen.p));
  init["cell"] = {c0.x, c0.y};
  init["tba_state"] = rpa.tba_of(ep.initial.chosen.p);
  init["J"] = cost_json(ep.initial_energy);
  init["utility"] = ep.initial.utility;
  init["predicted"] = path_json(rpa, ep.initial.predicted);
  init["reward"] = ep.initial_reward;
  h["initial"] = init;
  os << h.dump() << '\n';

  for (const auto& r : ep.trace) {
    ordered_json j;
    j["k"] = r.k;
    j["cell"] = {r.cell.x, r.cell.y};
    j["tba_state"] = r.s;
    j["J"] = cost_json(r.energy);
    j["case"] = to_string(r.constraint);
    if (r.constraint == ConstraintCase::C2) j["i0"] = r.i0;
    j["fallback"] = r.fallback;
    j["utility"] = r.utility;
    j["predicted"] = path_json(rpa, r.predicted);
    j["reward"] = r.reward;
    j["cumulative_reward"] = r.cumulative_reward;
    j["cumulative_vc"] = cost_json(r.cumulative_vc);
    j["cumulative_vd"] = cost_json(r.cumulative_vd);
    j["info"] = r.info;
    os << j.dump() << '\n';
  }
}

void write_series(std::ostream& os, const Episode& ep) {
  os << "k,cell_x,cell_y,J,case,cumulative_reward,cumulative_vc,cumulative_vd\n";
  for (const auto& r : ep.trace)
    os << r.k << ',' << r.cell.x << ',' << r.cell.y << ',' << r.energy << ',' << to_string(r.constraint) << ','
       << r.cumulative_reward << ',' << r.cumulative_vc << ',' << r.cumulative_vd << '\n';
}

}  // namespace relaxmitl::planner
