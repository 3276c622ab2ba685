#include "relaxmitl/relaxed_tba.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <set>
#include <sstream>

namespace relaxmitl::tba {

using mitl::Pattern;
using mitl::TemporalClass;

std::string to_string(Status s) {
  switch (s) {
    case Status::Unc: return "unc";
    case Status::Vio: return "vio";
    case Status::Sat: return "sat";
  }
  return "?";
}

std::vector<Status> evaluation_set(const mitl::SubFormula& f) {
  switch (mitl::classify(f)) {
    case TemporalClass::TemporallyBounded: return {Status::Unc, Status::Vio, Status::Sat};
    case TemporalClass::NonBoundedTypeI: return {Status::Unc, Status::Sat};
    case TemporalClass::NonBoundedTypeII: return {Status::Unc, Status::Vio};
  }
  return {};
}

std::vector<std::size_t> distance_set(const Evaluation& a, const Evaluation& b) {
  if (a.size() != b.size()) throw std::invalid_argument("distance_set: evaluations over different conjuncts");
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < a.size(); ++i)
    if (a[i] != b[i]) out.push_back(i);
  return out;
}

bool ClockConstraint::holds(double v) const {
  switch (rel) {
    case Rel::Less: return v < constant;
    case Rel::LessEq: return v <= constant;
    case Rel::Eq: return v == constant;
    case Rel::GreaterEq: return v >= constant;
    case Rel::Greater: return v > constant;
  }
  return false;
}

bool Guard::satisfied_by(const ClockValuation& v) const {
  for (ClockId c : running)
    if (!v.at(c)) return false;
  for (ClockId c : stopped)
    if (v.at(c)) return false;
  for (const auto& cc : constraints) {
    const auto& x = v.at(cc.clock);
    if (!x || !cc.holds(*x)) return false;
  }
  return true;
}

Guard Guard::without_clock(ClockId clock) const {
  Guard g;
  for (const auto& cc : constraints)
    if (cc.clock != clock) g.constraints.push_back(cc);
  for (ClockId c : running)
    if (c != clock) g.running.push_back(c);
  for (ClockId c : stopped)
    if (c != clock) g.stopped.push_back(c);
  return g;
}

// ---------------------------------------------------------------------------
// States

StateSet build_states(const std::vector<mitl::SubFormula>& soft, std::size_t max_conjuncts) {
  if (soft.size() > max_conjuncts)
    throw ConstructionError("too many soft conjuncts (" + std::to_string(soft.size()) + " > " +
                            std::to_string(max_conjuncts) + ")");
  for (std::size_t i = 0; i < soft.size(); ++i)
    for (std::size_t j = i + 1; j < soft.size(); ++j)
      if (soft[i] == soft[j]) throw ConstructionError("duplicate soft conjunct '" + mitl::render(soft[i]) + "'");

  const std::size_t m = soft.size();
  std::vector<std::vector<Status>> sets;
  sets.reserve(m);
  for (const auto& f : soft) sets.push_back(evaluation_set(f));

  std::vector<Evaluation> seq{Evaluation(m, Status::Unc)};
  for (std::size_t k = 0; k < m; ++k) {
    std::vector<Evaluation> next;
    next.reserve(seq.size() * sets[k].size());
    for (std::size_t v = 0; v < sets[k].size(); ++v) {
      auto emit = [&](Evaluation e) {
        e[k] = sets[k][v];
        next.push_back(std::move(e));
      };
      if (v % 2 == 0)
        for (const auto& e : seq) emit(e);
      else
        for (auto it = seq.rbegin(); it != seq.rend(); ++it) emit(*it);
    }
    seq = std::move(next);
  }

  Evaluation accepting(m);
  for (std::size_t i = 0; i < m; ++i)
    accepting[i] = mitl::classify(soft[i]) == TemporalClass::NonBoundedTypeII ? Status::Unc : Status::Sat;

  StateSet out;
  out.evaluations = std::move(seq);
  out.initial = 0;  // all-unc is always first in Gray order
  out.accepting = static_cast<StateId>(
      std::find(out.evaluations.begin(), out.evaluations.end(), accepting) - out.evaluations.begin());
  out.sink = out.evaluations.size();
  return out;
}

// ---------------------------------------------------------------------------
// RelaxedTba accessors

ViolationCost violation_costs(const RelaxedTba& tba, StateId s) {
  if (tba.is_sink(s)) return {Cost::infinity(), Cost::infinity()};
  const Evaluation& e = tba.evaluations.at(s);
  double continuous = 0.0;
  double discrete = 0.0;
  for (std::size_t i = 0; i < e.size(); ++i) {
    if (e[i] != Status::Vio) continue;
    if (tba.classes[i] == TemporalClass::TemporallyBounded)
      continuous += 1.0;
    else
      discrete = 1.0;
  }
  return {Cost{continuous}, Cost{discrete}};
}

ViolationCost RelaxedTba::violation(StateId s) const { return violation_costs(*this, s); }

SymbolConstraint RelaxedTba::label_map(StateId s) const {
  if (is_sink(s)) return {};
  return {0, hard_atoms};
}

Guard RelaxedTba::clock_map(StateId s) const {
  Guard g;
  if (is_sink(s)) return g;
  const Evaluation& e = evaluations.at(s);
  for (std::size_t i = 0; i < e.size(); ++i) {
    if (!conjunct_clock[i]) continue;
    const ClockId c = *conjunct_clock[i];
    const double b = clocks[c].interval.upper;
    if (e[i] == Status::Sat) g.constraints.push_back({c, Rel::Less, b});
    if (e[i] == Status::Vio) g.constraints.push_back({c, Rel::GreaterEq, b});
  }
  return g;
}

ClockValuation RelaxedTba::initial_valuation() const {
  ClockValuation v(clocks.size());
  for (const Clock& c : clocks)
    if (conjuncts[c.owner].pattern != Pattern::AlwaysImpliesEventuallyWithin) v[c.id] = 0.0;
  return v;
}

std::optional<std::size_t> RelaxedTba::match(StateId s, AtomSet symbol, const ClockValuation& v) const {
  for (std::size_t ei : out_.at(s)) {
    const Edge& e = edges[ei];
    if (e.symbols.matches(symbol) && e.guard.satisfied_by(v)) return ei;
  }
  return std::nullopt;
}

void RelaxedTba::apply_actions(const Edge& e, ClockValuation& v) {
  for (const auto& a : e.actions) {
    if (a.op == ClockOp::Reset)
      v.at(a.clock) = 0.0;
    else
      v.at(a.clock).reset();
  }
}

void RelaxedTba::elapse(ClockValuation& v, double dt) {
  for (auto& x : v)
    if (x) *x += dt;
}

AtomSet RelaxedTba::atom(const std::string& name) const {
  auto it = std::find(alphabet.begin(), alphabet.end(), name);
  if (it == alphabet.end()) throw ConstructionError("atom '" + name + "' not in alphabet");
  return AtomSet{1} << static_cast<unsigned>(it - alphabet.begin());
}

std::string RelaxedTba::describe(StateId s) const {
  if (is_sink(s)) return "sink";
  std::string out;
  const Evaluation& e = evaluations.at(s);
  for (std::size_t i = 0; i < e.size(); ++i) {
    if (i) out += " & ";
    out += "phi" + std::to_string(i + 1) + "^" + to_string(e[i]);
  }
  return out.empty() ? "true" : out;
}

std::string RelaxedTba::describe(const SymbolConstraint& c) const {
  std::string out;
  for (std::size_t i = 0; i < alphabet.size(); ++i) {
    const AtomSet bit = AtomSet{1} << i;
    if (c.must & bit) out += (out.empty() ? "" : " & ") + alphabet[i];
    if (c.must_not & bit) out += (out.empty() ? "!" : " & !") + alphabet[i];
  }
  return out.empty() ? "true" : out;
}

std::string RelaxedTba::describe(const Guard& g) const {
  static const char* rels[] = {"<", "<=", "==", ">=", ">"};
  std::string out;
  auto sep = [&] { return out.empty() ? "" : " & "; };
  for (const auto& c : g.constraints)
    out += sep() + ("x" + std::to_string(c.clock)) + rels[static_cast<int>(c.rel)] + mitl::format_number(c.constant);
  for (ClockId c : g.running) out += sep() + ("on(x" + std::to_string(c) + ")");
  for (ClockId c : g.stopped) out += sep() + ("off(x" + std::to_string(c) + ")");
  return out.empty() ? "true" : out;
}

void RelaxedTba::finalize() {
  out_.assign(state_count(), {});
  for (std::size_t i = 0; i < edges.size(); ++i) out_.at(edges[i].from).push_back(i);
}

// ---------------------------------------------------------------------------
// Edges

namespace {

enum class LocalKind { Stay, Progress, DiscreteRecovery, ContinuousRecovery, Rearm };

struct LocalCase {
  SymbolConstraint sym;
  Guard guard;
  Status next;
  std::vector<ClockAction> actions;
  LocalKind kind;
};

LocalKind kind_of(Status from, Status to) {
  if (from == to) return LocalKind::Stay;
  if (from == Status::Unc) return LocalKind::Progress;
  if (from == Status::Vio && to == Status::Unc) return LocalKind::DiscreteRecovery;
  if (from == Status::Vio && to == Status::Sat) return LocalKind::ContinuousRecovery;
  return LocalKind::Progress;
}

// Per-conjunct transition templates. For a fixed source evaluation the cases
// of one conjunct partition (symbol x valuation) space.
std::vector<LocalCase> local_cases(const RelaxedTba& t, std::size_t i, const Evaluation& src, bool rearm) {
  const mitl::SubFormula& f = t.conjuncts[i];
  const Status st = src[i];
  std::vector<LocalCase> out;
  // only the recurrent eventuality restarts from the accepting state
  const bool fresh = rearm && f.pattern == Pattern::AlwaysEventuallyWithin;

  auto add = [&](AtomSet must, AtomSet must_not, Guard g, Status next, std::vector<ClockAction> acts = {},
                 std::optional<LocalKind> kind = std::nullopt) {
    SymbolConstraint sc{must, must_not};
    if (!sc.consistent()) return;
    if (fresh) kind = LocalKind::Rearm;
    out.push_back({sc, std::move(g), next, std::move(acts), kind.value_or(kind_of(st, next))});
  };
  auto lt = [](ClockId c, double v) { return ClockConstraint{c, Rel::Less, v}; };
  auto ge = [](ClockId c, double v) { return ClockConstraint{c, Rel::GreaterEq, v}; };

  switch (f.pattern) {
    case Pattern::AlwaysNot:
    case Pattern::Always: {
      const AtomSet p = t.atom(f.atoms[0]);
      // `bad` is the literal whose occurrence violates the conjunct
      const bool bad_when_present = f.pattern == Pattern::AlwaysNot;
      const AtomSet bad_must = bad_when_present ? p : 0;
      const AtomSet bad_not = bad_when_present ? 0 : p;
      add(bad_not, bad_must, {}, Status::Unc);
      add(bad_must, bad_not, {}, Status::Vio);
      break;
    }
    case Pattern::Eventually: {
      const AtomSet p = t.atom(f.atoms[0]);
      if (st == Status::Sat) {
        add(0, 0, {}, Status::Sat);
      } else {
        add(p, 0, {}, Status::Sat);
        add(0, p, {}, Status::Unc);
      }
      break;
    }
    case Pattern::EventuallyWithin:
    case Pattern::AlwaysEventuallyWithin: {
      const AtomSet p = t.atom(f.atoms[0]);
      const ClockId x = *t.conjunct_clock[i];
      const double a = f.interval.lower;
      const double b = f.interval.upper;
      const ClockAction reset{x, ClockOp::Reset};
      if (fresh) {
        if (a == 0.0) {
          add(p, 0, {}, Status::Sat, {reset});
          add(0, p, {}, Status::Unc, {reset});
        } else {
          add(0, 0, {}, Status::Unc, {reset});
        }
        break;
      }
      if (st == Status::Unc) {
        Guard in_time;
        if (a > 0.0) in_time.constraints.push_back(ge(x, a));
        in_time.constraints.push_back(lt(x, b));
        add(p, 0, in_time, Status::Sat);
        add(0, 0, Guard{{ge(x, b)}, {}, {}}, Status::Vio);
        add(0, p, Guard{{lt(x, b)}, {}, {}}, Status::Unc);
        if (a > 0.0) add(p, 0, Guard{{lt(x, a)}, {}, {}}, Status::Unc);
      } else if (st == Status::Vio) {
        add(p, 0, {}, Status::Sat);
        add(0, p, {}, Status::Vio);
      } else {
        add(0, 0, {}, Status::Sat);
      }
      break;
    }
    case Pattern::AlwaysImpliesEventuallyWithin: {
      const AtomSet p = t.atom(f.atoms[0]);
      const AtomSet q = t.atom(f.atoms[1]);
      const ClockId x = *t.conjunct_clock[i];
      const double a = f.interval.lower;
      const double b = f.interval.upper;
      const ClockAction reset{x, ClockOp::Reset};
      const ClockAction stop{x, ClockOp::Stop};
      // The round closes on q. Without a pending trigger there is no deadline
      // and p starts one; a closed round reopens on the next p. Stopped and
      // running clocks share their discrete successors and differ only in timing.
      // With a positive lower bound a response in the triggering instant is
      // too early, so a simultaneous p opens the round instead.
      auto open = [&](Guard g, Status quiet, LocalKind trigger_kind) {
        if (a > 0.0) {
          add(q, p, g, Status::Sat, {stop});
          add(p, 0, g, Status::Unc, {reset}, trigger_kind);
        } else {
          add(q, 0, g, Status::Sat, {stop});
          add(p, q, g, Status::Unc, {reset}, trigger_kind);
        }
        add(0, p | q, g, quiet, {stop});
      };
      if (st == Status::Unc) {
        open(Guard{{}, {}, {x}}, Status::Unc, LocalKind::Stay);
        // pending obligation: the earliest trigger governs the deadline
        Guard in_time;
        if (a > 0.0) in_time.constraints.push_back(ge(x, a));
        in_time.constraints.push_back(lt(x, b));
        add(q, 0, in_time, Status::Sat, {stop});
        add(0, 0, Guard{{ge(x, b)}, {}, {}}, Status::Vio);
        add(0, q, Guard{{lt(x, b)}, {}, {}}, Status::Unc);
        if (a > 0.0) add(q, 0, Guard{{lt(x, a)}, {}, {}}, Status::Unc);
      } else if (st == Status::Vio) {
        add(q, 0, {}, Status::Sat, {stop});
        add(0, q, {}, Status::Vio);
      } else {
        open({}, Status::Sat, LocalKind::Rearm);
      }
      break;
    }
    case Pattern::AlwaysUntilFlag: {
      const AtomSet lhs = t.atom(f.atoms[0]);
      const bool released = t.partner[i] && src[*t.partner[i]] == Status::Sat;
      if (released) {
        add(0, 0, {}, Status::Unc);
      } else {
        add(lhs, 0, {}, Status::Unc);
        add(0, lhs, {}, Status::Vio);
      }
      break;
    }
    case Pattern::UntilWithin:
      throw ConstructionError("until conjuncts must be split before edge construction");
  }
  return out;
}

}  // namespace

std::vector<Edge> build_edges(const RelaxedTba& t) {
  std::vector<Edge> edges;
  const std::size_t m = t.conjuncts.size();
  const bool has_recurrent = std::any_of(t.conjuncts.begin(), t.conjuncts.end(), [](const auto& f) {
    return f.pattern == Pattern::AlwaysEventuallyWithin;
  });

  for (StateId s = 0; s < t.evaluations.size(); ++s) {
    const Evaluation& src = t.evaluations[s];
    const bool rearm = has_recurrent && s == t.accepting;

    std::vector<std::vector<LocalCase>> cases(m);
    for (std::size_t i = 0; i < m; ++i) cases[i] = local_cases(t, i, src, rearm);

    std::vector<std::size_t> pick(m, 0);
    for (;;) {
      SymbolConstraint sym{0, t.hard_atoms};
      Guard guard;
      std::vector<ClockAction> actions;
      Evaluation dst(m);
      bool cont = false, disc = false, rearmed = false;
      for (std::size_t i = 0; i < m; ++i) {
        const LocalCase& c = cases[i][pick[i]];
        sym.must |= c.sym.must;
        sym.must_not |= c.sym.must_not;
        guard.constraints.insert(guard.constraints.end(), c.guard.constraints.begin(), c.guard.constraints.end());
        guard.running.insert(guard.running.end(), c.guard.running.begin(), c.guard.running.end());
        guard.stopped.insert(guard.stopped.end(), c.guard.stopped.begin(), c.guard.stopped.end());
        actions.insert(actions.end(), c.actions.begin(), c.actions.end());
        dst[i] = c.next;
        cont = cont || c.kind == LocalKind::ContinuousRecovery;
        disc = disc || c.kind == LocalKind::DiscreteRecovery;
        rearmed = rearmed || c.kind == LocalKind::Rearm;
      }
      if (sym.consistent()) {
        auto it = std::find(t.evaluations.begin(), t.evaluations.end(), dst);
        const StateId to = static_cast<StateId>(it - t.evaluations.begin());
        EdgeStep step = EdgeStep::Progress;
        if (to == s)
          step = EdgeStep::SelfLoop;
        else if (cont)
          step = EdgeStep::ContinuousRecovery;
        else if (disc)
          step = EdgeStep::DiscreteRecovery;
        edges.push_back({s, to, std::move(guard), sym, std::move(actions), step, rearmed});
      }
      // odometer
      std::size_t k = 0;
      while (k < m && ++pick[k] == cases[k].size()) pick[k++] = 0;
      if (k == m) break;
    }

    // hard violations: ordered partition over the hard atoms present
    AtomSet seen = 0;
    for (std::size_t a = 0; a < t.alphabet.size(); ++a) {
      const AtomSet bit = AtomSet{1} << a;
      if (!(t.hard_atoms & bit)) continue;
      edges.push_back({s, t.sink, {}, {bit, seen}, {}, EdgeStep::Progress, false});
      seen |= bit;
    }
  }
  edges.push_back({t.sink, t.sink, {}, {}, {}, EdgeStep::SelfLoop, false});
  return edges;
}

// ---------------------------------------------------------------------------
// Pruning

RelaxedTba prune_unreachable(const RelaxedTba& tba, double time_step) {
  if (!(time_step > 0.0)) throw ConstructionError("pruning time step must be positive");

  AtomSet soft_atoms = 0;
  for (const auto& f : tba.conjuncts)
    for (const auto& a : f.atoms) soft_atoms |= tba.atom(a);
  soft_atoms &= ~tba.hard_atoms;
  std::vector<AtomSet> symbols;
  const int nbits = __builtin_popcountll(soft_atoms);

  std::vector<bool> reached(tba.state_count(), false);
  std::vector<bool> fired(tba.edges.size(), false);
  reached[tba.initial] = true;
  reached[tba.sink] = true;

  if (nbits <= 16) {
    // enumerate every subset of soft_atoms
    for (AtomSet sub = soft_atoms;; sub = (sub - 1) & soft_atoms) {
      symbols.push_back(sub);
      if (sub == 0) break;
    }
    double max_const = 0.0;
    for (const Clock& c : tba.clocks) max_const = std::max(max_const, c.interval.upper);
    const double cap = max_const + time_step;

    using Key = std::vector<std::int64_t>;
    auto key_of = [&](StateId s, const ClockValuation& v) {
      Key k{static_cast<std::int64_t>(s)};
      for (const auto& x : v) k.push_back(x ? static_cast<std::int64_t>(std::llround(*x / time_step)) : -1);
      return k;
    };
    std::set<Key> seen;
    std::deque<std::pair<StateId, ClockValuation>> queue;
    queue.emplace_back(tba.initial, tba.initial_valuation());
    seen.insert(key_of(tba.initial, queue.front().second));
    while (!queue.empty()) {
      auto [s, v] = std::move(queue.front());
      queue.pop_front();
      ClockValuation adv = v;
      RelaxedTba::elapse(adv, time_step);
      for (auto& x : adv)
        if (x && *x > cap) *x = cap;
      for (AtomSet a : symbols) {
        auto ei = tba.match(s, a, adv);
        if (!ei) continue;
        fired[*ei] = true;
        const Edge& e = tba.edges[*ei];
        ClockValuation nv = adv;
        RelaxedTba::apply_actions(e, nv);
        reached[e.to] = true;
        if (seen.insert(key_of(e.to, nv)).second) queue.emplace_back(e.to, std::move(nv));
      }
    }
  } else {
    // too many atoms to enumerate symbols: plain graph reachability
    std::deque<StateId> queue{tba.initial};
    while (!queue.empty()) {
      StateId s = queue.front();
      queue.pop_front();
      for (std::size_t ei : tba.out_edges(s)) {
        fired[ei] = true;
        StateId to = tba.edges[ei].to;
        if (!reached[to]) {
          reached[to] = true;
          queue.push_back(to);
        }
      }
    }
  }

  if (!reached[tba.accepting])
    throw ConstructionError("accepting evaluation unreachable: soft constraints cannot be met even under relaxation");

  std::vector<StateId> remap(tba.state_count(), static_cast<StateId>(-1));
  RelaxedTba out = tba;
  out.evaluations.clear();
  for (StateId s = 0; s < tba.evaluations.size(); ++s) {
    if (!reached[s]) continue;
    remap[s] = out.evaluations.size();
    out.evaluations.push_back(tba.evaluations[s]);
  }
  out.sink = out.evaluations.size();
  remap[tba.sink] = out.sink;
  out.initial = remap[tba.initial];
  out.accepting = remap[tba.accepting];

  out.edges.clear();
  for (std::size_t i = 0; i < tba.edges.size(); ++i) {
    const Edge& e = tba.edges[i];
    if (!reached[e.from] || !reached[e.to]) continue;
    const bool structural = e.to == tba.sink;  // hard-violation edges and the sink loop
    if (!fired[i] && !structural) continue;
    Edge ne = e;
    ne.from = remap[e.from];
    ne.to = remap[e.to];
    out.edges.push_back(std::move(ne));
  }
  out.finalize();
  return out;
}

// ---------------------------------------------------------------------------

RelaxedTba build_relaxed_tba(const mitl::Formula& f, const BuildOptions& opts) {
  if (f.alphabet.size() > kMaxAtoms) throw ConstructionError("alphabet exceeds 64 atoms");
  RelaxedTba t;
  t.alphabet = f.alphabet;
  for (const auto& h : f.hard) {
    if (h.pattern != Pattern::AlwaysNot) throw ConstructionError("hard conjuncts must be 'G !p'");
    t.hard_atoms |= t.atom(h.atoms.at(0));
  }
  for (const auto& s : f.soft)
    for (auto& part : mitl::split_until(s))
      if (std::find(t.conjuncts.begin(), t.conjuncts.end(), part) == t.conjuncts.end())
        t.conjuncts.push_back(std::move(part));

  const std::size_t m = t.conjuncts.size();
  t.conjunct_clock.assign(m, std::nullopt);
  t.partner.assign(m, std::nullopt);
  for (std::size_t i = 0; i < m; ++i) {
    const auto& c = t.conjuncts[i];
    for (const auto& a : c.atoms) t.atom(a);  // validates membership
    t.classes.push_back(mitl::classify(c));
    if (t.classes.back() == TemporalClass::TemporallyBounded) {
      t.conjunct_clock[i] = t.clocks.size();
      t.clocks.push_back({t.clocks.size(), i, c.interval});
    }
  }
  for (std::size_t i = 0; i < m; ++i) {
    if (t.conjuncts[i].pattern != Pattern::AlwaysUntilFlag) continue;
    for (std::size_t j = 0; j < m; ++j)
      if (t.conjuncts[j].pattern == Pattern::EventuallyWithin && t.conjuncts[j].atoms[0] == t.conjuncts[i].atoms[1])
        t.partner[i] = j;
    if (!t.partner[i]) throw ConstructionError("until obligation without its bounded eventuality");
  }

  StateSet states = build_states(t.conjuncts, opts.max_soft_conjuncts);
  t.evaluations = std::move(states.evaluations);
  t.initial = states.initial;
  t.accepting = states.accepting;
  t.sink = states.sink;
  t.raw_state_count = t.state_count();
  t.edges = build_edges(t);
  t.finalize();
  if (opts.prune) return prune_unreachable(t, opts.time_step);
  return t;
}

}  // namespace relaxmitl::tba
