#include <gtest/gtest.h>

#include <algorithm>
#include <deque>
#include <map>
#include <random>
#include <set>

#include "support.hpp"

using namespace relaxmitl;
using namespace relaxmitl::tba;
using mitl::Pattern;
using mitl::SubFormula;
using testing_support::build;
using testing_support::running_example;

namespace {

const Cost kInf = Cost::infinity();

std::vector<AtomSet> all_symbols(const RelaxedTba& t) {
  std::vector<AtomSet> out;
  for (AtomSet a = 0; a < (AtomSet{1} << t.alphabet.size()); ++a) out.push_back(a);
  return out;
}

double max_constant(const RelaxedTba& t) {
  double m = 0.0;
  for (const Clock& c : t.clocks) m = std::max(m, c.interval.upper);
  return m;
}

using Config = std::pair<StateId, std::vector<double>>;  // stopped clocks encoded as -1

Config key(StateId s, const ClockValuation& v, double cap) {
  std::vector<double> k;
  for (const auto& x : v) k.push_back(x ? std::min(*x, cap) : -1.0);
  return {s, k};
}

ClockValuation valuation(const std::vector<double>& k) {
  ClockValuation v;
  for (double x : k) v.push_back(x < 0 ? std::nullopt : std::optional<double>(x));
  return v;
}

/// Every (state, valuation) reachable with time step dt, each paired with
/// the advanced valuation at which the next symbol is read.
std::vector<Config> reachable_configs(const RelaxedTba& t, double dt) {
  const double cap = max_constant(t) + dt;
  std::set<Config> seen;
  std::deque<Config> queue;
  Config start = key(t.initial, t.initial_valuation(), cap);
  seen.insert(start);
  queue.push_back(start);
  std::vector<Config> out;
  while (!queue.empty()) {
    Config c = queue.front();
    queue.pop_front();
    out.push_back(c);
    ClockValuation adv = valuation(c.second);
    RelaxedTba::elapse(adv, dt);
    for (AtomSet a : all_symbols(t)) {
      auto ei = t.match(c.first, a, adv);
      if (!ei) continue;
      ClockValuation nv = adv;
      RelaxedTba::apply_actions(t.edges[*ei], nv);
      Config next = key(t.edges[*ei].to, nv, cap);
      if (seen.insert(next).second) queue.push_back(next);
    }
  }
  return out;
}

struct Step {
  StateId to;
  const Edge* edge;
};

std::vector<Step> run_word(const RelaxedTba& t, const std::vector<AtomSet>& word, double dt = 1.0) {
  std::vector<Step> out;
  StateId s = t.initial;
  ClockValuation v = t.initial_valuation();
  for (AtomSet a : word) {
    RelaxedTba::elapse(v, dt);
    auto ei = t.match(s, a, v);
    if (!ei) {
      ADD_FAILURE() << "deadlock at state " << s;
      return out;
    }
    RelaxedTba::apply_actions(t.edges[*ei], v);
    s = t.edges[*ei].to;
    out.push_back({s, &t.edges[*ei]});
  }
  return out;
}

StateId find_state(const RelaxedTba& t, const Evaluation& e) {
  for (StateId s = 0; s < t.evaluations.size(); ++s)
    if (t.evaluations[s] == e) return s;
  ADD_FAILURE() << "evaluation not present";
  return t.sink;
}

constexpr Status U = Status::Unc, V = Status::Vio, S = Status::Sat;

}  // namespace

TEST(EvaluationSet, Examples) {
  EXPECT_EQ(evaluation_set({Pattern::AlwaysNot, {"g"}, {}}), (std::vector<Status>{U, V}));
  EXPECT_EQ(evaluation_set({Pattern::EventuallyWithin, {"p"}, {0, 10}}), (std::vector<Status>{U, V, S}));
  EXPECT_EQ(evaluation_set({Pattern::Eventually, {"p"}, {}}), (std::vector<Status>{U, S}));
}

TEST(BuildStates, Counts) {
  const SubFormula g{Pattern::AlwaysNot, {"g"}, {}};
  const SubFormula p{Pattern::EventuallyWithin, {"p"}, {0, 10}};
  EXPECT_EQ(build_states({g, p}).evaluations.size() + 1, 7u);
  auto empty = build_states({});
  EXPECT_EQ(empty.evaluations.size() + 1, 2u);
  EXPECT_EQ(empty.initial, empty.accepting);
  EXPECT_EQ(build_states({{Pattern::EventuallyWithin, {"a"}, {0, 5}}}).evaluations.size() + 1, 4u);
  std::vector<SubFormula> many;
  for (int i = 0; i < 21; ++i) many.push_back({Pattern::AlwaysNot, {"a" + std::to_string(i)}, {}});
  EXPECT_THROW(build_states(many), ConstructionError);
  EXPECT_NO_THROW(build_states(many, 21));
}

TEST(BuildStates, CountIdentityOnRandomConjunctSets) {
  std::mt19937_64 rng(3);
  std::uniform_int_distribution<int> n(0, 6), kind(0, 2);
  for (int iter = 0; iter < 200; ++iter) {
    std::vector<SubFormula> soft;
    std::size_t expected = 1;
    for (int i = n(rng); i > 0; --i) {
      const std::string a = "a" + std::to_string(soft.size());
      switch (kind(rng)) {
        case 0: soft.push_back({Pattern::AlwaysNot, {a}, {}}); expected *= 2; break;
        case 1: soft.push_back({Pattern::Eventually, {a}, {}}); expected *= 2; break;
        default: soft.push_back({Pattern::EventuallyWithin, {a}, {0, 4}}); expected *= 3; break;
      }
    }
    auto st = build_states(soft);
    ASSERT_EQ(st.evaluations.size() + 1, expected + 1);
    ASSERT_EQ(st.sink, st.evaluations.size());
    std::set<Evaluation> distinct(st.evaluations.begin(), st.evaluations.end());
    ASSERT_EQ(distinct.size(), st.evaluations.size());
    // neighbouring ids differ in exactly one conjunct
    for (std::size_t i = 1; i < st.evaluations.size(); ++i)
      ASSERT_EQ(distance_set(st.evaluations[i - 1], st.evaluations[i]).size(), 1u);
    ASSERT_EQ(st.evaluations[st.initial], Evaluation(soft.size(), U));
  }
}

TEST(RunningExample, StatesAndViolationVectors) {
  RelaxedTba t = running_example();
  ASSERT_EQ(t.state_count(), 7u);
  EXPECT_EQ(t.raw_state_count, 7u);
  const std::vector<Evaluation> expected{{U, U}, {V, U}, {V, V}, {U, V}, {U, S}, {V, S}};
  EXPECT_EQ(t.evaluations, expected);
  EXPECT_EQ(t.initial, 0u);
  EXPECT_EQ(t.accepting, 4u);
  EXPECT_EQ(t.sink, 6u);
  const std::vector<Cost> vc{Cost(0), Cost(0), Cost(1), Cost(1), Cost(0), Cost(0), kInf};
  const std::vector<Cost> vd{Cost(0), Cost(1), Cost(1), Cost(0), Cost(0), Cost(1), kInf};
  for (StateId s = 0; s < 7; ++s) {
    EXPECT_EQ(t.violation(s).continuous, vc[s]) << s;
    EXPECT_EQ(t.violation(s).discrete, vd[s]) << s;
    EXPECT_EQ(violation_costs(t, s), t.violation(s));
  }
  ASSERT_EQ(t.clocks.size(), 1u);
  EXPECT_EQ(t.clocks[0].owner, 1u);
}

TEST(DistanceSet, Examples) {
  EXPECT_EQ(distance_set({U, U}, {V, U}), (std::vector<std::size_t>{0}));
  EXPECT_TRUE(distance_set({U, V}, {U, V}).empty());
  EXPECT_EQ(distance_set({U, U}, {V, S}), (std::vector<std::size_t>{0, 1}));
}

TEST(RunningExample, DeadlineEdges) {
  RelaxedTba t = running_example();
  const AtomSet p = t.atom("p");
  auto edge_from = [&](StateId s, AtomSet symbol, double x) -> const Edge& {
    auto ei = t.match(s, symbol, ClockValuation{x});
    EXPECT_TRUE(ei.has_value());
    return t.edges[*ei];
  };
  const Edge& early = edge_from(0, p, 3.0);
  EXPECT_EQ(early.to, 4u);
  EXPECT_EQ(early.step, EdgeStep::Progress);
  EXPECT_EQ(early.guard.constraints, (std::vector<ClockConstraint>{{0, Rel::Less, 10.0}}));
  const Edge& late = edge_from(0, p, 10.0);
  EXPECT_EQ(late.to, 3u);
  EXPECT_EQ(late.guard.constraints, (std::vector<ClockConstraint>{{0, Rel::GreaterEq, 10.0}}));
  EXPECT_EQ(edge_from(0, p, 9.5).to, 4u);
  EXPECT_EQ(edge_from(0, t.atom("g"), 1.0).to, 1u);
  EXPECT_EQ(edge_from(0, t.atom("obs") | p, 1.0).to, t.sink);
  EXPECT_EQ(edge_from(0, 0, 1.0).to, 0u);
  EXPECT_EQ(edge_from(0, 0, 1.0).step, EdgeStep::SelfLoop);
}

// Step-2 edges mirror an edge of the state where the recovered conjuncts are
// still uncertain: same target, symbols and guard.
TEST(RunningExample, DiscreteRecoveryEdgesSatisfyTheirConditions) {
  RelaxedTba t = running_example();
  std::size_t count = 0;
  for (const Edge& e : t.edges) {
    if (e.step != EdgeStep::DiscreteRecovery) continue;
    ++count;
    const Evaluation& src = t.evaluations.at(e.from);
    const Evaluation& dst = t.evaluations.at(e.to);
    Evaluation shadow = src;
    bool recovers = false;
    for (std::size_t i : distance_set(src, dst)) {
      if (t.classes[i] == mitl::TemporalClass::TemporallyBounded) continue;
      EXPECT_EQ(src[i], V) << "condition (i) fails on " << e.from << "->" << e.to;
      shadow[i] = U;
      recovers = true;
    }
    EXPECT_TRUE(recovers);
    const StateId s2 = find_state(t, shadow);
    const bool witnessed = std::any_of(t.edges.begin(), t.edges.end(), [&](const Edge& w) {
      return w.from == s2 && w.to == e.to && w.symbols == e.symbols && w.guard == e.guard;
    });
    EXPECT_TRUE(witnessed) << "condition (ii) fails on " << e.from << "->" << e.to;
  }
  EXPECT_GT(count, 0u);
  // after a grass step, the pear in time still leads to the accepting state
  bool one_to_four = false;
  for (const Edge& e : t.edges)
    one_to_four |= e.from == 1 && e.to == 4 && e.step == EdgeStep::DiscreteRecovery;
  EXPECT_TRUE(one_to_four);
  // every discretely violating state can recover
  for (StateId s = 0; s < t.evaluations.size(); ++s) {
    if (t.violation(s).discrete != Cost(1)) continue;
    bool recovery = false;
    for (std::size_t ei : t.out_edges(s))
      recovery |= t.edges[ei].to != t.sink && t.violation(t.edges[ei].to).discrete == Cost(0);
    EXPECT_TRUE(recovery) << s;
  }
}

// Step-3 edges copy the edge of the uncertain twin with the clock constraint removed.
TEST(RunningExample, ContinuousRecoveryEdgesDropTheClock) {
  RelaxedTba t = running_example();
  std::size_t count = 0;
  for (const Edge& e : t.edges) {
    if (e.step != EdgeStep::ContinuousRecovery) continue;
    ++count;
    const Evaluation& src = t.evaluations.at(e.from);
    const Evaluation& dst = t.evaluations.at(e.to);
    bool found = false;
    for (std::size_t i : distance_set(src, dst)) {
      if (t.classes[i] != mitl::TemporalClass::TemporallyBounded || src[i] != V || dst[i] != S) continue;
      Evaluation twin = src;
      twin[i] = U;
      const StateId s2 = find_state(t, twin);
      const ClockId x = *t.conjunct_clock[i];
      found |= std::any_of(t.edges.begin(), t.edges.end(), [&](const Edge& w) {
        return w.from == s2 && w.to == e.to && w.symbols == e.symbols && w.guard.without_clock(x) == e.guard;
      });
    }
    EXPECT_TRUE(found) << e.from << "->" << e.to;
  }
  EXPECT_EQ(count, 4u);
}

TEST(RunningExample, SinkAbsorbsHardViolations) {
  RelaxedTba t = running_example();
  for (const Edge& e : t.edges) {
    if (e.from == t.sink) {
      EXPECT_EQ(e.to, t.sink);
      continue;
    }
    if (e.to != t.sink) EXPECT_EQ(e.symbols.must_not & t.hard_atoms, t.hard_atoms);
  }
  std::size_t sink_out = t.out_edges(t.sink).size();
  EXPECT_EQ(sink_out, 1u);
}

TEST(Prune, RunningExampleUnchanged) {
  RelaxedTba raw = running_example(false);
  RelaxedTba pruned = prune_unreachable(raw);
  EXPECT_EQ(pruned.state_count(), raw.state_count());
  EXPECT_EQ(pruned.evaluations, raw.evaluations);
}

TEST(Prune, EmptySoftKeepsTwoStates) {
  RelaxedTba t = build("hard: G !obs ; soft: ", {"obs"});
  EXPECT_EQ(t.state_count(), 2u);
  EXPECT_EQ(t.initial, t.accepting);
}

TEST(Prune, UnsatisfiableAcceptanceIsRejected) {
  EXPECT_THROW(build("hard: G !p ; soft: F[0,5) p", {"p"}), ConstructionError);
}

// Pruned state set equals the evaluations reached by an independent search of the raw automaton.
TEST(Prune, MatchesIndependentReachability) {
  for (const char* text : {testing_support::kCaseStudy, "hard: G !o ; soft: F[0,3) a & G (a -> F[0,2) b)",
                           "soft: G !g & F c & a U[0,4) b", "soft: G F[0,3) a & G !b"}) {
    auto alphabet = mitl::collect_atoms(text);
    RelaxedTba raw = build(text, alphabet, false);
    RelaxedTba pruned = prune_unreachable(raw);
    std::set<Evaluation> reached;
    for (const Config& c : reachable_configs(raw, 1.0))
      if (c.first != raw.sink) reached.insert(raw.evaluations[c.first]);
    std::set<Evaluation> kept(pruned.evaluations.begin(), pruned.evaluations.end());
    EXPECT_EQ(kept, reached) << text;
    EXPECT_EQ(pruned.evaluations[pruned.initial], raw.evaluations[raw.initial]);
    EXPECT_EQ(pruned.evaluations[pruned.accepting], raw.evaluations[raw.accepting]);
    EXPECT_EQ(pruned.raw_state_count, raw.state_count());
  }
}

TEST(CaseStudy, RawAndPrunedCounts) {
  RelaxedTba t = build(testing_support::kCaseStudy, mitl::collect_atoms(testing_support::kCaseStudy));
  EXPECT_EQ(t.raw_state_count, 19u);
  EXPECT_EQ(t.state_count(), 17u);
  EXPECT_EQ(t.evaluations[t.accepting], (Evaluation{U, S, S}));
  EXPECT_EQ(t.evaluations[t.initial], (Evaluation{U, U, U}));
}

TEST(CaseStudy, CompletesARound) {
  RelaxedTba t = build(testing_support::kCaseStudy, mitl::collect_atoms(testing_support::kCaseStudy));
  const AtomSet cherry = t.atom("cherry"), pear = t.atom("pear");
  auto steps = run_word(t, {0, cherry, 0, 0, pear});
  ASSERT_EQ(steps.size(), 5u);
  EXPECT_EQ(t.evaluations[steps[1].to], (Evaluation{U, S, U}));
  EXPECT_EQ(steps[4].to, t.accepting);
  // a late pear violates the response, continuously
  auto late = run_word(t, {cherry, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0});
  bool violated = false;
  for (const Step& s : late) violated |= s.to != t.sink && t.evaluations[s.to][2] == V;
  EXPECT_TRUE(violated);
}

namespace {

std::vector<const char*> property_formulas() {
  return {testing_support::kRunningExample,
          testing_support::kCaseStudy,
          "soft: F[0,3) a",
          "soft: F a & G !b",
          "hard: G !o ; soft: G F[0,4) a & G (a -> F[1,3) b)",
          "soft: a U[0,4) b & G !c",
          "soft: a U[1,3) b",
          "soft: G (a -> F[0,2) b) & F[2,5) c",
          "soft: G a & G F[0,2) b"};
}

}  // namespace

TEST(TbaProperty, DeterministicAndDeadlockFreeOnReachableConfigurations) {
  for (const char* text : property_formulas())
    for (double dt : {1.0, 0.5}) {
      // pruning only keeps edges fired at the exploration step
      BuildOptions opts;
      opts.time_step = dt;
      RelaxedTba t = build_relaxed_tba(mitl::parse(text, mitl::collect_atoms(text)), opts);
      for (const Config& c : reachable_configs(t, dt)) {
        ClockValuation adv = valuation(c.second);
        RelaxedTba::elapse(adv, dt);
        for (AtomSet a : all_symbols(t)) {
          std::size_t enabled = 0;
          for (std::size_t ei : t.out_edges(c.first))
            if (t.edges[ei].symbols.matches(a) && t.edges[ei].guard.satisfied_by(adv)) ++enabled;
          ASSERT_EQ(enabled, 1u) << text << " state " << t.describe(c.first) << " symbol " << a;
        }
      }
    }
}

TEST(TbaProperty, MonotoneReevaluationOnProgressEdges) {
  for (const char* text : property_formulas()) {
    RelaxedTba t = build(text, mitl::collect_atoms(text));
    for (const Edge& e : t.edges) {
      if (e.step != EdgeStep::Progress || e.rearm || e.to == t.sink || e.from == t.sink) continue;
      const Evaluation& a = t.evaluations[e.from];
      const Evaluation& b = t.evaluations[e.to];
      for (std::size_t i = 0; i < a.size(); ++i)
        if (a[i] != U) EXPECT_EQ(b[i], a[i]) << text << ": " << e.from << "->" << e.to << " conjunct " << i;
    }
  }
}

TEST(TbaProperty, RawCountIdentity) {
  for (const char* text : property_formulas()) {
    RelaxedTba t = build(text, mitl::collect_atoms(text), false);
    std::size_t product = 1;
    for (const auto& f : t.conjuncts) product *= evaluation_set(f).size();
    EXPECT_EQ(t.state_count(), product + 1) << text;
    EXPECT_EQ(t.raw_state_count, product + 1) << text;
  }
}

TEST(TbaProperty, ClockPerBoundedConjunct) {
  for (const char* text : property_formulas()) {
    RelaxedTba t = build(text, mitl::collect_atoms(text));
    std::size_t bounded = 0;
    for (std::size_t i = 0; i < t.conjuncts.size(); ++i) {
      const bool b = t.classes[i] == mitl::TemporalClass::TemporallyBounded;
      bounded += b;
      EXPECT_EQ(t.conjunct_clock[i].has_value(), b) << text;
    }
    EXPECT_EQ(t.clocks.size(), bounded);
  }
}

// Restricted to violation-free states and non-recovery edges, the automaton
// follows the direct semantics of G !g & F[0,b) p on unit-step words.
TEST(TbaProperty, ViolationFreeFragmentMatchesDirectSemantics) {
  for (int b : {2, 3, 5, 10}) {
    const std::string text = "hard: G !obs ; soft: G !g & F[0," + std::to_string(b) + ") p";
    RelaxedTba t = build(text, testing_support::running_alphabet());
    const AtomSet g = t.atom("g"), p = t.atom("p");
    for (int len = 1; len <= 6; ++len) {
      const int n = 1 << (2 * len);
      for (int code = 0; code < n; ++code) {
        std::vector<AtomSet> word;
        for (int i = 0; i < len; ++i) word.push_back(((code >> (2 * i)) & 1 ? g : 0) | ((code >> (2 * i + 1)) & 1 ? p : 0));
        // direct semantics on positions 1..len at times 1..len
        bool grass = false, pear_in_time = false;
        for (int i = 0; i < len; ++i) {
          grass |= (word[i] & g) != 0;
          pear_in_time |= (word[i] & p) != 0 && i + 1 < b;
        }
        const bool deadline_passed = !pear_in_time && len >= b;
        const bool violated = grass || deadline_passed;
        const bool satisfied = !grass && pear_in_time;

        bool restricted = true;
        auto steps = run_word(t, word);
        for (const Step& s : steps) {
          const auto v = t.violation(s.to);
          restricted &= v.continuous.is_zero() && v.discrete.is_zero();
          restricted &= s.edge->step == EdgeStep::Progress || s.edge->step == EdgeStep::SelfLoop;
        }
        ASSERT_EQ(restricted, !violated) << "b=" << b << " code=" << code << " len=" << len;
        if (restricted) ASSERT_EQ(steps.back().to == t.accepting, satisfied);
      }
    }
  }
}
