#include "relaxmitl/export.hpp"

#include <algorithm>
#include <ostream>

#include "json.hpp"

namespace relaxmitl::io {

using nlohmann::ordered_json;

namespace {

ordered_json cost_json(const Cost& c) {
  if (c.is_infinite()) return "inf";
  return c.value();
}

const char* rel_str(tba::Rel r) {
  switch (r) {
    case tba::Rel::Less: return "<";
    case tba::Rel::LessEq: return "<=";
    case tba::Rel::Eq: return "==";
    case tba::Rel::GreaterEq: return ">=";
    case tba::Rel::Greater: return ">";
  }
  return "?";
}

ordered_json atoms_json(const tba::RelaxedTba& t, tba::AtomSet set) {
  auto arr = ordered_json::array();
  for (std::size_t i = 0; i < t.alphabet.size(); ++i)
    if (set & (tba::AtomSet{1} << i)) arr.push_back(t.alphabet[i]);
  return arr;
}

// DOT string literal escaping
std::string esc(const std::string& s) {
  std::string out;
  for (char c : s) {
    if (c == '"' || c == '\\') out += '\\';
    out += c;
  }
  return out;
}

}  // namespace

void write_tba_json(std::ostream& os, const tba::RelaxedTba& t) {
  ordered_json j;
  j["schema_version"] = kSchemaVersion;
  j["alphabet"] = t.alphabet;
  j["hard_atoms"] = atoms_json(t, t.hard_atoms);
  auto conj = ordered_json::array();
  for (std::size_t i = 0; i < t.conjuncts.size(); ++i) {
    ordered_json c;
    c["formula"] = mitl::render(t.conjuncts[i]);
    c["pattern"] = mitl::to_string(t.conjuncts[i].pattern);
    c["class"] = mitl::to_string(t.classes[i]);
    if (t.conjunct_clock[i]) c["clock"] = *t.conjunct_clock[i];
    conj.push_back(c);
  }
  j["conjuncts"] = conj;
  j["raw_state_count"] = t.raw_state_count;
  j["initial"] = t.initial;
  j["accepting"] = t.accepting;
  j["sink"] = t.sink;
  auto states = ordered_json::array();
  for (tba::StateId s = 0; s < t.state_count(); ++s) {
    ordered_json st;
    st["id"] = s;
    if (!t.is_sink(s)) {
      auto ev = ordered_json::array();
      for (auto status : t.evaluations[s]) ev.push_back(tba::to_string(status));
      st["evaluation"] = ev;
    } else {
      st["evaluation"] = nullptr;
    }
    const auto v = t.violation(s);
    st["v_c"] = cost_json(v.continuous);
    st["v_d"] = cost_json(v.discrete);
    states.push_back(st);
  }
  j["states"] = states;
  auto edges = ordered_json::array();
  for (const auto& e : t.edges) {
    ordered_json ej;
    ej["from"] = e.from;
    ej["to"] = e.to;
    ej["must"] = atoms_json(t, e.symbols.must);
    ej["must_not"] = atoms_json(t, e.symbols.must_not);
    auto guard = ordered_json::array();
    for (const auto& c : e.guard.constraints) guard.push_back({{"clock", c.clock}, {"rel", rel_str(c.rel)}, {"constant", c.constant}});
    ej["guard"] = guard;
    ej["running"] = e.guard.running;
    ej["stopped"] = e.guard.stopped;
    auto acts = ordered_json::array();
    for (const auto& a : e.actions)
      acts.push_back({{"clock", a.clock}, {"op", a.op == tba::ClockOp::Reset ? "reset" : "stop"}});
    ej["actions"] = acts;
    ej["step"] = static_cast<int>(e.step);
    ej["rearm"] = e.rearm;
    edges.push_back(ej);
  }
  j["edges"] = edges;
  os << j.dump(2) << '\n';
}

void write_tba_dot(std::ostream& os, const tba::RelaxedTba& t) {
  os << "digraph relaxed_tba {\n  rankdir=LR;\n  node [shape=circle, fontsize=10];\n";
  os << "  __start [shape=point];\n  __start -> s" << t.initial << ";\n";
  for (tba::StateId s = 0; s < t.state_count(); ++s) {
    const auto v = t.violation(s);
    os << "  s" << s << " [label=\"s" << s << "\\n" << esc(t.describe(s)) << "\\nv_c=" << v.continuous
       << " v_d=" << v.discrete << '"';
    if (s == t.accepting) os << ", shape=doublecircle";
    if (t.is_sink(s)) os << ", style=filled, fillcolor=gray80";
    os << "];\n";
  }
  for (const auto& e : t.edges) {
    os << "  s" << e.from << " -> s" << e.to << " [label=\"" << esc(t.describe(e.symbols));
    if (!e.guard.trivial()) os << "\\n" << esc(t.describe(e.guard));
    for (const auto& a : e.actions) os << "\\n" << (a.op == tba::ClockOp::Reset ? "x" : "stop x") << a.clock << (a.op == tba::ClockOp::Reset ? ":=0" : "");
    os << '"';
    if (e.step == tba::EdgeStep::DiscreteRecovery || e.step == tba::EdgeStep::ContinuousRecovery) os << ", style=dashed";
    os << "];\n";
  }
  os << "}\n";
}

void write_rpa_stats_json(std::ostream& os, const product::Rpa& rpa, const energy::EnergyTable& table) {
  const auto st = rpa.stats();
  std::size_t finite = 0;
  double max_j = 0.0;
  for (const auto& c : table.J)
    if (c.is_finite()) {
      ++finite;
      max_j = std::max(max_j, c.value());
    }
  ordered_json j;
  j["schema_version"] = kSchemaVersion;
  j["wts_states"] = st.wts_states;
  j["tba_states"] = st.tba_states;
  j["states"] = st.states;
  j["transitions"] = st.transitions;
  j["accepting"] = st.accepting;
  j["fstar"] = table.fstar.size();
  j["finite_energy_states"] = finite;
  j["max_finite_energy"] = max_j;
  j["initial_energy"] = cost_json(table.J.at(rpa.initial()));
  j["version"] = table.version;
  os << j.dump(2) << '\n';
}

}  // namespace relaxmitl::io
