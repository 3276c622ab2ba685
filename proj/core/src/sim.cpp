#include "relaxmitl/sim.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <stdexcept>

#include "json.hpp"

#include "relaxmitl/mitl.hpp"

namespace relaxmitl::sim {

int SensorModel::distance(Cell a, Cell b) const {
  const int dx = std::abs(a.x - b.x);
  const int dy = std::abs(a.y - b.y);
  return norm == Norm::Manhattan ? dx + dy : std::max(dx, dy);
}

std::vector<std::string> scenario_alphabet(const Scenario& sc) {
  std::vector<std::string> out = sc.alphabet.empty() ? mitl::collect_atoms(sc.formula) : sc.alphabet;
  auto add = [&](const std::string& a) {
    if (std::find(out.begin(), out.end(), a) == out.end()) out.push_back(a);
  };
  for (const auto& [c, a] : sc.labels) add(a);
  if (!sc.obstacles.empty() || sc.obstacle_count > 0) add(sc.obstacle_atom);
  return out;
}

Environment::Environment(const Scenario& sc)
    : width_(sc.width),
      height_(sc.height),
      alphabet_(scenario_alphabet(sc)),
      p_move_(sc.p_move),
      rng_(sc.seed),
      field_(sc.seed, sc.r_max) {
  if (width_ < 1 || height_ < 1) throw std::invalid_argument("scenario: grid dimensions must be positive");
  if (!in_bounds(sc.start)) throw std::invalid_argument("scenario: start cell out of bounds");
  if (alphabet_.size() > 64) throw std::invalid_argument("scenario: more than 64 atoms");
  auto bit = [&](const std::string& a) -> AtomSet {
    auto it = std::find(alphabet_.begin(), alphabet_.end(), a);
    if (it == alphabet_.end()) return 0;
    return AtomSet{1} << (it - alphabet_.begin());
  };
  obstacle_bit_ = bit(sc.obstacle_atom);
  static_labels_.assign(static_cast<std::size_t>(width_) * height_, 0);
  for (const auto& [c, a] : sc.labels) {
    if (!in_bounds(c)) throw std::invalid_argument("scenario: label '" + a + "' out of bounds");
    if (a == sc.obstacle_atom) throw std::invalid_argument("scenario: obstacles go in the obstacle list");
    static_labels_[id(c)] |= bit(a);
  }
  agent_ = id(sc.start);

  auto free_cell = [&](StateId q) {
    return q != agent_ && static_labels_[q] == 0 && !obstacle_at(q);
  };
  for (const Cell& c : sc.obstacles) {
    if (!in_bounds(c)) throw std::invalid_argument("scenario: obstacle out of bounds");
    if (!free_cell(id(c))) throw std::invalid_argument("scenario: obstacle on the start cell or a labeled cell");
    obstacles_.push_back(id(c));
  }
  std::size_t free = 0;
  for (StateId q = 0; q < size(); ++q) free += free_cell(q);
  if (static_cast<std::size_t>(std::max(sc.obstacle_count, 0)) > free)
    throw std::invalid_argument("scenario: not enough free cells for obstacles");
  std::uniform_int_distribution<StateId> pick(0, size() - 1);
  for (int i = 0; i < sc.obstacle_count; ++i) {
    StateId q;
    do q = pick(rng_);
    while (!free_cell(q));
    obstacles_.push_back(q);
  }
  rewards_ = field_.snapshot(k_, size());
}

bool Environment::obstacle_at(StateId q) const {
  return std::find(obstacles_.begin(), obstacles_.end(), q) != obstacles_.end();
}

AtomSet Environment::true_label(StateId q) const {
  return static_labels_.at(q) | (obstacle_at(q) ? obstacle_bit_ : 0);
}

double Environment::move_agent(StateId q) {
  if (q >= size()) throw std::out_of_range("agent move out of bounds");
  agent_ = q;
  const double r = rewards_[q];
  rewards_[q] = 0.0;
  return r;
}

void Environment::step() {
  static constexpr int dx[] = {-1, 1, 0, 0};
  static constexpr int dy[] = {0, 0, -1, 1};
  std::bernoulli_distribution moves(p_move_);
  std::uniform_int_distribution<int> dir(0, 3);
  for (auto& o : obstacles_) {
    // draw both variates unconditionally so the stream does not depend on rejections
    const bool go = moves(rng_);
    const int d = dir(rng_);
    if (!go) continue;
    const Cell c = cell(o);
    const Cell nb{c.x + dx[d], c.y + dy[d]};
    if (!in_bounds(nb)) continue;
    const StateId to = id(nb);
    if (to == agent_ || static_labels_[to] != 0 || obstacle_at(to)) continue;
    o = to;
  }
  ++k_;
  rewards_ = field_.snapshot(k_, size());
}

void step_environment(Environment& env) { env.step(); }

std::vector<wts::LabelDelta> sense(const Environment& env, const wts::Wts& knowledge, StateId cell,
                                   const SensorModel& sensor) {
  std::vector<wts::LabelDelta> out;
  const Cell agent = env.cell(cell);
  for (StateId q = 0; q < env.size(); ++q) {
    if (!sensor.covers(agent, env.cell(q))) continue;
    const AtomSet truth = env.true_label(q);
    if (truth != knowledge.label(q)) out.push_back({q, truth});
  }
  return out;
}

std::vector<double> sensed_rewards(const Environment& env, StateId cell, const SensorModel& sensor) {
  std::vector<double> out(env.size(), 0.0);
  const Cell agent = env.cell(cell);
  for (StateId q = 0; q < env.size(); ++q)
    if (sensor.covers(agent, env.cell(q))) out[q] = env.rewards()[q];
  return out;
}

wts::Wts initial_knowledge(const Environment& env, const Scenario& sc) {
  std::vector<AtomSet> labels(env.size());
  for (StateId q = 0; q < env.size(); ++q)
    labels[q] = sc.obstacles_known ? env.true_label(q) : env.static_label(q);
  return wts::Wts::from_grid(env.width(), env.height(), env.alphabet(), std::move(labels), sc.start);
}

Scenario case_study_scenario() {
  Scenario sc;
  sc.width = sc.height = 10;
  sc.start = {0, 0};
  sc.formula = "hard: G !obstacle ; soft: G !grass & G F[0,10) cherry & G (cherry -> F[0,20) pear)";
  sc.alphabet = {"obstacle", "grass", "cherry", "pear"};
  sc.labels = {{{9, 9}, "cherry"}, {{9, 0}, "cherry"}, {{2, 8}, "pear"},
               {{5, 7}, "grass"},  {{5, 8}, "grass"},  {{5, 9}, "grass"}};
  sc.obstacles = {{3, 3}, {6, 2}, {7, 6}, {2, 5}};
  sc.p_move = 0.3;
  sc.r_max = 1.0;
  sc.seed = 7;
  sc.steps = 50;
  sc.planner = {4, 0.8, 10.0};
  sc.sensor = {4, Norm::Manhattan};
  return sc;
}

Scenario scaled_case_study(int n, int obstacles_per_100_cells, bool centered) {
  if (n < 4) throw std::invalid_argument("scaled case study needs n >= 4");
  Scenario sc = case_study_scenario();
  sc.width = sc.height = n;
  auto s = [&](int v) { return static_cast<int>(std::lround(v * (n - 1) / 9.0)); };
  sc.labels = {{{n - 1, n - 1}, "cherry"}, {{n - 1, 0}, "cherry"}, {{s(2), s(8)}, "pear"}};
  for (int y = s(7); y < n; ++y) sc.labels.push_back({{s(5), y}, "grass"});
  if (centered) sc.start = {n / 2, n / 2 - 1};
  sc.obstacles.clear();
  sc.obstacle_count = obstacles_per_100_cells * n * n / 100;
  return sc;
}

// ---------------------------------------------------------------------------
// JSON

namespace {

using nlohmann::json;
using nlohmann::ordered_json;

Cell cell_from(const json& j) {
  if (!j.is_array() || j.size() != 2) throw std::invalid_argument("scenario: cell must be [x, y]");
  return {j[0].get<int>(), j[1].get<int>()};
}

}  // namespace

Scenario load_scenario(std::istream& is) {
  json j;
  try {
    j = json::parse(is);
  } catch (const json::exception& e) {
    throw std::invalid_argument(std::string("scenario: ") + e.what());
  }
  if (!j.is_object()) throw std::invalid_argument("scenario: expected a JSON object");
  if (!j.contains("schema_version")) throw std::invalid_argument("scenario: missing schema_version");
  if (j["schema_version"] != 1)
    throw std::invalid_argument("scenario: unsupported schema_version " + j["schema_version"].dump());
  Scenario sc;
  try {
    sc.width = j.value("width", sc.width);
    sc.height = j.value("height", sc.height);
    if (j.contains("start")) sc.start = cell_from(j["start"]);
    sc.formula = j.value("formula", sc.formula);
    sc.alphabet = j.value("alphabet", sc.alphabet);
    for (const auto& l : j.value("labels", json::array()))
      sc.labels.push_back({cell_from(l.at("cell")), l.at("atom").get<std::string>()});
    if (j.contains("obstacles")) {
      const auto& o = j["obstacles"];
      sc.obstacle_atom = o.value("atom", sc.obstacle_atom);
      for (const auto& c : o.value("cells", json::array())) sc.obstacles.push_back(cell_from(c));
      sc.obstacle_count = o.value("count", sc.obstacle_count);
      sc.p_move = o.value("p_move", sc.p_move);
      sc.obstacles_known = o.value("known", sc.obstacles_known);
    }
    if (j.contains("rewards")) sc.r_max = j["rewards"].value("r_max", sc.r_max);
    sc.seed = j.value("seed", sc.seed);
    sc.steps = j.value("steps", sc.steps);
    if (j.contains("planner")) {
      const auto& p = j["planner"];
      sc.planner.horizon = p.value("horizon", sc.planner.horizon);
      sc.planner.alpha = p.value("alpha", sc.planner.alpha);
      sc.planner.beta = p.value("beta", sc.planner.beta);
    }
    if (j.contains("sensor")) {
      const auto& s = j["sensor"];
      sc.sensor.range = s.value("range", sc.sensor.range);
      const std::string norm = s.value("norm", std::string("manhattan"));
      if (norm == "manhattan")
        sc.sensor.norm = Norm::Manhattan;
      else if (norm == "chebyshev")
        sc.sensor.norm = Norm::Chebyshev;
      else
        throw std::invalid_argument("scenario: unknown sensing norm '" + norm + "'");
    }
  } catch (const json::exception& e) {
    throw std::invalid_argument(std::string("scenario: ") + e.what());
  }
  return sc;
}

Scenario load_scenario_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("cannot open scenario '" + path + "'");
  return load_scenario(in);
}

void save_scenario(std::ostream& os, const Scenario& sc) {
  ordered_json j;
  j["schema_version"] = 1;
  j["width"] = sc.width;
  j["height"] = sc.height;
  j["start"] = {sc.start.x, sc.start.y};
  j["formula"] = sc.formula;
  j["alphabet"] = sc.alphabet;
  j["labels"] = ordered_json::array();
  for (const auto& [c, a] : sc.labels) j["labels"].push_back({{"cell", {c.x, c.y}}, {"atom", a}});
  ordered_json o;
  o["atom"] = sc.obstacle_atom;
  o["cells"] = ordered_json::array();
  for (const auto& c : sc.obstacles) o["cells"].push_back({c.x, c.y});
  o["count"] = sc.obstacle_count;
  o["p_move"] = sc.p_move;
  o["known"] = sc.obstacles_known;
  j["obstacles"] = o;
  j["rewards"] = {{"r_max", sc.r_max}};
  j["seed"] = sc.seed;
  j["steps"] = sc.steps;
  j["planner"] = {{"horizon", sc.planner.horizon}, {"alpha", sc.planner.alpha}, {"beta", sc.planner.beta}};
  j["sensor"] = {{"range", sc.sensor.range}, {"norm", sc.sensor.norm == Norm::Manhattan ? "manhattan" : "chebyshev"}};
  os << j.dump(2) << '\n';
}

}  // namespace relaxmitl::sim
