#include "commands.hpp"

#include <filesystem>
#include <fstream>
#include <iostream>
#include <numeric>
#include <sstream>

#include "CLI11.hpp"
#include "relaxmitl/energy.hpp"
#include "relaxmitl/export.hpp"
#include "relaxmitl/mitl.hpp"
#include "relaxmitl/planner.hpp"
#include "relaxmitl/relaxed_tba.hpp"
#include "relaxmitl/sim.hpp"

namespace fs = std::filesystem;

namespace relaxmitl::cli {

namespace {

std::ofstream open_out(const fs::path& path) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream os(path);
  if (!os) throw std::invalid_argument("cannot write '" + path.string() + "'");
  return os;
}

std::string vector_str(const std::vector<Cost>& v) {
  std::string s = "[";
  for (std::size_t i = 0; i < v.size(); ++i) s += (i ? "," : "") + v[i].str();
  return s + "]";
}

sim::Scenario resolve(const ScenarioArgs& a) {
  sim::Scenario sc = a.scenario.empty() ? sim::case_study_scenario() : sim::load_scenario_file(a.scenario);
  if (a.formula) {
    sc.formula = *a.formula;
    // the built-in alphabet may not cover a new formula
    if (a.alphabet.empty() && a.scenario.empty()) sc.alphabet.clear();
  }
  if (!a.alphabet.empty()) sc.alphabet = a.alphabet;
  if (a.steps) sc.steps = *a.steps;
  if (a.horizon) sc.planner.horizon = *a.horizon;
  if (a.alpha) sc.planner.alpha = *a.alpha;
  if (a.beta) sc.planner.beta = *a.beta;
  if (a.sense_range) sc.sensor.range = *a.sense_range;
  if (a.seed) sc.seed = *a.seed;
  if (sc.formula.empty()) throw std::invalid_argument("scenario has no formula");
  if (sc.steps < 0) throw std::invalid_argument("steps must be non-negative");
  return sc;
}

// Maps the library's error types onto exit codes.
template <typename F>
int guarded(std::ostream& err, F&& body) {
  try {
    return body();
  } catch (const mitl::ParseError& e) {
    err << "error: " << e.what() << '\n';
    return kInputError;
  } catch (const tba::ConstructionError& e) {
    err << "error: " << e.what() << '\n';
    return kInputError;
  } catch (const planner::NoAcceptingRun& e) {
    err << "error: " << e.what() << '\n';
    return kNoAcceptingRun;
  } catch (const planner::Infeasible& e) {
    err << "error: infeasible: " << e.what() << '\n';
    return kInfeasible;
  } catch (const std::invalid_argument& e) {
    err << "error: " << e.what() << '\n';
    return kInputError;
  } catch (const fs::filesystem_error& e) {
    err << "error: " << e.what() << '\n';
    return kInputError;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kUnexpected;
  }
}

}  // namespace

int cmd_build(const BuildArgs& args, std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    const auto alphabet = args.alphabet.empty() ? mitl::collect_atoms(args.formula) : args.alphabet;
    const mitl::Formula f = mitl::parse(args.formula, alphabet);
    tba::BuildOptions opts;
    opts.prune = args.prune;
    const tba::RelaxedTba t = tba::build_relaxed_tba(f, opts);

    std::vector<Cost> vc, vd;
    for (tba::StateId s = 0; s < t.state_count(); ++s) {
      const auto v = t.violation(s);
      vc.push_back(v.continuous);
      vd.push_back(v.discrete);
    }
    out << "formula: " << mitl::render(f) << '\n';
    out << "states: " << t.state_count() << '\n';
    out << "raw states: " << t.raw_state_count << '\n';
    out << "edges: " << t.edges.size() << '\n';
    out << "clocks: " << t.clocks.size() << '\n';
    out << "initial: " << t.initial << '\n';
    out << "accepting: " << t.accepting << '\n';
    out << "sink: " << t.sink << '\n';
    out << "v_c=" << vector_str(vc) << '\n';
    out << "v_d=" << vector_str(vd) << '\n';
    for (tba::StateId s = 0; s < t.state_count(); ++s) out << "  s" << s << ": " << t.describe(s) << '\n';

    if (!args.out_dir.empty()) {
      const fs::path dir(args.out_dir);
      auto js = open_out(dir / "tba.json");
      io::write_tba_json(js, t);
      auto dot = open_out(dir / "tba.dot");
      io::write_tba_dot(dot, t);
      out << "wrote " << (dir / "tba.json").string() << ", " << (dir / "tba.dot").string() << '\n';
    }
    return kOk;
  });
}

int cmd_simulate(const SimulateArgs& args, std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    const sim::Scenario sc = resolve(args.scenario);
    sim::Environment env(sc);
    product::Rpa rpa = planner::scenario_product(sc, env);
    const planner::PlannerConfig cfg = planner::scenario_config(sc);
    const planner::Episode ep = planner::run_loop(rpa, env, cfg, sc.steps, sc.sensor);

    const fs::path dir(args.out_dir);
    auto trace = open_out(dir / "trace.jsonl");
    planner::write_trace(trace, rpa, ep);
    auto series = open_out(dir / "series.csv");
    planner::write_series(series, ep);

    std::size_t completions = 0, fallbacks = 0;
    for (const auto& r : ep.trace) {
      completions += r.energy.is_zero();
      fallbacks += r.fallback;
    }
    const double mean =
        ep.step_seconds.empty()
            ? 0.0
            : std::accumulate(ep.step_seconds.begin(), ep.step_seconds.end(), 0.0) / ep.step_seconds.size();
    out << "steps: " << ep.trace.size() << '\n';
    out << "product states: " << rpa.size() << '\n';
    out << "zero-energy visits: " << completions << '\n';
    out << "fallback steps: " << fallbacks << '\n';
    if (!ep.trace.empty()) {
      const auto& last = ep.trace.back();
      out << "cumulative reward: " << last.cumulative_reward << '\n';
      out << "continuous violation: " << last.cumulative_vc << '\n';
      out << "discrete violation: " << last.cumulative_vd << '\n';
    }
    out << "mean step time (s): " << mean << '\n';
    out << "wrote " << (dir / "trace.jsonl").string() << ", " << (dir / "series.csv").string() << '\n';
    return kOk;
  });
}

int cmd_bench(const BenchArgs& args, std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    if (args.repetitions < 1) throw std::invalid_argument("repetitions must be positive");
    if (args.steps < 1) throw std::invalid_argument("bench steps must be positive");
    auto csv = open_out(args.out);
    csv << "workspace,N,Q,P,mean_step_seconds\n";
    out << "workspace,N,Q,P,mean_step_seconds\n";
    for (int n : args.sizes) {
      for (int N : args.horizons) {
        sim::Scenario sc = sim::scaled_case_study(n, args.obstacle_density, true);
        sc.planner.horizon = N;
        sc.sensor.range = std::max(N, sc.sensor.range);
        double total = 0.0;
        std::size_t count = 0, q = 0, p = 0;
        for (int r = 0; r < args.repetitions; ++r) {
          sc.seed = args.seed + r;
          sim::Environment env(sc);
          product::Rpa rpa = planner::scenario_product(sc, env);
          q = rpa.wts().size();
          p = rpa.size();
          const auto ep = planner::run_loop(rpa, env, planner::scenario_config(sc), args.steps, sc.sensor);
          // skip the initial plan: it includes the one-off F* computation
          for (std::size_t i = 1; i < ep.step_seconds.size(); ++i) total += ep.step_seconds[i];
          count += ep.step_seconds.size() - 1;
        }
        std::ostringstream row;
        row << n << 'x' << n << ',' << N << ',' << q << ',' << p << ',' << total / count;
        csv << row.str() << '\n';
        out << row.str() << '\n';
      }
    }
    return kOk;
  });
}

int cmd_inspect(const InspectArgs& args, std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    const sim::Scenario sc = resolve(args.scenario);
    sim::Environment env(sc);
    product::Rpa rpa = planner::scenario_product(sc, env);
    const planner::PlannerConfig cfg = planner::scenario_config(sc);
    const auto table = energy::compute_energy(rpa, energy::largest_self_reachable(rpa), cfg.energy_options());

    const fs::path dir(args.out_dir);
    auto csv = open_out(dir / "energy.csv");
    energy::write_energy_csv(csv, rpa, table);
    auto js = open_out(dir / "rpa.json");
    io::write_rpa_stats_json(js, rpa, table);

    const auto st = rpa.stats();
    out << "wts states: " << st.wts_states << '\n';
    out << "tba states: " << st.tba_states << " (raw " << rpa.tba().raw_state_count << ")\n";
    out << "product states: " << st.states << '\n';
    out << "product transitions: " << st.transitions << '\n';
    out << "accepting states: " << st.accepting << '\n';
    out << "F* size: " << table.fstar.size() << '\n';
    out << "initial energy: " << table.J.at(rpa.initial()) << '\n';
    out << "wrote " << (dir / "energy.csv").string() << ", " << (dir / "rpa.json").string() << '\n';
    return table.J.at(rpa.initial()).is_infinite() ? kNoAcceptingRun : kOk;
  });
}

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Minimal-violation MITL motion planning on grid workspaces", "relaxmitl"};
  app.require_subcommand(1);

  BuildArgs build;
  auto* b = app.add_subcommand("build", "Build the relaxed timed automaton of a formula");
  b->add_option("--formula", build.formula, "Formula, e.g. \"hard: G !obs ; soft: G !g & F[0,10) p\"")->required();
  b->add_option("--alphabet", build.alphabet, "Atomic propositions (default: atoms of the formula)")->delimiter(',');
  b->add_option("--out", build.out_dir, "Directory for tba.json and tba.dot");
  b->add_flag("!--no-prune", build.prune, "Keep unreachable evaluation states");

  auto scenario_options = [](CLI::App* c, ScenarioArgs& s) {
    c->add_option("--scenario", s.scenario, "Scenario JSON (default: built-in case study)");
    c->add_option("--formula", s.formula, "Override the scenario formula");
    c->add_option("--alphabet", s.alphabet, "Override the alphabet")->delimiter(',');
    c->add_option("--steps", s.steps, "Receding-horizon steps");
    c->add_option("--horizon", s.horizon, "Prediction horizon N");
    c->add_option("--alpha", s.alpha, "Continuous/discrete violation preference in [0,1]");
    c->add_option("--beta", s.beta, "Violation penalty relative to reward");
    c->add_option("--sense-range", s.sense_range, "Sensing range N_s");
    c->add_option("--seed", s.seed, "RNG seed");
  };

  SimulateArgs simulate;
  auto* s = app.add_subcommand("simulate", "Run an online planning episode");
  scenario_options(s, simulate.scenario);
  s->add_option("--out", simulate.out_dir, "Directory for trace.jsonl and series.csv");

  BenchArgs bench;
  auto* bn = app.add_subcommand("bench", "Workspace size / horizon timing matrix");
  bn->add_option("--sizes", bench.sizes, "Square workspace sizes")->delimiter(',');
  bn->add_option("--horizons", bench.horizons, "Horizons")->delimiter(',');
  bn->add_option("--repetitions", bench.repetitions, "Episodes per cell");
  bn->add_option("--steps", bench.steps, "Steps per episode");
  bn->add_option("--obstacle-density", bench.obstacle_density, "Obstacles per 100 cells");
  bn->add_option("--seed", bench.seed, "First seed");
  bn->add_option("--out", bench.out, "CSV output path");

  InspectArgs inspect;
  auto* in = app.add_subcommand("inspect", "Energy table and product statistics");
  scenario_options(in, inspect.scenario);
  in->add_option("--out", inspect.out_dir, "Directory for energy.csv and rpa.json");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kOk : kInputError;
  }
  if (*b) return cmd_build(build, out, err);
  if (*s) return cmd_simulate(simulate, out, err);
  if (*bn) return cmd_bench(bench, out, err);
  return cmd_inspect(inspect, out, err);
}

}  // namespace relaxmitl::cli
