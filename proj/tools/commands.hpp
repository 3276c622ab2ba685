#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace relaxmitl::cli {

enum ExitCode : int {
  kOk = 0,
  kUnexpected = 1,
  kInputError = 2,
  kNoAcceptingRun = 3,
  kInfeasible = 4,
};

struct BuildArgs {
  std::string formula;
  std::vector<std::string> alphabet;  // inferred from the formula when empty
  std::string out_dir;                // no files written when empty
  bool prune = true;
};

/// Scenario overrides shared by simulate and inspect.
struct ScenarioArgs {
  std::string scenario;  // JSON path; the built-in case study when empty
  std::optional<std::string> formula;
  std::vector<std::string> alphabet;
  std::optional<int> steps;
  std::optional<int> horizon;
  std::optional<double> alpha;
  std::optional<double> beta;
  std::optional<int> sense_range;
  std::optional<std::uint64_t> seed;
};

struct SimulateArgs {
  ScenarioArgs scenario;
  std::string out_dir = "out";
};

struct BenchArgs {
  std::vector<int> sizes{10, 30, 50};
  std::vector<int> horizons{4, 6, 8};
  int repetitions = 3;
  int steps = 10;
  int obstacle_density = 2;  // obstacles per 100 cells
  std::uint64_t seed = 1;
  std::string out = "bench.csv";
};

struct InspectArgs {
  ScenarioArgs scenario;
  std::string out_dir = "out";
};

int cmd_build(const BuildArgs& args, std::ostream& out, std::ostream& err);
int cmd_simulate(const SimulateArgs& args, std::ostream& out, std::ostream& err);
int cmd_bench(const BenchArgs& args, std::ostream& out, std::ostream& err);
int cmd_inspect(const InspectArgs& args, std::ostream& out, std::ostream& err);

/// Parse argv and dispatch to a subcommand.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace relaxmitl::cli
