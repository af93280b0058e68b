#pragma once

#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "kpzlab/grid_field.hpp"
#include "kpzlab/io.hpp"
#include "kpzlab/mc_models.hpp"
#include "kpzlab/model.hpp"

namespace cli {

// Rewrites argv so that the keys of the JSON file named by --config appear as
// flags right after the subcommand; with take-last semantics, flags given on
// the command line then override the file.
std::vector<std::string> expand_config(int argc, char** argv);

struct ModelArgs {
  std::string model = "tasep";
  std::string y = "step";
  int N = 0;  // particles for step/packed/shock; 0 uses the largest level
  double p = 0.5;
  double wall_slope = NAN;
  std::string wall_jumps;
  long wall_start = 0;
};

struct GridArgs {
  std::string t, a;
  int n_lo = 1, n_hi = 1;
};

void add_model_options(CLI::App* sub, ModelArgs& m);
void add_grid_options(CLI::App* sub, GridArgs& g, bool levels = true);

kpz::Model model_of(const ModelArgs& m);
kpz::InitialData initial_data(const ModelArgs& m, int levels);
std::optional<kpz::Wall> wall_of(const ModelArgs& m, double horizon);

// "lo:hi:step" (inclusive), "v1,v2,..." or a single value.
std::vector<double> parse_values(const std::string& spec);
kpz::Axis make_axis(const std::vector<double>& values, kpz::AxisKind kind, const char* what);
kpz::AxisKind t_kind(kpz::Model m);
kpz::AxisKind a_kind(kpz::Model m);

// Every option of `sub` that was set, keyed by its long name.
kpz::io::json effective_config(const CLI::App* sub);

struct Printer {
  bool ok = true;
  void check(const std::string& what, double value, double tol);
  void info(const std::string& what, const std::string& value);
};

}  // namespace cli
