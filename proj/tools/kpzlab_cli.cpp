#include <cmath>
#include <cstdio>
#include <functional>
#include <iostream>
#include <random>

#include "cli_common.hpp"
#include "kpzlab/fredholm.hpp"
#include "kpzlab/hierarchy.hpp"
#include "kpzlab/hirota.hpp"
#include "kpzlab/lax_zc.hpp"
#include "kpzlab/properties.hpp"
#include "kpzlab/scaling.hpp"

using namespace kpz;
using cli::GridArgs;
using cli::ModelArgs;
using io::json;
namespace fs = std::filesystem;

namespace {

std::string sci(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.4e", v);
  return buf;
}

struct Common {
  std::string out;
  std::string config;
  int threads = 0;
};

void add_common(CLI::App* sub, Common& c) {
  sub->add_option("--out", c.out, "output directory (default $KPZLAB_OUT/<command> or ./kpzlab_out/<command>)");
  sub->add_option("--config", c.config, "JSON file of option values; flags override it");
  sub->add_option("--threads", c.threads, "worker threads (0 = hardware)")->capture_default_str();
}

fs::path out_dir(const Common& c, const std::string& command) {
  fs::path d = c.out.empty() ? io::default_output_dir() / command : fs::path(c.out);
  fs::create_directories(d);
  return d;
}

struct Run {
  io::Manifest manifest;
  fs::path dir;
  cli::Printer print;

  Run(const CLI::App* sub, const Common& c, std::string command) {
    manifest.command = std::move(command);
    manifest.config = cli::effective_config(sub);
    dir = out_dir(c, manifest.command);
  }
  fs::path artifact(const std::string& name) {
    manifest.artifacts.push_back(name);
    return dir / name;
  }
  void tolerance(const std::string& name, double tol, double value) {
    manifest.tolerances[name] = tol;
    manifest.results[name] = value;
    print.check(name, value, tol);
  }
  int finish() {
    manifest.pass = print.ok;
    io::write_manifest(dir / "manifest.json", manifest);
    std::printf("%s: %s (manifest %s)\n", manifest.command.c_str(), print.ok ? "pass" : "FAIL",
                (dir / "manifest.json").string().c_str());
    return print.ok ? 0 : 1;
  }
};

Discretization disc_of(const ModelArgs& m) {
  Discretization d;
  d.p_or_q = m.p;
  return d;
}

GridField determinant_field(const ModelArgs& m, const GridArgs& g, bool partials, int threads, json* cert) {
  Model model = cli::model_of(m);
  InitialData y = cli::initial_data(m, g.n_hi);
  Axis ta = cli::make_axis(cli::parse_values(g.t), cli::t_kind(model), "t");
  Axis aa = cli::make_axis(cli::parse_values(g.a), cli::a_kind(model), "a");
  GridField F = F_field(model, y, ta, aa, g.n_lo, g.n_hi, disc_of(m), partials, threads);
  long outside = 0;
  double tail = 0;
  F.for_each([&](Index3 p) {
    auto c = F.coords(p);
    int n = static_cast<int>(std::lround(c[2]));
    if (n < 1 || !F.valid(p)) return;
    if (!in_validity_region(model, y, c[0], c[1], n)) {
      ++outside;
      F.set_valid(p, false);
      return;
    }
    if (cert) tail = std::max(tail, assemble_kernel(model, y, c[0], c[1], n, disc_of(m)).trunc.tail_bound);
  });
  if (cert) {
    (*cert)["max_tail_bound"] = tail;
    (*cert)["points_outside_validity_region"] = outside;
  }
  return F;
}

HierarchyResult hierarchy_field(const ModelArgs& m, const GridArgs& g) {
  Model model = cli::model_of(m);
  InitialData y = cli::initial_data(m, g.n_hi);
  auto tv = cli::parse_values(g.t);
  Axis ta = cli::make_axis(tv, cli::t_kind(model), "t");
  Axis aa = cli::make_axis(cli::parse_values(g.a), cli::a_kind(model), "a");
  return solve_hierarchy(model, y, cli::wall_of(m, tv.back()), m.p, ta, aa, g.n_lo, g.n_hi);
}

io::Plot level_plot(const GridField& F, const std::string& title) {
  io::Plot plot;
  plot.title = title;
  plot.xlabel = "a";
  plot.ylabel = "F";
  for (int k = 0; k < F.shape().n; ++k) {
    io::PlotSeries s;
    s.label = "n = " + std::to_string(std::lround(F.axis(2).at(k)));
    s.step = F.axis(1).kind == AxisKind::Discrete;
    for (int j = 0; j < F.shape().a; ++j) {
      Index3 p{0, j, k};
      s.x.push_back(F.axis(1).at(j));
      s.y.push_back(F.valid(p) ? F(p) : NAN);
    }
    plot.series.push_back(s);
  }
  return plot;
}

GridField field_from_source(const std::string& source, const std::string& file, const ModelArgs& m,
                            const GridArgs& g, int threads, json& results) {
  if (source == "file") {
    if (file.empty()) throw std::invalid_argument("--source file needs --field <field.json>");
    return io::field_from_json(io::read_json(file));
  }
  if (source == "fredholm") return determinant_field(m, g, true, threads, nullptr);
  if (source == "solve") {
    HierarchyResult h = hierarchy_field(m, g);
    results["solver_invalid_points"] = h.invalid;
    return h.F;
  }
  throw std::invalid_argument("--source must be fredholm, solve or file");
}

double default_residual_tol(EquationId eq, const std::string& source) {
  switch (eq) {
    case EquationId::RBM: return 1e-5;
    case EquationId::TASEP:
    case EquationId::PushTASEP: return 1e-7;
    default: return source == "solve" ? 1e-12 : 1e-9;
  }
}

// ---------------------------------------------------------------- simulate

int cmd_simulate(const CLI::App* sub, const Common& c, const ModelArgs& m, double t, int n, long runs,
                 const std::string& a_spec, std::uint64_t seed, double dt, int trajectories) {
  Run run(sub, c, "simulate");
  run.manifest.seed = seed;
  Model model = cli::model_of(m);
  ModelConfig cfg;
  cfg.model = model;
  cfg.y = cli::initial_data(m, n);
  cfg.wall = cli::wall_of(m, t);
  cfg.p_or_q = m.p;
  cfg.horizon = t;
  cfg.dt = dt;
  cfg.seed = seed;
  validate(cfg);

  auto samples = sample_level(cfg, n, t, runs, c.threads);
  std::vector<double> grid;
  if (!a_spec.empty()) {
    grid = cli::parse_values(a_spec);
  } else {
    auto [lo, hi] = std::minmax_element(samples.begin(), samples.end());
    if (model == Model::RBM) {
      for (int k = 0; k <= 60; ++k) grid.push_back(*lo + (*hi - *lo) * k / 60.0);
    } else {
      for (double a = *lo - 1; a <= *hi + 1; a += 1) grid.push_back(a);
    }
  }
  EnsembleCDF cdf = empirical_cdf(samples, n, t, grid);
  io::write_cdf_csv(run.artifact("cdf.csv"), cdf);
  io::write_json(run.artifact("cdf.json"), io::cdf_to_json(cdf));

  io::Plot plot;
  plot.title = std::string(model_name(model)) + " empirical F, n = " + std::to_string(n) + ", t = " + std::to_string(t);
  plot.xlabel = "a";
  plot.ylabel = "F_hat";
  io::PlotSeries s{"F_hat (+-3 se)", cdf.a, cdf.F, {}, {}, model != Model::RBM};
  for (std::size_t i = 0; i < cdf.a.size(); ++i) {
    s.lo.push_back(cdf.F[i] - 3 * cdf.stderr_[i]);
    s.hi.push_back(cdf.F[i] + 3 * cdf.stderr_[i]);
  }
  plot.series.push_back(s);
  io::write_svg(run.artifact("cdf.svg"), plot);

  if (trajectories > 0) {
    std::vector<double> times;
    const int steps = is_discrete_time(model) ? static_cast<int>(t) : 20;
    for (int k = 0; k <= steps; ++k) times.push_back(t * k / steps);
    std::vector<Eigen::MatrixXd> paths;
    for (int r = 0; r < trajectories; ++r) paths.push_back(simulate(cfg, static_cast<std::uint64_t>(r), times));
    io::write_trajectories_csv(run.artifact("trajectories.csv"), paths, times);
  }
  run.manifest.results["runs"] = runs;
  run.print.info("runs", std::to_string(runs));
  return run.finish();
}

// ---------------------------------------------------------------- compare

int cmd_compare(const CLI::App* sub, const Common& c, const ModelArgs& m, double t, int n, long runs,
                const std::string& a_spec, std::uint64_t seed, double dt, double solve_tol, double allowance) {
  Run run(sub, c, "compare");
  run.manifest.seed = seed;
  Model model = cli::model_of(m);
  InitialData y = cli::initial_data(m, n);
  auto wall = cli::wall_of(m, t);
  std::vector<double> a_values;
  if (!a_spec.empty()) {
    a_values = cli::parse_values(a_spec);
  } else {
    // a window around the starting point wide enough for the bulk of the law
    double yn = y.at(n), reach = t + 4 * std::sqrt(t) + 3;
    if (model == Model::RBM) {
      reach = 5 * std::sqrt(t) + 1;
      for (double a = yn - reach; a <= yn + reach + 1e-9; a += reach / 20) a_values.push_back(a);
    } else {
      for (double a = std::floor(yn - reach); a <= std::ceil(yn + reach); a += 1) a_values.push_back(a);
    }
  }
  Axis aa = cli::make_axis(a_values, cli::a_kind(model), "a");
  Axis ta = cli::make_axis({t}, cli::t_kind(model), "t");
  if (std::isnan(allowance)) allowance = model == Model::RBM ? 2e-2 : 0.0;

  std::vector<double> det(a_values.size(), NAN), sol(a_values.size(), NAN);
  if (!wall) {
    GridField D = F_field(model, y, ta, aa, n, n, disc_of(m), false, c.threads);
    for (std::size_t j = 0; j < a_values.size(); ++j)
      if (in_validity_region(model, y, t, a_values[j], n) && D.valid({0, static_cast<int>(j), 0}))
        det[j] = D({0, static_cast<int>(j), 0});
  }
  try {
    HierarchyResult H = solve_hierarchy(model, y, wall, m.p, ta, aa, 1, n);
    for (std::size_t j = 0; j < a_values.size(); ++j) {
      Index3 p{0, static_cast<int>(j), n - 1};
      if (H.F.valid(p)) sol[j] = H.F(p);
    }
  } catch (const std::invalid_argument& e) {
    run.print.info("hierarchy solver", std::string("skipped: ") + e.what());
  }

  ModelConfig cfg;
  cfg.model = model;
  cfg.y = y;
  cfg.wall = wall;
  cfg.p_or_q = m.p;
  cfg.horizon = t;
  cfg.dt = dt;
  cfg.seed = seed;
  EnsembleCDF cdf = empirical_cdf(cfg, n, t, a_values, runs, c.threads);

  double mc_excess = -INFINITY, solve_err = 0;
  bool have_ref = false;
  for (std::size_t j = 0; j < a_values.size(); ++j) {
    double ref = std::isfinite(det[j]) ? det[j] : sol[j];
    if (std::isfinite(ref)) {
      have_ref = true;
      double se = std::sqrt(std::max(ref * (1 - ref), 0.0) / runs);
      mc_excess = std::max(mc_excess, std::abs(cdf.F[j] - ref) - 3 * se - allowance);
    }
    if (std::isfinite(det[j]) && std::isfinite(sol[j])) solve_err = std::max(solve_err, std::abs(det[j] - sol[j]));
  }
  if (!have_ref) throw std::runtime_error("neither a determinant nor a hierarchy reference is available");
  run.tolerance("max |F_hat - F_ref| - (3 stderr + allowance)", 0.0, mc_excess);
  if (!wall) run.tolerance("sup |F_solve - F_det|", solve_tol, solve_err);
  run.manifest.tolerances["mc_allowance"] = allowance;

  {
    auto out = std::ofstream(run.artifact("compare.csv"));
    out.precision(17);
    out << "a,F_det,F_solve,F_hat,stderr\n";
    for (std::size_t j = 0; j < a_values.size(); ++j)
      out << a_values[j] << ',' << det[j] << ',' << sol[j] << ',' << cdf.F[j] << ',' << cdf.stderr_[j] << '\n';
  }
  io::Plot plot;
  plot.title = std::string(model_name(model)) + ": n = " + std::to_string(n) + ", t = " + std::to_string(t);
  plot.xlabel = "a";
  plot.ylabel = "F";
  bool step = model != Model::RBM;
  io::PlotSeries mc{"empirical (+-3 se)", a_values, cdf.F, {}, {}, step};
  for (std::size_t j = 0; j < a_values.size(); ++j) {
    mc.lo.push_back(cdf.F[j] - 3 * cdf.stderr_[j]);
    mc.hi.push_back(cdf.F[j] + 3 * cdf.stderr_[j]);
  }
  plot.series.push_back(mc);
  if (!wall) plot.series.push_back({"determinant", a_values, det, {}, {}, step});
  plot.series.push_back({"hierarchy", a_values, sol, {}, {}, step});
  io::write_svg(run.artifact("compare.svg"), plot);
  return run.finish();
}

// ---------------------------------------------------------------- fredholm / solve

int cmd_fredholm(const CLI::App* sub, const Common& c, const ModelArgs& m, const GridArgs& g, bool partials) {
  Run run(sub, c, "fredholm");
  GridField F = determinant_field(m, g, partials, c.threads, &run.manifest.certificates);
  io::write_field_csv(run.artifact("field.csv"), F);
  io::write_json(run.artifact("field.json"), io::field_to_json(F));
  io::write_svg(run.artifact("field.svg"), level_plot(F, "determinant field at the first t"));
  run.print.info("valid points", std::to_string(F.valid_count()));
  run.print.info("max tail bound", sci(run.manifest.certificates["max_tail_bound"].get<double>()));
  return run.finish();
}

int cmd_solve(const CLI::App* sub, const Common& c, const ModelArgs& m, const GridArgs& g) {
  Run run(sub, c, "solve");
  HierarchyResult h = hierarchy_field(m, g);
  io::write_field_csv(run.artifact("field.csv"), h.F);
  io::write_json(run.artifact("field.json"), io::field_to_json(h.F));
  io::write_svg(run.artifact("field.svg"), level_plot(h.F, "hierarchy solution at the first t"));
  run.manifest.results["scheme"] = h.scheme;
  run.manifest.results["monotone"] = h.monotone;
  run.manifest.results["invalid_points"] = h.invalid;
  run.manifest.results["relation_residual"] = h.relation_residual;
  run.print.info("scheme", h.scheme);
  run.print.info("invalid points", std::to_string(h.invalid));
  run.print.info("monotone in a", h.monotone ? "yes" : "no");
  return run.finish();
}

// ---------------------------------------------------------------- residual / zc

int cmd_residual(const CLI::App* sub, const Common& c, const ModelArgs& m, const GridArgs& g, std::string eq_name,
                 const std::string& source, const std::string& file, double tol, int acc,
                 const std::string& measure) {
  Run run(sub, c, "residual");
  if (eq_name.empty()) eq_name = m.model;
  EquationId id = parse_equation(eq_name);
  BilinearEquation eq = make_equation(id, m.p);
  GridField F = field_from_source(source, file, m, g, c.threads, run.manifest.results);
  Accuracy a = acc == 4 ? Accuracy::Fourth : Accuracy::Second;
  ResidualField r = residual_field(eq, F, interior_region(eq, F, a), a);
  if (r.evaluated == 0) throw std::runtime_error("no grid point has a complete stencil; enlarge the grid");
  if (std::isnan(tol)) tol = default_residual_tol(id, source);
  io::write_residual_csv(run.artifact("residual.csv"), r);
  run.manifest.results["evaluated"] = r.evaluated;
  run.manifest.results["max_raw"] = r.max_raw;
  run.print.info("points evaluated", std::to_string(r.evaluated));
  run.manifest.results["max_normalized"] = r.max_normalized;
  if (measure == "raw") {
    run.tolerance("max raw residual", tol, r.max_raw);
  } else {
    run.print.info("max raw residual", sci(r.max_raw));
    run.tolerance("max normalized residual", tol, r.max_normalized);
  }
  return run.finish();
}

int cmd_zc(const CLI::App* sub, const Common& c, const ModelArgs& m, const GridArgs& g, const std::string& source,
           const std::string& file, double tol, double min_F, int instances, std::uint64_t seed) {
  Run run(sub, c, "zc");
  run.manifest.seed = seed;
  EquationId id = equation_for(cli::model_of(m));
  GridField F = field_from_source(source, file, m, g, c.threads, run.manifest.results);
  // K divides products of F values, so where F is only known to absolute
  // precision (deep tails) it carries no information.
  GridField Fk = F;
  long floored = 0;
  Fk.for_each([&](Index3 p) {
    if (Fk.valid(p) && std::abs(Fk(p)) < min_F) {
      Fk.set_valid(p, false);
      ++floored;
    }
  });
  run.manifest.certificates["min_F"] = min_F;
  run.manifest.certificates["points_below_min_F"] = floored;
  KField k = k_field(id, Fk, m.p);
  if (k.count == 0) throw std::runtime_error("no grid point has a complete K stencil; enlarge the grid");
  if (std::isnan(tol)) tol = id == EquationId::TASEP ? 1e-6 : id == EquationId::RBM ? 1e-5 : 1e-9;
  ZcReport rep = zc_equivalence_check(id, F, m.p);
  PropertyResult ident = check_zc_identity(id, instances, seed);
  io::write_field_csv(run.artifact("k_field.csv"), k.K);
  run.print.info("K points", std::to_string(k.count));
  run.print.info("expected K", std::to_string(k.expected));
  run.manifest.results["commutator_points"] = rep.points;
  run.manifest.results["max_commutator_entry"] = rep.max_entry;
  run.tolerance("max |K - expected|", tol, k.max_dev);
  run.tolerance("commutator identity on grid (relative)", 1e-10, rep.max_mismatch);
  run.tolerance("commutator identity on random fields", ident.tolerance, ident.max_error);
  return run.finish();
}

// ---------------------------------------------------------------- scaling

int cmd_scaling(const CLI::App* sub, const Common& c, const std::string& map_name, const std::string& eps_spec,
                double p, std::uint64_t seed) {
  Run run(sub, c, "scaling");
  run.manifest.seed = seed;
  std::vector<ScalingMap> maps = map_name == "all" ? all_scaling_maps() : std::vector{parse_scaling_map(map_name)};
  std::vector<double> eps;
  if (eps_spec.empty()) {
    eps = default_scaling_eps();
  } else {
    std::vector<int> den;
    for (double v : cli::parse_values(eps_spec)) {
      if (v != std::round(v) || v < 1) throw std::invalid_argument("--eps takes integer denominators k (eps = 1/k)");
      den.push_back(static_cast<int>(v));
    }
    eps = reciprocal_eps(den);
  }
  SmoothField kp = [](double T, double X, double A) { return std::exp(-(T * T + X * X + A * A) / 2) + 2; };
  SmoothField lv = [](double T, double A, double n) { return (1 + 0.3 * n) * std::exp(-(T * T + A * A) / 2) + 2; };
  json all = json::array();
  io::Plot plot;
  plot.title = "source residual against eps";
  plot.xlabel = "log10 eps";
  plot.ylabel = "log10 |residual|";
  for (ScalingMap mp : maps) {
    RateReport r = scaling_rate(mp, map_info(mp).target == EquationId::KP ? kp : lv, eps, p);
    std::string name = scaling_map_name(mp);
    io::write_rate_csv(run.artifact("rate_" + name + ".csv"), r);
    all.push_back(io::rate_to_json(r));
    run.tolerance(name + ": |exponent - " + std::to_string(r.expected_order) + "|", 0.1,
                  std::abs(r.exponent - r.expected_order));
    run.tolerance(name + ": |ratio - 1| at smallest eps", 0.05, std::abs(r.rows.back().ratio - 1));
    io::PlotSeries s;
    s.label = name;
    for (const RateRow& row : r.rows) {
      s.x.push_back(std::log10(row.eps));
      s.y.push_back(std::log10(std::abs(row.residual)));
    }
    plot.series.push_back(s);
  }
  io::write_json(run.artifact("rates.json"), all);
  io::write_svg(run.artifact("rates.svg"), plot);

  // reindexing identity on a random lattice field
  GridField R(Axis::discrete(0, 6), Axis::discrete(-4, 9), Axis::discrete(1, 4));
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(0.5, 2.0);
  R.for_each([&](Index3 q) {
    R(q) = u(rng);
    R.set_valid(q, true);
  });
  run.tolerance("HBDE reindexing deviation", 1e-12, hbde_equivalence(R, p).max_deviation);
  return run.finish();
}

// ---------------------------------------------------------------- selftest

int cmd_selftest(const CLI::App* sub, const Common& c, std::uint64_t seed, int instances) {
  Run run(sub, c, "selftest");
  run.manifest.seed = seed;
  json rows = json::array();
  for (const PropertyResult& r : run_property_suite(seed, instances)) {
    rows.push_back({{"name", r.name},
                    {"instances", r.instances},
                    {"max_error", r.max_error},
                    {"tolerance", r.tolerance},
                    {"pass", r.pass}});
    run.tolerance(r.name, r.tolerance, r.max_error);
    if (!r.pass) run.print.ok = false;
  }
  io::write_json(run.artifact("properties.json"), rows);
  return run.finish();
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"kpzlab: one-point distributions of integrable KPZ models"};
  app.require_subcommand(1);
  app.option_defaults()->multi_option_policy(CLI::MultiOptionPolicy::TakeLast);
  Common common;
  ModelArgs model;
  GridArgs grid;
  double t = 1, dt = 0, tol = NAN, min_F = 1e-8, solve_tol = 1e-3, allowance = NAN;
  int n = 1, trajectories = 0, acc = 2, instances = 100;
  long runs = 10000;
  std::uint64_t seed = 0;
  std::string a_spec, eq_name, measure = "normalized", source = "fredholm", field_file, map_name = "all", eps_spec;
  bool partials = false;

  auto* sim = app.add_subcommand("simulate", "Monte Carlo ensemble and empirical distribution of Y_n(t)");
  add_common(sim, common);
  cli::add_model_options(sim, model);
  sim->add_option("--t", t, "time")->required();
  sim->add_option("--n", n, "particle label")->required();
  sim->add_option("--runs", runs, "ensemble size")->capture_default_str();
  sim->add_option("--a", a_spec, "evaluation grid (default: spans the samples)");
  sim->add_option("--seed", seed, "base seed")->required();
  sim->add_option("--dt", dt, "RBM time step (0 = 1e-3 t)");
  sim->add_option("--trajectories", trajectories, "dump this many sample paths");

  auto* cmp = app.add_subcommand("compare", "determinant, hierarchy and empirical F at fixed (t, n)");
  add_common(cmp, common);
  cli::add_model_options(cmp, model);
  cmp->add_option("--t", t, "time")->required();
  cmp->add_option("--n", n, "particle label")->required();
  cmp->add_option("--a", a_spec, "positions: lo:hi:step or a list (default: a window around y_n)");
  cmp->add_option("--runs", runs, "ensemble size")->capture_default_str();
  cmp->add_option("--seed", seed, "base seed")->required();
  cmp->add_option("--dt", dt, "RBM time step (0 = 1e-3 t)");
  cmp->add_option("--solve-tol", solve_tol, "tolerance for hierarchy against determinant")->capture_default_str();
  cmp->add_option("--mc-allowance", allowance, "added to 3 stderr (default 2e-2 for rbm, else 0)");

  auto* fred = app.add_subcommand("fredholm", "Fredholm determinant field F_{t,a,n}");
  add_common(fred, common);
  cli::add_model_options(fred, model);
  cli::add_grid_options(fred, grid);
  fred->add_flag("--partials", partials, "also fill analytic derivative channels");

  auto* sol = app.add_subcommand("solve", "hierarchy solver from the initial condition");
  add_common(sol, common);
  cli::add_model_options(sol, model);
  cli::add_grid_options(sol, grid);

  auto* res = app.add_subcommand("residual", "bilinear residual of a field");
  add_common(res, common);
  cli::add_model_options(res, model);
  cli::add_grid_options(res, grid);
  res->add_option("--eq", eq_name, "equation (model name, kp, hbde, 2dtl); default: the model's");
  res->add_option("--source", source, "fredholm, solve or file")->capture_default_str();
  res->add_option("--field", field_file, "field JSON for --source file");
  res->add_option("--tol", tol, "tolerance on the checked residual (default depends on the model)");
  res->add_option("--measure", measure, "raw, or normalized by F_left * F_right")
      ->check(CLI::IsMember({"raw", "normalized"}))
      ->capture_default_str();
  res->add_option("--accuracy", acc, "stencil order 2 or 4")->check(CLI::IsMember({2, 4}))->capture_default_str();

  auto* zc = app.add_subcommand("zc", "K-field constancy and the commutator identity");
  add_common(zc, common);
  cli::add_model_options(zc, model);
  cli::add_grid_options(zc, grid);
  zc->add_option("--source", source, "fredholm, solve or file")->capture_default_str();
  zc->add_option("--field", field_file, "field JSON for --source file");
  zc->add_option("--tol", tol, "tolerance on max |K - expected|");
  zc->add_option("--min-F", min_F, "skip points where |F| is below this when forming K")->capture_default_str();
  zc->add_option("--instances", instances, "random fields for the identity check")->capture_default_str();
  zc->add_option("--seed", seed, "seed of the random fields")->capture_default_str();

  auto* sc = app.add_subcommand("scaling", "residual rates under the scaling maps");
  add_common(sc, common);
  sc->add_option("--map", map_name, "map name or 'all'")->capture_default_str();
  sc->add_option("--eps", eps_spec, "denominators k of eps = 1/k (decreasing eps)");
  sc->add_option("--p", model.p, "p for the KP scaling of parallel TASEP")->capture_default_str();
  sc->add_option("--seed", seed, "seed of the random reindexing field")->capture_default_str();

  auto* st = app.add_subcommand("selftest", "randomized property suite");
  add_common(st, common);
  std::uint64_t self_seed = 20240601;
  st->add_option("--seed", self_seed, "seed of the random instances")->capture_default_str();
  st->add_option("--instances", instances, "instances per property")->capture_default_str();

  try {
    std::vector<std::string> args = cli::expand_config(argc, argv);
    std::reverse(args.begin(), args.end());
    args.pop_back();
    app.parse(std::move(args));
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  }

  try {
    if (*sim) return cmd_simulate(sim, common, model, t, n, runs, a_spec, seed, dt, trajectories);
    if (*cmp) return cmd_compare(cmp, common, model, t, n, runs, a_spec, seed, dt, solve_tol, allowance);
    if (*fred) return cmd_fredholm(fred, common, model, grid, partials);
    if (*sol) return cmd_solve(sol, common, model, grid);
    if (*res) return cmd_residual(res, common, model, grid, eq_name, source, field_file, tol, acc, measure);
    if (*zc) return cmd_zc(zc, common, model, grid, source, field_file, tol, min_F, instances, seed);
    if (*sc) return cmd_scaling(sc, common, map_name, eps_spec, model.p, seed);
    if (*st) return cmd_selftest(st, common, self_seed, instances);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  }
  return 1;
}
