#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <optional>
#include <random>
#include <vector>

#include "kpzlab/model.hpp"

namespace kpz {

// RBM walls are piecewise linear through (times[i], values[i]) with b(0) = 0
// and constant continuation; TASEP walls start at `start` and jump one unit
// right at each of `jumps`.
struct Wall {
  std::vector<double> times, values;
  std::vector<double> jumps;
  long start = 0;

  double continuous_at(double t) const;
  long lattice_at(double t) const;

  static Wall linear(double slope, double horizon);
  static Wall jump_times(std::vector<double> s, long start = 0);
};

struct ModelConfig {
  Model model = Model::TASEP;
  InitialData y;
  std::optional<Wall> wall;
  double p_or_q = 0.5;
  double horizon = 1.0;
  double dt = 0.0;  // RBM only; 0 selects 1e-3 * horizon
  int n_max = 0;    // 0 simulates every particle of y
  std::uint64_t seed = 0;
};

void validate(const ModelConfig& cfg);

// Independent stream for (seed, run, particle).
std::mt19937_64 substream(std::uint64_t seed, std::uint64_t run, std::uint64_t particle);

// Positions at each query time: rows are times, columns particles 1..n_max.
// Ordering is checked on every path and a violation throws std::logic_error.
Eigen::MatrixXd simulate_rbm(const ModelConfig& cfg, std::uint64_t run, const std::vector<double>& times);
Eigen::MatrixXd simulate_tasep(const ModelConfig& cfg, std::uint64_t run, const std::vector<double>& times);
Eigen::MatrixXd simulate_push_tasep(const ModelConfig& cfg, std::uint64_t run,
                                    const std::vector<double>& times);
Eigen::MatrixXd simulate_parallel(const ModelConfig& cfg, std::uint64_t run, const std::vector<double>& times);
Eigen::MatrixXd simulate_blocking(const ModelConfig& cfg, std::uint64_t run, const std::vector<double>& times);
Eigen::MatrixXd simulate_pushing(const ModelConfig& cfg, std::uint64_t run, const std::vector<double>& times);
Eigen::MatrixXd simulate(const ModelConfig& cfg, std::uint64_t run, const std::vector<double>& times);

// Y_n(t) for runs 0..runs-1, ordered by run index whatever the thread count.
std::vector<double> sample_level(const ModelConfig& cfg, int n, double t, long runs, int threads = 0);

struct EnsembleCDF {
  std::vector<double> a;
  std::vector<double> F;
  std::vector<double> stderr_;
  long runs = 0;
  int n = 1;
  double t = 0;
};

EnsembleCDF empirical_cdf(const std::vector<double>& samples, int n, double t, const std::vector<double>& a_grid);
EnsembleCDF empirical_cdf(const ModelConfig& cfg, int n, double t, const std::vector<double>& a_grid, long runs,
                          int threads = 0);

int default_threads();

}  // namespace kpz
