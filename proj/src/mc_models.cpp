#include "kpzlab/mc_models.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <mutex>
#include <stdexcept>
#include <thread>

namespace kpz {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

int particles(const ModelConfig& cfg) {
  int n = cfg.n_max > 0 ? cfg.n_max : cfg.y.size();
  if (n > cfg.y.size()) throw std::invalid_argument("n_max exceeds the number of initial positions");
  return n;
}

void check_times(const ModelConfig& cfg, const std::vector<double>& times) {
  for (std::size_t i = 0; i < times.size(); ++i) {
    if (times[i] < 0 || times[i] > cfg.horizon + 1e-12)
      throw std::invalid_argument("query time outside [0, horizon]");
    if (i && times[i] < times[i - 1]) throw std::invalid_argument("query times must be sorted");
  }
}

void check_order(const Eigen::MatrixXd& pos, int row, bool strict) {
  for (int k = 1; k < pos.cols(); ++k) {
    bool ok = strict ? pos(row, k) < pos(row, k - 1) : pos(row, k) <= pos(row, k - 1);
    if (!ok) throw std::logic_error("particle ordering violated");
  }
}

double uniform01(std::mt19937_64& g) { return std::generate_canonical<double, 53>(g); }

}  // namespace

double Wall::continuous_at(double t) const {
  if (times.empty()) return 0.0;
  if (t <= times.front()) return values.front();
  if (t >= times.back()) return values.back();
  auto it = std::upper_bound(times.begin(), times.end(), t);
  std::size_t i = it - times.begin();
  double w = (t - times[i - 1]) / (times[i] - times[i - 1]);
  return values[i - 1] + w * (values[i] - values[i - 1]);
}

long Wall::lattice_at(double t) const {
  return start + static_cast<long>(std::upper_bound(jumps.begin(), jumps.end(), t) - jumps.begin());
}

Wall Wall::linear(double slope, double horizon) {
  Wall w;
  w.times = {0.0, horizon};
  w.values = {0.0, slope * horizon};
  return w;
}

Wall Wall::jump_times(std::vector<double> s, long start) {
  Wall w;
  w.jumps = std::move(s);
  w.start = start;
  return w;
}

void validate(const ModelConfig& cfg) {
  validate(cfg.y, cfg.model);
  if (!(cfg.horizon >= 0)) throw std::invalid_argument("horizon must be non-negative");
  if (cfg.dt < 0) throw std::invalid_argument("dt must be positive");
  if (is_discrete_time(cfg.model)) {
    if (cfg.horizon != std::floor(cfg.horizon)) throw std::invalid_argument("discrete-time horizon must be an integer");
    if (cfg.p_or_q < 0 || cfg.p_or_q > 1) throw std::invalid_argument("jump probability must lie in [0, 1]");
  }
  particles(cfg);
  if (!cfg.wall) return;
  const Wall& w = *cfg.wall;
  if (cfg.model == Model::RBM) {
    if (w.times.size() != w.values.size() || w.times.empty())
      throw std::invalid_argument("RBM wall needs matching time and value samples");
    if (w.times.front() != 0.0 || w.values.front() != 0.0) throw std::invalid_argument("RBM wall must satisfy b(0) = 0");
    for (std::size_t i = 1; i < w.times.size(); ++i)
      if (!(w.times[i] > w.times[i - 1])) throw std::invalid_argument("wall sample times must increase");
    if (cfg.y.at(1) > 0) throw std::invalid_argument("RBM with a wall needs y_1 <= b(0) = 0");
  } else if (cfg.model == Model::TASEP) {
    for (std::size_t i = 1; i < w.jumps.size(); ++i)
      if (!(w.jumps[i] > w.jumps[i - 1])) throw std::invalid_argument("wall jump times must strictly increase");
    if (!w.jumps.empty() && w.jumps.front() <= 0) throw std::invalid_argument("wall jump times must be positive");
    if (!(w.start > cfg.y.at(1))) throw std::invalid_argument("TASEP wall must start right of particle 1");
  } else {
    throw std::invalid_argument("walls are supported for rbm and tasep only");
  }
}

std::mt19937_64 substream(std::uint64_t seed, std::uint64_t run, std::uint64_t particle) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(run), static_cast<std::uint32_t>(run >> 32),
                    static_cast<std::uint32_t>(particle), static_cast<std::uint32_t>(particle >> 32)};
  return std::mt19937_64(seq);
}

Eigen::MatrixXd simulate_rbm(const ModelConfig& cfg, std::uint64_t run, const std::vector<double>& times) {
  check_times(cfg, times);
  const int n = particles(cfg);
  const double dt0 = cfg.dt > 0 ? cfg.dt : 1e-3 * std::max(cfg.horizon, 1e-300);
  const long steps = cfg.horizon > 0 ? static_cast<long>(std::ceil(cfg.horizon / dt0 - 1e-9)) : 0;
  const double dt = steps > 0 ? cfg.horizon / steps : 0.0;
  const double sd = std::sqrt(dt);

  std::vector<std::mt19937_64> rng;
  for (int k = 1; k <= n; ++k) rng.push_back(substream(cfg.seed, run, k));
  std::normal_distribution<double> normal;
  std::uniform_real_distribution<double> unif;
  std::vector<double> z(cfg.y.y.begin(), cfg.y.y.begin() + n), Y = z;
  std::vector<double> runmax(n, -kInf), gap(n, -kInf);
  auto wall = [&](double t) { return cfg.wall ? cfg.wall->continuous_at(t) : kInf; };
  // Y_k = z_k - sup (z_k - barrier)^+ with the barrier Y_{k-1} (the wall for
  // k = 0). Between grid times the gap is treated as a Brownian bridge and its
  // maximum sampled exactly; checking only the endpoints biases Y by O(sqrt dt).
  auto reflect = [&](double t, bool bridge) {
    double above = wall(t);
    for (int k = 0; k < n; ++k) {
      double g = z[k] - above;
      double m = g;
      if (bridge && std::isfinite(g) && std::isfinite(gap[k])) {
        double rate = k == 0 ? 1.0 : 2.0;
        double d = g - gap[k];
        m = 0.5 * (gap[k] + g + std::sqrt(d * d - 2 * rate * dt * std::log1p(-unif(rng[k]))));
      }
      gap[k] = g;
      runmax[k] = std::max(runmax[k], m);
      Y[k] = std::min(z[k] - std::max(0.0, runmax[k]), above);
      above = Y[k];
    }
  };
  reflect(0.0, false);

  Eigen::MatrixXd out(times.size(), n);
  std::size_t q = 0;
  auto record = [&](long step) {
    while (q < times.size() && times[q] <= step * dt + 0.5 * dt) {
      for (int k = 0; k < n; ++k) out(q, k) = Y[k];
      check_order(out, static_cast<int>(q), false);
      if (cfg.wall && out(q, 0) > wall(times[q]) + 1e-12) throw std::logic_error("particle crossed the wall");
      ++q;
    }
  };
  record(0);
  for (long s = 1; s <= steps && q < times.size(); ++s) {
    for (int k = 0; k < n; ++k) z[k] += sd * normal(rng[k]);
    reflect(s * dt, true);
    record(s);
  }
  return out;
}

Eigen::MatrixXd simulate_tasep(const ModelConfig& cfg, std::uint64_t run, const std::vector<double>& times) {
  check_times(cfg, times);
  const int n = particles(cfg);
  std::vector<std::mt19937_64> rng;
  std::exponential_distribution<double> expo(1.0);
  std::vector<long> x(n);
  std::vector<double> ring(n);
  for (int k = 0; k < n; ++k) {
    rng.push_back(substream(cfg.seed, run, k + 1));
    x[k] = cfg.y.lattice(k + 1);
    ring[k] = expo(rng[k]);
  }
  Eigen::MatrixXd out(times.size(), n);
  for (std::size_t q = 0; q < times.size(); ++q) {
    for (;;) {
      int k = static_cast<int>(std::min_element(ring.begin(), ring.end()) - ring.begin());
      double s = ring[k];
      if (s > times[q]) break;
      long blocker = k > 0 ? x[k - 1] : (cfg.wall ? cfg.wall->lattice_at(s) : std::numeric_limits<long>::max());
      if (x[k] + 1 < blocker) ++x[k];
      ring[k] = s + expo(rng[k]);
    }
    for (int k = 0; k < n; ++k) out(q, k) = static_cast<double>(x[k]);
    check_order(out, static_cast<int>(q), true);
    if (cfg.wall && out(q, 0) >= cfg.wall->lattice_at(times[q])) throw std::logic_error("particle reached the wall");
  }
  return out;
}

Eigen::MatrixXd simulate_push_tasep(const ModelConfig& cfg, std::uint64_t run, const std::vector<double>& times) {
  check_times(cfg, times);
  const int n = particles(cfg);
  std::vector<std::mt19937_64> rng;
  std::exponential_distribution<double> expo(1.0);
  std::vector<long> x(n);
  std::vector<double> ring(n);
  for (int k = 0; k < n; ++k) {
    rng.push_back(substream(cfg.seed, run, k + 1));
    x[k] = cfg.y.lattice(k + 1);
    ring[k] = expo(rng[k]);
  }
  Eigen::MatrixXd out(times.size(), n);
  for (std::size_t q = 0; q < times.size(); ++q) {
    for (;;) {
      int k = static_cast<int>(std::min_element(ring.begin(), ring.end()) - ring.begin());
      double s = ring[k];
      if (s > times[q]) break;
      --x[k];
      for (int j = k + 1; j < n && x[j] >= x[j - 1]; ++j) x[j] = x[j - 1] - 1;
      ring[k] = s + expo(rng[k]);
    }
    for (int k = 0; k < n; ++k) out(q, k) = static_cast<double>(x[k]);
    check_order(out, static_cast<int>(q), true);
  }
  return out;
}

namespace {

enum class Update { Parallel, Blocking, Pushing };

Eigen::MatrixXd simulate_discrete(const ModelConfig& cfg, std::uint64_t run, const std::vector<double>& times,
                                  Update mode) {
  check_times(cfg, times);
  const int n = particles(cfg);
  std::vector<std::mt19937_64> rng;
  std::vector<long> x(n), old(n);
  for (int k = 0; k < n; ++k) {
    rng.push_back(substream(cfg.seed, run, k + 1));
    x[k] = cfg.y.lattice(k + 1);
  }
  const double p = cfg.p_or_q;
  Eigen::MatrixXd out(times.size(), n);
  long now = 0;
  std::vector<char> coin(n);
  for (std::size_t q = 0; q < times.size(); ++q) {
    long target = static_cast<long>(std::floor(times[q] + 1e-9));
    for (; now < target; ++now) {
      for (int k = 0; k < n; ++k) coin[k] = uniform01(rng[k]) < p;
      old = x;
      for (int k = 0; k < n; ++k) {
        switch (mode) {
          case Update::Parallel:
            if (coin[k] && !(k > 0 && old[k - 1] == old[k] + 1)) x[k] = old[k] + 1;
            break;
          case Update::Blocking:
            if (coin[k] && !(k > 0 && x[k - 1] == old[k] + 1)) x[k] = old[k] + 1;
            break;
          case Update::Pushing:
            if (coin[k]) x[k] = old[k] - 1;
            if (k > 0 && x[k] >= x[k - 1]) x[k] = x[k - 1] - 1;
            break;
        }
      }
    }
    for (int k = 0; k < n; ++k) out(q, k) = static_cast<double>(x[k]);
    check_order(out, static_cast<int>(q), true);
  }
  return out;
}

}  // namespace

Eigen::MatrixXd simulate_parallel(const ModelConfig& cfg, std::uint64_t run, const std::vector<double>& times) {
  return simulate_discrete(cfg, run, times, Update::Parallel);
}
Eigen::MatrixXd simulate_blocking(const ModelConfig& cfg, std::uint64_t run, const std::vector<double>& times) {
  return simulate_discrete(cfg, run, times, Update::Blocking);
}
Eigen::MatrixXd simulate_pushing(const ModelConfig& cfg, std::uint64_t run, const std::vector<double>& times) {
  return simulate_discrete(cfg, run, times, Update::Pushing);
}

Eigen::MatrixXd simulate(const ModelConfig& cfg, std::uint64_t run, const std::vector<double>& times) {
  switch (cfg.model) {
    case Model::RBM: return simulate_rbm(cfg, run, times);
    case Model::TASEP: return simulate_tasep(cfg, run, times);
    case Model::PushTASEP: return simulate_push_tasep(cfg, run, times);
    case Model::Parallel: return simulate_parallel(cfg, run, times);
    case Model::Blocking: return simulate_blocking(cfg, run, times);
    case Model::Pushing: return simulate_pushing(cfg, run, times);
  }
  throw std::invalid_argument("unknown model");
}

int default_threads() {
  unsigned h = std::thread::hardware_concurrency();
  return h ? static_cast<int>(h) : 1;
}

std::vector<double> sample_level(const ModelConfig& cfg_in, int n, double t, long runs, int threads) {
  validate(cfg_in);
  if (n < 1 || n > cfg_in.y.size()) throw std::invalid_argument("level outside the simulated particles");
  ModelConfig cfg = cfg_in;
  // Level n never feels particles behind it, so simulating 1..n is exact.
  cfg.n_max = n;
  if (runs < 1) throw std::invalid_argument("runs must be positive");
  std::vector<double> out(runs);
  std::vector<double> times{t};
  if (threads <= 0) threads = default_threads();
  threads = static_cast<int>(std::min<long>(threads, runs));
  auto work = [&](int w) {
    for (long r = w; r < runs; r += threads) out[r] = simulate(cfg, r, times)(0, n - 1);
  };
  if (threads == 1) {
    work(0);
  } else {
    std::vector<std::thread> pool;
    std::exception_ptr err;
    std::mutex m;
    for (int w = 0; w < threads; ++w)
      pool.emplace_back([&, w] {
        try {
          work(w);
        } catch (...) {
          std::lock_guard<std::mutex> lock(m);
          err = std::current_exception();
        }
      });
    for (auto& th : pool) th.join();
    if (err) std::rethrow_exception(err);
  }
  return out;
}

EnsembleCDF empirical_cdf(const std::vector<double>& samples, int n, double t, const std::vector<double>& a_grid) {
  if (samples.size() < 2) throw std::invalid_argument("empirical_cdf needs at least two runs");
  std::vector<double> sorted = samples;
  std::sort(sorted.begin(), sorted.end());
  EnsembleCDF e;
  e.a = a_grid;
  e.runs = static_cast<long>(samples.size());
  e.n = n;
  e.t = t;
  for (double a : a_grid) {
    long above = sorted.end() - std::upper_bound(sorted.begin(), sorted.end(), a);
    double F = static_cast<double>(above) / e.runs;
    e.F.push_back(F);
    e.stderr_.push_back(std::sqrt(F * (1 - F) / e.runs));
  }
  return e;
}

EnsembleCDF empirical_cdf(const ModelConfig& cfg, int n, double t, const std::vector<double>& a_grid, long runs,
                          int threads) {
  return empirical_cdf(sample_level(cfg, n, t, runs, threads), n, t, a_grid);
}

}  // namespace kpz
