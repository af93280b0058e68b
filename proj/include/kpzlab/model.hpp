#pragma once

#include <limits>
#include <string>
#include <string_view>
#include <vector>

namespace kpz {

enum class Model { RBM, TASEP, PushTASEP, Parallel, Blocking, Pushing };

std::string_view model_name(Model m);
Model parse_model(std::string_view name);

inline bool is_discrete_time(Model m) {
  return m == Model::Parallel || m == Model::Blocking || m == Model::Pushing;
}
inline bool is_lattice(Model m) { return m != Model::RBM; }

// Particles are labelled 1, 2, ... from the right; y_m = +inf for m < 1.
struct InitialData {
  std::vector<double> y;

  int size() const { return static_cast<int>(y.size()); }
  double at(int m) const {
    if (m < 1) return std::numeric_limits<double>::infinity();
    return y.at(m - 1);
  }
  long lattice(int m) const { return static_cast<long>(y.at(m - 1)); }

  static InitialData step(int n);
  static InitialData packed(int n, double value = 0.0);
  static InitialData shock(int n);
  static InitialData from(std::vector<double> y);
};

void validate(const InitialData& y, Model m);

}  // namespace kpz
