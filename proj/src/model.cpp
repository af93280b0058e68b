#include "kpzlab/model.hpp"

#include <cmath>
#include <stdexcept>

namespace kpz {

std::string_view model_name(Model m) {
  switch (m) {
    case Model::RBM: return "rbm";
    case Model::TASEP: return "tasep";
    case Model::PushTASEP: return "push-tasep";
    case Model::Parallel: return "parallel";
    case Model::Blocking: return "blocking";
    case Model::Pushing: return "pushing";
  }
  return "?";
}

Model parse_model(std::string_view name) {
  for (Model m : {Model::RBM, Model::TASEP, Model::PushTASEP, Model::Parallel, Model::Blocking,
                  Model::Pushing})
    if (name == model_name(m)) return m;
  if (name == "push" || name == "pushtasep") return Model::PushTASEP;
  throw std::invalid_argument("unknown model '" + std::string(name) +
                              "' (expected rbm, tasep, push-tasep, parallel, blocking, pushing)");
}

InitialData InitialData::step(int n) {
  InitialData d;
  for (int k = 1; k <= n; ++k) d.y.push_back(-k);
  return d;
}

InitialData InitialData::packed(int n, double value) {
  InitialData d;
  d.y.assign(n, value);
  return d;
}

// Dense block in front, density one half behind it.
InitialData InitialData::shock(int n) {
  InitialData d;
  int front = (n + 1) / 2;
  for (int k = 1; k <= n; ++k) d.y.push_back(k <= front ? -k : -front - 2 * (k - front));
  return d;
}

InitialData InitialData::from(std::vector<double> y) {
  InitialData d;
  d.y = std::move(y);
  return d;
}

void validate(const InitialData& d, Model m) {
  if (d.y.empty()) throw std::invalid_argument("initial data is empty");
  for (std::size_t k = 0; k < d.y.size(); ++k) {
    if (!std::isfinite(d.y[k])) throw std::invalid_argument("initial data must be finite");
    if (is_lattice(m) && d.y[k] != std::floor(d.y[k]))
      throw std::invalid_argument("lattice initial data must be integer valued");
    if (k == 0) continue;
    if (is_lattice(m) && !(d.y[k] < d.y[k - 1]))
      throw std::invalid_argument("lattice initial data must be strictly decreasing");
    if (!is_lattice(m) && d.y[k] > d.y[k - 1])
      throw std::invalid_argument("initial data must be non-increasing");
  }
}

}  // namespace kpz
