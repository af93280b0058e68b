#include "kpzlab/grid_field.hpp"

#include <cmath>
#include <stdexcept>

namespace kpz {

int Axis::index_of(double x) const {
  double f = (x - origin) / spacing;
  int i = static_cast<int>(std::lround(f));
  if (i < 0 || i >= size || std::abs(f - i) > 1e-9)
    throw std::out_of_range("coordinate is not a node of the axis");
  return i;
}

Axis Axis::discrete(long origin, int size) {
  return {static_cast<double>(origin), 1.0, size, AxisKind::Discrete};
}

Axis Axis::continuous(double origin, double spacing, int size) {
  if (!(spacing > 0)) throw std::invalid_argument("axis spacing must be positive");
  return {origin, spacing, size, AxisKind::Continuous};
}

bool IndexBox::contains(Index3 p) const {
  for (int k = 0; k < 3; ++k)
    if (p[k] < lo[k] || p[k] > hi[k]) return false;
  return true;
}

GridField::GridField(Axis t, Axis a, Axis n) : axes_{t, a, n} {
  for (const Axis& ax : axes_) {
    if (ax.size < 1) throw std::invalid_argument("axis must have at least one node");
    if (!(ax.spacing > 0)) throw std::invalid_argument("axis spacing must be positive");
    if (ax.kind == AxisKind::Discrete && ax.spacing != 1.0)
      throw std::invalid_argument("discrete axes have unit spacing");
  }
  long total = static_cast<long>(t.size) * a.size * n.size;
  ch_[0] = Eigen::ArrayXd::Zero(total);
  mask_ = Eigen::Array<unsigned char, Eigen::Dynamic, 1>::Ones(total);
}

IndexBox GridField::box() const {
  return {{0, 0, 0}, {axes_[0].size - 1, axes_[1].size - 1, axes_[2].size - 1}};
}

long GridField::flat(Index3 p) const {
  if (!contains(p)) throw std::out_of_range("grid index out of range");
  return (static_cast<long>(p.t) * axes_[1].size + p.a) * axes_[2].size + p.n;
}

bool GridField::contains(Index3 p) const {
  return p.t >= 0 && p.a >= 0 && p.n >= 0 && p.t < axes_[0].size && p.a < axes_[1].size &&
         p.n < axes_[2].size;
}

void GridField::enable(Channel c) {
  auto& v = ch_[static_cast<int>(c)];
  if (v.size() == 0) v = Eigen::ArrayXd::Zero(ch_[0].size());
}

}  // namespace kpz
