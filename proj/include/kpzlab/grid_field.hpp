#pragma once

#include <Eigen/Dense>
#include <array>
#include <string>

namespace kpz {

enum class AxisKind { Continuous, Discrete };

struct Axis {
  double origin = 0.0;
  double spacing = 1.0;
  int size = 1;
  AxisKind kind = AxisKind::Discrete;

  double at(int i) const { return origin + spacing * i; }
  int index_of(double x) const;

  static Axis discrete(long origin, int size);
  static Axis continuous(double origin, double spacing, int size);
};

struct Index3 {
  int t = 0, a = 0, n = 0;

  int& operator[](int k) { return k == 0 ? t : (k == 1 ? a : n); }
  int operator[](int k) const { return k == 0 ? t : (k == 1 ? a : n); }
  friend Index3 operator+(Index3 x, Index3 y) { return {x.t + y.t, x.a + y.a, x.n + y.n}; }
  friend Index3 operator-(Index3 x, Index3 y) { return {x.t - y.t, x.a - y.a, x.n - y.n}; }
  friend bool operator==(Index3, Index3) = default;
};

struct IndexBox {
  Index3 lo, hi;  // inclusive
  bool contains(Index3 p) const;
};

// Optional analytic derivative channels travel with the values so that
// Hirota evaluations can skip finite differencing along t and a.
enum class Channel { Value = 0, Dt = 1, Da = 2, Daa = 3 };

class GridField {
 public:
  GridField() = default;
  GridField(Axis t, Axis a, Axis n);

  const Axis& axis(int k) const { return axes_[k]; }
  Index3 shape() const { return {axes_[0].size, axes_[1].size, axes_[2].size}; }
  IndexBox box() const;
  long flat(Index3 p) const;
  bool contains(Index3 p) const;

  double operator()(Index3 p) const { return ch_[0](flat(p)); }
  double& operator()(Index3 p) { return ch_[0](flat(p)); }

  bool has(Channel c) const { return ch_[static_cast<int>(c)].size() > 0; }
  void enable(Channel c);
  double get(Channel c, Index3 p) const { return ch_[static_cast<int>(c)](flat(p)); }
  void set(Channel c, Index3 p, double v) { ch_[static_cast<int>(c)](flat(p)) = v; }

  // Points whose value could not be produced stay in the array as 0 and are
  // flagged here; NaN never enters the values.
  bool valid(Index3 p) const { return mask_(flat(p)) != 0; }
  void set_valid(Index3 p, bool v) { mask_(flat(p)) = v ? 1 : 0; }
  long valid_count() const { return mask_.count(); }

  std::array<double, 3> coords(Index3 p) const {
    return {axes_[0].at(p.t), axes_[1].at(p.a), axes_[2].at(p.n)};
  }

  const Eigen::ArrayXd& values() const { return ch_[0]; }

  template <class Fn>
  void for_each(Fn&& fn) const {
    for (int i = 0; i < axes_[0].size; ++i)
      for (int j = 0; j < axes_[1].size; ++j)
        for (int k = 0; k < axes_[2].size; ++k) fn(Index3{i, j, k});
  }

 private:
  std::array<Axis, 3> axes_{};
  std::array<Eigen::ArrayXd, 4> ch_{};
  Eigen::Array<unsigned char, Eigen::Dynamic, 1> mask_;
};

}  // namespace kpz
