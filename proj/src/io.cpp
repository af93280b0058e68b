#include "kpzlab/io.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <iomanip>
#include <limits>
#include <sstream>
#include <stdexcept>

namespace kpz::io {

namespace {

std::ofstream open_out(const fs::path& file) {
  if (file.has_parent_path()) fs::create_directories(file.parent_path());
  std::ofstream out(file);
  if (!out) throw std::runtime_error("cannot write " + file.string());
  out << std::setprecision(17);
  return out;
}

const char* kind_name(AxisKind k) { return k == AxisKind::Continuous ? "continuous" : "discrete"; }

json axis_to_json(const Axis& a) {
  return {{"origin", a.origin}, {"spacing", a.spacing}, {"size", a.size}, {"kind", kind_name(a.kind)}};
}

Axis axis_from_json(const json& j) {
  std::string kind = j.at("kind");
  if (kind == "discrete") return Axis::discrete(std::lround(j.at("origin").get<double>()), j.at("size"));
  if (kind == "continuous") return Axis::continuous(j.at("origin"), j.at("spacing"), j.at("size"));
  throw std::invalid_argument("unknown axis kind '" + kind + "'");
}

constexpr std::pair<Channel, const char*> kChannels[] = {
    {Channel::Dt, "dt"}, {Channel::Da, "da"}, {Channel::Daa, "daa"}};

std::string esc(const std::string& s) {
  std::string o;
  for (char c : s) {
    switch (c) {
      case '&': o += "&amp;"; break;
      case '<': o += "&lt;"; break;
      case '>': o += "&gt;"; break;
      case '"': o += "&quot;"; break;
      default: o += c;
    }
  }
  return o;
}

std::string num(double v) {
  std::ostringstream s;
  s << std::setprecision(4) << v;
  return s.str();
}

}  // namespace

fs::path default_output_dir() {
  const char* env = std::getenv(kOutputDirEnv);
  if (env && *env) return fs::path(env);
  return fs::path("kpzlab_out");
}

void write_field_csv(const fs::path& file, const GridField& F) {
  auto out = open_out(file);
  out << "t,a,n,F\n";
  F.for_each([&](Index3 p) {
    if (!F.valid(p)) return;
    auto c = F.coords(p);
    out << c[0] << ',' << c[1] << ',' << c[2] << ',' << F(p) << '\n';
  });
}

void write_cdf_csv(const fs::path& file, const EnsembleCDF& cdf) {
  auto out = open_out(file);
  out << "a,F_hat,stderr\n";
  for (std::size_t i = 0; i < cdf.a.size(); ++i) out << cdf.a[i] << ',' << cdf.F[i] << ',' << cdf.stderr_[i] << '\n';
}

void write_residual_csv(const fs::path& file, const ResidualField& r) {
  auto out = open_out(file);
  out << "t,a,n,residual,normalized\n";
  r.raw.for_each([&](Index3 p) {
    if (!r.raw.valid(p)) return;
    auto c = r.raw.coords(p);
    out << c[0] << ',' << c[1] << ',' << c[2] << ',' << r.raw(p) << ',';
    if (r.normalized.valid(p)) out << r.normalized(p);
    out << '\n';
  });
}

void write_trajectories_csv(const fs::path& file, const std::vector<Eigen::MatrixXd>& runs,
                            const std::vector<double>& times) {
  auto out = open_out(file);
  out << "run,particle,t,position\n";
  for (std::size_t r = 0; r < runs.size(); ++r) {
    const auto& m = runs[r];
    if (m.rows() != static_cast<Eigen::Index>(times.size()))
      throw std::invalid_argument("trajectory rows must match the query times");
    for (Eigen::Index k = 0; k < m.cols(); ++k)
      for (Eigen::Index i = 0; i < m.rows(); ++i) out << r << ',' << k + 1 << ',' << times[i] << ',' << m(i, k) << '\n';
  }
}

void write_rate_csv(const fs::path& file, const RateReport& r) {
  auto out = open_out(file);
  out << "eps,residual,target_residual,ratio\n";
  for (const RateRow& row : r.rows)
    out << row.eps << ',' << row.residual << ',' << row.target_residual << ',' << row.ratio << '\n';
}

json field_to_json(const GridField& F) {
  json j;
  j["axes"] = {axis_to_json(F.axis(0)), axis_to_json(F.axis(1)), axis_to_json(F.axis(2))};
  std::vector<double> values;
  std::vector<int> mask;
  F.for_each([&](Index3 p) {
    values.push_back(F(p));
    mask.push_back(F.valid(p) ? 1 : 0);
  });
  j["values"] = values;
  j["valid"] = mask;
  for (auto [ch, name] : kChannels) {
    if (!F.has(ch)) continue;
    std::vector<double> v;
    F.for_each([&](Index3 p) { v.push_back(F.get(ch, p)); });
    j["channels"][name] = v;
  }
  return j;
}

GridField field_from_json(const json& j) {
  const json& ax = j.at("axes");
  if (!ax.is_array() || ax.size() != 3) throw std::invalid_argument("field needs three axes");
  GridField F(axis_from_json(ax[0]), axis_from_json(ax[1]), axis_from_json(ax[2]));
  auto values = j.at("values").get<std::vector<double>>();
  auto mask = j.at("valid").get<std::vector<int>>();
  auto shape = F.shape();
  const std::size_t total = static_cast<std::size_t>(shape.t) * shape.a * shape.n;
  if (values.size() != total || mask.size() != total) throw std::invalid_argument("field size does not match its axes");
  std::size_t k = 0;
  F.for_each([&](Index3 p) {
    F(p) = values[k];
    F.set_valid(p, mask[k] != 0);
    ++k;
  });
  if (j.contains("channels")) {
    for (auto [ch, name] : kChannels) {
      if (!j["channels"].contains(name)) continue;
      auto v = j["channels"][name].get<std::vector<double>>();
      if (v.size() != total) throw std::invalid_argument("channel size does not match the field");
      F.enable(ch);
      k = 0;
      F.for_each([&](Index3 p) { F.set(ch, p, v[k++]); });
    }
  }
  return F;
}

void write_json(const fs::path& file, const json& j) {
  auto out = open_out(file);
  out << j.dump(2) << '\n';
}

json read_json(const fs::path& file) {
  std::ifstream in(file);
  if (!in) throw std::runtime_error("cannot read " + file.string());
  try {
    return json::parse(in);
  } catch (const json::parse_error& e) {
    throw std::invalid_argument(file.string() + ": " + e.what());
  }
}

json cdf_to_json(const EnsembleCDF& cdf) {
  return {{"n", cdf.n}, {"t", cdf.t}, {"runs", cdf.runs}, {"a", cdf.a}, {"F_hat", cdf.F}, {"stderr", cdf.stderr_}};
}

json rate_to_json(const RateReport& r) {
  json rows = json::array();
  for (const RateRow& row : r.rows)
    rows.push_back({{"eps", row.eps},
                    {"residual", row.residual},
                    {"target_residual", row.target_residual},
                    {"ratio", std::isfinite(row.ratio) ? json(row.ratio) : json(nullptr)}});
  return {{"map", scaling_map_name(r.map)},
          {"exponent", std::isfinite(r.exponent) ? json(r.exponent) : json("inf")},
          {"expected_order", r.expected_order},
          {"coefficient", r.coefficient},
          {"target_vanishes", r.target_vanishes},
          {"faster_than_leading", r.faster_than_leading},
          {"rows", rows}};
}

json manifest_to_json(const Manifest& m) {
  json j;
  j["schema"] = kManifestSchema;
  j["command"] = m.command;
  j["config"] = m.config;
  j["seed"] = m.seed ? json(*m.seed) : json(nullptr);
  j["tolerances"] = m.tolerances;
  j["certificates"] = m.certificates;
  j["results"] = m.results;
  j["artifacts"] = m.artifacts;
  j["pass"] = m.pass;
  return j;
}

void write_manifest(const fs::path& file, const Manifest& m) { write_json(file, manifest_to_json(m)); }

std::string render_svg(const Plot& plot) {
  const double W = plot.width, H = plot.height;
  const double left = 60, right = 140, top = 36, bottom = 48;
  double x0 = std::numeric_limits<double>::infinity(), x1 = -x0, y0 = x0, y1 = -x0;
  auto grow = [](double& lo, double& hi, double v) {
    if (!std::isfinite(v)) return;
    lo = std::min(lo, v);
    hi = std::max(hi, v);
  };
  for (const auto& s : plot.series) {
    for (double v : s.x) grow(x0, x1, v);
    for (double v : s.y) grow(y0, y1, v);
    for (double v : s.lo) grow(y0, y1, v);
    for (double v : s.hi) grow(y0, y1, v);
  }
  if (!(x0 <= x1)) x0 = 0, x1 = 1;
  if (!(y0 <= y1)) y0 = 0, y1 = 1;
  if (x1 == x0) x0 -= 0.5, x1 += 0.5;
  if (y1 == y0) y0 -= 0.5, y1 += 0.5;
  const double pw = W - left - right, ph = H - top - bottom;
  auto X = [&](double v) { return left + (v - x0) / (x1 - x0) * pw; };
  auto Y = [&](double v) { return top + (1 - (v - y0) / (y1 - y0)) * ph; };
  static const char* colors[] = {"#1f77b4", "#d62728", "#2ca02c", "#ff7f0e", "#9467bd", "#8c564b"};

  std::ostringstream o;
  o << std::setprecision(6);
  o << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << W << "\" height=\"" << H << "\" viewBox=\"0 0 " << W
    << ' ' << H << "\" font-family=\"sans-serif\" font-size=\"12\">\n";
  o << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  o << "<text x=\"" << W / 2 << "\" y=\"20\" text-anchor=\"middle\" font-size=\"14\">" << esc(plot.title) << "</text>\n";
  o << "<rect x=\"" << left << "\" y=\"" << top << "\" width=\"" << pw << "\" height=\"" << ph
    << "\" fill=\"none\" stroke=\"#444\"/>\n";
  for (int k = 0; k <= 4; ++k) {
    double xv = x0 + (x1 - x0) * k / 4, yv = y0 + (y1 - y0) * k / 4;
    o << "<text x=\"" << X(xv) << "\" y=\"" << top + ph + 16 << "\" text-anchor=\"middle\">" << num(xv) << "</text>\n";
    o << "<text x=\"" << left - 6 << "\" y=\"" << Y(yv) + 4 << "\" text-anchor=\"end\">" << num(yv) << "</text>\n";
  }
  o << "<text x=\"" << left + pw / 2 << "\" y=\"" << H - 10 << "\" text-anchor=\"middle\">" << esc(plot.xlabel)
    << "</text>\n";
  o << "<text x=\"14\" y=\"" << top + ph / 2 << "\" text-anchor=\"middle\" transform=\"rotate(-90 14 " << top + ph / 2
    << ")\">" << esc(plot.ylabel) << "</text>\n";

  for (std::size_t i = 0; i < plot.series.size(); ++i) {
    const auto& s = plot.series[i];
    const char* col = colors[i % 6];
    if (s.x.size() != s.y.size()) throw std::invalid_argument("series '" + s.label + "' has mismatched x and y");
    if (!s.lo.empty()) {
      if (s.lo.size() != s.x.size() || s.hi.size() != s.x.size())
        throw std::invalid_argument("band of series '" + s.label + "' has the wrong length");
      o << "<polygon fill=\"" << col << "\" fill-opacity=\"0.2\" stroke=\"none\" points=\"";
      for (std::size_t k = 0; k < s.x.size(); ++k) o << X(s.x[k]) << ',' << Y(s.hi[k]) << ' ';
      for (std::size_t k = s.x.size(); k-- > 0;) o << X(s.x[k]) << ',' << Y(s.lo[k]) << ' ';
      o << "\"/>\n";
    }
    o << "<polyline fill=\"none\" stroke=\"" << col << "\" stroke-width=\"1.5\" points=\"";
    for (std::size_t k = 0; k < s.x.size(); ++k) {
      if (!std::isfinite(s.y[k])) continue;
      if (s.step && k > 0) o << X(s.x[k]) << ',' << Y(s.y[k - 1]) << ' ';
      o << X(s.x[k]) << ',' << Y(s.y[k]) << ' ';
    }
    o << "\"/>\n";
    double ly = top + 14 + 18 * i;
    o << "<line x1=\"" << W - right + 10 << "\" y1=\"" << ly << "\" x2=\"" << W - right + 30 << "\" y2=\"" << ly
      << "\" stroke=\"" << col << "\" stroke-width=\"2\"/>\n";
    o << "<text x=\"" << W - right + 34 << "\" y=\"" << ly + 4 << "\">" << esc(s.label) << "</text>\n";
  }
  o << "</svg>\n";
  return o.str();
}

void write_svg(const fs::path& file, const Plot& plot) {
  auto out = open_out(file);
  out << render_svg(plot);
}

}  // namespace kpz::io
