#include "cli_common.hpp"

#include <cmath>
#include <cstdio>
#include <sstream>
#include <stdexcept>

namespace cli {

using kpz::io::json;

namespace {

std::string scalar_text(const json& v) {
  if (v.is_string()) return v.get<std::string>();
  if (v.is_number_integer()) return std::to_string(v.get<long long>());
  if (v.is_number_unsigned()) return std::to_string(v.get<unsigned long long>());
  if (v.is_number_float()) {
    std::ostringstream s;
    s.precision(17);
    s << v.get<double>();
    return s.str();
  }
  throw std::invalid_argument("config values must be strings, numbers, booleans or arrays of those");
}

}  // namespace

std::vector<std::string> expand_config(int argc, char** argv) {
  std::vector<std::string> args(argv, argv + argc);
  std::string file;
  for (std::size_t i = 1; i < args.size(); ++i) {
    if (args[i] == "--config" && i + 1 < args.size()) file = args[i + 1];
    else if (args[i].rfind("--config=", 0) == 0) file = args[i].substr(9);
  }
  if (file.empty()) return args;
  json cfg = kpz::io::read_json(file);
  if (!cfg.is_object()) throw std::invalid_argument(file + ": config must be a JSON object of option names");

  std::vector<std::string> extra;
  for (auto& [key, v] : cfg.items()) {
    if (key == "config") continue;
    std::string flag = "--" + key;
    if (v.is_boolean()) {
      if (v.get<bool>()) extra.push_back(flag);
    } else if (v.is_array()) {
      std::string joined;
      for (const auto& e : v) joined += (joined.empty() ? "" : ",") + scalar_text(e);
      extra.push_back(flag);
      extra.push_back(joined);
    } else if (!v.is_null()) {
      extra.push_back(flag);
      extra.push_back(scalar_text(v));
    }
  }
  // the first non-option argument is the subcommand
  std::size_t at = 1;
  while (at < args.size() && args[at].rfind("-", 0) == 0) at += args[at] == "--config" ? 2 : 1;
  if (at >= args.size()) throw std::invalid_argument("a subcommand is required before the config options apply");
  args.insert(args.begin() + static_cast<long>(at) + 1, extra.begin(), extra.end());
  return args;
}

void add_model_options(CLI::App* sub, ModelArgs& m) {
  sub->add_option("--model", m.model, "rbm, tasep, push-tasep, parallel, blocking or pushing")->capture_default_str();
  sub->add_option("--y", m.y, "initial data: step, packed, shock or a comma list y_1,y_2,...")->capture_default_str();
  sub->add_option("--N", m.N, "number of particles for step/packed/shock data");
  sub->add_option("--p", m.p, "p for parallel/blocking, jump probability q for pushing")->capture_default_str();
  sub->add_option("--wall-slope", m.wall_slope, "RBM wall b(t) = slope * t");
  sub->add_option("--wall-jumps", m.wall_jumps, "TASEP wall jump times s_1,s_2,...");
  sub->add_option("--wall-start", m.wall_start, "TASEP wall position at t = 0")->capture_default_str();
}

void add_grid_options(CLI::App* sub, GridArgs& g, bool levels) {
  sub->add_option("--t", g.t, "times: lo:hi:step, a list, or one value")->required();
  sub->add_option("--a", g.a, "positions: lo:hi:step, a list, or one value")->required();
  if (levels) {
    sub->add_option("--n-lo", g.n_lo, "lowest level")->capture_default_str();
    sub->add_option("--n-hi", g.n_hi, "highest level")->capture_default_str();
  }
}

kpz::Model model_of(const ModelArgs& m) { return kpz::parse_model(m.model); }

kpz::InitialData initial_data(const ModelArgs& m, int levels) {
  kpz::Model model = model_of(m);
  int N = m.N > 0 ? m.N : levels;
  if (N < levels) throw std::invalid_argument("--N must cover the highest requested level");
  kpz::InitialData y;
  if (m.y == "step") y = kpz::InitialData::step(N);
  else if (m.y == "packed") y = kpz::InitialData::packed(N);
  else if (m.y == "shock") y = kpz::InitialData::shock(N);
  else y = kpz::InitialData::from(parse_values(m.y));
  if (y.size() < levels) throw std::invalid_argument("initial data has fewer particles than the highest level");
  kpz::validate(y, model);
  return y;
}

std::optional<kpz::Wall> wall_of(const ModelArgs& m, double horizon) {
  kpz::Model model = model_of(m);
  if (!std::isnan(m.wall_slope)) {
    if (model != kpz::Model::RBM) throw std::invalid_argument("--wall-slope applies to the rbm model");
    return kpz::Wall::linear(m.wall_slope, horizon);
  }
  if (!m.wall_jumps.empty()) {
    if (model != kpz::Model::TASEP) throw std::invalid_argument("--wall-jumps applies to the tasep model");
    return kpz::Wall::jump_times(parse_values(m.wall_jumps), m.wall_start);
  }
  return std::nullopt;
}

std::vector<double> parse_values(const std::string& spec) {
  if (spec.empty()) throw std::invalid_argument("empty value list");
  auto num = [&](const std::string& s) {
    std::size_t used = 0;
    double v = 0;
    try {
      v = std::stod(s, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used != s.size() || s.empty()) throw std::invalid_argument("'" + s + "' is not a number (in '" + spec + "')");
    return v;
  };
  std::vector<double> out;
  if (spec.find(':') != std::string::npos) {
    std::vector<std::string> parts;
    std::stringstream ss(spec);
    for (std::string s; std::getline(ss, s, ':');) parts.push_back(s);
    if (parts.size() != 3) throw std::invalid_argument("ranges are written lo:hi:step, got '" + spec + "'");
    double lo = num(parts[0]), hi = num(parts[1]), st = num(parts[2]);
    if (!(st > 0) || hi < lo) throw std::invalid_argument("range '" + spec + "' needs lo <= hi and step > 0");
    long k = std::lround(std::floor((hi - lo) / st + 1e-9));
    for (long i = 0; i <= k; ++i) out.push_back(lo + i * st);
    return out;
  }
  std::stringstream ss(spec);
  for (std::string s; std::getline(ss, s, ',');) out.push_back(num(s));
  return out;
}

kpz::Axis make_axis(const std::vector<double>& v, kpz::AxisKind kind, const char* what) {
  if (v.empty()) throw std::invalid_argument(std::string("--") + what + " is empty");
  if (kind == kpz::AxisKind::Discrete) {
    for (std::size_t i = 0; i < v.size(); ++i)
      if (v[i] != std::round(v[i]) || (i > 0 && v[i] != v[i - 1] + 1))
        throw std::invalid_argument(std::string("--") + what + " must be consecutive integers for this model");
    return kpz::Axis::discrete(std::lround(v[0]), static_cast<int>(v.size()));
  }
  double h = v.size() > 1 ? v[1] - v[0] : 1.0;
  for (std::size_t i = 1; i < v.size(); ++i)
    if (std::abs(v[i] - v[i - 1] - h) > 1e-9 * std::max(1.0, std::abs(h)) || !(h > 0))
      throw std::invalid_argument(std::string("--") + what + " must be increasing with uniform spacing");
  return kpz::Axis::continuous(v[0], h, static_cast<int>(v.size()));
}

kpz::AxisKind t_kind(kpz::Model m) {
  return kpz::is_discrete_time(m) ? kpz::AxisKind::Discrete : kpz::AxisKind::Continuous;
}

kpz::AxisKind a_kind(kpz::Model m) {
  return m == kpz::Model::RBM ? kpz::AxisKind::Continuous : kpz::AxisKind::Discrete;
}

json effective_config(const CLI::App* sub) {
  json j = json::object();
  for (const CLI::Option* opt : sub->get_options()) {
    if (opt->get_lnames().empty() || opt->count() == 0) continue;
    const std::string& name = opt->get_lnames().front();
    if (name == "help" || name == "config" || name == "out") continue;
    if (opt->get_type_size() == 0) {
      j[name] = true;
      continue;
    }
    auto res = opt->results();
    j[name] = res.empty() ? "" : res.back();
  }
  return j;
}

void Printer::check(const std::string& what, double value, double tol) {
  bool pass = value <= tol;
  ok = ok && pass;
  std::printf("%-52s %12.4e  (tol %.1e)  %s\n", what.c_str(), value, tol, pass ? "ok" : "FAILED");
}

void Printer::info(const std::string& what, const std::string& value) {
  std::printf("%-52s %s\n", what.c_str(), value.c_str());
}

}  // namespace cli
