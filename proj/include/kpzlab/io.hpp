#pragma once

#include <Eigen/Dense>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"
#include "kpzlab/grid_field.hpp"
#include "kpzlab/hirota.hpp"
#include "kpzlab/mc_models.hpp"
#include "kpzlab/scaling.hpp"

namespace kpz::io {

using nlohmann::json;
namespace fs = std::filesystem;

// $KPZLAB_OUT if set and non-empty, otherwise ./kpzlab_out.
fs::path default_output_dir();
inline constexpr const char* kOutputDirEnv = "KPZLAB_OUT";

// Only valid points are written.
void write_field_csv(const fs::path& file, const GridField& F);
void write_cdf_csv(const fs::path& file, const EnsembleCDF& cdf);
void write_residual_csv(const fs::path& file, const ResidualField& r);
// One matrix per run, rows indexed like `times`, columns particles 1..N.
void write_trajectories_csv(const fs::path& file, const std::vector<Eigen::MatrixXd>& runs,
                            const std::vector<double>& times);
void write_rate_csv(const fs::path& file, const RateReport& r);

// Lossless field encoding (axes, values, mask and derivative channels).
json field_to_json(const GridField& F);
GridField field_from_json(const json& j);
void write_json(const fs::path& file, const json& j);
json read_json(const fs::path& file);

json cdf_to_json(const EnsembleCDF& cdf);
json rate_to_json(const RateReport& r);

struct Manifest {
  std::string command;
  json config = json::object();
  std::optional<std::uint64_t> seed;
  json tolerances = json::object();
  json certificates = json::object();
  json results = json::object();
  std::vector<std::string> artifacts;
  bool pass = true;
};

inline constexpr int kManifestSchema = 1;
json manifest_to_json(const Manifest& m);
void write_manifest(const fs::path& file, const Manifest& m);

struct PlotSeries {
  std::string label;
  std::vector<double> x, y;
  std::vector<double> lo, hi;  // optional band, same length as x
  bool step = false;
};

struct Plot {
  std::string title, xlabel, ylabel;
  std::vector<PlotSeries> series;
  int width = 640, height = 420;
};

std::string render_svg(const Plot& plot);
void write_svg(const fs::path& file, const Plot& plot);

}  // namespace kpz::io
