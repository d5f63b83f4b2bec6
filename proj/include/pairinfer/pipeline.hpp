#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "pairinfer/analytic.hpp"
#include "pairinfer/dataset.hpp"
#include "pairinfer/inference.hpp"
#include "pairinfer/likelihood.hpp"
#include "pairinfer/simulator.hpp"

namespace pairinfer {

inline constexpr int kManifestSchemaVersion = 1;
inline constexpr const char* kOutputEnvVar = "PAIRINFER_OUT";

struct SurfaceRequest {
  ModelKind kind = ModelKind::nongender;
  GridAxis x;
  GridAxis y;
};

struct RunConfig {
  /// Models to fit, in order. The gendered model needs gendered data.
  std::vector<ModelKind> models{ModelKind::nongender};
  /// Empty means the bundled Mwanza counts.
  std::filesystem::path input;
  std::filesystem::path output_dir = "pairinfer_out";
  std::vector<double> levels{0.67, 0.95};
  FitOptions fit;
  /// Empty means the defaults from default_surfaces().
  std::vector<SurfaceRequest> surfaces;
  bool default_surfaces = true;
  bool profiles = true;
  bool ellipses = true;
  int profile_points = 201;
  int ellipse_points = 100;
  std::optional<ValidationConfig> validation;

  /// Levels in (0, 1), known models, readable input. ConfigError otherwise.
  void validate() const;
};

/// Surfaces drawn when a run asks for none: lambda x tau for the non-gendered
/// model, and both rate pairs of the gendered model.
std::vector<SurfaceRequest> default_surface_requests(ModelKind kind);

/// JSON manifest. Relative paths resolve against the manifest's directory.
/// The output directory from PAIRINFER_OUT wins over the manifest's.
RunConfig parse_manifest(const std::filesystem::path& path);

struct ModelRun {
  ModelKind kind = ModelKind::nongender;
  FitResult fit;
  /// Closed-form column: (lambda_hat, root-solved tau) for the collapsed
  /// model, theta approximations at q = 1/2 for the gendered one.
  std::vector<double> analytical;
  /// Seroincidence column; NaN for the gendered model.
  std::vector<double> cfa;
  InfectionTable infections;
};

struct SurfaceRun {
  std::string file;
  Surface surface;
  std::size_t interior_maxima = 0;
};

struct ProfileRun {
  std::string file;
  ModelKind kind = ModelKind::nongender;
  std::string parameter;
  std::vector<SlicePoint> points;
};

struct EllipseRun {
  std::string file;
  ModelKind kind = ModelKind::nongender;
  std::string x_name;
  std::string y_name;
  bool from_pseudo_inverse = false;
  Ellipse ellipse;
};

struct ResultsBundle {
  ResultsBundle(RunConfig c, Dataset d) : config(std::move(c)), data(std::move(d)) {}

  RunConfig config;
  Dataset data;
  AnalyticEstimate analytic;
  std::vector<ModelRun> models;
  std::vector<SurfaceRun> surfaces;
  std::vector<ProfileRun> profiles;
  std::vector<EllipseRun> ellipses;
  std::vector<std::string> notes;  // ellipses skipped and similar
  std::optional<std::vector<ValidationRecord>> validation;

  bool all_converged() const;
};

/// Loads the data, fits every requested model and evaluates surfaces,
/// profiles, ellipses and the optional validation sweep.
ResultsBundle run_pipeline(const RunConfig& config);

/// Loads `config.input` or the bundled data.
Dataset load_input(const RunConfig& config);

}  // namespace pairinfer
