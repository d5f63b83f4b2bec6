#include "pairinfer/pipeline.hpp"

#include <cmath>
#include <cstdlib>
#include <limits>

#include "json.hpp"
#include "pairinfer/error.hpp"
#include "pairinfer/io.hpp"

namespace pairinfer {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

SurfaceRequest request(ModelKind kind, const char* x, const char* y) {
  return {kind, GridAxis::parse(x), GridAxis::parse(y)};
}

// Collapses a multi-time dataset onto its first and last observation for the
// closed-form estimators.
Dataset endpoints(const Dataset& data) {
  if (data.size() == 2) return data;
  const std::size_t last = data.size() - 1;
  if (data.is_gendered()) {
    return Dataset({data.times().front(), data.times()[last]},
                   std::vector<GenderPairCounts>{data.gender_counts(0), data.gender_counts(last)}, data.provenance());
  }
  return Dataset({data.times().front(), data.times()[last]}, std::vector<PairCounts>{data.counts(0), data.counts(last)},
                 data.provenance());
}

template <typename T>
T field(const json& doc, const char* key, const std::string& where) {
  try {
    return doc.at(key).get<T>();
  } catch (const json::exception&) {
    throw ParseError(where + ": field \"" + key + "\" has the wrong type");
  }
}

std::string level_tag(double level) { return fmt6(level); }

std::pair<double, double> profile_range(double estimate, double se) {
  double lo = 0.0;
  double hi = 0.0;
  if (std::isfinite(se) && se > 0.0) {
    lo = std::max(0.0, estimate - 4.0 * se);
    hi = estimate + 4.0 * se;
  } else {
    hi = std::max(3.0 * estimate, 0.01);
  }
  if (!(hi > lo)) hi = lo + 0.01;
  return {lo, hi};
}

// analytic_estimate with each piece allowed to fail on its own; failures
// leave NaN and a note.
AnalyticEstimate closed_forms(const Dataset& data, std::vector<std::string>& notes) {
  try {
    return analytic_estimate(data);
  } catch (const DomainError&) {
  }
  const TwoPointCounts c = TwoPointCounts::from(data);
  AnalyticEstimate out;
  out.lambda_hat.value = kNaN;
  out.cfa.params = {kNaN, kNaN};
  try {
    out.lambda_hat = lambda_hat_closed_form(c);
    out.expansion = phi_hat_binomial(c, out.lambda_hat.value);
    if (out.lambda_hat.value >= 0.0) out.tau_hat_rootsolve = tau_hat_rootsolve(c, out.lambda_hat.value);
  } catch (const Error& e) {
    notes.push_back(std::string("closed-form lambda/tau undefined: ") + e.what());
  }
  try {
    out.phi_first_order = phi_hat_first_order(c);
  } catch (const Error&) {
  }
  try {
    out.cfa = cfa(c);
  } catch (const Error& e) {
    notes.push_back(std::string("seroincidence estimate undefined: ") + e.what());
  }
  return out;
}

ModelRun fit_model(ModelKind kind, const Dataset& data, const Dataset& two_point, const AnalyticEstimate& analytic,
                   const FitOptions& options, const ModelRun* collapsed) {
  ModelRun run;
  run.kind = kind;
  if (kind == ModelKind::nongender) {
    run.fit = fit_nongender(data.marginal(), options);
    run.analytical = {analytic.lambda_hat.value, analytic.tau_hat_rootsolve.value_or(kNaN)};
    run.cfa = {analytic.cfa.params.lambda, analytic.cfa.params.tau};
    run.infections = infections_per_year(nongender_from_vector(run.fit.estimates), data.counts(0));
    return run;
  }
  if (!data.is_gendered()) throw ConfigError("the gendered model needs the IS/SI split in the input");
  run.fit = fit_gender(data, options, collapsed != nullptr ? &collapsed->fit : nullptr);
  try {
    run.analytical = gender_theta_approx(two_point, 0.5, analytic.lambda_hat.value).rates.to_vector();
  } catch (const DomainError&) {
    run.analytical.assign(4, kNaN);
  }
  run.cfa.assign(4, kNaN);
  run.infections = infections_per_year(gender_from_vector(run.fit.estimates), data.gender_counts(0));
  return run;
}

}  // namespace

void RunConfig::validate() const {
  if (models.empty()) throw ConfigError("at least one model must be requested");
  for (double l : levels) {
    if (!(l > 0.0 && l < 1.0)) throw ConfigError("confidence level " + fmt6(l) + " is outside (0, 1)");
  }
  if (levels.empty()) throw ConfigError("at least one confidence level is required");
  if (!input.empty()) {
    std::error_code ec;
    if (!fs::is_regular_file(input, ec)) throw ConfigError("input file not found: " + input.string());
  }
  if (output_dir.empty()) throw ConfigError("output directory must be set");
  if (profile_points < 2) throw ConfigError("profiles need at least two points");
  if (ellipse_points < 8) throw ConfigError("ellipses need at least eight points");
  if (fit.simplex.max_evaluations < 1) throw ConfigError("max evaluations must be positive");
}

std::vector<SurfaceRequest> default_surface_requests(ModelKind kind) {
  if (kind == ModelKind::nongender) return {request(kind, "lambda:0.0005:0.01:101", "tau:0.001:0.3:101")};
  return {request(kind, "lambda_m:0.0005:0.01:61", "lambda_f:0.0005:0.01:61"),
          request(kind, "tau_mf:0.001:0.3:61", "tau_fm:0.001:0.3:61")};
}

RunConfig parse_manifest(const fs::path& path) {
  const std::string where = path.string();
  const std::string text = read_text_file(path);
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ParseError(where + ": malformed JSON: " + e.what());
  }
  if (!doc.is_object()) throw ParseError(where + ": top level must be an object");
  if (!doc.contains("schema_version") || !doc["schema_version"].is_number_integer() ||
      doc["schema_version"].get<int>() != kManifestSchemaVersion) {
    throw ParseError(where + ": schema_version must be " + std::to_string(kManifestSchemaVersion));
  }
  const fs::path base = path.parent_path();
  const auto resolve = [&](const std::string& p) { return fs::path(p).is_absolute() ? fs::path(p) : base / p; };

  RunConfig cfg;
  if (doc.contains("models")) {
    cfg.models.clear();
    for (const auto& m : doc["models"]) {
      if (!m.is_string()) throw ParseError(where + ": models must be strings");
      try {
        cfg.models.push_back(parse_model_kind(m.get<std::string>()));
      } catch (const ConfigError& e) {
        throw ParseError(where + ": models: " + e.what());
      }
    }
  }
  if (doc.contains("input")) cfg.input = resolve(field<std::string>(doc, "input", where));
  if (doc.contains("output")) cfg.output_dir = resolve(field<std::string>(doc, "output", where));
  if (const char* env = std::getenv(kOutputEnvVar); env != nullptr && *env != '\0') cfg.output_dir = env;
  if (doc.contains("levels")) cfg.levels = field<std::vector<double>>(doc, "levels", where);
  if (doc.contains("optimizer")) {
    const json& o = doc["optimizer"];
    const std::string w = where + ": optimizer";
    if (o.contains("max_evals")) cfg.fit.simplex.max_evaluations = field<int>(o, "max_evals", w);
    if (o.contains("x_tolerance")) cfg.fit.simplex.x_tolerance = field<double>(o, "x_tolerance", w);
    if (o.contains("f_tolerance")) cfg.fit.simplex.f_tolerance = field<double>(o, "f_tolerance", w);
    if (o.contains("seed")) cfg.fit.seed = field<std::uint64_t>(o, "seed", w);
    if (o.contains("starts")) cfg.fit.starts = field<int>(o, "starts", w);
    if (o.contains("jitter")) cfg.fit.jitter = field<double>(o, "jitter", w);
  }
  if (doc.contains("surfaces")) {
    cfg.default_surfaces = false;
    for (const auto& s : doc["surfaces"]) {
      const std::string w = where + ": surfaces";
      try {
        cfg.surfaces.push_back({parse_model_kind(field<std::string>(s, "model", w)),
                                GridAxis::parse(field<std::string>(s, "x", w)),
                                GridAxis::parse(field<std::string>(s, "y", w))});
      } catch (const ConfigError& e) {
        throw ParseError(w + ": " + e.what());
      }
    }
  }
  if (doc.contains("profile_points")) cfg.profile_points = field<int>(doc, "profile_points", where);
  if (doc.contains("profiles")) cfg.profiles = field<bool>(doc, "profiles", where);
  if (doc.contains("ellipses")) cfg.ellipses = field<bool>(doc, "ellipses", where);
  if (doc.contains("ellipse_points")) cfg.ellipse_points = field<int>(doc, "ellipse_points", where);
  if (doc.contains("validation") && !doc["validation"].is_null()) {
    const json& v = doc["validation"];
    const std::string w = where + ": validation";
    ValidationConfig vc;
    try {
      vc.kind = v.contains("model") ? parse_model_kind(field<std::string>(v, "model", w)) : ModelKind::nongender;
    } catch (const ConfigError& e) {
      throw ParseError(w + ": " + e.what());
    }
    if (!v.contains("truths") || !v["truths"].is_object()) throw ParseError(w + ": field \"truths\" must be an object");
    for (const auto& name : parameter_names(vc.kind)) {
      if (!v["truths"].contains(name)) throw ParseError(w + ".truths: missing \"" + name + "\"");
      vc.truth_axes.push_back(field<std::vector<double>>(v["truths"], name.c_str(), w + ".truths"));
    }
    if (v.contains("replicates")) vc.replicates = field<int>(v, "replicates", w);
    if (v.contains("seed")) vc.seed = field<std::uint64_t>(v, "seed", w);
    if (v.contains("times")) vc.times = field<std::vector<double>>(v, "times", w);
    // An empty grid counts as no validation at all.
    bool empty = false;
    for (const auto& axis : vc.truth_axes) empty = empty || axis.empty();
    if (!empty) cfg.validation = vc;
  }
  cfg.fit.levels = cfg.levels;
  return cfg;
}

bool ResultsBundle::all_converged() const {
  for (const auto& m : models) {
    if (!m.fit.converged) return false;
  }
  if (validation) {
    for (const auto& r : *validation) {
      if (!r.converged) return false;
    }
  }
  return true;
}

Dataset load_input(const RunConfig& config) {
  if (config.input.empty()) return mwanza_gender_dataset();
  return parse_dataset(config.input);
}

ResultsBundle run_pipeline(const RunConfig& config) {
  config.validate();
  ResultsBundle bundle(config, load_input(config));
  bundle.config.fit.levels = config.levels;
  const FitOptions& options = bundle.config.fit;
  const Dataset& data = bundle.data;
  const Dataset two_point = endpoints(data);
  bundle.analytic = closed_forms(two_point.marginal(), bundle.notes);

  for (ModelKind kind : config.models) {
    const ModelRun* collapsed = nullptr;
    for (const auto& m : bundle.models) {
      if (m.kind == ModelKind::nongender) collapsed = &m;
    }
    ModelRun run = fit_model(kind, data, two_point, bundle.analytic, options, collapsed);
    bundle.models.push_back(std::move(run));
  }

  const Dataset collapsed_data = data.marginal();
  for (const auto& m : bundle.models) {
    const Dataset& model_data = m.kind == ModelKind::gender ? data : collapsed_data;
    const auto& names = parameter_names(m.kind);
    const std::string tag(to_string(m.kind));

    std::vector<SurfaceRequest> requests;
    if (config.default_surfaces) requests = default_surface_requests(m.kind);
    for (const auto& r : config.surfaces) {
      if (r.kind == m.kind) requests.push_back(r);
    }
    for (const auto& r : requests) {
      std::map<std::string, double> fixed;
      for (std::size_t i = 0; i < names.size(); ++i) {
        if (names[i] != r.x.name && names[i] != r.y.name) fixed[names[i]] = m.fit.estimates[i];
      }
      SurfaceRun s;
      s.file = "surface_" + tag + "_" + r.x.name + "_" + r.y.name + ".csv";
      s.surface = likelihood_surface(m.kind, model_data, GridSpec{{r.x, r.y}}, fixed);
      s.interior_maxima = interior_local_maxima(s.surface).size();
      bundle.surfaces.push_back(std::move(s));
    }

    const auto& se = m.fit.std_errors();
    for (std::size_t i = 0; i < names.size() && config.profiles; ++i) {
      const double sigma = i < se.size() ? se[i] : kNaN;
      const auto [lo, hi] = profile_range(m.fit.estimates[i], sigma);
      GridAxis axis{names[i], lo, hi, config.profile_points, false};
      ProfileRun p;
      p.file = "profile_" + tag + "_" + names[i] + ".csv";
      p.kind = m.kind;
      p.parameter = names[i];
      p.points = slice_profile(m.kind, model_data, names[i], axis, m.fit.estimates);
      bundle.profiles.push_back(std::move(p));
    }

    const auto& cov = m.fit.covariance.covariance ? m.fit.covariance.covariance : m.fit.covariance.pseudo_covariance;
    std::vector<std::pair<std::size_t, std::size_t>> pairs;
    if (config.ellipses) pairs.emplace_back(0, 1);
    if (config.ellipses && m.kind == ModelKind::gender) pairs.emplace_back(2, 3);
    for (const auto& [a, b] : pairs) {
      for (double level : config.levels) {
        const std::string label = tag + " " + names[a] + "/" + names[b] + " at level " + level_tag(level);
        if (!cov) {
          bundle.notes.push_back("ellipse " + label + " skipped: no covariance");
          continue;
        }
        EllipseSpec spec;
        spec.mean = {m.fit.estimates[a], m.fit.estimates[b]};
        spec.covariance << (*cov)(a, a), (*cov)(a, b), (*cov)(b, a), (*cov)(b, b);
        spec.level = level;
        spec.n_points = config.ellipse_points;
        try {
          EllipseRun e;
          e.file = "ellipse_" + tag + "_" + names[a] + "_" + names[b] + "_" + level_tag(level) + ".csv";
          e.kind = m.kind;
          e.x_name = names[a];
          e.y_name = names[b];
          e.from_pseudo_inverse = m.fit.uses_pseudo_inverse();
          e.ellipse = ellipse_points(spec);
          bundle.ellipses.push_back(std::move(e));
        } catch (const DomainError&) {
          bundle.notes.push_back("ellipse " + label + " skipped: covariance block not positive definite");
        }
      }
    }
  }

  if (config.validation) {
    ValidationConfig vc = *config.validation;
    vc.fit = options;
    if (data.is_gendered()) {
      vc.init = data.gender_counts(0);
    } else if (vc.kind == ModelKind::gender) {
      throw ConfigError("gendered validation needs a gendered input");
    } else {
      const PairCounts c = data.counts(0);
      vc.init = {c.ss, c.si, 0, c.ii};  // collapses back to c
    }
    bundle.validation = validation_sweep(vc);
  }
  return bundle;
}

}  // namespace pairinfer
