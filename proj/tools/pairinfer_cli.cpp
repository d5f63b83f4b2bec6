// pairinfer command line: fit, surface, profile, simulate, validate, report-all.

#include <cstdlib>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "pairinfer/error.hpp"
#include "pairinfer/io.hpp"
#include "pairinfer/pipeline.hpp"
#include "pairinfer/report.hpp"
#include "pairinfer/simulator.hpp"

namespace {

using namespace pairinfer;
namespace fs = std::filesystem;

constexpr int kExitOk = 0;
constexpr int kExitOther = 1;
constexpr int kExitParse = 2;
constexpr int kExitInfeasible = 3;
constexpr int kExitNoConvergence = 4;

struct CommonArgs {
  std::string input;
  std::string model = "nongender";
  std::string out;
  std::string levels = "0.67,0.95";
  std::uint64_t seed = 20021;
  int max_evals = 50000;
};

std::vector<double> parse_list(const std::string& text, const std::string& what) {
  std::vector<double> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    try {
      std::size_t used = 0;
      out.push_back(std::stod(item, &used));
      if (used != item.size()) throw std::invalid_argument(item);
    } catch (const std::exception&) {
      throw ParseError(what + ": cannot read '" + item + "' as a number");
    }
  }
  if (out.empty()) throw ParseError(what + ": empty list");
  return out;
}

// "name=v1,v2,..." for each parameter of the model.
std::map<std::string, std::vector<double>> parse_assignments(const std::vector<std::string>& items,
                                                             const std::string& what) {
  std::map<std::string, std::vector<double>> out;
  for (const auto& item : items) {
    const auto eq = item.find('=');
    if (eq == std::string::npos) throw ParseError(what + ": expected name=value, got '" + item + "'");
    out[item.substr(0, eq)] = parse_list(item.substr(eq + 1), what + " " + item.substr(0, eq));
  }
  return out;
}

fs::path output_dir(const CommonArgs& args) {
  if (!args.out.empty()) return args.out;
  if (const char* env = std::getenv(kOutputEnvVar); env != nullptr && *env != '\0') return env;
  return "pairinfer_out";
}

RunConfig base_config(const CommonArgs& args) {
  RunConfig cfg;
  cfg.input = args.input;
  const ModelKind kind = parse_model_kind(args.model);
  cfg.models = kind == ModelKind::gender ? std::vector<ModelKind>{ModelKind::nongender, ModelKind::gender}
                                         : std::vector<ModelKind>{ModelKind::nongender};
  cfg.output_dir = output_dir(args);
  cfg.levels = parse_list(args.levels, "--levels");
  cfg.fit.levels = cfg.levels;
  cfg.fit.seed = args.seed;
  cfg.fit.simplex.max_evaluations = args.max_evals;
  return cfg;
}

int finish(const ResultsBundle& bundle) {
  const auto files = emit_report(bundle, bundle.config.output_dir);
  std::cout << "wrote " << files.size() << " files to " << bundle.config.output_dir.string() << "\n";
  std::cout << read_text_file(bundle.config.output_dir / "report.txt");
  if (!bundle.all_converged()) {
    std::cerr << "warning: at least one fit did not converge; results are flagged\n";
    return kExitNoConvergence;
  }
  return kExitOk;
}

void add_common(CLI::App* cmd, CommonArgs& args) {
  cmd->add_option("--input", args.input, "Dataset (.json or .csv); bundled Mwanza counts when omitted");
  cmd->add_option("--model", args.model, "nongender or gender")->check(CLI::IsMember({"nongender", "gender"}));
  cmd->add_option("--out", args.out, "Output directory (default: $PAIRINFER_OUT, then ./pairinfer_out)");
  cmd->add_option("--levels", args.levels, "Comma-separated confidence levels");
  cmd->add_option("--seed", args.seed, "Master seed");
  cmd->add_option("--max-evals", args.max_evals, "Simplex evaluation budget per start");
}

int run(int argc, char** argv) {
  CLI::App app{"Within- and between-pair transmission rate inference from paired cohort counts"};
  app.require_subcommand(1);

  CommonArgs fit_args;
  auto* fit = app.add_subcommand("fit", "Fit the model and write estimates, intervals, ellipses and infections");
  add_common(fit, fit_args);

  CommonArgs surface_args;
  std::vector<std::string> grids;
  auto* surface = app.add_subcommand("surface", "Log-likelihood surface on a grid");
  add_common(surface, surface_args);
  surface->add_option("--grid", grids, "Axis as <param:min:max:n>[:log]; give exactly two")->expected(2);

  CommonArgs profile_args;
  int profile_points = 201;
  auto* profile = app.add_subcommand("profile", "One-dimensional likelihood slices through the MLE");
  add_common(profile, profile_args);
  profile->add_option("--points", profile_points, "Points per slice");

  CommonArgs sim_args;
  std::vector<std::string> sim_params;
  int sim_reps = 1;
  std::string sim_times = "0,2";
  auto* simulate = app.add_subcommand("simulate", "Simulate cohorts from the pair chains");
  add_common(simulate, sim_args);
  simulate->add_option("--params", sim_params, "Rates as name=value, one per parameter")->required();
  simulate->add_option("--reps", sim_reps, "Replicates");
  simulate->add_option("--times", sim_times, "Comma-separated observation times");

  CommonArgs val_args;
  std::vector<std::string> truths;
  int val_reps = 50;
  auto* validate = app.add_subcommand("validate", "Parameter-recovery sweep over a grid of true rates");
  add_common(validate, val_args);
  validate->add_option("--truth", truths, "Truth axis as name=v1,v2,...; defaults to a 3 x 3 grid");
  validate->add_option("--reps", val_reps, "Replicates per grid cell");

  std::string manifest;
  auto* report_all = app.add_subcommand("report-all", "Full pipeline driven by a run manifest");
  report_all->add_option("manifest", manifest, "Run manifest (JSON)")->required();
  std::string manifest_out;
  report_all->add_option("--out", manifest_out, "Output directory, overriding the manifest and $PAIRINFER_OUT");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitParse;
  }

  if (*fit) {
    RunConfig cfg = base_config(fit_args);
    cfg.default_surfaces = false;
    cfg.profiles = false;
    return finish(run_pipeline(cfg));
  }
  if (*surface) {
    RunConfig cfg = base_config(surface_args);
    cfg.profiles = false;
    cfg.ellipses = false;
    if (!grids.empty()) {
      const ModelKind kind = parse_model_kind(surface_args.model);
      cfg.default_surfaces = false;
      cfg.surfaces.push_back({kind, GridAxis::parse(grids[0]), GridAxis::parse(grids[1])});
    }
    return finish(run_pipeline(cfg));
  }
  if (*profile) {
    RunConfig cfg = base_config(profile_args);
    cfg.default_surfaces = false;
    cfg.ellipses = false;
    cfg.profile_points = profile_points;
    return finish(run_pipeline(cfg));
  }
  if (*simulate) {
    SimConfig sim;
    sim.kind = parse_model_kind(sim_args.model);
    const auto values = parse_assignments(sim_params, "--params");
    for (const auto& name : parameter_names(sim.kind)) {
      const auto it = values.find(name);
      if (it == values.end() || it->second.size() != 1) throw ParseError("--params needs exactly one " + name);
      sim.params.push_back(it->second.front());
    }
    if (!sim_args.input.empty()) {
      const Dataset d = parse_dataset(sim_args.input);
      if (d.is_gendered()) {
        sim.init = d.gender_counts(0);
      } else {
        const PairCounts c = d.counts(0);
        sim.init = {c.ss, c.si, 0, c.ii};
        if (sim.kind == ModelKind::gender) throw ConfigError("gendered simulation needs a gendered input");
      }
    }
    sim.times = parse_list(sim_times, "--times");
    sim.replicates = sim_reps;
    sim.seed = sim_args.seed;
    const auto datasets = simulate_datasets(sim);
    const fs::path dir = output_dir(sim_args);
    ensure_writable_directory(dir);
    std::ostringstream os;
    const bool gendered = sim.kind == ModelKind::gender;
    os << (gendered ? "replicate,time,SS,IS,SI,II\n" : "replicate,time,SS,SI,II\n");
    for (std::size_t r = 0; r < datasets.size(); ++r) {
      const Dataset& d = datasets[r];
      for (std::size_t i = 0; i < d.size(); ++i) {
        os << r << ',' << fmt6(d.times()[i]);
        if (gendered) {
          const auto& g = d.gender_counts(i);
          os << ',' << g.ss << ',' << g.is << ',' << g.si << ',' << g.ii << '\n';
        } else {
          const auto c = d.counts(i);
          os << ',' << c.ss << ',' << c.si << ',' << c.ii << '\n';
        }
      }
    }
    write_text_file(dir / "simulated.csv", os.str());
    std::cout << "wrote " << datasets.size() << " replicates to " << (dir / "simulated.csv").string() << "\n";
    return kExitOk;
  }
  if (*validate) {
    RunConfig cfg = base_config(val_args);
    cfg.default_surfaces = false;
    cfg.profiles = false;
    cfg.ellipses = false;
    ValidationConfig vc;
    vc.kind = parse_model_kind(val_args.model);
    vc.replicates = val_reps;
    vc.seed = val_args.seed;
    if (truths.empty()) {
      if (vc.kind == ModelKind::gender) throw ConfigError("--truth is required for the gendered model");
      vc.truth_axes = {{0.002, 0.005, 0.01}, {0.02, 0.05, 0.1}};
    } else {
      const auto values = parse_assignments(truths, "--truth");
      for (const auto& name : parameter_names(vc.kind)) {
        const auto it = values.find(name);
        if (it == values.end()) throw ParseError("--truth is missing " + name);
        vc.truth_axes.push_back(it->second);
      }
    }
    cfg.validation = vc;
    return finish(run_pipeline(cfg));
  }
  if (*report_all) {
    RunConfig cfg = parse_manifest(manifest);
    if (!manifest_out.empty()) cfg.output_dir = manifest_out;
    return finish(run_pipeline(cfg));
  }
  return kExitOther;
}

}  // namespace

int main(int argc, char** argv) {
  try {
    return run(argc, argv);
  } catch (const ParseError& e) {
    std::cerr << "parse error: " << e.what() << "\n";
    return kExitParse;
  } catch (const ConfigError& e) {
    std::cerr << "configuration error: " << e.what() << "\n";
    return kExitParse;
  } catch (const InfeasibleDataError& e) {
    std::cerr << "infeasible data: " << e.what() << "\n";
    return kExitInfeasible;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitOther;
  }
}
