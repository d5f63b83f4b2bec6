#include "pairinfer/report.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "pairinfer/error.hpp"
#include "pairinfer/io.hpp"

namespace pairinfer {

namespace fs = std::filesystem;
using ojson = nlohmann::ordered_json;

namespace {

// Quoted alongside the analytical estimator and the infections table.
constexpr double kPublishedPhi = 16.95;
constexpr double kPublishedTauPhiPlusOne = 0.054;
constexpr double kPublishedInternalInfections = 2.48;

ojson num(double v) {
  if (!std::isfinite(v)) return nullptr;
  return std::stod(fmt6(v));
}

ojson nums(const std::vector<double>& v) {
  ojson a = ojson::array();
  for (double x : v) a.push_back(num(x));
  return a;
}

std::string show(const ojson& v) {
  if (v.is_null()) return "nan";
  if (v.is_number_integer() || v.is_number_unsigned()) return std::to_string(v.get<std::int64_t>());
  if (v.is_number()) return fmt6(v.get<double>());
  if (v.is_boolean()) return v.get<bool>() ? "yes" : "no";
  if (v.is_string()) return v.get<std::string>();
  return v.dump();
}

std::string pad(const std::string& s, std::size_t width) {
  return s.size() >= width ? s + " " : s + std::string(width - s.size(), ' ');
}

std::string csv_num(double v) { return fmt6(v); }

double median(std::vector<double> v) {
  if (v.empty()) return std::nan("");
  std::sort(v.begin(), v.end());
  const std::size_t m = v.size() / 2;
  return v.size() % 2 == 1 ? v[m] : 0.5 * (v[m - 1] + v[m]);
}

const ModelRun* find_model(const ResultsBundle& b, ModelKind kind) {
  for (const auto& m : b.models) {
    if (m.kind == kind) return &m;
  }
  return nullptr;
}

ojson fit_summary(const ModelRun& m) {
  const auto& names = parameter_names(m.kind);
  const FitResult& f = m.fit;
  ojson o;
  o["converged"] = f.converged;
  o["log_likelihood"] = num(f.log_likelihood);
  o["evaluations"] = f.evaluations;
  o["warm_start_source"] = std::string(to_string(f.warm_start.source));
  o["ridge"] = f.ridge;
  o["hessian_positive_definite"] = f.covariance.positive_definite;
  o["hessian_rank"] = f.covariance.rank;
  o["condition_number"] = num(f.covariance.condition_number);
  o["ill_conditioned"] = f.covariance.ill_conditioned;
  o["std_error_source"] = f.uses_pseudo_inverse() ? "pseudo-inverse" : (f.covariance.positive_definite ? "inverse" : "none");
  if (!f.hessian_error.empty()) o["hessian_error"] = f.hessian_error;
  o["hessian_eigenvalues"] = nums(std::vector<double>(f.covariance.eigenvalues.data(),
                                                      f.covariance.eigenvalues.data() + f.covariance.eigenvalues.size()));
  ojson params = ojson::array();
  const auto& se = f.std_errors();
  for (std::size_t i = 0; i < names.size(); ++i) {
    ojson p;
    p["name"] = names[i];
    p["analytical"] = num(m.analytical[i]);
    p["cfa"] = num(m.cfa[i]);
    p["warm_start"] = num(f.warm_start.point[i]);
    p["mle"] = num(f.estimates[i]);
    p["std_error"] = num(i < se.size() ? se[i] : std::nan(""));
    p["at_bound"] = static_cast<bool>(f.at_bound[i]);
    ojson ivs = ojson::array();
    for (const auto& set : f.intervals) {
      ojson iv;
      iv["level"] = num(set.level);
      const auto& opt = set.per_parameter[i];
      iv["lo"] = opt ? num(opt->lo) : ojson(nullptr);
      iv["hi"] = opt ? num(opt->hi) : ojson(nullptr);
      iv["truncated"] = opt ? opt->truncated : false;
      ivs.push_back(iv);
    }
    p["intervals"] = ivs;
    params.push_back(p);
  }
  o["parameters"] = params;
  return o;
}

ojson infections_summary(const InfectionTable& t) {
  ojson o;
  ojson rows = ojson::array();
  for (const auto& r : t.rows) {
    ojson row;
    row["route"] = r.route;
    row["parameter"] = r.parameter;
    row["rate"] = num(r.rate);
    row["at_risk"] = num(r.at_risk);
    row["infections_per_year"] = num(r.infections_per_year);
    row["per_thousand"] = num(r.per_thousand);
    rows.push_back(row);
  }
  o["rows"] = rows;
  o["total_infections"] = num(t.total_infections);
  o["summed_per_thousand"] = num(t.summed_per_thousand);
  o["summed_per_thousand_note"] = "sum of per-thousand rates over different denominators";
  return o;
}

}  // namespace

std::vector<Discrepancy> discrepancy_ledger(const ResultsBundle& b) {
  std::vector<Discrepancy> out;
  const double lambda_hat = b.analytic.lambda_hat.value;
  const double printed_phi = b.analytic.expansion ? b.analytic.expansion->phi : std::nan("");
  out.push_back({"phi_expansion",
                 "phi from the quoted binomial-expansion formula evaluated on the counts, against the quoted phi",
                 kPublishedPhi, printed_phi});
  out.push_back({"tau_convention",
                 "tau from the quoted phi under tau = (phi + 1) lambda, against the stated tau = (2 phi + 1) lambda",
                 kPublishedTauPhiPlusOne, (2.0 * kPublishedPhi + 1.0) * lambda_hat});
  double internal = std::nan("");
  if (const ModelRun* m = find_model(b, ModelKind::nongender)) {
    for (const auto& r : m->infections.rows) {
      if (r.route == "internal") internal = r.infections_per_year;
    }
  }
  out.push_back({"internal_infections", "internal infections per year, tau times the initial discordant pairs",
                 kPublishedInternalInfections, internal});
  return out;
}

ojson build_summary(const ResultsBundle& b) {
  ojson s;
  s["schema_version"] = kSummarySchemaVersion;

  ojson data;
  data["model"] = std::string(to_string(b.data.kind()));
  data["provenance"] = b.data.provenance();
  data["n_pairs"] = b.data.total_pairs();
  data["times"] = nums(b.data.times());
  ojson counts = ojson::array();
  for (std::size_t i = 0; i < b.data.size(); ++i) {
    ojson c;
    if (b.data.is_gendered()) {
      const auto& g = b.data.gender_counts(i);
      c["SS"] = g.ss;
      c["IS"] = g.is;
      c["SI"] = g.si;
      c["II"] = g.ii;
    } else {
      const auto p = b.data.counts(i);
      c["SS"] = p.ss;
      c["SI"] = p.si;
      c["II"] = p.ii;
    }
    counts.push_back(c);
  }
  data["counts"] = counts;
  s["dataset"] = data;
  s["levels"] = nums(b.config.levels);

  ojson an;
  an["lambda_hat"] = num(b.analytic.lambda_hat.value);
  an["susceptibles_increased"] = b.analytic.lambda_hat.susceptibles_increased;
  if (b.analytic.expansion) {
    an["phi_expansion"] = num(b.analytic.expansion->phi);
    an["tau_two_phi_plus_one"] = num(b.analytic.expansion->tau_two_phi_plus_one);
    an["tau_phi_plus_one"] = num(b.analytic.expansion->tau_phi_plus_one);
    an["tau_two_phi_plus_one_clamped"] = num(b.analytic.expansion->tau_two_phi_plus_one_clamped);
    an["expansion_clamped"] = b.analytic.expansion->clamped;
  } else {
    an["phi_expansion"] = nullptr;
  }
  an["phi_first_order"] = b.analytic.phi_first_order ? num(*b.analytic.phi_first_order) : ojson(nullptr);
  an["tau_rootsolve"] = b.analytic.tau_hat_rootsolve ? num(*b.analytic.tau_hat_rootsolve) : ojson(nullptr);
  an["cfa_lambda"] = num(b.analytic.cfa.params.lambda);
  an["cfa_tau"] = num(b.analytic.cfa.params.tau);
  s["analytical"] = an;

  ojson fits;
  ojson inf;
  for (const auto& m : b.models) {
    const std::string tag(to_string(m.kind));
    fits[tag] = fit_summary(m);
    inf[tag] = infections_summary(m.infections);
  }
  s["fits"] = fits;
  s["infections"] = inf;

  ojson surfaces = ojson::array();
  for (const auto& r : b.surfaces) {
    ojson o;
    o["file"] = r.file;
    o["model"] = std::string(to_string(r.surface.kind));
    o["x"] = r.surface.x_name;
    o["y"] = r.surface.y_name;
    o["rows"] = r.surface.rows();
    o["cols"] = r.surface.cols();
    o["max_log_likelihood"] = num(r.surface.max_raw);
    o["interior_local_maxima"] = r.interior_maxima;
    surfaces.push_back(o);
  }
  s["surfaces"] = surfaces;

  ojson profiles = ojson::array();
  for (const auto& p : b.profiles) {
    ojson o;
    o["file"] = p.file;
    o["model"] = std::string(to_string(p.kind));
    o["parameter"] = p.parameter;
    o["points"] = p.points.size();
    o["from"] = num(p.points.front().value);
    o["to"] = num(p.points.back().value);
    profiles.push_back(o);
  }
  s["profiles"] = profiles;

  ojson ellipses = ojson::array();
  for (const auto& e : b.ellipses) {
    ojson o;
    o["file"] = e.file;
    o["model"] = std::string(to_string(e.kind));
    o["x"] = e.x_name;
    o["y"] = e.y_name;
    o["level"] = num(e.ellipse.level);
    o["radius_squared"] = num(e.ellipse.radius_squared);
    o["points"] = e.ellipse.points.size();
    o["from_pseudo_inverse"] = e.from_pseudo_inverse;
    ellipses.push_back(o);
  }
  s["ellipses"] = ellipses;

  ojson val;
  if (!b.validation) {
    val["emitted"] = false;
    val["note"] = "no validation sweep configured; validation.csv not written";
  } else {
    const auto& recs = *b.validation;
    val["emitted"] = true;
    val["file"] = "validation.csv";
    val["records"] = recs.size();
    int unconverged = 0;
    for (const auto& r : recs) unconverged += r.converged ? 0 : 1;
    val["unconverged"] = unconverged;
    ojson cells = ojson::array();
    int cell_count = recs.empty() ? 0 : recs.back().cell + 1;
    for (int c = 0; c < cell_count; ++c) {
      std::vector<const ValidationRecord*> in;
      for (const auto& r : recs) {
        if (r.cell == c) in.push_back(&r);
      }
      ojson o;
      o["cell"] = c;
      o["truth"] = nums(in.front()->truth);
      std::vector<double> med;
      for (std::size_t k = 0; k < in.front()->truth.size(); ++k) {
        std::vector<double> v;
        for (const auto* r : in) v.push_back(r->estimate[k]);
        med.push_back(median(v));
      }
      o["median_estimate"] = nums(med);
      o["replicates"] = in.size();
      cells.push_back(o);
    }
    val["cells"] = cells;
  }
  s["validation"] = val;

  ojson notes = ojson::array();
  for (const auto& n : b.notes) notes.push_back(n);
  s["notes"] = notes;

  ojson disc = ojson::array();
  for (const auto& d : discrepancy_ledger(b)) {
    ojson o;
    o["id"] = d.id;
    o["description"] = d.description;
    o["published"] = num(d.published);
    o["computed"] = num(d.computed);
    disc.push_back(o);
  }
  s["discrepancies"] = disc;
  s["all_converged"] = b.all_converged();
  return s;
}

std::string render_report(const ojson& s) {
  std::ostringstream os;
  const auto& d = s["dataset"];
  os << "Pair transmission inference report\n\n";
  os << "Data\n";
  os << "  provenance: " << show(d["provenance"]) << "\n";
  os << "  model: " << show(d["model"]) << ", pairs: " << show(d["n_pairs"]) << "\n";
  for (std::size_t i = 0; i < d["times"].size(); ++i) {
    os << "  t = " << show(d["times"][i]) << ":";
    for (const auto& [k, v] : d["counts"][i].items()) os << " " << k << " " << show(v);
    os << "\n";
  }

  const auto& an = s["analytical"];
  os << "\nAnalytical estimates\n";
  os << "  lambda_hat (closed form): " << show(an["lambda_hat"]) << "\n";
  os << "  tau_hat (root solve): " << show(an["tau_rootsolve"]) << "\n";
  os << "  phi (binomial expansion as quoted): " << show(an["phi_expansion"]) << "\n";
  if (an.contains("tau_two_phi_plus_one")) {
    os << "    tau under (2 phi + 1) lambda: " << show(an["tau_two_phi_plus_one"])
       << ", under (phi + 1) lambda: " << show(an["tau_phi_plus_one"]) << "\n";
    os << "    clamped into the box: " << show(an["tau_two_phi_plus_one_clamped"]) << "\n";
  }
  os << "  phi (first order, sign corrected): " << show(an["phi_first_order"]) << "\n";
  os << "  CFA: lambda " << show(an["cfa_lambda"]) << ", tau " << show(an["cfa_tau"]) << "\n";

  for (const auto& [tag, f] : s["fits"].items()) {
    os << "\nFit: " << tag << " model\n";
    os << "  converged: " << show(f["converged"]) << ", log-likelihood " << show(f["log_likelihood"])
       << ", evaluations " << show(f["evaluations"]) << ", warm start " << show(f["warm_start_source"]) << "\n";
    os << "  Hessian: positive definite " << show(f["hessian_positive_definite"]) << ", rank "
       << show(f["hessian_rank"]) << ", condition number " << show(f["condition_number"]) << ", ridge "
       << show(f["ridge"]) << "\n";
    os << "  eigenvalues:";
    for (const auto& e : f["hessian_eigenvalues"]) os << " " << show(e);
    os << "\n";
    if (f.contains("hessian_error")) os << "  Hessian unavailable: " << show(f["hessian_error"]) << "\n";
    if (f["ill_conditioned"].get<bool>()) os << "  warning: Hessian is ill-conditioned\n";
    if (f["ridge"].get<bool>()) {
      os << "  warning: likelihood is flat along a ridge; standard errors from the pseudo-inverse\n";
    }
    os << "  " << pad("parameter", 11) << pad("analytical", 12) << pad("CFA", 12) << pad("MLE", 12) << pad("SE", 12);
    for (const auto& iv : f["parameters"][0]["intervals"]) os << pad("CI " + show(iv["level"]), 24);
    os << "\n";
    for (const auto& p : f["parameters"]) {
      os << "  " << pad(show(p["name"]), 11) << pad(show(p["analytical"]), 12) << pad(show(p["cfa"]), 12)
         << pad(show(p["mle"]), 12) << pad(show(p["std_error"]), 12);
      for (const auto& iv : p["intervals"]) {
        os << pad("(" + show(iv["lo"]) + ", " + show(iv["hi"]) + ")", 24);
      }
      if (p["at_bound"].get<bool>()) os << " at bound";
      os << "\n";
    }
  }

  for (const auto& [tag, t] : s["infections"].items()) {
    os << "\nInfections per year: " << tag << " model\n";
    os << "  " << pad("route", 10) << pad("rate", 10) << pad("value", 12) << pad("at risk", 10)
       << pad("per year", 12) << "per thousand\n";
    for (const auto& r : t["rows"]) {
      os << "  " << pad(show(r["route"]), 10) << pad(show(r["parameter"]), 10) << pad(show(r["rate"]), 12)
         << pad(show(r["at_risk"]), 10) << pad(show(r["infections_per_year"]), 12) << show(r["per_thousand"]) << "\n";
    }
    os << "  total per year: " << show(t["total_infections"]) << "\n";
    os << "  summed per-thousand column: " << show(t["summed_per_thousand"]) << " ("
       << show(t["summed_per_thousand_note"]) << ")\n";
  }

  os << "\nLikelihood surfaces\n";
  for (const auto& r : s["surfaces"]) {
    os << "  " << show(r["file"]) << ": " << show(r["rows"]) << " x " << show(r["cols"]) << ", max log-likelihood "
       << show(r["max_log_likelihood"]) << ", interior local maxima " << show(r["interior_local_maxima"]) << "\n";
  }
  os << "\nProfiles\n";
  for (const auto& p : s["profiles"]) {
    os << "  " << show(p["file"]) << ": " << show(p["points"]) << " points over [" << show(p["from"]) << ", "
       << show(p["to"]) << "]\n";
  }
  os << "\nConfidence ellipses\n";
  for (const auto& e : s["ellipses"]) {
    os << "  " << show(e["file"]) << ": level " << show(e["level"]) << ", chi-square radius squared "
       << show(e["radius_squared"]) << ", " << show(e["points"]) << " points"
       << (e["from_pseudo_inverse"].get<bool>() ? " (pseudo-inverse)" : "") << "\n";
  }

  os << "\nValidation\n";
  const auto& v = s["validation"];
  if (!v["emitted"].get<bool>()) {
    os << "  " << show(v["note"]) << "\n";
  } else {
    os << "  " << show(v["records"]) << " records, unconverged " << show(v["unconverged"]) << "\n";
    for (const auto& c : v["cells"]) {
      os << "  cell " << show(c["cell"]) << ": truth";
      for (const auto& x : c["truth"]) os << " " << show(x);
      os << ", median estimate";
      for (const auto& x : c["median_estimate"]) os << " " << show(x);
      os << " over " << show(c["replicates"]) << " replicates\n";
    }
  }

  if (!s["notes"].empty()) {
    os << "\nNotes\n";
    for (const auto& n : s["notes"]) os << "  " << show(n) << "\n";
  }

  os << "\nDiscrepancy ledger\n";
  for (const auto& e : s["discrepancies"]) {
    os << "  [" << show(e["id"]) << "] " << show(e["description"]) << ": published " << show(e["published"])
       << ", computed " << show(e["computed"]) << "\n";
  }
  return os.str();
}

std::vector<std::pair<std::string, std::string>> render_tables(const ResultsBundle& b) {
  std::vector<std::pair<std::string, std::string>> out;
  const auto& levels = b.config.levels;

  {
    std::ostringstream os;
    os << "model,parameter,analytical,cfa,warm_start,mle,se,se_source";
    for (double l : levels) os << ",lo_" << fmt6(l) << ",hi_" << fmt6(l);
    os << ",at_bound,converged,ridge\n";
    for (const auto& m : b.models) {
      const auto& names = parameter_names(m.kind);
      const auto& f = m.fit;
      const auto& se = f.std_errors();
      const char* source = f.uses_pseudo_inverse() ? "pseudo-inverse" : (f.covariance.positive_definite ? "inverse" : "none");
      for (std::size_t i = 0; i < names.size(); ++i) {
        os << to_string(m.kind) << ',' << names[i] << ',' << csv_num(m.analytical[i]) << ',' << csv_num(m.cfa[i]) << ','
           << csv_num(f.warm_start.point[i]) << ',' << csv_num(f.estimates[i]) << ','
           << csv_num(i < se.size() ? se[i] : std::nan("")) << ',' << source;
        for (double l : levels) {
          const IntervalSet* set = nullptr;
          for (const auto& s : f.intervals) {
            if (s.level == l) set = &s;
          }
          if (set != nullptr && set->per_parameter[i]) {
            os << ',' << csv_num(set->per_parameter[i]->lo) << ',' << csv_num(set->per_parameter[i]->hi);
          } else {
            os << ",nan,nan";
          }
        }
        os << ',' << (f.at_bound[i] ? 1 : 0) << ',' << (f.converged ? 1 : 0) << ',' << (f.ridge ? 1 : 0) << '\n';
      }
    }
    out.emplace_back("estimates.csv", os.str());
  }

  {
    std::ostringstream os;
    os << "model,route,parameter,rate,at_risk,infections_per_year,per_thousand,note\n";
    for (const auto& m : b.models) {
      for (const auto& r : m.infections.rows) {
        os << to_string(m.kind) << ',' << r.route << ',' << r.parameter << ',' << csv_num(r.rate) << ','
           << csv_num(r.at_risk) << ',' << csv_num(r.infections_per_year) << ',' << csv_num(r.per_thousand) << ",\n";
      }
      os << to_string(m.kind) << ",total,,,," << csv_num(m.infections.total_infections) << ','
         << csv_num(m.infections.summed_per_thousand) << ",per-thousand sum mixes denominators\n";
    }
    out.emplace_back("infections.csv", os.str());
  }

  for (const auto& r : b.surfaces) {
    const Surface& s = r.surface;
    std::ostringstream os;
    // First row holds the column axis, first column the row axis; cells are
    // log-likelihood minus the grid maximum.
    os << s.x_name << "\\" << s.y_name;
    for (double y : s.y_values) os << ',' << csv_num(y);
    os << '\n';
    for (std::size_t i = 0; i < s.rows(); ++i) {
      os << csv_num(s.x_values[i]);
      for (std::size_t j = 0; j < s.cols(); ++j) os << ',' << csv_num(s.at(i, j));
      os << '\n';
    }
    out.emplace_back(r.file, os.str());
  }

  for (const auto& p : b.profiles) {
    std::ostringstream os;
    os << p.parameter << ",log_likelihood\n";
    for (const auto& pt : p.points) os << csv_num(pt.value) << ',' << csv_num(pt.log_likelihood) << '\n';
    out.emplace_back(p.file, os.str());
  }

  for (const auto& e : b.ellipses) {
    std::ostringstream os;
    os << e.x_name << ',' << e.y_name << '\n';
    for (const auto& pt : e.ellipse.points) os << csv_num(pt.x()) << ',' << csv_num(pt.y()) << '\n';
    out.emplace_back(e.file, os.str());
  }

  if (b.validation) {
    std::ostringstream os;
    ModelKind kind = b.config.validation ? b.config.validation->kind : ModelKind::nongender;
    const auto& names = parameter_names(kind);
    os << "cell,replicate,seed";
    for (const auto& n : names) os << ",true_" << n;
    for (const auto& n : names) os << ",est_" << n;
    os << ",converged\n";
    for (const auto& r : *b.validation) {
      os << r.cell << ',' << r.replicate << ',' << r.seed;
      for (double x : r.truth) os << ',' << csv_num(x);
      for (double x : r.estimate) os << ',' << csv_num(x);
      os << ',' << (r.converged ? 1 : 0) << '\n';
    }
    out.emplace_back("validation.csv", os.str());
  }
  return out;
}

std::vector<std::string> emit_report(const ResultsBundle& bundle, const fs::path& dir) {
  ensure_writable_directory(dir);
  const ojson summary = build_summary(bundle);
  auto files = render_tables(bundle);
  files.emplace_back("report.txt", render_report(summary));
  files.emplace_back("summary.json", summary.dump(2) + "\n");

  // A stale validation file from an earlier run would contradict the summary.
  if (!bundle.validation) {
    std::error_code ec;
    fs::remove(dir / "validation.csv", ec);
  }
  std::vector<std::string> written;
  for (const auto& [name, content] : files) {
    write_text_file(dir / name, content);
    written.push_back(name);
  }
  return written;
}

}  // namespace pairinfer
