#include "cli.hpp"

#include <algorithm>
#include <cmath>
#include <iostream>
#include <optional>
#include <sstream>

#include <CLI11.hpp>

#include "hpsurf/diagnostics.hpp"
#include "hpsurf/errors.hpp"
#include "hpsurf/estimation.hpp"
#include "hpsurf/io.hpp"
#include "hpsurf/simulator.hpp"

namespace hpsurf::cli {
namespace {

using io::Json;

struct RunConfig {
  std::string input;
  std::string output;
  std::string direction = "min";
  std::optional<double> threshold;
  double confidence = 0.8;
  std::uint64_t seed = 0;
  double k_max = 64;
  GridCounts grid;
  std::string format = "json";
  std::string scenario = "full-rank";
  std::string groups;
  std::string config;
  std::size_t n = 1024;
  std::optional<double> noise;
  std::vector<double> candidates;
  std::vector<std::size_t> reference;

  void validate() const {
    if (!(confidence > 0.0 && confidence < 1.0)) throw InputError("--confidence must lie in (0, 1)");
    if (grid.alpha < 2 || grid.beta < 2 || grid.sigma < 2 || grid.gamma < 2) {
      throw InputError("grid counts must be at least 2");
    }
    if (!(k_max >= 1.0) || !std::isfinite(k_max)) throw InputError("--k-max must be >= 1");
    if (format != "json" && format != "csv") throw InputError("--format must be json or csv");
    if (threshold && !std::isfinite(*threshold)) throw InputError("--threshold must be finite");
  }

  Direction dir() const {
    try {
      return parse_direction(direction);
    } catch (const DomainError& e) {
      throw InputError(e.what());
    }
  }
};

std::string fmt(double x) { return io::format_double(x); }
std::string fmt(const std::optional<double>& x) { return x ? fmt(*x) : ""; }
Json opt_json(const std::optional<double>& x) { return x ? Json(*x) : Json(nullptr); }

std::string dump(const Json& j) { return j.dump(2) + "\n"; }

ScoreSample load_sample(const RunConfig& c) {
  if (c.input.empty()) throw InputError("--input is required");
  return {io::read_scores_file(c.input), c.dir()};
}

FitOptions fit_options(const RunConfig& c) {
  FitOptions o;
  o.seed = c.seed;
  return o;
}

// Thresholds at the sample quantiles whose regime fractions are 0.1, ..., 0.9.
std::vector<double> default_candidates(const ScoreSample& s) {
  std::vector<double> sorted = s.scores;
  std::sort(sorted.begin(), sorted.end());
  const std::size_t n = sorted.size();
  std::vector<double> out;
  for (int i = 1; i <= 9; ++i) {
    const double frac = 0.1 * i;
    const auto m = static_cast<std::size_t>(std::max(std::ceil(frac * static_cast<double>(n)), 1.0));
    out.push_back(s.direction == Direction::Minimize ? sorted[m - 1] : sorted[n - m]);
  }
  return out;
}

struct ThresholdChoice {
  double value;
  std::string source;
};

// The loosest scanned candidate whose fit stays inside the DKW band.
ThresholdChoice choose_threshold(const RunConfig& c, const ScoreSample& s) {
  if (c.threshold) return {*c.threshold, "given"};
  ScanOptions so;
  so.fit = fit_options(c);
  so.confidence = c.confidence;
  const auto rows = threshold_scan(s, default_candidates(s), so);
  const ScanRow* best = nullptr;
  for (const auto& r : rows) {
    if (r.skipped || !r.within_band) continue;
    if (!best || r.regime_fraction > best->regime_fraction) best = &r;
  }
  if (!best) throw InfeasibleFit("no scanned threshold gives a fit inside the band; pass --threshold");
  return {best->threshold, "scanned"};
}

Json grid_json(const ConsonanceGrids& g) {
  Json j;
  j["alpha"] = g.alpha.size();
  j["beta"] = g.beta.size();
  j["sigma"] = g.sigma.size();
  j["gamma"] = g.gamma.size();
  return j;
}

struct RegionWork {
  ScoreSample sample;
  ThresholdChoice threshold;
  FitResult fit;
  CdfBand band;
  ConsonanceRegion region;
};

RegionWork build_region(const RunConfig& c) {
  RegionWork w{load_sample(c), {}, {}, {}, {}};
  w.threshold = choose_threshold(c, w.sample);
  w.fit = fit_noisy_quadratic(w.sample, w.threshold.value, fit_options(c));
  w.band = dkw_band(w.sample, c.confidence);
  const auto grids = default_consonance_grids(w.sample, w.threshold.value, c.grid);
  w.region = consonance_region(w.band, w.threshold.value, w.sample, grids);
  if (w.region.empty()) throw EmptyRegion();
  return w;
}

Json region_metadata(const RegionWork& w) {
  Json j;
  j["threshold"] = w.threshold.value;
  j["threshold_source"] = w.threshold.source;
  j["confidence"] = w.band.confidence;
  j["nonparametric_band"] = w.band.method;
  j["grid_sizes"] = grid_json(w.region.grids);
  j["region_size"] = w.region.size();
  j["cdf_evaluations"] = w.region.cdf_evaluations;
  return j;
}

int cmd_fit(const RunConfig& c) {
  const auto sample = load_sample(c);
  const auto th = choose_threshold(c, sample);
  const auto fit = fit_noisy_quadratic(sample, th.value, fit_options(c));
  if (c.format == "csv") {
    std::ostringstream out;
    out << "alpha,beta,gamma,sigma,threshold,n,n_censored,objective,converged\n"
        << fmt(fit.dist.alpha()) << ',' << fmt(fit.dist.beta()) << ',' << fmt(fit.dist.gamma()) << ','
        << fmt(fit.dist.sigma()) << ',' << fmt(fit.threshold) << ',' << fit.n << ',' << fit.n_censored << ','
        << fmt(fit.objective) << ',' << (fit.converged ? "true" : "false") << '\n';
    io::write_output(c.output, out.str());
    return kOk;
  }
  Json doc = io::document("fit", c.seed);
  doc["threshold_source"] = th.source;
  doc["fit"] = io::to_json(fit);
  io::write_output(c.output, dump(doc));
  return kOk;
}

int cmd_curve(const RunConfig& c) {
  const auto w = build_region(c);
  const auto ks = log_k_grid(c.k_max, 64);
  const auto para = parametric_tuning_band(w.region, ks, 0.5, w.fit.dist);
  const auto nonpara = tuning_curve_from_band(w.band, ks, w.sample.direction);
  if (c.format == "csv") {
    std::ostringstream out;
    out << "series,x,y,lower,upper\n";
    for (std::size_t i = 0; i < ks.size(); ++i) {
      out << "parametric," << fmt(ks[i]) << ',' << fmt(para.values[i]) << ',' << fmt(para.lower[i]) << ','
          << fmt(para.upper[i]) << '\n';
    }
    for (std::size_t i = 0; i < ks.size(); ++i) {
      out << "nonparametric," << fmt(ks[i]) << ',' << fmt(nonpara.values[i]) << ',' << fmt(nonpara.lower[i]) << ','
          << fmt(nonpara.upper[i]) << '\n';
    }
    io::write_output(c.output, out.str());
    return kOk;
  }
  Json doc = io::document("curve", c.seed);
  doc["metadata"] = region_metadata(w);
  doc["fit"] = io::to_json(w.fit);
  Json rows = Json::array();
  for (std::size_t i = 0; i < ks.size(); ++i) {
    Json r;
    r["k"] = ks[i];
    r["median"] = para.values[i];
    r["lower"] = opt_json(para.lower[i]);
    r["upper"] = opt_json(para.upper[i]);
    r["nonparametric_median"] = nonpara.values[i];
    r["nonparametric_lower"] = opt_json(nonpara.lower[i]);
    r["nonparametric_upper"] = opt_json(nonpara.upper[i]);
    rows.push_back(std::move(r));
  }
  doc["rows"] = std::move(rows);
  io::write_output(c.output, dump(doc));
  return kOk;
}

std::vector<double> band_xs(const RegionWork& w) {
  auto xs = consonance_points(w.sample, w.threshold.value);
  const double theta = w.threshold.value;
  const double edge = w.sample.direction == Direction::Minimize ? xs.front() : xs.back();
  const double far = edge - 0.25 * (theta - edge);
  for (int i = 0; i <= 100; ++i) xs.push_back(far + (theta - far) * i / 100.0);
  std::sort(xs.begin(), xs.end());
  xs.erase(std::unique(xs.begin(), xs.end()), xs.end());
  return xs;
}

int cmd_band(const RunConfig& c) {
  const auto w = build_region(c);
  const auto xs = band_xs(w);
  const auto para = parametric_cdf_band(w.region, xs, w.fit.dist);
  if (c.format == "csv") {
    std::ostringstream out;
    out << "series,x,y,lower,upper\n";
    for (std::size_t i = 0; i < xs.size(); ++i) {
      out << "parametric," << fmt(xs[i]) << ',' << fmt(para.ecdf[i]) << ',' << fmt(para.lower[i]) << ','
          << fmt(para.upper[i]) << '\n';
    }
    for (std::size_t i = 0; i < w.band.xs.size(); ++i) {
      out << "nonparametric," << fmt(w.band.xs[i]) << ',' << fmt(w.band.ecdf[i]) << ',' << fmt(w.band.lower[i]) << ','
          << fmt(w.band.upper[i]) << '\n';
    }
    io::write_output(c.output, out.str());
    return kOk;
  }
  Json doc = io::document("band", c.seed);
  doc["metadata"] = region_metadata(w);
  doc["fit"] = io::to_json(w.fit);
  Json rows = Json::array();
  for (std::size_t i = 0; i < xs.size(); ++i) {
    rows.push_back({{"series", "parametric"}, {"x", xs[i]}, {"y", para.ecdf[i]}, {"lower", para.lower[i]},
                    {"upper", para.upper[i]}});
  }
  for (std::size_t i = 0; i < w.band.xs.size(); ++i) {
    rows.push_back({{"series", "nonparametric"}, {"x", w.band.xs[i]}, {"y", w.band.ecdf[i]},
                    {"lower", w.band.lower[i]}, {"upper", w.band.upper[i]}});
  }
  doc["rows"] = std::move(rows);
  io::write_output(c.output, dump(doc));
  return kOk;
}

int cmd_scan(const RunConfig& c) {
  const auto sample = load_sample(c);
  ScanOptions so;
  so.fit = fit_options(c);
  so.confidence = c.confidence;
  const auto candidates = c.candidates.empty() ? default_candidates(sample) : c.candidates;
  const auto rows = threshold_scan(sample, candidates, so);
  if (c.format == "csv") {
    std::ostringstream out;
    out << "threshold,skipped,n_uncensored,regime_fraction,alpha,beta,gamma,sigma,max_deviation,within_band\n";
    for (const auto& r : rows) {
      out << fmt(r.threshold) << ',' << (r.skipped ? "true" : "false") << ',' << r.n_uncensored << ','
          << fmt(r.regime_fraction);
      if (r.fit) {
        out << ',' << fmt(r.fit->dist.alpha()) << ',' << fmt(r.fit->dist.beta()) << ',' << fmt(r.fit->dist.gamma())
            << ',' << fmt(r.fit->dist.sigma()) << ',' << fmt(r.max_deviation) << ','
            << (r.within_band ? "true" : "false");
      } else {
        out << ",,,,,,";
      }
      out << '\n';
    }
    io::write_output(c.output, out.str());
    return kOk;
  }
  Json doc = io::document("scan", c.seed);
  doc["confidence"] = c.confidence;
  doc["dkw_epsilon"] = dkw_epsilon(sample.size(), c.confidence);
  Json out = Json::array();
  for (const auto& r : rows) {
    Json j;
    j["threshold"] = r.threshold;
    j["skipped"] = r.skipped;
    if (r.skipped) j["reason"] = r.reason;
    j["n_uncensored"] = r.n_uncensored;
    j["regime_fraction"] = r.regime_fraction;
    if (r.fit) {
      j["fit"] = io::to_json(*r.fit);
      j["max_deviation"] = r.max_deviation;
      j["within_band"] = r.within_band;
    }
    out.push_back(std::move(j));
  }
  doc["rows"] = std::move(out);
  io::write_output(c.output, dump(doc));
  return kOk;
}

Json qq_json(const std::vector<double>& v) {
  const auto qq = normal_qq(v);
  Json j;
  j["degenerate"] = qq.degenerate;
  Json pts = Json::array();
  for (const auto& p : qq.points) pts.push_back({p.theoretical, p.sample});
  j["points"] = std::move(pts);
  return j;
}

int cmd_diagnose(const RunConfig& c) {
  if (c.groups.empty() && c.input.empty()) throw InputError("diagnose needs --groups or --input");
  Json doc = io::document("diagnose", c.seed);
  doc["confidence"] = c.confidence;
  std::ostringstream csv;
  csv << "series,x,y,lower,upper\n";
  if (!c.groups.empty()) {
    const auto g = io::read_grouped_file(c.groups);
    std::optional<std::vector<std::size_t>> ref;
    if (!c.reference.empty()) ref = c.reference;
    const auto rep = sidak_simultaneous_std_cis(g, c.confidence, ref);
    doc["individual_confidence"] = rep.individual_confidence;
    doc["groups"] = g.groups.size();
    Json ints = Json::array();
    for (std::size_t i = 0; i < rep.intervals.size(); ++i) {
      const auto& gi = rep.intervals[i];
      ints.push_back({{"label", gi.label}, {"n", gi.n}, {"std", gi.std}, {"lower", gi.interval.lo},
                      {"upper", gi.interval.hi}});
      csv << "std," << i << ',' << fmt(gi.std) << ',' << fmt(gi.interval.lo) << ',' << fmt(gi.interval.hi) << '\n';
    }
    doc["intervals"] = std::move(ints);
    doc["reference_groups"] = rep.reference;
    doc["common_value"] = rep.common_value;
    doc["common_value_in_all"] = rep.common_value_in_all;
    Json qqs = Json::object();
    for (std::size_t i = 0; i < g.groups.size(); ++i) qqs[g.labels[i]] = qq_json(g.groups[i]);
    doc["qq"] = std::move(qqs);
  }
  if (!c.input.empty()) {
    const auto v = io::read_scores_file(c.input);
    doc["qq_input"] = qq_json(v);
    if (v.size() >= 2) {
      const auto ci = std_ci_chisq(v, c.confidence);
      doc["std"] = sample_std(v);
      doc["std_interval"] = {ci.lo, ci.hi};
    }
    for (const auto& p : normal_qq(v).points) csv << "qq," << fmt(p.theoretical) << ',' << fmt(p.sample) << ",,\n";
  }
  io::write_output(c.output, c.format == "csv" ? csv.str() : dump(doc));
  return kOk;
}

SyntheticSurface load_surface(const RunConfig& c) {
  SyntheticSurface s;
  const auto names = scenario_names();
  if (std::find(names.begin(), names.end(), c.scenario) != names.end()) {
    s = scenario(c.scenario, c.noise.value_or(0.0));
  } else {
    s = io::surface_from_json(io::read_json_file(c.scenario));
    if (c.noise) s.noise_sigma = *c.noise;
  }
  return s;
}

int cmd_simulate(const RunConfig& c) {
  if (c.noise && !(*c.noise >= 0.0)) throw InputError("--noise must be >= 0");
  if (!c.config.empty()) {
    const auto dist = io::search_distribution_from_json(io::read_json_file(c.config));
    std::ostringstream csv;
    csv << "trial";
    for (const auto& p : dist.params) csv << ',' << p.first;
    csv << '\n';
    Json doc = io::document("simulate", c.seed);
    doc["search_distribution"] = io::to_json(dist);
    Json configs = Json::array();
    for (std::size_t i = 0; i < c.n; ++i) {
      const auto x = dist.sample(c.seed, i);
      csv << i;
      Json row = Json::object();
      for (std::size_t j = 0; j < x.size(); ++j) {
        csv << ',' << fmt(x[j]);
        row[dist.params[j].first] = x[j];
      }
      csv << '\n';
      configs.push_back(std::move(row));
    }
    doc["configurations"] = std::move(configs);
    io::write_output(c.output, c.format == "csv" ? csv.str() : dump(doc));
    return kOk;
  }
  const auto surface = load_surface(c);
  const auto run = run_random_search(surface, c.n, c.seed);
  if (c.format == "csv") {
    std::ostringstream csv;
    csv << "trial,score\n";
    for (std::size_t i = 0; i < run.size(); ++i) csv << i << ',' << fmt(run.scores.scores[i]) << '\n';
    io::write_output(c.output, csv.str());
    return kOk;
  }
  Json doc = io::document("simulate", c.seed);
  doc["scenario"] = c.scenario;
  doc["surface"] = io::to_json(surface);
  doc["effective_dimension"] = surface.effective_dimension();
  doc["n"] = run.size();
  doc["scores"] = run.scores.scores;
  io::write_output(c.output, dump(doc));
  return kOk;
}

void add_common(CLI::App* sub, RunConfig& c) {
  sub->add_option("--output", c.output, "Output path (default stdout)");
  sub->add_option("--seed", c.seed, "Seed for every random choice");
  sub->add_option("--format", c.format, "json or csv")->check(CLI::IsMember({"json", "csv"}));
}

void add_input(CLI::App* sub, RunConfig& c) {
  sub->add_option("--input", c.input, "Scores (CSV with a score column, or JSON lines)");
  sub->add_option("--direction", c.direction, "min or max")->check(CLI::IsMember({"min", "max"}));
  sub->add_option("--confidence", c.confidence, "Band confidence");
}

void add_fit(CLI::App* sub, RunConfig& c) {
  sub->add_option("--threshold", c.threshold, "Asymptotic-regime threshold (scanned when absent)");
}

void add_grid(CLI::App* sub, RunConfig& c) {
  sub->add_option("--grid-alpha", c.grid.alpha, "Alpha grid size");
  sub->add_option("--grid-beta", c.grid.beta, "Beta grid size");
  sub->add_option("--grid-sigma", c.grid.sigma, "Sigma grid size");
  sub->add_option("--grid-gamma", c.grid.gamma, "Gamma grid size");
}

}  // namespace

int run(const std::vector<std::string>& args) {
  RunConfig c;
  CLI::App app{"Random-search score analysis: noisy quadratic tail fits and tuning curves"};
  app.require_subcommand(1, 1);

  auto* fit = app.add_subcommand("fit", "Fit the noisy quadratic to the score tail");
  add_common(fit, c);
  add_input(fit, c);
  add_fit(fit, c);

  auto* curve = app.add_subcommand("curve", "Parametric and nonparametric tuning curves with bands");
  add_common(curve, c);
  add_input(curve, c);
  add_fit(curve, c);
  add_grid(curve, c);
  curve->add_option("--k-max", c.k_max, "Largest search size k");

  auto* scan = app.add_subcommand("scan", "Fit at several candidate thresholds");
  add_common(scan, c);
  add_input(scan, c);
  scan->add_option("--candidates", c.candidates, "Candidate thresholds (default: regime fractions 0.1..0.9)")
      ->delimiter(',');

  auto* band = app.add_subcommand("band", "Consonance-region parametric CDF band");
  add_common(band, c);
  add_input(band, c);
  add_fit(band, c);
  add_grid(band, c);

  auto* diagnose = app.add_subcommand("diagnose", "Q-Q data and simultaneous std intervals");
  add_common(diagnose, c);
  diagnose->add_option("--groups", c.groups, "CSV with group and score columns");
  diagnose->add_option("--input", c.input, "Scores for a single Q-Q plot and std interval");
  diagnose->add_option("--confidence", c.confidence, "Overall confidence");
  diagnose->add_option("--reference", c.reference, "Group indices for the common-value check")->delimiter(',');

  auto* simulate = app.add_subcommand("simulate", "Random search on a synthetic quadratic surface");
  add_common(simulate, c);
  simulate->add_option("--scenario", c.scenario, "Scenario name or surface JSON file");
  simulate->add_option("--n", c.n, "Number of search iterations");
  simulate->add_option("--noise", c.noise, "Override the evaluation noise sigma");
  simulate->add_option("--config", c.config, "Sample configurations from a search-distribution JSON file");

  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kInputError;
  }

  try {
    c.validate();
    if (fit->parsed()) return cmd_fit(c);
    if (curve->parsed()) return cmd_curve(c);
    if (scan->parsed()) return cmd_scan(c);
    if (band->parsed()) return cmd_band(c);
    if (diagnose->parsed()) return cmd_diagnose(c);
    return cmd_simulate(c);
  } catch (const InputError& e) {
    std::cerr << "input error: " << e.what() << '\n';
    return kInputError;
  } catch (const DomainError& e) {
    std::cerr << "input error: " << e.what() << '\n';
    return kInputError;
  } catch (const InfeasibleFit& e) {
    std::cerr << "infeasible fit: " << e.what() << '\n';
    return kInfeasibleFit;
  } catch (const EmptyRegion& e) {
    std::cerr << "empty consonance region: " << e.what() << "; try wider or finer grids (--grid-*)\n";
    return kEmptyRegion;
  } catch (const NumericFailure& e) {
    std::cerr << "numeric failure: " << e.what() << '\n';
    return kNumericFailure;
  } catch (const std::exception& e) {
    std::cerr << "numeric failure: " << e.what() << '\n';
    return kNumericFailure;
  }
}

}  // namespace hpsurf::cli
