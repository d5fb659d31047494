#include "sara/app.hpp"

#include <algorithm>
#include <chrono>
#include <fstream>
#include <iostream>
#include <sstream>

#include "sara/error.hpp"
#include "sara/io.hpp"

namespace sara {

namespace {

std::string trim(std::string s) {
  const auto first = s.find_first_not_of(" \t");
  const auto last = s.find_last_not_of(" \t");
  if (first == std::string::npos) return {};
  return s.substr(first, last - first + 1);
}

double parse_real(const std::string& text, const std::string& what) {
  try {
    std::size_t used = 0;
    const double v = std::stod(text, &used);
    if (used != text.size()) throw std::invalid_argument(text);
    return v;
  } catch (const std::logic_error&) {
    throw Error(ErrorKind::InvalidConfig, "bad " + what + " '" + text + "'");
  }
}

std::ofstream open_output(const std::string& path) {
  std::ofstream out(path);
  if (!out) throw Error(ErrorKind::IoError, "cannot write '" + path + "'");
  return out;
}

}  // namespace

ThresholdRule parse_threshold_rule(const std::string& text, double C) {
  if (text == "c-sigma") return {ThresholdRule::Kind::CSigma, C};
  if (text == "log-n") return {ThresholdRule::Kind::LogN, 0.0};
  if (text.rfind("fixed:", 0) == 0) {
    const double lambda = parse_real(text.substr(6), "threshold");
    if (!(lambda >= 0.0)) {
      throw Error(ErrorKind::InvalidConfig, "fixed threshold must be >= 0");
    }
    return {ThresholdRule::Kind::Fixed, lambda};
  }
  throw Error(ErrorKind::InvalidConfig,
              "threshold rule must be c-sigma, log-n or fixed:<lambda>");
}

Criterion parse_criterion(const std::string& text) {
  if (text == "threshold") return Criterion::Threshold;
  if (text == "bic") return Criterion::BIC;
  if (text == "mbic") return Criterion::MBIC;
  throw Error(ErrorKind::InvalidConfig, "criterion must be threshold, bic or mbic");
}

Method parse_method(const std::string& text) {
  if (text == "sara") return Method::Sara;
  if (text == "msara") return Method::MSara;
  throw Error(ErrorKind::InvalidConfig, "method must be sara or msara");
}

std::vector<Index> parse_bandwidths(const std::string& text) {
  if (text.empty() || text == "auto") return {};
  std::vector<Index> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    item = trim(item);
    const double v = parse_real(item, "bandwidth");
    if (v != static_cast<double>(static_cast<Index>(v)) || v < 1) {
      throw Error(ErrorKind::InvalidConfig, "bandwidths must be positive integers");
    }
    out.push_back(static_cast<Index>(v));
  }
  if (out.empty()) throw Error(ErrorKind::InvalidConfig, "empty bandwidth list");
  return out;
}

DetectResult detect_series(const Series<double>& series, const RunConfig& cfg) {
  const Index n = series.size();
  DetectResult result;

  if (cfg.method == Method::Sara) {
    if (cfg.bandwidths.size() > 1) {
      throw Error(ErrorKind::InvalidConfig, "sara takes a single bandwidth");
    }
    const Index h = cfg.bandwidths.empty()
                        ? std::clamp<Index>(kDefaultSingleBandwidth, 1, n / 2)
                        : cfg.bandwidths.front();
    const ThresholdRule rule =
        cfg.threshold_rule.value_or(ThresholdRule{ThresholdRule::Kind::LogN, 0.0});
    result.profile = equal_weight_diagnostic(series, h);
    result.sigma = cfg.sigma ? *cfg.sigma : estimate_sigma(series, h);
    result.candidates = local_maximizers(result.profile);
    if (cfg.criterion == Criterion::Threshold) {
      const double lambda = rule.lambda(n, h, result.sigma);
      std::vector<Index> cps;
      for (const auto& c : threshold_candidates(result.candidates, lambda)) {
        cps.push_back(c.position);
      }
      std::sort(cps.begin(), cps.end());
      result.model = fit_segments(series, std::move(cps), Criterion::Threshold);
      result.model.score = lambda;
    } else {
      Index jmax = cfg.jmax;
      if (jmax >= 0) {
        jmax = std::min<Index>(jmax, static_cast<Index>(result.candidates.size()));
      }
      result.model = rank_select(series, result.candidates, cfg.criterion, jmax);
    }
    return result;
  }

  if (cfg.criterion == Criterion::Threshold) {
    throw Error(ErrorKind::InvalidConfig, "msara needs --criterion bic or mbic");
  }
  std::vector<Index> bandwidths =
      cfg.bandwidths.empty() ? default_bandwidths(n) : cfg.bandwidths;
  MultiBandConfig<double> mcfg;
  mcfg.bandwidths = bandwidths;
  mcfg.threshold_constant = cfg.C;
  mcfg.criterion = cfg.criterion;
  mcfg.sigma_source =
      cfg.sigma ? SigmaSource::known(*cfg.sigma) : SigmaSource::estimated();
  validate(mcfg);
  const ThresholdRule rule = cfg.threshold_rule.value_or(mcfg.rule());

  result.sigma = resolve_sigma(series, mcfg.sigma_source, bandwidths);
  result.profile = equal_weight_diagnostic(
      series, *std::min_element(bandwidths.begin(), bandwidths.end()));
  result.candidates = pool_candidates(series, bandwidths, rule, result.sigma);
  result.model =
      refine_pool(series, result.candidates, cfg.criterion, mcfg.best_subset_limit);
  return result;
}

void write_detection(std::ostream& os, const std::vector<Series<double>>& series,
                     const std::vector<DetectResult>& results) {
  os << "label\tstart\tend\tmean\n";
  for (std::size_t i = 0; i < series.size(); ++i) {
    write_segments_tsv(os, series[i], results[i].model);
  }
}

void run_detect(const RunConfig& cfg) {
  if (cfg.input_path.empty()) {
    throw Error(ErrorKind::InvalidConfig, "detect requires an input file");
  }
  const auto series = ingest_file(cfg.input_path);
  std::vector<DetectResult> results;
  results.reserve(series.size());
  for (const auto& s : series) results.push_back(detect_series(s, cfg));

  if (cfg.output_path.empty()) {
    write_detection(std::cout, series, results);
  } else {
    auto out = open_output(cfg.output_path);
    write_detection(out, series, results);
  }

  if (!cfg.profile_path.empty()) {
    for (std::size_t i = 0; i < series.size(); ++i) {
      // one file per label when the input holds several
      const std::string path = series.size() == 1
                                   ? cfg.profile_path
                                   : cfg.profile_path + "." + series[i].label();
      auto out = open_output(path);
      write_profile_tsv(out, results[i].profile);
    }
  }
}

Design parse_design(const std::string& text) {
  if (text == "coverage") return Design::Coverage;
  if (text == "copy-number") return Design::CopyNumber;
  if (text == "power") return Design::Power;
  if (text == "theorem1") return Design::Theorem1;
  throw Error(ErrorKind::InvalidConfig,
              "design must be coverage, copy-number, power or theorem1");
}

std::vector<Theorem1Setting> theorem1_settings() {
  return {{400, 50, 1.0, 0.5}, {1000, 40, 1.0, 0.4}, {2000, 60, 1.0, 0.45}};
}

std::vector<Theorem1Row> theorem1_check(Index reps, std::uint64_t seed) {
  std::vector<Theorem1Row> rows;
  std::uint64_t stream = 0;
  for (const auto& s : theorem1_settings()) {
    CoverageConfig cfg;
    cfg.n = s.n;
    cfg.length = s.length;
    cfg.delta = s.delta;
    cfg.sigma = s.sigma;
    cfg.bandwidth = s.length / 2;
    cfg.lambda = s.delta / 2.0;
    cfg.reps = reps;
    cfg.seed = derive_seed(seed, 20, stream++);
    const auto report = coverage_study(cfg);
    rows.push_back({s, theorem1_bound(s.delta, s.length, s.sigma, s.n),
                    report.joint_coverage});
  }
  return rows;
}

void run_simulate(const SimulateConfig& cfg, std::ostream& os) {
  switch (cfg.design) {
    case Design::Coverage: {
      const auto reports = sure_coverage_study(
          {{400, 12}, {3000, 16}, {20000, 20}, {160000, 24}}, 1.0, {0.5, 0.25},
          cfg.reps, cfg.seed);
      write_coverage_tsv(os, reports);
      return;
    }
    case Design::CopyNumber: {
      CopyNumberStudyConfig scfg;
      scfg.sigma = cfg.sigma;
      scfg.trend = cfg.trend;
      scfg.reps = cfg.reps;
      scfg.seed = cfg.seed;
      const auto reports = copy_number_study(scfg);
      write_model_size_tsv(os, reports);
      if (!cfg.detection_path.empty()) {
        auto out = open_output(cfg.detection_path);
        write_detection_tsv(out, reports);
      }
      return;
    }
    case Design::Power: {
      PowerConfig pcfg;
      pcfg.calibration_reps = cfg.reps;
      pcfg.reps = cfg.reps;
      pcfg.seed = cfg.seed;
      write_power_tsv(os, power_study(pcfg));
      return;
    }
    case Design::Theorem1: {
      os << "n\tL\tdelta\tsigma\th\tlambda\tbound\tempirical_scp\n";
      for (const auto& r : theorem1_check(cfg.reps, cfg.seed)) {
        os << r.setting.n << '\t' << r.setting.length << '\t' << r.setting.delta
           << '\t' << r.setting.sigma << '\t' << r.setting.length / 2 << '\t'
           << r.setting.delta / 2.0 << '\t' << r.bound << '\t' << r.empirical << '\n';
      }
      return;
    }
  }
}

std::vector<BenchRow> run_bench(const std::vector<Index>& n_grid, Index reps,
                                std::uint64_t seed, Index bandwidth) {
  if (reps < 1) throw Error(ErrorKind::InvalidConfig, "reps must be positive");
  for (std::size_t i = 0; i < n_grid.size(); ++i) {
    if (n_grid[i] < 2 * bandwidth || (i > 0 && n_grid[i] <= n_grid[i - 1])) {
      throw Error(ErrorKind::InvalidConfig,
                  "n grid must be increasing and at least 2h");
    }
  }
  std::vector<BenchRow> rows;
  for (std::size_t i = 0; i < n_grid.size(); ++i) {
    TruthSpec spec;
    spec.n = n_grid[i];
    spec.seed = derive_seed(seed, 30, i);
    const auto series = generate(spec);

    std::vector<double> times;
    volatile std::size_t sink = 0;  // keeps the timed work observable
    for (Index r = 0; r < reps; ++r) {
      const auto start = std::chrono::steady_clock::now();
      const double sigma = estimate_sigma(series, bandwidth);
      const auto profile = equal_weight_diagnostic(series, bandwidth);
      const ThresholdRule rule{ThresholdRule::Kind::LogN, 0.0};
      const auto kept = threshold_candidates(
          local_maximizers(profile), rule.lambda(series.size(), bandwidth, sigma));
      const auto stop = std::chrono::steady_clock::now();
      sink = kept.size();
      times.push_back(std::chrono::duration<double>(stop - start).count());
    }
    std::nth_element(times.begin(), times.begin() + static_cast<long>(times.size() / 2),
                     times.end());
    rows.push_back({n_grid[i], times[times.size() / 2]});
    static_cast<void>(sink);
  }
  return rows;
}

void write_bench_tsv(std::ostream& os, const std::vector<BenchRow>& rows) {
  os << "n\tmedian_seconds\n";
  for (const auto& r : rows) os << r.n << '\t' << r.median_seconds << '\n';
}

}  // namespace sara
