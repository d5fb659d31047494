#include "sara/simulation.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

#include "sara/diagnostics.hpp"
#include "sara/error.hpp"

namespace sara {

namespace {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

std::string format_setting(std::initializer_list<std::pair<const char*, double>> kv) {
  std::ostringstream os;
  bool first = true;
  for (const auto& [k, v] : kv) {
    if (!first) os << ' ';
    os << k << '=' << v;
    first = false;
  }
  return os.str();
}

// Estimated change-points of the thresholded scan, sorted by position.
std::vector<Index> thresholded_scan(const Series<double>& series, Index h,
                                    double lambda) {
  const auto cands = threshold_candidates(
      local_maximizers(equal_weight_diagnostic(series, h)), lambda);
  std::vector<Index> out;
  for (const auto& c : cands) out.push_back(c.position);
  std::sort(out.begin(), out.end());
  return out;
}

}  // namespace

double Rng::normal() {
  if (has_spare_) {
    has_spare_ = false;
    return spare_;
  }
  const double u1 = 1.0 - uniform();  // (0, 1]
  const double u2 = uniform();
  const double radius = std::sqrt(-2.0 * std::log(u1));
  const double angle = 2.0 * std::numbers::pi * u2;
  spare_ = radius * std::sin(angle);
  has_spare_ = true;
  return radius * std::cos(angle);
}

Index Rng::uniform_int(Index lo, Index hi) {
  const auto span = static_cast<std::uint64_t>(hi - lo + 1);
  // rejection keeps the draw unbiased
  const std::uint64_t limit = std::numeric_limits<std::uint64_t>::max() -
                              std::numeric_limits<std::uint64_t>::max() % span;
  std::uint64_t r;
  do {
    r = engine_();
  } while (r >= limit);
  return lo + static_cast<Index>(r % span);
}

std::uint64_t derive_seed(std::uint64_t master, std::uint64_t stream,
                          std::uint64_t index) {
  return splitmix64(splitmix64(master ^ splitmix64(stream)) + index);
}

void TruthSpec::validate() const {
  if (n < 2) throw Error(ErrorKind::InvalidSpec, "n must be at least 2");
  if (changepoints.size() != jump_sizes.size()) {
    throw Error(ErrorKind::InvalidSpec,
                "changepoints and jump_sizes differ in length");
  }
  for (std::size_t j = 0; j < changepoints.size(); ++j) {
    if (changepoints[j] <= 0 || changepoints[j] >= n ||
        (j > 0 && changepoints[j] <= changepoints[j - 1])) {
      throw Error(ErrorKind::InvalidSpec,
                  "change-points must be strictly increasing in (0, n)");
    }
  }
  if (!(sigma >= 0.0) || !(trend_amp >= 0.0) || !(trend_freq >= 0.0)) {
    throw Error(ErrorKind::InvalidSpec,
                "sigma, trend_amp and trend_freq must be nonnegative");
  }
}

VectorX<double> TruthSpec::mean() const {
  VectorX<double> mu(n);
  double level = baseline;
  std::size_t j = 0;
  for (Index i = 1; i <= n; ++i) {
    while (j < changepoints.size() && changepoints[j] < i) level += jump_sizes[j++];
    mu(i - 1) = level;
  }
  return mu;
}

TruthSpec buried_segment_spec(Index n, Index length, double delta, double sigma,
                              std::uint64_t seed) {
  TruthSpec spec;
  spec.n = n;
  spec.changepoints = {n / 2, n / 2 + length};
  spec.jump_sizes = {delta, -delta};
  spec.sigma = sigma;
  spec.seed = seed;
  return spec;
}

const char* to_string(Trend t) {
  switch (t) {
    case Trend::None: return "none";
    case Trend::Long: return "long";
    case Trend::Short: return "short";
  }
  return "?";
}

double trend_frequency(Trend t) {
  switch (t) {
    case Trend::None: return 0.0;
    case Trend::Long: return 0.01;
    case Trend::Short: return 0.025;
  }
  return 0.0;
}

TruthSpec copy_number_benchmark_spec(double sigma, Trend trend,
                                     std::uint64_t seed) {
  TruthSpec spec;
  spec.n = 497;
  spec.changepoints = {137, 224, 241, 298, 307, 331};
  spec.jump_sizes = {0.26, 0.99, -1.6, 0.69, -0.85, 0.53};
  spec.baseline = -0.18;
  spec.sigma = sigma;
  spec.trend_amp = trend == Trend::None ? 0.0 : 0.25 * sigma;
  spec.trend_freq = trend_frequency(trend);
  spec.seed = seed;
  return spec;
}

Series<double> generate(const TruthSpec& spec) {
  spec.validate();
  VectorX<double> y = spec.mean();
  Rng rng(spec.seed);
  for (Index i = 1; i <= spec.n; ++i) {
    double trend = 0.0;
    if (spec.trend_amp > 0.0) {
      trend = spec.trend_amp *
              std::sin(spec.trend_freq * std::numbers::pi * static_cast<double>(i));
    }
    y(i - 1) += trend + spec.sigma * rng.normal();
  }
  return Series<double>(std::move(y));
}

double lr_statistic(const Series<double>& series) {
  const Index n = series.size();
  const auto& y = series.values();
  const double total = y.sum();
  double partial = 0.0;
  double best = 0.0;
  for (Index j = 1; j <= n - 1; ++j) {
    partial += y(j - 1);
    const double frac = static_cast<double>(j) / static_cast<double>(n);
    const double diff = static_cast<double>(j) * total / static_cast<double>(n) - partial;
    best = std::max(best, diff * diff / (static_cast<double>(j) * (1.0 - frac)));
  }
  return best;
}

double max_abs_diagnostic(const Series<double>& series, Index h) {
  return equal_weight_diagnostic(series, h).values.cwiseAbs().maxCoeff();
}

double theorem1_bound(double delta, Index length, double sigma, Index n) {
  const double s2 = delta * delta * static_cast<double>(length) / (sigma * sigma);
  const double log_n = std::log(static_cast<double>(n));
  // relative slack so that the boundary case S^2 == 32 log n survives rounding
  if (!(s2 >= 32.0 * log_n * (1.0 - 1e-12))) return 0.0;
  const double s = std::sqrt(s2);
  return std::max(0.0, 1.0 - 8.0 / s * std::exp(log_n - s2 / 32.0));
}

DetectionResult detection_metrics(const std::vector<Index>& truth,
                                  const std::vector<Index>& estimate, Index tol) {
  if (tol < 0) throw Error(ErrorKind::InvalidConfig, "tolerance must be >= 0");
  struct Pair {
    Index dist;
    std::size_t t;
    std::size_t e;
  };
  std::vector<Pair> pairs;
  for (std::size_t t = 0; t < truth.size(); ++t) {
    for (std::size_t e = 0; e < estimate.size(); ++e) {
      const Index d = std::abs(truth[t] - estimate[e]);
      if (d <= tol) pairs.push_back({d, t, e});
    }
  }
  std::sort(pairs.begin(), pairs.end(), [](const Pair& a, const Pair& b) {
    if (a.dist != b.dist) return a.dist < b.dist;
    if (a.t != b.t) return a.t < b.t;
    return a.e < b.e;
  });

  DetectionResult out;
  out.detected.assign(truth.size(), false);
  std::vector<bool> used(estimate.size(), false);
  for (const auto& p : pairs) {
    if (out.detected[p.t] || used[p.e]) continue;
    out.detected[p.t] = true;
    used[p.e] = true;
  }
  for (Index e : estimate) {
    const bool near = std::any_of(truth.begin(), truth.end(),
                                  [&](Index t) { return std::abs(t - e) <= tol; });
    if (!near) ++out.false_discoveries;
  }
  return out;
}

double StudyReport::jhat_fraction(Index j) const {
  if (replicate_count == 0) return 0.0;
  const auto it = jhat_histogram.find(j);
  const Index count = it == jhat_histogram.end() ? 0 : it->second;
  return static_cast<double>(count) / static_cast<double>(replicate_count);
}

double StudyReport::mean_jhat() const {
  if (replicate_count == 0) return 0.0;
  double total = 0.0;
  for (const auto& [j, c] : jhat_histogram) total += static_cast<double>(j * c);
  return total / static_cast<double>(replicate_count);
}

StudyReport coverage_study(const CoverageConfig& cfg) {
  if (cfg.reps < 1) throw Error(ErrorKind::InvalidConfig, "reps must be positive");
  StudyReport report;
  report.method = "SaRa(h=" + std::to_string(cfg.bandwidth) + ")";
  report.setting = format_setting({{"n", static_cast<double>(cfg.n)},
                                   {"L", static_cast<double>(cfg.length)},
                                   {"sigma", cfg.sigma},
                                   {"h", static_cast<double>(cfg.bandwidth)},
                                   {"lambda", cfg.lambda}});
  report.replicate_count = cfg.reps;

  std::vector<Index> covered(2, 0);
  std::vector<double> error_sum(2, 0.0);
  Index joint = 0;
  for (Index r = 0; r < cfg.reps; ++r) {
    const auto spec = buried_segment_spec(cfg.n, cfg.length, cfg.delta, cfg.sigma,
                                          derive_seed(cfg.seed, 1, r));
    const auto est = thresholded_scan(generate(spec), cfg.bandwidth, cfg.lambda);
    ++report.jhat_histogram[static_cast<Index>(est.size())];

    bool all_within = est.size() == spec.changepoints.size();
    for (std::size_t j = 0; j < spec.changepoints.size(); ++j) {
      const Index tau = spec.changepoints[j];
      Index nearest = -1;
      for (Index e : est) {
        if (nearest < 0 || std::abs(e - tau) < nearest) nearest = std::abs(e - tau);
      }
      if (nearest >= 0 && nearest < cfg.bandwidth) {
        ++covered[j];
        error_sum[j] += static_cast<double>(nearest);
      }
      if (all_within && std::abs(est[j] - tau) >= cfg.bandwidth) all_within = false;
    }
    if (all_within) ++joint;
  }
  for (std::size_t j = 0; j < 2; ++j) {
    CoverageStat s;
    s.scp = static_cast<double>(covered[j]) / static_cast<double>(cfg.reps);
    s.mean_abs_error =
        covered[j] > 0 ? error_sum[j] / static_cast<double>(covered[j]) : 0.0;
    report.scp_per_cp.push_back(s);
  }
  report.joint_coverage = static_cast<double>(joint) / static_cast<double>(cfg.reps);
  return report;
}

std::vector<StudyReport> sure_coverage_study(
    const std::vector<std::pair<Index, Index>>& pairs, double delta,
    const std::vector<double>& sigmas, Index reps, std::uint64_t seed) {
  std::vector<StudyReport> out;
  std::uint64_t stream = 0;
  for (const auto& [n, length] : pairs) {
    for (double sigma : sigmas) {
      CoverageConfig cfg;
      cfg.n = n;
      cfg.length = length;
      cfg.delta = delta;
      cfg.sigma = sigma;
      cfg.bandwidth = std::max<Index>(
          1, static_cast<Index>(std::nearbyint(0.75 * static_cast<double>(length))));
      cfg.lambda = 0.75 * delta;
      cfg.reps = reps;
      cfg.seed = derive_seed(seed, 10, stream++);
      out.push_back(coverage_study(cfg));
    }
  }
  return out;
}

StudyReport power_study(const PowerConfig& cfg) {
  if (cfg.calibration_reps < 1 || cfg.reps < 1) {
    throw Error(ErrorKind::InvalidConfig, "reps must be positive");
  }
  for (double a : cfg.alphas) {
    if (!(a > 0.0 && a < 1.0)) throw Error(ErrorKind::InvalidConfig, "alpha must be in (0, 1)");
  }
  if (cfg.bandwidths.empty()) {
    throw Error(ErrorKind::InvalidConfig, "at least one bandwidth is required");
  }
  const Index h_max = *std::max_element(cfg.bandwidths.begin(), cfg.bandwidths.end());
  if (2 * h_max + 2 > cfg.n) {
    throw Error(ErrorKind::InvalidConfig, "bandwidths too large for n");
  }

  std::vector<std::string> tests{"LR"};
  for (Index h : cfg.bandwidths) tests.push_back("SaRa(h=" + std::to_string(h) + ")");
  auto statistics = [&](const Series<double>& s) {
    std::vector<double> v{lr_statistic(s)};
    for (Index h : cfg.bandwidths) v.push_back(max_abs_diagnostic(s, h));
    return v;
  };

  StudyReport report;
  report.method = "power";
  report.setting = format_setting({{"n", static_cast<double>(cfg.n)}});
  report.replicate_count = cfg.reps;

  // null distribution of every statistic
  std::vector<std::vector<double>> null(tests.size());
  for (Index r = 0; r < cfg.calibration_reps; ++r) {
    TruthSpec spec;
    spec.n = cfg.n;
    spec.seed = derive_seed(cfg.seed, 2, r);
    const auto v = statistics(generate(spec));
    for (std::size_t t = 0; t < tests.size(); ++t) null[t].push_back(v[t]);
  }
  // critical[a][t]: reject when the statistic exceeds the (1 - alpha) quantile
  std::vector<std::vector<double>> critical(cfg.alphas.size(),
                                            std::vector<double>(tests.size()));
  for (std::size_t t = 0; t < tests.size(); ++t) {
    std::sort(null[t].begin(), null[t].end());
    for (std::size_t a = 0; a < cfg.alphas.size(); ++a) {
      const auto rank = static_cast<std::size_t>(
          std::ceil((1.0 - cfg.alphas[a]) * static_cast<double>(cfg.calibration_reps)));
      critical[a][t] = null[t][std::clamp<std::size_t>(rank, 1, null[t].size()) - 1];
      report.critical_values.push_back({tests[t], cfg.alphas[a], critical[a][t]});
    }
  }

  for (std::size_t li = 0; li < cfg.locations.size(); ++li) {
    const Index loc = cfg.locations[li];
    if (loc != 0 && (loc < 1 || loc >= cfg.n)) {
      throw Error(ErrorKind::InvalidConfig, "location outside (0, n)");
    }
    const std::string loc_label = loc == 0 ? "uniform" : std::to_string(loc);
    for (std::size_t ji = 0; ji < cfg.jsr_grid.size(); ++ji) {
      const double jsr = cfg.jsr_grid[ji];
      std::vector<std::vector<Index>> rejections(
          cfg.alphas.size(), std::vector<Index>(tests.size(), 0));
      for (Index r = 0; r < cfg.reps; ++r) {
        const std::uint64_t rep_seed = derive_seed(cfg.seed, 100 + li * 1000 + ji, r);
        TruthSpec spec;
        spec.n = cfg.n;
        spec.seed = rep_seed;
        Index tau = loc;
        if (tau == 0) {
          Rng loc_rng(derive_seed(rep_seed, 7, 0));
          tau = loc_rng.uniform_int(h_max + 1, cfg.n - h_max - 1);
        }
        spec.changepoints = {tau};
        spec.jump_sizes = {jsr};
        const auto v = statistics(generate(spec));
        for (std::size_t a = 0; a < cfg.alphas.size(); ++a) {
          for (std::size_t t = 0; t < tests.size(); ++t) {
            if (v[t] > critical[a][t]) ++rejections[a][t];
          }
        }
      }
      for (std::size_t a = 0; a < cfg.alphas.size(); ++a) {
        for (std::size_t t = 0; t < tests.size(); ++t) {
          report.power.push_back({jsr, tests[t], loc_label, cfg.alphas[a],
                                  static_cast<double>(rejections[a][t]) /
                                      static_cast<double>(cfg.reps)});
        }
      }
    }
  }
  return report;
}

std::vector<StudyReport> copy_number_study(const CopyNumberStudyConfig& cfg) {
  if (cfg.reps < 1) throw Error(ErrorKind::InvalidConfig, "reps must be positive");
  const std::size_t methods = cfg.single_bandwidths.size() + 1;
  std::vector<StudyReport> reports(methods);
  const std::string setting =
      format_setting({{"sigma", cfg.sigma}}) + " trend=" + to_string(cfg.trend);
  for (std::size_t m = 0; m < cfg.single_bandwidths.size(); ++m) {
    reports[m].method = "SaRa(h=" + std::to_string(cfg.single_bandwidths[m]) + ")";
  }
  reports.back().method = "m-SaRa";

  std::vector<std::vector<Index>> detected(methods, std::vector<Index>(6, 0));
  std::vector<Index> false_total(methods, 0);

  MultiBandConfig<double> mcfg;
  mcfg.bandwidths = cfg.multi_bandwidths;
  mcfg.threshold_constant = cfg.threshold_constant;
  mcfg.criterion = cfg.criterion;

  for (Index r = 0; r < cfg.reps; ++r) {
    const auto spec =
        copy_number_benchmark_spec(cfg.sigma, cfg.trend, derive_seed(cfg.seed, 4, r));
    const auto series = generate(spec);

    std::vector<SegmentationModel<double>> models;
    for (Index h : cfg.single_bandwidths) {
      const auto cands = local_maximizers(equal_weight_diagnostic(series, h));
      models.push_back(rank_select(series, cands, cfg.criterion));
    }
    models.push_back(msara_detect(series, mcfg));

    for (std::size_t m = 0; m < methods; ++m) {
      const auto& cps = models[m].changepoints;
      ++reports[m].jhat_histogram[static_cast<Index>(cps.size())];
      const auto det = detection_metrics(spec.changepoints, cps, cfg.tol);
      if (detected[m].size() != det.detected.size()) {
        detected[m].assign(det.detected.size(), 0);
      }
      for (std::size_t j = 0; j < det.detected.size(); ++j) {
        if (det.detected[j]) ++detected[m][j];
      }
      false_total[m] += det.false_discoveries;
    }
  }

  for (std::size_t m = 0; m < methods; ++m) {
    auto& rep = reports[m];
    rep.setting = setting;
    rep.replicate_count = cfg.reps;
    for (Index d : detected[m]) {
      rep.detection_rate_per_cp.push_back(static_cast<double>(d) /
                                          static_cast<double>(cfg.reps));
    }
    rep.afd = static_cast<double>(false_total[m]) / static_cast<double>(cfg.reps);
  }
  return reports;
}

void write_coverage_tsv(std::ostream& os, const std::vector<StudyReport>& reports) {
  os << "setting\tmethod\treps\tJ_eq2\tJ_lt2\tJ_gt2\tJ_mean"
        "\tcp1_scp\tcp1_mean_err\tcp2_scp\tcp2_mean_err\tjoint_scp\n";
  for (const auto& r : reports) {
    double lt = 0.0, gt = 0.0;
    for (const auto& [j, c] : r.jhat_histogram) {
      const double f = static_cast<double>(c) / static_cast<double>(r.replicate_count);
      if (j < 2) lt += f;
      if (j > 2) gt += f;
    }
    os << r.setting << '\t' << r.method << '\t' << r.replicate_count << '\t'
       << r.jhat_fraction(2) << '\t' << lt << '\t' << gt << '\t' << r.mean_jhat();
    for (const auto& s : r.scp_per_cp) os << '\t' << s.scp << '\t' << s.mean_abs_error;
    os << '\t' << r.joint_coverage << '\n';
  }
}

void write_model_size_tsv(std::ostream& os, const std::vector<StudyReport>& reports) {
  os << "setting\tmethod\tle5\t6\t7\t8\tgt8\n";
  for (const auto& r : reports) {
    Index le5 = 0, gt8 = 0;
    for (const auto& [j, c] : r.jhat_histogram) {
      if (j <= 5) le5 += c;
      if (j > 8) gt8 += c;
    }
    auto count = [&](Index j) {
      const auto it = r.jhat_histogram.find(j);
      return it == r.jhat_histogram.end() ? Index{0} : it->second;
    };
    os << r.setting << '\t' << r.method << '\t' << le5 << '\t' << count(6) << '\t'
       << count(7) << '\t' << count(8) << '\t' << gt8 << '\n';
  }
}

void write_detection_tsv(std::ostream& os, const std::vector<StudyReport>& reports) {
  os << "setting\tmethod";
  const std::size_t cols = reports.empty() ? 0 : reports.front().detection_rate_per_cp.size();
  for (std::size_t j = 0; j < cols; ++j) os << "\tcp" << (j + 1);
  os << "\tafd\n";
  for (const auto& r : reports) {
    os << r.setting << '\t' << r.method;
    for (double d : r.detection_rate_per_cp) os << '\t' << d;
    os << '\t' << r.afd << '\n';
  }
}

void write_power_tsv(std::ostream& os, const StudyReport& report) {
  os << "jsr\ttest\tlocation\talpha\tpower\n";
  for (const auto& p : report.power) {
    os << p.jsr << '\t' << p.test << '\t' << p.location << '\t' << p.alpha << '\t'
       << p.power << '\n';
  }
}

}  // namespace sara
