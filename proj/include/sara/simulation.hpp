#pragma once

// Synthetic piecewise-constant data and the Monte-Carlo studies built on it:
// single change-point power, sure coverage, and the six change-point
// copy-number benchmark with an optional sinusoidal trend.

#include <cstdint>
#include <map>
#include <ostream>
#include <random>
#include <string>
#include <utility>
#include <vector>

#include "sara/multibandwidth.hpp"
#include "sara/selection.hpp"
#include "sara/series.hpp"

namespace sara {

/// mt19937_64 with a fixed bit-to-double map and a Box-Muller normal
/// transform, so a seed produces the same stream on every platform
/// (std::normal_distribution is implementation defined).
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  /// Uniform on [0, 1) with 53 random bits.
  double uniform() {
    return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
  }

  double normal();

  /// Uniform integer on [lo, hi].
  Index uniform_int(Index lo, Index hi);

 private:
  std::mt19937_64 engine_;
  bool has_spare_ = false;
  double spare_ = 0.0;
};

/// Seed for replicate `index` of stream `stream`, independent of how
/// replicates are scheduled.
std::uint64_t derive_seed(std::uint64_t master, std::uint64_t stream,
                          std::uint64_t index);

struct TruthSpec {
  Index n = 0;
  std::vector<Index> changepoints;
  std::vector<double> jump_sizes;
  double baseline = 0.0;
  double sigma = 1.0;
  double trend_amp = 0.0;   // trend_i = trend_amp * sin(trend_freq * pi * i)
  double trend_freq = 0.0;
  std::uint64_t seed = 0;

  void validate() const;
  /// mu_i = baseline + sum_{tau_j < i} delta_j, 1-based i.
  VectorX<double> mean() const;
};

/// Short CNV of length L in the middle of a flat series:
/// mu_i = delta * 1{n/2 < i <= n/2 + L}.
TruthSpec buried_segment_spec(Index n, Index length, double delta, double sigma,
                              std::uint64_t seed);

enum class Trend { None, Long, Short };

const char* to_string(Trend t);
double trend_frequency(Trend t);

/// Six change-points over 497 markers with trend 0.25 sigma sin(a pi i).
TruthSpec copy_number_benchmark_spec(double sigma, Trend trend,
                                     std::uint64_t seed);

Series<double> generate(const TruthSpec& spec);

/// Likelihood-ratio statistic for a single mean shift (unit variance):
/// max_j (j S_n / n - S_j)^2 / (j (1 - j/n)).
double lr_statistic(const Series<double>& series);

/// max over the domain of |D(x, h)|, the single-change scan statistic.
double max_abs_diagnostic(const Series<double>& series, Index h);

double theorem1_bound(double delta, Index length, double sigma, Index n);

struct DetectionResult {
  std::vector<bool> detected;  // per true change-point
  Index false_discoveries = 0;
};

/// A true change-point is detected when an estimate within tol is matched to
/// it (greedy by distance, one estimate per truth). An estimate is a false
/// discovery when no true change-point lies within tol.
DetectionResult detection_metrics(const std::vector<Index>& truth,
                                  const std::vector<Index>& estimate,
                                  Index tol = 5);

struct CoverageStat {
  double scp = 0.0;             // fraction with an estimate within h
  double mean_abs_error = 0.0;  // over covered replicates
};

struct PowerPoint {
  double jsr = 0.0;
  std::string test;
  std::string location;  // index or "uniform"
  double alpha = 0.0;
  double power = 0.0;
};

struct CriticalValue {
  std::string test;
  double alpha = 0.0;
  double value = 0.0;
};

struct StudyReport {
  std::string method;
  std::string setting;
  Index replicate_count = 0;
  std::map<Index, Index> jhat_histogram;
  std::vector<CoverageStat> scp_per_cp;
  double joint_coverage = 0.0;  // P(J^ = J and every |tau^_j - tau_j| < h)
  std::vector<double> detection_rate_per_cp;
  double afd = 0.0;
  std::vector<PowerPoint> power;
  std::vector<CriticalValue> critical_values;

  double jhat_fraction(Index j) const;
  double mean_jhat() const;
};

struct CoverageConfig {
  Index n = 400;
  Index length = 12;
  double delta = 1.0;
  double sigma = 0.25;
  Index bandwidth = 9;
  double lambda = 0.75;
  Index reps = 1000;
  std::uint64_t seed = 1;
};

/// Thresholded single-bandwidth scan on buried-segment data.
StudyReport coverage_study(const CoverageConfig& cfg);

/// The standard grid: h = round(3L/4), lambda = 3 delta / 4 for every
/// (n, L) pair and sigma.
std::vector<StudyReport> sure_coverage_study(
    const std::vector<std::pair<Index, Index>>& pairs, double delta,
    const std::vector<double>& sigmas, Index reps, std::uint64_t seed);

struct PowerConfig {
  Index n = 100;
  std::vector<double> jsr_grid{0.0, 0.5, 1.0, 1.5, 2.0, 2.5};
  std::vector<Index> locations{10, 30, 50, 0};  // 0 = uniform
  std::vector<double> alphas{0.05, 0.01};
  std::vector<Index> bandwidths{10, 15};
  Index calibration_reps = 10000;
  Index reps = 10000;
  std::uint64_t seed = 1;
};

/// Monte-Carlo calibrated power of the LR test and of max |D(x,h)| for each
/// bandwidth, at unit noise.
StudyReport power_study(const PowerConfig& cfg);

struct CopyNumberStudyConfig {
  double sigma = 0.2;
  Trend trend = Trend::None;
  Index reps = 1000;
  std::uint64_t seed = 1;
  std::vector<Index> single_bandwidths{9, 15, 21};
  std::vector<Index> multi_bandwidths{9, 15, 21};
  double threshold_constant = 2.0;
  Criterion criterion = Criterion::MBIC;
  Index tol = 5;
};

/// One report per method: single-bandwidth scan + ranking, then the
/// multi-bandwidth pipeline (last entry).
std::vector<StudyReport> copy_number_study(const CopyNumberStudyConfig& cfg);

void write_coverage_tsv(std::ostream& os, const std::vector<StudyReport>& reports);
void write_model_size_tsv(std::ostream& os, const std::vector<StudyReport>& reports);
void write_detection_tsv(std::ostream& os, const std::vector<StudyReport>& reports);
void write_power_tsv(std::ostream& os, const StudyReport& report);

}  // namespace sara
