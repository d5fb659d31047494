#pragma once

// Glue between the command line and the library: run configurations and the
// detect / simulate / bench drivers. Everything here is callable directly so
// CLI output can be checked against the library API.

#include <cstdint>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "sara/diagnostics.hpp"
#include "sara/multibandwidth.hpp"
#include "sara/selection.hpp"
#include "sara/series.hpp"
#include "sara/simulation.hpp"

namespace sara {

enum class Method { Sara, MSara };

struct RunConfig {
  std::string input_path;
  std::string output_path;   // empty: stdout
  std::string profile_path;  // empty: no profile dump
  Method method = Method::MSara;
  std::vector<Index> bandwidths;  // empty: automatic
  // Unset: log-n rule for sara, C * sqrt(2/h) * sigma for msara.
  std::optional<ThresholdRule> threshold_rule;
  double C = 2.0;
  Criterion criterion = Criterion::MBIC;
  std::optional<double> sigma;
  std::uint64_t seed = 1;
  Index jmax = -1;  // sara + bic/mbic only; < 0 means default
};

/// Parses "c-sigma", "log-n" or "fixed:<lambda>".
ThresholdRule parse_threshold_rule(const std::string& text, double C);
Criterion parse_criterion(const std::string& text);
Method parse_method(const std::string& text);
/// "auto" or a comma-separated list of positive integers.
std::vector<Index> parse_bandwidths(const std::string& text);

struct DetectResult {
  SegmentationModel<double> model;
  DiagnosticProfile<double> profile;  // at the first (smallest) bandwidth
  CandidateSet<double> candidates;    // the ranked set selection started from
  double sigma = 0.0;
};

/// Bandwidth used when --bandwidths is auto for single-bandwidth runs.
inline constexpr Index kDefaultSingleBandwidth = 10;

DetectResult detect_series(const Series<double>& series, const RunConfig& cfg);

/// Segments of every series, label-sorted, as one TSV table.
void write_detection(std::ostream& os, const std::vector<Series<double>>& series,
                     const std::vector<DetectResult>& results);

/// Reads cfg.input_path, detects per label, writes the segmentation (and the
/// profile when requested).
void run_detect(const RunConfig& cfg);

enum class Design { Coverage, CopyNumber, Power, Theorem1 };

Design parse_design(const std::string& text);

struct SimulateConfig {
  Design design = Design::CopyNumber;
  Index reps = 1000;
  std::uint64_t seed = 1;
  double sigma = 0.2;        // copy-number design
  Trend trend = Trend::None; // copy-number design
  std::string output_path;
  std::string detection_path;  // copy-number design: per-CP detection table
};

struct Theorem1Setting {
  Index n;
  Index length;
  double delta;
  double sigma;
};

/// Parameter settings satisfying S^2 > 32 log n used to check the coverage
/// guarantee with h = L/2 and lambda = delta/2.
std::vector<Theorem1Setting> theorem1_settings();

struct Theorem1Row {
  Theorem1Setting setting;
  double bound = 0.0;
  double empirical = 0.0;
};

std::vector<Theorem1Row> theorem1_check(Index reps, std::uint64_t seed);

void run_simulate(const SimulateConfig& cfg, std::ostream& os);

struct BenchRow {
  Index n = 0;
  double median_seconds = 0.0;
};

/// Wall-clock of the equal-weight screen + rank (no model selection), median
/// over reps, on N(0,1) data.
std::vector<BenchRow> run_bench(const std::vector<Index>& n_grid, Index reps,
                                std::uint64_t seed, Index bandwidth = 10);
void write_bench_tsv(std::ostream& os, const std::vector<BenchRow>& rows);

}  // namespace sara
