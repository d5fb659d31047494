#pragma once

// Multi-bandwidth screening: run the scan at several bandwidths with a
// conservative per-bandwidth threshold, pool the survivors, and let a global
// subset selection pick the final change-points.

#include <algorithm>
#include <cmath>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "sara/diagnostics.hpp"
#include "sara/error.hpp"
#include "sara/selection.hpp"
#include "sara/series.hpp"

namespace sara {

/// How lambda depends on the bandwidth h and the noise level sigma.
struct ThresholdRule {
  enum class Kind {
    Fixed,   // lambda = value
    CSigma,  // lambda = value * sqrt(2/h) * sigma
    LogN,    // lambda = 2 sqrt(log n) * sqrt(2/h) * sigma
  };
  Kind kind = Kind::CSigma;
  double value = 2.0;

  template <typename Scalar>
  Scalar lambda(Index n, Index h, Scalar sigma) const {
    const Scalar scale = std::sqrt(Scalar(2) / Scalar(h)) * sigma;
    switch (kind) {
      case Kind::Fixed:
        return Scalar(value);
      case Kind::CSigma:
        return Scalar(value) * scale;
      case Kind::LogN:
        return Scalar(2) * std::sqrt(std::log(Scalar(n))) * scale;
    }
    return Scalar(value);
  }
};

struct SigmaSource {
  enum class Kind { Estimated, Known };
  Kind kind = Kind::Estimated;
  Index h_ref = 0;     // Estimated; 0 means the smallest bandwidth
  double sigma = 0.0;  // Known

  static SigmaSource estimated(Index h_ref = 0) {
    return {Kind::Estimated, h_ref, 0.0};
  }
  static SigmaSource known(double sigma) { return {Kind::Known, 0, sigma}; }
};

template <typename Scalar = double>
struct MultiBandConfig {
  std::vector<Index> bandwidths;
  Scalar threshold_constant = 2;  // C in lambda_k = C sqrt(2/h_k) sigma
  Criterion criterion = Criterion::MBIC;
  SigmaSource sigma_source{};
  // Pools at most this large are refined by exhaustive best subset; larger
  // pools by backward stepwise deletion.
  Index best_subset_limit = 12;

  ThresholdRule rule() const {
    return {ThresholdRule::Kind::CSigma, static_cast<double>(threshold_constant)};
  }
};

/// [round(log n), round(2 log n), round(3 log n)], clamped to [2, n/2], with
/// duplicates dropped.
inline std::vector<Index> default_bandwidths(Index n) {
  if (n < 8) {
    throw Error(ErrorKind::SeriesTooShort,
                "default bandwidths need n >= 8, got " + std::to_string(n));
  }
  const double log_n = std::log(static_cast<double>(n));
  std::vector<Index> out;
  for (int k = 1; k <= 3; ++k) {
    Index h = static_cast<Index>(std::lround(k * log_n));
    h = std::clamp<Index>(h, 2, n / 2);
    if (std::find(out.begin(), out.end(), h) == out.end()) out.push_back(h);
  }
  return out;
}

template <typename Scalar>
void validate(const MultiBandConfig<Scalar>& cfg) {
  if (cfg.bandwidths.empty()) {
    throw Error(ErrorKind::InvalidConfig, "at least one bandwidth is required");
  }
  auto sorted = cfg.bandwidths;
  std::sort(sorted.begin(), sorted.end());
  if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end()) {
    throw Error(ErrorKind::InvalidConfig, "bandwidths must be distinct");
  }
  if (!(cfg.threshold_constant > Scalar(0))) {
    throw Error(ErrorKind::InvalidConfig, "threshold constant must be positive");
  }
  if (cfg.criterion == Criterion::Threshold) {
    throw Error(ErrorKind::InvalidConfig,
                "multi-bandwidth selection needs BIC or mBIC");
  }
  if (cfg.sigma_source.kind == SigmaSource::Kind::Known &&
      !(cfg.sigma_source.sigma >= 0.0)) {
    throw Error(ErrorKind::InvalidConfig, "known sigma must be nonnegative");
  }
}

/// Noise level the thresholds are scaled by.
template <typename Scalar>
Scalar resolve_sigma(const Series<Scalar>& series, const SigmaSource& source,
                     const std::vector<Index>& bandwidths) {
  if (source.kind == SigmaSource::Kind::Known) return Scalar(source.sigma);
  Index h = source.h_ref;
  if (h <= 0) h = *std::min_element(bandwidths.begin(), bandwidths.end());
  return estimate_sigma(series, h);
}

/// Union over bandwidths of the thresholded h-local maximizers. A position
/// found at several bandwidths appears once with its largest score; nearby
/// but distinct positions are all kept.
template <typename Scalar>
CandidateSet<Scalar> pool_candidates(const Series<Scalar>& series,
                                     const std::vector<Index>& bandwidths,
                                     const ThresholdRule& rule, Scalar sigma) {
  std::map<Index, Candidate<Scalar>> merged;
  for (Index h : bandwidths) {
    const auto profile = equal_weight_diagnostic(series, h);
    const Scalar lambda = rule.lambda(series.size(), h, sigma);
    for (const auto& c : threshold_candidates(local_maximizers(profile), lambda)) {
      auto [it, inserted] = merged.emplace(c.position, c);
      if (!inserted && c.score > it->second.score) it->second = c;
    }
  }
  CandidateSet<Scalar> pool;
  pool.reserve(merged.size());
  for (const auto& [pos, c] : merged) pool.push_back(c);
  detail::sort_by_score(pool);
  return pool;
}

template <typename Scalar>
CandidateSet<Scalar> pool_candidates(const Series<Scalar>& series,
                                     const MultiBandConfig<Scalar>& cfg) {
  validate(cfg);
  const Scalar sigma = resolve_sigma(series, cfg.sigma_source, cfg.bandwidths);
  return pool_candidates(series, cfg.bandwidths, cfg.rule(), sigma);
}

/// Subset selection over an already built pool.
template <typename Scalar>
SegmentationModel<Scalar> refine_pool(const Series<Scalar>& series,
                                      const CandidateSet<Scalar>& pool,
                                      Criterion criterion,
                                      Index best_subset_limit = 12) {
  if (pool.empty()) return fit_segments(series, {}, criterion);
  if (static_cast<Index>(pool.size()) <= best_subset_limit) {
    return best_subset(series, pool, criterion);
  }
  return backward_stepwise(series, pool, criterion);
}

template <typename Scalar>
SegmentationModel<Scalar> msara_detect(const Series<Scalar>& series,
                                       const MultiBandConfig<Scalar>& cfg) {
  const auto pool = pool_candidates(series, cfg);
  return refine_pool(series, pool, cfg.criterion, cfg.best_subset_limit);
}

}  // namespace sara
