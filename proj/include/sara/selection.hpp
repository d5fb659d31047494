#pragma once

// Least-squares segment fitting, BIC / modified BIC scoring, and the
// selection procedures that turn ranked candidates into a model.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <map>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "sara/diagnostics.hpp"
#include "sara/error.hpp"
#include "sara/series.hpp"

namespace sara {

enum class Criterion { Threshold, BIC, MBIC };

inline const char* to_string(Criterion c) {
  switch (c) {
    case Criterion::Threshold: return "threshold";
    case Criterion::BIC: return "bic";
    case Criterion::MBIC: return "mbic";
  }
  return "?";
}

/// Change-points tau_1 < ... < tau_J in (0, n); segment j covers the 1-based
/// indices (tau_j, tau_{j+1}] with tau_0 = 0 and tau_{J+1} = n.
template <typename Scalar = double>
struct SegmentationModel {
  Index n = 0;
  std::vector<Index> changepoints;
  VectorX<Scalar> segment_means;
  Scalar sigma2_hat = 0;  // RSS / n
  Criterion criterion = Criterion::BIC;
  // Criterion value (lower is better). For Threshold models this is the
  // threshold that was applied.
  Scalar score = 0;

  Index num_changepoints() const noexcept {
    return static_cast<Index>(changepoints.size());
  }
  Scalar rss() const noexcept { return sigma2_hat * Scalar(n); }
  /// Jump sizes delta_j = beta_j - beta_{j-1}.
  VectorX<Scalar> jumps() const {
    const Index j = num_changepoints();
    if (j == 0) return VectorX<Scalar>();
    return segment_means.tail(j) - segment_means.head(j);
  }
};

namespace detail {

template <typename Scalar>
struct SegmentStats {
  Scalar mean = 0;
  Scalar rss = 0;
};

/// Welford over the 0-based half-open range [begin, end). A constant segment
/// yields rss == 0 exactly, which the -inf sentinel below relies on.
template <typename Scalar>
SegmentStats<Scalar> segment_stats(const VectorX<Scalar>& y, Index begin,
                                   Index end) {
  SegmentStats<Scalar> s;
  Index k = 0;
  for (Index i = begin; i < end; ++i) {
    ++k;
    const Scalar delta = y(i) - s.mean;
    s.mean += delta / Scalar(k);
    s.rss += delta * (y(i) - s.mean);
  }
  return s;
}

inline void validate_changepoints(Index n, const std::vector<Index>& cps) {
  for (std::size_t j = 0; j < cps.size(); ++j) {
    if (cps[j] <= 0 || cps[j] >= n) {
      throw Error(ErrorKind::InvalidChangepoints,
                  "change-point " + std::to_string(cps[j]) +
                      " outside (0, " + std::to_string(n) + ")");
    }
    if (j > 0 && cps[j] <= cps[j - 1]) {
      throw Error(ErrorKind::InvalidChangepoints,
                  "change-points must be strictly increasing");
    }
  }
}

template <typename Scalar>
Scalar log_variance(Scalar sigma2) {
  if (!(sigma2 > Scalar(0))) return -std::numeric_limits<Scalar>::infinity();
  return std::log(sigma2);
}

/// sum_{i=1}^{J+1} log((x_(i) - x_(i-1)) / n) over sorted change-points.
template <typename Scalar>
Scalar log_spacing_sum(Index n, const std::vector<Index>& sorted_cps) {
  Scalar total = 0;
  Index prev = 0;
  for (Index x : sorted_cps) {
    total += std::log(Scalar(x - prev) / Scalar(n));
    prev = x;
  }
  return total + std::log(Scalar(n - prev) / Scalar(n));
}

/// Lexicographic (score, size): among equal scores, and in particular among
/// several perfect fits at -inf, the smaller model wins.
template <typename Scalar>
bool better(Scalar score, Index size, Scalar best_score, Index best_size) {
  if (score < best_score) return true;
  return score == best_score && size < best_size;
}

}  // namespace detail

/// (n/2) log sigma2 + J log n. sigma2 == 0 gives -inf.
template <typename Scalar>
Scalar bic_value(Index n, Scalar sigma2, Index num_changepoints) {
  return Scalar(n) / Scalar(2) * detail::log_variance(sigma2) +
         Scalar(num_changepoints) * std::log(Scalar(n));
}

/// (n/2) log sigma2 + (3/2) J log n + (1/2) sum log spacing.
template <typename Scalar>
Scalar mbic_value(Index n, Scalar sigma2, const std::vector<Index>& sorted_cps) {
  const Scalar j = Scalar(sorted_cps.size());
  return Scalar(n) / Scalar(2) * detail::log_variance(sigma2) +
         Scalar(1.5) * j * std::log(Scalar(n)) +
         Scalar(0.5) * detail::log_spacing_sum<Scalar>(n, sorted_cps);
}

template <typename Scalar>
Scalar criterion_value(Criterion criterion, Index n, Scalar sigma2,
                       const std::vector<Index>& sorted_cps) {
  switch (criterion) {
    case Criterion::BIC:
      return bic_value(n, sigma2, static_cast<Index>(sorted_cps.size()));
    case Criterion::MBIC:
      return mbic_value(n, sigma2, sorted_cps);
    case Criterion::Threshold:
      break;
  }
  throw Error(ErrorKind::InvalidConfig,
              "threshold is not an information criterion");
}

/// Per-segment sample means and the variance MLE for fixed change-points.
/// The score is filled in for BIC / mBIC and left at 0 for Threshold.
template <typename Scalar>
SegmentationModel<Scalar> fit_segments(const Series<Scalar>& series,
                                       std::vector<Index> changepoints,
                                       Criterion criterion = Criterion::BIC) {
  const Index n = series.size();
  detail::validate_changepoints(n, changepoints);
  const auto& y = series.values();

  SegmentationModel<Scalar> model;
  model.n = n;
  model.criterion = criterion;
  model.segment_means.resize(static_cast<Index>(changepoints.size()) + 1);
  Scalar rss = 0;
  Index begin = 0;
  for (std::size_t j = 0; j <= changepoints.size(); ++j) {
    const Index end = j < changepoints.size() ? changepoints[j] : n;
    const auto s = detail::segment_stats(y, begin, end);
    model.segment_means(static_cast<Index>(j)) = s.mean;
    rss += s.rss;
    begin = end;
  }
  model.sigma2_hat = rss / Scalar(n);
  model.changepoints = std::move(changepoints);
  if (criterion != Criterion::Threshold) {
    model.score =
        criterion_value(criterion, n, model.sigma2_hat, model.changepoints);
  }
  return model;
}

/// BIC of the least-squares fit at the given change-points. A perfect fit
/// (sigma2 == 0) scores -inf.
template <typename Scalar>
Scalar bic_score(const Series<Scalar>& series, std::vector<Index> changepoints) {
  return fit_segments(series, std::move(changepoints), Criterion::BIC).score;
}

template <typename Scalar>
Scalar mbic_score(const Series<Scalar>& series, std::vector<Index> changepoints) {
  return fit_segments(series, std::move(changepoints), Criterion::MBIC).score;
}

/// Model size used when the caller does not bound the ranking:
/// min(|cands|, floor(n / (2 h_min))).
template <typename Scalar>
Index default_jmax(Index n, const CandidateSet<Scalar>& cands) {
  if (cands.empty()) return 0;
  Index h_min = cands.front().bandwidth;
  for (const auto& c : cands) h_min = std::min(h_min, c.bandwidth);
  return std::min<Index>(static_cast<Index>(cands.size()),
                         n / (2 * std::max<Index>(h_min, 1)));
}

/// sigma2 of the fit that uses the top-J candidates as change-points, for
/// J = 0..jmax. Each step splits one segment, so the whole path costs at most
/// one pass over the data per accepted candidate.
template <typename Scalar>
std::vector<Scalar> rank_path(const Series<Scalar>& series,
                              const CandidateSet<Scalar>& cands, Index jmax) {
  const Index n = series.size();
  const auto& y = series.values();
  if (jmax < 0 || jmax > static_cast<Index>(cands.size())) {
    throw Error(ErrorKind::InvalidConfig,
                "jmax must lie in [0, " + std::to_string(cands.size()) + "]");
  }

  // segment start -> (end, rss); segments are [start, end) 0-based
  std::map<Index, std::pair<Index, Scalar>> segments;
  segments.emplace(0, std::make_pair(n, detail::segment_stats(y, 0, n).rss));

  std::vector<Scalar> path;
  path.reserve(static_cast<std::size_t>(jmax) + 1);
  path.push_back(segments.begin()->second.second / Scalar(n));
  for (Index j = 0; j < jmax; ++j) {
    const Index x = cands[static_cast<std::size_t>(j)].position;
    if (x <= 0 || x >= n || segments.count(x)) {
      throw Error(ErrorKind::InvalidChangepoints,
                  "candidate " + std::to_string(x) +
                      " is out of range or repeated");
    }
    auto it = std::prev(segments.upper_bound(x));
    const Index start = it->first;
    const Index end = it->second.first;
    it->second = {x, detail::segment_stats(y, start, x).rss};
    segments.emplace(x, std::make_pair(end, detail::segment_stats(y, x, end).rss));

    Scalar rss = 0;
    for (const auto& [s, seg] : segments) rss += seg.second;
    path.push_back(rss / Scalar(n));
  }
  return path;
}

/// Ranking-based selection: score the criterion on the top-J candidates for
/// J = 0..jmax and keep the argmin (smallest J on ties). jmax < 0 selects
/// default_jmax.
template <typename Scalar>
SegmentationModel<Scalar> rank_select(const Series<Scalar>& series,
                                      const CandidateSet<Scalar>& cands,
                                      Criterion criterion, Index jmax = -1) {
  if (criterion == Criterion::Threshold) {
    throw Error(ErrorKind::InvalidConfig,
                "rank_select needs an information criterion");
  }
  const Index n = series.size();
  if (jmax < 0) jmax = default_jmax(n, cands);
  const auto path = rank_path(series, cands, jmax);

  Index best_j = 0;
  Scalar best = std::numeric_limits<Scalar>::infinity();
  std::vector<Index> cps;
  for (Index j = 0; j <= jmax; ++j) {
    if (j > 0) {
      const Index x = cands[static_cast<std::size_t>(j - 1)].position;
      cps.insert(std::upper_bound(cps.begin(), cps.end(), x), x);
    }
    const Scalar score =
        criterion_value(criterion, n, path[static_cast<std::size_t>(j)], cps);
    if (detail::better(score, j, best, best_j) || j == 0) {
      best = score;
      best_j = j;
    }
  }

  std::vector<Index> chosen;
  for (Index j = 0; j < best_j; ++j) {
    chosen.push_back(cands[static_cast<std::size_t>(j)].position);
  }
  std::sort(chosen.begin(), chosen.end());
  return fit_segments(series, std::move(chosen), criterion);
}

namespace detail {

template <typename Scalar>
std::vector<Index> sorted_unique_positions(Index n,
                                           const CandidateSet<Scalar>& pool) {
  std::vector<Index> cps;
  cps.reserve(pool.size());
  for (const auto& c : pool) cps.push_back(c.position);
  std::sort(cps.begin(), cps.end());
  if (std::adjacent_find(cps.begin(), cps.end()) != cps.end()) {
    throw Error(ErrorKind::InvalidChangepoints, "pool positions must be distinct");
  }
  validate_changepoints(n, cps);
  return cps;
}

}  // namespace detail

/// Backward stepwise deletion: repeatedly drop the change-point whose removal
/// increases the RSS least, for as long as the criterion keeps decreasing.
/// Dropping a point from a perfect fit that stays perfect (-inf to -inf)
/// counts as a decrease.
template <typename Scalar>
SegmentationModel<Scalar> backward_stepwise(const Series<Scalar>& series,
                                            const CandidateSet<Scalar>& pool,
                                            Criterion criterion) {
  const Index n = series.size();
  const auto& y = series.values();
  std::vector<Index> cps = detail::sorted_unique_positions(n, pool);

  // seg_rss[k] covers [bounds[k], bounds[k+1]) with bounds = {0, cps..., n}
  auto bound = [&](std::size_t k) -> Index {
    if (k == 0) return 0;
    if (k > cps.size()) return n;
    return cps[k - 1];
  };
  std::vector<Scalar> seg_rss(cps.size() + 1);
  for (std::size_t k = 0; k < seg_rss.size(); ++k) {
    seg_rss[k] = detail::segment_stats(y, bound(k), bound(k + 1)).rss;
  }
  auto total = [&] {
    Scalar s = 0;
    for (Scalar r : seg_rss) s += r;
    return s;
  };

  Scalar current = criterion_value(criterion, n, total() / Scalar(n), cps);
  while (!cps.empty()) {
    std::size_t drop = 0;
    Scalar drop_rss = 0;
    Scalar best_increase = std::numeric_limits<Scalar>::infinity();
    for (std::size_t k = 0; k < cps.size(); ++k) {
      const Scalar merged = detail::segment_stats(y, bound(k), bound(k + 2)).rss;
      const Scalar increase = merged - seg_rss[k] - seg_rss[k + 1];
      if (increase < best_increase) {
        best_increase = increase;
        drop = k;
        drop_rss = merged;
      }
    }

    std::vector<Index> trial = cps;
    trial.erase(trial.begin() + static_cast<std::ptrdiff_t>(drop));
    std::vector<Scalar> trial_rss = seg_rss;
    trial_rss[drop] = drop_rss;
    trial_rss.erase(trial_rss.begin() + static_cast<std::ptrdiff_t>(drop) + 1);
    Scalar trial_total = 0;
    for (Scalar r : trial_rss) trial_total += r;
    const Scalar score =
        criterion_value(criterion, n, trial_total / Scalar(n), trial);

    const bool both_perfect =
        std::isinf(score) && std::isinf(current) && score < 0 && current < 0;
    if (!(score < current) && !both_perfect) break;
    cps = std::move(trial);
    seg_rss = std::move(trial_rss);
    current = score;
  }
  return fit_segments(series, std::move(cps), criterion);
}

/// Exact best-subset selection over the pool: every subset is scored and the
/// minimum (smallest subset on ties) returned. Segment costs between pool
/// boundaries are tabulated once, so each subset costs O(|subset|).
template <typename Scalar>
SegmentationModel<Scalar> best_subset(const Series<Scalar>& series,
                                      const CandidateSet<Scalar>& pool,
                                      Criterion criterion) {
  const Index n = series.size();
  const auto& y = series.values();
  const std::vector<Index> cps = detail::sorted_unique_positions(n, pool);
  const std::size_t m = cps.size();
  if (m > 24) {
    throw Error(ErrorKind::InvalidConfig,
                "best subset over " + std::to_string(m) + " candidates is too large");
  }

  std::vector<Index> bounds{0};
  bounds.insert(bounds.end(), cps.begin(), cps.end());
  bounds.push_back(n);
  const std::size_t nb = bounds.size();
  Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic> cost(nb, nb);
  cost.setZero();
  for (std::size_t a = 0; a + 1 < nb; ++a) {
    // extend one Welford accumulator across successive boundaries
    Scalar mean = 0, m2 = 0;
    Index k = 0;
    std::size_t next = a + 1;
    for (Index i = bounds[a]; i < n; ++i) {
      ++k;
      const Scalar delta = y(i) - mean;
      mean += delta / Scalar(k);
      m2 += delta * (y(i) - mean);
      if (i + 1 == bounds[next]) {
        cost(static_cast<Index>(a), static_cast<Index>(next)) = m2;
        ++next;
      }
    }
  }

  std::uint64_t best_mask = 0;
  Scalar best = std::numeric_limits<Scalar>::infinity();
  Index best_size = std::numeric_limits<Index>::max();
  std::vector<Index> subset;
  for (std::uint64_t mask = 0; mask < (std::uint64_t{1} << m); ++mask) {
    subset.clear();
    Scalar rss = 0;
    std::size_t prev = 0;
    for (std::size_t j = 0; j < m; ++j) {
      if (mask & (std::uint64_t{1} << j)) {
        rss += cost(static_cast<Index>(prev), static_cast<Index>(j + 1));
        prev = j + 1;
        subset.push_back(cps[j]);
      }
    }
    rss += cost(static_cast<Index>(prev), static_cast<Index>(nb - 1));
    const Scalar score = criterion_value(criterion, n, rss / Scalar(n), subset);
    const Index size = static_cast<Index>(subset.size());
    if (detail::better(score, size, best, best_size)) {
      best = score;
      best_size = size;
      best_mask = mask;
    }
  }

  std::vector<Index> chosen;
  for (std::size_t j = 0; j < m; ++j) {
    if (best_mask & (std::uint64_t{1} << j)) chosen.push_back(cps[j]);
  }
  return fit_segments(series, std::move(chosen), criterion);
}

/// Noise level from the residuals of a moving-average (uniform-kernel local
/// constant) fit with half-width h, windows truncated at the ends:
/// sqrt((1/n) sum (Y_i - m_i)^2).
template <typename Scalar>
Scalar estimate_sigma(const Series<Scalar>& series, Index h) {
  if (h < 1) {
    throw Error(ErrorKind::BandwidthNonPositive,
                "bandwidth must be positive, got " + std::to_string(h));
  }
  const Index n = series.size();
  // centre on Y_1 so a constant series has exactly zero residuals
  const VectorX<Scalar> y =
      series.values().array() - series.values()(0);
  VectorX<Scalar> prefix(n + 1);
  prefix(0) = 0;
  for (Index i = 0; i < n; ++i) prefix(i + 1) = prefix(i) + y(i);

  Scalar rss = 0;
  for (Index i = 0; i < n; ++i) {
    const Index lo = std::max<Index>(0, i - h);
    const Index hi = std::min<Index>(n, i + h + 1);
    const Scalar fit = (prefix(hi) - prefix(lo)) / Scalar(hi - lo);
    const Scalar r = y(i) - fit;
    rss += r * r;
  }
  return std::sqrt(rss / Scalar(n));
}

template <typename Scalar = double>
struct DpSolution {
  Index num_changepoints = 0;
  std::vector<Index> changepoints;
  Scalar sigma2_hat = 0;
};

/// Exact least-squares segmentation for every model size 0..jmax by dynamic
/// programming, O(n^2 jmax). Meant as a reference for small series.
template <typename Scalar>
std::vector<DpSolution<Scalar>> exhaustive_dp_oracle(const Series<Scalar>& series,
                                                     Index jmax) {
  constexpr Index kMaxLength = 500;
  const Index n = series.size();
  if (n > kMaxLength) {
    throw Error(ErrorKind::SeriesTooLong,
                "exhaustive search is limited to n <= " +
                    std::to_string(kMaxLength));
  }
  if (jmax < 0 || jmax > n - 1) {
    throw Error(ErrorKind::InvalidConfig, "jmax must lie in [0, n - 1]");
  }
  const auto& y = series.values();
  using Matrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;

  Matrix cost = Matrix::Zero(n + 1, n + 1);  // cost(a, b) = RSS of [a, b)
  for (Index a = 0; a < n; ++a) {
    Scalar mean = 0, m2 = 0;
    for (Index b = a + 1; b <= n; ++b) {
      const Scalar v = y(b - 1);
      const Scalar delta = v - mean;
      mean += delta / Scalar(b - a);
      m2 += delta * (v - mean);
      cost(a, b) = m2;
    }
  }

  constexpr Scalar inf = std::numeric_limits<Scalar>::infinity();
  Matrix best = Matrix::Constant(jmax + 1, n + 1, inf);
  Eigen::Matrix<Index, Eigen::Dynamic, Eigen::Dynamic> arg =
      Eigen::Matrix<Index, Eigen::Dynamic, Eigen::Dynamic>::Zero(jmax + 1, n + 1);
  for (Index b = 1; b <= n; ++b) best(0, b) = cost(0, b);
  for (Index j = 1; j <= jmax; ++j) {
    for (Index b = j + 1; b <= n; ++b) {
      for (Index a = j; a < b; ++a) {
        const Scalar v = best(j - 1, a) + cost(a, b);
        if (v < best(j, b)) {
          best(j, b) = v;
          arg(j, b) = a;
        }
      }
    }
  }

  std::vector<DpSolution<Scalar>> out;
  for (Index j = 0; j <= jmax; ++j) {
    DpSolution<Scalar> sol;
    sol.num_changepoints = j;
    sol.sigma2_hat = best(j, n) / Scalar(n);
    Index b = n;
    for (Index k = j; k >= 1; --k) {
      b = arg(k, b);
      sol.changepoints.push_back(b);
    }
    std::reverse(sol.changepoints.begin(), sol.changepoints.end());
    out.push_back(std::move(sol));
  }
  return out;
}

/// `label<TAB>start<TAB>end<TAB>mean`, one row per segment. Ranges are
/// 1-based inclusive indices, or genomic coordinates when the series has them.
template <typename Scalar>
void write_segments_tsv(std::ostream& os, const Series<Scalar>& series,
                        const SegmentationModel<Scalar>& model) {
  const auto old_precision = os.precision(15);
  Index begin = 0;
  const auto& cps = model.changepoints;
  for (std::size_t j = 0; j <= cps.size(); ++j) {
    const Index end = j < cps.size() ? cps[j] : model.n;  // [begin, end)
    os << series.label() << '\t';
    if (series.has_positions()) {
      os << series.positions()[static_cast<std::size_t>(begin)] << '\t'
         << series.positions()[static_cast<std::size_t>(end - 1)];
    } else {
      os << (begin + 1) << '\t' << end;
    }
    os << '\t' << static_cast<double>(model.segment_means(static_cast<Index>(j)))
       << '\n';
    begin = end;
  }
  os.precision(old_precision);
}

}  // namespace sara
