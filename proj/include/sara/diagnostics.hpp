#pragma once

// Local diagnostic functions D(x, h) and their h-local maximizers.
//
// D(x, h) is a weighted contrast of the observations within h of x. It is
// defined only where the full window fits, x in [h, n - h] (1-based), so both
// weight schemes share the same domain.

#include <algorithm>
#include <cmath>
#include <deque>
#include <iomanip>
#include <limits>
#include <ostream>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "sara/error.hpp"
#include "sara/series.hpp"

namespace sara {

enum class WeightKind { EqualWeight, LocalLinear };
enum class Kernel { Uniform, Epanechnikov };

struct WeightScheme {
  WeightKind kind = WeightKind::EqualWeight;
  Kernel kernel = Kernel::Uniform;  // LocalLinear only
};

template <typename Scalar = double>
struct DiagnosticProfile {
  Index bandwidth = 0;
  WeightScheme scheme{};
  Index domain_start = 0;  // == bandwidth
  Index domain_end = -1;   // == n - bandwidth
  VectorX<Scalar> values;

  Index size() const noexcept { return values.size(); }
  Scalar at(Index x) const { return values(x - domain_start); }
};

template <typename Scalar = double>
struct Candidate {
  Index position = 0;
  Scalar score = 0;  // |D(position, bandwidth)|
  Index bandwidth = 0;

  friend bool operator==(const Candidate&, const Candidate&) = default;
};

/// Ordered by descending score; ties keep ascending position.
template <typename Scalar = double>
using CandidateSet = std::vector<Candidate<Scalar>>;

namespace detail {

inline void check_bandwidth(Index n, Index h, Index min_h = 1) {
  if (h < 1) {
    throw Error(ErrorKind::BandwidthNonPositive,
                "bandwidth must be positive, got " + std::to_string(h));
  }
  if (h < min_h) {
    throw Error(ErrorKind::BandwidthTooSmall,
                "bandwidth must be at least " + std::to_string(min_h) +
                    ", got " + std::to_string(h));
  }
  if (h > n / 2) {
    throw Error(ErrorKind::BandwidthTooLarge,
                "bandwidth " + std::to_string(h) + " exceeds floor(n/2) = " +
                    std::to_string(n / 2));
  }
}

template <typename Scalar>
Scalar kernel_value(Kernel kernel, Scalar u) {
  if (std::abs(u) > Scalar(1)) return Scalar(0);
  switch (kernel) {
    case Kernel::Uniform:
      return Scalar(0.5);
    case Kernel::Epanechnikov:
      return Scalar(0.75) * (Scalar(1) - u * u);
  }
  return Scalar(0);
}

template <typename Scalar>
void sort_by_score(CandidateSet<Scalar>& cands) {
  std::stable_sort(cands.begin(), cands.end(),
                   [](const Candidate<Scalar>& a, const Candidate<Scalar>& b) {
                     return a.score > b.score;
                   });
}

}  // namespace detail

/// Equal-weight diagnostic: mean of the h points ending at x minus the mean of
/// the h points after x. One pass, O(n).
template <typename Scalar>
DiagnosticProfile<Scalar> equal_weight_diagnostic(const Series<Scalar>& series,
                                                  Index h) {
  const Index n = series.size();
  detail::check_bandwidth(n, h);
  const auto& y = series.values();

  DiagnosticProfile<Scalar> profile;
  profile.bandwidth = h;
  profile.scheme = WeightScheme{WeightKind::EqualWeight, Kernel::Uniform};
  profile.domain_start = h;
  profile.domain_end = n - h;
  profile.values.resize(n - 2 * h + 1);

  // contrast = h * D(x); y is 0-based so Y_i == y(i - 1).
  Scalar contrast = y.head(h).sum() - y.segment(h, h).sum();
  const Scalar inv_h = Scalar(1) / Scalar(h);
  profile.values(0) = contrast * inv_h;
  for (Index x = h; x < n - h; ++x) {
    // D(x+1) = D(x) + (2 Y_{x+1} - Y_{x-h+1} - Y_{x+h+1}) / h
    contrast += Scalar(2) * y(x) - y(x - h) - y(x + h);
    profile.values(x - h + 1) = contrast * inv_h;
  }
  return profile;
}

/// Local linear estimate of the first derivative at every x in [h, n - h].
/// Positive for a rising mean, so its sign is opposite to the equal-weight
/// contrast. O(n h).
template <typename Scalar>
DiagnosticProfile<Scalar> local_linear_diagnostic(const Series<Scalar>& series,
                                                  Index h, Kernel kernel) {
  const Index n = series.size();
  detail::check_bandwidth(n, h, 2);
  const auto& y = series.values();

  DiagnosticProfile<Scalar> profile;
  profile.bandwidth = h;
  profile.scheme = WeightScheme{WeightKind::LocalLinear, kernel};
  profile.domain_start = h;
  profile.domain_end = n - h;
  profile.values.resize(n - 2 * h + 1);

  const Scalar inv_h = Scalar(1) / Scalar(h);
  VectorX<Scalar> kh(2 * h + 1);
  for (Index k = 0; k <= 2 * h; ++k) {
    kh(k) = detail::kernel_value(kernel, Scalar(k - h) * inv_h) * inv_h;
  }

  for (Index x = h; x <= n - h; ++x) {
    const Index lo = std::max<Index>(1, x - h);
    const Index hi = std::min<Index>(n, x + h);
    Scalar s0 = 0, s1 = 0, s2 = 0;
    for (Index i = lo; i <= hi; ++i) {
      const Scalar u = Scalar(i - x);
      const Scalar k = kh(i - x + h);
      s0 += k;
      s1 += k * u;
      s2 += k * u * u;
    }
    const Scalar denom = s0 * s2 - s1 * s1;
    if (!(denom > Scalar(0))) {
      throw Error(ErrorKind::DegenerateDesign,
                  "local linear design is singular at x = " +
                      std::to_string(x));
    }
    Scalar d = 0;
    for (Index i = lo; i <= hi; ++i) {
      const Scalar u = Scalar(i - x);
      d += kh(i - x + h) * (s0 * u - s1) * y(i - 1);
    }
    profile.values(x - h) = d / denom;
  }
  return profile;
}

template <typename Scalar>
DiagnosticProfile<Scalar> diagnostic(const Series<Scalar>& series, Index h,
                                     WeightScheme scheme = {}) {
  if (scheme.kind == WeightKind::EqualWeight) {
    return equal_weight_diagnostic(series, h);
  }
  return local_linear_diagnostic(series, h, scheme.kernel);
}

/// h-local maximizers of |D|: positions x with |D(x)| >= |D(x')| for every x'
/// in (x - h, x + h) within the domain. Among tied values in a window only the
/// leftmost survives, i.e. the comparison is strict to the left of x.
/// Two monotone-deque passes, O(n).
template <typename Scalar>
CandidateSet<Scalar> local_maximizers(const DiagnosticProfile<Scalar>& profile) {
  const Index m = profile.size();
  const Index h = profile.bandwidth;
  CandidateSet<Scalar> out;
  if (m <= 0) return out;

  const VectorX<Scalar> a = profile.values.cwiseAbs();
  constexpr Scalar none = -std::numeric_limits<Scalar>::infinity();
  std::vector<Scalar> left_max(m, none), right_max(m, none);

  std::deque<Index> window;
  for (Index k = 0; k < m; ++k) {
    while (!window.empty() && window.front() < k - h + 1) window.pop_front();
    if (!window.empty()) left_max[k] = a(window.front());
    while (!window.empty() && a(window.back()) <= a(k)) window.pop_back();
    window.push_back(k);
  }
  window.clear();
  for (Index k = m - 1; k >= 0; --k) {
    while (!window.empty() && window.front() > k + h - 1) window.pop_front();
    if (!window.empty()) right_max[k] = a(window.front());
    while (!window.empty() && a(window.back()) <= a(k)) window.pop_back();
    window.push_back(k);
  }

  for (Index k = 0; k < m; ++k) {
    if (a(k) > left_max[k] && a(k) >= right_max[k]) {
      out.push_back({profile.domain_start + k, a(k), h});
    }
  }
  detail::sort_by_score(out);
  return out;
}

/// Keeps candidates with score strictly above lambda, order preserved.
template <typename Scalar>
CandidateSet<Scalar> threshold_candidates(const CandidateSet<Scalar>& cands,
                                          Scalar lambda) {
  if (!(lambda >= Scalar(0))) {
    throw Error(ErrorKind::InvalidConfig, "threshold must be nonnegative");
  }
  CandidateSet<Scalar> out;
  std::copy_if(cands.begin(), cands.end(), std::back_inserter(out),
               [lambda](const Candidate<Scalar>& c) { return c.score > lambda; });
  return out;
}

/// `position<TAB>D`, one row per domain position.
template <typename Scalar>
void write_profile_tsv(std::ostream& os, const DiagnosticProfile<Scalar>& profile) {
  os << "position\tD\n";
  const auto old_precision = os.precision(15);
  for (Index k = 0; k < profile.size(); ++k) {
    os << (profile.domain_start + k) << '\t'
       << static_cast<double>(profile.values(k)) << '\n';
  }
  os.precision(old_precision);
}

}  // namespace sara
