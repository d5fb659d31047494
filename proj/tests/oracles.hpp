#pragma once

// Brute-force reference computations for the tests. Deliberately naive and
// written against plain std::vector so they share no code path with the
// library.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <vector>

namespace oracle {

using Vec = std::vector<double>;

/// D(x, h) by double summation, x 1-based in [h, n - h].
inline double equal_weight_direct(const Vec& y, long x, long h) {
  double left = 0.0, right = 0.0;
  for (long k = 1; k <= h; ++k) {
    left += y[static_cast<std::size_t>(x + 1 - k - 1)];
    right += y[static_cast<std::size_t>(x + k - 1)];
  }
  return left / static_cast<double>(h) - right / static_cast<double>(h);
}

/// Local-linear derivative weights evaluated straight from the formula.
inline double local_linear_direct(const Vec& y, long x, long h, bool epanechnikov) {
  const long n = static_cast<long>(y.size());
  auto K = [&](double u) {
    if (std::fabs(u) > 1.0) return 0.0;
    return epanechnikov ? 0.75 * (1.0 - u * u) : 0.5;
  };
  auto Kh = [&](double u) { return K(u / static_cast<double>(h)) / static_cast<double>(h); };
  double s[3] = {0.0, 0.0, 0.0};
  for (long i = 1; i <= n; ++i) {
    const double u = static_cast<double>(i - x);
    for (int l = 0; l < 3; ++l) s[l] += Kh(u) * std::pow(u, l);
  }
  double d = 0.0;
  for (long i = 1; i <= n; ++i) {
    const double u = static_cast<double>(i - x);
    const double w = Kh(u) * (s[0] * u - s[1]) / (s[0] * s[2] - s[1] * s[1]);
    d += w * y[static_cast<std::size_t>(i - 1)];
  }
  return d;
}

/// Window check: x is kept iff |D(x)| beats every value strictly to its left
/// and ties-or-beats every value to its right inside (x - h, x + h).
/// Returns positions sorted ascending.
inline std::vector<long> maximizers_window_check(const Vec& d, long domain_start,
                                                 long h) {
  std::vector<long> out;
  const long m = static_cast<long>(d.size());
  for (long k = 0; k < m; ++k) {
    bool keep = true;
    for (long j = std::max(0L, k - h + 1); j <= std::min(m - 1, k + h - 1); ++j) {
      if (j < k && std::fabs(d[j]) >= std::fabs(d[k])) keep = false;
      if (j > k && std::fabs(d[j]) > std::fabs(d[k])) keep = false;
    }
    if (keep) out.push_back(domain_start + k);
  }
  return out;
}

/// Residual sum of squares around per-segment means, two passes.
inline double rss_direct(const Vec& y, const std::vector<long>& cps) {
  double total = 0.0;
  long begin = 0;
  for (std::size_t j = 0; j <= cps.size(); ++j) {
    const long end = j < cps.size() ? cps[j] : static_cast<long>(y.size());
    double mean = 0.0;
    for (long i = begin; i < end; ++i) mean += y[static_cast<std::size_t>(i)];
    mean /= static_cast<double>(end - begin);
    for (long i = begin; i < end; ++i) {
      const double r = y[static_cast<std::size_t>(i)] - mean;
      total += r * r;
    }
    begin = end;
  }
  return total;
}

inline double bic_direct(const Vec& y, const std::vector<long>& cps) {
  const double n = static_cast<double>(y.size());
  return n / 2.0 * std::log(rss_direct(y, cps) / n) +
         static_cast<double>(cps.size()) * std::log(n);
}

inline double mbic_direct(const Vec& y, const std::vector<long>& cps) {
  const double n = static_cast<double>(y.size());
  double spacing = 0.0;
  long prev = 0;
  for (long c : cps) {
    spacing += std::log(static_cast<double>(c - prev) / n);
    prev = c;
  }
  spacing += std::log((n - static_cast<double>(prev)) / n);
  return n / 2.0 * std::log(rss_direct(y, cps) / n) +
         1.5 * static_cast<double>(cps.size()) * std::log(n) + 0.5 * spacing;
}

struct PairBest {
  long a = 0, b = 0;
  double rss = std::numeric_limits<double>::infinity();
};

/// Best pair of change-points by trying all of them.
inline PairBest best_pair_enumeration(const Vec& y) {
  PairBest best;
  const long n = static_cast<long>(y.size());
  for (long a = 1; a < n; ++a) {
    for (long b = a + 1; b < n; ++b) {
      const double r = rss_direct(y, {a, b});
      if (r < best.rss) best = {a, b, r};
    }
  }
  return best;
}

/// Exact BIC best subset of a candidate pool: for BIC the penalty depends only
/// on the model size, so the best subset of each size is the RSS-optimal one,
/// found by DP over the pool boundaries with prefix sums.
inline std::vector<long> bic_best_subset_of_pool(const Vec& y, std::vector<long> pool) {
  std::sort(pool.begin(), pool.end());
  const long n = static_cast<long>(y.size());
  std::vector<long> b{0};
  b.insert(b.end(), pool.begin(), pool.end());
  b.push_back(n);
  const std::size_t nb = b.size();
  std::vector<long double> s1(static_cast<std::size_t>(n) + 1, 0), s2(s1);
  for (long i = 0; i < n; ++i) {
    s1[i + 1] = s1[i] + y[static_cast<std::size_t>(i)];
    s2[i + 1] = s2[i] + static_cast<long double>(y[static_cast<std::size_t>(i)]) *
                            y[static_cast<std::size_t>(i)];
  }
  auto cost = [&](std::size_t i, std::size_t j) {
    const long double len = static_cast<long double>(b[j] - b[i]);
    const long double sum = s1[b[j]] - s1[b[i]];
    return static_cast<double>(s2[b[j]] - s2[b[i]] - sum * sum / len);
  };
  const double inf = std::numeric_limits<double>::infinity();
  // f[k][j]: best RSS covering [0, b[j]) with k interior cuts, ending at b[j]
  std::vector<std::vector<double>> f(nb, std::vector<double>(nb, inf));
  std::vector<std::vector<std::size_t>> arg(nb, std::vector<std::size_t>(nb, 0));
  for (std::size_t j = 1; j < nb; ++j) f[0][j] = cost(0, j);
  for (std::size_t k = 1; k + 1 < nb; ++k) {
    for (std::size_t j = k + 1; j < nb; ++j) {
      for (std::size_t i = k; i < j; ++i) {
        const double v = f[k - 1][i] + cost(i, j);
        if (v < f[k][j]) {
          f[k][j] = v;
          arg[k][j] = i;
        }
      }
    }
  }
  double best = inf;
  std::size_t best_k = 0;
  for (std::size_t k = 0; k + 1 < nb; ++k) {
    const double score = static_cast<double>(n) / 2.0 * std::log(f[k][nb - 1] / n) +
                         static_cast<double>(k) * std::log(static_cast<double>(n));
    if (score < best) {
      best = score;
      best_k = k;
    }
  }
  std::vector<long> out;
  std::size_t j = nb - 1;
  for (std::size_t k = best_k; k >= 1; --k) {
    j = arg[k][j];
    out.push_back(b[j]);
  }
  std::sort(out.begin(), out.end());
  return out;
}

/// Likelihood-ratio statistic by enumerating every split.
inline double lr_direct(const Vec& y) {
  const long n = static_cast<long>(y.size());
  double sn = 0.0;
  for (double v : y) sn += v;
  double best = 0.0;
  for (long j = 1; j <= n - 1; ++j) {
    double sj = 0.0;
    for (long i = 0; i < j; ++i) sj += y[static_cast<std::size_t>(i)];
    const double jd = static_cast<double>(j), nd = static_cast<double>(n);
    const double t = std::pow(jd * sn / nd - sj, 2) / (jd * (1.0 - jd / nd));
    best = std::max(best, t);
  }
  return best;
}

}  // namespace oracle
