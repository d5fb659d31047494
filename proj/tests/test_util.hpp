#pragma once

#include <cstdint>
#include <vector>

#include "sara/series.hpp"
#include "sara/simulation.hpp"

namespace testutil {

inline sara::Series<double> make_series(const std::vector<double>& v) {
  sara::VectorX<double> y(static_cast<sara::Index>(v.size()));
  for (std::size_t i = 0; i < v.size(); ++i) y(static_cast<sara::Index>(i)) = v[i];
  return sara::Series<double>(std::move(y));
}

inline std::vector<double> to_vec(const sara::Series<double>& s) {
  return {s.values().data(), s.values().data() + s.size()};
}

inline std::vector<double> normal_draws(std::size_t n, std::uint64_t seed,
                                        double sigma = 1.0) {
  sara::Rng rng(seed);
  std::vector<double> v(n);
  for (auto& x : v) x = sigma * rng.normal();
  return v;
}

/// Piecewise-constant values plus optional N(0, sigma^2) noise; cps are
/// 1-based change-points.
inline std::vector<double> step_series(long n, const std::vector<long>& cps,
                                       const std::vector<double>& levels,
                                       double sigma = 0.0, std::uint64_t seed = 0) {
  std::vector<double> v(static_cast<std::size_t>(n));
  sara::Rng rng(seed);
  std::size_t seg = 0;
  for (long i = 1; i <= n; ++i) {
    while (seg < cps.size() && cps[seg] < i) ++seg;
    v[static_cast<std::size_t>(i - 1)] = levels[seg] + (sigma > 0 ? sigma * rng.normal() : 0.0);
  }
  return v;
}

}  // namespace testutil
