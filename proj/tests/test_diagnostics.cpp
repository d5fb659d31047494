#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <sstream>
#include <string>

#include "oracles.hpp"
#include "sara/diagnostics.hpp"
#include "sara/simulation.hpp"
#include "test_util.hpp"

using sara::Index;
using testutil::make_series;

TEST_CASE("equal-weight diagnostic on a clean step") {
  const auto s = make_series({0, 0, 0, 1, 1, 1});
  const auto p = sara::equal_weight_diagnostic(s, 3);
  CHECK(p.domain_start == 3);
  CHECK(p.domain_end == 3);
  REQUIRE(p.size() == 1);
  CHECK(p.at(3) == doctest::Approx(-1.0));
}

TEST_CASE("equal-weight diagnostic vanishes on a constant series") {
  for (long n : {2L, 7L, 40L}) {
    const auto s = make_series(std::vector<double>(static_cast<std::size_t>(n), 3.25));
    for (Index h = 1; h <= n / 2; ++h) {
      const auto p = sara::equal_weight_diagnostic(s, h);
      CHECK(p.size() == n - 2 * h + 1);
      CHECK(p.values.cwiseAbs().maxCoeff() == 0.0);
    }
  }
}

TEST_CASE("equal-weight recursion matches direct summation") {
  const auto v = testutil::normal_draws(20, 17);
  const auto p = sara::equal_weight_diagnostic(make_series(v), 4);
  for (Index x = 4; x <= 16; ++x) {
    CHECK(std::fabs(p.at(x) - oracle::equal_weight_direct(v, x, 4)) < 1e-9);
  }
}

TEST_CASE("bandwidth bounds are enforced") {
  const auto s = make_series(testutil::normal_draws(11, 1));
  CHECK_THROWS_AS(sara::equal_weight_diagnostic(s, 0), sara::Error);
  CHECK_THROWS_AS(sara::equal_weight_diagnostic(s, 6), sara::Error);
  CHECK_NOTHROW(sara::equal_weight_diagnostic(s, 5));
  try {
    sara::equal_weight_diagnostic(s, 6);
  } catch (const sara::Error& e) {
    CHECK(e.kind() == sara::ErrorKind::BandwidthTooLarge);
  }
  try {
    sara::equal_weight_diagnostic(s, -2);
  } catch (const sara::Error& e) {
    CHECK(e.kind() == sara::ErrorKind::BandwidthNonPositive);
  }
  CHECK_THROWS_AS(sara::local_linear_diagnostic(s, 1, sara::Kernel::Uniform), sara::Error);
}

TEST_CASE("local linear derivative reproduces a linear ramp") {
  for (auto kernel : {sara::Kernel::Uniform, sara::Kernel::Epanechnikov}) {
    std::vector<double> v(50);
    for (std::size_t i = 0; i < v.size(); ++i) v[i] = 0.37 * static_cast<double>(i + 1) - 2.0;
    const auto p = sara::local_linear_diagnostic(make_series(v), 6, kernel);
    for (Index k = 0; k < p.size(); ++k) CHECK(std::fabs(p.values(k) - 0.37) < 1e-9);

    const auto c = sara::local_linear_diagnostic(
        make_series(std::vector<double>(30, -1.5)), 4, kernel);
    CHECK(c.values.cwiseAbs().maxCoeff() < 1e-12);
  }
}

TEST_CASE("local linear derivative matches the weight formula") {
  const auto v = testutil::normal_draws(30, 5);
  for (bool epa : {false, true}) {
    const auto p = sara::local_linear_diagnostic(
        make_series(v), 5, epa ? sara::Kernel::Epanechnikov : sara::Kernel::Uniform);
    CHECK(p.domain_start == 5);
    CHECK(p.domain_end == 25);
    for (Index x = 5; x <= 25; ++x) {
      CHECK(std::fabs(p.at(x) - oracle::local_linear_direct(v, x, 5, epa)) < 1e-9);
    }
  }
}

TEST_CASE("single maximizer on a noiseless step") {
  std::vector<double> v(20, 0.0);
  std::fill(v.begin() + 10, v.end(), 1.0);
  const auto cands = sara::local_maximizers(sara::equal_weight_diagnostic(make_series(v), 4));
  REQUIRE(cands.size() == 1);
  CHECK(cands[0].position == 10);
  CHECK(cands[0].score == doctest::Approx(1.0));
  CHECK(cands[0].bandwidth == 4);
}

TEST_CASE("ties on a constant series keep a sparse leftmost set") {
  const auto p = sara::equal_weight_diagnostic(make_series(std::vector<double>(40, 2.0)), 5);
  const auto cands = sara::local_maximizers(p);
  REQUIRE(!cands.empty());
  for (const auto& c : cands) CHECK(c.score == 0.0);
  CHECK(cands.front().position == p.domain_start);
  CHECK(sara::threshold_candidates(cands, 0.0).empty());
}

TEST_CASE("maximizers of a noisy two-jump series match the window check") {
  const auto v = testutil::step_series(60, {20, 40}, {0.0, 2.0, 0.0}, 0.3, 99);
  const auto p = sara::equal_weight_diagnostic(make_series(v), 7);
  const std::vector<double> d(p.values.data(), p.values.data() + p.size());
  const auto expected = oracle::maximizers_window_check(d, p.domain_start, 7);

  auto cands = sara::local_maximizers(p);
  std::vector<long> got;
  for (const auto& c : cands) got.push_back(c.position);
  std::sort(got.begin(), got.end());
  CHECK(got == expected);
  CHECK(std::find(got.begin(), got.end(), 20) != got.end());
  CHECK(std::find(got.begin(), got.end(), 40) != got.end());
}

TEST_CASE("threshold keeps strictly larger scores in order") {
  sara::CandidateSet<double> c{{5, 3.1, 2}, {9, 1.2, 2}, {14, 0.4, 2}};
  const auto kept = sara::threshold_candidates(c, 1.0);
  REQUIRE(kept.size() == 2);
  CHECK(kept[0].score == 3.1);
  CHECK(kept[1].score == 1.2);
  CHECK(sara::threshold_candidates(c, 0.0) == c);
  CHECK(sara::threshold_candidates(c, 1.2).size() == 1);
  CHECK_THROWS_AS(sara::threshold_candidates(c, -0.1), sara::Error);
}

TEST_CASE("property: diagnostics are linear in the data") {
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    sara::Rng rng(seed);
    const std::size_t n = 20 + static_cast<std::size_t>(rng.uniform_int(0, 60));
    const Index h = rng.uniform_int(2, static_cast<Index>(n / 2));
    const auto a = testutil::normal_draws(n, seed * 2 + 1);
    const auto b = testutil::normal_draws(n, seed * 2 + 2);
    const double ca = rng.normal(), cb = rng.normal();
    std::vector<double> mix(n);
    for (std::size_t i = 0; i < n; ++i) mix[i] = ca * a[i] + cb * b[i];

    for (int scheme = 0; scheme < 2; ++scheme) {
      sara::WeightScheme ws;
      if (scheme == 1) ws = {sara::WeightKind::LocalLinear, sara::Kernel::Epanechnikov};
      const auto pa = sara::diagnostic(make_series(a), h, ws);
      const auto pb = sara::diagnostic(make_series(b), h, ws);
      const auto pm = sara::diagnostic(make_series(mix), h, ws);
      const double err = (pm.values - (ca * pa.values + cb * pb.values)).cwiseAbs().maxCoeff();
      CHECK(err < 1e-9);
    }
  }
}

TEST_CASE("property: recursion equals direct summation for n <= 200") {
  for (std::uint64_t seed = 100; seed < 160; ++seed) {
    sara::Rng rng(seed);
    const Index n = rng.uniform_int(2, 200);
    const Index h = rng.uniform_int(1, n / 2);
    const auto v = testutil::normal_draws(static_cast<std::size_t>(n), seed, 3.0);
    const auto p = sara::equal_weight_diagnostic(make_series(v), h);
    double worst = 0.0;
    for (Index x = h; x <= n - h; ++x) {
      worst = std::max(worst, std::fabs(p.at(x) - oracle::equal_weight_direct(v, x, h)));
    }
    CHECK(worst < 1e-9);
  }
}

TEST_CASE("property: maximizers are h apart and at most n/h + 1") {
  for (std::uint64_t seed = 0; seed < 40; ++seed) {
    sara::Rng rng(seed + 500);
    const Index n = rng.uniform_int(10, 300);
    const Index h = rng.uniform_int(1, n / 2);
    const auto v = testutil::normal_draws(static_cast<std::size_t>(n), seed);
    const auto cands = sara::local_maximizers(sara::equal_weight_diagnostic(make_series(v), h));
    std::vector<Index> pos;
    for (const auto& c : cands) pos.push_back(c.position);
    std::sort(pos.begin(), pos.end());
    for (std::size_t i = 1; i < pos.size(); ++i) CHECK(pos[i] - pos[i - 1] >= h);
    CHECK(static_cast<Index>(cands.size()) <= n / h + 1);
    for (std::size_t i = 1; i < cands.size(); ++i) CHECK(cands[i - 1].score >= cands[i].score);
  }
}

TEST_CASE("property: noiseless steps with gaps >= 2h are recovered exactly") {
  for (std::uint64_t seed = 0; seed < 30; ++seed) {
    sara::Rng rng(seed + 900);
    const Index h = rng.uniform_int(1, 8);
    const Index k = rng.uniform_int(1, 5);
    std::vector<long> cps;
    std::vector<double> levels{rng.normal()};
    long at = 0;
    for (Index j = 0; j < k; ++j) {
      at += 2 * h + rng.uniform_int(0, 10);
      cps.push_back(at);
      const double jump = (rng.uniform() < 0.5 ? -1.0 : 1.0) * (0.2 + rng.uniform());
      levels.push_back(levels.back() + jump);
    }
    const long n = at + 2 * h + rng.uniform_int(0, 10);
    const auto v = testutil::step_series(n, cps, levels);
    const auto cands = sara::local_maximizers(sara::equal_weight_diagnostic(make_series(v), h));

    std::vector<long> found;
    for (const auto& c : cands) {
      if (c.score > 1e-9) {
        found.push_back(c.position);
        const auto j = static_cast<std::size_t>(
            std::find(cps.begin(), cps.end(), c.position) - cps.begin());
        REQUIRE(j < cps.size());
        CHECK(c.score == doctest::Approx(std::fabs(levels[j + 1] - levels[j])).epsilon(1e-9));
      }
    }
    std::sort(found.begin(), found.end());
    CHECK(found == cps);
  }
}

TEST_CASE("null variance of D is close to 2 sigma^2 / h") {
  const Index h = 10, n = 60, x = 30;
  const double sigma = 1.0;
  const int reps = 4000;
  double sum = 0.0, sum2 = 0.0;
  for (int r = 0; r < reps; ++r) {
    const auto v = testutil::normal_draws(n, 7000 + static_cast<std::uint64_t>(r), sigma);
    const double d = sara::equal_weight_diagnostic(make_series(v), h).at(x);
    sum += d;
    sum2 += d * d;
  }
  const double var = (sum2 - sum * sum / reps) / (reps - 1);
  CHECK(std::fabs(var / (2.0 * sigma * sigma / h) - 1.0) < 0.1);
}

TEST_CASE("profile TSV layout") {
  const auto p = sara::equal_weight_diagnostic(make_series({0, 0, 0, 1, 1, 1, 1}), 3);
  std::ostringstream os;
  sara::write_profile_tsv(os, p);
  CHECK(os.str() == "position\tD\n3\t-1\n4\t-0.666666666666667\n");
}
