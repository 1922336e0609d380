#include <doctest.h>

#include <cmath>
#include <numbers>

#include "fsat/level_statistics.hpp"

using namespace fsat;

TEST_CASE("equally spaced phases have unit spacings, wrap-around included") {
  RealVector phases(8);
  for (Index i = 0; i < 8; ++i) phases(i) = -std::numbers::pi + 2 * std::numbers::pi * (static_cast<double>(i) + 0.5) / 8;
  const auto s = circular_spacings(phases);
  REQUIRE(s.size() == 8);
  for (double v : s) CHECK(v == doctest::Approx(1.0));
}

TEST_CASE("spacings always average to one") {
  RealVector phases(5);
  phases << -3.0, -0.2, 0.1, 0.15, 2.9;
  const auto s = circular_spacings(phases);
  double mean = 0.0;
  for (double v : s) mean += v;
  CHECK(mean / 5.0 == doctest::Approx(1.0));
}

TEST_CASE("surmise CDFs are normalized with unit mean") {
  for (auto m : {SpacingModel::Poisson, SpacingModel::COE, SpacingModel::CUE}) {
    CHECK(surmise_cdf(m, 0.0) == 0.0);
    CHECK(surmise_cdf(m, 40.0) == doctest::Approx(1.0));
    // mean = integral of (1 - CDF)
    double mean = 0.0;
    for (int i = 0; i < 40000; ++i) mean += (1.0 - surmise_cdf(m, (i + 0.5) * 1e-3)) * 1e-3;
    CHECK(mean == doctest::Approx(1.0).epsilon(1e-5));
  }
}

TEST_CASE("histogram masses plus overflow sum to one") {
  const std::vector<double> s{0.1, 0.5, 0.9, 1.2, 3.5, 7.0};
  const auto h = spacing_histogram(s, 4, 4.0);
  double total = h.overflow;
  for (double m : h.mass) total += m;
  CHECK(total == doctest::Approx(1.0));
  CHECK(h.overflow == doctest::Approx(1.0 / 6.0));
  CHECK(h.mass[0] == doctest::Approx(3.0 / 6.0));
}

TEST_CASE("two-sample KS distance") {
  CHECK(ks_distance({1, 2, 3}, {1, 2, 3}) == 0.0);
  CHECK(ks_distance({1, 2}, {3, 4}) == doctest::Approx(1.0));
  CHECK(ks_distance({1, 3}, {2, 4}) == doctest::Approx(0.5));
}
