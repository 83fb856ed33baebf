#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>

#include "datapricing/discretization.hpp"
#include "support.hpp"

namespace dp = datapricing;
using testsupport::Rng;

TEST(ValueGrid, HalfEpsilonOneType) {
  EXPECT_EQ(dp::build_value_grid(0.5, 1, 1), (std::vector<double>{0.75, 1.0, 1.125, 1.25, 1.5, 1.875}));
  EXPECT_EQ(dp::build_value_grid(0.5, 1, 2), (std::vector<double>{1.125, 1.5, 1.875}));
  EXPECT_EQ(dp::value_grid_size_bound(0.5, 1), 6u);
}

TEST(ValueGrid, BoundsAndNesting) {
  for (double eps : {0.05, 0.1, 0.2, 0.25, 0.3, 0.5, 0.7, 0.9}) {
    for (std::size_t m = 1; m <= 4; ++m) {
      const auto w1 = dp::build_value_grid(eps, m, 1);
      EXPECT_LE(w1.size(), dp::value_grid_size_bound(eps, m)) << eps << ' ' << m;
      EXPECT_TRUE(std::is_sorted(w1.begin(), w1.end()));
      EXPECT_EQ(std::adjacent_find(w1.begin(), w1.end()), w1.end());
      EXPECT_GT(w1.front(), eps);
      if (eps < 0.5) {  // eps = 0.5 has two bands, start index 2 keeps one
        const auto w2 = dp::build_value_grid(eps, m, 2);
        EXPECT_TRUE(std::includes(w1.begin(), w1.end(), w2.begin(), w2.end()));
      }
      EXPECT_EQ(w1, dp::build_value_grid(eps, m, 1));
    }
  }
}

TEST(ValueGrid, IndependentFormula) {
  // Band count and per-band count by integer search rather than logs.
  for (double eps : {0.1, 0.2, 0.3}) {
    for (std::size_t m = 1; m <= 3; ++m) {
      long bands = 0;
      while (std::pow(1 + eps, static_cast<double>(bands)) * eps < 1.0) ++bands;
      long per = 0;
      while (static_cast<double>(per) < (2 + eps) * static_cast<double>(m)) ++per;
      std::vector<double> want;
      for (long i = 1; i <= bands; ++i) {
        for (long k = 1; k <= per; ++k) {
          want.push_back(eps * std::pow(1 + eps, static_cast<double>(i - 1)) *
                         (1 + eps * static_cast<double>(k) / static_cast<double>(m)));
        }
      }
      std::sort(want.begin(), want.end());
      const auto got = dp::build_value_grid(eps, m, 1);
      // Distinct formula values never collide closer than 1e-9 here.
      ASSERT_EQ(got.size(), want.size());
      for (std::size_t k = 0; k < got.size(); ++k) EXPECT_NEAR(got[k], want[k], 1e-13);
    }
  }
}

TEST(ValueGrid, RejectsBadEpsilon) {
  EXPECT_THROW(dp::build_value_grid(1.0, 1), std::invalid_argument);
  EXPECT_THROW(dp::build_value_grid(0.0, 1), std::invalid_argument);
  EXPECT_THROW(dp::build_value_grid(0.9, 1, 2), std::invalid_argument);  // only one band
}

TEST(SmoothGrid, Examples) {
  const auto g = dp::build_data_grid_smooth(0.1, 2, 5.0, 1000);
  ASSERT_EQ(g.size(), 100u);
  for (std::size_t k = 0; k < g.size(); ++k) EXPECT_EQ(g[k], static_cast<dp::Amount>(10 * (k + 1)));
  EXPECT_EQ(dp::build_data_grid_smooth(0.5, 1, 0.1, 10), (std::vector<dp::Amount>{10}));
  EXPECT_EQ(dp::build_data_grid_smooth(0.5, 1, 1.0, 7), (std::vector<dp::Amount>{3, 6, 7}));
  EXPECT_THROW(dp::build_data_grid_smooth(0.1, 2, 5.0, 50), std::invalid_argument);
}

TEST(SmoothGrid, SizeIsCeilNOverDelta) {
  Rng rng(41);
  for (int trial = 0; trial < 100; ++trial) {
    const dp::Amount n = 1 + static_cast<dp::Amount>(rng.below(5000));
    const double eps = 0.05 + 0.9 * rng.uniform();
    const std::size_t m = 1 + static_cast<std::size_t>(rng.below(4));
    const double L = 0.01 + 3 * rng.uniform();
    const long delta = static_cast<long>(std::floor(eps * static_cast<double>(n) / (static_cast<double>(m) * L)));
    if (delta < 1) {
      EXPECT_THROW(dp::build_data_grid_smooth(eps, m, L, n), std::invalid_argument);
      continue;
    }
    const auto g = dp::build_data_grid_smooth(eps, m, L, n);
    EXPECT_EQ(static_cast<long>(g.size()), (n + delta - 1) / delta);
    EXPECT_EQ(g.back(), n);
    EXPECT_EQ(g.front(), std::min<dp::Amount>(delta, n));
  }
}

TEST(DiminishingGrid, WorkedExampleIntegerOracle) {
  // 2Jm = 2, eps^2 = 1/4, so 2Jm/eps^2 = 8 and 1 + eps^2 = 5/4.
  const dp::Amount n = 100;
  std::vector<dp::Amount> want;
  for (dp::Amount a = 1; a <= 8; ++a) want.push_back(a);
  // blocks = ceil(log_{5/4}(100/8)): smallest b with 8 * (5/4)^b >= 100.
  long blocks = 0;
  {
    std::int64_t num = 8, den = 1;
    while (num < 100 * den) {
      num *= 5;
      den *= 4;
      ++blocks;
    }
  }
  EXPECT_EQ(blocks, 12);
  std::int64_t pow5 = 1, pow4 = 1;
  for (long i = 0; i <= blocks; ++i) {
    const std::int64_t y = 8 * pow5 / pow4;
    for (std::int64_t k = 0; k <= 2; ++k) want.push_back(std::min<std::int64_t>(y * (8 + k) / 8, n));
    pow5 *= 5;
    pow4 *= 4;
  }
  want.push_back(n);
  std::sort(want.begin(), want.end());
  want.erase(std::unique(want.begin(), want.end()), want.end());
  EXPECT_EQ(dp::build_data_grid_diminishing(0.5, 2, 0.5, n), want);
}

TEST(DiminishingGrid, DensePrefixCoversSmallN) {
  const auto g = dp::build_data_grid_diminishing(0.5, 2, 0.5, 6);
  EXPECT_EQ(g, (std::vector<dp::Amount>{1, 2, 3, 4, 5, 6}));
}

TEST(DiminishingGrid, SizeBoundHolds) {
  Rng rng(42);
  for (int trial = 0; trial < 40; ++trial) {
    const double eps = 0.1 + 0.8 * rng.uniform();
    const std::size_t m = 1 + static_cast<std::size_t>(rng.below(3));
    const double J = 0.05 + 2 * rng.uniform();
    const dp::Amount n = 1 + static_cast<dp::Amount>(rng.below(200000));
    const auto g = dp::build_data_grid_diminishing(eps, m, J, n);
    EXPECT_LE(static_cast<double>(g.size()), dp::diminishing_grid_size_bound(eps, m, J, n) + 1e-9)
        << eps << ' ' << m << ' ' << J << ' ' << n;
    EXPECT_TRUE(std::is_sorted(g.begin(), g.end()));
    EXPECT_EQ(g.back(), n);
    EXPECT_GE(g.front(), 1);
  }
}

TEST(Space, MonotoneHalfEpsilon) {
  dp::GridParams p;
  p.epsilon = 0.5;
  p.m = 1;
  p.n_total = 10;
  const auto s = dp::build_space(p, dp::Scheme::monotone);
  EXPECT_EQ(s.count().value, 6u);
  const auto curves = s.curves().materialize(100);
  for (std::size_t k = 0; k < curves.size(); ++k) EXPECT_EQ(curves[k], dp::MStepCurve::flat(10, s.value_grid()[k]));
}

TEST(Space, SmoothNoLargerThanMonotone) {
  dp::GridParams p;
  p.epsilon = 0.2;
  p.m = 2;
  p.n_total = 60;
  p.smoothness = 1.0;
  const auto mono = dp::build_space(p, dp::Scheme::monotone);
  const auto smooth = dp::build_space(p, dp::Scheme::smooth);
  EXPECT_LE(smooth.count().value, mono.count().value);
  EXPECT_EQ(smooth.data_grid().size(), 10u);  // delta = 6
}

TEST(Space, DiminishingCountMatchesStream) {
  dp::GridParams p;
  p.epsilon = 0.4;
  p.m = 2;
  p.n_total = 40;
  p.diminishing = 0.3;
  const auto s = dp::build_space(p, dp::Scheme::diminishing);
  std::uint64_t streamed = 0;
  s.curves().for_each([&](const dp::MStepCursor&) { ++streamed; });
  EXPECT_EQ(streamed, s.count().value);
  EXPECT_EQ(std::vector<double>(s.value_grid().begin(), s.value_grid().end()), dp::build_value_grid(0.4, 2, 2));
}

TEST(Space, MissingConstantsRejected) {
  dp::GridParams p;
  p.n_total = 10;
  EXPECT_THROW(dp::build_space(p, dp::Scheme::smooth), std::invalid_argument);
  EXPECT_THROW(dp::build_space(p, dp::Scheme::diminishing), std::invalid_argument);
}

TEST(Space, PruneDropsUnsellableLevels) {
  dp::GridParams p;
  p.epsilon = 0.5;
  p.m = 1;
  p.n_total = 4;
  dp::SpaceOptions o;
  o.prune_above = 1.2;
  const auto s = dp::build_space(p, dp::Scheme::monotone, o);
  EXPECT_EQ(std::vector<double>(s.value_grid().begin(), s.value_grid().end()),
            (std::vector<double>{0.75, 1.0, 1.125}));
  o.prune_above = 0.1;
  EXPECT_THROW(dp::build_space(p, dp::Scheme::monotone, o), std::invalid_argument);
}

TEST(Space, CountWithinSizeBound) {
  Rng rng(43);
  for (int trial = 0; trial < 30; ++trial) {
    dp::GridParams p;
    p.epsilon = 0.1 + 0.5 * rng.uniform();
    p.m = 1 + static_cast<std::size_t>(rng.below(3));
    p.n_total = 2 + static_cast<dp::Amount>(rng.below(400));
    const auto s = dp::build_space(p, dp::Scheme::monotone);
    ASSERT_FALSE(s.count().saturated);
    EXPECT_LE(static_cast<double>(s.count().value), s.size_bound());
  }
}

TEST(Space, CheckedCountEnforcesCap) {
  dp::GridParams p;
  p.epsilon = 0.1;
  p.m = 3;
  p.n_total = 500;
  dp::SpaceOptions o;
  o.curve_cap = 1000;
  const auto s = dp::build_space(p, dp::Scheme::monotone, o);
  EXPECT_THROW(s.checked_count(), std::length_error);
}

TEST(Space, ParamsFromInstance) {
  const dp::MarketInstance inst(10, {dp::linear_curve(0.5, 10), dp::linear_curve(1.0, 10)});
  const auto p = dp::grid_params_for(inst, 0.2);
  EXPECT_NEAR(*p.smoothness, 1.0, 1e-12);
  EXPECT_EQ(p.m, 2u);
  const dp::MarketInstance given(10, {dp::linear_curve(0.5, 10)}, 3.0, 0.7);
  EXPECT_EQ(*dp::grid_params_for(given, 0.2).smoothness, 3.0);
  EXPECT_EQ(*dp::grid_params_for(given, 0.2).diminishing, 0.7);
}
