#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <limits>

#include "qspec/error.hpp"
#include "qspec/ranks.hpp"
#include "support.hpp"

using namespace qspec;
using qspec_test::counted_ranks;

TEST_CASE("rank transform on small series", "[ranks]") {
  SECTION("distinct values") {
    std::vector<double> y{3.1, -2.0, 0.5};
    auto r = rank_transform(y);
    REQUIRE(r.ranks == std::vector<std::int64_t>{3, 1, 2});
    REQUIRE(r.tie_count == 0);
  }
  SECTION("ties broken by position") {
    std::vector<double> y{5, 5, 1};
    auto r = rank_transform(y);
    REQUIRE(r.ranks == std::vector<std::int64_t>{2, 3, 1});
    REQUIRE(r.tie_count == 1);
  }
  SECTION("ties floored to the group mean") {
    std::vector<double> y{5, 5, 1, 5};
    auto r = rank_transform(y, TiePolicy::AverageFloor);
    // group {2,3,4} has mean 3
    REQUIRE(r.ranks == std::vector<std::int64_t>{3, 3, 1, 3});
    std::vector<double> z{5, 5, 1};
    REQUIRE(rank_transform(z, TiePolicy::AverageFloor).ranks == std::vector<std::int64_t>{2, 2, 1});
  }
}

TEST_CASE("rank transform errors", "[ranks]") {
  std::vector<double> y{1.0, std::numeric_limits<double>::quiet_NaN(), 2.0};
  try {
    rank_transform(y);
    FAIL("expected DataError");
  } catch (const DataError& e) {
    REQUIRE(std::string(e.what()).find("1") != std::string::npos);
  }
  std::vector<double> inf{1.0, 2.0, std::numeric_limits<double>::infinity()};
  REQUIRE_THROWS_AS(rank_transform(inf), DataError);
  std::vector<double> one{1.0};
  REQUIRE_THROWS_AS(rank_transform(one), DataError);
}

TEST_CASE("ranks agree with pairwise counting", "[ranks][property]") {
  for (std::uint64_t seed = 0; seed < 50; ++seed) {
    const std::size_t n = 2 + seed * 7;
    auto y = seed % 2 ? qspec_test::gaussian_series(n, seed) : qspec_test::tied_series(n, 5, seed);
    REQUIRE(rank_transform(y).ranks == counted_ranks(y));
  }
}

TEST_CASE("ranks are invariant under strictly increasing maps", "[ranks][property]") {
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    auto y = qspec_test::tied_series(100, 7, seed);
    std::vector<double> e(y.size()), c(y.size());
    for (std::size_t i = 0; i < y.size(); ++i) {
      e[i] = std::exp(y[i]);
      c[i] = y[i] * y[i] * y[i] + 2.0 * y[i];
    }
    for (auto pol : {TiePolicy::StableIndex, TiePolicy::AverageFloor}) {
      auto r = rank_transform(y, pol).ranks;
      REQUIRE(rank_transform(e, pol).ranks == r);
      REQUIRE(rank_transform(c, pol).ranks == r);
    }
  }
}

TEST_CASE("quantile levels compare exactly", "[ranks]") {
  SECTION("decimal levels are kept as rationals") {
    QuantileLevel l(0.3);
    REQUIRE(l.is_rational());
    REQUIRE(l.numerator() == 3);
    REQUIRE(l.denominator() == 10);
    // 10 * 0.3 evaluates to 3.0000000000000004 in floating point but the
    // comparison must use the exact product.
    REQUIRE(l.rank_threshold(10) == 3);
    REQUIRE(QuantileLevel(0.1).rank_threshold(30) == 3);
    REQUIRE(QuantileLevel(0.7).rank_threshold(10) == 7);
  }
  SECTION("thirds") {
    QuantileLevel l(1.0 / 3.0);
    REQUIRE(l.denominator() == 3);
    REQUIRE(l.rank_threshold(3) == 1);
    REQUIRE(l.rank_threshold(299) == 99);
  }
  SECTION("endpoints") {
    REQUIRE(QuantileLevel(0.0).rank_threshold(100) == 0);
    REQUIRE(QuantileLevel(1.0).rank_threshold(100) == 100);
  }
  SECTION("out of range") {
    REQUIRE_THROWS_AS(QuantileLevel(-0.1), UsageError);
    REQUIRE_THROWS_AS(QuantileLevel(1.5), UsageError);
    REQUIRE_THROWS_AS(QuantileLevel(std::nan("")), UsageError);
  }
}

TEST_CASE("rank thresholds match a brute-force rational oracle", "[ranks][property]") {
  // floor(n p / q) for levels written as p / q.
  for (std::int64_t q = 1; q <= 40; ++q)
    for (std::int64_t p = 0; p <= q; ++p) {
      QuantileLevel l(static_cast<double>(p) / static_cast<double>(q));
      for (std::int64_t n : {2, 7, 10, 64, 100, 257, 1000, 1024})
        REQUIRE(l.rank_threshold(n) == (n * p) / q);
    }
}

TEST_CASE("quantile grid", "[ranks]") {
  QuantileGrid g({0.1, 0.5, 0.9});
  REQUIRE(g.size() == 3);
  REQUIRE(g.find(0.5) == 1u);
  REQUIRE_FALSE(g.find(0.4).has_value());
  REQUIRE_THROWS_AS(QuantileGrid({0.5, 0.1}), UsageError);
  REQUIRE_THROWS_AS(QuantileGrid({0.5, 0.5}), UsageError);
}

TEST_CASE("indicator matrix", "[ranks]") {
  std::vector<double> y{1.0, 2.0, 3.0, 4.0};
  auto r = rank_transform(y);
  SECTION("n=4 rows") {
    auto ind = indicator_matrix(r, QuantileGrid({0.0, 0.1, 0.5, 1.0}));
    auto row = [&](std::size_t k) { return std::vector<int>(ind.row(k).begin(), ind.row(k).end()); };
    REQUIRE(row(0) == std::vector<int>{0, 0, 0, 0});
    REQUIRE(row(1) == std::vector<int>{0, 0, 0, 0});
    REQUIRE(row(2) == std::vector<int>{1, 1, 0, 0});
    REQUIRE(row(3) == std::vector<int>{1, 1, 1, 1});
  }
  SECTION("row sums and nesting") {
    QuantileGrid g({0.05, 0.1, 0.25, 1.0 / 3.0, 0.5, 0.75, 0.9});
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
      const std::size_t n = 10 + 13 * seed;
      auto ind = indicator_matrix(rank_transform(qspec_test::gaussian_series(n, seed)), g);
      for (std::size_t k = 0; k < g.size(); ++k) {
        REQUIRE(static_cast<std::int64_t>(ind.row_sum(k)) == g.level(k).rank_threshold(n));
        if (k > 0)
          for (std::size_t t = 0; t < n; ++t) REQUIRE(ind(k - 1, t) <= ind(k, t));
      }
    }
  }
}
