#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <vector>

#include "cosmem/rng.hpp"
#include "cosmem/stats.hpp"
#include "oracles.hpp"

using namespace cosmem;

TEST_CASE("kendall tau-b on the canonical examples") {
  const std::vector<double> inc{1, 2, 3};
  const std::vector<double> dec{3, 2, 1};
  CHECK(*kendall_tau_b(inc, inc).tau_b == doctest::Approx(1.0));
  CHECK(*kendall_tau_b(inc, dec).tau_b == doctest::Approx(-1.0));

  // One x-tie: C=2, D=0, tau = 2/sqrt(6)
  const std::vector<double> xt{1, 1, 2};
  CHECK(*kendall_tau_b(xt, inc).tau_b ==
        doctest::Approx(2.0 / std::sqrt(6.0)).epsilon(1e-12));

  const std::vector<double> constant{5, 5, 5};
  CHECK(kendall_tau_b(constant, inc).status ==
        TestStatus::untestable_constant);
  CHECK(kendall_tau_b(inc, constant).status ==
        TestStatus::untestable_constant);

  const std::vector<double> two{1, 2};
  CHECK(kendall_tau_b(two, two).status == TestStatus::too_few_points);
  CHECK_THROWS_AS(kendall_tau_b(inc, two), LengthMismatch);
}

TEST_CASE("kendall tau-b and p-value match an external evaluation") {
  // Values cross-checked against a reference statistics package.
  const std::vector<double> x{1, 2, 2, 3, 5, 5, 5, 7};
  const std::vector<double> y{4, 1, 1, 0, 9, 9, 2, 3};
  const auto r = kendall_tau_b(x, y);
  REQUIRE(r.status == TestStatus::ok);
  CHECK(*r.tau_b == doctest::Approx(0.24019223070763074).epsilon(1e-12));
  CHECK(*r.p_raw == doctest::Approx(0.4345385293662313).epsilon(1e-9));
}

TEST_CASE("kendall equals the pair-classification oracle on tied data") {
  auto rng = make_stream(101, "kendall-prop");
  for (int iter = 0; iter < 300; ++iter) {
    const std::size_t n = 3 + uniform_below(rng, 48);
    const int distinct = 2 + static_cast<int>(uniform_below(rng, 8));
    const auto x = test::random_series(rng, n, distinct);
    const auto y = test::random_series(rng, n, distinct);
    const auto oracle = test::kendall_oracle(x, y);
    const auto fast = kendall_tau_b(x, y);
    if (!oracle.defined) {
      CHECK(fast.status == TestStatus::untestable_constant);
      continue;
    }
    REQUIRE(fast.status == TestStatus::ok);
    CHECK(std::fabs(*fast.tau_b - oracle.tau_b) <= 1e-12);
  }
}

TEST_CASE("kendall invariances") {
  auto rng = make_stream(102, "kendall-invariance");
  for (int iter = 0; iter < 100; ++iter) {
    const std::size_t n = 5 + uniform_below(rng, 40);
    const auto x = test::random_series(rng, n, 6);
    const auto y = test::random_series(rng, n, 6);
    const auto base = kendall_tau_b(x, y);
    if (base.status != TestStatus::ok) continue;

    std::vector<double> neg_y(n);
    for (std::size_t i = 0; i < n; ++i) neg_y[i] = -y[i];
    const auto negated = kendall_tau_b(x, neg_y);
    CHECK(*negated.tau_b == doctest::Approx(-*base.tau_b).epsilon(1e-12));

    // Strictly increasing transform of x leaves tau and p unchanged.
    std::vector<double> tx(n);
    for (std::size_t i = 0; i < n; ++i) tx[i] = std::exp(x[i] / 3.0) + x[i];
    const auto transformed = kendall_tau_b(tx, y);
    CHECK(*transformed.tau_b == doctest::Approx(*base.tau_b).epsilon(1e-12));
    CHECK(*transformed.p_raw == doctest::Approx(*base.p_raw).epsilon(1e-12));
  }
}

TEST_CASE("ks two-sample basics") {
  const std::vector<double> s{1, 2, 3, 4};
  auto same = ks_two_sample(s, s);
  CHECK(*same.d_stat == 0.0);
  CHECK(*same.p_raw == 1.0);

  const std::vector<double> lo{1, 2, 3}, hi{10, 11, 12};
  CHECK(*ks_two_sample(lo, hi).d_stat == doctest::Approx(1.0));

  const std::vector<double> a{1, 3, 5}, b{2, 4, 6};
  const auto r = ks_two_sample(a, b);
  CHECK(*r.d_stat == doctest::Approx(1.0 / 3.0).epsilon(1e-12));
  // Asymptotic series with the small-sample lambda correction, evaluated
  // independently with 200 terms.
  CHECK(*r.p_raw == doctest::Approx(0.9762126488644776).epsilon(1e-12));

  CHECK_THROWS_AS(ks_two_sample({}, s), EmptySample);
}

TEST_CASE("ks equals the ECDF-sweep oracle and is symmetric") {
  auto rng = make_stream(103, "ks-prop");
  for (int iter = 0; iter < 300; ++iter) {
    const std::size_t na = 1 + uniform_below(rng, 40);
    const std::size_t nb = 1 + uniform_below(rng, 40);
    const auto a = test::random_series(rng, na, 10);
    const auto b = test::random_series(rng, nb, 10);
    const double d = *ks_two_sample(a, b).d_stat;
    CHECK(std::fabs(d - test::ks_oracle(a, b)) <= 1e-12);
    CHECK(d == *ks_two_sample(b, a).d_stat);

    // Invariant under a strictly increasing transform applied to both.
    auto warp = [](std::vector<double> v) {
      for (auto& x : v) x = x * x * x + 2 * x;
      return v;
    };
    CHECK(*ks_two_sample(warp(a), warp(b)).d_stat == doctest::Approx(d));
  }
}

TEST_CASE("benjamini-yekutieli worked example") {
  const std::vector<double> p{0.04, 0.01, 0.03};
  const auto adj = by_adjust(p);
  // c(3) = 11/6; step-up gives [0.0733..., 0.055, 0.0733...]
  CHECK(adj[0] == doctest::Approx(0.04 * 3 * (11.0 / 6.0) / 3).epsilon(1e-12));
  CHECK(adj[1] == doctest::Approx(0.055).epsilon(1e-12));
  CHECK(adj[2] == doctest::Approx(adj[0]).epsilon(1e-12));

  const std::vector<double> ones{1.0, 1.0};
  const auto capped = by_adjust(ones);
  CHECK(capped[0] == 1.0);
  CHECK(capped[1] == 1.0);

  const std::vector<double> single{0.05};
  CHECK(by_adjust(single)[0] == doctest::Approx(0.05));

  CHECK_THROWS_AS(by_adjust(std::vector<double>{1.5}),
                  std::invalid_argument);
}

TEST_CASE("benjamini-yekutieli matches the oracle and its invariants") {
  auto rng = make_stream(104, "by-prop");
  for (int iter = 0; iter < 200; ++iter) {
    const std::size_t m = 1 + uniform_below(rng, 500);
    std::vector<double> p(m);
    for (auto& v : p) v = uniform01(rng);
    // occasional exact ties
    if (m > 3) {
      p[1] = p[0];
      p[m / 2] = p[m - 1];
    }
    const auto mine = by_adjust(p);
    const auto oracle = test::by_oracle(p);
    REQUIRE(mine.size() == oracle.size());
    for (std::size_t i = 0; i < m; ++i) {
      CHECK(mine[i] == oracle[i]); // same canonical expression: exact
      CHECK(mine[i] >= p[i]);
      CHECK(mine[i] <= 1.0);
    }
    // Monotone along the sorted raw order.
    std::vector<std::size_t> order(m);
    for (std::size_t i = 0; i < m; ++i) order[i] = i;
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return p[a] < p[b]; });
    for (std::size_t i = 1; i < m; ++i) {
      CHECK(mine[order[i - 1]] <= mine[order[i]] + 1e-15);
    }
  }
}

TEST_CASE("percentile interpolation") {
  const std::vector<double> odd{1, 2, 3, 4, 5};
  CHECK(percentile(odd, 50) == doctest::Approx(3.0));
  const std::vector<double> four{1, 2, 3, 4};
  CHECK(percentile(four, 100) == doctest::Approx(4.0));
  const std::vector<double> two{10, 20};
  CHECK(percentile(two, 90) == doctest::Approx(19.0));
  CHECK_THROWS_AS(percentile({}, 50), EmptySample);
  CHECK_THROWS_AS(percentile(two, 101), std::invalid_argument);
}

TEST_CASE("threshold partition preserves totals") {
  auto rng = make_stream(105, "partition");
  for (int iter = 0; iter < 50; ++iter) {
    const std::size_t n = 1 + uniform_below(rng, 60);
    const auto neutron = test::random_series(rng, n, 15);
    const auto errors = test::random_series(rng, n, 5);
    const double thr = static_cast<double>(uniform_below(rng, 15));
    const auto parts = partition_by_threshold(neutron, errors, thr);
    CHECK(parts.high.size() + parts.rest.size() == n);
    for (std::size_t i = 0, h = 0, r = 0; i < n; ++i) {
      if (neutron[i] > thr) {
        CHECK(parts.high[h++] == errors[i]);
      } else {
        CHECK(parts.rest[r++] == errors[i]);
      }
    }
  }
}
