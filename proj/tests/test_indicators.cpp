#include <cmath>

#include "doctest.h"
#include "helpers.h"
#include "ibsbt/indicators.h"

using namespace ibsbt;
using namespace testutil;

TEST_CASE("ibs: close pinned to the bar's extremes and midpoint") {
    BarSeries series;
    series.ticker = "AAA";
    series.bars = {make_bar(date_for(0), 10.5, 12, 10, 10),
                   make_bar(date_for(1), 10.5, 12, 10, 12),
                   make_bar(date_for(2), 10.5, 12, 10, 11)};
    auto values = ibs_values(series, 1);
    REQUIRE(values.size() == 3);
    CHECK(values[0] == 0.0);
    CHECK(values[1] == 1.0);
    CHECK(values[2] == 0.5);
}

TEST_CASE("ibs: two-day window spans both bars' extremes") {
    BarSeries series;
    series.ticker = "AAA";
    series.bars = {make_bar(date_for(0), 11, 12, 11, 11.5),
                   make_bar(date_for(1), 10, 10.5, 9, 10)};
    auto values = ibs_values(series, 2);
    REQUIRE(values.size() == 2);
    CHECK(!ibs_defined(values[0]));            // not enough history yet
    CHECK(values[1] == doctest::Approx(1.0 / 3.0).epsilon(1e-15));
    CHECK(values[1] == (10.0 - 9.0) / (12.0 - 9.0));
}

TEST_CASE("ibs: a range-less day is undefined for window 1, covered by window 2") {
    BarSeries series;
    series.ticker = "AAA";
    series.bars = {make_bar(date_for(0), 10, 12, 9, 11),
                   make_bar(date_for(1), 10, 10, 10, 10)};
    auto w1 = ibs_values(series, 1);
    CHECK(ibs_defined(w1[0]));
    CHECK(!ibs_defined(w1[1]));                // high == low
    auto w2 = ibs_values(series, 2);
    CHECK(!ibs_defined(w2[0]));
    CHECK(ibs_defined(w2[1]));                 // window range comes from day 0
    CHECK(w2[1] == (10.0 - 9.0) / (12.0 - 9.0));
}

TEST_CASE("ibs: window must be positive") {
    BarSeries series = series_from_closes("AAA", {10, 11});
    CHECK_THROWS_AS(ibs_values(series, 0), std::invalid_argument);
    CHECK_THROWS_AS(ibs_values(series, -2), std::invalid_argument);
}

TEST_CASE("ibs: matches the brute-force oracle bit for bit") {
    SplitMix64 rng(99);
    for (int rep = 0; rep < 300; ++rep) {
        int n = 5 + static_cast<int>(rng.next_below(120));
        BarSeries series = random_walk("RND", n, rng);
        for (int window : {1, 2, 3, 5}) {
            CAPTURE(rep);
            CAPTURE(window);
            REQUIRE(same_values(ibs_values(series, window), ibs_brute(series, window)));
        }
    }
}

TEST_CASE("ibs: values stay within [0, 1] and leading days are undefined") {
    SplitMix64 rng(7);
    BarSeries series = random_walk("RND", 200, rng);
    for (int window : {1, 3, 5}) {
        auto values = ibs_values(series, window);
        for (std::size_t t = 0; t < values.size(); ++t) {
            if (t + 1 < static_cast<std::size_t>(window)) {
                CHECK(!ibs_defined(values[t]));
            } else if (ibs_defined(values[t])) {
                CHECK(values[t] >= 0.0);
                CHECK(values[t] <= 1.0);
            }
        }
    }
}

TEST_CASE("ibs: invariant under rescaling the whole price series") {
    SplitMix64 rng(13);
    BarSeries series = random_walk("RND", 150, rng, 0.0);
    BarSeries scaled = series;
    for (auto& bar : scaled.bars) {
        bar.open *= 3.7;
        bar.high *= 3.7;
        bar.low *= 3.7;
        bar.close *= 3.7;
    }
    for (int window : {1, 2, 5}) {
        auto a = ibs_values(series, window);
        auto b = ibs_values(scaled, window);
        REQUIRE(a.size() == b.size());
        for (std::size_t t = 0; t < a.size(); ++t) {
            REQUIRE(ibs_defined(a[t]) == ibs_defined(b[t]));
            if (ibs_defined(a[t])) CHECK(b[t] == doctest::Approx(a[t]).epsilon(1e-12));
        }
    }
}

TEST_CASE("ibs: monotone in the close over a fixed window range") {
    BarSeries series;
    series.ticker = "AAA";
    series.bars = {make_bar(date_for(0), 10, 14, 8, 9)};
    double prev = -1.0;
    for (double close = 8.0; close <= 14.0; close += 0.5) {
        series.bars[0].close = close;
        series.bars[0].open = close;  // keep the bar valid as the close moves
        double v = ibs_values(series, 1)[0];
        CHECK(v >= prev);
        prev = v;
    }
}

TEST_CASE("compute_ibs mirrors per-series values over an aligned panel") {
    SplitMix64 rng(55);
    BarSeries a = random_walk("AAA", 80, rng);
    BarSeries b = random_walk("BBB", 80, rng);
    AlignedPanel panel = align_calendars({a, b});
    for (int window : {1, 2}) {
        IbsPanel ibs = compute_ibs(panel, window);
        CHECK(ibs.window_n == window);
        CHECK(ibs.tickers == panel.tickers);
        CHECK(ibs.calendar == panel.calendar);
        for (std::size_t i = 0; i < panel.n_tickers(); ++i) {
            BarSeries view;
            view.ticker = panel.tickers[i];
            view.bars = panel.bars[i];
            REQUIRE(same_values(ibs.values[i], ibs_values(view, window)));
        }
    }
}

TEST_CASE("hit rates: every down close after a low-indicator day") {
    // Indicator below 0.2 on days 0-1; both next closes move up.
    BarSeries series;
    series.ticker = "AAA";
    series.bars = {make_bar(date_for(0), 10, 12, 9, 9.1),
                   make_bar(date_for(1), 10, 12, 9, 9.2),
                   make_bar(date_for(2), 10, 12, 9, 9.5)};
    auto ibs = ibs_values(series, 1);
    auto row = positive_return_probabilities(series, ibs, 0.2, 0.8, ReturnBasis::Raw);
    CHECK(row.ticker == "AAA");
    CHECK(row.n_long == 2);
    REQUIRE(row.p_long.has_value());
    CHECK(*row.p_long == 1.0);
    CHECK(row.n_short == 0);
    CHECK(!row.p_short.has_value());
}

TEST_CASE("hit rates: zero-return days count against the signal") {
    BarSeries series;
    series.ticker = "AAA";
    series.bars = {make_bar(date_for(0), 10, 12, 9, 9.1),   // ibs < 0.2
                   make_bar(date_for(1), 9.1, 12, 8, 9.1),  // unchanged close
                   make_bar(date_for(2), 10, 12, 9, 11.9),  // ibs > 0.8
                   make_bar(date_for(3), 11, 12.5, 10, 11.9)};
    auto ibs = ibs_values(series, 1);
    auto row = positive_return_probabilities(series, ibs, 0.2, 0.8, ReturnBasis::Raw);
    CHECK(row.n_long == 1);
    CHECK(*row.p_long == 0.0);   // flat next close is not "up"
    CHECK(row.n_short == 1);
    CHECK(*row.p_short == 0.0);  // flat next close is not "down" either
}

TEST_CASE("hit rates: hand-computed mixed outcome") {
    // Five low-indicator days with a next close; it rises on three of them.
    std::vector<double> closes = {9.0, 9.3, 9.1, 9.4, 9.55, 9.2};
    BarSeries series;
    series.ticker = "AAA";
    for (std::size_t k = 0; k < closes.size(); ++k) {
        series.bars.push_back(
            make_bar(date_for(static_cast<int>(k)), closes[k], 12, 9, closes[k]));
    }
    auto ibs = ibs_values(series, 1);
    for (double v : ibs) CHECK(v < 0.2);  // every close sits near the range low
    auto row = positive_return_probabilities(series, ibs, 0.2, 0.8, ReturnBasis::Raw);
    CHECK(row.n_long == 5);               // the last day has no next close
    CHECK(*row.p_long == doctest::Approx(3.0 / 5.0));
}

TEST_CASE("hit rates: undefined indicator days are skipped") {
    SplitMix64 rng(17);
    BarSeries series = random_walk("RND", 50, rng);
    auto ibs = ibs_values(series, 3);
    auto row = positive_return_probabilities(series, ibs, 0.5, 0.8, ReturnBasis::Raw);
    // The first two days are undefined and must not be counted on either side.
    long expect_long = 0;
    for (std::size_t t = 0; t + 1 < ibs.size(); ++t) {
        if (ibs_defined(ibs[t]) && ibs[t] < 0.5) ++expect_long;
    }
    CHECK(expect_long > 0);
    CHECK(row.n_long == expect_long);
}

TEST_CASE("hit rates: threshold ordering is enforced") {
    BarSeries series = series_from_closes("AAA", {10, 11, 12});
    auto ibs = ibs_values(series, 1);
    CHECK_THROWS_AS(positive_return_probabilities(series, ibs, 0.8, 0.2, ReturnBasis::Raw),
                    std::invalid_argument);
    CHECK_THROWS_AS(positive_return_probabilities(series, ibs, -0.1, 0.8, ReturnBasis::Raw),
                    std::invalid_argument);
    std::vector<double> short_ibs(ibs.begin(), ibs.end() - 1);
    CHECK_THROWS_AS(positive_return_probabilities(series, short_ibs, 0.2, 0.8, ReturnBasis::Raw),
                    std::invalid_argument);
}
