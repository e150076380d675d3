#pragma once

// Shared builders and independent oracles for the test binaries.  Everything
// here is deliberately naive: oracles recompute results by brute force so the
// library implementations have something honest to be compared against.

#include <algorithm>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <limits>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "ibsbt/backtest.h"
#include "ibsbt/indicators.h"
#include "ibsbt/rng.h"

namespace testutil {

// Calendar date for day k of the synthetic test calendar (day 0 = 2015-01-01).
inline std::string date_for(int k) {
    long z = 16436 + k + 719468;  // 16436 = days from 1970-01-01 to 2015-01-01
    long era = (z >= 0 ? z : z - 146096) / 146097;
    unsigned doe = static_cast<unsigned>(z - era * 146097);
    unsigned yoe = (doe - doe / 1460 + doe / 36524 - doe / 146096) / 365;
    long y = static_cast<long>(yoe) + era * 400;
    unsigned doy = doe - (365 * yoe + yoe / 4 - yoe / 100);
    unsigned mp = (5 * doy + 2) / 153;
    unsigned d = doy - (153 * mp + 2) / 5 + 1;
    unsigned m = mp < 10 ? mp + 3 : mp - 9;
    if (m <= 2) ++y;
    char buf[16];
    std::snprintf(buf, sizeof(buf), "%04ld-%02u-%02u", y, m, d);
    return buf;
}

inline ibsbt::OhlcBar make_bar(std::string date, double o, double h, double l, double c) {
    ibsbt::OhlcBar bar;
    bar.date = std::move(date);
    bar.open = o;
    bar.high = h;
    bar.low = l;
    bar.close = c;
    return bar;
}

inline ibsbt::OhlcBar make_bar(std::string date, double o, double h, double l, double c,
                               double adj, double vol) {
    ibsbt::OhlcBar bar = make_bar(std::move(date), o, h, l, c);
    bar.adj_close = adj;
    bar.volume = vol;
    return bar;
}

// Series whose bar k closes at closes[k]; opens carry the previous close and
// highs/lows pad the day's extremes so every bar passes strict validation.
inline ibsbt::BarSeries series_from_closes(const std::string& ticker,
                                           const std::vector<double>& closes,
                                           double pad = 0.01) {
    ibsbt::BarSeries series;
    series.ticker = ticker;
    for (std::size_t k = 0; k < closes.size(); ++k) {
        double open = k == 0 ? closes[0] : closes[k - 1];
        double top = std::max(open, closes[k]);
        double bot = std::min(open, closes[k]);
        series.bars.push_back(make_bar(date_for(static_cast<int>(k)), open, top * (1.0 + pad),
                                       bot * (1.0 - pad), closes[k]));
    }
    return series;
}

// Random but always-valid daily bars.  A slice of the days is degenerate
// (open == high == low == close) so undefined-indicator paths get exercised.
inline ibsbt::BarSeries random_walk(const std::string& ticker, int n_days, ibsbt::SplitMix64& rng,
                                    double degenerate_share = 0.05) {
    ibsbt::BarSeries series;
    series.ticker = ticker;
    double close = 20.0 + 80.0 * rng.next_double();
    for (int t = 0; t < n_days; ++t) {
        double prev = close;
        close = prev * (1.0 + (rng.next_double() - 0.5) * 0.06);
        ibsbt::OhlcBar bar;
        bar.date = date_for(t);
        if (rng.next_double() < degenerate_share) {
            bar.open = bar.high = bar.low = bar.close = close;
        } else {
            bar.open = prev * (1.0 + (rng.next_double() - 0.5) * 0.01);
            bar.close = close;
            bar.high = std::max(bar.open, bar.close) * (1.0 + rng.next_double() * 0.02);
            bar.low = std::min(bar.open, bar.close) * (1.0 - rng.next_double() * 0.02);
        }
        series.bars.push_back(std::move(bar));
    }
    return series;
}

// Brute-force indicator oracle: scan the whole window every day.
inline std::vector<double> ibs_brute(const ibsbt::BarSeries& series, int window) {
    std::vector<double> out(series.bars.size(), std::numeric_limits<double>::quiet_NaN());
    for (std::size_t t = 0; t < series.bars.size(); ++t) {
        if (t + 1 < static_cast<std::size_t>(window)) continue;
        double hi = series.bars[t].high;
        double lo = series.bars[t].low;
        for (std::size_t k = t + 1 - static_cast<std::size_t>(window); k < t; ++k) {
            hi = std::max(hi, series.bars[k].high);
            lo = std::min(lo, series.bars[k].low);
        }
        if (hi > lo) out[t] = (series.bars[t].close - lo) / (hi - lo);
    }
    return out;
}

inline bool same_values(const std::vector<double>& a, const std::vector<double>& b) {
    if (a.size() != b.size()) return false;
    for (std::size_t i = 0; i < a.size(); ++i) {
        bool nan_a = std::isnan(a[i]);
        bool nan_b = std::isnan(b[i]);
        if (nan_a != nan_b) return false;
        if (!nan_a && a[i] != b[i]) return false;
    }
    return true;
}

// Quadratic drawdown oracle: every (peak, trough) pair.
inline double drawdown_oracle(const std::vector<double>& curve) {
    double worst = 0.0;
    for (std::size_t i = 0; i < curve.size(); ++i) {
        for (std::size_t j = 0; j <= i; ++j) {
            worst = std::max(worst, 1.0 - curve[i] / curve[j]);
        }
    }
    return worst;
}

// Hand-rolled IBS panel for signal-level tests: values[i][t] per ticker.
inline ibsbt::IbsPanel ibs_panel(std::vector<std::string> tickers,
                                 std::vector<std::vector<double>> values) {
    ibsbt::IbsPanel panel;
    panel.tickers = std::move(tickers);
    panel.values = std::move(values);
    std::size_t n_dates = panel.values.empty() ? 0 : panel.values[0].size();
    for (std::size_t t = 0; t < n_dates; ++t) {
        panel.calendar.push_back(date_for(static_cast<int>(t)));
    }
    return panel;
}

struct TempDir {
    std::filesystem::path path;

    TempDir() {
        char tmpl[] = "/tmp/ibsbt_test_XXXXXX";
        const char* made = mkdtemp(tmpl);
        if (!made) throw std::runtime_error("mkdtemp failed");
        path = made;
    }
    ~TempDir() {
        std::error_code ec;
        std::filesystem::remove_all(path, ec);
    }
    TempDir(const TempDir&) = delete;
    TempDir& operator=(const TempDir&) = delete;

    std::filesystem::path file(const std::string& name) const { return path / name; }
};

inline void write_text(const std::filesystem::path& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    out << content;
}

inline std::string read_text(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    std::ostringstream buffer;
    buffer << in.rdbuf();
    return buffer.str();
}

}  // namespace testutil
