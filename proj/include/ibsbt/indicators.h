#pragma once

#include <cmath>
#include <optional>
#include <string>
#include <vector>

#include "ibsbt/bar.h"

namespace ibsbt {

// Internal bar strength over an n-day window:
//   (close_t - min(low_{t-n+1..t})) / (max(high_{t-n+1..t}) - min(low_{t-n+1..t}))
// Undefined (NaN) while fewer than n bars of history exist or when the
// window's high equals its low.
std::vector<double> ibs_values(const BarSeries& series, int window_n);

inline bool ibs_defined(double v) { return !std::isnan(v); }

struct IbsPanel {
    std::vector<std::string> tickers;
    std::vector<std::string> calendar;
    std::vector<std::vector<double>> values;  // [ticker][date], NaN = undefined
    int window_n = 1;

    std::size_t n_tickers() const { return tickers.size(); }
    std::size_t n_dates() const { return calendar.size(); }
};

IbsPanel compute_ibs(const AlignedPanel& panel, int window_n);

// Conditional hit rates behind the signal: given days where IBS crosses a
// threshold, how often does the next close move the way the signal expects?
// Zero-return days count against the signal.  A side with no qualifying days
// reports an unavailable probability.
struct ProbabilityRow {
    std::string ticker;
    std::optional<double> p_long;   // P(next close up   | ibs < long_threshold)
    std::optional<double> p_short;  // P(next close down | ibs > short_threshold)
    long n_long = 0;
    long n_short = 0;
};

ProbabilityRow positive_return_probabilities(const BarSeries& series,
                                             const std::vector<double>& ibs,
                                             double long_threshold, double short_threshold,
                                             ReturnBasis basis = ReturnBasis::Raw);

}  // namespace ibsbt
