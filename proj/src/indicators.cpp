#include "ibsbt/indicators.h"

#include <deque>
#include <limits>
#include <stdexcept>

namespace ibsbt {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

// Rolling window extremes with a monotonic deque.  Pure selection: the
// results are the exact same doubles a brute-force scan would pick.
class RollingExtreme {
public:
    RollingExtreme(int window, bool track_max) : window_(window), track_max_(track_max) {}

    void push(std::size_t idx, double value) {
        while (!deque_.empty() && dominates(value, deque_.back().second)) {
            deque_.pop_back();
        }
        deque_.emplace_back(idx, value);
        if (deque_.front().first + window_ <= idx) {
            deque_.pop_front();
        }
    }

    double value() const { return deque_.front().second; }

private:
    bool dominates(double incoming, double resident) const {
        return track_max_ ? incoming >= resident : incoming <= resident;
    }

    std::size_t window_;
    bool track_max_;
    std::deque<std::pair<std::size_t, double>> deque_;
};

}  // namespace

std::vector<double> ibs_values(const BarSeries& series, int window_n) {
    if (window_n < 1) {
        throw std::invalid_argument("ibs window must be >= 1");
    }
    std::vector<double> out(series.bars.size(), kNaN);
    RollingExtreme highs(window_n, true);
    RollingExtreme lows(window_n, false);
    for (std::size_t t = 0; t < series.bars.size(); ++t) {
        const OhlcBar& bar = series.bars[t];
        highs.push(t, bar.high);
        lows.push(t, bar.low);
        if (t + 1 < static_cast<std::size_t>(window_n)) continue;
        double hi = highs.value();
        double lo = lows.value();
        if (hi > lo) {
            out[t] = (bar.close - lo) / (hi - lo);
        }
    }
    return out;
}

IbsPanel compute_ibs(const AlignedPanel& panel, int window_n) {
    IbsPanel out;
    out.tickers = panel.tickers;
    out.calendar = panel.calendar;
    out.window_n = window_n;
    out.values.reserve(panel.n_tickers());
    for (std::size_t i = 0; i < panel.n_tickers(); ++i) {
        BarSeries view;
        view.ticker = panel.tickers[i];
        view.bars = panel.bars[i];
        out.values.push_back(ibs_values(view, window_n));
    }
    return out;
}

ProbabilityRow positive_return_probabilities(const BarSeries& series,
                                             const std::vector<double>& ibs,
                                             double long_threshold, double short_threshold,
                                             ReturnBasis basis) {
    if (ibs.size() != series.bars.size()) {
        throw std::invalid_argument("ibs vector does not match series length");
    }
    if (long_threshold < 0 || short_threshold > 1 || long_threshold >= short_threshold) {
        throw std::invalid_argument("need 0 <= long_threshold < short_threshold <= 1");
    }
    ProbabilityRow row;
    row.ticker = series.ticker;
    long up_long = 0, down_short = 0;
    for (std::size_t t = 0; t + 1 < series.bars.size(); ++t) {
        if (!ibs_defined(ibs[t])) continue;
        double today = close_for(series.bars[t], basis);
        double next = close_for(series.bars[t + 1], basis);
        if (ibs[t] < long_threshold) {
            ++row.n_long;
            if (next > today) ++up_long;
        }
        if (ibs[t] > short_threshold) {
            ++row.n_short;
            if (next < today) ++down_short;
        }
    }
    if (row.n_long > 0) row.p_long = static_cast<double>(up_long) / row.n_long;
    if (row.n_short > 0) row.p_short = static_cast<double>(down_short) / row.n_short;
    return row;
}

}  // namespace ibsbt
