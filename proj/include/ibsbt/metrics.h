#pragma once

#include <optional>
#include <string>
#include <vector>

#include "ibsbt/backtest.h"

namespace ibsbt {

constexpr double kTradingDaysPerYear = 252.0;

// Annualized mean/stddev of daily returns (risk-free rate zero, sample
// stddev with n-1).  Throws std::invalid_argument on fewer than two
// observations; returns nullopt when the variance is exactly zero.
std::optional<double> sharpe_ratio(const std::vector<double>& daily_returns);

// Largest peak-to-trough loss, as a positive fraction.  The running peak
// starts at the curve's first element.
double max_drawdown(const std::vector<double>& equity_curve);

// Fraction of booked days with any open position.
double time_in_market(const std::vector<DailyPortfolioRecord>& records);

struct PerformanceSummary {
    std::optional<double> sharpe;  // nullopt when the return series is flat
    double time_in = 0.0;
    double total_return = 0.0;
    double max_drawdown = 0.0;
    long n_days = 0;
};

// Drawdown is measured against a curve with 1.0 prepended, so a dip below
// the starting stake counts even if it happens on day one.
PerformanceSummary summarize(const BacktestResult& result);

// {"sharpe": ..., "time_in": ..., "total_return": ..., "max_drawdown": ...,
//  "n_days": ...}; sharpe serializes as null when unavailable.
std::string summary_to_json(const PerformanceSummary& summary);

}  // namespace ibsbt
