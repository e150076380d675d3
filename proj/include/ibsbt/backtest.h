#pragma once

#include <string>
#include <vector>

#include "ibsbt/bar.h"
#include "ibsbt/strategy.h"

namespace ibsbt {

struct CostModel {
    double borrow_rate_daily = 0.0001;  // charged per day the short side is on
    double slippage_per_side = 0.0;     // fraction of traded notional, per transaction

    void validate() const;  // throws std::invalid_argument
};

// One booked day of portfolio returns.  Leg returns carry their sign: the
// short leg is positive when the shorted names fall.  net_return is exactly
//   (long_leg + (short_leg - borrow_cost)) - slippage_cost
// in that association order; tests rely on the identity bitwise.
struct DailyPortfolioRecord {
    std::string date;
    double long_leg = 0.0;
    double short_leg = 0.0;
    double borrow_cost = 0.0;
    double slippage_cost = 0.0;
    double net_return = 0.0;
    bool in_market = false;
    DailySignal signal;  // the new tranche requested at this close, if any
};

struct TradeLogEntry {
    std::string ticker;
    std::string side;        // "long" | "short"
    std::string entry_date;  // day the entry price is struck
    std::string exit_date;   // day the exit price is struck
};

struct BacktestResult {
    StrategyConfig config;
    CostModel costs;
    std::vector<DailyPortfolioRecord> records;  // booking days only
    std::vector<double> equity_curve;           // cumulative product of (1 + net)
    std::vector<TradeLogEntry> trade_log;
    int skipped_tranches = 0;  // signals too close to the end of data to book
    int no_trade_days = 0;     // rank-based days forced flat (thin cross-section)
};

// Books signals as H = holding_days overlapping tranches, each on 1/H of
// capital with half allocated per active side.  close_to_close signals at t
// book closes t..t+H (days t+1..t+H); open_to_open signals enter at the next
// open and book opens t+1..t+H+1 (days t+2..t+H+1).  The adjusted return
// basis applies to close prices only; open-to-open segments always use raw
// opens.  Throws std::runtime_error if equity ever reaches zero or below.
BacktestResult run_backtest(const AlignedPanel& panel, const std::vector<DailySignal>& signals,
                            const StrategyConfig& cfg, const CostModel& costs,
                            ReturnBasis basis = ReturnBasis::Raw);

// Frictionless long-on-every-close benchmark for a single series.
BacktestResult buy_and_hold(const BarSeries& series, ReturnBasis basis = ReturnBasis::Raw);

// Per-day attribution: long_only[k] = long_leg; short_only[k] = short leg net
// of borrow (the borrow charge belongs to the short side).  With zero
// slippage, long_only[k] + short_only[k] == net_return exactly.
struct LegReturns {
    std::vector<double> long_only;
    std::vector<double> short_only;
};

LegReturns decompose_legs(const BacktestResult& result);

// "date,net_return,long_leg,short_leg,borrow_cost,slippage,in_market"
std::string records_to_csv(const BacktestResult& result);

// "date,equity"
std::string equity_to_csv(const BacktestResult& result);

}  // namespace ibsbt
