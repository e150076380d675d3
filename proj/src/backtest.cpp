#include "ibsbt/backtest.h"

#include <cstdio>
#include <stdexcept>

namespace ibsbt {

namespace {

struct Tranche {
    std::size_t entry_day = 0;  // first booked date index
    std::size_t exit_day = 0;   // last booked date index
    std::vector<std::size_t> longs;   // panel ticker indices, ascending
    std::vector<std::size_t> shorts;
};

double side_mean(const std::vector<std::size_t>& members,
                 const std::vector<std::vector<double>>& rets, std::size_t day) {
    double sum = 0.0;
    for (std::size_t i : members) sum += rets[i][day];
    return sum / static_cast<double>(members.size());
}

std::string format_fixed(double v, int digits) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.*f", digits, v);
    return buf;
}

}  // namespace

void CostModel::validate() const {
    if (borrow_rate_daily < 0) throw std::invalid_argument("borrow_rate_daily must be >= 0");
    if (slippage_per_side < 0) throw std::invalid_argument("slippage_per_side must be >= 0");
}

BacktestResult run_backtest(const AlignedPanel& panel, const std::vector<DailySignal>& signals,
                            const StrategyConfig& cfg, const CostModel& costs,
                            ReturnBasis basis) {
    cfg.validate();
    costs.validate();
    if (signals.size() != panel.n_dates()) {
        throw std::invalid_argument("signal count does not match panel calendar");
    }

    const std::size_t T = panel.n_dates();
    const std::size_t H = static_cast<std::size_t>(cfg.holding_days);
    const bool close_mode = cfg.execution == ExecutionMode::CloseToClose;
    const std::size_t first_day = close_mode ? 1 : 2;
    if (T < H + first_day) {
        throw std::invalid_argument("panel needs at least holding_days + " +
                                    std::to_string(first_day) + " dates");
    }
    const double w = 1.0 / static_cast<double>(H);

    // Per-ticker segment returns booked on day d (from d-1's price to d's).
    std::vector<std::vector<double>> rets(panel.n_tickers(), std::vector<double>(T, 0.0));
    for (std::size_t i = 0; i < panel.n_tickers(); ++i) {
        for (std::size_t d = 1; d < T; ++d) {
            const OhlcBar& prev = panel.bar(i, d - 1);
            const OhlcBar& cur = panel.bar(i, d);
            rets[i][d] = close_mode ? close_for(cur, basis) / close_for(prev, basis) - 1.0
                                    : cur.open / prev.open - 1.0;
        }
    }

    BacktestResult result;
    result.config = cfg;
    result.costs = costs;

    std::vector<Tranche> tranches;
    for (std::size_t t = 0; t < T; ++t) {
        const DailySignal& sig = signals[t];
        if (sig.insufficient) ++result.no_trade_days;
        if (sig.empty()) continue;

        Tranche tranche;
        tranche.entry_day = close_mode ? t + 1 : t + 2;
        tranche.exit_day = tranche.entry_day + H - 1;
        if (tranche.exit_day > T - 1) {
            ++result.skipped_tranches;
            continue;
        }

        // Entry strikes this close (close mode) or the next open; the exit
        // strike lands on the tranche's last booked day either way.
        std::string entry_label = close_mode ? panel.calendar[t] : panel.calendar[t + 1];
        const std::string& exit_label = panel.calendar[tranche.exit_day];
        for (const auto& ticker : sig.longs) {
            tranche.longs.push_back(panel.ticker_index(ticker));
            result.trade_log.push_back({ticker, "long", entry_label, exit_label});
        }
        for (const auto& ticker : sig.shorts) {
            tranche.shorts.push_back(panel.ticker_index(ticker));
            result.trade_log.push_back({ticker, "short", entry_label, exit_label});
        }
        tranches.push_back(std::move(tranche));
    }

    result.records.reserve(T - first_day);
    result.equity_curve.reserve(T - first_day);
    double equity = 1.0;
    std::size_t lo = 0, hi = 0;
    for (std::size_t d = first_day; d < T; ++d) {
        while (hi < tranches.size() && tranches[hi].entry_day <= d) ++hi;
        while (lo < hi && tranches[lo].exit_day < d) ++lo;

        DailyPortfolioRecord rec;
        rec.date = panel.calendar[d];
        rec.signal = signals[d];
        for (std::size_t k = lo; k < hi; ++k) {
            const Tranche& tr = tranches[k];
            rec.in_market = true;
            bool has_longs = !tr.longs.empty();
            bool has_shorts = !tr.shorts.empty();
            if (has_longs) rec.long_leg += w * 0.5 * side_mean(tr.longs, rets, d);
            if (has_shorts) {
                rec.short_leg -= w * 0.5 * side_mean(tr.shorts, rets, d);
                rec.borrow_cost += w * 0.5 * costs.borrow_rate_daily;
            }
            double traded = 0.5 * (has_longs ? 1.0 : 0.0) + 0.5 * (has_shorts ? 1.0 : 0.0);
            if (d == tr.entry_day) rec.slippage_cost += w * costs.slippage_per_side * traded;
            if (d == tr.exit_day) rec.slippage_cost += w * costs.slippage_per_side * traded;
        }
        rec.net_return = (rec.long_leg + (rec.short_leg - rec.borrow_cost)) - rec.slippage_cost;

        double growth = 1.0 + rec.net_return;
        if (growth <= 0.0) {
            throw std::runtime_error("equity wiped out on " + rec.date);
        }
        equity *= growth;
        result.records.push_back(std::move(rec));
        result.equity_curve.push_back(equity);
    }
    return result;
}

BacktestResult buy_and_hold(const BarSeries& series, ReturnBasis basis) {
    if (series.bars.empty()) {
        throw std::invalid_argument("buy_and_hold needs a non-empty series");
    }
    BacktestResult result;
    result.costs = CostModel{0.0, 0.0};
    double equity = 1.0;
    for (std::size_t d = 1; d < series.bars.size(); ++d) {
        DailyPortfolioRecord rec;
        rec.date = series.bars[d].date;
        rec.long_leg = close_for(series.bars[d], basis) / close_for(series.bars[d - 1], basis) - 1.0;
        rec.net_return = (rec.long_leg + (rec.short_leg - rec.borrow_cost)) - rec.slippage_cost;
        rec.in_market = true;
        rec.signal.date = rec.date;
        rec.signal.longs.push_back(series.ticker);
        double growth = 1.0 + rec.net_return;
        if (growth <= 0.0) {
            throw std::runtime_error("equity wiped out on " + rec.date);
        }
        equity *= growth;
        result.records.push_back(std::move(rec));
        result.equity_curve.push_back(equity);
    }
    return result;
}

LegReturns decompose_legs(const BacktestResult& result) {
    LegReturns legs;
    legs.long_only.reserve(result.records.size());
    legs.short_only.reserve(result.records.size());
    for (const auto& rec : result.records) {
        legs.long_only.push_back(rec.long_leg);
        legs.short_only.push_back(rec.short_leg - rec.borrow_cost);
    }
    return legs;
}

std::string records_to_csv(const BacktestResult& result) {
    std::string out = "date,net_return,long_leg,short_leg,borrow_cost,slippage,in_market\n";
    for (const auto& rec : result.records) {
        out += rec.date;
        out += ',';
        out += format_fixed(rec.net_return, 10);
        out += ',';
        out += format_fixed(rec.long_leg, 10);
        out += ',';
        out += format_fixed(rec.short_leg, 10);
        out += ',';
        out += format_fixed(rec.borrow_cost, 10);
        out += ',';
        out += format_fixed(rec.slippage_cost, 10);
        out += ',';
        out += rec.in_market ? '1' : '0';
        out += '\n';
    }
    return out;
}

std::string equity_to_csv(const BacktestResult& result) {
    std::string out = "date,equity\n";
    for (std::size_t k = 0; k < result.records.size(); ++k) {
        out += result.records[k].date;
        out += ',';
        out += format_fixed(result.equity_curve[k], 10);
        out += '\n';
    }
    return out;
}

}  // namespace ibsbt
