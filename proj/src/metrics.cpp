#include "ibsbt/metrics.h"

#include <cmath>
#include <stdexcept>

#include "json.hpp"

namespace ibsbt {

std::optional<double> sharpe_ratio(const std::vector<double>& daily_returns) {
    if (daily_returns.size() < 2) {
        throw std::invalid_argument("sharpe ratio needs at least two observations");
    }
    double n = static_cast<double>(daily_returns.size());
    double mean = 0.0;
    for (double r : daily_returns) mean += r;
    mean /= n;
    double ss = 0.0;
    for (double r : daily_returns) ss += (r - mean) * (r - mean);
    double sd = std::sqrt(ss / (n - 1.0));
    if (sd == 0.0) return std::nullopt;
    return mean / sd * std::sqrt(kTradingDaysPerYear);
}

double max_drawdown(const std::vector<double>& equity_curve) {
    double peak = 0.0;
    double worst = 0.0;
    for (double e : equity_curve) {
        peak = std::max(peak, e);
        worst = std::max(worst, 1.0 - e / peak);
    }
    return worst;
}

double time_in_market(const std::vector<DailyPortfolioRecord>& records) {
    if (records.empty()) return 0.0;
    std::size_t in = 0;
    for (const auto& rec : records) {
        if (rec.in_market) ++in;
    }
    return static_cast<double>(in) / static_cast<double>(records.size());
}

PerformanceSummary summarize(const BacktestResult& result) {
    std::vector<double> net;
    net.reserve(result.records.size());
    for (const auto& rec : result.records) net.push_back(rec.net_return);

    PerformanceSummary summary;
    summary.sharpe = sharpe_ratio(net);
    summary.time_in = time_in_market(result.records);
    summary.total_return = result.equity_curve.back() - 1.0;

    std::vector<double> curve;
    curve.reserve(result.equity_curve.size() + 1);
    curve.push_back(1.0);
    curve.insert(curve.end(), result.equity_curve.begin(), result.equity_curve.end());
    summary.max_drawdown = max_drawdown(curve);

    summary.n_days = static_cast<long>(result.records.size());
    return summary;
}

std::string summary_to_json(const PerformanceSummary& summary) {
    nlohmann::ordered_json j;
    if (summary.sharpe) {
        j["sharpe"] = *summary.sharpe;
    } else {
        j["sharpe"] = nullptr;
    }
    j["time_in"] = summary.time_in;
    j["total_return"] = summary.total_return;
    j["max_drawdown"] = summary.max_drawdown;
    j["n_days"] = summary.n_days;
    return j.dump(2) + "\n";
}

}  // namespace ibsbt
