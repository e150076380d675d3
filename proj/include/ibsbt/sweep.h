#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "ibsbt/backtest.h"
#include "ibsbt/metrics.h"

namespace ibsbt {

enum class MarketClass { Emerging, Developed };

MarketClass parse_market_class(const std::string& s);
std::string to_string(MarketClass market_class);

struct UniverseEntry {
    std::string ticker;
    std::string country;
    MarketClass market_class = MarketClass::Developed;
};

// Tradable universe with class labels.  CSV format:
// "ticker,country,class" with '#' comment lines allowed.
struct Universe {
    std::vector<UniverseEntry> entries;  // sorted by ticker

    const UniverseEntry& find(const std::string& ticker) const;  // throws if absent
    std::vector<std::string> tickers() const;
};

Universe parse_universe_csv(std::istream& in);
Universe load_universe_file(const std::filesystem::path& path);

enum class ClassConstraint { Any, EmergingOnly, DevelopedOnly };

ClassConstraint parse_class_constraint(const std::string& s);
std::string to_string(ClassConstraint constraint);

// Random baskets crossed with a small config grid.  Rows use the rank-based
// long-short family (minmax_basket when n_held is 1, topn_basket otherwise).
struct SweepSpec {
    int n_baskets = 1;
    int basket_size_min = 2;
    int basket_size_max = 2;
    std::uint64_t seed = 0;
    ClassConstraint class_constraint = ClassConstraint::Any;
    double slippage_per_side = 0.0;

    // Grid axes, crossed in this order: n_held, holding_days, ibs_window,
    // execution, borrow_rate.
    std::vector<int> n_held = {1};
    std::vector<int> holding_days = {1};
    std::vector<int> ibs_window = {1};
    std::vector<ExecutionMode> execution = {ExecutionMode::CloseToClose};
    std::vector<double> borrow_rate = {0.0001};

    void validate(const Universe& universe) const;  // throws std::invalid_argument
};

// Spec files reuse the flat key=value format; list-valued keys take
// comma-separated entries (e.g. "holding_days = 1,2,4").
SweepSpec parse_sweep_spec(std::istream& in);

// Basket draw i is a pure function of (seed, i): draw the size uniformly in
// [basket_size_min, basket_size_max], then a uniform subset of the eligible
// tickers of that size.  Identical regardless of worker count or how many
// draws ran before.  Baskets are returned sorted; duplicates may occur and
// are dropped (first kept) by run_sweep.
std::vector<std::vector<std::string>> draw_baskets(const Universe& universe,
                                                   const SweepSpec& spec);

struct SweepRow {
    std::vector<std::string> basket;  // sorted tickers
    int n_held = 1;
    int holding_days = 1;
    int ibs_window = 1;
    ExecutionMode execution = ExecutionMode::CloseToClose;
    double borrow_rate = 0.0;
    std::optional<double> sharpe;
    std::optional<double> long_only_sharpe;
    std::optional<double> short_only_sharpe;
    std::optional<double> time_in;
    std::string market_class;  // "emerging" | "developed" | "mixed"
    std::string error;         // nonempty = run failed, metric cells left empty

    std::string basket_label() const;  // tickers joined with '|'
};

// Runs every basket x grid combination.  Each basket is re-aligned on the
// intersection calendar of its own members only, so one ticker's data gaps
// never shrink another basket's history.  A failing combination becomes a
// flagged row instead of aborting the sweep.  Rows come back sorted by
// sharpe descending (unavailable last), then basket label and config fields;
// output is identical for any `jobs` count.
std::vector<SweepRow> run_sweep(const std::vector<BarSeries>& series, const Universe& universe,
                                const SweepSpec& spec, int jobs = 1);

// "basket,n_held,holding_days,ibs_window,execution,borrow_rate,sharpe,
//  long_only_sharpe,short_only_sharpe,time_in,market_class"
// top_k = 0 keeps every row.
std::string sweep_report_csv(const std::vector<SweepRow>& rows, std::size_t top_k = 0);

}  // namespace ibsbt
