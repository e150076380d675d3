#pragma once

#include <iosfwd>
#include <map>
#include <string>
#include <vector>

#include "ibsbt/indicators.h"

namespace ibsbt {

enum class StrategyFamily { ThresholdSingle, MinMaxBasket, TopNBasket, ThresholdBasket };

StrategyFamily parse_family(const std::string& s);
std::string to_string(StrategyFamily family);

enum class ExecutionMode { CloseToClose, OpenToOpen };

ExecutionMode parse_execution(const std::string& s);
std::string to_string(ExecutionMode mode);

struct StrategyConfig {
    StrategyFamily family = StrategyFamily::MinMaxBasket;
    double long_threshold = 0.2;
    double short_threshold = 0.8;
    int n_held = 1;       // names per side for rank-based families
    int holding_days = 1; // H overlapping tranches, each weighted 1/H
    int ibs_window = 1;
    ExecutionMode execution = ExecutionMode::CloseToClose;
    bool long_only = false;
    bool short_only = false;

    void validate() const;  // throws std::invalid_argument
};

// Positions requested at one close.  `insufficient` marks a day where a
// rank-based family had fewer than 2 * n_held usable names and was forced
// flat; such days are counted separately from ordinary flat days.
struct DailySignal {
    std::string date;
    std::vector<std::string> longs;   // sorted ascending
    std::vector<std::string> shorts;  // sorted ascending
    bool insufficient = false;

    bool empty() const { return longs.empty() && shorts.empty(); }
};

// Rank-based selection for one date: long the n_held lowest IBS names, short
// the n_held highest.  Ties break by ticker; a name selected for both sides
// is excluded outright and the selection recomputed until stable.
DailySignal rank_signal(const IbsPanel& ibs, std::size_t date_idx, const StrategyConfig& cfg);

// Dual-threshold selection for one date: long every name with IBS below
// long_threshold, short every name above short_threshold.  If either side is
// empty the whole day stays flat.
DailySignal threshold_basket_signal(const IbsPanel& ibs, std::size_t date_idx,
                                    const StrategyConfig& cfg);

// Full-series driver: dispatches on family, then applies the long_only /
// short_only filters.  threshold_single requires a one-ticker panel.
std::vector<DailySignal> make_signals(const IbsPanel& ibs, const StrategyConfig& cfg);

// Flat "key = value" config files: '#' comments, blank lines ignored,
// duplicate keys rejected.
std::map<std::string, std::string> parse_key_values(std::istream& in);

// Applies (and erases) the strategy keys from `kv`; leftover keys are the
// caller's problem.  Throws std::invalid_argument on a bad value.
void apply_key_values(StrategyConfig& cfg, std::map<std::string, std::string>& kv);

}  // namespace ibsbt
