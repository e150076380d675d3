#include "ibsbt/strategy.h"

#include <algorithm>
#include <charconv>
#include <istream>
#include <set>
#include <stdexcept>

namespace ibsbt {

namespace {

int parse_int_value(const std::string& key, const std::string& value) {
    int out;
    auto [ptr, ec] = std::from_chars(value.data(), value.data() + value.size(), out);
    if (ec != std::errc() || ptr != value.data() + value.size()) {
        throw std::invalid_argument("bad integer for " + key + ": " + value);
    }
    return out;
}

double parse_double_value(const std::string& key, const std::string& value) {
    double out;
    auto [ptr, ec] = std::from_chars(value.data(), value.data() + value.size(), out);
    if (ec != std::errc() || ptr != value.data() + value.size()) {
        throw std::invalid_argument("bad number for " + key + ": " + value);
    }
    return out;
}

bool parse_bool_value(const std::string& key, const std::string& value) {
    if (value == "true" || value == "1") return true;
    if (value == "false" || value == "0") return false;
    throw std::invalid_argument("bad boolean for " + key + ": " + value);
}

std::string trim(const std::string& s) {
    std::size_t b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return "";
    std::size_t e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

struct Entry {
    std::string ticker;
    double ibs;
};

// Ascending IBS, ties by ticker.  The descending pick reuses this ordering
// from the back but still breaks ties by ascending ticker.
bool less_asc(const Entry& a, const Entry& b) {
    if (a.ibs != b.ibs) return a.ibs < b.ibs;
    return a.ticker < b.ticker;
}

bool less_desc(const Entry& a, const Entry& b) {
    if (a.ibs != b.ibs) return a.ibs > b.ibs;
    return a.ticker < b.ticker;
}

std::vector<Entry> defined_cross_section(const IbsPanel& ibs, std::size_t date_idx) {
    std::vector<Entry> out;
    for (std::size_t i = 0; i < ibs.n_tickers(); ++i) {
        double v = ibs.values[i][date_idx];
        if (ibs_defined(v)) out.push_back({ibs.tickers[i], v});
    }
    return out;
}

}  // namespace

StrategyFamily parse_family(const std::string& s) {
    if (s == "threshold_single") return StrategyFamily::ThresholdSingle;
    if (s == "minmax_basket") return StrategyFamily::MinMaxBasket;
    if (s == "topn_basket") return StrategyFamily::TopNBasket;
    if (s == "threshold_basket") return StrategyFamily::ThresholdBasket;
    throw std::invalid_argument("unknown strategy family: " + s);
}

std::string to_string(StrategyFamily family) {
    switch (family) {
        case StrategyFamily::ThresholdSingle: return "threshold_single";
        case StrategyFamily::MinMaxBasket: return "minmax_basket";
        case StrategyFamily::TopNBasket: return "topn_basket";
        case StrategyFamily::ThresholdBasket: return "threshold_basket";
    }
    throw std::invalid_argument("unknown strategy family value");
}

ExecutionMode parse_execution(const std::string& s) {
    if (s == "close_to_close") return ExecutionMode::CloseToClose;
    if (s == "open_to_open") return ExecutionMode::OpenToOpen;
    throw std::invalid_argument("unknown execution mode: " + s);
}

std::string to_string(ExecutionMode mode) {
    return mode == ExecutionMode::CloseToClose ? "close_to_close" : "open_to_open";
}

void StrategyConfig::validate() const {
    if (long_threshold < 0 || short_threshold > 1 || long_threshold >= short_threshold) {
        throw std::invalid_argument("need 0 <= long_threshold < short_threshold <= 1");
    }
    if (n_held < 1) throw std::invalid_argument("n_held must be >= 1");
    if (family == StrategyFamily::MinMaxBasket && n_held != 1) {
        throw std::invalid_argument("minmax_basket holds one name per side; use topn_basket");
    }
    if (holding_days < 1) throw std::invalid_argument("holding_days must be >= 1");
    if (ibs_window < 1) throw std::invalid_argument("ibs_window must be >= 1");
    if (long_only && short_only) {
        throw std::invalid_argument("long_only and short_only are mutually exclusive");
    }
}

DailySignal rank_signal(const IbsPanel& ibs, std::size_t date_idx, const StrategyConfig& cfg) {
    DailySignal signal;
    signal.date = ibs.calendar[date_idx];
    std::size_t need = 2 * static_cast<std::size_t>(cfg.n_held);

    std::vector<Entry> candidates = defined_cross_section(ibs, date_idx);
    while (true) {
        if (candidates.size() < need) {
            signal.insufficient = true;
            return signal;
        }

        std::vector<Entry> asc = candidates;
        std::sort(asc.begin(), asc.end(), less_asc);
        std::vector<Entry> desc = candidates;
        std::sort(desc.begin(), desc.end(), less_desc);

        std::set<std::string> longs, shorts;
        for (int k = 0; k < cfg.n_held; ++k) {
            longs.insert(asc[k].ticker);
            shorts.insert(desc[k].ticker);
        }

        std::set<std::string> overlap;
        for (const auto& t : longs) {
            if (shorts.count(t)) overlap.insert(t);
        }
        if (overlap.empty()) {
            signal.longs.assign(longs.begin(), longs.end());
            signal.shorts.assign(shorts.begin(), shorts.end());
            return signal;
        }
        std::erase_if(candidates, [&](const Entry& e) { return overlap.count(e.ticker) > 0; });
    }
}

DailySignal threshold_basket_signal(const IbsPanel& ibs, std::size_t date_idx,
                                    const StrategyConfig& cfg) {
    DailySignal signal;
    signal.date = ibs.calendar[date_idx];
    std::vector<Entry> longs, shorts;
    for (const Entry& e : defined_cross_section(ibs, date_idx)) {
        if (e.ibs < cfg.long_threshold) longs.push_back(e);
        if (e.ibs > cfg.short_threshold) shorts.push_back(e);
    }
    if (longs.empty() || shorts.empty()) {
        return signal;
    }

    // Most extreme first, capped at n_held per side.
    std::sort(longs.begin(), longs.end(), less_asc);
    std::sort(shorts.begin(), shorts.end(), less_desc);
    std::size_t cap = static_cast<std::size_t>(cfg.n_held);
    longs.resize(std::min(longs.size(), cap));
    shorts.resize(std::min(shorts.size(), cap));
    for (const Entry& e : longs) signal.longs.push_back(e.ticker);
    for (const Entry& e : shorts) signal.shorts.push_back(e.ticker);
    std::sort(signal.longs.begin(), signal.longs.end());
    std::sort(signal.shorts.begin(), signal.shorts.end());
    return signal;
}

std::vector<DailySignal> make_signals(const IbsPanel& ibs, const StrategyConfig& cfg) {
    cfg.validate();
    if (cfg.family == StrategyFamily::ThresholdSingle && ibs.n_tickers() != 1) {
        throw std::invalid_argument("threshold_single needs exactly one ticker");
    }

    std::vector<DailySignal> signals;
    signals.reserve(ibs.n_dates());
    for (std::size_t t = 0; t < ibs.n_dates(); ++t) {
        DailySignal signal;
        switch (cfg.family) {
            case StrategyFamily::ThresholdSingle: {
                signal.date = ibs.calendar[t];
                double v = ibs.values[0][t];
                if (ibs_defined(v)) {
                    if (v < cfg.long_threshold) signal.longs.push_back(ibs.tickers[0]);
                    if (v > cfg.short_threshold) signal.shorts.push_back(ibs.tickers[0]);
                }
                break;
            }
            case StrategyFamily::MinMaxBasket:
            case StrategyFamily::TopNBasket:
                signal = rank_signal(ibs, t, cfg);
                break;
            case StrategyFamily::ThresholdBasket:
                signal = threshold_basket_signal(ibs, t, cfg);
                break;
        }
        if (cfg.long_only) signal.shorts.clear();
        if (cfg.short_only) signal.longs.clear();
        signals.push_back(std::move(signal));
    }
    return signals;
}

std::map<std::string, std::string> parse_key_values(std::istream& in) {
    std::map<std::string, std::string> kv;
    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        std::size_t hash = line.find('#');
        if (hash != std::string::npos) line = line.substr(0, hash);
        line = trim(line);
        if (line.empty()) continue;
        std::size_t eq = line.find('=');
        if (eq == std::string::npos) {
            throw std::invalid_argument("config line " + std::to_string(line_no) +
                                        ": expected key = value");
        }
        std::string key = trim(line.substr(0, eq));
        std::string value = trim(line.substr(eq + 1));
        if (key.empty()) {
            throw std::invalid_argument("config line " + std::to_string(line_no) + ": empty key");
        }
        if (!kv.emplace(key, value).second) {
            throw std::invalid_argument("duplicate config key: " + key);
        }
    }
    return kv;
}

void apply_key_values(StrategyConfig& cfg, std::map<std::string, std::string>& kv) {
    auto take = [&](const char* key) -> std::optional<std::string> {
        auto it = kv.find(key);
        if (it == kv.end()) return std::nullopt;
        std::string value = it->second;
        kv.erase(it);
        return value;
    };

    if (auto v = take("family")) cfg.family = parse_family(*v);
    if (auto v = take("long_threshold")) cfg.long_threshold = parse_double_value("long_threshold", *v);
    if (auto v = take("short_threshold")) cfg.short_threshold = parse_double_value("short_threshold", *v);
    if (auto v = take("n_held")) cfg.n_held = parse_int_value("n_held", *v);
    if (auto v = take("holding_days")) cfg.holding_days = parse_int_value("holding_days", *v);
    if (auto v = take("ibs_window")) cfg.ibs_window = parse_int_value("ibs_window", *v);
    if (auto v = take("execution")) cfg.execution = parse_execution(*v);
    if (auto v = take("long_only")) cfg.long_only = parse_bool_value("long_only", *v);
    if (auto v = take("short_only")) cfg.short_only = parse_bool_value("short_only", *v);
}

}  // namespace ibsbt
