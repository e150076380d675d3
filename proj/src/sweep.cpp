#include "ibsbt/sweep.h"

#include <algorithm>
#include <atomic>
#include <charconv>
#include <cstdio>
#include <fstream>
#include <istream>
#include <map>
#include <set>
#include <sstream>
#include <stdexcept>
#include <thread>
#include <unordered_map>

#include "ibsbt/rng.h"

namespace ibsbt {

namespace {

std::string trim(const std::string& s) {
    std::size_t b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return "";
    std::size_t e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

std::vector<std::string> split(const std::string& s, char sep) {
    std::vector<std::string> out;
    std::string cur;
    for (char c : s) {
        if (c == sep) {
            out.push_back(cur);
            cur.clear();
        } else {
            cur += c;
        }
    }
    out.push_back(cur);
    return out;
}

int parse_int(const std::string& key, const std::string& value) {
    int out;
    auto [ptr, ec] = std::from_chars(value.data(), value.data() + value.size(), out);
    if (ec != std::errc() || ptr != value.data() + value.size()) {
        throw std::invalid_argument("bad integer for " + key + ": " + value);
    }
    return out;
}

double parse_double(const std::string& key, const std::string& value) {
    double out;
    auto [ptr, ec] = std::from_chars(value.data(), value.data() + value.size(), out);
    if (ec != std::errc() || ptr != value.data() + value.size()) {
        throw std::invalid_argument("bad number for " + key + ": " + value);
    }
    return out;
}

std::uint64_t parse_u64(const std::string& key, const std::string& value) {
    std::uint64_t out;
    auto [ptr, ec] = std::from_chars(value.data(), value.data() + value.size(), out);
    if (ec != std::errc() || ptr != value.data() + value.size()) {
        throw std::invalid_argument("bad unsigned integer for " + key + ": " + value);
    }
    return out;
}

std::vector<std::string> eligible_tickers(const Universe& universe, ClassConstraint constraint) {
    std::vector<std::string> out;
    for (const auto& entry : universe.entries) {
        if (constraint == ClassConstraint::EmergingOnly &&
            entry.market_class != MarketClass::Emerging) {
            continue;
        }
        if (constraint == ClassConstraint::DevelopedOnly &&
            entry.market_class != MarketClass::Developed) {
            continue;
        }
        out.push_back(entry.ticker);
    }
    return out;
}

std::string format_metric(const std::optional<double>& v) {
    if (!v) return "";
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.6f", *v);
    return buf;
}

std::string format_rate(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.6f", v);
    return buf;
}

}  // namespace

MarketClass parse_market_class(const std::string& s) {
    if (s == "emerging") return MarketClass::Emerging;
    if (s == "developed") return MarketClass::Developed;
    throw std::invalid_argument("unknown market class: " + s);
}

std::string to_string(MarketClass market_class) {
    return market_class == MarketClass::Emerging ? "emerging" : "developed";
}

const UniverseEntry& Universe::find(const std::string& ticker) const {
    auto it = std::lower_bound(entries.begin(), entries.end(), ticker,
                               [](const UniverseEntry& e, const std::string& t) {
                                   return e.ticker < t;
                               });
    if (it == entries.end() || it->ticker != ticker) {
        throw std::invalid_argument("ticker not in universe: " + ticker);
    }
    return *it;
}

std::vector<std::string> Universe::tickers() const {
    std::vector<std::string> out;
    out.reserve(entries.size());
    for (const auto& entry : entries) out.push_back(entry.ticker);
    return out;
}

Universe parse_universe_csv(std::istream& in) {
    std::string line;
    std::string header;
    while (std::getline(in, line)) {
        line = trim(line);
        if (line.empty() || line[0] == '#') continue;
        header = line;
        break;
    }
    if (header != "ticker,country,class") {
        throw std::runtime_error("malformed universe header: " + header);
    }

    Universe universe;
    while (std::getline(in, line)) {
        line = trim(line);
        if (line.empty() || line[0] == '#') continue;
        auto fields = split(line, ',');
        if (fields.size() != 3) {
            throw std::runtime_error("malformed universe row: " + line);
        }
        UniverseEntry entry;
        entry.ticker = trim(fields[0]);
        entry.country = trim(fields[1]);
        entry.market_class = parse_market_class(trim(fields[2]));
        if (entry.ticker.empty()) {
            throw std::runtime_error("universe row with empty ticker: " + line);
        }
        universe.entries.push_back(std::move(entry));
    }
    std::sort(universe.entries.begin(), universe.entries.end(),
              [](const UniverseEntry& a, const UniverseEntry& b) { return a.ticker < b.ticker; });
    for (std::size_t i = 1; i < universe.entries.size(); ++i) {
        if (universe.entries[i].ticker == universe.entries[i - 1].ticker) {
            throw std::runtime_error("duplicate universe ticker: " + universe.entries[i].ticker);
        }
    }
    return universe;
}

Universe load_universe_file(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) {
        throw std::runtime_error("missing universe file: " + path.string());
    }
    return parse_universe_csv(in);
}

ClassConstraint parse_class_constraint(const std::string& s) {
    if (s == "any") return ClassConstraint::Any;
    if (s == "emerging_only") return ClassConstraint::EmergingOnly;
    if (s == "developed_only") return ClassConstraint::DevelopedOnly;
    throw std::invalid_argument("unknown class constraint: " + s);
}

std::string to_string(ClassConstraint constraint) {
    switch (constraint) {
        case ClassConstraint::Any: return "any";
        case ClassConstraint::EmergingOnly: return "emerging_only";
        case ClassConstraint::DevelopedOnly: return "developed_only";
    }
    throw std::invalid_argument("unknown class constraint value");
}

void SweepSpec::validate(const Universe& universe) const {
    if (n_baskets < 1) throw std::invalid_argument("n_baskets must be >= 1");
    if (basket_size_min < 2) throw std::invalid_argument("basket_size_min must be >= 2");
    if (basket_size_max < basket_size_min) {
        throw std::invalid_argument("basket_size_max must be >= basket_size_min");
    }
    std::size_t eligible = eligible_tickers(universe, class_constraint).size();
    if (static_cast<std::size_t>(basket_size_max) > eligible) {
        throw std::invalid_argument("basket_size_max exceeds the eligible universe (" +
                                    std::to_string(eligible) + " tickers)");
    }
    if (slippage_per_side < 0) throw std::invalid_argument("slippage must be >= 0");
    if (n_held.empty() || holding_days.empty() || ibs_window.empty() || execution.empty() ||
        borrow_rate.empty()) {
        throw std::invalid_argument("every grid axis needs at least one value");
    }
    for (int v : n_held) {
        if (v < 1) throw std::invalid_argument("n_held values must be >= 1");
    }
    for (int v : holding_days) {
        if (v < 1) throw std::invalid_argument("holding_days values must be >= 1");
    }
    for (int v : ibs_window) {
        if (v < 1) throw std::invalid_argument("ibs_window values must be >= 1");
    }
    for (double v : borrow_rate) {
        if (v < 0) throw std::invalid_argument("borrow_rate values must be >= 0");
    }
}

SweepSpec parse_sweep_spec(std::istream& in) {
    auto kv = parse_key_values(in);
    SweepSpec spec;

    auto take = [&](const char* key) -> std::optional<std::string> {
        auto it = kv.find(key);
        if (it == kv.end()) return std::nullopt;
        std::string value = it->second;
        kv.erase(it);
        return value;
    };
    auto int_list = [](const char* key, const std::string& value) {
        std::vector<int> out;
        for (const auto& item : split(value, ',')) out.push_back(parse_int(key, trim(item)));
        return out;
    };
    auto double_list = [](const char* key, const std::string& value) {
        std::vector<double> out;
        for (const auto& item : split(value, ',')) out.push_back(parse_double(key, trim(item)));
        return out;
    };

    if (auto v = take("n_baskets")) spec.n_baskets = parse_int("n_baskets", *v);
    if (auto v = take("basket_size_min")) spec.basket_size_min = parse_int("basket_size_min", *v);
    if (auto v = take("basket_size_max")) spec.basket_size_max = parse_int("basket_size_max", *v);
    if (auto v = take("seed")) spec.seed = parse_u64("seed", *v);
    if (auto v = take("class_constraint")) spec.class_constraint = parse_class_constraint(*v);
    if (auto v = take("slippage")) spec.slippage_per_side = parse_double("slippage", *v);
    if (auto v = take("n_held")) spec.n_held = int_list("n_held", *v);
    if (auto v = take("holding_days")) spec.holding_days = int_list("holding_days", *v);
    if (auto v = take("ibs_window")) spec.ibs_window = int_list("ibs_window", *v);
    if (auto v = take("borrow_rate")) spec.borrow_rate = double_list("borrow_rate", *v);
    if (auto v = take("execution")) {
        spec.execution.clear();
        for (const auto& item : split(*v, ',')) {
            spec.execution.push_back(parse_execution(trim(item)));
        }
    }
    if (!kv.empty()) {
        throw std::invalid_argument("unknown sweep spec key: " + kv.begin()->first);
    }
    return spec;
}

std::vector<std::vector<std::string>> draw_baskets(const Universe& universe,
                                                   const SweepSpec& spec) {
    spec.validate(universe);
    std::vector<std::string> eligible = eligible_tickers(universe, spec.class_constraint);

    std::vector<std::vector<std::string>> baskets;
    baskets.reserve(spec.n_baskets);
    for (int i = 0; i < spec.n_baskets; ++i) {
        SplitMix64 rng(mix_seed(spec.seed, static_cast<std::uint64_t>(i)));
        std::size_t size =
            static_cast<std::size_t>(rng.next_in(spec.basket_size_min, spec.basket_size_max));

        // Partial Fisher-Yates over index space: a uniform size-k subset.
        std::vector<std::size_t> idx(eligible.size());
        for (std::size_t k = 0; k < idx.size(); ++k) idx[k] = k;
        for (std::size_t k = 0; k < size; ++k) {
            std::size_t j = k + rng.next_below(idx.size() - k);
            std::swap(idx[k], idx[j]);
        }

        std::vector<std::string> basket;
        basket.reserve(size);
        for (std::size_t k = 0; k < size; ++k) basket.push_back(eligible[idx[k]]);
        std::sort(basket.begin(), basket.end());
        baskets.push_back(std::move(basket));
    }
    return baskets;
}

std::string SweepRow::basket_label() const {
    std::string out;
    for (std::size_t i = 0; i < basket.size(); ++i) {
        if (i) out += '|';
        out += basket[i];
    }
    return out;
}

std::vector<SweepRow> run_sweep(const std::vector<BarSeries>& series, const Universe& universe,
                                const SweepSpec& spec, int jobs) {
    spec.validate(universe);

    std::unordered_map<std::string, const BarSeries*> by_ticker;
    for (const auto& s : series) by_ticker[s.ticker] = &s;

    std::vector<std::vector<std::string>> baskets = draw_baskets(universe, spec);
    std::set<std::vector<std::string>> seen;
    std::vector<std::vector<std::string>> unique;
    for (auto& basket : baskets) {
        if (seen.insert(basket).second) unique.push_back(std::move(basket));
    }

    for (const auto& basket : unique) {
        for (const auto& ticker : basket) {
            if (!by_ticker.count(ticker)) {
                throw std::runtime_error("no data series for ticker: " + ticker);
            }
        }
    }

    auto classify = [&](const std::vector<std::string>& basket) {
        bool any_emerging = false, any_developed = false;
        for (const auto& ticker : basket) {
            if (universe.find(ticker).market_class == MarketClass::Emerging) {
                any_emerging = true;
            } else {
                any_developed = true;
            }
        }
        if (any_emerging && any_developed) return std::string("mixed");
        return std::string(any_emerging ? "emerging" : "developed");
    };

    auto run_basket = [&](const std::vector<std::string>& basket) {
        std::vector<SweepRow> rows;
        std::string basket_error;
        std::vector<BarSeries> members;
        std::map<int, IbsPanel> ibs_by_window;
        AlignedPanel panel;
        try {
            for (const auto& ticker : basket) members.push_back(*by_ticker.at(ticker));
            panel = align_calendars(members);
            for (int window : spec.ibs_window) {
                if (!ibs_by_window.count(window)) {
                    ibs_by_window.emplace(window, compute_ibs(panel, window));
                }
            }
        } catch (const std::exception& e) {
            basket_error = e.what();
        }

        std::string market_class = classify(basket);
        for (int held : spec.n_held) {
            for (int holding : spec.holding_days) {
                for (int window : spec.ibs_window) {
                    for (ExecutionMode mode : spec.execution) {
                        for (double rate : spec.borrow_rate) {
                            SweepRow row;
                            row.basket = basket;
                            row.n_held = held;
                            row.holding_days = holding;
                            row.ibs_window = window;
                            row.execution = mode;
                            row.borrow_rate = rate;
                            row.market_class = market_class;
                            if (!basket_error.empty()) {
                                row.error = basket_error;
                                rows.push_back(std::move(row));
                                continue;
                            }
                            try {
                                StrategyConfig cfg;
                                cfg.family = held == 1 ? StrategyFamily::MinMaxBasket
                                                       : StrategyFamily::TopNBasket;
                                cfg.n_held = held;
                                cfg.holding_days = holding;
                                cfg.ibs_window = window;
                                cfg.execution = mode;
                                CostModel costs{rate, spec.slippage_per_side};
                                auto signals = make_signals(ibs_by_window.at(window), cfg);
                                auto result = run_backtest(panel, signals, cfg, costs);
                                auto summary = summarize(result);
                                auto legs = decompose_legs(result);
                                row.sharpe = summary.sharpe;
                                row.long_only_sharpe = sharpe_ratio(legs.long_only);
                                row.short_only_sharpe = sharpe_ratio(legs.short_only);
                                row.time_in = summary.time_in;
                            } catch (const std::exception& e) {
                                row.error = e.what();
                            }
                            rows.push_back(std::move(row));
                        }
                    }
                }
            }
        }
        return rows;
    };

    std::vector<std::vector<SweepRow>> per_basket(unique.size());
    int n_workers = std::max(1, jobs);
    n_workers = std::min<int>(n_workers, static_cast<int>(unique.size()));
    if (n_workers <= 1) {
        for (std::size_t i = 0; i < unique.size(); ++i) per_basket[i] = run_basket(unique[i]);
    } else {
        std::atomic<std::size_t> next{0};
        std::vector<std::thread> workers;
        workers.reserve(n_workers);
        for (int k = 0; k < n_workers; ++k) {
            workers.emplace_back([&]() {
                while (true) {
                    std::size_t i = next.fetch_add(1);
                    if (i >= unique.size()) break;
                    per_basket[i] = run_basket(unique[i]);
                }
            });
        }
        for (auto& worker : workers) worker.join();
    }

    std::vector<SweepRow> rows;
    for (auto& chunk : per_basket) {
        for (auto& row : chunk) rows.push_back(std::move(row));
    }

    std::sort(rows.begin(), rows.end(), [](const SweepRow& a, const SweepRow& b) {
        bool a_has = a.sharpe.has_value();
        bool b_has = b.sharpe.has_value();
        if (a_has != b_has) return a_has;
        if (a_has && *a.sharpe != *b.sharpe) return *a.sharpe > *b.sharpe;
        std::string al = a.basket_label();
        std::string bl = b.basket_label();
        if (al != bl) return al < bl;
        if (a.n_held != b.n_held) return a.n_held < b.n_held;
        if (a.holding_days != b.holding_days) return a.holding_days < b.holding_days;
        if (a.ibs_window != b.ibs_window) return a.ibs_window < b.ibs_window;
        if (a.execution != b.execution) {
            return static_cast<int>(a.execution) < static_cast<int>(b.execution);
        }
        return a.borrow_rate < b.borrow_rate;
    });
    return rows;
}

std::string sweep_report_csv(const std::vector<SweepRow>& rows, std::size_t top_k) {
    std::string out =
        "basket,n_held,holding_days,ibs_window,execution,borrow_rate,sharpe,"
        "long_only_sharpe,short_only_sharpe,time_in,market_class\n";
    std::size_t limit = top_k == 0 ? rows.size() : std::min(top_k, rows.size());
    for (std::size_t i = 0; i < limit; ++i) {
        const SweepRow& row = rows[i];
        out += row.basket_label();
        out += ',';
        out += std::to_string(row.n_held);
        out += ',';
        out += std::to_string(row.holding_days);
        out += ',';
        out += std::to_string(row.ibs_window);
        out += ',';
        out += to_string(row.execution);
        out += ',';
        out += format_rate(row.borrow_rate);
        out += ',';
        out += format_metric(row.sharpe);
        out += ',';
        out += format_metric(row.long_only_sharpe);
        out += ',';
        out += format_metric(row.short_only_sharpe);
        out += ',';
        out += format_metric(row.time_in);
        out += ',';
        out += row.market_class;
        out += '\n';
    }
    return out;
}

}  // namespace ibsbt
