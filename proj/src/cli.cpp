#include "ibsbt/cli.h"

#include <charconv>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <thread>

#include "CLI11.hpp"
#include "json.hpp"

#include "ibsbt/backtest.h"
#include "ibsbt/manifest.h"
#include "ibsbt/metrics.h"
#include "ibsbt/sweep.h"

namespace fs = std::filesystem;

namespace ibsbt {

namespace {

std::string fmt_double(double v) {
    char buf[64];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
    (void)ec;
    return std::string(buf, ptr);
}

double parse_double_strict(const std::string& key, const std::string& value) {
    double out;
    auto [ptr, ec] = std::from_chars(value.data(), value.data() + value.size(), out);
    if (ec != std::errc() || ptr != value.data() + value.size()) {
        throw std::invalid_argument("bad number for " + key + ": " + value);
    }
    return out;
}

std::string fmt_fixed(const std::optional<double>& v) {
    if (!v) return "";
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.6f", *v);
    return buf;
}

std::vector<std::string> split_list(const std::string& s) {
    std::vector<std::string> out;
    std::string cur;
    for (char c : s) {
        if (c == ',') {
            if (!cur.empty()) out.push_back(cur);
            cur.clear();
        } else if (c != ' ') {
            cur += c;
        }
    }
    if (!cur.empty()) out.push_back(cur);
    return out;
}

std::string join(const std::vector<std::string>& items, char sep) {
    std::string out;
    for (std::size_t i = 0; i < items.size(); ++i) {
        if (i) out += sep;
        out += items[i];
    }
    return out;
}

fs::path resolve_out_dir(const std::string& flag_value) {
    if (!flag_value.empty()) return flag_value;
    if (const char* env = std::getenv("IBS_BT_OUT"); env && *env) return env;
    return ".";
}

void write_file(const fs::path& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) {
        throw std::runtime_error("cannot write output file: " + path.string());
    }
    out << content;
}

void print_warnings(const std::vector<LoadResult>& loads) {
    for (const auto& load : loads) {
        for (const auto& warning : load.warnings) {
            std::cerr << "warning: " << warning << "\n";
        }
    }
}

std::string command_line(int argc, const char* const* argv) {
    std::string out;
    for (int i = 0; i < argc; ++i) {
        if (i) out += ' ';
        out += argv[i];
    }
    return out;
}

RunManifest base_manifest(int argc, const char* const* argv, std::uint64_t seed) {
    RunManifest manifest;
    manifest.command = command_line(argc, argv);
    manifest.tool_version = IBSBT_VERSION;
    manifest.timestamp = utc_timestamp_now();
    manifest.rng_seed = seed;
    return manifest;
}

void add_input(RunManifest& manifest, const fs::path& path) {
    manifest.inputs.push_back({path.string(), digest_file(path)});
}

struct CommonOpts {
    std::string data_dir;
    std::string out_dir_flag;
    std::string return_basis = "raw";
    std::string validation = "strict";
    std::uint64_t seed = 0;
    int jobs = 0;  // 0 = one worker per core

    int resolved_jobs() const {
        if (jobs > 0) return jobs;
        unsigned cores = std::thread::hardware_concurrency();
        return cores > 0 ? static_cast<int>(cores) : 1;
    }
};

void add_common(CLI::App* cmd, CommonOpts& opts) {
    cmd->add_option("--data-dir", opts.data_dir, "Directory with <ticker>.csv files")
        ->required();
    cmd->add_option("--out-dir", opts.out_dir_flag,
                    "Output directory (falls back to $IBS_BT_OUT, then '.')");
    cmd->add_option("--return-basis", opts.return_basis, "raw | adjusted")
        ->check(CLI::IsMember({"raw", "adjusted"}));
    cmd->add_option("--validation", opts.validation, "strict | clamp")
        ->check(CLI::IsMember({"strict", "clamp"}));
    cmd->add_option("--seed", opts.seed, "RNG seed");
    cmd->add_option("--jobs", opts.jobs, "Worker threads (0 = all cores)");
}

struct BacktestArgs {
    CommonOpts common;
    std::string config_file;
    std::string tickers_arg;
    std::string family = "minmax_basket";
    double long_threshold = 0.2;
    double short_threshold = 0.8;
    int n_held = 1;
    int holding_days = 1;
    int ibs_window = 1;
    std::string execution = "close_to_close";
    bool long_only = false;
    bool short_only = false;
    double borrow_rate = 0.0001;
    double slippage = 0.0;
    bool buy_hold = false;

    CLI::Option* family_opt = nullptr;
    CLI::Option* long_thr_opt = nullptr;
    CLI::Option* short_thr_opt = nullptr;
    CLI::Option* n_held_opt = nullptr;
    CLI::Option* holding_opt = nullptr;
    CLI::Option* window_opt = nullptr;
    CLI::Option* exec_opt = nullptr;
    CLI::Option* borrow_opt = nullptr;
    CLI::Option* slip_opt = nullptr;
};

int run_backtest_cmd(const BacktestArgs& args, int argc, const char* const* argv) {
    StrategyConfig cfg;
    CostModel costs;
    std::vector<std::string> tickers;

    if (!args.config_file.empty()) {
        std::ifstream in(args.config_file);
        if (!in) {
            throw std::runtime_error("missing config file: " + args.config_file);
        }
        auto kv = parse_key_values(in);
        apply_key_values(cfg, kv);
        if (auto it = kv.find("borrow_rate"); it != kv.end()) {
            costs.borrow_rate_daily = parse_double_strict("borrow_rate", it->second);
            kv.erase(it);
        }
        if (auto it = kv.find("slippage"); it != kv.end()) {
            costs.slippage_per_side = parse_double_strict("slippage", it->second);
            kv.erase(it);
        }
        if (auto it = kv.find("tickers"); it != kv.end()) {
            tickers = split_list(it->second);
            kv.erase(it);
        }
        if (!kv.empty()) {
            throw std::invalid_argument("unknown config key: " + kv.begin()->first);
        }
    }

    // Flags beat the config file.
    if (args.family_opt->count()) cfg.family = parse_family(args.family);
    if (args.long_thr_opt->count()) cfg.long_threshold = args.long_threshold;
    if (args.short_thr_opt->count()) cfg.short_threshold = args.short_threshold;
    if (args.n_held_opt->count()) cfg.n_held = args.n_held;
    if (args.holding_opt->count()) cfg.holding_days = args.holding_days;
    if (args.window_opt->count()) cfg.ibs_window = args.ibs_window;
    if (args.exec_opt->count()) cfg.execution = parse_execution(args.execution);
    if (args.long_only) cfg.long_only = true;
    if (args.short_only) cfg.short_only = true;
    if (args.borrow_opt->count()) costs.borrow_rate_daily = args.borrow_rate;
    if (args.slip_opt->count()) costs.slippage_per_side = args.slippage;
    if (!args.tickers_arg.empty()) tickers = split_list(args.tickers_arg);

    if (tickers.empty()) {
        throw std::invalid_argument("no tickers given (use --tickers or a config file)");
    }

    ValidationPolicy policy = parse_validation_policy(args.common.validation);
    ReturnBasis basis = parse_return_basis(args.common.return_basis);

    auto loads = load_series_dir(args.common.data_dir, tickers, policy);
    print_warnings(loads);
    std::vector<BarSeries> series;
    series.reserve(loads.size());
    for (auto& load : loads) series.push_back(std::move(load.series));

    BacktestResult result;
    if (args.buy_hold) {
        if (series.size() != 1) {
            throw std::invalid_argument("--buy-and-hold takes exactly one ticker");
        }
        result = buy_and_hold(series[0], basis);
    } else {
        cfg.validate();
        costs.validate();
        AlignedPanel panel;
        if (cfg.family == StrategyFamily::ThresholdSingle) {
            if (series.size() != 1) {
                throw std::invalid_argument("threshold_single takes exactly one ticker");
            }
            panel = panel_from_series(series[0]);
        } else {
            if (series.size() < 2) {
                throw std::invalid_argument(to_string(cfg.family) +
                                            " needs at least two tickers");
            }
            panel = align_calendars(series);
        }
        IbsPanel ibs = compute_ibs(panel, cfg.ibs_window);
        auto signals = make_signals(ibs, cfg);
        result = run_backtest(panel, signals, cfg, costs, basis);
    }

    PerformanceSummary summary = summarize(result);
    LegReturns legs = decompose_legs(result);
    auto long_sharpe = sharpe_ratio(legs.long_only);
    auto short_sharpe = sharpe_ratio(legs.short_only);

    RunManifest manifest = base_manifest(argc, argv, args.common.seed);
    manifest.config["mode"] = args.buy_hold ? "buy_and_hold" : "strategy";
    manifest.config["tickers"] = join(tickers, ',');
    manifest.config["family"] = to_string(cfg.family);
    manifest.config["long_threshold"] = fmt_double(cfg.long_threshold);
    manifest.config["short_threshold"] = fmt_double(cfg.short_threshold);
    manifest.config["n_held"] = std::to_string(cfg.n_held);
    manifest.config["holding_days"] = std::to_string(cfg.holding_days);
    manifest.config["ibs_window"] = std::to_string(cfg.ibs_window);
    manifest.config["execution"] = to_string(cfg.execution);
    manifest.config["long_only"] = cfg.long_only ? "true" : "false";
    manifest.config["short_only"] = cfg.short_only ? "true" : "false";
    manifest.config["borrow_rate"] = fmt_double(costs.borrow_rate_daily);
    manifest.config["slippage"] = fmt_double(costs.slippage_per_side);
    manifest.config["return_basis"] = args.common.return_basis;
    manifest.config["validation"] = args.common.validation;
    if (!args.config_file.empty()) add_input(manifest, args.config_file);
    for (const auto& ticker : tickers) {
        add_input(manifest, fs::path(args.common.data_dir) / (ticker + ".csv"));
    }

    fs::path out_dir = resolve_out_dir(args.common.out_dir_flag);
    fs::create_directories(out_dir);

    nlohmann::ordered_json summary_json;
    summary_json["metrics"] = nlohmann::ordered_json::parse(summary_to_json(summary));
    summary_json["legs"] = {
        {"long_only_sharpe", long_sharpe ? nlohmann::ordered_json(*long_sharpe)
                                         : nlohmann::ordered_json(nullptr)},
        {"short_only_sharpe", short_sharpe ? nlohmann::ordered_json(*short_sharpe)
                                           : nlohmann::ordered_json(nullptr)},
    };
    summary_json["skipped_tranches"] = result.skipped_tranches;
    summary_json["no_trade_days"] = result.no_trade_days;
    summary_json["manifest"] = nlohmann::ordered_json::parse(manifest_to_json(manifest));

    write_file(out_dir / "records.csv", records_to_csv(result));
    write_file(out_dir / "equity.csv", equity_to_csv(result));
    std::string trades = "ticker,side,entry_date,exit_date\n";
    for (const auto& trade : result.trade_log) {
        trades += trade.ticker + "," + trade.side + "," + trade.entry_date + "," +
                  trade.exit_date + "\n";
    }
    write_file(out_dir / "trades.csv", trades);
    write_file(out_dir / "summary.json", summary_json.dump(2) + "\n");
    write_file(out_dir / "manifest.json", manifest_to_json(manifest));

    std::printf("sharpe           %s\n",
                summary.sharpe ? fmt_fixed(summary.sharpe).c_str() : "n/a");
    std::printf("time_in          %.6f\n", summary.time_in);
    std::printf("total_return     %.6f\n", summary.total_return);
    std::printf("max_drawdown     %.6f\n", summary.max_drawdown);
    std::printf("n_days           %ld\n", summary.n_days);
    std::printf("skipped_tranches %d\n", result.skipped_tranches);
    std::printf("no_trade_days    %d\n", result.no_trade_days);
    std::printf("outputs          %s\n", fs::absolute(out_dir).string().c_str());
    return 0;
}

int run_sweep_cmd(const CommonOpts& common, const std::string& universe_file,
                  const std::string& spec_file, std::size_t top_k, bool seed_set,
                  const std::string& class_override, int argc, const char* const* argv) {
    Universe universe = load_universe_file(universe_file);

    std::ifstream spec_in(spec_file);
    if (!spec_in) {
        throw std::runtime_error("missing sweep spec file: " + spec_file);
    }
    SweepSpec spec = parse_sweep_spec(spec_in);
    if (seed_set) spec.seed = common.seed;
    if (!class_override.empty()) spec.class_constraint = parse_class_constraint(class_override);

    ValidationPolicy policy = parse_validation_policy(common.validation);
    auto loads = load_series_dir(common.data_dir, universe.tickers(), policy);
    print_warnings(loads);
    std::vector<BarSeries> series;
    series.reserve(loads.size());
    for (auto& load : loads) series.push_back(std::move(load.series));

    int jobs = common.resolved_jobs();
    auto rows = run_sweep(series, universe, spec, jobs);

    std::size_t flagged = 0;
    for (const auto& row : rows) {
        if (!row.error.empty()) {
            if (++flagged <= 10) {
                std::cerr << "warning: flagged row " << row.basket_label() << ": " << row.error
                          << "\n";
            }
        }
    }
    if (flagged > 10) {
        std::cerr << "warning: " << (flagged - 10) << " more flagged rows\n";
    }

    RunManifest manifest = base_manifest(argc, argv, spec.seed);
    manifest.config["universe"] = universe_file;
    manifest.config["spec"] = spec_file;
    manifest.config["n_baskets"] = std::to_string(spec.n_baskets);
    manifest.config["basket_size_min"] = std::to_string(spec.basket_size_min);
    manifest.config["basket_size_max"] = std::to_string(spec.basket_size_max);
    manifest.config["class_constraint"] = to_string(spec.class_constraint);
    manifest.config["jobs"] = std::to_string(jobs);
    manifest.config["top"] = std::to_string(top_k);
    manifest.config["return_basis"] = common.return_basis;
    manifest.config["validation"] = common.validation;
    add_input(manifest, universe_file);
    add_input(manifest, spec_file);
    for (const auto& ticker : universe.tickers()) {
        add_input(manifest, fs::path(common.data_dir) / (ticker + ".csv"));
    }

    fs::path out_dir = resolve_out_dir(common.out_dir_flag);
    fs::create_directories(out_dir);
    write_file(out_dir / "sweep.csv", sweep_report_csv(rows, top_k));
    write_file(out_dir / "manifest.json", manifest_to_json(manifest));

    std::printf("rows             %zu\n", rows.size());
    std::printf("flagged          %zu\n", flagged);
    if (!rows.empty() && rows.front().sharpe) {
        std::printf("best_basket      %s\n", rows.front().basket_label().c_str());
        std::printf("best_sharpe      %.6f\n", *rows.front().sharpe);
    }
    std::printf("outputs          %s\n", fs::absolute(out_dir).string().c_str());
    return 0;
}

int run_probe_cmd(const CommonOpts& common, const std::string& tickers_arg,
                  const std::string& universe_file, double long_thr, double short_thr,
                  int window, int argc, const char* const* argv) {
    std::vector<std::string> tickers;
    if (!tickers_arg.empty()) {
        tickers = split_list(tickers_arg);
    } else if (!universe_file.empty()) {
        tickers = load_universe_file(universe_file).tickers();
    } else {
        throw std::invalid_argument("probe needs --tickers or --universe");
    }

    ValidationPolicy policy = parse_validation_policy(common.validation);
    ReturnBasis basis = parse_return_basis(common.return_basis);
    auto loads = load_series_dir(common.data_dir, tickers, policy);
    print_warnings(loads);

    std::vector<ProbabilityRow> rows;
    for (const auto& load : loads) {
        auto ibs = ibs_values(load.series, window);
        rows.push_back(
            positive_return_probabilities(load.series, ibs, long_thr, short_thr, basis));
    }
    std::sort(rows.begin(), rows.end(), [](const ProbabilityRow& a, const ProbabilityRow& b) {
        bool a_has = a.p_long.has_value();
        bool b_has = b.p_long.has_value();
        if (a_has != b_has) return a_has;
        if (a_has && *a.p_long != *b.p_long) return *a.p_long > *b.p_long;
        return a.ticker < b.ticker;
    });

    std::string csv = "ticker,p_long,p_short,n_long,n_short\n";
    for (const auto& row : rows) {
        csv += row.ticker + "," + fmt_fixed(row.p_long) + "," + fmt_fixed(row.p_short) + "," +
               std::to_string(row.n_long) + "," + std::to_string(row.n_short) + "\n";
    }

    RunManifest manifest = base_manifest(argc, argv, common.seed);
    manifest.config["tickers"] = join(tickers, ',');
    manifest.config["long_threshold"] = fmt_double(long_thr);
    manifest.config["short_threshold"] = fmt_double(short_thr);
    manifest.config["ibs_window"] = std::to_string(window);
    manifest.config["return_basis"] = common.return_basis;
    manifest.config["validation"] = common.validation;
    if (!universe_file.empty()) add_input(manifest, universe_file);
    for (const auto& ticker : tickers) {
        add_input(manifest, fs::path(common.data_dir) / (ticker + ".csv"));
    }

    fs::path out_dir = resolve_out_dir(common.out_dir_flag);
    fs::create_directories(out_dir);
    write_file(out_dir / "probabilities.csv", csv);
    write_file(out_dir / "manifest.json", manifest_to_json(manifest));

    std::fputs(csv.c_str(), stdout);
    return 0;
}

int run_ibs_cmd(const CommonOpts& common, const std::string& tickers_arg, int window, int argc,
                const char* const* argv) {
    std::vector<std::string> tickers = split_list(tickers_arg);
    if (tickers.empty()) {
        throw std::invalid_argument("ibs needs --tickers");
    }

    ValidationPolicy policy = parse_validation_policy(common.validation);
    auto loads = load_series_dir(common.data_dir, tickers, policy);
    print_warnings(loads);
    std::vector<BarSeries> series;
    for (auto& load : loads) series.push_back(std::move(load.series));

    AlignedPanel panel =
        series.size() == 1 ? panel_from_series(series[0]) : align_calendars(series);
    IbsPanel ibs = compute_ibs(panel, window);

    std::string csv = "date";
    for (const auto& ticker : ibs.tickers) csv += "," + ticker;
    csv += "\n";
    for (std::size_t t = 0; t < ibs.n_dates(); ++t) {
        csv += ibs.calendar[t];
        for (std::size_t i = 0; i < ibs.n_tickers(); ++i) {
            csv += ',';
            double v = ibs.values[i][t];
            if (ibs_defined(v)) csv += fmt_fixed(v);
        }
        csv += '\n';
    }

    RunManifest manifest = base_manifest(argc, argv, common.seed);
    manifest.config["tickers"] = join(tickers, ',');
    manifest.config["ibs_window"] = std::to_string(window);
    manifest.config["validation"] = common.validation;
    for (const auto& ticker : tickers) {
        add_input(manifest, fs::path(common.data_dir) / (ticker + ".csv"));
    }

    fs::path out_dir = resolve_out_dir(common.out_dir_flag);
    fs::create_directories(out_dir);
    write_file(out_dir / "ibs.csv", csv);
    write_file(out_dir / "manifest.json", manifest_to_json(manifest));

    std::printf("dates            %zu\n", ibs.n_dates());
    std::printf("tickers          %zu\n", ibs.n_tickers());
    std::printf("outputs          %s\n", fs::absolute(out_dir).string().c_str());
    return 0;
}

}  // namespace

int run_cli(int argc, const char* const* argv) {
    CLI::App app{"Daily-bar mean-reversion backtester for ETF baskets"};
    app.set_version_flag("--version", IBSBT_VERSION);
    app.require_subcommand(1);

    BacktestArgs bt;
    auto* bt_cmd = app.add_subcommand("backtest", "Run one strategy configuration");
    add_common(bt_cmd, bt.common);
    bt_cmd->add_option("--config", bt.config_file, "Flat key=value config file");
    bt_cmd->add_option("--tickers", bt.tickers_arg, "Comma-separated tickers");
    bt.family_opt = bt_cmd->add_option("--family", bt.family,
                                       "threshold_single | minmax_basket | topn_basket | "
                                       "threshold_basket");
    bt.long_thr_opt = bt_cmd->add_option("--long-threshold", bt.long_threshold, "Enter long below");
    bt.short_thr_opt =
        bt_cmd->add_option("--short-threshold", bt.short_threshold, "Enter short above");
    bt.n_held_opt = bt_cmd->add_option("--n-held", bt.n_held, "Names held per side");
    bt.holding_opt = bt_cmd->add_option("--holding-days", bt.holding_days, "Tranche length");
    bt.window_opt = bt_cmd->add_option("--ibs-window", bt.ibs_window, "Indicator lookback days");
    bt.exec_opt = bt_cmd->add_option("--execution", bt.execution,
                                     "close_to_close | open_to_open");
    bt_cmd->add_flag("--long-only", bt.long_only, "Drop the short side");
    bt_cmd->add_flag("--short-only", bt.short_only, "Drop the long side");
    bt.borrow_opt = bt_cmd->add_option("--borrow-rate", bt.borrow_rate, "Daily short borrow rate");
    bt.slip_opt = bt_cmd->add_option("--slippage", bt.slippage, "Per-side slippage fraction");
    bt_cmd->add_flag("--buy-and-hold", bt.buy_hold, "Frictionless long benchmark");

    CommonOpts sweep_common;
    std::string universe_file, spec_file, class_override;
    std::size_t top_k = 0;
    auto* sweep_cmd = app.add_subcommand("sweep", "Random baskets x config grid");
    add_common(sweep_cmd, sweep_common);
    sweep_cmd->add_option("--universe", universe_file, "Universe CSV")->required();
    sweep_cmd->add_option("--spec", spec_file, "Sweep spec file")->required();
    sweep_cmd->add_option("--top", top_k, "Keep only the best K rows in the report");
    sweep_cmd->add_option("--class", class_override, "any | emerging_only | developed_only")
        ->check(CLI::IsMember({"any", "emerging_only", "developed_only"}));
    auto* sweep_seed_opt = sweep_cmd->get_option("--seed");

    CommonOpts probe_common;
    std::string probe_tickers, probe_universe;
    double probe_long = 0.2, probe_short = 0.8;
    int probe_window = 1;
    auto* probe_cmd = app.add_subcommand("probe", "Next-day hit rates behind the signal");
    add_common(probe_cmd, probe_common);
    probe_cmd->add_option("--tickers", probe_tickers, "Comma-separated tickers");
    probe_cmd->add_option("--universe", probe_universe, "Probe every universe ticker");
    probe_cmd->add_option("--long-threshold", probe_long, "Enter long below");
    probe_cmd->add_option("--short-threshold", probe_short, "Enter short above");
    probe_cmd->add_option("--ibs-window", probe_window, "Indicator lookback days");

    CommonOpts ibs_common;
    std::string ibs_tickers;
    int ibs_window = 1;
    auto* ibs_cmd = app.add_subcommand("ibs", "Dump indicator values");
    add_common(ibs_cmd, ibs_common);
    ibs_cmd->add_option("--tickers", ibs_tickers, "Comma-separated tickers")->required();
    ibs_cmd->add_option("--window", ibs_window, "Indicator lookback days");

    try {
        app.parse(argc, argv);
        if (bt_cmd->parsed()) return run_backtest_cmd(bt, argc, argv);
        if (sweep_cmd->parsed()) {
            return run_sweep_cmd(sweep_common, universe_file, spec_file, top_k,
                                 sweep_seed_opt->count() > 0, class_override, argc, argv);
        }
        if (probe_cmd->parsed()) {
            return run_probe_cmd(probe_common, probe_tickers, probe_universe, probe_long,
                                 probe_short, probe_window, argc, argv);
        }
        if (ibs_cmd->parsed()) {
            return run_ibs_cmd(ibs_common, ibs_tickers, ibs_window, argc, argv);
        }
        return 0;
    } catch (const CLI::ParseError& e) {
        return app.exit(e);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}

}  // namespace ibsbt
