#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <sstream>

#include "ibsbt/backtest.h"
#include "ibsbt/indicators.h"
#include "ibsbt/metrics.h"
#include "ibsbt/sweep.h"

namespace py = pybind11;
using namespace ibsbt;

PYBIND11_MODULE(_core, m) {
    m.doc() = "Daily-bar mean-reversion backtester for ETF baskets";
    m.attr("__version__") = IBSBT_VERSION;
    m.attr("TRADING_DAYS_PER_YEAR") = kTradingDaysPerYear;

    py::enum_<ValidationPolicy>(m, "ValidationPolicy")
        .value("STRICT", ValidationPolicy::Strict)
        .value("CLAMP", ValidationPolicy::Clamp);

    py::enum_<ReturnBasis>(m, "ReturnBasis")
        .value("RAW", ReturnBasis::Raw)
        .value("ADJUSTED", ReturnBasis::Adjusted);

    py::enum_<StrategyFamily>(m, "StrategyFamily")
        .value("THRESHOLD_SINGLE", StrategyFamily::ThresholdSingle)
        .value("MINMAX_BASKET", StrategyFamily::MinMaxBasket)
        .value("TOPN_BASKET", StrategyFamily::TopNBasket)
        .value("THRESHOLD_BASKET", StrategyFamily::ThresholdBasket);

    py::enum_<ExecutionMode>(m, "ExecutionMode")
        .value("CLOSE_TO_CLOSE", ExecutionMode::CloseToClose)
        .value("OPEN_TO_OPEN", ExecutionMode::OpenToOpen);

    py::class_<OhlcBar>(m, "OhlcBar")
        .def(py::init<>())
        .def_readwrite("date", &OhlcBar::date)
        .def_readwrite("open", &OhlcBar::open)
        .def_readwrite("high", &OhlcBar::high)
        .def_readwrite("low", &OhlcBar::low)
        .def_readwrite("close", &OhlcBar::close)
        .def_readwrite("adj_close", &OhlcBar::adj_close)
        .def_readwrite("volume", &OhlcBar::volume);

    py::class_<BarSeries>(m, "BarSeries")
        .def(py::init<>())
        .def_readwrite("ticker", &BarSeries::ticker)
        .def_readwrite("bars", &BarSeries::bars)
        .def("__len__", &BarSeries::size);

    py::class_<AlignedPanel>(m, "AlignedPanel")
        .def_readonly("tickers", &AlignedPanel::tickers)
        .def_readonly("calendar", &AlignedPanel::calendar)
        .def("bar", &AlignedPanel::bar, py::return_value_policy::copy);

    m.def(
        "parse_csv",
        [](const std::string& text, const std::string& ticker, ValidationPolicy policy) {
            std::istringstream in(text);
            LoadResult result = parse_ohlc_csv(in, ticker, policy);
            return py::make_tuple(result.series, result.warnings);
        },
        py::arg("text"), py::arg("ticker"), py::arg("policy") = ValidationPolicy::Strict);
    m.def(
        "load_series",
        [](const std::string& path, ValidationPolicy policy) {
            LoadResult result = load_ohlc_csv_file(path, policy);
            return py::make_tuple(result.series, result.warnings);
        },
        py::arg("path"), py::arg("policy") = ValidationPolicy::Strict);
    m.def("to_csv", &to_csv, py::arg("series"));
    m.def("align_calendars", &align_calendars, py::arg("series"));
    m.def("panel_from_series", &panel_from_series, py::arg("series"));

    py::class_<IbsPanel>(m, "IbsPanel")
        .def_readonly("tickers", &IbsPanel::tickers)
        .def_readonly("calendar", &IbsPanel::calendar)
        .def_readonly("values", &IbsPanel::values)
        .def_readonly("window_n", &IbsPanel::window_n);

    m.def("ibs_values", &ibs_values, py::arg("series"), py::arg("window") = 1);
    m.def("compute_ibs", &compute_ibs, py::arg("panel"), py::arg("window") = 1);

    py::class_<ProbabilityRow>(m, "ProbabilityRow")
        .def_readonly("ticker", &ProbabilityRow::ticker)
        .def_readonly("p_long", &ProbabilityRow::p_long)
        .def_readonly("p_short", &ProbabilityRow::p_short)
        .def_readonly("n_long", &ProbabilityRow::n_long)
        .def_readonly("n_short", &ProbabilityRow::n_short);

    m.def("positive_return_probabilities", &positive_return_probabilities, py::arg("series"),
          py::arg("ibs"), py::arg("long_threshold") = 0.2, py::arg("short_threshold") = 0.8,
          py::arg("basis") = ReturnBasis::Raw);

    py::class_<StrategyConfig>(m, "StrategyConfig")
        .def(py::init<>())
        .def_readwrite("family", &StrategyConfig::family)
        .def_readwrite("long_threshold", &StrategyConfig::long_threshold)
        .def_readwrite("short_threshold", &StrategyConfig::short_threshold)
        .def_readwrite("n_held", &StrategyConfig::n_held)
        .def_readwrite("holding_days", &StrategyConfig::holding_days)
        .def_readwrite("ibs_window", &StrategyConfig::ibs_window)
        .def_readwrite("execution", &StrategyConfig::execution)
        .def_readwrite("long_only", &StrategyConfig::long_only)
        .def_readwrite("short_only", &StrategyConfig::short_only)
        .def("validate", &StrategyConfig::validate);

    py::class_<DailySignal>(m, "DailySignal")
        .def_readonly("date", &DailySignal::date)
        .def_readonly("longs", &DailySignal::longs)
        .def_readonly("shorts", &DailySignal::shorts)
        .def_readonly("insufficient", &DailySignal::insufficient)
        .def("empty", &DailySignal::empty);

    m.def("make_signals", &make_signals, py::arg("ibs"), py::arg("config"));

    py::class_<CostModel>(m, "CostModel")
        .def(py::init<>())
        .def(py::init([](double borrow_rate_daily, double slippage_per_side) {
                 CostModel costs;
                 costs.borrow_rate_daily = borrow_rate_daily;
                 costs.slippage_per_side = slippage_per_side;
                 return costs;
             }),
             py::arg("borrow_rate_daily"), py::arg("slippage_per_side"))
        .def_readwrite("borrow_rate_daily", &CostModel::borrow_rate_daily)
        .def_readwrite("slippage_per_side", &CostModel::slippage_per_side);

    py::class_<DailyPortfolioRecord>(m, "DailyPortfolioRecord")
        .def_readonly("date", &DailyPortfolioRecord::date)
        .def_readonly("long_leg", &DailyPortfolioRecord::long_leg)
        .def_readonly("short_leg", &DailyPortfolioRecord::short_leg)
        .def_readonly("borrow_cost", &DailyPortfolioRecord::borrow_cost)
        .def_readonly("slippage_cost", &DailyPortfolioRecord::slippage_cost)
        .def_readonly("net_return", &DailyPortfolioRecord::net_return)
        .def_readonly("in_market", &DailyPortfolioRecord::in_market)
        .def_readonly("signal", &DailyPortfolioRecord::signal);

    py::class_<TradeLogEntry>(m, "TradeLogEntry")
        .def_readonly("ticker", &TradeLogEntry::ticker)
        .def_readonly("side", &TradeLogEntry::side)
        .def_readonly("entry_date", &TradeLogEntry::entry_date)
        .def_readonly("exit_date", &TradeLogEntry::exit_date);

    py::class_<BacktestResult>(m, "BacktestResult")
        .def_readonly("config", &BacktestResult::config)
        .def_readonly("costs", &BacktestResult::costs)
        .def_readonly("records", &BacktestResult::records)
        .def_readonly("equity_curve", &BacktestResult::equity_curve)
        .def_readonly("trade_log", &BacktestResult::trade_log)
        .def_readonly("skipped_tranches", &BacktestResult::skipped_tranches)
        .def_readonly("no_trade_days", &BacktestResult::no_trade_days);

    m.def("run_backtest", &run_backtest, py::arg("panel"), py::arg("signals"), py::arg("config"),
          py::arg("costs"), py::arg("basis") = ReturnBasis::Raw);
    m.def("buy_and_hold", &buy_and_hold, py::arg("series"), py::arg("basis") = ReturnBasis::Raw);
    m.def(
        "decompose_legs",
        [](const BacktestResult& result) {
            LegReturns legs = decompose_legs(result);
            return py::make_tuple(legs.long_only, legs.short_only);
        },
        py::arg("result"));
    m.def("records_to_csv", &records_to_csv, py::arg("result"));
    m.def("equity_to_csv", &equity_to_csv, py::arg("result"));

    py::class_<PerformanceSummary>(m, "PerformanceSummary")
        .def_readonly("sharpe", &PerformanceSummary::sharpe)
        .def_readonly("time_in", &PerformanceSummary::time_in)
        .def_readonly("total_return", &PerformanceSummary::total_return)
        .def_readonly("max_drawdown", &PerformanceSummary::max_drawdown)
        .def_readonly("n_days", &PerformanceSummary::n_days);

    m.def("sharpe_ratio", &sharpe_ratio, py::arg("daily_returns"));
    m.def("max_drawdown", &max_drawdown, py::arg("equity_curve"));
    m.def("time_in_market", &time_in_market, py::arg("records"));
    m.def("summarize", &summarize, py::arg("result"));
    m.def("summary_to_json", &summary_to_json, py::arg("summary"));

    py::enum_<MarketClass>(m, "MarketClass")
        .value("EMERGING", MarketClass::Emerging)
        .value("DEVELOPED", MarketClass::Developed);

    py::enum_<ClassConstraint>(m, "ClassConstraint")
        .value("ANY", ClassConstraint::Any)
        .value("EMERGING_ONLY", ClassConstraint::EmergingOnly)
        .value("DEVELOPED_ONLY", ClassConstraint::DevelopedOnly);

    py::class_<UniverseEntry>(m, "UniverseEntry")
        .def_readonly("ticker", &UniverseEntry::ticker)
        .def_readonly("country", &UniverseEntry::country)
        .def_readonly("market_class", &UniverseEntry::market_class);

    py::class_<Universe>(m, "Universe")
        .def_readonly("entries", &Universe::entries)
        .def("tickers", &Universe::tickers)
        .def("find", &Universe::find, py::return_value_policy::copy);

    m.def("load_universe_file",
          [](const std::string& path) { return load_universe_file(path); }, py::arg("path"));

    py::class_<SweepSpec>(m, "SweepSpec")
        .def(py::init<>())
        .def_readwrite("n_baskets", &SweepSpec::n_baskets)
        .def_readwrite("basket_size_min", &SweepSpec::basket_size_min)
        .def_readwrite("basket_size_max", &SweepSpec::basket_size_max)
        .def_readwrite("seed", &SweepSpec::seed)
        .def_readwrite("class_constraint", &SweepSpec::class_constraint)
        .def_readwrite("slippage_per_side", &SweepSpec::slippage_per_side)
        .def_readwrite("n_held", &SweepSpec::n_held)
        .def_readwrite("holding_days", &SweepSpec::holding_days)
        .def_readwrite("ibs_window", &SweepSpec::ibs_window)
        .def_readwrite("execution", &SweepSpec::execution)
        .def_readwrite("borrow_rate", &SweepSpec::borrow_rate);

    py::class_<SweepRow>(m, "SweepRow")
        .def_readonly("basket", &SweepRow::basket)
        .def_readonly("n_held", &SweepRow::n_held)
        .def_readonly("holding_days", &SweepRow::holding_days)
        .def_readonly("ibs_window", &SweepRow::ibs_window)
        .def_readonly("execution", &SweepRow::execution)
        .def_readonly("borrow_rate", &SweepRow::borrow_rate)
        .def_readonly("sharpe", &SweepRow::sharpe)
        .def_readonly("long_only_sharpe", &SweepRow::long_only_sharpe)
        .def_readonly("short_only_sharpe", &SweepRow::short_only_sharpe)
        .def_readonly("time_in", &SweepRow::time_in)
        .def_readonly("market_class", &SweepRow::market_class)
        .def_readonly("error", &SweepRow::error)
        .def("basket_label", &SweepRow::basket_label);

    m.def("draw_baskets", &draw_baskets, py::arg("universe"), py::arg("spec"));
    m.def("run_sweep", &run_sweep, py::arg("series"), py::arg("universe"), py::arg("spec"),
          py::arg("jobs") = 1);
    m.def("sweep_report_csv", &sweep_report_csv, py::arg("rows"), py::arg("top_k") = 0);
}
