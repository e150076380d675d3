"""Smoke tests for the ibsbt extension module.

Exercises one representative call from each area; the C++ suite owns the
exhaustive coverage.
"""

import math
import os
import sys
import tempfile

import ibsbt


def approx(a, b, tol=1e-12):
    return abs(a - b) <= tol


def make_series(ticker, closes):
    rows = ["Date,Open,High,Low,Close"]
    prev = closes[0]
    day = 1
    for c in closes:
        o = prev
        hi = max(o, c) + 0.5
        lo = min(o, c) - 0.5
        rows.append(f"2015-01-{day:02d},{o},{hi},{lo},{c}")
        prev = c
        day += 1
    series, warnings = ibsbt.parse_csv("\n".join(rows) + "\n", ticker,
                                       ibsbt.ValidationPolicy.STRICT)
    assert warnings == []
    return series


def main():
    assert isinstance(ibsbt.__version__, str) and ibsbt.__version__
    assert ibsbt.TRADING_DAYS_PER_YEAR == 252.0

    # Indicator on a hand-checkable series.
    text = ("Date,Open,High,Low,Close\n"
            "2009-01-02,11,12,10,10\n"
            "2009-01-05,11,12,10,12\n"
            "2009-01-06,11,12,10,11\n")
    series, warnings = ibsbt.parse_csv(text, "TST", ibsbt.ValidationPolicy.STRICT)
    assert warnings == []
    assert len(series.bars) == 3
    vals = ibsbt.ibs_values(series)
    assert vals == [0.0, 1.0, 0.5]
    assert math.isnan(ibsbt.ibs_values(series, 2)[0])

    # Round-trip through the CSV writer.
    series2, _ = ibsbt.parse_csv(ibsbt.to_csv(series), "TST",
                                 ibsbt.ValidationPolicy.STRICT)
    assert [b.close for b in series2.bars] == [b.close for b in series.bars]

    # A small two-name hedged run.
    a = make_series("AAA", [100, 102, 101, 103, 102, 104, 103, 105])
    b = make_series("BBB", [50, 49, 50, 49.5, 50.5, 50, 51, 50.5])
    panel = ibsbt.align_calendars([a, b])
    assert panel.tickers == ["AAA", "BBB"]
    assert len(panel.calendar) == 8

    ibs = ibsbt.compute_ibs(panel, 1)
    assert ibs.window_n == 1

    cfg = ibsbt.StrategyConfig()
    cfg.family = ibsbt.StrategyFamily.MINMAX_BASKET
    cfg.validate()
    signals = ibsbt.make_signals(ibs, cfg)
    assert len(signals) == len(panel.calendar)

    costs = ibsbt.CostModel(0.0001, 0.0)
    result = ibsbt.run_backtest(panel, signals, cfg, costs, ibsbt.ReturnBasis.RAW)
    assert len(result.records) == len(panel.calendar) - 1
    assert result.equity_curve[-1] > 0.0

    summary = ibsbt.summarize(result)
    assert summary.n_days == len(result.records)
    blob = ibsbt.summary_to_json(summary)
    assert '"time_in"' in blob

    long_only, short_only = ibsbt.decompose_legs(result)
    assert len(long_only) == len(result.records)

    bench = ibsbt.buy_and_hold(a)
    assert approx(bench.equity_curve[-1], 105.0 / 100.0)

    assert ibsbt.records_to_csv(result).startswith("date,")
    assert ibsbt.equity_to_csv(result).startswith("date,equity")

    # Metrics primitives.
    assert ibsbt.sharpe_ratio([0.01, -0.01, 0.01, -0.01]) == 0.0
    assert ibsbt.sharpe_ratio([0.0, 0.0]) is None
    assert approx(ibsbt.max_drawdown([1.0, 1.2, 0.9]), 0.25)
    assert approx(ibsbt.time_in_market(result.records),
                  sum(1 for r in result.records if r.in_market) / len(result.records))

    # Per-name hit rates.
    probs = ibsbt.positive_return_probabilities(series, ibsbt.ibs_values(series))
    assert probs.ticker == "TST"

    # Basket drawing and a one-point sweep.
    with tempfile.TemporaryDirectory() as tmp:
        upath = os.path.join(tmp, "universe.csv")
        with open(upath, "w") as fh:
            fh.write("ticker,country,class\n"
                     "AAA,aland,emerging\n"
                     "BBB,bshore,emerging\n"
                     "CCC,crep,developed\n")
        universe = ibsbt.load_universe_file(upath)
    assert universe.tickers() == ["AAA", "BBB", "CCC"]
    assert universe.find("AAA").market_class == ibsbt.MarketClass.EMERGING

    spec = ibsbt.SweepSpec()
    spec.n_baskets = 3
    spec.basket_size_min = 2
    spec.basket_size_max = 2
    spec.seed = 5
    baskets = ibsbt.draw_baskets(universe, spec)
    assert len(baskets) == 3
    assert all(len(basket) == 2 for basket in baskets)
    assert baskets == ibsbt.draw_baskets(universe, spec)

    c = make_series("CCC", [20, 20.5, 20.2, 20.8, 20.4, 21, 20.6, 21.2])
    rows = ibsbt.run_sweep([a, b, c], universe, spec, jobs=2)
    assert rows and all(row.error == "" for row in rows)
    report = ibsbt.sweep_report_csv(rows, top_k=1)
    assert report.startswith("basket,")
    assert len(report.strip().splitlines()) == 2

    # Error translation.
    bad = ibsbt.StrategyConfig()
    bad.long_threshold = 0.9
    try:
        bad.validate()
    except ValueError:
        pass
    else:
        raise AssertionError("expected ValueError from validate()")

    try:
        ibsbt.ibs_values(series, 0)
    except ValueError:
        pass
    else:
        raise AssertionError("expected ValueError for window < 1")

    print("python smoke: ok")
    return 0


if __name__ == "__main__":
    sys.exit(main())
