#pragma once

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace ibsbt {

// One daily OHLC bar.  Dates are opaque ISO-8601 strings (YYYY-MM-DD); they
// are compared lexicographically and never converted to a numeric type.
struct OhlcBar {
    std::string date;
    double open = 0.0;
    double high = 0.0;
    double low = 0.0;
    double close = 0.0;
    std::optional<double> adj_close;
    std::optional<double> volume;
};

// Which close column drives return computation.  Raw uses the unadjusted
// close; Adjusted uses adj_close and errors out when it is missing.
enum class ReturnBasis { Raw, Adjusted };

ReturnBasis parse_return_basis(const std::string& s);
std::string to_string(ReturnBasis basis);

double close_for(const OhlcBar& bar, ReturnBasis basis);

// How malformed bars are handled on ingest.
//   Strict: any violation rejects the row (with a warning).
//   Clamp:  high := max(high, open, close), low := min(low, open, close);
//           non-positive or unparseable fields are still rejected.
enum class ValidationPolicy { Strict, Clamp };

ValidationPolicy parse_validation_policy(const std::string& s);
std::string to_string(ValidationPolicy policy);

struct BarValidation {
    bool accepted = false;
    bool repaired = false;      // clamp policy widened the range
    OhlcBar bar;                // the bar as accepted (possibly repaired)
    std::string violation;      // which invariant failed, when rejected/repaired
};

// Checks price positivity and the open/close-within-range invariants.
// Positivity failures reject under either policy; range failures reject under
// Strict and repair under Clamp.
BarValidation validate_bar(const OhlcBar& bar, ValidationPolicy policy);

struct BarSeries {
    std::string ticker;
    std::vector<OhlcBar> bars;  // strictly ascending by date

    std::size_t size() const { return bars.size(); }
};

struct LoadResult {
    BarSeries series;
    std::vector<std::string> warnings;  // one entry per rejected/repaired row
};

// Parses CSV with header "Date,Open,High,Low,Close,Adj Close,Volume".
// The Adj Close and Volume columns are optional; extra columns are an error.
// Rows with duplicate dates keep the first occurrence.  Out-of-order rows are
// sorted by date.  Throws std::runtime_error on a malformed header.
LoadResult parse_ohlc_csv(std::istream& in, const std::string& ticker,
                          ValidationPolicy policy = ValidationPolicy::Strict);

LoadResult load_ohlc_csv_file(const std::filesystem::path& path,
                              ValidationPolicy policy = ValidationPolicy::Strict);

// Loads <data_dir>/<ticker>.csv for each requested ticker.  A missing file
// throws std::runtime_error naming the file.
std::vector<LoadResult> load_series_dir(const std::filesystem::path& data_dir,
                                        const std::vector<std::string>& tickers,
                                        ValidationPolicy policy = ValidationPolicy::Strict);

// Serializes back to the ingest CSV format; numeric fields use
// shortest-round-trip formatting so parse(serialize(x)) == x bitwise.
std::string to_csv(const BarSeries& series);

// A set of series on a common trading calendar (strict date intersection).
struct AlignedPanel {
    std::vector<std::string> tickers;         // ascending
    std::vector<std::string> calendar;        // ascending dates
    std::vector<std::vector<OhlcBar>> bars;   // [ticker][date]

    std::size_t n_tickers() const { return tickers.size(); }
    std::size_t n_dates() const { return calendar.size(); }
    const OhlcBar& bar(std::size_t ticker_idx, std::size_t date_idx) const {
        return bars[ticker_idx][date_idx];
    }
    std::size_t ticker_index(const std::string& ticker) const;  // throws if absent
};

// Strict intersection join over >= 2 series.  Throws std::invalid_argument on
// fewer than two inputs, duplicate tickers, or an empty intersection.
AlignedPanel align_calendars(const std::vector<BarSeries>& series);

// Wraps a single series as a one-ticker panel (its own calendar).
AlignedPanel panel_from_series(const BarSeries& series);

}  // namespace ibsbt
