#include "ibsbt/bar.h"

#include <algorithm>
#include <cassert>
#include <cctype>
#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <sstream>
#include <stdexcept>
#include <unordered_set>

namespace ibsbt {

namespace {

std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> fields;
    std::string cur;
    for (char c : line) {
        if (c == ',') {
            fields.push_back(cur);
            cur.clear();
        } else if (c != '\r') {
            cur += c;
        }
    }
    fields.push_back(cur);
    return fields;
}

bool parse_double_field(const std::string& field, double& out) {
    const char* begin = field.data();
    const char* end = begin + field.size();
    auto [ptr, ec] = std::from_chars(begin, end, out);
    return ec == std::errc() && ptr == end && std::isfinite(out);
}

bool is_iso_date(const std::string& s) {
    if (s.size() != 10 || s[4] != '-' || s[7] != '-') return false;
    for (std::size_t i = 0; i < s.size(); ++i) {
        if (i == 4 || i == 7) continue;
        if (!std::isdigit(static_cast<unsigned char>(s[i]))) return false;
    }
    return true;
}

std::string format_double(double v) {
    char buf[64];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
    assert(ec == std::errc());
    return std::string(buf, ptr);
}

struct HeaderLayout {
    bool has_adj_close = false;
    bool has_volume = false;
    std::size_t n_columns = 5;
};

HeaderLayout parse_header(const std::string& line) {
    auto cols = split_csv_line(line);
    const std::vector<std::string> required = {"Date", "Open", "High", "Low", "Close"};
    if (cols.size() < required.size()) {
        throw std::runtime_error("malformed CSV header: " + line);
    }
    for (std::size_t i = 0; i < required.size(); ++i) {
        if (cols[i] != required[i]) {
            throw std::runtime_error("malformed CSV header: expected column '" +
                                     required[i] + "', got '" + cols[i] + "'");
        }
    }
    HeaderLayout layout;
    std::size_t i = required.size();
    if (i < cols.size() && cols[i] == "Adj Close") {
        layout.has_adj_close = true;
        ++i;
    }
    if (i < cols.size() && cols[i] == "Volume") {
        layout.has_volume = true;
        ++i;
    }
    if (i != cols.size()) {
        throw std::runtime_error("malformed CSV header: unexpected column '" + cols[i] + "'");
    }
    layout.n_columns = i;
    return layout;
}

bool field_absent(const std::string& field) {
    return field.empty() || field == "null";
}

}  // namespace

ReturnBasis parse_return_basis(const std::string& s) {
    if (s == "raw") return ReturnBasis::Raw;
    if (s == "adjusted") return ReturnBasis::Adjusted;
    throw std::invalid_argument("unknown return basis: " + s);
}

std::string to_string(ReturnBasis basis) {
    return basis == ReturnBasis::Raw ? "raw" : "adjusted";
}

double close_for(const OhlcBar& bar, ReturnBasis basis) {
    if (basis == ReturnBasis::Raw) return bar.close;
    if (!bar.adj_close) {
        throw std::runtime_error("bar " + bar.date + " has no adj_close");
    }
    return *bar.adj_close;
}

ValidationPolicy parse_validation_policy(const std::string& s) {
    if (s == "strict") return ValidationPolicy::Strict;
    if (s == "clamp") return ValidationPolicy::Clamp;
    throw std::invalid_argument("unknown validation policy: " + s);
}

std::string to_string(ValidationPolicy policy) {
    return policy == ValidationPolicy::Strict ? "strict" : "clamp";
}

BarValidation validate_bar(const OhlcBar& bar, ValidationPolicy policy) {
    BarValidation result;
    result.bar = bar;
    if (bar.open <= 0 || bar.high <= 0 || bar.low <= 0 || bar.close <= 0 ||
        (bar.adj_close && *bar.adj_close <= 0)) {
        result.violation = "non-positive price";
        return result;
    }
    if (bar.volume && *bar.volume < 0) {
        result.violation = "negative volume";
        return result;
    }

    bool low_bad = bar.low > std::min(bar.open, bar.close);
    bool high_bad = bar.high < std::max(bar.open, bar.close);
    if (!low_bad && !high_bad && bar.low <= bar.high) {
        result.accepted = true;
        return result;
    }

    if (high_bad) {
        result.violation = "high < max(open, close)";
    } else if (low_bad) {
        result.violation = "low > min(open, close)";
    } else {
        result.violation = "low > high";
    }
    if (policy == ValidationPolicy::Clamp) {
        result.bar.high = std::max({bar.high, bar.open, bar.close});
        result.bar.low = std::min({bar.low, bar.open, bar.close});
        result.accepted = true;
        result.repaired = true;
    }
    return result;
}

LoadResult parse_ohlc_csv(std::istream& in, const std::string& ticker,
                          ValidationPolicy policy) {
    std::string line;
    if (!std::getline(in, line)) {
        throw std::runtime_error("empty CSV input for " + ticker);
    }
    HeaderLayout layout = parse_header(line);

    LoadResult result;
    result.series.ticker = ticker;
    std::unordered_set<std::string> seen_dates;

    auto warn = [&](const std::string& date, const std::string& message) {
        result.warnings.push_back(ticker + " " + date + ": " + message);
    };

    while (std::getline(in, line)) {
        if (line.empty() || line == "\r") continue;
        auto fields = split_csv_line(line);
        if (fields.size() != layout.n_columns) {
            warn(fields.empty() ? "?" : fields[0], "wrong field count; row rejected");
            continue;
        }

        OhlcBar bar;
        bar.date = fields[0];
        if (!is_iso_date(bar.date)) {
            warn(bar.date, "bad date format; row rejected");
            continue;
        }

        double o, h, l, c;
        if (!parse_double_field(fields[1], o) || !parse_double_field(fields[2], h) ||
            !parse_double_field(fields[3], l) || !parse_double_field(fields[4], c)) {
            warn(bar.date, "unparseable price field; row rejected");
            continue;
        }
        bar.open = o;
        bar.high = h;
        bar.low = l;
        bar.close = c;

        std::size_t next = 5;
        if (layout.has_adj_close) {
            const std::string& f = fields[next++];
            if (!field_absent(f)) {
                double v;
                if (!parse_double_field(f, v)) {
                    warn(bar.date, "unparseable adj_close; row rejected");
                    continue;
                }
                bar.adj_close = v;
            }
        }
        if (layout.has_volume) {
            const std::string& f = fields[next++];
            if (!field_absent(f)) {
                double v;
                if (!parse_double_field(f, v) || v < 0) {
                    warn(bar.date, "bad volume; row rejected");
                    continue;
                }
                bar.volume = v;
            }
        }

        BarValidation checked = validate_bar(bar, policy);
        if (!checked.accepted) {
            warn(bar.date, checked.violation + "; row rejected");
            continue;
        }
        if (checked.repaired) {
            warn(bar.date, checked.violation + "; range clamped");
        }
        bar = std::move(checked.bar);

        if (!seen_dates.insert(bar.date).second) {
            warn(bar.date, "duplicate date; first row kept");
            continue;
        }
        result.series.bars.push_back(std::move(bar));
    }

    if (result.series.bars.empty()) {
        throw std::runtime_error("no valid rows in CSV for " + ticker);
    }
    std::stable_sort(result.series.bars.begin(), result.series.bars.end(),
                     [](const OhlcBar& a, const OhlcBar& b) { return a.date < b.date; });
    return result;
}

LoadResult load_ohlc_csv_file(const std::filesystem::path& path, ValidationPolicy policy) {
    std::ifstream in(path);
    if (!in) {
        throw std::runtime_error("missing data file: " + path.string());
    }
    return parse_ohlc_csv(in, path.stem().string(), policy);
}

std::vector<LoadResult> load_series_dir(const std::filesystem::path& data_dir,
                                        const std::vector<std::string>& tickers,
                                        ValidationPolicy policy) {
    std::vector<LoadResult> out;
    out.reserve(tickers.size());
    for (const auto& ticker : tickers) {
        out.push_back(load_ohlc_csv_file(data_dir / (ticker + ".csv"), policy));
    }
    return out;
}

std::string to_csv(const BarSeries& series) {
    bool any_adj = std::any_of(series.bars.begin(), series.bars.end(),
                               [](const OhlcBar& b) { return b.adj_close.has_value(); });
    bool any_vol = std::any_of(series.bars.begin(), series.bars.end(),
                               [](const OhlcBar& b) { return b.volume.has_value(); });
    std::string out = "Date,Open,High,Low,Close";
    if (any_adj) out += ",Adj Close";
    if (any_vol) out += ",Volume";
    out += "\n";
    for (const auto& bar : series.bars) {
        out += bar.date;
        out += ',';
        out += format_double(bar.open);
        out += ',';
        out += format_double(bar.high);
        out += ',';
        out += format_double(bar.low);
        out += ',';
        out += format_double(bar.close);
        if (any_adj) {
            out += ',';
            if (bar.adj_close) out += format_double(*bar.adj_close);
        }
        if (any_vol) {
            out += ',';
            if (bar.volume) out += format_double(*bar.volume);
        }
        out += '\n';
    }
    return out;
}

std::size_t AlignedPanel::ticker_index(const std::string& ticker) const {
    auto it = std::find(tickers.begin(), tickers.end(), ticker);
    if (it == tickers.end()) {
        throw std::invalid_argument("unknown ticker: " + ticker);
    }
    return static_cast<std::size_t>(it - tickers.begin());
}

AlignedPanel align_calendars(const std::vector<BarSeries>& series) {
    if (series.size() < 2) {
        throw std::invalid_argument("calendar alignment needs at least two series");
    }

    std::vector<const BarSeries*> ordered;
    ordered.reserve(series.size());
    for (const auto& s : series) ordered.push_back(&s);
    std::sort(ordered.begin(), ordered.end(),
              [](const BarSeries* a, const BarSeries* b) { return a->ticker < b->ticker; });
    for (std::size_t i = 1; i < ordered.size(); ++i) {
        if (ordered[i]->ticker == ordered[i - 1]->ticker) {
            throw std::invalid_argument("duplicate ticker in alignment: " + ordered[i]->ticker);
        }
    }

    std::vector<std::string> calendar;
    for (const auto& bar : ordered[0]->bars) calendar.push_back(bar.date);
    for (std::size_t i = 1; i < ordered.size(); ++i) {
        std::vector<std::string> dates;
        for (const auto& bar : ordered[i]->bars) dates.push_back(bar.date);
        std::vector<std::string> merged;
        std::set_intersection(calendar.begin(), calendar.end(), dates.begin(), dates.end(),
                              std::back_inserter(merged));
        calendar = std::move(merged);
    }
    if (calendar.empty()) {
        throw std::invalid_argument("calendar intersection is empty");
    }

    AlignedPanel panel;
    panel.calendar = std::move(calendar);
    for (const auto* s : ordered) {
        panel.tickers.push_back(s->ticker);
        std::vector<OhlcBar> aligned;
        aligned.reserve(panel.calendar.size());
        std::size_t j = 0;
        for (const auto& date : panel.calendar) {
            while (j < s->bars.size() && s->bars[j].date < date) ++j;
            assert(j < s->bars.size() && s->bars[j].date == date);
            aligned.push_back(s->bars[j]);
        }
        panel.bars.push_back(std::move(aligned));
    }
    return panel;
}

AlignedPanel panel_from_series(const BarSeries& series) {
    if (series.bars.empty()) {
        throw std::invalid_argument("cannot build a panel from an empty series");
    }
    AlignedPanel panel;
    panel.tickers.push_back(series.ticker);
    for (const auto& bar : series.bars) panel.calendar.push_back(bar.date);
    panel.bars.push_back(series.bars);
    return panel;
}

}  // namespace ibsbt
