// Deterministic synthetic fixture generator.
//
// Emits daily OHLC CSVs for a 16-name ETF cross-section on a weekday calendar
// (2009-01-02 .. 2019-12-31).  The generating process is built so that the
// close's position inside the daily range predicts a next-day reversal:
//
//   u_t        position of the close within the day's range, in [0,1];
//              drawn from a common day state v_t plus an idiosyncratic part,
//              then mapped through its CDF so the marginal is uniform
//   rev_{t+1}  = -kappa_i (u_t - 1/2) - kappa_c (v_t - 1/2)
//
// kappa_i is the per-name reversal strength (the main dial the fixtures are
// calibrated with), kappa_c a small common component.  The reversal is paid
// mostly overnight (88% in the open gap, 12% intraday), on top of a common
// market factor, idiosyncratic noise, a mild drift and occasional downside
// jumps.  Bars are constructed around (open, close) so that one-day IBS
// reproduces u_t exactly.  Everything is driven by one SplitMix64 stream with
// a fixed seed, so the output is reproducible byte for byte with the same
// toolchain; the committed files are canonical.
//
// Usage: gen_fixtures [outdir]       (default: data/fixtures)

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include "ibsbt/bar.h"
#include "ibsbt/rng.h"

namespace {

using ibsbt::BarSeries;
using ibsbt::OhlcBar;

// --- civil-date helpers (proleptic Gregorian, days since 1970-01-01) -------

long days_from_civil(int y, int m, int d) {
    y -= m <= 2;
    const long era = (y >= 0 ? y : y - 399) / 400;
    const unsigned yoe = static_cast<unsigned>(y - era * 400);
    const unsigned doy = (153u * (m + (m > 2 ? -3 : 9)) + 2) / 5 + d - 1;
    const unsigned doe = yoe * 365 + yoe / 4 - yoe / 100 + doy;
    return era * 146097 + static_cast<long>(doe) - 719468;
}

void civil_from_days(long z, int& y, int& m, int& d) {
    z += 719468;
    const long era = (z >= 0 ? z : z - 146096) / 146097;
    const unsigned doe = static_cast<unsigned>(z - era * 146097);
    const unsigned yoe = (doe - doe / 1460 + doe / 36524 - doe / 146096) / 365;
    const long yr = static_cast<long>(yoe) + era * 400;
    const unsigned doy = doe - (365 * yoe + yoe / 4 - yoe / 100);
    const unsigned mp = (5 * doy + 2) / 153;
    d = static_cast<int>(doy - (153 * mp + 2) / 5 + 1);
    m = static_cast<int>(mp + (mp < 10 ? 3 : -9));
    y = static_cast<int>(yr + (m <= 2));
}

std::string iso_date(long serial) {
    int y, m, d;
    civil_from_days(serial, y, m, d);
    char buf[32];
    std::snprintf(buf, sizeof buf, "%04d-%02d-%02d", y, m, d);
    return buf;
}

bool is_weekday(long serial) {
    return (serial % 7 + 7 + 3) % 7 <= 4;  // 1970-01-01 was a Thursday
}

// --- randomness --------------------------------------------------------------

struct Draws {
    ibsbt::SplitMix64 rng;

    explicit Draws(std::uint64_t seed) : rng(seed) {}

    double uniform() { return rng.next_double(); }
    // (0,1] so log() below is always finite
    double uniform_pos() { return ((rng.next() >> 11) + 1) * 0x1.0p-53; }
    double normal() {
        const double r = std::sqrt(-2.0 * std::log(uniform_pos()));
        return r * std::cos(6.283185307179586 * uniform());
    }
    double exponential(double mean) { return -mean * std::log(uniform_pos()); }
};

// CDF of 0.25*U + 0.75*U' (trapezoidal); mapping the raw mix through it makes
// the range position marginally uniform while keeping the common-state
// correlation.
double trapezoid_cdf(double x) {
    constexpr double a = 0.25, b = 0.75;
    if (x <= 0.0) return 0.0;
    if (x < a) return x * x / (2.0 * a * b);
    if (x < b) return (x - a / 2.0) / b;
    if (x < 1.0) return 1.0 - (1.0 - x) * (1.0 - x) / (2.0 * a * b);
    return 1.0;
}

// --- generating process ------------------------------------------------------

struct NameParams {
    const char* ticker;
    double kappa;  // next-day reversal per unit of (u - 1/2)
    double beta;   // loading on the common market factor
    double p0;     // starting price
};

// Reversal strengths are the calibration surface: they set which names the
// cross-sectional strategies favor and how strong basket edges are.
constexpr NameParams kNames[] = {
    {"EWA", 0.0030, 1.08, 18.0}, {"EWC", 0.0040, 1.02, 21.0},
    {"EIS", 0.0042, 0.95, 38.0}, {"EWI", 0.0030, 0.97, 11.0},
    {"EWJ", 0.0039, 0.88, 9.0},  {"EWS", 0.0039, 1.01, 8.0},
    {"EWT", 0.0041, 1.12, 9.0},  {"EWU", 0.0038, 0.99, 13.0},
    {"EWW", 0.0012, 1.15, 32.0}, {"EWY", 0.0020, 1.10, 28.0},
    {"EWZ", 0.0050, 1.14, 35.0}, {"EZA", 0.0035, 1.07, 40.0},
    {"EZU", 0.0032, 1.03, 25.0}, {"FXI", 0.0040, 1.09, 27.0},
    {"IVV", 0.0033, 0.85, 80.0}, {"PIN", 0.0042, 1.06, 14.0},
};
constexpr int kNameCount = static_cast<int>(std::size(kNames));

constexpr double kKappaCommon = 0.0004;  // common reversal component
constexpr double kDrift = 0.00115;       // gross daily drift, all names
constexpr double kIntraShare = 0.12;     // reversal fraction paid intraday
constexpr double kSigmaMktGap = 0.0045;
constexpr double kSigmaMktIntra = 0.0060;
constexpr double kSigmaIdioGap = 0.0066;
constexpr double kSigmaIdioIntra = 0.0066;
constexpr double kJumpProb = 0.025;   // downside jumps decouple the hit rate
constexpr double kJumpMean = 0.016;   // from the conditional mean edge
constexpr double kRangeMax = 0.12;    // cap on range/close; keeps low > 0

// A few names lose a handful of sessions so calendar intersection is
// exercised by the fixtures themselves.
struct DroppedDates {
    const char* ticker;
    std::vector<int> indices;  // positions in the full weekday calendar
};
const DroppedDates kDrops[] = {
    {"EWW", {500, 501, 1702, 2303}},
    {"EIS", {777, 1555, 2444}},
    {"FXI", {99, 2600}},
};

struct NameState {
    double close = 0.0;
    double u = 0.5;
};

OhlcBar make_bar(const std::string& date, double open, double close, double u,
                 double range_shock, double volume_shock, double base_volume) {
    // Feasibility: the range cap implies bounds on where the close can sit.
    const double up_move = std::max(0.0, close - open);
    const double down_move = std::max(0.0, open - close);
    const double rmax = kRangeMax * close;
    const double lo_u = std::max(0.02, up_move / rmax);
    const double hi_u = std::min(0.98, 1.0 - down_move / rmax);
    u = std::clamp(u, lo_u, std::max(lo_u, hi_u));

    const double needed =
        std::max(u > 0.0 ? up_move / u : 0.0, u < 1.0 ? down_move / (1.0 - u) : 0.0);
    const double base_range = close * 0.011 * std::exp(0.35 * range_shock);
    const double range = std::max(base_range, needed * 1.02);

    OhlcBar bar;
    bar.date = date;
    bar.open = open;
    bar.close = close;
    bar.low = close - u * range;
    bar.high = bar.low + range;
    bar.adj_close = close;
    bar.volume = std::round(base_volume * std::exp(0.4 * volume_shock));
    return bar;
}

}  // namespace

int main(int argc, char** argv) {
    const std::filesystem::path outdir = argc > 1 ? argv[1] : "data/fixtures";
    std::error_code ec;
    std::filesystem::create_directories(outdir, ec);

    // Weekday calendar
    std::vector<std::string> calendar;
    const long first = days_from_civil(2009, 1, 1);
    const long last = days_from_civil(2019, 12, 31);
    for (long s = first; s <= last; ++s)
        if (is_weekday(s)) calendar.push_back(iso_date(s));
    const int n_days = static_cast<int>(calendar.size());

    Draws draws(20090102u);

    std::vector<BarSeries> series(kNameCount);
    std::vector<NameState> state(kNameCount);
    for (int i = 0; i < kNameCount; ++i) {
        series[i].ticker = kNames[i].ticker;
        series[i].bars.reserve(n_days);
        state[i].close = kNames[i].p0;
    }

    double v_prev = 0.5;
    for (int t = 0; t < n_days; ++t) {
        const double v = draws.uniform();
        const double mkt_gap = draws.normal() * kSigmaMktGap;
        const double mkt_intra = draws.normal() * kSigmaMktIntra;

        for (int i = 0; i < kNameCount; ++i) {
            const NameParams& p = kNames[i];
            NameState& st = state[i];

            const double eta = draws.uniform();
            const double idio_gap = draws.normal() * kSigmaIdioGap;
            const double idio_intra = draws.normal() * kSigmaIdioIntra;
            const double jump_u = draws.uniform();
            const double jump_size = draws.exponential(kJumpMean);  // drawn every day so the
            const double jump = jump_u < kJumpProb ? jump_size : 0.0;  // stream shape is fixed
            const double range_shock = draws.normal();
            const double volume_shock = draws.normal();
            const double u_raw = 0.25 * v + 0.75 * eta;
            const double u = std::clamp(trapezoid_cdf(u_raw), 0.02, 0.98);

            double open, close;
            if (t == 0) {
                open = close = st.close;
            } else {
                const double rev = -p.kappa * (st.u - 0.5) - kKappaCommon * (v_prev - 0.5);
                const double gap_ret = kDrift + (1.0 - kIntraShare) * rev +
                                       p.beta * mkt_gap + idio_gap - jump;
                const double intra_ret =
                    kIntraShare * rev + p.beta * mkt_intra + idio_intra;
                open = st.close * (1.0 + gap_ret);
                close = open * (1.0 + intra_ret);
            }

            OhlcBar bar = make_bar(calendar[t], open, close, u, range_shock, volume_shock,
                                   4.0e5 + 5.0e4 * i);
            st.close = close;
            st.u = (bar.close - bar.low) / (bar.high - bar.low);
            series[i].bars.push_back(std::move(bar));
        }
        v_prev = v;
    }

    // Drop the designated sessions, then write one CSV per name.
    for (const DroppedDates& drop : kDrops) {
        for (BarSeries& s : series) {
            if (s.ticker != drop.ticker) continue;
            std::vector<int> dead(drop.indices);
            std::sort(dead.rbegin(), dead.rend());
            for (int idx : dead)
                if (idx < static_cast<int>(s.bars.size()))
                    s.bars.erase(s.bars.begin() + idx);
        }
    }

    for (const BarSeries& s : series) {
        const std::filesystem::path path = outdir / (s.ticker + ".csv");
        std::ofstream out(path);
        if (!out) {
            std::cerr << "cannot open " << path << " for writing\n";
            return 1;
        }
        out << ibsbt::to_csv(s);
    }
    std::cout << "wrote " << kNameCount << " series x " << n_days << " days to " << outdir
              << "\n";
    return 0;
}
