#pragma once

/**
 * @file ingest.hpp
 * @brief Daily price/index series: CSV loading, date alignment, log returns.
 *
 * Trading days are consecutive observations; calendar gaps (weekends,
 * holidays) are not interpolated. Dates present in only one of two series are
 * dropped by align() rather than forward-filled.
 */

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <istream>
#include <locale>
#include <optional>
#include <ostream>
#include <span>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "asymvol/detail/text.hpp"
#include "asymvol/error.hpp"

namespace asymvol {

using Date = std::chrono::year_month_day;

inline std::string format_date(Date d) {
    char buf[16];
    std::snprintf(buf, sizeof buf, "%04d-%02u-%02u", static_cast<int>(d.year()),
                  static_cast<unsigned>(d.month()), static_cast<unsigned>(d.day()));
    return buf;
}

/// Parses a calendar date. "%Y-%m-%d" takes a strict fast path; any other
/// strftime-style format goes through std::get_time under the classic locale.
inline std::optional<Date> parse_date(std::string_view text, std::string_view format = "%Y-%m-%d") {
    text = detail::trim(text);
    int y = 0;
    unsigned m = 0;
    unsigned d = 0;
    if (format == "%Y-%m-%d") {
        if (text.size() != 10 || text[4] != '-' || text[7] != '-') return std::nullopt;
        auto digits = [&](std::size_t pos, std::size_t len, auto& out) {
            out = 0;
            for (std::size_t i = pos; i < pos + len; ++i) {
                if (text[i] < '0' || text[i] > '9') return false;
                out = out * 10 + static_cast<std::remove_reference_t<decltype(out)>>(text[i] - '0');
            }
            return true;
        };
        if (!digits(0, 4, y) || !digits(5, 2, m) || !digits(8, 2, d)) return std::nullopt;
    } else {
        std::tm tm{};
        std::istringstream in{std::string(text)};
        in.imbue(std::locale::classic());
        in >> std::get_time(&tm, std::string(format).c_str());
        if (in.fail()) return std::nullopt;
        in >> std::ws;
        if (!in.eof()) return std::nullopt;
        y = tm.tm_year + 1900;
        m = static_cast<unsigned>(tm.tm_mon + 1);
        d = static_cast<unsigned>(tm.tm_mday);
    }
    const Date date{std::chrono::year{y}, std::chrono::month{m}, std::chrono::day{d}};
    if (!date.ok()) return std::nullopt;
    return date;
}

struct PricePoint {
    Date date;
    double close = 0.0;
    friend bool operator==(const PricePoint&, const PricePoint&) = default;
};

/// Date-ordered closes of an asset or volatility index. Dates strictly
/// increase and every close is positive.
struct PriceSeries {
    std::string name;
    std::vector<PricePoint> points;

    [[nodiscard]] std::size_t size() const noexcept { return points.size(); }
    [[nodiscard]] bool empty() const noexcept { return points.empty(); }

    [[nodiscard]] std::vector<double> closes() const {
        std::vector<double> out;
        out.reserve(points.size());
        for (const auto& p : points) out.push_back(p.close);
        return out;
    }

    [[nodiscard]] std::vector<Date> dates() const {
        std::vector<Date> out;
        out.reserve(points.size());
        for (const auto& p : points) out.push_back(p.date);
        return out;
    }

    /// Close on `date`, if present. Binary search; requires the invariants.
    [[nodiscard]] std::optional<double> at(Date date) const {
        const auto it = std::lower_bound(points.begin(), points.end(), date,
                                         [](const PricePoint& p, Date d) { return p.date < d; });
        if (it == points.end() || it->date != date) return std::nullopt;
        return it->close;
    }

    friend bool operator==(const PriceSeries&, const PriceSeries&) = default;
};

struct ReturnPoint {
    Date date;
    double value = 0.0;
    friend bool operator==(const ReturnPoint&, const ReturnPoint&) = default;
};

/// Daily log returns, each dated by the later of its two closes.
struct ReturnSeries {
    std::string name;
    std::vector<ReturnPoint> points;

    [[nodiscard]] std::size_t size() const noexcept { return points.size(); }
    [[nodiscard]] bool empty() const noexcept { return points.empty(); }

    [[nodiscard]] std::vector<double> values() const {
        std::vector<double> out;
        out.reserve(points.size());
        for (const auto& p : points) out.push_back(p.value);
        return out;
    }

    friend bool operator==(const ReturnSeries&, const ReturnSeries&) = default;
};

/// Throws if `s` breaks the PriceSeries invariants.
inline void validate(const PriceSeries& s) {
    for (std::size_t i = 0; i < s.points.size(); ++i) {
        const auto& p = s.points[i];
        if (!(p.close > 0.0) || !std::isfinite(p.close)) {
            fail(ErrorKind::non_positive_close,
                 s.name + ": close " + detail::shortest(p.close) + " on " + format_date(p.date));
        }
        if (i > 0 && !(s.points[i - 1].date < p.date)) {
            if (s.points[i - 1].date == p.date) {
                fail(ErrorKind::duplicate_date, s.name + ": " + format_date(p.date));
            }
            fail(ErrorKind::invalid_argument, s.name + ": dates not increasing at " + format_date(p.date));
        }
    }
}

/// Column mapping and dialect for price CSVs. Column names match
/// case-insensitively.
struct CsvSchema {
    std::string date_column = "date";
    std::string close_column = "close";
    char delimiter = ',';
    std::string date_format = "%Y-%m-%d";

    friend bool operator==(const CsvSchema&, const CsvSchema&) = default;
};

/// Parses a price CSV. Rows may arrive in any date order; the result is
/// sorted ascending. A repeated date or a non-positive close is an error, as
/// is any row whose date or close does not parse (the message cites the
/// 1-based line number). Blank lines are skipped.
inline PriceSeries parse_csv(std::istream& in, const CsvSchema& schema, std::string name = {}) {
    std::string line;
    std::size_t line_no = 0;
    std::size_t date_idx = 0;
    std::size_t close_idx = 0;
    bool have_header = false;
    PriceSeries out;
    out.name = std::move(name);
    std::vector<std::size_t> source_line;

    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line_no == 1 && line.starts_with("\xEF\xBB\xBF")) line.erase(0, 3);
        if (detail::trim(line).empty()) continue;
        const auto fields = detail::split_csv_line(line, schema.delimiter);
        if (!have_header) {
            bool found_date = false;
            bool found_close = false;
            for (std::size_t i = 0; i < fields.size(); ++i) {
                const auto key = detail::lower(detail::trim(fields[i]));
                if (!found_date && key == detail::lower(schema.date_column)) {
                    date_idx = i;
                    found_date = true;
                } else if (!found_close && key == detail::lower(schema.close_column)) {
                    close_idx = i;
                    found_close = true;
                }
            }
            if (!found_date || !found_close) {
                fail(ErrorKind::parse, out.name + ": header on line " + std::to_string(line_no) +
                                           " lacks columns '" + schema.date_column + "' and/or '" +
                                           schema.close_column + "'");
            }
            have_header = true;
            continue;
        }
        const auto where = out.name + ": line " + std::to_string(line_no);
        if (fields.size() <= std::max(date_idx, close_idx)) {
            fail(ErrorKind::parse, where + ": expected at least " +
                                       std::to_string(std::max(date_idx, close_idx) + 1) + " fields");
        }
        const auto date = parse_date(fields[date_idx], schema.date_format);
        if (!date) fail(ErrorKind::parse, where + ": unparseable date '" + fields[date_idx] + "'");
        const auto close = detail::parse_double(fields[close_idx]);
        if (!close) fail(ErrorKind::parse, where + ": unparseable close '" + fields[close_idx] + "'");
        if (!(*close > 0.0) || !std::isfinite(*close)) {
            fail(ErrorKind::non_positive_close, where + ": close " + fields[close_idx]);
        }
        out.points.push_back({*date, *close});
        source_line.push_back(line_no);
    }
    if (!have_header) fail(ErrorKind::parse, out.name + ": empty file");

    std::vector<std::size_t> order(out.points.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        return out.points[a].date < out.points[b].date;
    });
    std::vector<PricePoint> sorted;
    sorted.reserve(order.size());
    for (std::size_t i = 0; i < order.size(); ++i) {
        const auto& p = out.points[order[i]];
        if (!sorted.empty() && sorted.back().date == p.date) {
            fail(ErrorKind::duplicate_date, out.name + ": date " + format_date(p.date) +
                                                " repeated on line " +
                                                std::to_string(source_line[order[i]]));
        }
        sorted.push_back(p);
    }
    out.points = std::move(sorted);
    return out;
}

inline PriceSeries load_csv(const std::filesystem::path& path, const CsvSchema& schema = {}) {
    std::ifstream in(path, std::ios::binary);
    if (!in) fail(ErrorKind::io, "cannot open " + path.string());
    return parse_csv(in, schema, path.stem().string());
}

/// Writes `date,close` with shortest round-trip numbers and '\n' newlines.
inline void write_csv(const PriceSeries& s, std::ostream& out) {
    out << "date,close\n";
    for (const auto& p : s.points) out << format_date(p.date) << ',' << detail::shortest(p.close) << '\n';
}

inline void write_csv(const PriceSeries& s, const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) fail(ErrorKind::io, "cannot write " + path.string());
    write_csv(s, out);
}

inline void write_csv(const ReturnSeries& s, std::ostream& out) {
    out << "date,value\n";
    for (const auto& p : s.points) out << format_date(p.date) << ',' << detail::shortest(p.value) << '\n';
}

inline void write_csv(const ReturnSeries& s, const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) fail(ErrorKind::io, "cannot write " + path.string());
    write_csv(s, out);
}

/// Restricts both series to their common dates.
inline std::pair<PriceSeries, PriceSeries> align(const PriceSeries& a, const PriceSeries& b) {
    if (a.empty() || b.empty()) fail(ErrorKind::invalid_argument, "align: empty input series");
    std::pair<PriceSeries, PriceSeries> out{PriceSeries{a.name, {}}, PriceSeries{b.name, {}}};
    auto ia = a.points.begin();
    auto ib = b.points.begin();
    while (ia != a.points.end() && ib != b.points.end()) {
        if (ia->date < ib->date) {
            ++ia;
        } else if (ib->date < ia->date) {
            ++ib;
        } else {
            out.first.points.push_back(*ia++);
            out.second.points.push_back(*ib++);
        }
    }
    if (out.first.empty()) {
        fail(ErrorKind::empty_intersection, "align: '" + a.name + "' and '" + b.name + "' share no dates");
    }
    return out;
}

/// Keeps observations with from <= date <= to.
inline PriceSeries restrict_dates(const PriceSeries& s, std::optional<Date> from, std::optional<Date> to) {
    PriceSeries out{s.name, {}};
    for (const auto& p : s.points) {
        if (from && p.date < *from) continue;
        if (to && *to < p.date) continue;
        out.points.push_back(p);
    }
    return out;
}

inline ReturnSeries log_returns(const PriceSeries& p) {
    if (p.size() < 2) fail(ErrorKind::too_short, "log_returns: '" + p.name + "' has fewer than 2 closes");
    ReturnSeries out{p.name, {}};
    out.points.reserve(p.size() - 1);
    for (std::size_t k = 1; k < p.size(); ++k) {
        out.points.push_back({p.points[k].date, std::log(p.points[k].close / p.points[k - 1].close)});
    }
    return out;
}

/// Rebuilds closes from a starting level and log returns (fixture helper).
inline PriceSeries prices_from_returns(const ReturnSeries& r, Date first_date, double first_close) {
    PriceSeries out{r.name, {}};
    out.points.reserve(r.size() + 1);
    out.points.push_back({first_date, first_close});
    double log_level = std::log(first_close);
    for (const auto& p : r.points) {
        log_level += p.value;
        out.points.push_back({p.date, std::exp(log_level)});
    }
    return out;
}

/// Consecutive weekdays starting at `first` (moved forward to a weekday).
inline std::vector<Date> business_days(Date first, std::size_t count) {
    using namespace std::chrono;
    std::vector<Date> out;
    out.reserve(count);
    sys_days day{first};
    while (out.size() < count) {
        const weekday wd{day};
        if (wd != Saturday && wd != Sunday) out.emplace_back(day);
        day += days{1};
    }
    return out;
}

}  // namespace asymvol
