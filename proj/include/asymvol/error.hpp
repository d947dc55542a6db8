#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace asymvol {

enum class ErrorKind {
    io,
    parse,
    invalid_argument,
    duplicate_date,
    non_positive_close,
    empty_intersection,
    too_short,
    out_of_range,
    insufficient_data,
    rank_deficient,
    degenerate,
    horizon_mismatch,
    invalid_spec,
    incomplete,
};

constexpr std::string_view to_string(ErrorKind kind) noexcept {
    switch (kind) {
        case ErrorKind::io: return "io";
        case ErrorKind::parse: return "parse";
        case ErrorKind::invalid_argument: return "invalid_argument";
        case ErrorKind::duplicate_date: return "duplicate_date";
        case ErrorKind::non_positive_close: return "non_positive_close";
        case ErrorKind::empty_intersection: return "empty_intersection";
        case ErrorKind::too_short: return "too_short";
        case ErrorKind::out_of_range: return "out_of_range";
        case ErrorKind::insufficient_data: return "insufficient_data";
        case ErrorKind::rank_deficient: return "rank_deficient";
        case ErrorKind::degenerate: return "degenerate";
        case ErrorKind::horizon_mismatch: return "horizon_mismatch";
        case ErrorKind::invalid_spec: return "invalid_spec";
        case ErrorKind::incomplete: return "incomplete";
    }
    return "unknown";
}

/// Every failure raised by the library carries a kind so callers can branch
/// without parsing messages.
class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, const std::string& message)
        : std::runtime_error(std::string(to_string(kind)) + ": " + message), kind_(kind) {}

    [[nodiscard]] ErrorKind kind() const noexcept { return kind_; }

private:
    ErrorKind kind_;
};

[[noreturn]] inline void fail(ErrorKind kind, const std::string& message) {
    throw Error(kind, message);
}

}  // namespace asymvol
