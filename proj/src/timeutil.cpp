#include "cuediary/timeutil.hpp"

#include "cuediary/error.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <cctype>
#include <charconv>

namespace cuediary {

namespace chr = std::chrono;

namespace {

std::string format_fields(chr::days day_count, chr::milliseconds in_day, bool with_millis) {
    const chr::year_month_day ymd{chr::sys_days{day_count}};
    const chr::hh_mm_ss hms{in_day};
    std::string out = fmt::format("{:04d}-{:02d}-{:02d}T{:02d}:{:02d}:{:02d}",
                                  static_cast<int>(ymd.year()), static_cast<unsigned>(ymd.month()),
                                  static_cast<unsigned>(ymd.day()), hms.hours().count(),
                                  hms.minutes().count(), hms.seconds().count());
    if (with_millis) out += fmt::format(".{:03d}", hms.subseconds().count());
    return out;
}

int read_int(std::string_view s, std::size_t pos, std::size_t len, std::string_view whole) {
    int value = 0;
    if (pos + len > s.size()) {
        throw Error(ErrorCode::InvalidArgument, fmt::format("malformed timestamp '{}'", whole));
    }
    const auto* first = s.data() + pos;
    const auto [ptr, ec] = std::from_chars(first, first + len, value);
    if (ec != std::errc{} || ptr != first + len) {
        throw Error(ErrorCode::InvalidArgument, fmt::format("malformed timestamp '{}'", whole));
    }
    return value;
}

void expect_char(std::string_view s, std::size_t pos, char c, std::string_view whole) {
    if (pos >= s.size() || s[pos] != c) {
        throw Error(ErrorCode::InvalidArgument, fmt::format("malformed timestamp '{}'", whole));
    }
}

// Parses "YYYY-MM-DDTHH:MM[:SS[.fff]]" and returns the remainder.
chr::milliseconds parse_fields(std::string_view s, std::string_view& rest) {
    const int y = read_int(s, 0, 4, s);
    expect_char(s, 4, '-', s);
    const int mo = read_int(s, 5, 2, s);
    expect_char(s, 7, '-', s);
    const int d = read_int(s, 8, 2, s);
    if (s.size() < 11 || (s[10] != 'T' && s[10] != ' ')) {
        throw Error(ErrorCode::InvalidArgument, fmt::format("malformed timestamp '{}'", s));
    }
    const int h = read_int(s, 11, 2, s);
    expect_char(s, 13, ':', s);
    const int mi = read_int(s, 14, 2, s);
    int sec = 0;
    int millis = 0;
    std::size_t pos = 16;
    if (pos < s.size() && s[pos] == ':') {
        sec = read_int(s, 17, 2, s);
        pos = 19;
        if (pos < s.size() && s[pos] == '.') {
            std::size_t digits = 0;
            ++pos;
            while (pos + digits < s.size() && std::isdigit(static_cast<unsigned char>(s[pos + digits]))) {
                ++digits;
            }
            if (digits == 0) {
                throw Error(ErrorCode::InvalidArgument, fmt::format("malformed timestamp '{}'", s));
            }
            millis = read_int(s, pos, std::min<std::size_t>(digits, 3), s);
            for (std::size_t k = digits; k < 3; ++k) millis *= 10;
            pos += digits;
        }
    }
    const chr::year_month_day ymd{chr::year{y}, chr::month{static_cast<unsigned>(mo)},
                                  chr::day{static_cast<unsigned>(d)}};
    if (!ymd.ok() || h > 23 || mi > 59 || sec > 59) {
        throw Error(ErrorCode::InvalidArgument, fmt::format("invalid date/time '{}'", s));
    }
    rest = s.substr(pos);
    return chr::sys_days{ymd}.time_since_epoch() + chr::hours{h} + chr::minutes{mi} +
           chr::seconds{sec} + chr::milliseconds{millis};
}

}  // namespace

Timestamp now_utc() {
    return chr::floor<chr::milliseconds>(chr::system_clock::now());
}

std::string format_utc(Timestamp t) {
    const auto day = chr::floor<chr::days>(t);
    return format_fields(day.time_since_epoch(), t - day, true) + "Z";
}

Timestamp parse_utc(std::string_view s) {
    std::string_view rest;
    const auto since_epoch = parse_fields(s, rest);
    if (rest != "Z") {
        throw Error(ErrorCode::InvalidArgument, fmt::format("expected UTC 'Z' suffix in '{}'", s));
    }
    return Timestamp{since_epoch};
}

std::string format_local(LocalDateTime t) {
    const auto day = chr::floor<chr::days>(t);
    return format_fields(day.time_since_epoch(), chr::milliseconds{t - day}, false);
}

LocalDateTime parse_local(std::string_view s) {
    std::string_view rest;
    const auto since_epoch = parse_fields(s, rest);
    if (!rest.empty()) {
        throw Error(ErrorCode::InvalidArgument, fmt::format("trailing characters in '{}'", s));
    }
    return LocalDateTime{chr::floor<chr::seconds>(since_epoch)};
}

LocalDateTime to_local(Timestamp t, int utc_offset_minutes) {
    const auto shifted = chr::floor<chr::seconds>(t.time_since_epoch()) + chr::minutes{utc_offset_minutes};
    return LocalDateTime{shifted};
}

int local_hour(Timestamp t, int utc_offset_minutes) {
    const auto local = to_local(t, utc_offset_minutes);
    const auto day = chr::floor<chr::days>(local);
    return static_cast<int>(chr::floor<chr::hours>(local - day).count());
}

chr::local_days local_day(Timestamp t, int utc_offset_minutes) {
    return chr::floor<chr::days>(to_local(t, utc_offset_minutes));
}

}  // namespace cuediary
