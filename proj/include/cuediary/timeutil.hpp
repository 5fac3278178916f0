#pragma once

#include <chrono>
#include <string>
#include <string_view>

namespace cuediary {

using Timestamp = std::chrono::sys_time<std::chrono::milliseconds>;
using LocalDateTime = std::chrono::local_time<std::chrono::seconds>;

Timestamp now_utc();

/// RFC-3339 UTC with millisecond precision: "2026-10-15T11:57:00.123Z".
std::string format_utc(Timestamp t);
/// Accepts "YYYY-MM-DDTHH:MM:SS[.fff]Z". Throws Error(InvalidArgument).
Timestamp parse_utc(std::string_view s);

/// "YYYY-MM-DDTHH:MM:SS" with no zone suffix.
std::string format_local(LocalDateTime t);
/// Accepts "YYYY-MM-DDTHH:MM[:SS]". Throws Error(InvalidArgument).
LocalDateTime parse_local(std::string_view s);

LocalDateTime to_local(Timestamp t, int utc_offset_minutes);
int local_hour(Timestamp t, int utc_offset_minutes);
/// Local calendar day as days since 1970-01-01.
std::chrono::local_days local_day(Timestamp t, int utc_offset_minutes);

}  // namespace cuediary
