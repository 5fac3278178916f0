#pragma once

#include "cuediary/timeutil.hpp"

#include <cstdint>
#include <mutex>
#include <random>
#include <string>

namespace cuediary {

/// ULID-style identifiers: 48-bit millisecond timestamp followed by 80
/// random bits, Crockford base32, 26 characters. Lexicographic order equals
/// generation order within one generator, also for ids minted in the same
/// millisecond.
class UlidGenerator {
public:
    UlidGenerator();
    explicit UlidGenerator(std::uint64_t seed);

    std::string next(Timestamp at);

private:
    std::mutex mutex_;
    std::mt19937_64 rng_;
    std::uint64_t last_millis_ = 0;
    std::uint64_t rand_hi_ = 0;  // upper 16 of the 80 random bits
    std::uint64_t rand_lo_ = 0;  // lower 64
};

/// Millisecond timestamp encoded in the first ten characters of a ULID.
std::uint64_t ulid_millis(std::string_view ulid);

std::string entry_id_from_ulid(const std::string& ulid);
/// Memo ids are derived from entry ids so generation is idempotent per entry.
std::string memo_id_for_entry(std::string_view entry_id);

}  // namespace cuediary
