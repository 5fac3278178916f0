#include "cuediary/ids.hpp"

#include "cuediary/error.hpp"

#include <array>

namespace cuediary {

namespace {

constexpr std::string_view kCrockford = "0123456789ABCDEFGHJKMNPQRSTVWXYZ";

}  // namespace

UlidGenerator::UlidGenerator() : rng_(std::random_device{}()) {}

UlidGenerator::UlidGenerator(std::uint64_t seed) : rng_(seed) {}

std::string UlidGenerator::next(Timestamp at) {
    std::lock_guard lock(mutex_);
    auto millis = static_cast<std::uint64_t>(at.time_since_epoch().count());
    if (millis <= last_millis_) {
        // Same (or earlier) millisecond: keep the timestamp, bump the random part.
        millis = last_millis_;
        if (++rand_lo_ == 0) rand_hi_ = (rand_hi_ + 1) & 0xFFFF;
    } else {
        last_millis_ = millis;
        rand_hi_ = rng_() & 0xFFFF;
        rand_lo_ = rng_();
    }

    std::array<char, 26> out{};
    std::uint64_t t = millis;
    for (int i = 9; i >= 0; --i) {
        out[static_cast<std::size_t>(i)] = kCrockford[t & 0x1F];
        t >>= 5;
    }
    // 80 random bits = 16 characters of 5 bits.
    std::uint64_t hi = rand_hi_;
    std::uint64_t lo = rand_lo_;
    for (int i = 25; i >= 10; --i) {
        out[static_cast<std::size_t>(i)] = kCrockford[lo & 0x1F];
        lo = (lo >> 5) | ((hi & 0x1F) << 59);
        hi >>= 5;
    }
    return {out.begin(), out.end()};
}

std::uint64_t ulid_millis(std::string_view ulid) {
    if (ulid.size() < 10) throw Error(ErrorCode::InvalidArgument, "ulid too short");
    std::uint64_t t = 0;
    for (std::size_t i = 0; i < 10; ++i) {
        const auto pos = kCrockford.find(ulid[i]);
        if (pos == std::string_view::npos) throw Error(ErrorCode::InvalidArgument, "not a ulid");
        t = (t << 5) | pos;
    }
    return t;
}

std::string entry_id_from_ulid(const std::string& ulid) {
    return "E" + ulid;
}

std::string memo_id_for_entry(std::string_view entry_id) {
    std::string id(entry_id);
    if (!id.empty() && id.front() == 'E') id.erase(0, 1);
    return "M" + id;
}

}  // namespace cuediary
