#pragma once

#include "cuediary/service.hpp"

#include "test_support.hpp"

#include <atomic>
#include <memory>

namespace cuediary::testing {

/// Deterministic clock: starts at `start` and moves `step` forward per call.
class SteppingClock {
public:
    explicit SteppingClock(Timestamp start = parse_utc("2023-03-06T08:00:00.000Z"),
                           std::chrono::milliseconds step = std::chrono::minutes{7})
        : now_(start.time_since_epoch().count()), step_(step.count()) {}

    Timestamp operator()() { return Timestamp{std::chrono::milliseconds{now_.fetch_add(step_)}}; }

private:
    std::atomic<std::int64_t> now_;
    std::int64_t step_;
};

inline ServiceOptions service_options(const std::filesystem::path& dir, std::shared_ptr<LlmClient> llm,
                                      std::chrono::milliseconds llm_timeout = std::chrono::milliseconds{500}) {
    ServiceOptions o;
    o.data_dir = dir;
    o.study = two_channel_study();
    o.media = mock_media();
    o.llm = std::move(llm);
    o.llm_config.timeout = llm_timeout;
    o.llm_config.max_retries = 2;
    auto clock = std::make_shared<SteppingClock>();
    o.clock = [clock] { return (*clock)(); };
    o.id_seed = 1234;
    return o;
}

inline PostPayload text_post(const std::string& text) {
    PostPayload p;
    p.text = text;
    return p;
}

inline PostPayload media_post(const std::string& mime, const std::string& fixture,
                              std::optional<std::string> text = std::nullopt) {
    PostPayload p;
    p.text = std::move(text);
    p.attachments.push_back({mime, read_fixture(fixture)});
    return p;
}

}  // namespace cuediary::testing
