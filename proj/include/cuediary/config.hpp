#pragma once

#include "cuediary/domain.hpp"
#include "cuediary/predictor.hpp"

#include <chrono>
#include <filesystem>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

namespace cuediary {

struct ChannelConfig {
    std::string channel_id;
    std::string participant_id;
    int utc_offset_minutes = 0;
    /// false = Baseline arm: entries are accepted, no memo is ever generated.
    bool agent_enabled = true;
    std::optional<ParticipantGroup> group;
};

struct StudyConfig {
    std::string study_id;
    std::vector<ChannelConfig> channels;
    std::optional<std::chrono::year_month_day> window_start;
    std::optional<std::chrono::year_month_day> window_end;

    [[nodiscard]] const ChannelConfig* find_channel(const std::string& channel_id) const;
};

/// Throws InvalidArgument on duplicate channel ids, empty ids or a window
/// that ends before it starts.
void validate(const StudyConfig& config);

/// {"study_id", "channels": [{"channel_id", "participant_id",
/// "utc_offset_minutes", "agent_enabled", "group"}], "recording_window":
/// {"start": "YYYY-MM-DD", "end": "YYYY-MM-DD"}}
StudyConfig study_config_from_json(const json& j);
json study_config_to_json(const StudyConfig& config);

json load_json_file(const std::filesystem::path& path);

/// {"kind": "http"|"keyword", "endpoint", "model", "credentials_env",
/// "timeout_ms", "max_retries", "temperature"}. Secrets are read from the
/// environment variable named by "credentials_env", never from the file.
struct LlmSetup {
    std::shared_ptr<LlmClient> client;
    LlmClientConfig config;
};
LlmSetup llm_from_config(const json& j);

}  // namespace cuediary
