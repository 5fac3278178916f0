#include "cuediary/config.hpp"

#include "cuediary/error.hpp"

#include <fmt/format.h>

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <set>

namespace cuediary {

namespace {

std::chrono::year_month_day parse_date(const std::string& s) {
    unsigned y = 0, m = 0, d = 0;
    if (std::sscanf(s.c_str(), "%4u-%2u-%2u", &y, &m, &d) != 3) {
        throw Error(ErrorCode::InvalidArgument, fmt::format("'{}' is not a YYYY-MM-DD date", s));
    }
    const std::chrono::year_month_day ymd{std::chrono::year(static_cast<int>(y)), std::chrono::month(m),
                                          std::chrono::day(d)};
    if (!ymd.ok()) throw Error(ErrorCode::InvalidArgument, fmt::format("'{}' is not a calendar date", s));
    return ymd;
}

std::string format_date(std::chrono::year_month_day d) {
    return fmt::format("{:04}-{:02}-{:02}", static_cast<int>(d.year()), static_cast<unsigned>(d.month()),
                       static_cast<unsigned>(d.day()));
}

}  // namespace

const ChannelConfig* StudyConfig::find_channel(const std::string& channel_id) const {
    for (const auto& c : channels) {
        if (c.channel_id == channel_id) return &c;
    }
    return nullptr;
}

void validate(const StudyConfig& config) {
    if (config.study_id.empty()) throw Error(ErrorCode::InvalidArgument, "study_id is empty");
    std::set<std::string> seen;
    for (const auto& c : config.channels) {
        if (c.channel_id.empty() || c.participant_id.empty()) {
            throw Error(ErrorCode::InvalidArgument, "channels need a channel_id and a participant_id");
        }
        if (!seen.insert(c.channel_id).second) {
            throw Error(ErrorCode::InvalidArgument, fmt::format("duplicate channel id '{}'", c.channel_id),
                        c.channel_id);
        }
        if (c.utc_offset_minutes < -14 * 60 || c.utc_offset_minutes > 14 * 60) {
            throw Error(ErrorCode::InvalidArgument, fmt::format("channel {}: utc offset out of range", c.channel_id));
        }
    }
    if (config.window_start && config.window_end &&
        std::chrono::sys_days(*config.window_end) < std::chrono::sys_days(*config.window_start)) {
        throw Error(ErrorCode::InvalidArgument, "recording window ends before it starts");
    }
}

StudyConfig study_config_from_json(const json& j) {
    StudyConfig c;
    try {
        c.study_id = j.at("study_id").get<std::string>();
        for (const auto& ch : j.value("channels", json::array())) {
            ChannelConfig cc;
            cc.channel_id = ch.at("channel_id").get<std::string>();
            cc.participant_id = ch.at("participant_id").get<std::string>();
            cc.utc_offset_minutes = ch.value("utc_offset_minutes", 0);
            cc.agent_enabled = ch.value("agent_enabled", true);
            if (ch.contains("group") && !ch["group"].is_null()) {
                cc.group = parse_group(ch["group"].get<std::string>());
                if (!cc.group) throw Error(ErrorCode::InvalidArgument, "group must be G1 or G2");
            }
            c.channels.push_back(std::move(cc));
        }
        if (j.contains("recording_window")) {
            const auto& w = j["recording_window"];
            if (w.contains("start")) c.window_start = parse_date(w["start"].get<std::string>());
            if (w.contains("end")) c.window_end = parse_date(w["end"].get<std::string>());
        }
    } catch (const json::exception& e) {
        throw Error(ErrorCode::InvalidArgument, fmt::format("study config: {}", e.what()));
    }
    validate(c);
    return c;
}

json study_config_to_json(const StudyConfig& config) {
    json channels = json::array();
    for (const auto& c : config.channels) {
        json cj{{"channel_id", c.channel_id},
                {"participant_id", c.participant_id},
                {"utc_offset_minutes", c.utc_offset_minutes},
                {"agent_enabled", c.agent_enabled}};
        cj["group"] = c.group ? json(to_string(*c.group)) : json(nullptr);
        channels.push_back(std::move(cj));
    }
    json j{{"study_id", config.study_id}, {"channels", channels}};
    if (config.window_start || config.window_end) {
        json w = json::object();
        if (config.window_start) w["start"] = format_date(*config.window_start);
        if (config.window_end) w["end"] = format_date(*config.window_end);
        j["recording_window"] = w;
    }
    return j;
}

json load_json_file(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw Error(ErrorCode::InvalidArgument, fmt::format("cannot open {}", path.string()));
    auto j = json::parse(in, nullptr, false);
    if (j.is_discarded()) throw Error(ErrorCode::InvalidArgument, fmt::format("{} is not valid JSON", path.string()));
    return j;
}

LlmSetup llm_from_config(const json& j) {
    LlmSetup s;
    s.config.endpoint = j.value("endpoint", "");
    s.config.model = j.value("model", s.config.model);
    s.config.timeout = std::chrono::milliseconds(j.value("timeout_ms", s.config.timeout.count()));
    s.config.max_retries = j.value("max_retries", s.config.max_retries);
    s.config.temperature = j.value("temperature", s.config.temperature);
    if (j.contains("credentials_env")) {
        if (const char* v = std::getenv(j["credentials_env"].get<std::string>().c_str())) s.config.credentials = v;
    }
    validate(s.config);

    const auto kind = j.value("kind", std::string("keyword"));
    if (kind == "http") {
        s.client = std::make_shared<HttpLlmClient>(s.config);
    } else if (kind == "keyword") {
        s.client = std::make_shared<KeywordLlmClient>();
    } else {
        throw Error(ErrorCode::InvalidArgument, fmt::format("unknown LLM client kind '{}'", kind));
    }
    return s;
}

}  // namespace cuediary
