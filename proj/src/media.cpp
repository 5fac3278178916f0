#include "cuediary/media.hpp"

#include "cuediary/error.hpp"
#include "cuediary/hashing.hpp"
#include "cuediary/text.hpp"
#include "http_util.hpp"

#include <httplib.h>
#include <fmt/format.h>
#include <spdlog/spdlog.h>

#include <cstdlib>
#include <fstream>
#include <sstream>
#include <thread>

namespace cuediary {

namespace {

std::vector<std::string> split(std::string_view s, char sep) {
    std::vector<std::string> out;
    std::size_t start = 0;
    while (true) {
        const auto pos = s.find(sep, start);
        out.emplace_back(s.substr(start, pos == std::string_view::npos ? std::string_view::npos : pos - start));
        if (pos == std::string_view::npos) break;
        start = pos + 1;
    }
    return out;
}

std::vector<ObjectTag> parse_tags(std::string_view field, std::size_t line_no) {
    std::vector<ObjectTag> tags;
    if (text::trim(field).empty()) return tags;
    for (const auto& pair : split(field, ',')) {
        const auto colon = pair.rfind(':');
        if (colon == std::string::npos) {
            throw Error(ErrorCode::InvalidArgument,
                        fmt::format("fixture line {}: tag '{}' lacks ':confidence'", line_no, pair));
        }
        ObjectTag tag;
        tag.label = text::trim(pair.substr(0, colon));
        try {
            tag.confidence = std::stod(pair.substr(colon + 1));
        } catch (const std::exception&) {
            throw Error(ErrorCode::InvalidArgument,
                        fmt::format("fixture line {}: bad confidence in '{}'", line_no, pair));
        }
        if (tag.confidence < 0.0 || tag.confidence > 1.0) {
            throw Error(ErrorCode::InvalidArgument,
                        fmt::format("fixture line {}: confidence outside [0,1]", line_no));
        }
        tags.push_back(std::move(tag));
    }
    return tags;
}

bool starts_with(std::string_view bytes, std::string_view prefix) {
    return bytes.substr(0, prefix.size()) == prefix;
}

bool is_iso_bmff(std::string_view bytes) {
    return bytes.size() >= 12 && bytes.substr(4, 4) == "ftyp";
}

ExtractedFeatures checked_call(MediaKind kind, std::string_view bytes, MediaProvider& provider,
                               std::chrono::milliseconds timeout) {
    if (!looks_decodable(kind, bytes)) {
        throw Error(ErrorCode::UndecodableMedia,
                    fmt::format("{} payload of {} bytes is not decodable", to_string(kind), bytes.size()));
    }
    ExtractedFeatures f = provider.analyze(kind, bytes, timeout);
    f.sort_tags();
    if (f.caption && text::trim(*f.caption).empty()) f.caption.reset();
    return f;
}

void append_joined(std::optional<std::string>& into, const std::optional<std::string>& part) {
    if (!part || part->empty()) return;
    if (into && !into->empty()) {
        *into += "; " + *part;
    } else {
        into = *part;
    }
}

}  // namespace

std::string_view to_string(ProviderKind k) {
    switch (k) {
        case ProviderKind::Mock: return "Mock";
        case ProviderKind::HttpVision: return "HttpVision";
        case ProviderKind::HttpVideo: return "HttpVideo";
        case ProviderKind::HttpSpeech: return "HttpSpeech";
    }
    return "Mock";
}

std::optional<ProviderKind> parse_provider_kind(std::string_view s) {
    for (auto k : {ProviderKind::Mock, ProviderKind::HttpVision, ProviderKind::HttpVideo, ProviderKind::HttpSpeech}) {
        if (text::iequals(s, to_string(k))) return k;
    }
    return std::nullopt;
}

void validate(const ProviderConfig& config) {
    if (config.kind == ProviderKind::Mock) {
        if (!config.endpoint.empty() || !config.credentials.empty()) {
            throw Error(ErrorCode::InvalidArgument, "mock provider takes no endpoint or credentials");
        }
        return;
    }
    if (config.endpoint.empty()) {
        throw Error(ErrorCode::InvalidArgument,
                    fmt::format("{} provider requires an endpoint", to_string(config.kind)));
    }
    if (config.timeout <= std::chrono::milliseconds::zero()) {
        throw Error(ErrorCode::InvalidArgument, "provider timeout must be positive");
    }
}

// ---- mock -----------------------------------------------------------------

MockFixtureTable MockFixtureTable::parse(std::string_view text_table) {
    MockFixtureTable table;
    std::size_t line_no = 0;
    for (const auto& raw : split(text_table, '\n')) {
        ++line_no;
        std::string line = raw;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (text::trim(line).empty() || line.front() == '#') continue;

        const auto fields = split(line, '\t');
        if (fields.size() != 4) {
            throw Error(ErrorCode::InvalidArgument,
                        fmt::format("fixture line {}: expected 4 tab-separated fields, got {}", line_no,
                                    fields.size()));
        }
        const auto kind = parse_media_kind(fields[1]);
        if (!kind) {
            throw Error(ErrorCode::InvalidArgument, fmt::format("fixture line {}: unknown kind '{}'", line_no, fields[1]));
        }
        MockFixture fx;
        fx.kind = *kind;
        fx.features.object_tags = parse_tags(fields[2], line_no);
        fx.features.sort_tags();
        const std::string last = text::trim(fields[3]);
        if (*kind == MediaKind::Audio) {
            fx.features.transcript = last;
        } else if (!last.empty()) {
            fx.features.caption = last;
        }
        table.add(text::to_lower(text::trim(fields[0])), std::move(fx));
    }
    return table;
}

MockFixtureTable MockFixtureTable::load(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw Error(ErrorCode::InvalidArgument, fmt::format("cannot open fixture table {}", path.string()));
    }
    std::stringstream buffer;
    buffer << in.rdbuf();
    return parse(buffer.str());
}

void MockFixtureTable::add(const std::string& sha256, MockFixture fixture) {
    records_[sha256] = std::move(fixture);
}

const MockFixture* MockFixtureTable::find(const std::string& sha256) const {
    const auto it = records_.find(sha256);
    return it == records_.end() ? nullptr : &it->second;
}

MockProvider::MockProvider(MockFixtureTable table, std::chrono::milliseconds simulated_latency)
    : table_(std::move(table)), latency_(simulated_latency) {}

ExtractedFeatures MockProvider::analyze(MediaKind kind, std::string_view bytes,
                                        std::chrono::milliseconds timeout) {
    if (latency_ > timeout) {
        std::this_thread::sleep_for(timeout);
        throw Error(ErrorCode::ProviderTimeout,
                    fmt::format("mock provider exceeded {} ms timeout", timeout.count()));
    }
    if (latency_.count() > 0) std::this_thread::sleep_for(latency_);

    const auto* fx = table_.find(sha256_hex(bytes));
    if (fx == nullptr || fx->kind != kind) {
        ExtractedFeatures none;
        if (kind == MediaKind::Audio) none.transcript = "";
        return none;
    }
    return fx->features;
}

// ---- http -----------------------------------------------------------------

HttpProvider::HttpProvider(ProviderConfig config) : config_(std::move(config)) {
    validate(config_);
}

ExtractedFeatures HttpProvider::analyze(MediaKind kind, std::string_view bytes,
                                        std::chrono::milliseconds timeout) {
    const auto url = detail::split_url(config_.endpoint);
    httplib::Client client(url.origin);
    client.set_connection_timeout(timeout);
    client.set_read_timeout(timeout);
    client.set_write_timeout(timeout);
    if (!config_.credentials.empty()) client.set_bearer_token_auth(config_.credentials);

    const json body{{"kind", to_string(kind)}, {"content_base64", base64_encode(bytes)}};
    const auto res = client.Post(url.path, body.dump(), "application/json");
    if (!res) {
        const auto err = res.error();
        if (err == httplib::Error::Read || err == httplib::Error::Write ||
            err == httplib::Error::ConnectionTimeout) {
            throw Error(ErrorCode::ProviderTimeout,
                        fmt::format("{} did not answer within {} ms", config_.endpoint, timeout.count()));
        }
        throw Error(ErrorCode::ProviderRejected,
                    fmt::format("{} request failed: {}", config_.endpoint, httplib::to_string(err)));
    }
    if (res->status == 408 || res->status == 504) {
        throw Error(ErrorCode::ProviderTimeout, fmt::format("{} timed out ({})", config_.endpoint, res->status));
    }
    if (res->status == 415 || res->status == 422) {
        throw Error(ErrorCode::UndecodableMedia, fmt::format("{} could not decode the media", config_.endpoint));
    }
    if (res->status < 200 || res->status >= 300) {
        throw Error(ErrorCode::ProviderRejected, fmt::format("{} answered {}", config_.endpoint, res->status));
    }

    const auto j = json::parse(res->body, nullptr, false);
    if (j.is_discarded() || !j.is_object()) {
        throw Error(ErrorCode::ProviderRejected, "provider response is not a JSON object");
    }
    ExtractedFeatures f;
    try {
        if (j.contains("tags")) j.at("tags").get_to(f.object_tags);
        if (j.contains("caption") && j.at("caption").is_string()) f.caption = j.at("caption").get<std::string>();
        if (j.contains("transcript") && j.at("transcript").is_string()) {
            f.transcript = j.at("transcript").get<std::string>();
        }
    } catch (const json::exception& e) {
        throw Error(ErrorCode::ProviderRejected, fmt::format("malformed provider response: {}", e.what()));
    }
    return f;
}

std::unique_ptr<MediaProvider> make_provider(const ProviderConfig& config) {
    validate(config);
    if (config.kind == ProviderKind::Mock) {
        auto table = config.fixture_table.empty() ? MockFixtureTable{} : MockFixtureTable::load(config.fixture_table);
        return std::make_unique<MockProvider>(std::move(table), config.simulated_latency);
    }
    return std::make_unique<HttpProvider>(config);
}

// ---- extraction -----------------------------------------------------------

bool looks_decodable(MediaKind kind, std::string_view bytes) {
    if (bytes.empty()) return false;
    switch (kind) {
        case MediaKind::Image:
            return starts_with(bytes, "\xFF\xD8\xFF") || starts_with(bytes, "\x89PNG\r\n\x1A\n");
        case MediaKind::Video:
            return is_iso_bmff(bytes);
        case MediaKind::Audio:
            return (starts_with(bytes, "RIFF") && bytes.size() >= 12 && bytes.substr(8, 4) == "WAVE") ||
                   starts_with(bytes, "ID3") ||
                   (bytes.size() >= 2 && static_cast<unsigned char>(bytes[0]) == 0xFF &&
                    (static_cast<unsigned char>(bytes[1]) & 0xE0) == 0xE0) ||
                   starts_with(bytes, "OggS") || starts_with(bytes, "fLaC") ||
                   starts_with(bytes, "\x1A\x45\xDF\xA3") || is_iso_bmff(bytes);
    }
    return false;
}

ExtractedFeatures extract_image_features(std::string_view bytes, MediaProvider& provider,
                                         std::chrono::milliseconds timeout) {
    auto f = checked_call(MediaKind::Image, bytes, provider, timeout);
    f.transcript.reset();
    return f;
}

ExtractedFeatures extract_video_features(std::string_view bytes, MediaProvider& provider,
                                         std::chrono::milliseconds timeout) {
    auto f = checked_call(MediaKind::Video, bytes, provider, timeout);
    f.transcript.reset();
    return f;
}

ExtractedFeatures transcribe_audio(std::string_view bytes, MediaProvider& provider,
                                   std::chrono::milliseconds timeout) {
    auto f = checked_call(MediaKind::Audio, bytes, provider, timeout);
    if (!f.transcript || text::trim(*f.transcript).empty()) {
        throw Error(ErrorCode::EmptyTranscript, "speech recognition produced no text");
    }
    f.transcript = text::trim(*f.transcript);
    // Audio contributes only its transcript.
    f.object_tags.clear();
    f.caption.reset();
    return f;
}

void MediaUnderstanding::set_route(MediaKind kind, Route route) {
    routes_[kind] = std::move(route);
}

ExtractedFeatures MediaUnderstanding::understand(const std::vector<MediaPayload>& payloads) const {
    ExtractedFeatures merged;
    std::map<std::string, double> best;
    for (const auto& payload : payloads) {
        const auto it = routes_.find(payload.kind);
        if (it == routes_.end() || !it->second.provider) {
            spdlog::warn("no media provider configured for {}", to_string(payload.kind));
            continue;
        }
        auto& provider = *it->second.provider;
        const auto timeout = it->second.timeout;

        std::optional<ExtractedFeatures> got;
        for (int attempt = 0; attempt <= kRetries && !got; ++attempt) {
            try {
                switch (payload.kind) {
                    case MediaKind::Image: got = extract_image_features(payload.bytes, provider, timeout); break;
                    case MediaKind::Video: got = extract_video_features(payload.bytes, provider, timeout); break;
                    case MediaKind::Audio: got = transcribe_audio(payload.bytes, provider, timeout); break;
                }
            } catch (const Error& e) {
                failures_->fetch_add(1);
                spdlog::warn("{} extraction attempt {} failed: {} ({})", to_string(payload.kind), attempt + 1,
                             e.what(), to_string(e.code()));
                const bool transient = e.code() == ErrorCode::ProviderTimeout || e.code() == ErrorCode::ProviderRejected;
                if (!transient) break;
            }
        }
        if (!got) continue;

        for (const auto& tag : got->object_tags) {
            auto [pos, inserted] = best.emplace(tag.label, tag.confidence);
            if (!inserted && tag.confidence > pos->second) pos->second = tag.confidence;
        }
        append_joined(merged.caption, got->caption);
        append_joined(merged.transcript, got->transcript);
    }
    // Equal confidences end up in label order.
    for (const auto& [label, confidence] : best) merged.object_tags.push_back({label, confidence});
    merged.sort_tags();
    return merged;
}

MediaUnderstanding media_from_config(const json& config, const std::filesystem::path& base_dir) {
    MediaUnderstanding media;
    const std::array<std::pair<const char*, MediaKind>, 3> kinds = {
        std::pair{"image", MediaKind::Image}, std::pair{"video", MediaKind::Video},
        std::pair{"audio", MediaKind::Audio}};
    for (const auto& [key, kind] : kinds) {
        ProviderConfig pc;
        if (config.contains(key)) {
            const auto& c = config.at(key);
            const auto pk = parse_provider_kind(c.value("kind", std::string("Mock")));
            if (!pk) throw Error(ErrorCode::InvalidArgument, fmt::format("unknown provider kind for {}", key));
            pc.kind = *pk;
            pc.endpoint = c.value("endpoint", std::string{});
            if (c.contains("credentials_env")) {
                const auto var = c.at("credentials_env").get<std::string>();
                if (const char* v = std::getenv(var.c_str())) pc.credentials = v;
            }
            pc.timeout = std::chrono::milliseconds{c.value("timeout_ms", kDefaultProviderTimeout.count())};
            if (c.contains("fixture_table")) {
                std::filesystem::path p = c.at("fixture_table").get<std::string>();
                pc.fixture_table = p.is_relative() ? base_dir / p : p;
            }
            pc.simulated_latency = std::chrono::milliseconds{c.value("simulated_latency_ms", 0)};
        }
        media.set_route(kind, {std::shared_ptr<MediaProvider>(make_provider(pc)), pc.timeout});
    }
    return media;
}

}  // namespace cuediary
