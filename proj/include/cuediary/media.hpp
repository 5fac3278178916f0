#pragma once

#include "cuediary/domain.hpp"

#include <atomic>
#include <chrono>
#include <filesystem>
#include <map>
#include <memory>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace cuediary {

enum class ProviderKind { Mock, HttpVision, HttpVideo, HttpSpeech };

std::string_view to_string(ProviderKind k);
std::optional<ProviderKind> parse_provider_kind(std::string_view s);

inline constexpr std::chrono::milliseconds kDefaultProviderTimeout{20'000};

struct ProviderConfig {
    ProviderKind kind = ProviderKind::Mock;
    std::string endpoint;     // HTTP kinds only
    std::string credentials;  // bearer token, HTTP kinds only
    std::chrono::milliseconds timeout = kDefaultProviderTimeout;
    // Mock only.
    std::filesystem::path fixture_table;
    std::chrono::milliseconds simulated_latency{0};
};

/// Throws Error(InvalidArgument) when a Mock config carries network fields or
/// an HTTP config lacks an endpoint.
void validate(const ProviderConfig& config);

/// One media-understanding backend. Implementations must give up once
/// `timeout` elapses (Error::ProviderTimeout).
class MediaProvider {
public:
    virtual ~MediaProvider() = default;
    virtual ExtractedFeatures analyze(MediaKind kind, std::string_view bytes,
                                      std::chrono::milliseconds timeout) = 0;
};

/// Record of the mock fixture table.
struct MockFixture {
    MediaKind kind = MediaKind::Image;
    ExtractedFeatures features;
};

/// Text fixture table, one record per line, tab separated:
///   <sha256-hex> <kind> <label:confidence,...> <caption or transcript>
/// Blank lines and lines starting with '#' are ignored. The last field is the
/// caption for Image/Video and the transcript for Audio.
class MockFixtureTable {
public:
    static MockFixtureTable parse(std::string_view text);
    static MockFixtureTable load(const std::filesystem::path& path);

    void add(const std::string& sha256, MockFixture fixture);
    [[nodiscard]] const MockFixture* find(const std::string& sha256) const;
    [[nodiscard]] std::size_t size() const { return records_.size(); }

private:
    std::unordered_map<std::string, MockFixture> records_;
};

/// Deterministic provider: features are looked up by content hash. Unknown
/// images and videos yield no features; unknown audio yields an empty
/// transcript.
class MockProvider final : public MediaProvider {
public:
    explicit MockProvider(MockFixtureTable table, std::chrono::milliseconds simulated_latency = {});

    ExtractedFeatures analyze(MediaKind kind, std::string_view bytes,
                              std::chrono::milliseconds timeout) override;

private:
    MockFixtureTable table_;
    std::chrono::milliseconds latency_;
};

/// JSON-over-HTTP adapter shared by the vision, video and speech kinds.
///   request:  POST <endpoint> {"kind": "Image", "content_base64": "..."}
///             Authorization: Bearer <credentials>
///   response: {"tags": [{"label": "...", "confidence": 0.9}], "caption": "...", "transcript": "..."}
/// 408/504 map to ProviderTimeout, 415/422 to UndecodableMedia, other
/// non-2xx to ProviderRejected.
class HttpProvider final : public MediaProvider {
public:
    explicit HttpProvider(ProviderConfig config);

    ExtractedFeatures analyze(MediaKind kind, std::string_view bytes,
                              std::chrono::milliseconds timeout) override;

private:
    ProviderConfig config_;
};

std::unique_ptr<MediaProvider> make_provider(const ProviderConfig& config);

/// Cheap container sniffing: JPEG/PNG for images, ISO-BMFF for video and
/// WAV/MP3/OGG/FLAC/M4A/WebM for audio.
bool looks_decodable(MediaKind kind, std::string_view bytes);

ExtractedFeatures extract_image_features(std::string_view bytes, MediaProvider& provider,
                                         std::chrono::milliseconds timeout = kDefaultProviderTimeout);
ExtractedFeatures extract_video_features(std::string_view bytes, MediaProvider& provider,
                                         std::chrono::milliseconds timeout = kDefaultProviderTimeout);
/// Throws EmptyTranscript when recognition yields nothing.
ExtractedFeatures transcribe_audio(std::string_view bytes, MediaProvider& provider,
                                   std::chrono::milliseconds timeout = kDefaultProviderTimeout);

/// Attachment bytes handed to MediaUnderstanding.
struct MediaPayload {
    MediaKind kind = MediaKind::Image;
    std::string bytes;
};

/// Per-media-kind provider routing with retries. Failures never escape:
/// after the retry budget, the payload contributes no features.
class MediaUnderstanding {
public:
    static constexpr int kRetries = 2;

    struct Route {
        std::shared_ptr<MediaProvider> provider;
        std::chrono::milliseconds timeout = kDefaultProviderTimeout;
    };

    MediaUnderstanding() = default;
    void set_route(MediaKind kind, Route route);

    /// Merges features over all payloads: tags keep the highest confidence per
    /// label and are re-sorted; captions and transcripts are joined with "; ".
    ExtractedFeatures understand(const std::vector<MediaPayload>& payloads) const;

    /// Number of provider failures observed (timeouts, rejections, ...).
    [[nodiscard]] std::size_t failure_count() const { return failures_->load(); }

private:
    std::map<MediaKind, Route> routes_;
    std::shared_ptr<std::atomic<std::size_t>> failures_ = std::make_shared<std::atomic<std::size_t>>(0);
};

/// Reads {"image": {...}, "video": {...}, "audio": {...}} where each value is
/// {"kind": "Mock"|"HttpVision"|..., "endpoint", "credentials_env",
/// "timeout_ms", "fixture_table", "simulated_latency_ms"}. Missing kinds fall
/// back to an empty mock. Relative fixture paths resolve against `base_dir`.
MediaUnderstanding media_from_config(const json& config, const std::filesystem::path& base_dir);

}  // namespace cuediary
