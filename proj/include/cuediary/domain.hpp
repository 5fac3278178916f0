#pragma once

#include "cuediary/timeutil.hpp"

#include <nlohmann/json.hpp>

#include <array>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace cuediary {

using json = nlohmann::json;

inline constexpr std::size_t kLocationCount = 3;
inline constexpr std::size_t kActivityCount = 6;
inline constexpr std::size_t kActivityCharLimit = 151;
inline constexpr std::size_t kLocationCharLimit = 60;

enum class MediaKind { Image, Video, Audio };
enum class Modality { Text, Image, Video, Audio, TextAndImage };
enum class EmotionLabel { Positive, Neutral, Negative };
enum class PeopleLabel { Alone, Families, Friends, Colleagues, Acquaintances };

/// The five contextual dimensions, in rubric column order.
enum class Dimension { Time, Location, People, Emotion, Activity };
inline constexpr std::array<Dimension, 5> kAllDimensions = {
    Dimension::Time, Dimension::Location, Dimension::People, Dimension::Emotion, Dimension::Activity};

inline constexpr std::array<EmotionLabel, 3> kAllEmotions = {
    EmotionLabel::Positive, EmotionLabel::Neutral, EmotionLabel::Negative};
inline constexpr std::array<PeopleLabel, 5> kAllPeople = {
    PeopleLabel::Alone, PeopleLabel::Families, PeopleLabel::Friends, PeopleLabel::Colleagues,
    PeopleLabel::Acquaintances};

std::string_view to_string(MediaKind k);
std::string_view to_string(Modality m);
std::string_view to_string(EmotionLabel e);
std::string_view to_string(PeopleLabel p);
std::string_view to_string(Dimension d);

// Case-insensitive parsers; nullopt when outside the vocabulary.
std::optional<MediaKind> parse_media_kind(std::string_view s);
std::optional<Modality> parse_modality(std::string_view s);
std::optional<EmotionLabel> parse_emotion(std::string_view s);
std::optional<PeopleLabel> parse_people(std::string_view s);
std::optional<Dimension> parse_dimension(std::string_view s);

/// Throwing variants (Error::VocabularyViolation) used by JSON readers.
EmotionLabel emotion_from_string(std::string_view s);
PeopleLabel people_from_string(std::string_view s);

/// Maps a post's payload combination to its modality.
/// Throws EmptyPost when nothing is attached and MixedUnsupported when audio
/// or video is combined with anything else (or images with video).
Modality classify_modality(bool text_present, const std::vector<MediaKind>& attachment_kinds);

struct ObjectTag {
    std::string label;
    double confidence = 0.0;

    bool operator==(const ObjectTag&) const = default;
};

struct ExtractedFeatures {
    std::vector<ObjectTag> object_tags;  // non-increasing confidence
    std::optional<std::string> caption;
    std::optional<std::string> transcript;

    [[nodiscard]] bool empty() const {
        return object_tags.empty() && !caption && !transcript;
    }
    /// Stable sort by non-increasing confidence.
    void sort_tags();

    bool operator==(const ExtractedFeatures&) const = default;
};

/// Metadata for a stored attachment. Bytes live in the blob store, keyed by sha256.
struct Attachment {
    MediaKind kind = MediaKind::Image;
    std::string mime;
    std::string sha256;
    std::uint64_t size_bytes = 0;

    bool operator==(const Attachment&) const = default;
};

struct ThreadNote {
    Timestamp at;
    std::string text;

    bool operator==(const ThreadNote&) const = default;
};

struct DiaryEntry {
    std::string entry_id;
    std::string channel_id;
    std::string participant_id;
    Timestamp created_at;
    int utc_offset_minutes = 0;
    Modality modality = Modality::Text;
    std::optional<std::string> text_body;
    std::vector<Attachment> attachments;
    std::optional<ExtractedFeatures> features;
    std::vector<ThreadNote> notes;

    [[nodiscard]] LocalDateTime local_created_at() const {
        return to_local(created_at, utc_offset_minutes);
    }

    bool operator==(const DiaryEntry&) const = default;
};

/// The five-dimension proposal for one entry. Only constructible through
/// `make` (validated) or `manual_fallback`.
class ContextPrediction {
public:
    /// Throws Error(InvalidPrediction, detail = dimension name) unless there
    /// are exactly 3 non-empty locations of at most 60 characters and exactly
    /// 6 distinct non-empty activities of at most 151 characters.
    static ContextPrediction make(std::vector<std::string> locations, EmotionLabel emotion,
                                  PeopleLabel people, std::vector<std::string> activities);

    /// Neutral / Alone with no location or activity options; the memo built
    /// from it requires free text for those dimensions.
    static ContextPrediction manual_fallback();

    [[nodiscard]] const std::vector<std::string>& locations() const { return locations_; }
    [[nodiscard]] EmotionLabel emotion() const { return emotion_; }
    [[nodiscard]] PeopleLabel people() const { return people_; }
    [[nodiscard]] const std::vector<std::string>& activities() const { return activities_; }
    [[nodiscard]] bool manual_mode() const { return manual_mode_; }

    bool operator==(const ContextPrediction&) const = default;

private:
    ContextPrediction() = default;

    std::vector<std::string> locations_;
    EmotionLabel emotion_ = EmotionLabel::Neutral;
    PeopleLabel people_ = PeopleLabel::Alone;
    std::vector<std::string> activities_;
    bool manual_mode_ = false;
};

enum class SystemArm { Baseline, Agent };
enum class ParticipantGroup { G1, G2 };

std::string_view to_string(SystemArm a);
std::string_view to_string(ParticipantGroup g);
std::optional<SystemArm> parse_arm(std::string_view s);
std::optional<ParticipantGroup> parse_group(std::string_view s);

struct RecallScoreSheet {
    std::string entry_id;
    SystemArm arm = SystemArm::Baseline;
    std::optional<ParticipantGroup> group;
    std::array<int, 5> scores{};  // indexed by Dimension

    [[nodiscard]] int score(Dimension d) const { return scores[static_cast<std::size_t>(d)]; }
    [[nodiscard]] int total() const;
};

// JSON. ContextPrediction uses the prompt's output keys:
// {"Location": [...], "Emotion": "...", "People": "...", "Activity": [...]}.
void to_json(json& j, const ObjectTag& t);
void from_json(const json& j, ObjectTag& t);
void to_json(json& j, const ExtractedFeatures& f);
void from_json(const json& j, ExtractedFeatures& f);
void to_json(json& j, const Attachment& a);
void from_json(const json& j, Attachment& a);
void to_json(json& j, const ThreadNote& n);
void from_json(const json& j, ThreadNote& n);
void to_json(json& j, const DiaryEntry& e);
void from_json(const json& j, DiaryEntry& e);
json prediction_to_json(const ContextPrediction& p);
/// Strict reader for canonical prediction JSON (no repair). Throws
/// Error(InvalidPrediction) or Error(VocabularyViolation).
ContextPrediction prediction_from_json(const json& j);

}  // namespace cuediary
