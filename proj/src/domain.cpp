#include "cuediary/domain.hpp"

#include "cuediary/error.hpp"
#include "cuediary/text.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <set>

namespace cuediary {

namespace {

template <typename Enum, std::size_t N>
std::optional<Enum> parse_enum(std::string_view s, const std::array<Enum, N>& values) {
    const std::string needle = text::trim(s);
    for (Enum v : values) {
        if (text::iequals(needle, to_string(v))) return v;
    }
    return std::nullopt;
}

constexpr std::array<MediaKind, 3> kAllKinds = {MediaKind::Image, MediaKind::Video, MediaKind::Audio};
constexpr std::array<Modality, 5> kAllModalities = {Modality::Text, Modality::Image, Modality::Video,
                                                    Modality::Audio, Modality::TextAndImage};

}  // namespace

std::string_view to_string(ErrorCode code) noexcept {
    switch (code) {
        case ErrorCode::EmptyPost: return "EmptyPost";
        case ErrorCode::MixedUnsupported: return "MixedUnsupported";
        case ErrorCode::UnknownChannel: return "UnknownChannel";
        case ErrorCode::UnknownEntry: return "UnknownEntry";
        case ErrorCode::PayloadTooLarge: return "PayloadTooLarge";
        case ErrorCode::UnsupportedMime: return "UnsupportedMime";
        case ErrorCode::ProviderTimeout: return "ProviderTimeout";
        case ErrorCode::ProviderRejected: return "ProviderRejected";
        case ErrorCode::UndecodableMedia: return "UndecodableMedia";
        case ErrorCode::EmptyTranscript: return "EmptyTranscript";
        case ErrorCode::NoUsableContent: return "NoUsableContent";
        case ErrorCode::LlmTimeout: return "LlmTimeout";
        case ErrorCode::MalformedOutput: return "MalformedOutput";
        case ErrorCode::Unparseable: return "Unparseable";
        case ErrorCode::VocabularyViolation: return "VocabularyViolation";
        case ErrorCode::InvalidPrediction: return "InvalidPrediction";
        case ErrorCode::UnknownMemo: return "UnknownMemo";
        case ErrorCode::MemoNotReady: return "MemoNotReady";
        case ErrorCode::MemoSubmitted: return "MemoSubmitted";
        case ErrorCode::UnknownOption: return "UnknownOption";
        case ErrorCode::IncompleteMemo: return "IncompleteMemo";
        case ErrorCode::PageOutOfRange: return "PageOutOfRange";
        case ErrorCode::EmptyInput: return "EmptyInput";
        case ErrorCode::UnsubmittedMemo: return "UnsubmittedMemo";
        case ErrorCode::ScoreOutOfRange: return "ScoreOutOfRange";
        case ErrorCode::EmptyGroup: return "EmptyGroup";
        case ErrorCode::MissingGroupLabel: return "MissingGroupLabel";
        case ErrorCode::UnknownStudy: return "UnknownStudy";
        case ErrorCode::StorageUnavailable: return "StorageUnavailable";
        case ErrorCode::CorruptRecord: return "CorruptRecord";
        case ErrorCode::InvalidArgument: return "InvalidArgument";
    }
    return "Unknown";
}

std::string_view to_string(MediaKind k) {
    switch (k) {
        case MediaKind::Image: return "Image";
        case MediaKind::Video: return "Video";
        case MediaKind::Audio: return "Audio";
    }
    return "Image";
}

std::string_view to_string(Modality m) {
    switch (m) {
        case Modality::Text: return "Text";
        case Modality::Image: return "Image";
        case Modality::Video: return "Video";
        case Modality::Audio: return "Audio";
        case Modality::TextAndImage: return "TextAndImage";
    }
    return "Text";
}

std::string_view to_string(EmotionLabel e) {
    switch (e) {
        case EmotionLabel::Positive: return "Positive";
        case EmotionLabel::Neutral: return "Neutral";
        case EmotionLabel::Negative: return "Negative";
    }
    return "Neutral";
}

std::string_view to_string(PeopleLabel p) {
    switch (p) {
        case PeopleLabel::Alone: return "Alone";
        case PeopleLabel::Families: return "Families";
        case PeopleLabel::Friends: return "Friends";
        case PeopleLabel::Colleagues: return "Colleagues";
        case PeopleLabel::Acquaintances: return "Acquaintances";
    }
    return "Alone";
}

std::string_view to_string(Dimension d) {
    switch (d) {
        case Dimension::Time: return "Time";
        case Dimension::Location: return "Location";
        case Dimension::People: return "People";
        case Dimension::Emotion: return "Emotion";
        case Dimension::Activity: return "Activity";
    }
    return "Time";
}

std::string_view to_string(SystemArm a) {
    return a == SystemArm::Baseline ? "Baseline" : "Agent";
}

std::string_view to_string(ParticipantGroup g) {
    return g == ParticipantGroup::G1 ? "G1" : "G2";
}

std::optional<MediaKind> parse_media_kind(std::string_view s) { return parse_enum(s, kAllKinds); }
std::optional<Modality> parse_modality(std::string_view s) { return parse_enum(s, kAllModalities); }
std::optional<EmotionLabel> parse_emotion(std::string_view s) { return parse_enum(s, kAllEmotions); }
std::optional<PeopleLabel> parse_people(std::string_view s) { return parse_enum(s, kAllPeople); }
std::optional<Dimension> parse_dimension(std::string_view s) { return parse_enum(s, kAllDimensions); }

std::optional<SystemArm> parse_arm(std::string_view s) {
    return parse_enum(s, std::array{SystemArm::Baseline, SystemArm::Agent});
}

std::optional<ParticipantGroup> parse_group(std::string_view s) {
    return parse_enum(s, std::array{ParticipantGroup::G1, ParticipantGroup::G2});
}

EmotionLabel emotion_from_string(std::string_view s) {
    if (auto e = parse_emotion(s)) return *e;
    throw Error(ErrorCode::VocabularyViolation, fmt::format("'{}' is not an emotion label", s), "Emotion");
}

PeopleLabel people_from_string(std::string_view s) {
    if (auto p = parse_people(s)) return *p;
    throw Error(ErrorCode::VocabularyViolation, fmt::format("'{}' is not a people label", s), "People");
}

Modality classify_modality(bool text_present, const std::vector<MediaKind>& attachment_kinds) {
    if (!text_present && attachment_kinds.empty()) {
        throw Error(ErrorCode::EmptyPost, "post has neither text nor attachments");
    }
    if (attachment_kinds.empty()) return Modality::Text;

    const MediaKind first = attachment_kinds.front();
    const bool single_kind = std::all_of(attachment_kinds.begin(), attachment_kinds.end(),
                                         [first](MediaKind k) { return k == first; });
    if (!single_kind) {
        throw Error(ErrorCode::MixedUnsupported, "post mixes different media kinds");
    }
    switch (first) {
        case MediaKind::Image: return text_present ? Modality::TextAndImage : Modality::Image;
        case MediaKind::Video:
        case MediaKind::Audio:
            if (text_present) {
                throw Error(ErrorCode::MixedUnsupported,
                            fmt::format("{} cannot be combined with a text body", to_string(first)));
            }
            return first == MediaKind::Video ? Modality::Video : Modality::Audio;
    }
    throw Error(ErrorCode::MixedUnsupported, "unrecognised media kind");
}

void ExtractedFeatures::sort_tags() {
    std::stable_sort(object_tags.begin(), object_tags.end(),
                     [](const ObjectTag& a, const ObjectTag& b) { return a.confidence > b.confidence; });
}

ContextPrediction ContextPrediction::make(std::vector<std::string> locations, EmotionLabel emotion,
                                          PeopleLabel people, std::vector<std::string> activities) {
    if (locations.size() != kLocationCount) {
        throw Error(ErrorCode::InvalidPrediction,
                    fmt::format("expected {} locations, got {}", kLocationCount, locations.size()),
                    "Location");
    }
    for (const auto& loc : locations) {
        const auto chars = text::scalar_count(loc);
        if (loc.empty() || !chars || *chars > kLocationCharLimit) {
            throw Error(ErrorCode::InvalidPrediction, fmt::format("invalid location '{}'", loc), "Location");
        }
    }
    if (activities.size() != kActivityCount) {
        throw Error(ErrorCode::InvalidPrediction,
                    fmt::format("expected {} activities, got {}", kActivityCount, activities.size()),
                    "Activity");
    }
    std::set<std::string_view> seen;
    for (const auto& act : activities) {
        const auto chars = text::scalar_count(act);
        if (act.empty() || !chars || *chars > kActivityCharLimit) {
            throw Error(ErrorCode::InvalidPrediction, fmt::format("invalid activity '{}'", act), "Activity");
        }
        if (!seen.insert(act).second) {
            throw Error(ErrorCode::InvalidPrediction, fmt::format("duplicate activity '{}'", act), "Activity");
        }
    }
    ContextPrediction p;
    p.locations_ = std::move(locations);
    p.emotion_ = emotion;
    p.people_ = people;
    p.activities_ = std::move(activities);
    return p;
}

ContextPrediction ContextPrediction::manual_fallback() {
    ContextPrediction p;
    p.emotion_ = EmotionLabel::Neutral;
    p.people_ = PeopleLabel::Alone;
    p.manual_mode_ = true;
    return p;
}

int RecallScoreSheet::total() const {
    int sum = 0;
    for (int s : scores) sum += s;
    return sum;
}

// ---- JSON -----------------------------------------------------------------

void to_json(json& j, const ObjectTag& t) {
    j = json{{"label", t.label}, {"confidence", t.confidence}};
}

void from_json(const json& j, ObjectTag& t) {
    j.at("label").get_to(t.label);
    j.at("confidence").get_to(t.confidence);
}

void to_json(json& j, const ExtractedFeatures& f) {
    j = json::object();
    j["object_tags"] = f.object_tags;
    if (f.caption) j["caption"] = *f.caption;
    if (f.transcript) j["transcript"] = *f.transcript;
}

void from_json(const json& j, ExtractedFeatures& f) {
    f = {};
    if (j.contains("object_tags")) j.at("object_tags").get_to(f.object_tags);
    if (j.contains("caption")) f.caption = j.at("caption").get<std::string>();
    if (j.contains("transcript")) f.transcript = j.at("transcript").get<std::string>();
}

void to_json(json& j, const Attachment& a) {
    j = json{{"kind", to_string(a.kind)}, {"mime", a.mime}, {"sha256", a.sha256}, {"size_bytes", a.size_bytes}};
}

void from_json(const json& j, Attachment& a) {
    const auto kind = parse_media_kind(j.at("kind").get<std::string>());
    if (!kind) throw Error(ErrorCode::CorruptRecord, "unknown attachment kind");
    a.kind = *kind;
    j.at("mime").get_to(a.mime);
    j.at("sha256").get_to(a.sha256);
    j.at("size_bytes").get_to(a.size_bytes);
}

void to_json(json& j, const ThreadNote& n) {
    j = json{{"at", format_utc(n.at)}, {"text", n.text}};
}

void from_json(const json& j, ThreadNote& n) {
    n.at = parse_utc(j.at("at").get<std::string>());
    j.at("text").get_to(n.text);
}

void to_json(json& j, const DiaryEntry& e) {
    j = json::object();
    j["entry_id"] = e.entry_id;
    j["channel_id"] = e.channel_id;
    j["participant_id"] = e.participant_id;
    j["created_at"] = format_utc(e.created_at);
    j["utc_offset_minutes"] = e.utc_offset_minutes;
    j["modality"] = to_string(e.modality);
    if (e.text_body) j["text_body"] = *e.text_body;
    j["attachments"] = e.attachments;
    if (e.features) j["features"] = *e.features;
    j["notes"] = e.notes;
}

void from_json(const json& j, DiaryEntry& e) {
    e = {};
    j.at("entry_id").get_to(e.entry_id);
    j.at("channel_id").get_to(e.channel_id);
    j.at("participant_id").get_to(e.participant_id);
    e.created_at = parse_utc(j.at("created_at").get<std::string>());
    j.at("utc_offset_minutes").get_to(e.utc_offset_minutes);
    const auto modality = parse_modality(j.at("modality").get<std::string>());
    if (!modality) throw Error(ErrorCode::CorruptRecord, "unknown modality");
    e.modality = *modality;
    if (j.contains("text_body")) e.text_body = j.at("text_body").get<std::string>();
    j.at("attachments").get_to(e.attachments);
    if (j.contains("features")) e.features = j.at("features").get<ExtractedFeatures>();
    if (j.contains("notes")) j.at("notes").get_to(e.notes);
}

json prediction_to_json(const ContextPrediction& p) {
    json j{{"Location", p.locations()},
           {"Emotion", to_string(p.emotion())},
           {"People", to_string(p.people())},
           {"Activity", p.activities()}};
    if (p.manual_mode()) j["ManualMode"] = true;
    return j;
}

ContextPrediction prediction_from_json(const json& j) {
    if (j.value("ManualMode", false)) return ContextPrediction::manual_fallback();
    return ContextPrediction::make(j.at("Location").get<std::vector<std::string>>(),
                                   emotion_from_string(j.at("Emotion").get<std::string>()),
                                   people_from_string(j.at("People").get<std::string>()),
                                   j.at("Activity").get<std::vector<std::string>>());
}

}  // namespace cuediary
