#include "cuediary/domain.hpp"
#include "cuediary/error.hpp"
#include "cuediary/text.hpp"

#include "test_support.hpp"

#include <gtest/gtest.h>

using namespace cuediary;
using cuediary::testing::default_activities;
using cuediary::testing::sample_prediction;

namespace {

ErrorCode code_of(const std::function<void()>& fn) {
    try {
        fn();
    } catch (const Error& e) {
        return e.code();
    }
    ADD_FAILURE() << "expected an Error";
    return ErrorCode::InvalidArgument;
}

}  // namespace

TEST(Modality, ClassifiesPayloadCombinations) {
    EXPECT_EQ(classify_modality(true, {}), Modality::Text);
    EXPECT_EQ(classify_modality(true, {MediaKind::Image}), Modality::TextAndImage);
    EXPECT_EQ(classify_modality(true, {MediaKind::Image, MediaKind::Image}), Modality::TextAndImage);
    EXPECT_EQ(classify_modality(false, {MediaKind::Audio}), Modality::Audio);
    EXPECT_EQ(classify_modality(false, {MediaKind::Image}), Modality::Image);
    EXPECT_EQ(classify_modality(false, {MediaKind::Video}), Modality::Video);
    EXPECT_EQ(code_of([] { classify_modality(false, {}); }), ErrorCode::EmptyPost);
    EXPECT_EQ(code_of([] { classify_modality(false, {MediaKind::Audio, MediaKind::Image}); }),
              ErrorCode::MixedUnsupported);
    EXPECT_EQ(code_of([] { classify_modality(true, {MediaKind::Video}); }), ErrorCode::MixedUnsupported);
}

TEST(Vocabulary, EveryLabelRoundTrips) {
    for (auto e : kAllEmotions) {
        EXPECT_EQ(parse_emotion(to_string(e)), e);
        EXPECT_EQ(emotion_from_string(text::to_lower(std::string(to_string(e)))), e);
    }
    for (auto p : kAllPeople) {
        EXPECT_EQ(parse_people(to_string(p)), p);
        EXPECT_EQ(people_from_string("  " + std::string(to_string(p)) + " "), p);
    }
    for (auto d : kAllDimensions) EXPECT_EQ(parse_dimension(to_string(d)), d);
}

TEST(Vocabulary, OutOfVocabularyStringsFail) {
    for (const char* bad : {"Happy", "", "Positive!", "neutral-ish", "Colleague"}) {
        EXPECT_FALSE(parse_emotion(bad)) << bad;
        EXPECT_FALSE(parse_people(bad)) << bad;
    }
    EXPECT_EQ(code_of([] { emotion_from_string("Happy"); }), ErrorCode::VocabularyViolation);
    EXPECT_EQ(code_of([] { people_from_string("Strangers"); }), ErrorCode::VocabularyViolation);
}

TEST(ContextPrediction, AcceptsTheWorkedExample) {
    const auto p = sample_prediction();
    EXPECT_EQ(p.locations().size(), 3u);
    EXPECT_EQ(p.locations()[0], "Library");
    EXPECT_EQ(p.activities().size(), 6u);
    EXPECT_FALSE(p.manual_mode());
}

TEST(ContextPrediction, RejectsBadCardinalityAndLengths) {
    auto acts = default_activities();
    EXPECT_EQ(code_of([&] { ContextPrediction::make({"A", "B"}, EmotionLabel::Neutral, PeopleLabel::Alone, acts); }),
              ErrorCode::InvalidPrediction);
    EXPECT_EQ(code_of([&] {
                  ContextPrediction::make({"A", "B", "C", "D"}, EmotionLabel::Neutral, PeopleLabel::Alone, acts);
              }),
              ErrorCode::InvalidPrediction);
    EXPECT_EQ(code_of([&] { ContextPrediction::make({"A", "", "C"}, EmotionLabel::Neutral, PeopleLabel::Alone, acts); }),
              ErrorCode::InvalidPrediction);

    auto long_act = acts;
    long_act[2] = std::string(152, 'a');
    EXPECT_EQ(code_of([&] {
                  ContextPrediction::make({"A", "B", "C"}, EmotionLabel::Neutral, PeopleLabel::Alone, long_act);
              }),
              ErrorCode::InvalidPrediction);
    long_act[2] = std::string(151, 'a');
    EXPECT_NO_THROW(ContextPrediction::make({"A", "B", "C"}, EmotionLabel::Neutral, PeopleLabel::Alone, long_act));

    auto dup = acts;
    dup[5] = dup[0];
    EXPECT_EQ(code_of([&] { ContextPrediction::make({"A", "B", "C"}, EmotionLabel::Neutral, PeopleLabel::Alone, dup); }),
              ErrorCode::InvalidPrediction);

    auto five = acts;
    five.pop_back();
    EXPECT_EQ(code_of([&] { ContextPrediction::make({"A", "B", "C"}, EmotionLabel::Neutral, PeopleLabel::Alone, five); }),
              ErrorCode::InvalidPrediction);
}

TEST(ContextPrediction, LimitCountsScalarValues) {
    // 151 two-byte characters are 302 bytes but still within the limit.
    std::string wide;
    for (int i = 0; i < 151; ++i) wide += "\xC3\xA9";
    auto acts = default_activities();
    acts[0] = wide;
    EXPECT_NO_THROW(ContextPrediction::make({"A", "B", "C"}, EmotionLabel::Neutral, PeopleLabel::Alone, acts));
}

TEST(ContextPrediction, ManualFallbackShape) {
    const auto p = ContextPrediction::manual_fallback();
    EXPECT_TRUE(p.manual_mode());
    EXPECT_TRUE(p.locations().empty());
    EXPECT_TRUE(p.activities().empty());
    EXPECT_EQ(p.emotion(), EmotionLabel::Neutral);
    EXPECT_EQ(p.people(), PeopleLabel::Alone);
}

TEST(ContextPrediction, JsonUsesPromptKeys) {
    const auto j = prediction_to_json(sample_prediction());
    EXPECT_EQ(j.at("Location").size(), 3u);
    EXPECT_EQ(j.at("Emotion"), "Positive");
    EXPECT_EQ(j.at("People"), "Colleagues");
    EXPECT_EQ(j.at("Activity").size(), 6u);
    EXPECT_FALSE(j.contains("ManualMode"));
    EXPECT_EQ(prediction_from_json(j), sample_prediction());

    const auto manual = prediction_to_json(ContextPrediction::manual_fallback());
    EXPECT_TRUE(manual.at("ManualMode").get<bool>());
    EXPECT_EQ(prediction_from_json(manual), ContextPrediction::manual_fallback());
}

TEST(Features, SortTagsIsStableAndDescending) {
    ExtractedFeatures f;
    f.object_tags = {{"a", 0.5}, {"b", 0.9}, {"c", 0.5}, {"d", 0.95}};
    f.sort_tags();
    ASSERT_EQ(f.object_tags.size(), 4u);
    EXPECT_EQ(f.object_tags[0].label, "d");
    EXPECT_EQ(f.object_tags[1].label, "b");
    EXPECT_EQ(f.object_tags[2].label, "a");
    EXPECT_EQ(f.object_tags[3].label, "c");
}

TEST(Entry, JsonRoundTripPreservesEverything) {
    auto e = cuediary::testing::text_entry("kayaking with friends");
    e.modality = Modality::TextAndImage;
    e.attachments.push_back({MediaKind::Image, "image/jpeg", std::string(64, 'a'), 1234});
    ExtractedFeatures f;
    f.object_tags = {{"kayak", 0.93}, {"river", 0.1 + 0.2}};
    f.caption = "two people kayaking";
    e.features = f;
    e.notes.push_back({parse_utc("2023-03-06T15:00:00.000Z"), "forgot: this was at the lake"});
    e.notes.push_back({parse_utc("2023-03-06T15:01:00.000Z"), "second note"});

    const json j = e;
    const auto back = j.get<DiaryEntry>();
    EXPECT_EQ(back, e);
    EXPECT_EQ(json(back).dump(), j.dump());
    EXPECT_EQ(back.notes[1].text, "second note");
}

TEST(ScoreSheet, TotalIsTheSum) {
    RecallScoreSheet s;
    s.scores = {2, 1, 0, 2, 1};
    EXPECT_EQ(s.total(), 6);
    EXPECT_EQ(s.score(Dimension::Location), 1);
}
