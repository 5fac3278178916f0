#pragma once

#include "cuediary/domain.hpp"

#include <optional>
#include <set>
#include <string>
#include <variant>
#include <vector>

namespace cuediary {

enum class MemoState { Pending, Generated, Submitted };

std::string_view to_string(MemoState s);
std::optional<MemoState> parse_memo_state(std::string_view s);

/// The agent's default choices, captured once at generation. This is the
/// reference for hit-ratio evaluation and never changes afterwards.
struct Preselection {
    std::optional<std::string> location;
    EmotionLabel emotion = EmotionLabel::Neutral;
    PeopleLabel people = PeopleLabel::Alone;
    std::optional<std::string> activity;

    bool operator==(const Preselection&) const = default;
};

struct Memo {
    std::string memo_id;
    std::string entry_id;
    std::string channel_id;
    std::string participant_id;
    MemoState state = MemoState::Pending;
    std::optional<ContextPrediction> prediction;
    std::optional<LocalDateTime> event_date_time;
    std::set<std::string> selected_locations;
    std::optional<std::string> location_addendum;
    EmotionLabel selected_emotion = EmotionLabel::Neutral;
    std::set<PeopleLabel> selected_people;
    std::set<std::string> selected_activities;
    std::optional<std::string> activity_addendum;
    std::optional<Preselection> preselected;
    std::optional<Timestamp> submitted_at;

    [[nodiscard]] bool manual_mode() const { return prediction && prediction->manual_mode(); }

    bool operator==(const Memo&) const = default;
};

namespace edit {
struct SetDateTime { LocalDateTime value; };
struct SelectLocation { std::string value; };
struct DeselectLocation { std::string value; };
struct SetLocationAddendum { std::string value; };
struct SetEmotion { EmotionLabel value; };
struct AddPeople { PeopleLabel value; };
struct RemovePeople { PeopleLabel value; };
struct SelectActivity { std::string value; };
struct DeselectActivity { std::string value; };
struct SetActivityAddendum { std::string value; };
}  // namespace edit

using MemoEdit = std::variant<edit::SetDateTime, edit::SelectLocation, edit::DeselectLocation,
                              edit::SetLocationAddendum, edit::SetEmotion, edit::AddPeople,
                              edit::RemovePeople, edit::SelectActivity, edit::DeselectActivity,
                              edit::SetActivityAddendum>;

struct Summary {
    std::string memo_id;
    std::vector<std::string> lines;  // Time, Location, Emotion, People, Activity

    [[nodiscard]] std::string text() const;
};

/// A memo in state Pending for an entry whose prediction is not ready yet.
Memo pending_memo(const DiaryEntry& entry);

/// Pending -> Generated with the default selections: the top location, the
/// predicted emotion and people category, and the top activity. Calling it on
/// a memo that is already Generated or Submitted returns the memo unchanged.
Memo generate_memo(const Memo& memo, const DiaryEntry& entry, const ContextPrediction& prediction);

/// Applies one edit to a Generated memo. Throws MemoNotReady (Pending),
/// MemoSubmitted, or UnknownOption when selecting a string that is not one of
/// the predicted options.
Memo apply_edit(const Memo& memo, const MemoEdit& e);

/// Generated -> Submitted. Throws MemoSubmitted on a second submit,
/// MemoNotReady for a Pending memo and IncompleteMemo (detail = dimension)
/// when people is empty, or a manual-mode memo lacks free text for Location
/// or Activity.
Memo submit_memo(const Memo& memo, Timestamp now);

/// Fixed-order lines "Time / Location / Emotion / People / Activity";
/// addenda follow the selections in parentheses.
Summary render_summary(const Memo& memo);

/// Activity options shown on form page 1 (first three) or 2 (last three).
std::vector<std::string> activity_page(const Memo& memo, int page);

// Canonical memo JSON: the prediction keys (Location, Emotion, People,
// Activity, ManualMode) plus DateTime, Selected, Preselected, Addenda, State.
json memo_to_json(const Memo& m);
Memo memo_from_json(const json& j);

json edit_to_json(const MemoEdit& e);
/// {"op": "SetEmotion", "value": "Positive"}. Throws Error(InvalidArgument)
/// or Error(VocabularyViolation).
MemoEdit edit_from_json(const json& j);

}  // namespace cuediary
