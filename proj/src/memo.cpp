#include "cuediary/memo.hpp"

#include "cuediary/error.hpp"
#include "cuediary/ids.hpp"

#include <fmt/format.h>

#include <algorithm>

namespace cuediary {

namespace {

template <class... Ts>
struct overloaded : Ts... {
    using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

void require_option(const std::vector<std::string>& options, const std::string& value,
                    std::string_view dimension) {
    if (std::find(options.begin(), options.end(), value) == options.end()) {
        throw Error(ErrorCode::UnknownOption,
                    fmt::format("'{}' is not one of the predicted {} options", value, dimension),
                    std::string(dimension));
    }
}

std::optional<std::string> non_empty(std::string s) {
    if (s.empty()) return std::nullopt;
    return s;
}

bool has_text(const std::optional<std::string>& s) {
    return s && s->find_first_not_of(" \t\r\n") != std::string::npos;
}

// Selected strings in predicted rank order.
std::vector<std::string> ranked(const std::vector<std::string>& options, const std::set<std::string>& chosen) {
    std::vector<std::string> out;
    for (const auto& o : options) {
        if (chosen.count(o)) out.push_back(o);
    }
    return out;
}

std::string line(std::string_view label, const std::vector<std::string>& values,
                 const std::optional<std::string>& addendum) {
    std::string body;
    for (std::size_t i = 0; i < values.size(); ++i) {
        if (i) body += ", ";
        body += values[i];
    }
    if (has_text(addendum)) {
        if (!body.empty()) body += " ";
        body += "(" + *addendum + ")";
    }
    if (body.empty()) body = "-";
    return fmt::format("{}: {}", label, body);
}

}  // namespace

std::string_view to_string(MemoState s) {
    switch (s) {
        case MemoState::Pending: return "Pending";
        case MemoState::Generated: return "Generated";
        case MemoState::Submitted: return "Submitted";
    }
    return "Pending";
}

std::optional<MemoState> parse_memo_state(std::string_view s) {
    for (auto st : {MemoState::Pending, MemoState::Generated, MemoState::Submitted}) {
        if (s == to_string(st)) return st;
    }
    return std::nullopt;
}

std::string Summary::text() const {
    std::string out;
    for (const auto& l : lines) {
        out += l;
        out += '\n';
    }
    return out;
}

Memo pending_memo(const DiaryEntry& entry) {
    Memo m;
    m.memo_id = memo_id_for_entry(entry.entry_id);
    m.entry_id = entry.entry_id;
    m.channel_id = entry.channel_id;
    m.participant_id = entry.participant_id;
    m.state = MemoState::Pending;
    return m;
}

Memo generate_memo(const Memo& memo, const DiaryEntry& entry, const ContextPrediction& prediction) {
    if (memo.state != MemoState::Pending) return memo;
    if (memo.entry_id != entry.entry_id) {
        throw Error(ErrorCode::UnknownEntry, fmt::format("memo {} does not belong to entry {}",
                                                         memo.memo_id, entry.entry_id));
    }
    Memo m = memo;
    m.state = MemoState::Generated;
    m.prediction = prediction;
    m.event_date_time = entry.local_created_at();

    Preselection pre;
    pre.emotion = prediction.emotion();
    pre.people = prediction.people();
    if (!prediction.locations().empty()) pre.location = prediction.locations().front();
    if (!prediction.activities().empty()) pre.activity = prediction.activities().front();

    m.selected_locations.clear();
    if (pre.location) m.selected_locations.insert(*pre.location);
    m.selected_emotion = pre.emotion;
    m.selected_people = {pre.people};
    m.selected_activities.clear();
    if (pre.activity) m.selected_activities.insert(*pre.activity);
    m.preselected = pre;
    return m;
}

Memo apply_edit(const Memo& memo, const MemoEdit& e) {
    if (memo.state == MemoState::Submitted) {
        throw Error(ErrorCode::MemoSubmitted, fmt::format("memo {} is already submitted", memo.memo_id));
    }
    if (memo.state == MemoState::Pending || !memo.prediction) {
        throw Error(ErrorCode::MemoNotReady, fmt::format("memo {} has not been generated yet", memo.memo_id));
    }
    Memo m = memo;
    const auto& prediction = *m.prediction;
    std::visit(overloaded{
                   [&](const edit::SetDateTime& x) { m.event_date_time = x.value; },
                   [&](const edit::SelectLocation& x) {
                       require_option(prediction.locations(), x.value, "Location");
                       m.selected_locations.insert(x.value);
                   },
                   [&](const edit::DeselectLocation& x) { m.selected_locations.erase(x.value); },
                   [&](const edit::SetLocationAddendum& x) { m.location_addendum = non_empty(x.value); },
                   [&](const edit::SetEmotion& x) { m.selected_emotion = x.value; },
                   [&](const edit::AddPeople& x) { m.selected_people.insert(x.value); },
                   [&](const edit::RemovePeople& x) { m.selected_people.erase(x.value); },
                   [&](const edit::SelectActivity& x) {
                       require_option(prediction.activities(), x.value, "Activity");
                       m.selected_activities.insert(x.value);
                   },
                   [&](const edit::DeselectActivity& x) { m.selected_activities.erase(x.value); },
                   [&](const edit::SetActivityAddendum& x) { m.activity_addendum = non_empty(x.value); },
               },
               e);
    return m;
}

Memo submit_memo(const Memo& memo, Timestamp now) {
    if (memo.state == MemoState::Submitted) {
        throw Error(ErrorCode::MemoSubmitted, fmt::format("memo {} is already submitted", memo.memo_id));
    }
    if (memo.state == MemoState::Pending) {
        throw Error(ErrorCode::MemoNotReady, fmt::format("memo {} has not been generated yet", memo.memo_id));
    }
    if (memo.selected_people.empty()) {
        throw Error(ErrorCode::IncompleteMemo, "at least one people category is required", "People");
    }
    if (memo.manual_mode()) {
        if (memo.selected_locations.empty() && !has_text(memo.location_addendum)) {
            throw Error(ErrorCode::IncompleteMemo, "describe the location in free text", "Location");
        }
        if (memo.selected_activities.empty() && !has_text(memo.activity_addendum)) {
            throw Error(ErrorCode::IncompleteMemo, "describe the activity in free text", "Activity");
        }
    }
    Memo m = memo;
    m.state = MemoState::Submitted;
    m.submitted_at = now;
    return m;
}

Summary render_summary(const Memo& memo) {
    Summary s;
    s.memo_id = memo.memo_id;
    const std::vector<std::string> none;
    const auto& locations = memo.prediction ? memo.prediction->locations() : none;
    const auto& activities = memo.prediction ? memo.prediction->activities() : none;

    std::string when = "-";
    if (memo.event_date_time) {
        when = format_local(*memo.event_date_time).substr(0, 16);
        when[10] = ' ';
    }
    std::vector<std::string> people;
    for (auto p : memo.selected_people) people.emplace_back(to_string(p));

    s.lines.push_back(fmt::format("Time: {}", when));
    s.lines.push_back(line("Location", ranked(locations, memo.selected_locations), memo.location_addendum));
    s.lines.push_back(fmt::format("Emotion: {}", to_string(memo.selected_emotion)));
    s.lines.push_back(line("People", people, std::nullopt));
    s.lines.push_back(line("Activity", ranked(activities, memo.selected_activities), memo.activity_addendum));
    return s;
}

std::vector<std::string> activity_page(const Memo& memo, int page) {
    if (page != 1 && page != 2) {
        throw Error(ErrorCode::PageOutOfRange, fmt::format("activity page {} does not exist", page));
    }
    if (!memo.prediction) {
        throw Error(ErrorCode::MemoNotReady, fmt::format("memo {} has not been generated yet", memo.memo_id));
    }
    const auto& acts = memo.prediction->activities();
    const std::size_t begin = page == 1 ? 0 : 3;
    const std::size_t end = std::min<std::size_t>(begin + 3, acts.size());
    if (begin >= end) return {};
    return {acts.begin() + static_cast<std::ptrdiff_t>(begin), acts.begin() + static_cast<std::ptrdiff_t>(end)};
}

// ---- JSON -----------------------------------------------------------------

json memo_to_json(const Memo& m) {
    json j = json::object();
    j["MemoId"] = m.memo_id;
    j["EntryId"] = m.entry_id;
    j["ChannelId"] = m.channel_id;
    j["ParticipantId"] = m.participant_id;
    j["State"] = to_string(m.state);
    if (m.prediction) j.update(prediction_to_json(*m.prediction));
    if (m.event_date_time) j["DateTime"] = format_local(*m.event_date_time);

    if (m.state != MemoState::Pending) {
        std::vector<std::string> people;
        for (auto p : m.selected_people) people.emplace_back(to_string(p));
        j["Selected"] = json{{"Location", m.selected_locations},
                             {"Emotion", to_string(m.selected_emotion)},
                             {"People", people},
                             {"Activity", m.selected_activities}};
        json addenda = json::object();
        if (m.location_addendum) addenda["Location"] = *m.location_addendum;
        if (m.activity_addendum) addenda["Activity"] = *m.activity_addendum;
        j["Addenda"] = addenda;
    }
    if (m.preselected) {
        const auto& p = *m.preselected;
        j["Preselected"] = json{{"Location", p.location ? json(*p.location) : json(nullptr)},
                                {"Emotion", to_string(p.emotion)},
                                {"People", to_string(p.people)},
                                {"Activity", p.activity ? json(*p.activity) : json(nullptr)}};
    }
    if (m.submitted_at) j["SubmittedAt"] = format_utc(*m.submitted_at);
    return j;
}

Memo memo_from_json(const json& j) {
    Memo m;
    j.at("MemoId").get_to(m.memo_id);
    j.at("EntryId").get_to(m.entry_id);
    j.at("ChannelId").get_to(m.channel_id);
    j.at("ParticipantId").get_to(m.participant_id);
    const auto state = parse_memo_state(j.at("State").get<std::string>());
    if (!state) throw Error(ErrorCode::CorruptRecord, "unknown memo state");
    m.state = *state;
    if (j.contains("Emotion") || j.contains("ManualMode")) m.prediction = prediction_from_json(j);
    if (j.contains("DateTime")) m.event_date_time = parse_local(j.at("DateTime").get<std::string>());
    if (j.contains("Selected")) {
        const auto& s = j.at("Selected");
        m.selected_locations = s.at("Location").get<std::set<std::string>>();
        m.selected_emotion = emotion_from_string(s.at("Emotion").get<std::string>());
        for (const auto& p : s.at("People")) m.selected_people.insert(people_from_string(p.get<std::string>()));
        m.selected_activities = s.at("Activity").get<std::set<std::string>>();
    }
    if (j.contains("Addenda")) {
        const auto& a = j.at("Addenda");
        if (a.contains("Location")) m.location_addendum = a.at("Location").get<std::string>();
        if (a.contains("Activity")) m.activity_addendum = a.at("Activity").get<std::string>();
    }
    if (j.contains("Preselected")) {
        const auto& p = j.at("Preselected");
        Preselection pre;
        if (!p.at("Location").is_null()) pre.location = p.at("Location").get<std::string>();
        pre.emotion = emotion_from_string(p.at("Emotion").get<std::string>());
        pre.people = people_from_string(p.at("People").get<std::string>());
        if (!p.at("Activity").is_null()) pre.activity = p.at("Activity").get<std::string>();
        m.preselected = pre;
    }
    if (j.contains("SubmittedAt")) m.submitted_at = parse_utc(j.at("SubmittedAt").get<std::string>());
    return m;
}

json edit_to_json(const MemoEdit& e) {
    return std::visit(
        overloaded{
            [](const edit::SetDateTime& x) { return json{{"op", "SetDateTime"}, {"value", format_local(x.value)}}; },
            [](const edit::SelectLocation& x) { return json{{"op", "SelectLocation"}, {"value", x.value}}; },
            [](const edit::DeselectLocation& x) { return json{{"op", "DeselectLocation"}, {"value", x.value}}; },
            [](const edit::SetLocationAddendum& x) { return json{{"op", "SetLocationAddendum"}, {"value", x.value}}; },
            [](const edit::SetEmotion& x) { return json{{"op", "SetEmotion"}, {"value", to_string(x.value)}}; },
            [](const edit::AddPeople& x) { return json{{"op", "AddPeople"}, {"value", to_string(x.value)}}; },
            [](const edit::RemovePeople& x) { return json{{"op", "RemovePeople"}, {"value", to_string(x.value)}}; },
            [](const edit::SelectActivity& x) { return json{{"op", "SelectActivity"}, {"value", x.value}}; },
            [](const edit::DeselectActivity& x) { return json{{"op", "DeselectActivity"}, {"value", x.value}}; },
            [](const edit::SetActivityAddendum& x) { return json{{"op", "SetActivityAddendum"}, {"value", x.value}}; },
        },
        e);
}

MemoEdit edit_from_json(const json& j) {
    if (!j.is_object() || !j.contains("op") || !j.at("op").is_string() || !j.contains("value") ||
        !j.at("value").is_string()) {
        throw Error(ErrorCode::InvalidArgument, "edit must be {\"op\": string, \"value\": string}");
    }
    const auto op = j.at("op").get<std::string>();
    const auto value = j.at("value").get<std::string>();
    if (op == "SetDateTime") return edit::SetDateTime{parse_local(value)};
    if (op == "SelectLocation") return edit::SelectLocation{value};
    if (op == "DeselectLocation") return edit::DeselectLocation{value};
    if (op == "SetLocationAddendum") return edit::SetLocationAddendum{value};
    if (op == "SetEmotion") return edit::SetEmotion{emotion_from_string(value)};
    if (op == "AddPeople") return edit::AddPeople{people_from_string(value)};
    if (op == "RemovePeople") return edit::RemovePeople{people_from_string(value)};
    if (op == "SelectActivity") return edit::SelectActivity{value};
    if (op == "DeselectActivity") return edit::DeselectActivity{value};
    if (op == "SetActivityAddendum") return edit::SetActivityAddendum{value};
    throw Error(ErrorCode::InvalidArgument, fmt::format("unknown edit op '{}'", op));
}

}  // namespace cuediary
