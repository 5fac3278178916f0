#include "cuediary/error.hpp"
#include "cuediary/predictor.hpp"
#include "cuediary/text.hpp"

#include <fmt/format.h>

#include <regex>
#include <set>

namespace cuediary {

namespace {

struct Rejected {
    Violation violation;
};

[[noreturn]] void reject(ErrorCode code, std::string dimension, std::string value) {
    throw Rejected{Violation{code, std::move(dimension), std::move(value)}};
}

std::string_view strip_code_fences(std::string_view raw) {
    const auto open = raw.find("```");
    if (open == std::string_view::npos) return raw;
    auto body_start = raw.find('\n', open);
    if (body_start == std::string_view::npos) return raw.substr(open + 3);
    ++body_start;
    const auto close = raw.find("```", body_start);
    return raw.substr(body_start, close == std::string_view::npos ? std::string_view::npos : close - body_start);
}

bool is_structural(char c) {
    return c == '{' || c == '}' || c == '[' || c == ']' || c == ':' || c == ',';
}

bool is_json_literal(const std::string& token) {
    static const std::regex number(R"(-?(0|[1-9][0-9]*)(\.[0-9]+)?([eE][+-]?[0-9]+)?)");
    return token == "true" || token == "false" || token == "null" || std::regex_match(token, number);
}

// Rewrites the object so that bare tokens and single-quoted strings become
// double-quoted JSON strings. Structure is left alone.
std::string quote_bare_tokens(std::string_view s) {
    std::string out;
    out.reserve(s.size() + 32);
    std::size_t i = 0;
    while (i < s.size()) {
        const char c = s[i];
        if (c == '"') {
            const std::size_t start = i++;
            while (i < s.size() && s[i] != '"') i += (s[i] == '\\' && i + 1 < s.size()) ? 2 : 1;
            i = std::min(i + 1, s.size());
            out.append(s.substr(start, i - start));
        } else if (c == '\'') {
            std::string body;
            ++i;
            while (i < s.size() && s[i] != '\'') body.push_back(s[i++]);
            ++i;
            out += json(body).dump();
        } else if (is_structural(c) || std::isspace(static_cast<unsigned char>(c))) {
            out.push_back(c);
            ++i;
        } else {
            const std::size_t start = i;
            while (i < s.size() && !is_structural(s[i]) && s[i] != '"') ++i;
            const std::string token = text::trim(s.substr(start, i - start));
            out += is_json_literal(token) ? token : json(token).dump();
        }
    }
    return out;
}

const json* find_key(const json& obj, std::initializer_list<std::string_view> names) {
    for (auto it = obj.begin(); it != obj.end(); ++it) {
        for (auto n : names) {
            if (text::iequals(text::trim(it.key()), n)) return &it.value();
        }
    }
    return nullptr;
}

template <typename Enum, std::size_t N>
std::optional<Enum> nearest_label(const std::string& value, const std::array<Enum, N>& vocab,
                                  std::vector<std::string>& notes, std::string_view dimension) {
    const std::string t = text::to_lower(text::trim(value));
    for (Enum v : vocab) {
        if (t == text::to_lower(to_string(v))) {
            if (text::trim(value) != to_string(v)) {
                notes.push_back(fmt::format("{}: normalised '{}' to '{}'", dimension, value, to_string(v)));
            }
            return v;
        }
    }
    for (Enum v : vocab) {
        const std::string l = text::to_lower(to_string(v));
        const bool plural = t + "s" == l || l + "s" == t ||
                            (t.size() > 1 && t.back() == 'y' && t.substr(0, t.size() - 1) + "ies" == l) ||
                            (l.size() > 3 && l.ends_with("ies") && l.substr(0, l.size() - 3) + "y" == t);
        if (plural) {
            notes.push_back(fmt::format("{}: mapped '{}' to '{}'", dimension, value, to_string(v)));
            return v;
        }
    }
    if (t.size() >= 4) {
        std::optional<Enum> best;
        int hits = 0;
        for (Enum v : vocab) {
            if (text::edit_distance(t, text::to_lower(to_string(v))) <= 1) {
                best = v;
                ++hits;
            }
        }
        if (hits == 1) {
            notes.push_back(fmt::format("{}: corrected '{}' to '{}'", dimension, value, to_string(*best)));
            return best;
        }
    }
    return std::nullopt;
}

template <typename Enum, std::size_t N>
Enum read_label(const json& obj, std::initializer_list<std::string_view> keys, const std::array<Enum, N>& vocab,
                std::string_view dimension, std::vector<std::string>& notes) {
    const json* v = find_key(obj, keys);
    if (v == nullptr) reject(ErrorCode::VocabularyViolation, std::string(dimension), "<missing>");
    const json* scalar = v;
    if (v->is_array() && !v->empty()) {
        notes.push_back(fmt::format("{}: took the first of {} values", dimension, v->size()));
        scalar = &v->front();
    }
    if (!scalar->is_string()) reject(ErrorCode::VocabularyViolation, std::string(dimension), scalar->dump());
    const auto s = scalar->get<std::string>();
    if (auto label = nearest_label(s, vocab, notes, dimension)) return *label;
    reject(ErrorCode::VocabularyViolation, std::string(dimension), s);
}

std::vector<std::string> read_list(const json& obj, std::initializer_list<std::string_view> keys,
                                   std::string_view dimension, std::size_t want,
                                   std::vector<std::string>& notes) {
    const json* v = find_key(obj, keys);
    if (v == nullptr) reject(ErrorCode::VocabularyViolation, std::string(dimension), "<missing>");
    if (!v->is_array()) reject(ErrorCode::VocabularyViolation, std::string(dimension), v->dump());

    std::vector<std::string> items;
    std::set<std::string> seen;
    for (const auto& item : *v) {
        if (!item.is_string()) reject(ErrorCode::VocabularyViolation, std::string(dimension), item.dump());
        std::string s = text::trim(item.get<std::string>());
        if (s.empty()) {
            notes.push_back(fmt::format("{}: dropped an empty option", dimension));
            continue;
        }
        if (!seen.insert(s).second) {
            notes.push_back(fmt::format("{}: dropped duplicate '{}'", dimension, s));
            continue;
        }
        items.push_back(std::move(s));
    }
    if (items.size() > want) {
        notes.push_back(fmt::format("{}: truncated {} options to {}", dimension, items.size(), want));
        items.resize(want);
    }
    if (items.size() < want) {
        reject(ErrorCode::VocabularyViolation, std::string(dimension),
               fmt::format("{} usable options, {} required", items.size(), want));
    }
    return items;
}

ContextPrediction validate_object(const json& obj, std::vector<std::string>& notes) {
    if (!obj.is_object()) reject(ErrorCode::Unparseable, "", "top-level value is not an object");

    auto locations = read_list(obj, {"Location", "Locations"}, "Location", kLocationCount, notes);
    for (const auto& loc : locations) {
        if (*text::scalar_count(loc) > kLocationCharLimit) {
            reject(ErrorCode::VocabularyViolation, "Location", loc);
        }
    }
    const auto emotion = read_label(obj, {"Emotion", "Emotions"}, kAllEmotions, "Emotion", notes);
    const auto people = read_label(obj, {"People", "Person", "Persons"}, kAllPeople, "People", notes);

    auto activities = read_list(obj, {"Activity", "Activities"}, "Activity", kActivityCount, notes);
    for (auto& act : activities) {
        if (*text::scalar_count(act) > kActivityCharLimit) {
            act = text::truncate_at_word_boundary(act, kActivityCharLimit);
            notes.push_back(fmt::format("Activity: shortened an option to {} characters", *text::scalar_count(act)));
        }
    }
    // Truncation can collapse two options into the same prefix.
    std::set<std::string> distinct(activities.begin(), activities.end());
    if (distinct.size() != activities.size()) {
        reject(ErrorCode::VocabularyViolation, "Activity", "options identical after shortening");
    }
    return ContextPrediction::make(std::move(locations), emotion, people, std::move(activities));
}

}  // namespace

ParseOutcome parse_and_validate(std::string_view raw) {
    ParseOutcome out;
    auto& report = out.report;
    try {
        if (!text::scalar_count(raw)) reject(ErrorCode::Unparseable, "", "response is not valid UTF-8");

        json obj = json::parse(raw, nullptr, false);
        if (obj.is_discarded() || !obj.is_object()) {
            report.lenient_json = true;
            const auto unfenced = strip_code_fences(raw);
            const auto open = unfenced.find('{');
            const auto close = unfenced.rfind('}');
            if (open == std::string_view::npos || close == std::string_view::npos || close < open) {
                reject(ErrorCode::Unparseable, "", "no JSON object found");
            }
            const auto candidate = unfenced.substr(open, close - open + 1);
            obj = json::parse(candidate, nullptr, false);
            if (obj.is_discarded()) {
                obj = json::parse(quote_bare_tokens(candidate), nullptr, false);
                if (!obj.is_discarded()) report.repairs.emplace_back("quoted bare tokens");
            } else {
                report.repairs.emplace_back("extracted the JSON object from surrounding text");
            }
            if (obj.is_discarded()) reject(ErrorCode::Unparseable, "", "lenient JSON pass failed");
        }
        out.prediction = validate_object(obj, report.repairs);
    } catch (const Rejected& r) {
        report.violation = r.violation;
        out.prediction.reset();
    } catch (const Error& e) {
        // ContextPrediction::make backstop; validate_object should already cover it.
        report.violation = Violation{ErrorCode::VocabularyViolation, e.detail(), e.what()};
        out.prediction.reset();
    } catch (const std::exception& e) {
        report.violation = Violation{ErrorCode::Unparseable, "", e.what()};
        out.prediction.reset();
    }
    return out;
}

}  // namespace cuediary
