#include "cuediary/predictor.hpp"

#include "cuediary/error.hpp"
#include "cuediary/text.hpp"
#include "http_util.hpp"

#include <httplib.h>
#include <fmt/format.h>
#include <spdlog/spdlog.h>

#include <algorithm>
#include <array>

namespace cuediary {

void validate(const LlmClientConfig& config) {
    if (config.max_retries < 0) throw Error(ErrorCode::InvalidArgument, "max_retries must be >= 0");
    if (config.temperature < 0.0 || config.temperature > 2.0) {
        throw Error(ErrorCode::InvalidArgument, "temperature must be within [0, 2]");
    }
    if (config.timeout <= std::chrono::milliseconds::zero()) {
        throw Error(ErrorCode::InvalidArgument, "LLM timeout must be positive");
    }
}

// ---- HTTP client ----------------------------------------------------------

HttpLlmClient::HttpLlmClient(LlmClientConfig config) : config_(std::move(config)) {
    validate(config_);
    if (config_.endpoint.empty()) throw Error(ErrorCode::InvalidArgument, "LLM endpoint is required");
}

std::string HttpLlmClient::complete(const ChatRequest& request, std::chrono::milliseconds timeout) {
    const auto url = detail::split_url(config_.endpoint);
    httplib::Client client(url.origin);
    client.set_connection_timeout(timeout);
    client.set_read_timeout(timeout);
    client.set_write_timeout(timeout);
    if (!config_.credentials.empty()) client.set_bearer_token_auth(config_.credentials);

    json messages = json::array();
    for (const auto& m : request.messages) messages.push_back({{"role", m.role}, {"content", m.content}});
    const json body{{"model", request.model}, {"temperature", request.temperature}, {"messages", messages}};

    const auto res = client.Post(url.path, body.dump(), "application/json");
    if (!res) {
        const auto err = res.error();
        if (err == httplib::Error::Read || err == httplib::Error::ConnectionTimeout) {
            throw Error(ErrorCode::LlmTimeout, fmt::format("no answer within {} ms", timeout.count()));
        }
        throw Error(ErrorCode::ProviderRejected, fmt::format("LLM request failed: {}", httplib::to_string(err)));
    }
    if (res->status == 408 || res->status == 504) {
        throw Error(ErrorCode::LlmTimeout, fmt::format("LLM endpoint timed out ({})", res->status));
    }
    if (res->status < 200 || res->status >= 300) {
        throw Error(ErrorCode::ProviderRejected, fmt::format("LLM endpoint answered {}", res->status));
    }
    const auto j = json::parse(res->body, nullptr, false);
    try {
        return j.at("choices").at(0).at("message").at("content").get<std::string>();
    } catch (const json::exception&) {
        throw Error(ErrorCode::ProviderRejected, "LLM response lacks choices[0].message.content");
    }
}

// ---- keyword client -------------------------------------------------------

namespace {

struct Scene {
    std::array<std::string_view, 6> keywords;
    std::array<std::string_view, 3> locations;
    PeopleLabel people;
    std::array<std::string_view, 6> activities;
};

constexpr std::array<Scene, 6> kScenes = {{
    {{"laptop", "desk", "office", "overtime", "meeting", "project"},
     {"Workspace", "Office", "Meeting room"},
     PeopleLabel::Colleagues,
     {"Working on a laptop at the desk", "Finishing project tasks before a deadline",
      "Attending a team meeting", "Replying to work emails", "Planning tasks for the next day",
      "Discussing the current project with colleagues"}},
    {{"kayak", "river", "lake", "beach", "hike", "park"},
     {"Park", "Lake", "Beach"},
     PeopleLabel::Friends,
     {"Kayaking on the water", "Enjoying the outdoors with friends", "Taking photos of the scenery",
      "Resting by the shore", "Exploring a nature trail", "Having a picnic outside"}},
    {{"food", "brunch", "dinner", "lunch", "restaurant", "coffee"},
     {"Restaurant", "Cafe", "Home"},
     PeopleLabel::Friends,
     {"Having a meal together", "Trying a new dish", "Chatting over coffee", "Taking photos of the food",
      "Celebrating a small occasion", "Relaxing after a busy morning"}},
    {{"parents", "family", "mom", "dad", "home", "sister"},
     {"Home", "Residential area", "Restaurant"},
     PeopleLabel::Families,
     {"Visiting parents at home", "Having dinner with family", "Catching up on family news",
      "Helping with chores at home", "Watching TV together", "Taking a walk with family members"}},
    {{"classmates", "friends", "party", "reunion", "met", "together"},
     {"Restaurant", "Bar", "Cafe"},
     PeopleLabel::Friends,
     {"Meeting old classmates", "Sharing memories from school", "Having dinner with friends",
      "Playing games together", "Taking a group photo", "Planning the next get-together"}},
    {{"lab", "study", "library", "class", "lecture", "research"},
     {"Library", "University", "Laboratory"},
     PeopleLabel::Alone,
     {"Studying for an upcoming exam", "Running an experiment in the lab", "Reading research papers",
      "Taking notes during a lecture", "Writing a report", "Preparing slides for a presentation"}},
}};

constexpr std::array<std::string_view, 6> kDefaultActivities = {
    "Going about daily routines", "Taking a short break", "Reflecting on the day",
    "Running errands nearby", "Spending some quiet time", "Sharing an update with someone"};

constexpr std::array<std::string_view, 10> kPositiveWords = {
    "happy", "happiness", "excited", "enjoy", "love", "great", "fun", "glad", "delicious", "wonderful"};
constexpr std::array<std::string_view, 9> kNegativeWords = {
    "tired", "exhausted", "sad", "angry", "stress", "annoyed", "overtime", "bad", "awful"};

std::size_t count_hits(const std::string& haystack, auto words) {
    std::size_t n = 0;
    for (auto w : words) {
        if (!w.empty() && haystack.find(w) != std::string::npos) ++n;
    }
    return n;
}

}  // namespace

std::string KeywordLlmClient::complete(const ChatRequest& request, std::chrono::milliseconds) {
    const auto first_user = std::find_if(request.messages.begin(), request.messages.end(),
                                         [](const ChatMessage& m) { return m.role == "user"; });
    std::string content = first_user == request.messages.end() ? std::string{} : first_user->content;
    // Only the content section carries the entry; the instructions mention offices and libraries.
    const auto start = content.find("Now, in the logging period");
    const auto stop = content.find("Please predict");
    if (start != std::string::npos) content = content.substr(start, stop == std::string::npos ? stop : stop - start);
    content = text::to_lower(content);

    const Scene* scene = nullptr;
    std::size_t best = 0;
    for (const auto& s : kScenes) {
        const auto hits = count_hits(content, s.keywords);
        if (hits > best) {
            best = hits;
            scene = &s;
        }
    }
    const auto pos = count_hits(content, kPositiveWords);
    const auto neg = count_hits(content, kNegativeWords);
    const auto emotion = pos > neg ? EmotionLabel::Positive : neg > pos ? EmotionLabel::Negative : EmotionLabel::Neutral;

    json out;
    out["Location"] = scene ? json::array({scene->locations[0], scene->locations[1], scene->locations[2]})
                            : json::array({"Home", "Workspace", "Cafe"});
    out["Emotion"] = to_string(emotion);
    out["People"] = to_string(scene ? scene->people : PeopleLabel::Alone);
    json acts = json::array();
    for (auto a : scene ? scene->activities : kDefaultActivities) acts.push_back(a);
    out["Activity"] = acts;
    return out.dump();
}

// ---- predictor ------------------------------------------------------------

ContextPredictor::ContextPredictor(std::shared_ptr<LlmClient> client, LlmClientConfig config)
    : client_(std::move(client)), config_(std::move(config)) {
    validate(config_);
    if (!client_) throw Error(ErrorCode::InvalidArgument, "predictor needs an LLM client");
}

PredictionOutcome ContextPredictor::predict(const DiaryEntry& entry) const {
    PredictionOutcome out{ContextPrediction::manual_fallback(), 0, false, {}, std::nullopt};

    PromptBundle prompt;
    try {
        prompt = build_prompt(entry);
    } catch (const Error& e) {
        if (e.code() != ErrorCode::NoUsableContent) throw;
        out.fallback = true;
        out.fallback_reason = ErrorCode::NoUsableContent;
        out.warnings.emplace_back(e.what());
        return out;
    }

    ChatRequest request;
    request.model = config_.model;
    request.temperature = config_.temperature;
    request.messages.push_back({"user", prompt.rendered});

    const int attempts = 1 + config_.max_retries;
    ErrorCode last_failure = ErrorCode::MalformedOutput;
    for (int attempt = 0; attempt < attempts; ++attempt) {
        std::string raw;
        try {
            ++out.llm_calls;
            raw = client_->complete(request, config_.timeout);
        } catch (const Error& e) {
            last_failure = e.code() == ErrorCode::LlmTimeout ? ErrorCode::LlmTimeout : ErrorCode::MalformedOutput;
            out.warnings.push_back(fmt::format("attempt {}: {} ({})", attempt + 1, e.what(), to_string(e.code())));
            continue;
        } catch (const std::exception& e) {
            last_failure = ErrorCode::MalformedOutput;
            out.warnings.push_back(fmt::format("attempt {}: {}", attempt + 1, e.what()));
            continue;
        }

        auto parsed = parse_and_validate(raw);
        for (const auto& note : parsed.report.repairs) {
            spdlog::warn("entry {}: {}", entry.entry_id, note);
            out.warnings.push_back(note);
        }
        if (parsed.ok()) {
            out.prediction = std::move(*parsed.prediction);
            return out;
        }

        last_failure = ErrorCode::MalformedOutput;
        const auto& v = *parsed.report.violation;
        out.warnings.push_back(fmt::format("attempt {}: {} {} '{}'", attempt + 1, to_string(v.code), v.dimension,
                                           v.offending_value));
        request.messages.resize(1);
        request.messages.push_back({"assistant", raw});
        std::string reminder(format_reminder());
        if (!v.dimension.empty()) {
            reminder += fmt::format(" The value '{}' for {} was not acceptable.", v.offending_value, v.dimension);
        }
        request.messages.push_back({"user", reminder});
    }

    spdlog::warn("entry {}: prediction fell back to manual mode ({})", entry.entry_id, to_string(last_failure));
    out.fallback = true;
    out.fallback_reason = last_failure;
    return out;
}

}  // namespace cuediary
