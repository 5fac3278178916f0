#pragma once

#include "cuediary/domain.hpp"
#include "cuediary/error.hpp"

#include <chrono>
#include <memory>
#include <optional>
#include <string>
#include <variant>
#include <vector>

namespace cuediary {

inline constexpr double kDefaultTemperature = 0.7;

/// The three-part prompt: researcher preamble, the entry content and the
/// prediction instructions with the worked output example.
struct PromptBundle {
    std::string system_preamble;
    std::string content_section;
    std::string instruction_section;
    std::string rendered;
    double temperature = kDefaultTemperature;
};

/// Builds the prompt for an entry. Text and transcripts are inserted verbatim;
/// images and videos contribute their object tags (confidence-descending) and
/// caption. Throws NoUsableContent when nothing is left to describe.
PromptBundle build_prompt(const DiaryEntry& entry);

/// Appended on re-prompts after an unusable answer.
std::string_view format_reminder();

struct ChatMessage {
    std::string role;  // "user" | "assistant" | "system"
    std::string content;
};

struct ChatRequest {
    std::string model;
    double temperature = kDefaultTemperature;
    std::vector<ChatMessage> messages;
};

/// Chat-completion backend. Must throw Error(LlmTimeout) once `timeout`
/// elapses; any other failure surfaces as Error(ProviderRejected).
class LlmClient {
public:
    virtual ~LlmClient() = default;
    virtual std::string complete(const ChatRequest& request, std::chrono::milliseconds timeout) = 0;
};

struct LlmClientConfig {
    std::string endpoint;  // full URL of the chat-completions route
    std::string model = "gpt-3.5-turbo";
    std::string credentials;
    std::chrono::milliseconds timeout{30'000};
    int max_retries = 2;  // re-prompts after the local repair pass
    double temperature = kDefaultTemperature;
};

/// Throws Error(InvalidArgument) for negative retries or temperature outside [0, 2].
void validate(const LlmClientConfig& config);

/// OpenAI-style chat completions:
///   POST {"model", "temperature", "messages": [{"role", "content"}]}
///   -> {"choices": [{"message": {"content": "..."}}]}
class HttpLlmClient final : public LlmClient {
public:
    explicit HttpLlmClient(LlmClientConfig config);
    std::string complete(const ChatRequest& request, std::chrono::milliseconds timeout) override;

private:
    LlmClientConfig config_;
};

/// Offline stand-in that answers deterministically from keywords in the
/// prompt. Useful for running the service without an LLM account.
class KeywordLlmClient final : public LlmClient {
public:
    std::string complete(const ChatRequest& request, std::chrono::milliseconds timeout) override;
};

struct Violation {
    ErrorCode code = ErrorCode::Unparseable;  // Unparseable or VocabularyViolation
    std::string dimension;                    // empty for Unparseable
    std::string offending_value;
};

/// What the parser had to do to the raw answer.
struct RepairReport {
    bool lenient_json = false;      // strict parse failed; bare tokens quoted / fences stripped
    std::vector<std::string> repairs;  // human-readable notes, one per repair
    std::optional<Violation> violation;
};

struct ParseOutcome {
    std::optional<ContextPrediction> prediction;  // set iff report.violation is empty
    RepairReport report;

    [[nodiscard]] bool ok() const { return prediction.has_value(); }
};

/// Strict JSON first, then a lenient pass (code fences, bare enum tokens,
/// single quotes). Then label normalisation (case, singular/plural, one-letter
/// typos), list truncation to 3/6 items, duplicate and empty removal, and
/// truncation of activities longer than 151 characters at a word boundary.
/// Never throws.
ParseOutcome parse_and_validate(std::string_view raw);

struct PredictionOutcome {
    ContextPrediction prediction;
    int llm_calls = 0;
    bool fallback = false;
    std::vector<std::string> warnings;
    std::optional<ErrorCode> fallback_reason;
};

/// Prompt -> LLM -> parse/repair, with up to `max_retries` re-prompts that
/// carry the previous answer and a format reminder. LLM timeouts count
/// against the same budget. Always returns: when the budget runs out the
/// result is ContextPrediction::manual_fallback().
class ContextPredictor {
public:
    ContextPredictor(std::shared_ptr<LlmClient> client, LlmClientConfig config);

    PredictionOutcome predict(const DiaryEntry& entry) const;

    [[nodiscard]] const LlmClientConfig& config() const { return config_; }

private:
    std::shared_ptr<LlmClient> client_;
    LlmClientConfig config_;
};

}  // namespace cuediary
