#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace cuediary {

enum class ErrorCode {
    // ingestion
    EmptyPost,
    MixedUnsupported,
    UnknownChannel,
    UnknownEntry,
    PayloadTooLarge,
    UnsupportedMime,
    // media understanding
    ProviderTimeout,
    ProviderRejected,
    UndecodableMedia,
    EmptyTranscript,
    // prediction
    NoUsableContent,
    LlmTimeout,
    MalformedOutput,
    Unparseable,
    VocabularyViolation,
    InvalidPrediction,
    // memo lifecycle
    UnknownMemo,
    MemoNotReady,
    MemoSubmitted,
    UnknownOption,
    IncompleteMemo,
    PageOutOfRange,
    // evaluation
    EmptyInput,
    UnsubmittedMemo,
    ScoreOutOfRange,
    EmptyGroup,
    MissingGroupLabel,
    // persistence
    UnknownStudy,
    StorageUnavailable,
    CorruptRecord,
    InvalidArgument,
};

std::string_view to_string(ErrorCode code) noexcept;

/// Error carrying a machine-readable code. `detail` names the offending
/// dimension, field or value when one applies (e.g. "People" for IncompleteMemo).
class Error : public std::runtime_error {
public:
    Error(ErrorCode code, std::string message, std::string detail = {})
        : std::runtime_error(std::move(message)), code_(code), detail_(std::move(detail)) {}

    [[nodiscard]] ErrorCode code() const noexcept { return code_; }
    [[nodiscard]] const std::string& detail() const noexcept { return detail_; }

private:
    ErrorCode code_;
    std::string detail_;
};

}  // namespace cuediary
