#pragma once

#include "cuediary/config.hpp"
#include "cuediary/domain.hpp"
#include "cuediary/ids.hpp"
#include "cuediary/media.hpp"
#include "cuediary/memo.hpp"
#include "cuediary/predictor.hpp"
#include "cuediary/store.hpp"

#include <condition_variable>
#include <deque>
#include <filesystem>
#include <functional>
#include <memory>
#include <mutex>
#include <optional>
#include <set>
#include <string>
#include <thread>
#include <vector>

namespace cuediary {

inline constexpr std::uint64_t kAttachmentLimitBytes = 50ull * 1024 * 1024;
inline constexpr std::chrono::milliseconds kAckDeadline{2'000};

/// Maps a MIME type to the media kind it carries. nullopt = unsupported.
std::optional<MediaKind> media_kind_for_mime(std::string_view mime);

struct Upload {
    std::string mime;
    std::string bytes;
};

struct PostPayload {
    std::optional<std::string> text;
    std::vector<Upload> attachments;
};

struct Acknowledgment {
    std::string entry_id;
    std::string ack_text;
    bool memo_ready = false;
};

struct TimelineItem {
    DiaryEntry entry;
    std::optional<Memo> memo;
    std::optional<Summary> summary;
};

/// Places in the processing path where tests can inject a crash.
enum class CrashPoint { AfterEntryPersist, BeforeFeatures, AfterFeatures, AfterPrediction, AfterMemoSave };
inline constexpr std::array<CrashPoint, 5> kAllCrashPoints = {
    CrashPoint::AfterEntryPersist, CrashPoint::BeforeFeatures, CrashPoint::AfterFeatures,
    CrashPoint::AfterPrediction, CrashPoint::AfterMemoSave};
std::string_view to_string(CrashPoint p);

/// Thrown by a crash hook. The service stops all processing, as if the
/// process had died; only a new instance over the same data dir continues.
struct SimulatedCrash : std::runtime_error {
    SimulatedCrash() : std::runtime_error("simulated crash") {}
};

struct ServiceOptions {
    std::filesystem::path data_dir;
    StudyConfig study;
    MediaUnderstanding media;
    std::shared_ptr<LlmClient> llm;
    LlmClientConfig llm_config;
    int workers = 2;
    std::function<Timestamp()> clock = now_utc;
    std::optional<std::uint64_t> id_seed;
    std::function<void(CrashPoint, const std::string& entry_id)> crash_hook;
};

/// The diary service: accepts posts, acknowledges them at once, and turns
/// agent-channel entries into memos on a worker pool. Work is derived from
/// the store, so entries whose memo was never generated (crash, restart) are
/// picked up again when the service opens.
class DiaryService {
public:
    explicit DiaryService(ServiceOptions options);
    ~DiaryService();
    DiaryService(const DiaryService&) = delete;
    DiaryService& operator=(const DiaryService&) = delete;

    /// Throws UnknownChannel, EmptyPost, MixedUnsupported, PayloadTooLarge,
    /// UnsupportedMime. `participant_id` must own the channel when given.
    Acknowledgment receive_post(const std::string& channel_id, const std::optional<std::string>& participant_id,
                                const PostPayload& payload, std::optional<int> client_utc_offset = std::nullopt);

    DiaryEntry append_thread_note(const std::string& entry_id, const std::string& text);

    DiaryEntry entry(const std::string& entry_id) const;
    /// Chronological (arrival) order. Throws UnknownChannel.
    std::vector<DiaryEntry> entries(const std::string& channel_id) const;

    /// Throws UnknownEntry; UnknownMemo for Baseline-channel entries.
    Memo memo_for_entry(const std::string& entry_id) const;
    Memo memo(const std::string& memo_id) const;
    /// Applies the batch atomically: either every edit lands or none does.
    Memo edit_memo(const std::string& memo_id, const std::vector<MemoEdit>& edits);
    Summary submit(const std::string& memo_id);
    /// Throws MemoNotReady until the memo is submitted.
    Summary summary(const std::string& memo_id) const;
    std::vector<std::string> activities(const std::string& memo_id, int page) const;

    std::vector<TimelineItem> timeline(const std::string& channel_id) const;

    /// Writes entries.jsonl, memos.jsonl, notes.jsonl and score_sheets.jsonl
    /// (unscored templates) into `out_dir`. Output is deterministic.
    void export_study(const std::string& study_id, const std::filesystem::path& out_dir) const;

    /// Blocks until the queue is drained or `timeout` passes. Returns true when idle.
    bool wait_idle(std::chrono::milliseconds timeout);
    [[nodiscard]] std::size_t pending_jobs() const;
    [[nodiscard]] bool crashed() const;

    [[nodiscard]] const StudyConfig& study() const { return options_.study; }
    [[nodiscard]] const Store& store() const { return store_; }

    /// Stops the workers; queued work stays in the store for the next open.
    void stop();

private:
    void recover();
    void enqueue(const std::string& entry_id);
    void worker_loop();
    void process(const std::string& entry_id);
    void crash_point(CrashPoint p, const std::string& entry_id);
    std::shared_ptr<std::mutex> lock_for(const std::string& key) const;
    const ChannelConfig& channel(const std::string& channel_id) const;

    ServiceOptions options_;
    Store store_;
    UlidGenerator ids_;
    std::optional<ContextPredictor> predictor_;

    std::mutex ingest_mu_;  // serialises entry persistence in arrival order

    mutable std::mutex queue_mu_;
    std::condition_variable queue_cv_;
    std::condition_variable idle_cv_;
    std::deque<std::string> queue_;
    std::set<std::string> queued_;
    std::size_t in_flight_ = 0;
    bool stopping_ = false;
    bool crashed_ = false;
    std::vector<std::thread> workers_;

    mutable std::mutex locks_mu_;
    mutable std::map<std::string, std::shared_ptr<std::mutex>> locks_;
};

}  // namespace cuediary
