#include "cuediary/service.hpp"

#include "cuediary/error.hpp"
#include "cuediary/evaluation.hpp"
#include "cuediary/text.hpp"

#include <fmt/format.h>
#include <spdlog/spdlog.h>

#include <algorithm>
#include <fstream>
#include <map>

namespace fs = std::filesystem;

namespace cuediary {

namespace {

constexpr std::string_view kAckAgent = "Got it! Your diary entry is saved. Your memo will be ready to check soon.";
constexpr std::string_view kAckBaseline = "Got it! Your diary entry is saved.";

std::string base_mime(std::string_view mime) {
    auto s = text::to_lower(text::trim(mime.substr(0, mime.find(';'))));
    return s;
}

void write_jsonl(const fs::path& path, const std::vector<json>& rows) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw Error(ErrorCode::StorageUnavailable, fmt::format("cannot write {}", path.string()));
    for (const auto& r : rows) out << canonical_dump(r) << '\n';
}

}  // namespace

std::optional<MediaKind> media_kind_for_mime(std::string_view mime) {
    static const std::map<std::string, MediaKind, std::less<>> kinds = {
        {"image/jpeg", MediaKind::Image}, {"image/jpg", MediaKind::Image},    {"image/png", MediaKind::Image},
        {"video/mp4", MediaKind::Video},  {"video/quicktime", MediaKind::Video},
        {"audio/wav", MediaKind::Audio},  {"audio/x-wav", MediaKind::Audio},  {"audio/wave", MediaKind::Audio},
        {"audio/mpeg", MediaKind::Audio}, {"audio/mp3", MediaKind::Audio},    {"audio/mp4", MediaKind::Audio},
        {"audio/m4a", MediaKind::Audio},  {"audio/x-m4a", MediaKind::Audio},  {"audio/aac", MediaKind::Audio},
        {"audio/ogg", MediaKind::Audio},  {"audio/webm", MediaKind::Audio},   {"audio/flac", MediaKind::Audio},
    };
    const auto it = kinds.find(base_mime(mime));
    if (it == kinds.end()) return std::nullopt;
    return it->second;
}

std::string_view to_string(CrashPoint p) {
    switch (p) {
        case CrashPoint::AfterEntryPersist: return "AfterEntryPersist";
        case CrashPoint::BeforeFeatures: return "BeforeFeatures";
        case CrashPoint::AfterFeatures: return "AfterFeatures";
        case CrashPoint::AfterPrediction: return "AfterPrediction";
        case CrashPoint::AfterMemoSave: return "AfterMemoSave";
    }
    return "?";
}

DiaryService::DiaryService(ServiceOptions options)
    : options_(std::move(options)),
      store_(options_.data_dir),
      ids_(options_.id_seed ? UlidGenerator(*options_.id_seed) : UlidGenerator()) {
    validate(options_.study);
    if (!options_.llm) options_.llm = std::make_shared<KeywordLlmClient>();
    predictor_.emplace(options_.llm, options_.llm_config);
    if (!options_.clock) options_.clock = now_utc;

    recover();
    const int n = std::max(1, options_.workers);
    for (int i = 0; i < n; ++i) workers_.emplace_back([this] { worker_loop(); });
}

DiaryService::~DiaryService() {
    stop();
}

void DiaryService::stop() {
    {
        std::lock_guard lock(queue_mu_);
        stopping_ = true;
    }
    queue_cv_.notify_all();
    idle_cv_.notify_all();
    for (auto& t : workers_) {
        if (t.joinable()) t.join();
    }
    workers_.clear();
}

void DiaryService::recover() {
    std::size_t requeued = 0;
    for (const auto& e : store_.all_entries()) {
        const auto* ch = options_.study.find_channel(e.channel_id);
        if (ch == nullptr || !ch->agent_enabled) continue;
        const auto m = store_.memo_for_entry(e.entry_id);
        if (!m || m->state == MemoState::Pending) {
            enqueue(e.entry_id);
            ++requeued;
        }
    }
    if (requeued) spdlog::info("recovered {} entries awaiting a memo", requeued);
}

const ChannelConfig& DiaryService::channel(const std::string& channel_id) const {
    const auto* ch = options_.study.find_channel(channel_id);
    if (ch == nullptr) throw Error(ErrorCode::UnknownChannel, fmt::format("no channel '{}'", channel_id), channel_id);
    return *ch;
}

std::shared_ptr<std::mutex> DiaryService::lock_for(const std::string& key) const {
    std::lock_guard lock(locks_mu_);
    auto& slot = locks_[key];
    if (!slot) slot = std::make_shared<std::mutex>();
    return slot;
}

void DiaryService::crash_point(CrashPoint p, const std::string& entry_id) {
    if (!options_.crash_hook) return;
    try {
        options_.crash_hook(p, entry_id);
    } catch (const SimulatedCrash&) {
        {
            std::lock_guard lock(queue_mu_);
            crashed_ = true;
            stopping_ = true;
        }
        queue_cv_.notify_all();
        idle_cv_.notify_all();
        throw;
    }
}

// ---- ingestion ------------------------------------------------------------

Acknowledgment DiaryService::receive_post(const std::string& channel_id, const std::optional<std::string>& participant_id,
                                          const PostPayload& payload, std::optional<int> client_utc_offset) {
    const auto& ch = channel(channel_id);
    if (participant_id && *participant_id != ch.participant_id) {
        throw Error(ErrorCode::UnknownChannel,
                    fmt::format("channel '{}' does not belong to participant '{}'", channel_id, *participant_id),
                    channel_id);
    }

    std::optional<std::string> body;
    if (payload.text && !text::trim(*payload.text).empty()) {
        if (!text::scalar_count(*payload.text)) throw Error(ErrorCode::InvalidArgument, "text is not valid UTF-8");
        body = *payload.text;
    }
    if (!body && payload.attachments.empty()) throw Error(ErrorCode::EmptyPost, "post has neither text nor attachments");

    std::vector<MediaKind> kinds;
    for (const auto& up : payload.attachments) {
        if (up.bytes.size() > kAttachmentLimitBytes) {
            throw Error(ErrorCode::PayloadTooLarge,
                        fmt::format("attachment of {} bytes exceeds the {} byte limit", up.bytes.size(),
                                    kAttachmentLimitBytes));
        }
        const auto kind = media_kind_for_mime(up.mime);
        if (!kind) throw Error(ErrorCode::UnsupportedMime, fmt::format("unsupported media type '{}'", up.mime), up.mime);
        if (up.bytes.empty()) throw Error(ErrorCode::EmptyPost, "attachment is empty");
        kinds.push_back(*kind);
    }
    const auto modality = classify_modality(body.has_value(), kinds);

    DiaryEntry e;
    e.channel_id = channel_id;
    e.participant_id = ch.participant_id;
    e.utc_offset_minutes = client_utc_offset.value_or(ch.utc_offset_minutes);
    e.modality = modality;
    e.text_body = body;
    for (std::size_t i = 0; i < payload.attachments.size(); ++i) {
        const auto& up = payload.attachments[i];
        e.attachments.push_back({kinds[i], base_mime(up.mime), store_.put_blob(up.bytes), up.bytes.size()});
    }

    {
        std::lock_guard lock(ingest_mu_);
        e.created_at = options_.clock();
        const auto prior = store_.entries_for_channel(channel_id);
        if (!prior.empty() && prior.back().created_at > e.created_at) e.created_at = prior.back().created_at;
        e.entry_id = entry_id_from_ulid(ids_.next(e.created_at));
        store_.save_entry(e);
    }
    spdlog::info("entry {} received on {} ({})", e.entry_id, channel_id, to_string(modality));

    if (ch.agent_enabled) {
        crash_point(CrashPoint::AfterEntryPersist, e.entry_id);
        store_.save_memo(pending_memo(e));
        enqueue(e.entry_id);
    }
    return {e.entry_id, std::string(ch.agent_enabled ? kAckAgent : kAckBaseline), false};
}

DiaryEntry DiaryService::append_thread_note(const std::string& entry_id, const std::string& note) {
    if (text::trim(note).empty()) throw Error(ErrorCode::InvalidArgument, "note text is empty");
    if (!text::scalar_count(note)) throw Error(ErrorCode::InvalidArgument, "note is not valid UTF-8");
    std::lock_guard lock(*lock_for("entry:" + entry_id));
    auto e = entry(entry_id);
    auto at = options_.clock();
    if (!e.notes.empty() && e.notes.back().at > at) at = e.notes.back().at;
    e.notes.push_back({at, note});
    store_.save_entry(e);
    return e;
}

DiaryEntry DiaryService::entry(const std::string& entry_id) const {
    auto e = store_.find_entry(entry_id);
    if (!e) throw Error(ErrorCode::UnknownEntry, fmt::format("no entry '{}'", entry_id), entry_id);
    return *e;
}

std::vector<DiaryEntry> DiaryService::entries(const std::string& channel_id) const {
    channel(channel_id);
    return store_.entries_for_channel(channel_id);
}

// ---- processing -----------------------------------------------------------

void DiaryService::enqueue(const std::string& entry_id) {
    {
        std::lock_guard lock(queue_mu_);
        if (!queued_.insert(entry_id).second) return;
        queue_.push_back(entry_id);
    }
    queue_cv_.notify_one();
}

void DiaryService::worker_loop() {
    for (;;) {
        std::string id;
        {
            std::unique_lock lock(queue_mu_);
            queue_cv_.wait(lock, [this] { return stopping_ || !queue_.empty(); });
            if (stopping_) return;
            id = queue_.front();
            queue_.pop_front();
            queued_.erase(id);
            ++in_flight_;
        }
        try {
            process(id);
        } catch (const SimulatedCrash&) {
            std::lock_guard lock(queue_mu_);
            --in_flight_;
            idle_cv_.notify_all();
            return;
        } catch (const std::exception& e) {
            // The memo stays Pending and is retried on the next open.
            spdlog::error("entry {}: processing failed: {}", id, e.what());
        }
        {
            std::lock_guard lock(queue_mu_);
            --in_flight_;
        }
        idle_cv_.notify_all();
    }
}

void DiaryService::process(const std::string& entry_id) {
    const auto memo_id = memo_id_for_entry(entry_id);
    std::lock_guard memo_lock(*lock_for(memo_id));

    auto e = entry(entry_id);
    auto existing = store_.memo_for_entry(entry_id);
    if (existing && existing->state != MemoState::Pending) return;

    crash_point(CrashPoint::BeforeFeatures, entry_id);
    if (!e.attachments.empty() && !e.features) {
        std::vector<MediaPayload> payloads;
        for (const auto& a : e.attachments) payloads.push_back({a.kind, store_.get_blob(a.sha256)});
        auto features = options_.media.understand(payloads);

        std::lock_guard entry_lock(*lock_for("entry:" + entry_id));
        e = entry(entry_id);  // notes may have arrived meanwhile
        e.features = std::move(features);
        store_.save_entry(e);
    }
    crash_point(CrashPoint::AfterFeatures, entry_id);

    auto outcome = predictor_->predict(e);
    if (outcome.fallback) {
        spdlog::warn("entry {}: manual-mode memo after {} LLM calls", entry_id, outcome.llm_calls);
    }
    crash_point(CrashPoint::AfterPrediction, entry_id);

    const auto base = existing ? *existing : pending_memo(e);
    store_.save_memo(generate_memo(base, e, outcome.prediction));
    spdlog::info("memo {} generated", memo_id);
    crash_point(CrashPoint::AfterMemoSave, entry_id);
}

bool DiaryService::wait_idle(std::chrono::milliseconds timeout) {
    std::unique_lock lock(queue_mu_);
    return idle_cv_.wait_for(lock, timeout, [this] { return crashed_ || (queue_.empty() && in_flight_ == 0); }) &&
           !crashed_;
}

std::size_t DiaryService::pending_jobs() const {
    std::lock_guard lock(queue_mu_);
    return queue_.size() + in_flight_;
}

bool DiaryService::crashed() const {
    std::lock_guard lock(queue_mu_);
    return crashed_;
}

// ---- memos ----------------------------------------------------------------

Memo DiaryService::memo_for_entry(const std::string& entry_id) const {
    entry(entry_id);
    auto m = store_.memo_for_entry(entry_id);
    if (!m) throw Error(ErrorCode::UnknownMemo, fmt::format("entry '{}' has no memo", entry_id), entry_id);
    return *m;
}

Memo DiaryService::memo(const std::string& memo_id) const {
    auto m = store_.find_memo(memo_id);
    if (!m) throw Error(ErrorCode::UnknownMemo, fmt::format("no memo '{}'", memo_id), memo_id);
    return *m;
}

Memo DiaryService::edit_memo(const std::string& memo_id, const std::vector<MemoEdit>& edits) {
    std::lock_guard lock(*lock_for(memo_id));
    auto m = memo(memo_id);
    if (m.state == MemoState::Submitted) {
        throw Error(ErrorCode::MemoSubmitted, fmt::format("memo {} is already submitted", memo_id));
    }
    if (m.state == MemoState::Pending) {
        throw Error(ErrorCode::MemoNotReady, fmt::format("memo {} has not been generated yet", memo_id));
    }
    for (const auto& e : edits) m = apply_edit(m, e);
    store_.save_memo(m);
    return m;
}

Summary DiaryService::submit(const std::string& memo_id) {
    std::lock_guard lock(*lock_for(memo_id));
    const auto m = submit_memo(memo(memo_id), options_.clock());
    store_.save_memo(m);
    return render_summary(m);
}

Summary DiaryService::summary(const std::string& memo_id) const {
    const auto m = memo(memo_id);
    if (m.state != MemoState::Submitted) {
        throw Error(ErrorCode::MemoNotReady, fmt::format("memo {} is not submitted yet", memo_id), memo_id);
    }
    return render_summary(m);
}

std::vector<std::string> DiaryService::activities(const std::string& memo_id, int page) const {
    return activity_page(memo(memo_id), page);
}

// ---- timeline and export --------------------------------------------------

std::vector<TimelineItem> DiaryService::timeline(const std::string& channel_id) const {
    const auto& ch = channel(channel_id);
    std::vector<TimelineItem> out;
    for (auto& e : store_.entries_for_channel(channel_id)) {
        TimelineItem item{std::move(e), std::nullopt, std::nullopt};
        if (ch.agent_enabled) {
            item.memo = store_.memo_for_entry(item.entry.entry_id);
            if (item.memo && item.memo->state == MemoState::Submitted) item.summary = render_summary(*item.memo);
        }
        out.push_back(std::move(item));
    }
    return out;
}

void DiaryService::export_study(const std::string& study_id, const fs::path& out_dir) const {
    if (study_id != options_.study.study_id) {
        throw Error(ErrorCode::UnknownStudy, fmt::format("no study '{}'", study_id), study_id);
    }
    std::error_code ec;
    fs::create_directories(out_dir, ec);
    if (ec) throw Error(ErrorCode::StorageUnavailable, fmt::format("cannot create {}", out_dir.string()));

    std::vector<DiaryEntry> entries;
    for (auto& e : store_.all_entries()) {
        if (options_.study.find_channel(e.channel_id) != nullptr) entries.push_back(std::move(e));
    }

    std::vector<json> entry_rows, note_rows, memo_rows, sheet_rows;
    for (const auto& e : entries) {
        entry_rows.emplace_back(e);
        for (std::size_t i = 0; i < e.notes.size(); ++i) {
            note_rows.push_back(json{{"entry_id", e.entry_id},
                                     {"index", i},
                                     {"at", format_utc(e.notes[i].at)},
                                     {"text", e.notes[i].text}});
        }
    }
    for (const auto& m : store_.all_memos()) {
        if (options_.study.find_channel(m.channel_id) != nullptr) memo_rows.push_back(memo_to_json(m));
    }
    for (const auto& e : eval::rubric_eligible(entries)) {
        const auto& ch = channel(e.channel_id);
        json scores = json::object();
        for (auto d : kAllDimensions) scores[std::string(to_string(d))] = nullptr;
        sheet_rows.push_back(json{{"entry_id", e.entry_id},
                                  {"participant_id", e.participant_id},
                                  {"arm", to_string(ch.agent_enabled ? SystemArm::Agent : SystemArm::Baseline)},
                                  {"group", ch.group ? json(to_string(*ch.group)) : json(nullptr)},
                                  {"modality", to_string(e.modality)},
                                  {"scores", scores}});
    }
    write_jsonl(out_dir / "entries.jsonl", entry_rows);
    write_jsonl(out_dir / "notes.jsonl", note_rows);
    write_jsonl(out_dir / "memos.jsonl", memo_rows);
    write_jsonl(out_dir / "score_sheets.jsonl", sheet_rows);
    std::ofstream(out_dir / "study.json", std::ios::trunc) << canonical_dump(study_config_to_json(options_.study)) << '\n';
}

}  // namespace cuediary
