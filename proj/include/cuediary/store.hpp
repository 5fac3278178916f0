#pragma once

#include "cuediary/domain.hpp"
#include "cuediary/memo.hpp"

#include <cstdio>
#include <filesystem>
#include <map>
#include <mutex>
#include <optional>
#include <shared_mutex>
#include <string>
#include <vector>

namespace cuediary {

/// Canonical serialisation: sorted keys, no whitespace. Save -> load -> save
/// is byte-identical.
std::string canonical_dump(const json& j);

/// Snapshot files hold {"checksum": sha256(canonical record), "record": ...}.
void write_snapshot(const std::filesystem::path& path, const json& record);
/// Throws CorruptRecord on a checksum mismatch, truncation or bad JSON, and
/// StorageUnavailable when the file cannot be read.
json read_snapshot(const std::filesystem::path& path);

/// Durable storage under one data directory:
///
///   journal.log         append-only events, one "<sha256>\t<json>" per line
///   blobs/<sha256>      attachment bytes
///   entries/<id>.json   materialised entry snapshots
///   memos/<id>.json     materialised memo snapshots
///
/// The journal is the source of truth; opening a store replays it. A torn
/// final line (crash mid-append) is dropped; damage anywhere else is
/// CorruptRecord. All writes go through one writer lock, reads are shared.
class Store {
public:
    explicit Store(std::filesystem::path dir);
    ~Store();
    Store(const Store&) = delete;
    Store& operator=(const Store&) = delete;

    [[nodiscard]] const std::filesystem::path& dir() const { return dir_; }

    std::string put_blob(std::string_view bytes);
    std::string get_blob(const std::string& sha256) const;

    void save_entry(const DiaryEntry& entry);
    void save_memo(const Memo& memo);

    std::optional<DiaryEntry> find_entry(const std::string& entry_id) const;
    std::optional<Memo> find_memo(const std::string& memo_id) const;
    std::optional<Memo> memo_for_entry(const std::string& entry_id) const;

    /// Ordered by (created_at, entry_id): arrival order, since ids are monotonic.
    std::vector<DiaryEntry> entries_for_channel(const std::string& channel_id) const;
    std::vector<DiaryEntry> all_entries() const;  // ordered by entry_id
    std::vector<Memo> all_memos() const;          // ordered by memo_id

    /// Number of journal events replayed or appended since open.
    [[nodiscard]] std::size_t journal_length() const;

private:
    void replay();
    void append(const json& event);
    void apply(const json& event);

    std::filesystem::path dir_;
    std::FILE* journal_ = nullptr;
    mutable std::shared_mutex mu_;
    std::map<std::string, DiaryEntry> entries_;
    std::map<std::string, Memo> memos_;
    std::map<std::string, std::string> memo_by_entry_;
    std::size_t events_ = 0;
};

}  // namespace cuediary
