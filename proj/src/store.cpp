#include "cuediary/store.hpp"

#include "cuediary/error.hpp"
#include "cuediary/hashing.hpp"

#include <fmt/format.h>
#include <spdlog/spdlog.h>

#include <algorithm>
#include <fstream>
#include <sstream>

#include <unistd.h>

namespace fs = std::filesystem;

namespace cuediary {

namespace {

std::string read_file(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error(ErrorCode::StorageUnavailable, fmt::format("cannot read {}", path.string()));
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void write_file_atomic(const fs::path& path, std::string_view bytes) {
    const auto tmp = fs::path(path).concat(".tmp");
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw Error(ErrorCode::StorageUnavailable, fmt::format("cannot write {}", tmp.string()));
        out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
        if (!out) throw Error(ErrorCode::StorageUnavailable, fmt::format("short write to {}", tmp.string()));
    }
    std::error_code ec;
    fs::rename(tmp, path, ec);
    if (ec) throw Error(ErrorCode::StorageUnavailable, fmt::format("cannot move {} into place: {}", path.string(), ec.message()));
}

fs::path entry_path(const fs::path& dir, const std::string& id) {
    return dir / "entries" / (id + ".json");
}

fs::path memo_path(const fs::path& dir, const std::string& id) {
    return dir / "memos" / (id + ".json");
}

bool entry_before(const DiaryEntry& a, const DiaryEntry& b) {
    if (a.created_at != b.created_at) return a.created_at < b.created_at;
    return a.entry_id < b.entry_id;
}

}  // namespace

std::string canonical_dump(const json& j) {
    return j.dump(-1, ' ', false, json::error_handler_t::strict);
}

void write_snapshot(const fs::path& path, const json& record) {
    const auto body = canonical_dump(record);
    const json wrapped{{"checksum", sha256_hex(body)}, {"record", record}};
    write_file_atomic(path, canonical_dump(wrapped) + "\n");
}

json read_snapshot(const fs::path& path) {
    const auto raw = read_file(path);
    const auto j = json::parse(raw, nullptr, false);
    if (j.is_discarded() || !j.is_object() || !j.contains("checksum") || !j.contains("record")) {
        throw Error(ErrorCode::CorruptRecord, fmt::format("{} is not a valid snapshot", path.string()));
    }
    const auto& record = j["record"];
    if (!j["checksum"].is_string() || j["checksum"].get<std::string>() != sha256_hex(canonical_dump(record))) {
        throw Error(ErrorCode::CorruptRecord, fmt::format("checksum mismatch in {}", path.string()));
    }
    return record;
}

Store::Store(fs::path dir) : dir_(std::move(dir)) {
    std::error_code ec;
    for (const char* sub : {"blobs", "entries", "memos"}) {
        fs::create_directories(dir_ / sub, ec);
        if (ec) {
            throw Error(ErrorCode::StorageUnavailable,
                        fmt::format("cannot create {}: {}", (dir_ / sub).string(), ec.message()));
        }
    }
    replay();
    journal_ = std::fopen((dir_ / "journal.log").c_str(), "ab");
    if (journal_ == nullptr) {
        throw Error(ErrorCode::StorageUnavailable, fmt::format("cannot open journal in {}", dir_.string()));
    }
}

Store::~Store() {
    if (journal_ != nullptr) std::fclose(journal_);
}

void Store::replay() {
    const auto path = dir_ / "journal.log";
    if (!fs::exists(path)) return;
    const auto raw = read_file(path);

    std::size_t pos = 0;
    std::size_t good_end = 0;
    std::size_t line_no = 0;
    while (pos < raw.size()) {
        ++line_no;
        const auto nl = raw.find('\n', pos);
        const bool last = nl == std::string::npos || nl + 1 == raw.size();
        const std::string_view line(raw.data() + pos, (nl == std::string::npos ? raw.size() : nl) - pos);

        bool ok = false;
        json event;
        const auto tab = line.find('\t');
        if (nl != std::string::npos && tab != std::string_view::npos) {
            const auto body = line.substr(tab + 1);
            if (line.substr(0, tab) == sha256_hex(body)) {
                event = json::parse(body, nullptr, false);
                ok = !event.is_discarded();
            }
        }
        if (!ok) {
            if (last) {
                spdlog::warn("journal {}: dropping torn final record at line {}", path.string(), line_no);
                break;
            }
            throw Error(ErrorCode::CorruptRecord, fmt::format("journal {} is damaged at line {}", path.string(), line_no));
        }
        try {
            apply(event);
        } catch (const std::exception& e) {
            throw Error(ErrorCode::CorruptRecord,
                        fmt::format("journal {} line {} does not decode: {}", path.string(), line_no, e.what()));
        }
        ++events_;
        pos = nl + 1;
        good_end = pos;
    }
    if (good_end < raw.size()) fs::resize_file(path, good_end);
}

void Store::apply(const json& event) {
    const auto type = event.at("type").get<std::string>();
    const auto& record = event.at("record");
    if (type == "entry") {
        auto e = record.get<DiaryEntry>();
        entries_[e.entry_id] = std::move(e);
    } else if (type == "memo") {
        auto m = memo_from_json(record);
        memo_by_entry_[m.entry_id] = m.memo_id;
        memos_[m.memo_id] = std::move(m);
    } else {
        throw Error(ErrorCode::CorruptRecord, fmt::format("unknown journal event '{}'", type));
    }
}

void Store::append(const json& event) {
    const auto body = canonical_dump(event);
    const auto line = sha256_hex(body) + "\t" + body + "\n";
    if (std::fwrite(line.data(), 1, line.size(), journal_) != line.size() || std::fflush(journal_) != 0 ||
        ::fsync(::fileno(journal_)) != 0) {
        throw Error(ErrorCode::StorageUnavailable, fmt::format("journal append failed in {}", dir_.string()));
    }
    ++events_;
}

std::string Store::put_blob(std::string_view bytes) {
    auto sha = sha256_hex(bytes);
    const auto path = dir_ / "blobs" / sha;
    std::unique_lock lock(mu_);
    if (!fs::exists(path)) write_file_atomic(path, bytes);
    return sha;
}

std::string Store::get_blob(const std::string& sha256) const {
    const auto path = dir_ / "blobs" / sha256;
    std::shared_lock lock(mu_);
    if (!fs::exists(path)) throw Error(ErrorCode::StorageUnavailable, fmt::format("blob {} is missing", sha256));
    auto bytes = read_file(path);
    if (sha256_hex(bytes) != sha256) throw Error(ErrorCode::CorruptRecord, fmt::format("blob {} is damaged", sha256));
    return bytes;
}

void Store::save_entry(const DiaryEntry& entry) {
    const json record = entry;
    std::unique_lock lock(mu_);
    append(json{{"type", "entry"}, {"record", record}});
    entries_[entry.entry_id] = entry;
    write_snapshot(entry_path(dir_, entry.entry_id), record);
}

void Store::save_memo(const Memo& memo) {
    const json record = memo_to_json(memo);
    std::unique_lock lock(mu_);
    append(json{{"type", "memo"}, {"record", record}});
    memos_[memo.memo_id] = memo;
    memo_by_entry_[memo.entry_id] = memo.memo_id;
    write_snapshot(memo_path(dir_, memo.memo_id), record);
}

std::optional<DiaryEntry> Store::find_entry(const std::string& entry_id) const {
    std::shared_lock lock(mu_);
    const auto it = entries_.find(entry_id);
    if (it == entries_.end()) return std::nullopt;
    return it->second;
}

std::optional<Memo> Store::find_memo(const std::string& memo_id) const {
    std::shared_lock lock(mu_);
    const auto it = memos_.find(memo_id);
    if (it == memos_.end()) return std::nullopt;
    return it->second;
}

std::optional<Memo> Store::memo_for_entry(const std::string& entry_id) const {
    std::shared_lock lock(mu_);
    const auto it = memo_by_entry_.find(entry_id);
    if (it == memo_by_entry_.end()) return std::nullopt;
    return memos_.at(it->second);
}

std::vector<DiaryEntry> Store::entries_for_channel(const std::string& channel_id) const {
    std::vector<DiaryEntry> out;
    {
        std::shared_lock lock(mu_);
        for (const auto& [_, e] : entries_) {
            if (e.channel_id == channel_id) out.push_back(e);
        }
    }
    std::sort(out.begin(), out.end(), entry_before);
    return out;
}

std::vector<DiaryEntry> Store::all_entries() const {
    std::shared_lock lock(mu_);
    std::vector<DiaryEntry> out;
    out.reserve(entries_.size());
    for (const auto& [_, e] : entries_) out.push_back(e);
    return out;
}

std::vector<Memo> Store::all_memos() const {
    std::shared_lock lock(mu_);
    std::vector<Memo> out;
    out.reserve(memos_.size());
    for (const auto& [_, m] : memos_) out.push_back(m);
    return out;
}

std::size_t Store::journal_length() const {
    std::shared_lock lock(mu_);
    return events_;
}

}  // namespace cuediary
