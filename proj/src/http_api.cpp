#include "cuediary/http_api.hpp"

#include "cuediary/hashing.hpp"

#include <httplib.h>
#include <fmt/format.h>
#include <spdlog/spdlog.h>

namespace cuediary {

namespace {

constexpr const char* kJson = "application/json";

void reply(httplib::Response& res, int status, const json& body) {
    res.status = status;
    res.set_content(body.dump(), kJson);
}

void reply_error(httplib::Response& res, const Error& e) {
    reply(res, http_status(e.code()), error_body(e));
}

// Runs a handler and turns domain errors into error bodies.
template <typename Fn>
httplib::Server::Handler guarded(Fn fn) {
    return [fn](const httplib::Request& req, httplib::Response& res) {
        try {
            fn(req, res);
        } catch (const Error& e) {
            reply_error(res, e);
        } catch (const json::exception& e) {
            reply_error(res, Error(ErrorCode::InvalidArgument, fmt::format("bad request body: {}", e.what())));
        } catch (const std::exception& e) {
            spdlog::error("{} {}: {}", req.method, req.path, e.what());
            reply(res, 500, json{{"error", "Internal"}, {"message", e.what()}});
        }
    };
}

json parse_body(const httplib::Request& req) {
    if (req.body.empty()) return json::object();
    auto j = json::parse(req.body, nullptr, false);
    if (j.is_discarded()) throw Error(ErrorCode::InvalidArgument, "request body is not valid JSON");
    return j;
}

std::optional<int> parse_offset(const std::string& s) {
    if (s.empty()) return std::nullopt;
    try {
        std::size_t used = 0;
        const int v = std::stoi(s, &used);
        if (used == s.size()) return v;
    } catch (const std::exception&) {
    }
    throw Error(ErrorCode::InvalidArgument, fmt::format("utc_offset_minutes '{}' is not an integer", s));
}

struct ParsedPost {
    std::optional<std::string> participant_id;
    std::optional<int> utc_offset;
    PostPayload payload;
};

ParsedPost parse_post(const httplib::Request& req) {
    ParsedPost p;
    if (req.is_multipart_form_data()) {
        for (const auto& [name, part] : req.files) {
            if (!part.filename.empty()) {
                p.payload.attachments.push_back({part.content_type, part.content});
            } else if (name == "text") {
                p.payload.text = part.content;
            } else if (name == "participant_id") {
                p.participant_id = part.content;
            } else if (name == "utc_offset_minutes") {
                p.utc_offset = parse_offset(part.content);
            }
        }
        return p;
    }
    const auto j = parse_body(req);
    if (j.contains("participant_id")) p.participant_id = j["participant_id"].get<std::string>();
    if (j.contains("utc_offset_minutes")) p.utc_offset = j["utc_offset_minutes"].get<int>();
    if (j.contains("text") && !j["text"].is_null()) p.payload.text = j["text"].get<std::string>();
    for (const auto& a : j.value("attachments", json::array())) {
        p.payload.attachments.push_back({a.at("mime").get<std::string>(),
                                         base64_decode(a.at("content_base64").get<std::string>())});
    }
    return p;
}

json ack_to_json(const Acknowledgment& a) {
    return json{{"entry_id", a.entry_id}, {"ack_text", a.ack_text}, {"memo_ready", a.memo_ready}};
}

json memo_view(const Memo& m) {
    auto j = memo_to_json(m);
    j["MemoReady"] = m.state == MemoState::Generated;
    return j;
}

}  // namespace

int http_status(ErrorCode code) {
    switch (code) {
        case ErrorCode::UnknownChannel:
        case ErrorCode::UnknownEntry:
        case ErrorCode::UnknownMemo:
        case ErrorCode::UnknownStudy:
            return 404;
        case ErrorCode::MemoSubmitted:
        case ErrorCode::MemoNotReady:
            return 409;
        case ErrorCode::PayloadTooLarge:
            return 413;
        case ErrorCode::UnsupportedMime:
            return 415;
        case ErrorCode::EmptyPost:
        case ErrorCode::MixedUnsupported:
        case ErrorCode::UnknownOption:
        case ErrorCode::IncompleteMemo:
        case ErrorCode::PageOutOfRange:
        case ErrorCode::VocabularyViolation:
        case ErrorCode::InvalidArgument:
            return 422;
        case ErrorCode::StorageUnavailable:
            return 503;
        default:
            return 500;
    }
}

json error_body(const Error& e) {
    json j{{"error", to_string(e.code())}, {"message", e.what()}};
    if (!e.detail().empty()) j["detail"] = e.detail();
    return j;
}

json summary_to_json(const Summary& s) {
    return json{{"memo_id", s.memo_id}, {"lines", s.lines}, {"text", s.text()}};
}

json timeline_to_json(const std::vector<TimelineItem>& items) {
    json out = json::array();
    for (const auto& item : items) {
        json j{{"entry", item.entry}};
        j["memo"] = item.memo ? memo_to_json(*item.memo) : json(nullptr);
        j["summary"] = item.summary ? summary_to_json(*item.summary) : json(nullptr);
        out.push_back(std::move(j));
    }
    return out;
}

ApiServer::ApiServer(DiaryService& service) : service_(service), server_(std::make_unique<httplib::Server>()) {
    auto& s = *server_;
    auto& svc = service_;
    s.set_payload_max_length(4 * kAttachmentLimitBytes);
    s.set_error_handler([](const httplib::Request&, httplib::Response& res) {
        if (!res.body.empty()) return;
        if (res.status == 413) {
            reply(res, 413, error_body(Error(ErrorCode::PayloadTooLarge, "request body exceeds the upload limit")));
        } else if (res.status == 404) {
            reply(res, 404, json{{"error", "NotFound"}, {"message", "no such route"}});
        }
    });

    s.Post(R"(/channels/([^/]+)/entries)", guarded([&svc](const httplib::Request& req, httplib::Response& res) {
        const auto post = parse_post(req);
        const auto ack = svc.receive_post(req.matches[1], post.participant_id, post.payload, post.utc_offset);
        reply(res, 202, ack_to_json(ack));
    }));

    s.Get(R"(/channels/([^/]+)/entries)", guarded([&svc](const httplib::Request& req, httplib::Response& res) {
        const auto order = req.has_param("order") ? req.get_param_value("order") : "chronological";
        if (order != "chronological") {
            throw Error(ErrorCode::InvalidArgument, fmt::format("unsupported order '{}'", order), "order");
        }
        reply(res, 200, json(svc.entries(req.matches[1])));
    }));

    s.Get(R"(/channels/([^/]+)/timeline)", guarded([&svc](const httplib::Request& req, httplib::Response& res) {
        reply(res, 200, timeline_to_json(svc.timeline(req.matches[1])));
    }));

    s.Get(R"(/entries/([^/]+))", guarded([&svc](const httplib::Request& req, httplib::Response& res) {
        reply(res, 200, json(svc.entry(req.matches[1])));
    }));

    s.Post(R"(/entries/([^/]+)/notes)", guarded([&svc](const httplib::Request& req, httplib::Response& res) {
        const auto body = parse_body(req);
        reply(res, 201, json(svc.append_thread_note(req.matches[1], body.at("text").get<std::string>())));
    }));

    s.Get(R"(/entries/([^/]+)/memo)", guarded([&svc](const httplib::Request& req, httplib::Response& res) {
        reply(res, 200, memo_view(svc.memo_for_entry(req.matches[1])));
    }));

    s.Get(R"(/memos/([^/]+))", guarded([&svc](const httplib::Request& req, httplib::Response& res) {
        reply(res, 200, memo_view(svc.memo(req.matches[1])));
    }));

    s.Post(R"(/memos/([^/]+)/edits)", guarded([&svc](const httplib::Request& req, httplib::Response& res) {
        const auto body = parse_body(req);
        const auto& list = body.is_array() ? body : body.at("edits");
        std::vector<MemoEdit> edits;
        for (const auto& e : list) edits.push_back(edit_from_json(e));
        reply(res, 200, memo_view(svc.edit_memo(req.matches[1], edits)));
    }));

    s.Post(R"(/memos/([^/]+)/submit)", guarded([&svc](const httplib::Request& req, httplib::Response& res) {
        reply(res, 200, summary_to_json(svc.submit(req.matches[1])));
    }));

    s.Get(R"(/memos/([^/]+)/summary)", guarded([&svc](const httplib::Request& req, httplib::Response& res) {
        reply(res, 200, summary_to_json(svc.summary(req.matches[1])));
    }));

    s.Get(R"(/memos/([^/]+)/activities)", guarded([&svc](const httplib::Request& req, httplib::Response& res) {
        int page = 1;
        if (req.has_param("page")) {
            const auto raw = req.get_param_value("page");
            if (raw.empty() || raw.find_first_not_of("0123456789") != std::string::npos || raw.size() > 3) {
                throw Error(ErrorCode::PageOutOfRange, fmt::format("page '{}' is not 1 or 2", raw));
            }
            page = std::stoi(raw);
        }
        reply(res, 200, json{{"page", page}, {"activities", svc.activities(req.matches[1], page)}});
    }));

    s.Get("/healthz", [&svc](const httplib::Request&, httplib::Response& res) {
        reply(res, 200, json{{"status", "ok"}, {"study_id", svc.study().study_id}, {"pending_jobs", svc.pending_jobs()}});
    });
}

ApiServer::~ApiServer() {
    stop();
}

int ApiServer::start(const std::string& host, int port) {
    const int bound = port == 0 ? server_->bind_to_any_port(host) : (server_->bind_to_port(host, port) ? port : -1);
    if (bound < 0) throw Error(ErrorCode::StorageUnavailable, fmt::format("cannot bind {}:{}", host, port));
    thread_ = std::thread([this] { server_->listen_after_bind(); });
    server_->wait_until_ready();
    return bound;
}

void ApiServer::run(const std::string& host, int port) {
    if (!server_->bind_to_port(host, port)) {
        throw Error(ErrorCode::StorageUnavailable, fmt::format("cannot bind {}:{}", host, port));
    }
    spdlog::info("listening on {}:{}", host, port);
    server_->listen_after_bind();
}

void ApiServer::stop() {
    if (server_) server_->stop();
    if (thread_.joinable()) thread_.join();
}

}  // namespace cuediary
