#pragma once

#include "cuediary/error.hpp"
#include "cuediary/service.hpp"

#include <memory>
#include <string>
#include <thread>

namespace httplib {
class Server;
}

namespace cuediary {

/// HTTP status for an error code (404 unknown ids, 409 state conflicts,
/// 413/415 payload problems, 422 validation, 503 storage).
int http_status(ErrorCode code);

json error_body(const Error& e);
json timeline_to_json(const std::vector<TimelineItem>& items);
json summary_to_json(const Summary& s);

/// Routes:
///   POST /channels/{id}/entries            JSON or multipart; 202 + acknowledgment
///   GET  /channels/{id}/entries?order=chronological
///   GET  /channels/{id}/timeline
///   GET  /entries/{id}
///   POST /entries/{id}/notes               {"text"}
///   GET  /entries/{id}/memo
///   GET  /memos/{id}
///   POST /memos/{id}/edits                 {"edits": [{"op", "value"}, ...]}
///   POST /memos/{id}/submit
///   GET  /memos/{id}/summary
///   GET  /memos/{id}/activities?page=1|2
///   GET  /healthz
class ApiServer {
public:
    explicit ApiServer(DiaryService& service);
    ~ApiServer();
    ApiServer(const ApiServer&) = delete;
    ApiServer& operator=(const ApiServer&) = delete;

    /// Binds and serves in a background thread. Port 0 picks a free port.
    int start(const std::string& host = "127.0.0.1", int port = 0);
    /// Binds and serves on the calling thread until stop().
    void run(const std::string& host, int port);
    void stop();

private:
    DiaryService& service_;
    std::unique_ptr<httplib::Server> server_;
    std::thread thread_;
};

}  // namespace cuediary
