#pragma once

#include "profcat/indexer.hpp"
#include "profcat/result_xml.hpp"
#include "profcat/thesaurus.hpp"

#include <filesystem>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>

namespace httplib {
class Server;
}

namespace profcat {

struct ServiceOptions {
    int default_k = 6;
    FormatHint default_format = FormatHint::automatic;
    std::string lang = "en";
    std::filesystem::path output_dir; // saved session XML goes here when set
};

// HTTP backend for the review workflow, versioned under /v1:
//
//   POST /v1/index                      index one text (JSON or multipart upload)
//   GET  /v1/descriptor/{code}          labels, broader/narrower/related, field
//   GET  /v1/search?q=&lang=            descriptor search
//   GET  /v1/session/{id}               session state
//   POST /v1/session/{id}/amend         add or delete a code
//   POST /v1/session/{id}/save          result XML, also written to output_dir
//   GET  /v1/session/{id}/explain/{code}?doc_id=   matched associates and spans
//
// The model is shared read-only; each session has its own lock.
class Service {
public:
    Service(std::shared_ptr<const Indexer> indexer, std::optional<Thesaurus> thesaurus, ServiceOptions options);
    ~Service();
    Service(const Service&) = delete;
    Service& operator=(const Service&) = delete;

    // Blocks until stop() is called. Returns false if the socket cannot be bound.
    bool listen(const std::string& host, int port);
    // Binds an ephemeral port and returns it (or -1); call listen_after_bind().
    int bind_any_port(const std::string& host);
    bool listen_after_bind();
    void stop();
    bool running() const;

private:
    struct SessionDoc {
        Indexer::Prepared prepared;
        ResultDocument result;
    };
    struct Session {
        std::mutex mutex;
        std::map<std::string, SessionDoc> docs;
        std::vector<std::string> order;
    };

    void install_routes();
    std::shared_ptr<Session> find_session(const std::string& id) const;
    std::shared_ptr<Session> create_session(std::string& id);

    std::shared_ptr<const Indexer> indexer_;
    std::optional<Thesaurus> thesaurus_;
    ServiceOptions options_;
    std::unique_ptr<httplib::Server> server_;

    mutable std::mutex sessions_mutex_;
    std::map<std::string, std::shared_ptr<Session>> sessions_;
    unsigned long long next_session_ = 1;
};

} // namespace profcat
