#include "profcat/service.hpp"

#include "profcat/error.hpp"

#include <httplib.h>
#include <json.hpp>

#include <fstream>

namespace profcat {

using nlohmann::json;

namespace {

struct HttpError : Error {
    int status;
    HttpError(int s, const std::string& msg) : Error(msg), status(s) {}
};

void send_json(httplib::Response& res, const json& body, int status = 200)
{
    res.status = status;
    res.set_content(body.dump(), "application/json");
}

json descriptor_ref(const Descriptor& d, const std::string& lang)
{
    return {{"code", d.code}, {"label", d.display(lang)}};
}

json entries_json(const ResultDocument& doc, const Thesaurus* thesaurus, const std::string& lang,
                  const Model& model)
{
    json out = json::array();
    for (const auto& e : doc.entries()) {
        json j{{"code", e.code}, {"manual", e.manual}, {"explainable", model.profiles.contains(e.code)}};
        if (e.weight)
            j["weight"] = *e.weight;
        if (thesaurus) {
            if (const auto* d = thesaurus->find(e.code))
                j["label"] = d->display(lang);
        }
        out.push_back(std::move(j));
    }
    return out;
}

json parse_body(const httplib::Request& req)
{
    try {
        return req.body.empty() ? json::object() : json::parse(req.body);
    } catch (const json::parse_error& e) {
        throw HttpError(400, std::string("malformed JSON body: ") + e.what());
    }
}

std::string string_field(const json& body, const char* key)
{
    auto it = body.find(key);
    if (it == body.end() || it->is_null())
        return {};
    if (!it->is_string())
        throw HttpError(400, std::string("field '") + key + "' must be a string");
    return it->get<std::string>();
}

} // namespace

Service::Service(std::shared_ptr<const Indexer> indexer, std::optional<Thesaurus> thesaurus, ServiceOptions options)
    : indexer_(std::move(indexer)), thesaurus_(std::move(thesaurus)), options_(std::move(options)),
      server_(std::make_unique<httplib::Server>())
{
    install_routes();
}

Service::~Service() { stop(); }

bool Service::listen(const std::string& host, int port) { return server_->listen(host, port); }

int Service::bind_any_port(const std::string& host) { return server_->bind_to_any_port(host); }

bool Service::listen_after_bind() { return server_->listen_after_bind(); }

void Service::stop()
{
    if (server_)
        server_->stop();
}

bool Service::running() const { return server_ && server_->is_running(); }

std::shared_ptr<Service::Session> Service::find_session(const std::string& id) const
{
    std::lock_guard lock(sessions_mutex_);
    auto it = sessions_.find(id);
    if (it == sessions_.end())
        throw HttpError(404, "unknown session " + id);
    return it->second;
}

std::shared_ptr<Service::Session> Service::create_session(std::string& id)
{
    std::lock_guard lock(sessions_mutex_);
    id = "s" + std::to_string(next_session_++);
    auto s = std::make_shared<Session>();
    sessions_.emplace(id, s);
    return s;
}

void Service::install_routes()
{
    auto& srv = *server_;

    srv.set_exception_handler([](const httplib::Request&, httplib::Response& res, std::exception_ptr ep) {
        int status = 500;
        std::string message = "internal error";
        try {
            std::rethrow_exception(ep);
        } catch (const HttpError& e) {
            status = e.status;
            message = e.what();
        } catch (const NotFoundError& e) {
            status = 404;
            message = e.what();
        } catch (const ParseError& e) {
            status = 400;
            message = e.what();
        } catch (const ConfigError& e) {
            status = 400;
            message = e.what();
        } catch (const json::exception& e) {
            status = 400;
            message = std::string("malformed request: ") + e.what();
        } catch (const std::invalid_argument&) {
            status = 400;
            message = "malformed numeric parameter";
        } catch (const std::out_of_range&) {
            status = 400;
            message = "numeric parameter out of range";
        } catch (const Error& e) {
            status = 409;
            message = e.what();
        } catch (...) {
        }
        send_json(res, {{"error", message}}, status);
    });
    srv.set_post_routing_handler([](const httplib::Request&, httplib::Response& res) {
        res.set_header("Access-Control-Allow-Origin", "*");
    });
    srv.Options(R"(/v1/.*)", [](const httplib::Request&, httplib::Response& res) {
        res.set_header("Access-Control-Allow-Methods", "GET, POST, OPTIONS");
        res.set_header("Access-Control-Allow-Headers", "Content-Type");
        res.status = 204;
    });

    srv.Get("/v1/health", [this](const httplib::Request&, httplib::Response& res) {
        send_json(res, {{"status", "ok"},
                        {"profiles", indexer_->model().profiles.size()},
                        {"thesaurus", thesaurus_.has_value()}});
    });

    srv.Post("/v1/index", [this](const httplib::Request& req, httplib::Response& res) {
        std::string text, doc_id, session_id, format;
        int k = options_.default_k;
        if (req.is_multipart_form_data()) {
            if (!req.has_file("file"))
                throw HttpError(400, "multipart upload needs a 'file' part");
            const auto& file = req.get_file_value("file");
            text = file.content;
            doc_id = file.filename;
            if (req.has_file("k"))
                k = std::stoi(req.get_file_value("k").content);
            if (req.has_file("session"))
                session_id = req.get_file_value("session").content;
            if (req.has_file("format"))
                format = req.get_file_value("format").content;
            if (req.has_file("doc_id"))
                doc_id = req.get_file_value("doc_id").content;
        } else {
            auto body = parse_body(req);
            if (!body.is_object() || !body.contains("text"))
                throw HttpError(400, "body must be an object with a 'text' field");
            text = string_field(body, "text");
            doc_id = string_field(body, "doc_id");
            session_id = string_field(body, "session");
            format = string_field(body, "format");
            if (body.contains("k")) {
                if (!body["k"].is_number_integer())
                    throw HttpError(400, "field 'k' must be an integer");
                k = body["k"].get<int>();
            }
        }
        if (k < 1)
            throw HttpError(400, "k must be >= 1");
        FormatHint hint = format.empty() ? options_.default_format : parse_format_hint(format);

        std::shared_ptr<Session> session =
            session_id.empty() ? create_session(session_id) : find_session(session_id);
        std::lock_guard lock(session->mutex);
        if (doc_id.empty())
            doc_id = "doc-" + std::to_string(session->order.size() + 1);
        if (session->docs.contains(doc_id))
            throw HttpError(409, "document " + doc_id + " already exists in session " + session_id);

        auto prepared = indexer_->prepare(text, hint, doc_id);
        auto ranked = indexer_->index(prepared.features, k);
        SessionDoc sd{std::move(prepared), ResultDocument(ranked)};
        const Thesaurus* th = thesaurus_ ? &*thesaurus_ : nullptr;
        json out{{"session", session_id},
                 {"doc_id", doc_id},
                 {"k", k},
                 {"empty_document", ranked.empty_document},
                 {"text", sd.prepared.text},
                 {"entries", entries_json(sd.result, th, options_.lang, indexer_->model())}};
        session->docs.emplace(doc_id, std::move(sd));
        session->order.push_back(doc_id);
        send_json(res, out);
    });

    srv.Get(R"(/v1/descriptor/([^/]+))", [this](const httplib::Request& req, httplib::Response& res) {
        if (!thesaurus_)
            throw HttpError(404, "no thesaurus loaded");
        std::string code = req.matches[1];
        std::string lang = req.has_param("lang") ? req.get_param_value("lang") : options_.lang;
        auto n = thesaurus_->neighborhood(code);
        const auto* d = thesaurus_->find(code);
        auto refs = [&](const std::vector<const Descriptor*>& v) {
            json a = json::array();
            for (const auto* x : v)
                a.push_back(descriptor_ref(*x, lang));
            return a;
        };
        json profile = json::array();
        if (auto it = indexer_->model().profiles.find(code); it != indexer_->model().profiles.end()) {
            for (const auto& [f, w] : it->second.associates())
                profile.push_back({{"feature", f}, {"weight", w}});
        }
        send_json(res, {{"code", d->code},
                        {"label", d->display(lang)},
                        {"labels", d->labels},
                        {"broader", refs(n.broader)},
                        {"narrower", refs(n.narrower)},
                        {"related", refs(n.related)},
                        {"field", {{"id", d->field_id}, {"label", n.field}}},
                        {"associates", profile}});
    });

    srv.Get("/v1/search", [this](const httplib::Request& req, httplib::Response& res) {
        if (!thesaurus_)
            throw HttpError(404, "no thesaurus loaded");
        std::string q = req.has_param("q") ? req.get_param_value("q") : "";
        std::string lang = req.has_param("lang") ? req.get_param_value("lang") : options_.lang;
        json out = json::array();
        for (const auto* d : thesaurus_->search(q, lang))
            out.push_back(descriptor_ref(*d, lang));
        send_json(res, out);
    });

    auto session_json = [this](const std::string& id, Session& s) {
        const Thesaurus* th = thesaurus_ ? &*thesaurus_ : nullptr;
        json docs = json::array();
        for (const auto& doc_id : s.order) {
            const auto& sd = s.docs.at(doc_id);
            docs.push_back({{"doc_id", doc_id},
                            {"entries", entries_json(sd.result, th, options_.lang, indexer_->model())},
                            {"added", sd.result.added()},
                            {"deleted", sd.result.deleted()},
                            {"saved", sd.result.saved()}});
        }
        return json{{"session", id}, {"documents", docs}};
    };

    srv.Get(R"(/v1/session/([^/]+))", [this, session_json](const httplib::Request& req, httplib::Response& res) {
        std::string id = req.matches[1];
        auto s = find_session(id);
        std::lock_guard lock(s->mutex);
        send_json(res, session_json(id, *s));
    });

    auto pick_doc = [](Session& s, const std::string& doc_id) -> SessionDoc& {
        if (doc_id.empty()) {
            if (s.order.size() != 1)
                throw HttpError(400, "doc_id is required for sessions with several documents");
            return s.docs.at(s.order.front());
        }
        auto it = s.docs.find(doc_id);
        if (it == s.docs.end())
            throw HttpError(404, "unknown document " + doc_id);
        return it->second;
    };

    srv.Post(R"(/v1/session/([^/]+)/amend)", [this, pick_doc](const httplib::Request& req, httplib::Response& res) {
        std::string id = req.matches[1];
        auto s = find_session(id);
        auto body = parse_body(req);
        if (!body.is_object())
            throw HttpError(400, "body must be an object");
        std::string add = string_field(body, "add");
        std::string del = string_field(body, "delete");
        if (add.empty() == del.empty())
            throw HttpError(400, "exactly one of 'add' or 'delete' is required");
        std::lock_guard lock(s->mutex);
        auto& sd = pick_doc(*s, string_field(body, "doc_id"));
        if (!add.empty()) {
            if (thesaurus_ && !thesaurus_->contains(add))
                throw HttpError(404, "unknown descriptor " + add);
            sd.result.add(add);
        } else {
            sd.result.remove(del);
        }
        const Thesaurus* th = thesaurus_ ? &*thesaurus_ : nullptr;
        send_json(res, {{"session", id},
                        {"doc_id", sd.result.doc_id()},
                        {"entries", entries_json(sd.result, th, options_.lang, indexer_->model())},
                        {"added", sd.result.added()},
                        {"deleted", sd.result.deleted()},
                        {"saved", sd.result.saved()}});
    });

    srv.Post(R"(/v1/session/([^/]+)/save)", [this](const httplib::Request& req, httplib::Response& res) {
        std::string id = req.matches[1];
        auto s = find_session(id);
        std::lock_guard lock(s->mutex);
        std::vector<ResultDocument> docs;
        for (const auto& doc_id : s->order)
            docs.push_back(s->docs.at(doc_id).result);
        auto xml = format_result_xml(docs);
        if (!options_.output_dir.empty()) {
            auto path = options_.output_dir / (id + ".xml");
            std::ofstream out(path, std::ios::binary);
            if (!out || !(out << xml))
                throw std::runtime_error("cannot write " + path.string());
            res.set_header("X-Saved-Path", path.string());
        }
        for (auto& [_, sd] : s->docs)
            sd.result.mark_saved();
        res.set_content(xml, "application/xml");
    });

    srv.Get(R"(/v1/session/([^/]+)/explain/([^/]+))",
            [this, pick_doc](const httplib::Request& req, httplib::Response& res) {
                std::string id = req.matches[1];
                std::string code = req.matches[2];
                auto s = find_session(id);
                std::lock_guard lock(s->mutex);
                auto& sd = pick_doc(*s, req.has_param("doc_id") ? req.get_param_value("doc_id") : "");
                auto ex = indexer_->explain(sd.prepared, code);
                json matched = json::array();
                for (const auto& m : ex.matched)
                    matched.push_back(
                        {{"feature", m.feature}, {"profile_weight", m.profile_weight}, {"doc_count", m.doc_count}});
                json spans = json::array();
                for (const auto& sp : ex.spans)
                    spans.push_back({{"begin", sp.begin}, {"end", sp.end}});
                send_json(res, {{"code", code},
                                {"doc_id", sd.result.doc_id()},
                                {"matched", matched},
                                {"spans", spans},
                                {"text_length", sd.prepared.text.size()}});
            });
}

} // namespace profcat
