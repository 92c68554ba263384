#include "commsense/service.hpp"

#include <algorithm>
#include <cctype>
#include <chrono>
#include <cstdlib>
#include <fstream>
#include <set>
#include <sstream>

#include <openssl/evp.h>
#include <openssl/rand.h>

#include "commsense/board.hpp"
#include "commsense/error.hpp"
#include "commsense/http_providers.hpp"
#include "commsense/log.hpp"
#include "commsense/navigation.hpp"
#include "commsense/overview.hpp"

namespace commsense {

using json = nlohmann::json;
namespace fs = std::filesystem;

namespace {

// A request problem tied to one field of the body or query.
class FieldError : public InvalidArgument {
public:
    FieldError(std::string field, const std::string& what)
        : InvalidArgument(field + ": " + what), field_(std::move(field)) {}
    const std::string& field() const noexcept { return field_; }

private:
    std::string field_;
};

ProviderSettings provider_from_json(const json& j, const char* name) {
    ProviderSettings p;
    if (j.is_null()) return p;
    if (!j.is_object()) throw InvalidArgument(std::string("providers.") + name + " must be an object");
    p.base_url = j.value("base_url", "");
    p.model = j.value("model", "");
    p.api_key_env = j.value("api_key_env", "");
    if (j.contains("api_key")) {
        throw InvalidArgument(std::string("providers.") + name +
                              ".api_key is not accepted; put the key in an environment variable and name it in "
                              "api_key_env");
    }
    return p;
}

std::string read_file(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw InvalidArgument("cannot read '" + path.string() + "'");
    std::ostringstream os;
    os << in.rdbuf();
    return os.str();
}

void write_file_atomic(const fs::path& path, std::string_view bytes) {
    fs::create_directories(path.parent_path());
    auto tmp = path;
    tmp += ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw Error("cannot write '" + tmp.string() + "'");
        out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
    }
    fs::rename(tmp, path);
}

RemoteEndpoint endpoint_for(const ProviderSettings& p, std::chrono::milliseconds timeout) {
    RemoteEndpoint ep{p.base_url, p.model, "", timeout};
    if (!p.api_key_env.empty()) {
        const char* key = std::getenv(p.api_key_env.c_str());
        if (key == nullptr || *key == '\0') {
            log::warning("environment variable " + p.api_key_env + " is not set; calling " + p.base_url +
                         " without a key");
        } else {
            ep.api_key = key;
        }
    }
    return ep;
}

std::string random_id() {
    unsigned char bytes[12];
    if (RAND_bytes(bytes, sizeof bytes) != 1) throw Error("random source unavailable");
    static const char* hex = "0123456789abcdef";
    std::string out;
    for (auto b : bytes) {
        out.push_back(hex[b >> 4]);
        out.push_back(hex[b & 15]);
    }
    return out;
}

bool valid_session_id(std::string_view id) {
    return !id.empty() && id.size() <= 64 &&
           std::all_of(id.begin(), id.end(), [](unsigned char c) { return std::isalnum(c) || c == '-' || c == '_'; });
}

} // namespace

void to_json(json& j, const ProviderSettings& p) {
    j = json{{"base_url", p.base_url}, {"model", p.model}, {"api_key_env", p.api_key_env}};
}

void EngineConfig::validate() const {
    triggers.validate();
    pipeline.validate();
    if (generator_timeout.count() <= 0) throw InvalidArgument("providers.generator.timeout_ms must be positive");
    parse_bind(bind);
}

void to_json(json& j, const EngineConfig& c) {
    json gen = c.generator;
    gen["timeout_ms"] = c.generator_timeout.count();
    j = json{{"corpus", c.corpus_path.string()},
             {"triggers", c.triggers},
             {"pipeline", c.pipeline},
             {"providers", {{"embedding", c.embedding}, {"sentiment", c.sentiment}, {"generator", gen}}},
             {"bind", c.bind},
             {"cache_dir", c.cache_dir.string()},
             {"session_dir", c.session_dir.string()},
             {"static_dir", c.static_dir.string()},
             {"offline", c.offline}};
}

void from_json(const json& j, EngineConfig& c) {
    static const std::set<std::string> known{"corpus",   "triggers",    "pipeline",   "providers", "bind",
                                             "cache_dir", "session_dir", "static_dir", "offline"};
    if (!j.is_object()) throw InvalidArgument("configuration must be a JSON object");
    for (const auto& [key, _] : j.items()) {
        if (!known.count(key)) throw InvalidArgument("unknown configuration key '" + key + "'");
    }
    c = EngineConfig{};
    c.corpus_path = j.value("corpus", "");
    if (j.contains("triggers")) c.triggers = j["triggers"].get<TriggerConfig>();
    if (j.contains("pipeline")) c.pipeline = j["pipeline"].get<PipelineParams>();
    if (j.contains("providers")) {
        const auto& p = j["providers"];
        c.embedding = provider_from_json(p.value("embedding", json()), "embedding");
        c.sentiment = provider_from_json(p.value("sentiment", json()), "sentiment");
        const auto gen = p.value("generator", json());
        c.generator = provider_from_json(gen, "generator");
        if (gen.is_object() && gen.contains("timeout_ms")) {
            c.generator_timeout = std::chrono::milliseconds(gen["timeout_ms"].get<long>());
        }
    }
    c.bind = j.value("bind", c.bind);
    c.cache_dir = j.value("cache_dir", "");
    c.session_dir = j.value("session_dir", "");
    c.static_dir = j.value("static_dir", "");
    c.offline = j.value("offline", false);
}

EngineConfig load_config(const fs::path& path) {
    const auto text = read_file(path);
    EngineConfig c;
    try {
        c = json::parse(text).get<EngineConfig>();
    } catch (const json::exception& e) {
        throw InvalidArgument("config '" + path.string() + "': " + e.what());
    }
    const auto base = path.parent_path();
    for (fs::path* p : {&c.corpus_path, &c.cache_dir, &c.session_dir, &c.static_dir}) {
        if (!p->empty() && p->is_relative()) *p = base / *p;
    }
    c.validate();
    return c;
}

std::pair<std::string, int> parse_bind(const std::string& bind) {
    const auto colon = bind.rfind(':');
    if (colon == std::string::npos) return {bind.empty() ? "127.0.0.1" : bind, 8080};
    const auto host = bind.substr(0, colon);
    int port = 0;
    try {
        std::size_t used = 0;
        port = std::stoi(bind.substr(colon + 1), &used);
        if (used != bind.size() - colon - 1) throw std::invalid_argument("trailing");
    } catch (const std::exception&) {
        throw InvalidArgument("bind: bad port in '" + bind + "'");
    }
    if (port < 0 || port > 65535) throw InvalidArgument("bind: port out of range in '" + bind + "'");
    return {host.empty() ? "127.0.0.1" : host, port};
}

std::string sha256_hex(std::string_view bytes) {
    unsigned char digest[EVP_MAX_MD_SIZE];
    unsigned int len = 0;
    if (EVP_Digest(bytes.data(), bytes.size(), digest, &len, EVP_sha256(), nullptr) != 1) {
        throw Error("SHA-256 failed");
    }
    static const char* hex = "0123456789abcdef";
    std::string out;
    for (unsigned int i = 0; i < len; ++i) {
        out.push_back(hex[digest[i] >> 4]);
        out.push_back(hex[digest[i] & 15]);
    }
    return out;
}

std::string pipeline_cache_key(std::string_view corpus_bytes, const PipelineParams& params,
                               const std::string& embedder, const std::string& sentiment,
                               const std::string& generator) {
    // nlohmann orders object keys, so dump() is canonical.
    const json identity{{"pipeline", params},
                        {"embedder", embedder},
                        {"sentiment", sentiment},
                        {"generator", generator},
                        {"artifact_version", 1}};
    std::string material = sha256_hex(corpus_bytes);
    material += '\n';
    material += identity.dump();
    return sha256_hex(material);
}

Engine::Engine(EngineConfig config) : config_(std::move(config)) { config_.validate(); }

Engine::Engine(EngineConfig config, std::shared_ptr<const Workspace> ws,
               std::unique_ptr<TextGenerator> reminder_generator)
    : config_(std::move(config)), ws_(std::move(ws)), reminder_generator_(std::move(reminder_generator)) {
    config_.validate();
    if (!ws_) throw InvalidArgument("engine needs a workspace");
    restore_sessions();
    status_ = Status::ready;
}

Engine::~Engine() { wait_idle(); }

void Engine::build_providers() {
    if (config_.offline || !config_.embedding.enabled()) {
        embedder_ = std::make_unique<HashedBagOfWordsEmbedder>(config_.pipeline.fallback_embedding_dim);
    } else {
        embedder_ = std::make_unique<RemoteEmbeddingClient>(endpoint_for(config_.embedding, std::chrono::seconds(60)));
    }
    if (config_.offline || !config_.sentiment.enabled()) {
        sentiment_ = std::make_unique<LexiconSentiment>();
    } else {
        sentiment_ = std::make_unique<RemoteSentimentClient>(endpoint_for(config_.sentiment, std::chrono::seconds(30)));
    }
    if (!config_.offline && config_.generator.enabled()) {
        pipeline_generator_ =
            std::make_unique<ChatCompletionClient>(endpoint_for(config_.generator, std::chrono::seconds(60)));
        reminder_generator_ =
            std::make_unique<ChatCompletionClient>(endpoint_for(config_.generator, std::chrono::seconds(30)));
    }
}

void Engine::start() {
    try {
        const auto t0 = std::chrono::steady_clock::now();
        if (config_.corpus_path.empty()) throw InvalidArgument("no corpus path configured");
        std::string bytes;
        {
            std::ifstream in(config_.corpus_path, std::ios::binary);
            if (!in) throw InvalidArgument("cannot read corpus file '" + config_.corpus_path.string() + "'");
            std::ostringstream os;
            os << in.rdbuf();
            bytes = os.str();
        }
        std::istringstream in(bytes);
        Corpus corpus = parse_corpus(in);
        build_providers();

        report_ = {};
        report_.embedder = embedder_->name();
        report_.sentiment = sentiment_->name();
        report_.generator = pipeline_generator_ ? pipeline_generator_->name() : "";
        report_.cache_key = pipeline_cache_key(bytes, config_.pipeline, report_.embedder, report_.sentiment,
                                               report_.generator);

        std::shared_ptr<const Workspace> ws;
        const fs::path cache_file =
            config_.cache_dir.empty() ? fs::path() : config_.cache_dir / (report_.cache_key + ".cbor");
        if (!cache_file.empty() && fs::exists(cache_file)) {
            try {
                const auto blob = read_file(cache_file);
                ws = std::make_shared<const Workspace>(Workspace::from_json(json::from_cbor(blob)));
                report_.cache_hit = true;
            } catch (const std::exception& e) {
                log::warning("ignoring unreadable pipeline cache " + cache_file.string() + ": " + e.what());
            }
        }
        if (!ws) {
            ws = std::make_shared<const Workspace>(Workspace::build(
                corpus, config_.pipeline, Providers{embedder_.get(), sentiment_.get(), pipeline_generator_.get()}));
            if (!cache_file.empty()) {
                const auto blob = json::to_cbor(ws->to_json());
                write_file_atomic(cache_file, std::string_view(reinterpret_cast<const char*>(blob.data()), blob.size()));
            }
        }
        report_.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        {
            std::lock_guard lock(status_mutex_);
            ws_ = ws;
        }
        restore_sessions();
        std::lock_guard lock(status_mutex_);
        status_ = Status::ready;
        log::info("pipeline " + std::string(report_.cache_hit ? "loaded from cache" : "built") + " in " +
                  std::to_string(report_.seconds) + " s: " + std::to_string(ws->corpus().size()) + " comments, " +
                  std::to_string(ws->scheme().topics.size()) + " topics, " + std::to_string(ws->bins().size()) +
                  " bins");
    } catch (const std::exception& e) {
        std::lock_guard lock(status_mutex_);
        status_ = Status::failed;
        failure_ = e.what();
        throw;
    }
}

Engine::Status Engine::status() const {
    std::lock_guard lock(status_mutex_);
    return status_;
}

std::string Engine::failure() const {
    std::lock_guard lock(status_mutex_);
    return failure_;
}

std::shared_ptr<const Workspace> Engine::workspace() const {
    std::lock_guard lock(status_mutex_);
    return ws_;
}

std::shared_ptr<Engine::Slot> Engine::make_slot(const std::string& id, const std::vector<SessionEvent>& log) {
    auto slot = std::make_shared<Slot>();
    slot->session = std::make_unique<Session>(Session::replay(id, ws_, config_.triggers, log));
    if (!config_.session_dir.empty()) {
        const auto file = config_.session_dir / (id + ".jsonl");
        slot->session->set_sink([file](const SessionEvent& e) {
            std::ofstream out(file, std::ios::app | std::ios::binary);
            out << json(e).dump() << '\n';
            out.flush();
            if (!out) throw Error("cannot append to session log '" + file.string() + "'");
        });
    }
    return slot;
}

void Engine::restore_sessions() {
    if (config_.session_dir.empty()) return;
    fs::create_directories(config_.session_dir);
    std::vector<fs::path> files;
    for (const auto& entry : fs::directory_iterator(config_.session_dir)) {
        if (entry.is_regular_file() && entry.path().extension() == ".jsonl") files.push_back(entry.path());
    }
    std::sort(files.begin(), files.end());
    for (const auto& file : files) {
        const auto id = file.stem().string();
        if (!valid_session_id(id)) continue;
        try {
            std::ifstream in(file);
            std::vector<SessionEvent> events;
            std::string line;
            while (std::getline(in, line)) {
                if (line.empty()) continue;
                events.push_back(json::parse(line).get<SessionEvent>());
            }
            auto slot = make_slot(id, events);
            std::unique_lock lock(sessions_mutex_);
            sessions_[id] = std::move(slot);
        } catch (const std::exception& e) {
            log::error("cannot restore session log " + file.string() + ": " + e.what());
        }
    }
    if (!sessions_.empty()) log::info("restored " + std::to_string(sessions_.size()) + " session(s)");
}

std::string Engine::create_session() {
    if (status() != Status::ready) throw StateError("engine is not ready");
    std::unique_lock lock(sessions_mutex_);
    std::string id;
    do {
        id = random_id();
    } while (sessions_.count(id));
    sessions_[id] = make_slot(id, {});
    return id;
}

bool Engine::has_session(std::string_view id) const {
    std::shared_lock lock(sessions_mutex_);
    return sessions_.find(id) != sessions_.end();
}

std::vector<std::string> Engine::session_ids() const {
    std::shared_lock lock(sessions_mutex_);
    std::vector<std::string> out;
    for (const auto& [id, _] : sessions_) out.push_back(id);
    return out;
}

std::shared_ptr<Engine::Slot> Engine::find_slot(std::string_view id) const {
    std::shared_lock lock(sessions_mutex_);
    const auto it = sessions_.find(id);
    if (it == sessions_.end()) throw NotFound("unknown session '" + std::string(id) + "'");
    return it->second;
}

std::vector<std::shared_future<void>> Engine::request_reminder_text(std::string_view session_id,
                                                                    const std::vector<std::string>& reminder_ids) {
    std::vector<std::shared_future<void>> started;
    if (!reminder_generator_ || reminder_ids.empty()) return started;
    std::vector<ReminderPrompt> prompts;
    with_session(session_id, [&](Session& s) {
        for (const auto& rid : reminder_ids) {
            const auto& r = s.reminder(rid);
            prompts.push_back(reminder_prompt(r.trigger, s.state(), s.workspace(), s.config()));
        }
        return 0;
    });

    std::lock_guard lock(jobs_mutex_);
    jobs_.erase(std::remove_if(jobs_.begin(), jobs_.end(),
                               [](auto& f) { return f.wait_for(std::chrono::seconds(0)) == std::future_status::ready; }),
                jobs_.end());
    for (std::size_t i = 0; i < prompts.size(); ++i) {
        auto job = std::async(std::launch::async, [this, sid = std::string(session_id), rid = reminder_ids[i],
                                                   prompt = prompts[i]] {
                       auto text = generate_reminder_text(prompt, *reminder_generator_);
                       if (!text) return;
                       try {
                           with_session(sid, [&](Session& s) {
                               return s.set_reminder_text(rid, text->summary, text->suggestion);
                           });
                       } catch (const std::exception& e) {
                           log::warning("dropping generated text for reminder " + rid + ": " + e.what());
                       }
                   }).share();
        jobs_.push_back(job);
        started.push_back(std::move(job));
    }
    return started;
}

void Engine::await_reminder_text(const std::vector<std::shared_future<void>>& jobs) const {
    const auto deadline = std::chrono::steady_clock::now() + config_.generator_timeout;
    for (const auto& f : jobs) f.wait_until(deadline);
}

void Engine::wait_idle() {
    std::vector<std::shared_future<void>> jobs;
    {
        std::lock_guard lock(jobs_mutex_);
        jobs.swap(jobs_);
    }
    for (auto& f : jobs) f.wait();
}

// ---- HTTP routing ----

namespace {

ApiResponse json_response(int status, const json& body) { return {status, body.dump(), "application/json", std::nullopt}; }

ApiResponse error_response(int status, const std::string& message, const std::string& field = {}) {
    json body{{"error", message}};
    if (!field.empty()) body["field"] = field;
    return json_response(status, body);
}

json parse_body(const std::string& body) {
    if (body.empty()) return json::object();
    try {
        auto j = json::parse(body);
        if (!j.is_object()) throw FieldError("body", "expected a JSON object");
        return j;
    } catch (const json::parse_error& e) {
        throw FieldError("body", std::string("malformed JSON: ") + e.what());
    }
}

std::string require_string(const json& body, const char* field) {
    if (!body.contains(field)) throw FieldError(field, "required");
    if (!body[field].is_string()) throw FieldError(field, "must be a string");
    return body[field].get<std::string>();
}

std::optional<std::string> optional_string(const json& body, const char* field) {
    if (!body.contains(field) || body[field].is_null()) return std::nullopt;
    if (!body[field].is_string()) throw FieldError(field, "must be a string");
    return body[field].get<std::string>();
}

std::size_t require_index(const json& body, const char* field) {
    if (!body.contains(field)) throw FieldError(field, "required");
    if (!body[field].is_number_unsigned()) throw FieldError(field, "must be a non-negative integer");
    return body[field].get<std::size_t>();
}

std::size_t comment_index(const Workspace& ws, const std::string& id, const char* field) {
    const auto c = ws.corpus().find(id);
    if (!c) throw FieldError(field, "unknown comment '" + id + "'");
    return *c;
}

std::optional<std::string> query_param(const ApiRequest& req, const std::string& key) {
    const auto it = req.query.find(key);
    if (it == req.query.end() || it->second.empty()) return std::nullopt;
    return it->second;
}

std::size_t query_count(const ApiRequest& req, const std::string& key, std::size_t fallback, std::size_t max) {
    const auto v = query_param(req, key);
    if (!v) return fallback;
    std::size_t used = 0;
    unsigned long n = 0;
    try {
        n = std::stoul(*v, &used);
    } catch (const std::exception&) {
        throw FieldError(key, "must be a non-negative integer");
    }
    if (used != v->size() || (*v)[0] == '-') throw FieldError(key, "must be a non-negative integer");
    if (n > max) throw FieldError(key, "must be at most " + std::to_string(max));
    return n;
}

Selection selection_from(const ApiRequest& req, const Workspace& ws) {
    const auto topic = query_param(req, "topic");
    const auto keyword = query_param(req, "keyword");
    if (topic && keyword) throw FieldError("topic", "give either topic or keyword, not both");
    if (topic) {
        if (ws.scheme().find(*topic) == nullptr) throw FieldError("topic", "unknown topic '" + *topic + "'");
        return Selection::topic(*topic);
    }
    if (keyword) {
        if (ws.scheme().find_keyword(*keyword) == nullptr) {
            throw FieldError("keyword", "unknown keyword '" + *keyword + "'");
        }
        return Selection::keyword(*keyword);
    }
    return Selection::all();
}

json comment_json(const Session& s, std::size_t c) {
    const auto& ws = s.workspace();
    const auto& comment = ws.corpus()[c];
    json spans = json::array();
    for (const auto& [term, span] : ws.keyword_spans(c)) {
        const auto* kw = ws.scheme().find_keyword(term);
        spans.push_back({{"keyword", term},
                         {"topic_id", kw ? kw->topic_id : ""},
                         {"start", span.begin},
                         {"end", span.end}});
    }
    const auto topics = ws.topics_of(c);
    return json{{"comment_id", comment.id},
                {"text", comment.text},
                {"sentiment", ws.corpus().sentiment(c)},
                {"topics", std::vector<std::string>(topics.begin(), topics.end())},
                {"spans", spans},
                {"viewed", s.state().viewed_any.count(c) > 0},
                {"useful", s.state().useful.count(c) > 0}};
}

json reminders_json(const Session& s, const std::vector<std::string>& ids) {
    json out = json::array();
    for (const auto& id : ids) out.push_back(s.reminder(id));
    return out;
}

json outcome_json(const Session& s, const EventOutcome& o) {
    json j{{"seq", s.state().seq},
           {"event_seq", o.changed ? json(o.seq) : json(nullptr)},
           {"changed", o.changed},
           {"triggers", o.triggers},
           {"reminders", reminders_json(s, o.new_reminders)}};
    if (o.snippet) j["snippet"] = *o.snippet;
    if (o.thought) j["thought"] = *o.thought;
    if (o.reminder) j["reminder"] = *o.reminder;
    return j;
}

std::vector<std::string_view> split_path(std::string_view path) {
    std::vector<std::string_view> parts;
    std::size_t i = 0;
    while (i < path.size()) {
        while (i < path.size() && path[i] == '/') ++i;
        const auto j = path.find('/', i);
        const auto end = j == std::string_view::npos ? path.size() : j;
        if (end > i) parts.push_back(path.substr(i, end - i));
        i = end;
    }
    return parts;
}

} // namespace

ApiResponse Api::handle(const ApiRequest& request) {
    try {
        return route(request);
    } catch (const FieldError& e) {
        return error_response(400, e.what(), e.field());
    } catch (const InvalidArgument& e) {
        return error_response(400, e.what());
    } catch (const NotFound& e) {
        return error_response(404, e.what());
    } catch (const StateError& e) {
        return error_response(409, e.what());
    } catch (const json::exception& e) {
        return error_response(400, std::string("malformed request: ") + e.what());
    } catch (const ProviderError& e) {
        return error_response(502, e.what());
    } catch (const std::exception& e) {
        log::error(std::string("unhandled error on ") + request.method + " " + request.path + ": " + e.what());
        return error_response(500, e.what());
    }
}

ApiResponse Api::route(const ApiRequest& req) {
    const auto parts = split_path(req.path);
    const auto& m = req.method;

    if (parts.size() == 1 && parts[0] == "healthz" && m == "GET") return json_response(200, {{"status", "ok"}});
    if (parts.size() == 1 && parts[0] == "readyz" && m == "GET") {
        switch (engine_.status()) {
        case Engine::Status::loading: return json_response(503, {{"status", "loading"}});
        case Engine::Status::failed: return json_response(503, {{"status", "failed"}, {"error", engine_.failure()}});
        case Engine::Status::ready: break;
        }
        const auto ws = engine_.workspace();
        const auto& r = engine_.report();
        return json_response(200, {{"status", "ready"},
                                   {"corpus_size", ws->corpus().size()},
                                   {"topics", ws->scheme().topics.size()},
                                   {"bins", ws->bins().size()},
                                   {"pipeline",
                                    {{"cache_key", r.cache_key},
                                     {"cache_hit", r.cache_hit},
                                     {"seconds", r.seconds},
                                     {"embedder", r.embedder},
                                     {"sentiment", r.sentiment},
                                     {"generator", r.generator},
                                     {"topic_origin", ws->scheme().origin}}}});
    }
    if (parts.empty() || parts[0] != "api") throw NotFound("no route for " + m + " " + req.path);

    if (engine_.status() != Engine::Status::ready) {
        return error_response(503, engine_.status() == Engine::Status::failed ? "pipeline failed: " + engine_.failure()
                                                                              : "pipeline is still loading");
    }
    const auto ws = engine_.workspace();

    if (parts.size() == 2 && parts[1] == "config" && m == "GET") {
        json cfg = engine_.config();
        return json_response(200, cfg);
    }
    if (parts.size() == 2 && parts[1] == "topics" && m == "GET") {
        json topics = json::array();
        for (const auto& t : ws->scheme().topics) {
            const auto st = ws->stats(t.topic_id);
            topics.push_back({{"topic_id", t.topic_id},
                              {"category", t.category},
                              {"description", t.description},
                              {"keywords", t.keywords},
                              {"size", st.n_total},
                              {"sentiment", st}});
        }
        return json_response(200, {{"topics", topics},
                                   {"keywords", ws->scheme().keywords},
                                   {"origin", ws->scheme().origin},
                                   {"rings", ws->rings()},
                                   {"corpus", ws->stats()}});
    }
    if (parts.size() == 2 && parts[1] == "sessions") {
        if (m == "POST") {
            const auto id = engine_.create_session();
            return json_response(201, {{"session_id", id}, {"seq", 0}});
        }
        if (m == "GET") return json_response(200, {{"sessions", engine_.session_ids()}});
    }
    if (parts.size() >= 3 && parts[1] == "sessions") {
        const std::string id(parts[2]);
        if (!engine_.has_session(id)) throw NotFound("unknown session '" + id + "'");
        const auto prefix_len = parts[2].data() + parts[2].size() - req.path.data();
        return session_route(req, id, std::string_view(req.path).substr(static_cast<std::size_t>(prefix_len)));
    }
    throw NotFound("no route for " + m + " " + req.path);
}

ApiResponse Api::session_route(const ApiRequest& req, const std::string& id, std::string_view rest) {
    const auto parts = split_path(rest);
    const auto& m = req.method;
    const auto ws = engine_.workspace();
    auto at = [&](std::size_t i, std::string_view v) { return parts.size() > i && parts[i] == v; };

    if (parts.empty() && m == "GET") {
        return engine_.with_session(id, [&](Session& s) {
            return json_response(200, {{"session_id", id}, {"seq", s.state().seq}, {"progress", {
                {"viewed", s.progress(Selection::all()).viewed}, {"total", ws->corpus().size()}}}});
        });
    }
    if (parts.size() == 1 && at(0, "overview") && m == "GET") {
        const auto sel = selection_from(req, *ws);
        return engine_.with_session(id, [&](Session& s) { return json_response(200, overview_state(s, sel)); });
    }
    if (parts.size() == 1 && (at(0, "stream") || at(0, "recommendation")) && m == "GET") {
        const auto sel = selection_from(req, *ws);
        const bool stream = at(0, "stream");
        const auto cursor = query_count(req, "cursor", 0, ws->corpus().size());
        const auto page_size = query_count(req, "page_size", 20, 500);
        const auto anchor_id = query_param(req, "anchor");
        if (!stream && !anchor_id) throw FieldError("anchor", "required");
        std::optional<std::size_t> anchor;
        if (anchor_id) anchor = comment_index(*ws, *anchor_id, "anchor");

        std::vector<std::size_t> order;
        std::optional<ContrastPair> pair;
        if (sel.kind == Selection::Kind::topic) {
            auto cs = order_topic_comments(*ws, sel.value);
            order = std::move(cs.comments);
            pair = cs.pair;
        } else {
            order = filter_by_selection(*ws, sel);
        }
        return engine_.with_session(id, [&](Session& s) {
            json rec = nullptr;
            if (anchor) {
                const auto scope_members = ws->resolve(sel);
                std::optional<std::span<const std::size_t>> scope;
                if (sel.kind != Selection::Kind::all) scope = std::span<const std::size_t>(scope_members);
                if (auto r = recommend_opposite(*ws, s.viewed_set(), *anchor, scope)) rec = comment_json(s, *r);
            }
            if (!stream) return json_response(200, {{"seq", s.state().seq}, {"recommendation", rec}});
            json items = json::array();
            const auto end = std::min(order.size(), cursor + page_size);
            for (auto i = cursor; i < end; ++i) items.push_back(comment_json(s, order[i]));
            json pair_json = nullptr;
            if (pair) {
                pair_json = {{"first", ws->corpus()[pair->first].id},
                             {"second", ws->corpus()[pair->second].id},
                             {"similarity", pair->similarity}};
            }
            return json_response(200, {{"seq", s.state().seq},
                                       {"selection", selection_json(sel)},
                                       {"total", order.size()},
                                       {"cursor", cursor},
                                       {"next_cursor", end < order.size() ? json(end) : json(nullptr)},
                                       {"contrast_pair", pair_json},
                                       {"comments", items},
                                       {"recommendation", rec},
                                       {"progress", {{"viewed", s.progress(sel).viewed}, {"total", order.size()}}}});
        });
    }
    if (parts.size() == 2 && at(0, "events") && m == "POST") {
        const auto body = parse_body(req.body);
        EventOutcome out;
        json result;
        const auto kind = parts[1];
        if (kind == "view") {
            const auto cid = require_string(body, "comment_id");
            comment_index(*ws, cid, "comment_id");
            const auto topic = optional_string(body, "topic_id");
            if (topic && ws->scheme().find(*topic) == nullptr) throw FieldError("topic_id", "unknown topic '" + *topic + "'");
            result = engine_.with_session(id, [&](Session& s) {
                out = s.record_view(cid, topic ? std::optional<std::string_view>(*topic) : std::nullopt);
                auto j = outcome_json(s, out);
                j["progress"] = {{"viewed", s.progress(Selection::all()).viewed}, {"total", ws->corpus().size()}};
                return j;
            });
        } else if (kind == "mark") {
            const auto cid = require_string(body, "comment_id");
            comment_index(*ws, cid, "comment_id");
            bool useful = true;
            if (body.contains("useful")) {
                if (!body["useful"].is_boolean()) throw FieldError("useful", "must be a boolean");
                useful = body["useful"].get<bool>();
            }
            result = engine_.with_session(id, [&](Session& s) {
                out = s.mark_useful(cid, useful);
                return outcome_json(s, out);
            });
        } else if (kind == "snippet") {
            const auto cid = require_string(body, "comment_id");
            const auto c = comment_index(*ws, cid, "comment_id");
            const auto start = require_index(body, "start");
            const auto end = require_index(body, "end");
            if (!(start < end && end <= ws->corpus()[c].text.size())) {
                throw FieldError("end", "need 0 <= start < end <= " + std::to_string(ws->corpus()[c].text.size()));
            }
            const auto topic = optional_string(body, "topic_id");
            if (topic && ws->scheme().find(*topic) == nullptr) throw FieldError("topic_id", "unknown topic '" + *topic + "'");
            result = engine_.with_session(id, [&](Session& s) {
                out = s.save_snippet(cid, start, end, topic ? std::optional<std::string_view>(*topic) : std::nullopt);
                return outcome_json(s, out);
            });
        } else {
            throw NotFound("unknown event kind '" + std::string(kind) + "'");
        }
        const auto jobs = engine_.request_reminder_text(id, out.new_reminders);
        if (!jobs.empty()) {
            engine_.await_reminder_text(jobs);
            engine_.with_session(id, [&](Session& s) {
                result["seq"] = s.state().seq;
                result["reminders"] = reminders_json(s, out.new_reminders);
                return 0;
            });
        }
        return json_response(200, result);
    }
    if (parts.size() == 1 && at(0, "reminders") && m == "GET") {
        const auto filter = query_param(req, "status").value_or("pending");
        std::optional<ReminderStatus> wanted;
        if (filter != "all") {
            try {
                wanted = parse_reminder_status(filter);
            } catch (const InvalidArgument& e) {
                throw FieldError("status", e.what());
            }
        }
        return engine_.with_session(id, [&](Session& s) {
            json list = json::array();
            for (const auto& r : s.state().reminders) {
                if (!wanted || r.status == *wanted) list.push_back(r);
            }
            return json_response(200, {{"seq", s.state().seq}, {"reminders", list}});
        });
    }
    if (parts.size() == 3 && at(0, "reminders") && at(2, "resolve") && m == "POST") {
        const auto body = parse_body(req.body);
        ReminderAction action;
        try {
            action = parse_reminder_action(require_string(body, "action"));
        } catch (const FieldError&) {
            throw;
        } catch (const InvalidArgument& e) {
            throw FieldError("action", e.what());
        }
        const auto mind = optional_string(body, "user_mind");
        const std::string rid(parts[1]);
        return engine_.with_session(id, [&](Session& s) {
            return json_response(200, outcome_json(s, s.resolve_reminder(rid, action, mind)));
        });
    }
    if (parts.size() == 1 && at(0, "board") && m == "GET") {
        return engine_.with_session(id, [&](Session& s) {
            return json_response(200, {{"seq", s.state().seq}, {"board", board_snapshot(s)}});
        });
    }
    if (parts.size() == 2 && at(0, "board") && at(1, "thoughts") && m == "POST") {
        const auto text = require_string(parse_body(req.body), "text");
        if (std::all_of(text.begin(), text.end(), [](unsigned char c) { return std::isspace(c); })) {
            throw FieldError("text", "must not be empty");
        }
        return engine_.with_session(id, [&](Session& s) { return json_response(201, outcome_json(s, s.add_thought(text))); });
    }
    if (parts.size() == 3 && at(0, "board") && at(1, "thoughts") && (m == "PUT" || m == "POST")) {
        const auto text = require_string(parse_body(req.body), "text");
        if (std::all_of(text.begin(), text.end(), [](unsigned char c) { return std::isspace(c); })) {
            throw FieldError("text", "must not be empty");
        }
        const std::string tid(parts[2]);
        return engine_.with_session(id, [&](Session& s) { return json_response(200, outcome_json(s, s.edit_thought(tid, text))); });
    }
    if (parts.size() == 2 && at(0, "board") && at(1, "export") && m == "GET") {
        ExportFormat format;
        try {
            format = parse_export_format(query_param(req, "format").value_or("markdown"));
        } catch (const InvalidArgument& e) {
            throw FieldError("format", e.what());
        }
        return engine_.with_session(id, [&](Session& s) {
            ApiResponse r{200, export_board(s, format),
                          format == ExportFormat::markdown ? "text/markdown; charset=utf-8" : "application/json",
                          s.state().seq};
            return r;
        });
    }
    if (parts.size() == 1 && at(0, "log") && m == "GET") {
        return engine_.with_session(id, [&](Session& s) {
            return json_response(200, {{"seq", s.state().seq}, {"events", s.log()}});
        });
    }
    if (parts.size() == 1 && at(0, "state") && m == "GET") {
        return engine_.with_session(id, [&](Session& s) {
            return json_response(200, {{"seq", s.state().seq}, {"state", state_json(s.state(), s.workspace())}});
        });
    }
    throw NotFound("no route for " + m + " " + req.path);
}

} // namespace commsense
