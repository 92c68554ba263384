#pragma once

#include <chrono>
#include <cstdint>
#include <filesystem>
#include <future>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <shared_mutex>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "commsense/reminders.hpp"
#include "commsense/session.hpp"
#include "commsense/workspace.hpp"

namespace commsense {

// One remote model. Disabled when base_url is empty. The key itself never
// appears in configuration; only the name of the variable holding it.
struct ProviderSettings {
    std::string base_url;
    std::string model;
    std::string api_key_env;

    bool enabled() const noexcept { return !base_url.empty(); }
    bool operator==(const ProviderSettings&) const = default;
};

void to_json(nlohmann::json& j, const ProviderSettings& p);

struct EngineConfig {
    std::filesystem::path corpus_path;
    TriggerConfig triggers;
    PipelineParams pipeline;
    ProviderSettings embedding;
    ProviderSettings sentiment;
    ProviderSettings generator;
    // How long an event response waits for generated reminder text before
    // answering with the templated text; later answers still upgrade it.
    std::chrono::milliseconds generator_timeout{2000};
    std::string bind = "127.0.0.1:8080";
    std::filesystem::path cache_dir;    // empty disables the pipeline cache
    std::filesystem::path session_dir;  // empty keeps sessions in memory only
    std::filesystem::path static_dir;   // client bundle; empty serves nothing
    bool offline = false;               // forces the fallback providers

    // Throws InvalidArgument naming the offending field.
    void validate() const;
};

void to_json(nlohmann::json& j, const EngineConfig& c);
// Relative paths are kept as written; load_config resolves them against
// the config file's directory.
void from_json(const nlohmann::json& j, EngineConfig& c);
EngineConfig load_config(const std::filesystem::path& path);

// Splits "host:port" (port defaults to 8080).
std::pair<std::string, int> parse_bind(const std::string& bind);

// SHA-256 over the corpus bytes and the canonical pipeline identity
// (params plus provider names), hex encoded.
std::string pipeline_cache_key(std::string_view corpus_bytes, const PipelineParams& params,
                               const std::string& embedder, const std::string& sentiment,
                               const std::string& generator);
std::string sha256_hex(std::string_view bytes);

struct PipelineReport {
    std::string cache_key;
    bool cache_hit = false;
    double seconds = 0.0;
    std::string embedder;
    std::string sentiment;
    std::string generator;  // empty when none
};

// Owns the providers, the shared workspace and every live session.
class Engine {
public:
    enum class Status { loading, ready, failed };

    explicit Engine(EngineConfig config);
    // For tests and embedding: an already-built workspace, no pipeline run.
    Engine(EngineConfig config, std::shared_ptr<const Workspace> ws,
           std::unique_ptr<TextGenerator> reminder_generator = nullptr);
    ~Engine();

    Engine(const Engine&) = delete;
    Engine& operator=(const Engine&) = delete;

    // Runs (or loads) the pipeline and restores logged sessions. On failure
    // the engine reports Status::failed and rethrows.
    void start();

    Status status() const;
    std::string failure() const;
    const EngineConfig& config() const noexcept { return config_; }
    std::shared_ptr<const Workspace> workspace() const;
    const PipelineReport& report() const noexcept { return report_; }

    std::string create_session();
    bool has_session(std::string_view id) const;
    std::vector<std::string> session_ids() const;

    // Runs `fn` with the session locked. Throws NotFound for an unknown id.
    template <class Fn>
    auto with_session(std::string_view id, Fn&& fn) {
        auto slot = find_slot(id);
        std::lock_guard lock(slot->mutex);
        return fn(*slot->session);
    }

    // Starts generator calls for freshly created reminders; each job upgrades
    // its reminder's text when the answer arrives. Empty without a generator.
    std::vector<std::shared_future<void>> request_reminder_text(std::string_view session_id,
                                                                const std::vector<std::string>& reminder_ids);
    // Waits for `jobs` until the configured generator timeout has elapsed.
    void await_reminder_text(const std::vector<std::shared_future<void>>& jobs) const;
    // Blocks until queued generator work has finished (tests, shutdown).
    void wait_idle();

private:
    struct Slot {
        std::mutex mutex;
        std::unique_ptr<Session> session;
    };

    std::shared_ptr<Slot> find_slot(std::string_view id) const;
    std::shared_ptr<Slot> make_slot(const std::string& id, const std::vector<SessionEvent>& log);
    void restore_sessions();
    void build_providers();

    EngineConfig config_;
    mutable std::mutex status_mutex_;
    Status status_ = Status::loading;
    std::string failure_;
    std::shared_ptr<const Workspace> ws_;
    PipelineReport report_;

    std::unique_ptr<EmbeddingProvider> embedder_;
    std::unique_ptr<SentimentProvider> sentiment_;
    std::unique_ptr<TextGenerator> pipeline_generator_;
    std::unique_ptr<TextGenerator> reminder_generator_;

    mutable std::shared_mutex sessions_mutex_;
    std::map<std::string, std::shared_ptr<Slot>, std::less<>> sessions_;

    std::mutex jobs_mutex_;
    std::vector<std::shared_future<void>> jobs_;
};

struct ApiRequest {
    std::string method;
    std::string path;
    std::map<std::string, std::string> query;
    std::string body;
};

struct ApiResponse {
    int status = 200;
    std::string body;
    std::string content_type = "application/json";
    std::optional<std::uint64_t> seq;  // for non-JSON bodies; sent as a header

    nlohmann::json json() const { return nlohmann::json::parse(body); }
};

// Transport-independent router. Every session-scoped response carries the
// session's current event sequence number as "seq".
class Api {
public:
    explicit Api(Engine& engine) : engine_(engine) {}

    ApiResponse handle(const ApiRequest& request);

private:
    ApiResponse route(const ApiRequest& request);
    ApiResponse session_route(const ApiRequest& request, const std::string& id, std::string_view rest);

    Engine& engine_;
};

} // namespace commsense
