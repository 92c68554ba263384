// commsense: serve the engine over HTTP, or run the pipeline and session
// replay from the command line.

#include <atomic>
#include <csignal>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <thread>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "commsense/board.hpp"
#include "commsense/error.hpp"
#include "commsense/log.hpp"
#include "commsense/server.hpp"
#include "commsense/service.hpp"

using namespace commsense;
using json = nlohmann::json;

namespace {

struct CommonOptions {
    std::string config;
    std::string corpus;
    std::string cache_dir;
    bool offline = false;
};

void add_common(CLI::App* app, CommonOptions& o) {
    app->add_option("--config", o.config, "JSON configuration file")->check(CLI::ExistingFile);
    app->add_option("--corpus", o.corpus, "line-delimited JSON corpus (overrides the config)");
    app->add_option("--cache-dir", o.cache_dir, "pipeline artifact cache directory");
    app->add_flag("--offline", o.offline, "use the built-in fallback providers only");
}

EngineConfig resolve_config(const CommonOptions& o) {
    EngineConfig c = o.config.empty() ? EngineConfig{} : load_config(o.config);
    if (!o.corpus.empty()) c.corpus_path = o.corpus;
    if (!o.cache_dir.empty()) c.cache_dir = o.cache_dir;
    if (o.offline) c.offline = true;
    if (c.corpus_path.empty()) throw InvalidArgument("no corpus given (use --corpus or a config file)");
    c.validate();
    return c;
}

std::atomic<HttpServer*> g_server{nullptr};

extern "C" void on_signal(int) {
    if (auto* s = g_server.load()) s->stop();
}

int serve(EngineConfig config) {
    Engine engine(config);
    HttpServer server(engine, config.static_dir);
    const auto [host, port] = parse_bind(config.bind);
    const int bound = server.bind(host, port);
    g_server = &server;
    std::signal(SIGINT, on_signal);
    std::signal(SIGTERM, on_signal);
    log::info("listening on http://" + host + ":" + std::to_string(bound));

    // Health is served while the pipeline runs; readiness flips when it is done.
    std::thread pipeline([&engine] {
        try {
            engine.start();
        } catch (const std::exception& e) {
            log::error(std::string("pipeline failed: ") + e.what());
        }
    });
    server.run();
    g_server = nullptr;
    pipeline.join();
    engine.wait_idle();
    return 0;
}

int pipeline_summary(EngineConfig config, bool as_json) {
    config.session_dir.clear();
    Engine engine(config);
    engine.start();
    const auto ws = engine.workspace();
    const auto& r = engine.report();
    if (as_json) {
        json topics = json::array();
        for (const auto& t : ws->scheme().topics) {
            topics.push_back({{"topic_id", t.topic_id},
                              {"category", t.category},
                              {"keywords", t.keywords},
                              {"sentiment", ws->stats(t.topic_id)}});
        }
        std::cout << json{{"corpus", ws->stats()},
                          {"keywords", ws->scheme().keywords},
                          {"topics", topics},
                          {"origin", ws->scheme().origin},
                          {"bins", ws->bins().size()},
                          {"cache_key", r.cache_key},
                          {"cache_hit", r.cache_hit}}
                         .dump(2)
                  << "\n";
        return 0;
    }
    const auto st = ws->stats();
    std::printf("corpus      %zu comments: %zu positive / %zu neutral / %zu negative (pos:neg %.2f)\n", st.n_total,
                st.n_pos, st.n_neu, st.n_neg, st.positive_to_negative_ratio());
    std::printf("providers   %s, %s%s%s\n", r.embedder.c_str(), r.sentiment.c_str(), r.generator.empty() ? "" : ", ",
                r.generator.c_str());
    std::printf("pipeline    %.2f s%s, key %s\n", r.seconds, r.cache_hit ? " (cache hit)" : "", r.cache_key.c_str());
    std::printf("keywords   ");
    for (const auto& k : ws->scheme().keywords) std::printf(" %s(%zu)", k.term.c_str(), k.doc_freq);
    std::printf("\ntopics      via %s\n", ws->scheme().origin.c_str());
    for (const auto& t : ws->scheme().topics) {
        const auto ts = ws->stats(t.topic_id);
        std::printf("  %-4s %-16s %4zu comments  +%zu =%zu -%zu  [", t.topic_id.c_str(), t.category.c_str(), ts.n_total,
                    ts.n_pos, ts.n_neu, ts.n_neg);
        for (std::size_t i = 0; i < t.keywords.size(); ++i) std::printf("%s%s", i ? ", " : "", t.keywords[i].c_str());
        std::printf("]\n");
    }
    std::size_t max_bin = 0;
    for (const auto& b : ws->bins()) max_bin = std::max(max_bin, b.comments.size());
    std::printf("hexbins     %zu bins, largest %zu\n", ws->bins().size(), max_bin);
    return 0;
}

int replay(EngineConfig config, const std::string& log_path, const std::string& format) {
    config.session_dir.clear();
    Engine engine(config);
    engine.start();
    std::ifstream in(log_path);
    if (!in) throw InvalidArgument("cannot read session log '" + log_path + "'");
    std::vector<SessionEvent> events;
    std::string line;
    std::size_t n = 0;
    while (std::getline(in, line)) {
        ++n;
        if (line.empty()) continue;
        try {
            events.push_back(json::parse(line).get<SessionEvent>());
        } catch (const std::exception& e) {
            throw InvalidArgument(log_path + ":" + std::to_string(n) + ": " + e.what());
        }
    }
    const auto id = std::filesystem::path(log_path).stem().string();
    auto session = Session::replay(id, engine.workspace(), config.triggers, events);
    if (format == "state") {
        std::cout << state_json(session.state(), session.workspace()).dump(2) << "\n";
    } else {
        std::cout << export_board(session, parse_export_format(format));
    }
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"commsense: comment sensemaking engine"};
    app.require_subcommand(0, 1);

    CommonOptions serve_opts;
    std::string bind, static_dir, session_dir;
    auto* serve_cmd = app.add_subcommand("serve", "run the HTTP service (default)");
    add_common(serve_cmd, serve_opts);
    serve_cmd->add_option("--bind", bind, "host:port to listen on");
    serve_cmd->add_option("--static-dir", static_dir, "directory holding the web client bundle");
    serve_cmd->add_option("--session-dir", session_dir, "directory for append-only session logs");

    CommonOptions pipe_opts;
    bool as_json = false;
    auto* pipe_cmd = app.add_subcommand("pipeline", "run the preprocessing pipeline and print a summary");
    add_common(pipe_cmd, pipe_opts);
    pipe_cmd->add_flag("--json", as_json, "print JSON instead of text");

    CommonOptions replay_opts;
    std::string log_path, format = "markdown";
    auto* replay_cmd = app.add_subcommand("replay", "replay a session log and print its board export");
    add_common(replay_cmd, replay_opts);
    replay_cmd->add_option("log", log_path, "session log (.jsonl)")->required()->check(CLI::ExistingFile);
    replay_cmd->add_option("--format", format, "markdown, structured or state")
        ->check(CLI::IsMember({"markdown", "structured", "state"}));

    bool verbose = false;
    app.add_flag("-v,--verbose", verbose, "log requests");
    // Options of the default subcommand are accepted at top level too.
    add_common(&app, serve_opts);
    app.add_option("--bind", bind, "host:port to listen on");
    app.add_option("--static-dir", static_dir, "directory holding the web client bundle");
    app.add_option("--session-dir", session_dir, "directory for append-only session logs");

    CLI11_PARSE(app, argc, argv);

    if (verbose) {
        log::set_sink([](log::Level, std::string_view m) { std::clog << "[commsense] " << m << "\n"; });
    }
    try {
        if (*pipe_cmd) return pipeline_summary(resolve_config(pipe_opts), as_json);
        if (*replay_cmd) return replay(resolve_config(replay_opts), log_path, format);
        auto config = resolve_config(serve_opts);
        if (!bind.empty()) config.bind = bind;
        if (!static_dir.empty()) config.static_dir = static_dir;
        if (!session_dir.empty()) config.session_dir = session_dir;
        config.validate();
        return serve(std::move(config));
    } catch (const std::exception& e) {
        std::cerr << "commsense: " << e.what() << "\n";
        return 1;
    }
}
