#include "commsense/http_providers.hpp"

#include <httplib.h>
#include <nlohmann/json.hpp>

#include "commsense/error.hpp"
#include "commsense/text.hpp"

namespace commsense {

namespace {

using json = nlohmann::json;

std::pair<std::string, std::string> split_checked(const std::string& url) {
    auto parts = split_base_url(url);
    if (parts.first.empty()) throw ProviderError("invalid base URL '" + url + "'");
    return parts;
}

json post_json(const RemoteEndpoint& ep, const std::string& path_suffix, const json& body) {
    auto [origin, prefix] = split_checked(ep.base_url);
    httplib::Client cli(origin);
    const auto secs = std::chrono::duration_cast<std::chrono::seconds>(ep.timeout);
    const auto usecs = std::chrono::duration_cast<std::chrono::microseconds>(ep.timeout - secs);
    cli.set_connection_timeout(secs.count(), usecs.count());
    cli.set_read_timeout(secs.count(), usecs.count());
    cli.set_write_timeout(secs.count(), usecs.count());

    httplib::Headers headers;
    if (!ep.api_key.empty()) headers.emplace("Authorization", "Bearer " + ep.api_key);

    const std::string path = prefix + path_suffix;
    auto res = cli.Post(path, headers, body.dump(), "application/json");
    if (!res) {
        throw ProviderError("POST " + origin + path + " failed: " + httplib::to_string(res.error()));
    }
    if (res->status < 200 || res->status >= 300) {
        throw ProviderError("POST " + origin + path + " returned HTTP " +
                            std::to_string(res->status) + ": " + res->body.substr(0, 512));
    }
    try {
        return json::parse(res->body);
    } catch (const json::parse_error& e) {
        throw ProviderError("POST " + origin + path + " returned non-JSON body: " + e.what());
    }
}

} // namespace

std::pair<std::string, std::string> split_base_url(const std::string& url) {
    const auto scheme_end = url.find("://");
    if (scheme_end == std::string::npos) return {"", ""};
    auto path_start = url.find('/', scheme_end + 3);
    if (path_start == std::string::npos) return {url, ""};
    std::string prefix = url.substr(path_start);
    while (!prefix.empty() && prefix.back() == '/') prefix.pop_back();
    return {url.substr(0, path_start), prefix};
}

ChatCompletionClient::ChatCompletionClient(RemoteEndpoint endpoint) : endpoint_(std::move(endpoint)) {}

std::string ChatCompletionClient::complete(const ChatRequest& request) {
    json body{{"model", endpoint_.model},
              {"temperature", request.temperature},
              {"messages", json::array({{{"role", "system"}, {"content", request.system}},
                                        {{"role", "user"}, {"content", request.user}}})}};
    if (request.json_response) body["response_format"] = {{"type", "json_object"}};

    const json reply = post_json(endpoint_, "/chat/completions", body);
    try {
        return reply.at("choices").at(0).at("message").at("content").get<std::string>();
    } catch (const json::exception& e) {
        throw ProviderError(std::string("chat completion reply missing content: ") + e.what());
    }
}

RemoteEmbeddingClient::RemoteEmbeddingClient(RemoteEndpoint endpoint, std::size_t batch_size)
    : endpoint_(std::move(endpoint)), batch_size_(std::max<std::size_t>(1, batch_size)) {}

std::vector<Vector> RemoteEmbeddingClient::embed(std::span<const std::string> texts) {
    std::vector<Vector> out;
    out.reserve(texts.size());
    for (std::size_t begin = 0; begin < texts.size(); begin += batch_size_) {
        const auto batch = texts.subspan(begin, std::min(batch_size_, texts.size() - begin));
        json body{{"model", endpoint_.model}, {"input", json::array()}};
        for (const auto& t : batch) body["input"].push_back(t);

        const json reply = post_json(endpoint_, "/embeddings", body);
        try {
            const auto& data = reply.at("data");
            if (data.size() != batch.size()) throw ProviderError("embedding reply has wrong row count");
            std::vector<Vector> rows(batch.size());
            for (const auto& item : data) {
                const auto idx = item.value("index", std::size_t{0});
                if (idx >= rows.size()) throw ProviderError("embedding reply index out of range");
                rows[idx] = item.at("embedding").get<Vector>();
            }
            for (auto& r : rows) out.push_back(std::move(r));
        } catch (const json::exception& e) {
            throw ProviderError(std::string("malformed embedding reply: ") + e.what());
        }
    }
    return out;
}

RemoteSentimentClient::RemoteSentimentClient(RemoteEndpoint endpoint) : endpoint_(std::move(endpoint)) {}

SentimentLabel RemoteSentimentClient::map_label(std::string_view label) {
    const std::string l = text::lowercase(label);
    if (l.find("neg") != std::string::npos || l == "label_0") return SentimentLabel::negative;
    if (l.find("pos") != std::string::npos || l == "label_2") return SentimentLabel::positive;
    if (l.find("neu") != std::string::npos || l == "label_1") return SentimentLabel::neutral;
    throw ProviderError("unrecognised sentiment label '" + std::string(label) + "'");
}

SentimentLabel RemoteSentimentClient::classify(std::string_view text) {
    const json reply = post_json(endpoint_, "", json{{"inputs", std::string(text)}});
    try {
        const json& scores = reply.is_array() && !reply.empty() && reply[0].is_array() ? reply[0] : reply;
        const json* best = nullptr;
        for (const auto& s : scores) {
            if (best == nullptr || s.at("score").get<double>() > best->at("score").get<double>()) best = &s;
        }
        if (best == nullptr) throw ProviderError("empty sentiment reply");
        return map_label(best->at("label").get<std::string>());
    } catch (const json::exception& e) {
        throw ProviderError(std::string("malformed sentiment reply: ") + e.what());
    }
}

} // namespace commsense
