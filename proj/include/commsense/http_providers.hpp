#pragma once

#include <chrono>
#include <string>

#include "commsense/providers.hpp"

namespace commsense {

struct RemoteEndpoint {
    std::string base_url;  // e.g. "https://api.openai.com/v1"
    std::string model;
    std::string api_key;   // resolved from the environment by the caller
    std::chrono::milliseconds timeout{30000};
};

// Splits "scheme://host[:port]/prefix" into ("scheme://host[:port]", "/prefix").
std::pair<std::string, std::string> split_base_url(const std::string& url);

// OpenAI-compatible POST {base}/chat/completions.
class ChatCompletionClient final : public TextGenerator {
public:
    explicit ChatCompletionClient(RemoteEndpoint endpoint);
    std::string complete(const ChatRequest& request) override;
    std::string name() const override { return "chat:" + endpoint_.model; }

private:
    RemoteEndpoint endpoint_;
};

// OpenAI-compatible POST {base}/embeddings, batched.
class RemoteEmbeddingClient final : public EmbeddingProvider {
public:
    explicit RemoteEmbeddingClient(RemoteEndpoint endpoint, std::size_t batch_size = 64);
    std::vector<Vector> embed(std::span<const std::string> texts) override;
    std::string name() const override { return "embedding:" + endpoint_.model; }

private:
    RemoteEndpoint endpoint_;
    std::size_t batch_size_;
};

// Text-classification inference endpoint: POST {base} {"inputs": text},
// answering [[{"label": ..., "score": ...}, ...]].
class RemoteSentimentClient final : public SentimentProvider {
public:
    explicit RemoteSentimentClient(RemoteEndpoint endpoint);
    SentimentLabel classify(std::string_view text) override;
    std::string name() const override { return "sentiment:" + endpoint_.model; }

    // Maps "positive"/"LABEL_2"/"Very Negative"... onto the three labels.
    static SentimentLabel map_label(std::string_view label);

private:
    RemoteEndpoint endpoint_;
};

} // namespace commsense
