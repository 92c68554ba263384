#pragma once

#include <cstdint>
#include <deque>
#include <memory>
#include <mutex>
#include <string>
#include <vector>

#include "commsense/providers.hpp"
#include "commsense/workspace.hpp"

namespace commsense::testing {

// The 574-comment hotel-review fixture, pipeline run once per process with
// the offline providers and default parameters.
const Corpus& fixture_corpus();
std::shared_ptr<const Workspace> fixture_workspace();

struct SyntheticComment {
    std::string text;
    SentimentLabel sentiment;
    Vector embedding;
};

// Workspace over hand-made comments. Each topic is (category, keywords);
// keywords are ranked in the order given. Linear projection.
std::shared_ptr<const Workspace> synthetic_workspace(
    const std::vector<SyntheticComment>& comments,
    const std::vector<std::pair<std::string, std::vector<std::string>>>& topics);

// Comments all containing `keyword`, with the given label counts and
// orthogonal-ish embeddings.
std::vector<SyntheticComment> labelled_block(const std::string& keyword, std::size_t pos, std::size_t neu,
                                             std::size_t neg, std::size_t dim = 8);

// Replays scripted answers; throws ProviderError once they run out.
class ScriptedGenerator final : public TextGenerator {
public:
    explicit ScriptedGenerator(std::vector<std::string> answers);
    std::string complete(const ChatRequest& request) override;
    std::string name() const override { return "scripted"; }

    std::vector<ChatRequest> requests() const;

private:
    mutable std::mutex mutex_;
    std::deque<std::string> answers_;
    std::vector<ChatRequest> requests_;
};

// Monotone fake clock: starts at `start`, advances by `step` per call.
struct StepClock {
    std::int64_t now;
    std::int64_t step;
    std::int64_t operator()() {
        const auto t = now;
        now += step;
        return t;
    }
};

} // namespace commsense::testing
