#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "commsense/corpus.hpp"
#include "commsense/providers.hpp"

namespace commsense {

class Workspace;
struct SessionState;

// When a fired balance trigger may fire again for the same topic.
// on_drop_below_theta re-arms once delta_p <= delta_theta. on_drop_below_level
// re-arms once delta_p <= min(rearm_level, delta_theta); with a level below
// every threshold in use, the number of firings can only fall as the
// threshold rises, which the theta-relative rule does not guarantee.
enum class RearmPolicy { on_drop_below_theta, on_drop_below_level };
std::string_view to_string(RearmPolicy p) noexcept;
RearmPolicy parse_rearm_policy(std::string_view s);

struct TriggerConfig {
    double delta_theta = 0.20;
    double coverage_threshold = 0.70;
    RearmPolicy rearm_policy = RearmPolicy::on_drop_below_level;
    double rearm_level = 0.10;

    // Throws InvalidArgument unless 0 < delta_theta < 1, 0 < coverage_threshold <= 1
    // and 0 <= rearm_level < 1.
    void validate() const;
    double rearm_at() const noexcept;
    bool operator==(const TriggerConfig&) const = default;
};

void to_json(nlohmann::json& j, const TriggerConfig& c);
void from_json(const nlohmann::json& j, TriggerConfig& c);

// Sentiment mix of a topic's useful-marked comments against the topic's
// corpus mix. Neutral marks count in n_useful (the denominators) only.
struct DeviationStats {
    std::string topic_id;
    std::size_t n_useful = 0;
    std::size_t n_pos = 0;
    std::size_t n_neu = 0;
    std::size_t n_neg = 0;
    double local_pos = 0.0;
    double local_neg = 0.0;
    double global_pos = 0.0;
    double global_neg = 0.0;
    double delta_p = 0.0;
    bool evaluated = false;  // false when n_useful == 0; delta_p is then 0

    bool operator==(const DeviationStats&) const = default;
};

struct CoverageStats {
    std::string topic_id;
    std::size_t viewed = 0;
    std::size_t total = 0;
    std::size_t required = 0;  // ceil(threshold * total)
    double fraction = 0.0;
    double threshold = 0.0;

    bool operator==(const CoverageStats&) const = default;
};

enum class TriggerKind { balance, coverage };
std::string_view to_string(TriggerKind k) noexcept;

struct TriggerEvent {
    TriggerKind kind = TriggerKind::balance;
    std::string topic_id;
    std::optional<DeviationStats> deviation;  // balance
    std::optional<CoverageStats> coverage;    // coverage
    std::uint64_t fired_at = 0;               // session event sequence number

    bool operator==(const TriggerEvent&) const = default;
};

enum class ReminderStatus { pending, added, dismissed };
std::string_view to_string(ReminderStatus s) noexcept;
ReminderStatus parse_reminder_status(std::string_view s);

struct Reminder {
    std::string reminder_id;
    TriggerEvent trigger;
    nlohmann::json grounding;   // statistical grounding shown to the reader
    std::string summary;
    std::string suggestion;
    std::string text_source;    // "fallback" or "generator"
    std::optional<std::string> user_mind;
    ReminderStatus status = ReminderStatus::pending;
    std::int64_t created_at = 0;

    bool operator==(const Reminder&) const = default;
};

void to_json(nlohmann::json& j, const DeviationStats& d);
void from_json(const nlohmann::json& j, DeviationStats& d);
void to_json(nlohmann::json& j, const CoverageStats& c);
void from_json(const nlohmann::json& j, CoverageStats& c);
void to_json(nlohmann::json& j, const TriggerEvent& t);
void from_json(const nlohmann::json& j, TriggerEvent& t);
void to_json(nlohmann::json& j, const Reminder& r);
void from_json(const nlohmann::json& j, Reminder& r);

// max(|local_neg - global_neg|, |local_pos - global_pos|) over the topic's
// useful comments. `global` supplies the corpus fractions for the topic.
// Throws NotFound for an unknown topic.
DeviationStats deviation(const SessionState& session, const Workspace& ws, std::string_view topic_id,
                         const SentimentDistribution& global);
DeviationStats deviation(const SessionState& session, const Workspace& ws, std::string_view topic_id);

// Fires iff n_useful > 0, delta_p > delta_theta and the topic is armed.
// Updates the topic's arm state (fire -> fired, delta_p <= rearm_at() -> armed).
std::optional<TriggerEvent> evaluate_balance_trigger(SessionState& session, const Workspace& ws,
                                                     std::string_view topic_id, const TriggerConfig& config,
                                                     std::uint64_t seq,
                                                     const std::optional<SentimentDistribution>& global = std::nullopt);

// Smallest view count that satisfies the coverage threshold for n comments.
std::size_t coverage_required(double threshold, std::size_t n);

// One-shot per topic: fires when |viewed_t| >= ceil(threshold * N_t).
std::optional<TriggerEvent> evaluate_coverage_trigger(SessionState& session, const Workspace& ws,
                                                      std::string_view topic_id, const TriggerConfig& config,
                                                      std::uint64_t seq);

struct ReminderPrompt {
    std::string trigger_reason;
    std::string statistics;
    std::string comment_texts;
    ChatRequest request;
};

nlohmann::json grounding_for(const TriggerEvent& trigger, const Workspace& ws, const TriggerConfig& config);
ReminderPrompt reminder_prompt(const TriggerEvent& trigger, const SessionState& session, const Workspace& ws,
                               const TriggerConfig& config);

struct ReminderText {
    std::string summary;
    std::string suggestion;
};

// Deterministic templated text used when no generator answer is available.
ReminderText fallback_text(const TriggerEvent& trigger, const SessionState& session, const Workspace& ws);

// Parses {"summary": ..., "suggestion": ...}; throws SchemaViolation.
ReminderText parse_reminder_response(const std::string& raw);

// Calls the generator and validates the answer. Returns nullopt (after
// logging) on any failure.
std::optional<ReminderText> generate_reminder_text(const ReminderPrompt& prompt, TextGenerator& generator);

// Builds a pending reminder. With a generator, tries it first and falls back
// to templated text on failure; never throws for generator problems.
Reminder assemble_reminder(const TriggerEvent& trigger, const SessionState& session, const Workspace& ws,
                           const TriggerConfig& config, TextGenerator* generator, std::string reminder_id,
                           std::int64_t created_at);

} // namespace commsense
