#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <unordered_set>
#include <variant>
#include <vector>

#include <nlohmann/json.hpp>

#include "commsense/reminders.hpp"
#include "commsense/workspace.hpp"

namespace commsense {

struct EvidenceSnippet {
    std::string snippet_id;
    std::string comment_id;
    std::size_t begin = 0;
    std::size_t end = 0;
    std::string text;
    std::string topic_id;  // empty when the comment matches no topic
    SentimentLabel sentiment = SentimentLabel::neutral;
    std::int64_t created_at = 0;

    bool operator==(const EvidenceSnippet&) const = default;
};

// Thoughts are immutable; an edit appends a new version that supersedes the old one.
struct Thought {
    std::string thought_id;
    std::string text;
    std::int64_t created_at = 0;
    std::optional<std::string> supersedes;

    bool operator==(const Thought&) const = default;
};

void to_json(nlohmann::json& j, const EvidenceSnippet& s);
void from_json(const nlohmann::json& j, EvidenceSnippet& s);
void to_json(nlohmann::json& j, const Thought& t);
void from_json(const nlohmann::json& j, Thought& t);

enum class ArmState { armed, fired };

struct SessionState {
    std::string session_id;
    std::map<std::string, std::set<std::size_t>> viewed;  // per topic
    std::set<std::size_t> viewed_any;                     // union, plus topic-less views
    std::map<std::size_t, std::uint64_t> useful;          // comment -> seq of the mark
    std::vector<EvidenceSnippet> snippets;
    std::map<std::string, bool> coverage_fired;
    std::map<std::string, ArmState> balance_arm;
    std::vector<Reminder> reminders;
    std::vector<Thought> thoughts;
    std::vector<std::size_t> engagement;  // viewed or marked comments, most recent last
    std::uint64_t seq = 0;
    std::int64_t last_at = 0;

    ArmState arm(std::string_view topic_id) const;
    bool operator==(const SessionState&) const = default;
};

// Canonical encoding; equal states encode to equal bytes.
nlohmann::json state_json(const SessionState& s, const Workspace& ws);

enum class ReminderAction { add, dismiss };
ReminderAction parse_reminder_action(std::string_view s);

struct ViewEvent {
    std::string comment_id;
    std::optional<std::string> topic_id;  // absent: counts for every topic of the comment
    bool operator==(const ViewEvent&) const = default;
};
struct MarkEvent {
    std::string comment_id;
    bool useful = true;
    bool operator==(const MarkEvent&) const = default;
};
struct SnippetEvent {
    std::string comment_id;
    std::size_t begin = 0;
    std::size_t end = 0;
    std::optional<std::string> topic_id;
    bool operator==(const SnippetEvent&) const = default;
};
struct ResolveEvent {
    std::string reminder_id;
    ReminderAction action = ReminderAction::add;
    std::optional<std::string> user_mind;
    bool operator==(const ResolveEvent&) const = default;
};
struct ThoughtEvent {
    std::string text;
    std::optional<std::string> supersedes;
    bool operator==(const ThoughtEvent&) const = default;
};
struct ReminderTextEvent {
    std::string reminder_id;
    std::string summary;
    std::string suggestion;
    bool operator==(const ReminderTextEvent&) const = default;
};

using EventPayload = std::variant<ViewEvent, MarkEvent, SnippetEvent, ResolveEvent, ThoughtEvent, ReminderTextEvent>;

struct SessionEvent {
    std::uint64_t seq = 0;
    std::int64_t at = 0;  // milliseconds since the epoch
    EventPayload payload;
    bool operator==(const SessionEvent&) const = default;
};

void to_json(nlohmann::json& j, const SessionEvent& e);
void from_json(const nlohmann::json& j, SessionEvent& e);

struct EventOutcome {
    std::uint64_t seq = 0;
    bool changed = false;  // false for idempotent no-ops (nothing logged)
    std::vector<TriggerEvent> triggers;
    std::vector<std::string> new_reminders;
    std::optional<EvidenceSnippet> snippet;
    std::optional<Thought> thought;
    std::optional<Reminder> reminder;  // resolved or upgraded reminder
};

struct Progress {
    std::size_t viewed = 0;
    std::size_t total = 0;
    bool operator==(const Progress&) const = default;
};

// One reader's live state. Every mutation is an event: validated, applied,
// appended to the log and handed to the optional sink. Replaying the log on
// a fresh session reproduces the state exactly. Not thread-safe; callers
// serialise access per session.
class Session {
public:
    using Clock = std::function<std::int64_t()>;
    using Sink = std::function<void(const SessionEvent&)>;

    Session(std::string session_id, std::shared_ptr<const Workspace> ws, TriggerConfig config,
            Clock clock = {});

    static Session replay(std::string session_id, std::shared_ptr<const Workspace> ws, TriggerConfig config,
                          std::span<const SessionEvent> log, Clock clock = {});

    EventOutcome record_view(std::string_view comment_id, std::optional<std::string_view> topic_id = std::nullopt);
    EventOutcome mark_useful(std::string_view comment_id, bool useful = true);
    EventOutcome save_snippet(std::string_view comment_id, std::size_t begin, std::size_t end,
                              std::optional<std::string_view> topic_id = std::nullopt);
    EventOutcome resolve_reminder(std::string_view reminder_id, ReminderAction action,
                                  std::optional<std::string> user_mind = std::nullopt);
    EventOutcome add_thought(std::string text);
    EventOutcome edit_thought(std::string_view thought_id, std::string text);
    EventOutcome set_reminder_text(std::string_view reminder_id, std::string summary, std::string suggestion);

    // Applies an event. When `event.seq` is 0 the session assigns the next
    // sequence number and timestamp; otherwise they are taken as recorded.
    EventOutcome apply(SessionEvent event);

    Progress progress(const Selection& selection) const;
    std::unordered_set<std::size_t> viewed_set() const;

    const Reminder& reminder(std::string_view reminder_id) const;
    std::vector<Reminder> pending_reminders() const;

    const std::string& id() const noexcept { return state_.session_id; }
    const SessionState& state() const noexcept { return state_; }
    const std::vector<SessionEvent>& log() const noexcept { return log_; }
    const Workspace& workspace() const noexcept { return *ws_; }
    const TriggerConfig& config() const noexcept { return config_; }

    void set_sink(Sink sink) { sink_ = std::move(sink); }

private:
    // Validation without mutation; returns false for no-op events.
    bool check(const EventPayload& payload) const;
    EventOutcome mutate(const SessionEvent& event);
    void add_reminders(EventOutcome& out, std::int64_t at);

    std::shared_ptr<const Workspace> ws_;
    TriggerConfig config_;
    Clock clock_;
    Sink sink_;
    SessionState state_;
    std::vector<SessionEvent> log_;
};

} // namespace commsense
