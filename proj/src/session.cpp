#include "commsense/session.hpp"

#include <algorithm>
#include <cctype>
#include <chrono>

#include "commsense/error.hpp"

namespace commsense {

using json = nlohmann::json;

void to_json(json& j, const EvidenceSnippet& s) {
    j = json{{"snippet_id", s.snippet_id}, {"comment_id", s.comment_id}, {"start", s.begin},
             {"end", s.end},               {"text", s.text},             {"topic_id", s.topic_id},
             {"sentiment", s.sentiment},   {"created_at", s.created_at}};
}

void from_json(const json& j, EvidenceSnippet& s) {
    s.snippet_id = j.at("snippet_id").get<std::string>();
    s.comment_id = j.at("comment_id").get<std::string>();
    s.begin = j.at("start").get<std::size_t>();
    s.end = j.at("end").get<std::size_t>();
    s.text = j.at("text").get<std::string>();
    s.topic_id = j.at("topic_id").get<std::string>();
    s.sentiment = j.at("sentiment").get<SentimentLabel>();
    s.created_at = j.at("created_at").get<std::int64_t>();
}

void to_json(json& j, const Thought& t) {
    j = json{{"thought_id", t.thought_id},
             {"text", t.text},
             {"created_at", t.created_at},
             {"supersedes", t.supersedes ? json(*t.supersedes) : json(nullptr)}};
}

void from_json(const json& j, Thought& t) {
    t.thought_id = j.at("thought_id").get<std::string>();
    t.text = j.at("text").get<std::string>();
    t.created_at = j.at("created_at").get<std::int64_t>();
    const auto& sup = j.at("supersedes");
    t.supersedes = sup.is_null() ? std::nullopt : std::optional<std::string>(sup.get<std::string>());
}

ArmState SessionState::arm(std::string_view topic_id) const {
    const auto it = balance_arm.find(std::string(topic_id));
    return it == balance_arm.end() ? ArmState::armed : it->second;
}

namespace {

json id_list(const Workspace& ws, const std::set<std::size_t>& idx) {
    json out = json::array();
    for (auto i : idx) out.push_back(ws.corpus()[i].id);
    return out;
}

template <class T>
std::optional<T> opt_field(const json& j, const char* key) {
    if (!j.contains(key) || j[key].is_null()) return std::nullopt;
    return j[key].get<T>();
}

template <class T>
json opt_json(const std::optional<T>& v) {
    return v ? json(*v) : json(nullptr);
}

std::int64_t system_clock_ms() {
    using namespace std::chrono;
    return duration_cast<milliseconds>(system_clock::now().time_since_epoch()).count();
}

} // namespace

json state_json(const SessionState& s, const Workspace& ws) {
    json viewed = json::object();
    for (const auto& [topic, set] : s.viewed) viewed[topic] = id_list(ws, set);
    json useful = json::array();
    for (const auto& [comment, seq] : s.useful) useful.push_back({{"comment_id", ws.corpus()[comment].id}, {"seq", seq}});
    json arms = json::object();
    for (const auto& [topic, arm] : s.balance_arm) arms[topic] = arm == ArmState::armed ? "armed" : "fired";
    json engagement = json::array();
    for (auto i : s.engagement) engagement.push_back(ws.corpus()[i].id);
    return json{{"session_id", s.session_id},
                {"seq", s.seq},
                {"last_at", s.last_at},
                {"viewed", viewed},
                {"viewed_any", id_list(ws, s.viewed_any)},
                {"useful", useful},
                {"snippets", s.snippets},
                {"coverage_fired", s.coverage_fired},
                {"balance_arm", arms},
                {"reminders", s.reminders},
                {"thoughts", s.thoughts},
                {"engagement", engagement}};
}

ReminderAction parse_reminder_action(std::string_view s) {
    if (s == "add") return ReminderAction::add;
    if (s == "dismiss") return ReminderAction::dismiss;
    throw InvalidArgument("unknown reminder action '" + std::string(s) + "' (expected add or dismiss)");
}

void to_json(json& j, const SessionEvent& e) {
    j = json{{"seq", e.seq}, {"at", e.at}};
    std::visit(
        [&j](const auto& p) {
            using T = std::decay_t<decltype(p)>;
            if constexpr (std::is_same_v<T, ViewEvent>) {
                j["type"] = "view";
                j["comment_id"] = p.comment_id;
                j["topic_id"] = opt_json(p.topic_id);
            } else if constexpr (std::is_same_v<T, MarkEvent>) {
                j["type"] = "mark";
                j["comment_id"] = p.comment_id;
                j["useful"] = p.useful;
            } else if constexpr (std::is_same_v<T, SnippetEvent>) {
                j["type"] = "snippet";
                j["comment_id"] = p.comment_id;
                j["start"] = p.begin;
                j["end"] = p.end;
                j["topic_id"] = opt_json(p.topic_id);
            } else if constexpr (std::is_same_v<T, ResolveEvent>) {
                j["type"] = "resolve";
                j["reminder_id"] = p.reminder_id;
                j["action"] = p.action == ReminderAction::add ? "add" : "dismiss";
                j["user_mind"] = opt_json(p.user_mind);
            } else if constexpr (std::is_same_v<T, ThoughtEvent>) {
                j["type"] = "thought";
                j["text"] = p.text;
                j["supersedes"] = opt_json(p.supersedes);
            } else {
                j["type"] = "reminder_text";
                j["reminder_id"] = p.reminder_id;
                j["summary"] = p.summary;
                j["suggestion"] = p.suggestion;
            }
        },
        e.payload);
}

void from_json(const json& j, SessionEvent& e) {
    e.seq = j.at("seq").get<std::uint64_t>();
    e.at = j.at("at").get<std::int64_t>();
    const auto type = j.at("type").get<std::string>();
    if (type == "view") {
        e.payload = ViewEvent{j.at("comment_id").get<std::string>(), opt_field<std::string>(j, "topic_id")};
    } else if (type == "mark") {
        e.payload = MarkEvent{j.at("comment_id").get<std::string>(), j.value("useful", true)};
    } else if (type == "snippet") {
        e.payload = SnippetEvent{j.at("comment_id").get<std::string>(), j.at("start").get<std::size_t>(),
                                 j.at("end").get<std::size_t>(), opt_field<std::string>(j, "topic_id")};
    } else if (type == "resolve") {
        e.payload = ResolveEvent{j.at("reminder_id").get<std::string>(),
                                 parse_reminder_action(j.at("action").get<std::string>()),
                                 opt_field<std::string>(j, "user_mind")};
    } else if (type == "thought") {
        e.payload = ThoughtEvent{j.at("text").get<std::string>(), opt_field<std::string>(j, "supersedes")};
    } else if (type == "reminder_text") {
        e.payload = ReminderTextEvent{j.at("reminder_id").get<std::string>(), j.at("summary").get<std::string>(),
                                      j.at("suggestion").get<std::string>()};
    } else {
        throw InvalidArgument("unknown event type '" + type + "'");
    }
}

Session::Session(std::string session_id, std::shared_ptr<const Workspace> ws, TriggerConfig config, Clock clock)
    : ws_(std::move(ws)), config_(config), clock_(std::move(clock)) {
    if (!ws_) throw InvalidArgument("session needs a workspace");
    config_.validate();
    if (!clock_) clock_ = system_clock_ms;
    state_.session_id = std::move(session_id);
}

Session Session::replay(std::string session_id, std::shared_ptr<const Workspace> ws, TriggerConfig config,
                        std::span<const SessionEvent> log, Clock clock) {
    // Logged events carry their own timestamps, so the clock only matters afterwards.
    Session s(std::move(session_id), std::move(ws), config, std::move(clock));
    for (const auto& e : log) {
        if (e.seq == 0) throw StateError("logged event without a sequence number");
        const auto out = s.apply(e);
        if (!out.changed) throw StateError("logged event " + std::to_string(e.seq) + " has no effect on replay");
    }
    return s;
}

namespace {

std::vector<std::string> view_targets(const Workspace& ws, std::size_t comment,
                                      const std::optional<std::string>& topic) {
    if (topic) return {*topic};
    const auto t = ws.topics_of(comment);
    return {t.begin(), t.end()};
}

Reminder& find_reminder(SessionState& s, std::string_view id) {
    for (auto& r : s.reminders) {
        if (r.reminder_id == id) return r;
    }
    throw NotFound("unknown reminder '" + std::string(id) + "'");
}

bool is_blank(std::string_view s) {
    return std::all_of(s.begin(), s.end(), [](unsigned char c) { return std::isspace(c); });
}

} // namespace

bool Session::check(const EventPayload& payload) const {
    const auto& corpus = ws_->corpus();
    return std::visit(
        [&](const auto& p) -> bool {
            using T = std::decay_t<decltype(p)>;
            if constexpr (std::is_same_v<T, ViewEvent>) {
                const auto c = corpus.index_of(p.comment_id);
                if (p.topic_id && !ws_->in_topic(c, ws_->scheme().topic(*p.topic_id).topic_id)) {
                    throw InvalidArgument("comment '" + p.comment_id + "' does not belong to topic '" + *p.topic_id + "'");
                }
                if (!state_.viewed_any.count(c)) return true;
                for (const auto& t : view_targets(*ws_, c, p.topic_id)) {
                    const auto it = state_.viewed.find(t);
                    if (it == state_.viewed.end() || !it->second.count(c)) return true;
                }
                return false;
            } else if constexpr (std::is_same_v<T, MarkEvent>) {
                const auto c = corpus.index_of(p.comment_id);
                return state_.useful.count(c) != (p.useful ? 1u : 0u);
            } else if constexpr (std::is_same_v<T, SnippetEvent>) {
                const auto c = corpus.index_of(p.comment_id);
                const auto len = corpus[c].text.size();
                if (!(p.begin < p.end && p.end <= len)) {
                    throw InvalidArgument("snippet range [" + std::to_string(p.begin) + ", " + std::to_string(p.end) +
                                          ") is outside comment '" + p.comment_id + "' of length " +
                                          std::to_string(len));
                }
                if (p.topic_id) ws_->scheme().topic(*p.topic_id);
                return true;
            } else if constexpr (std::is_same_v<T, ResolveEvent>) {
                const auto& r = reminder(p.reminder_id);
                if (r.status != ReminderStatus::pending) {
                    throw StateError("reminder '" + p.reminder_id + "' is already " + std::string(to_string(r.status)));
                }
                return true;
            } else if constexpr (std::is_same_v<T, ThoughtEvent>) {
                if (is_blank(p.text)) throw InvalidArgument("thought text is empty");
                if (p.supersedes) {
                    const auto& th = state_.thoughts;
                    const auto it = std::find_if(th.begin(), th.end(),
                                                 [&](const Thought& t) { return t.thought_id == *p.supersedes; });
                    if (it == th.end()) throw NotFound("unknown thought '" + *p.supersedes + "'");
                    const bool superseded = std::any_of(th.begin(), th.end(), [&](const Thought& t) {
                        return t.supersedes && *t.supersedes == *p.supersedes;
                    });
                    if (superseded) throw StateError("thought '" + *p.supersedes + "' was already edited");
                    if (it->text == p.text) return false;
                }
                return true;
            } else {
                const auto& r = reminder(p.reminder_id);
                if (p.summary.empty() || p.suggestion.empty()) {
                    throw InvalidArgument("reminder text needs a summary and a suggestion");
                }
                if (r.status != ReminderStatus::pending) return false;
                return r.summary != p.summary || r.suggestion != p.suggestion;
            }
        },
        payload);
}

EventOutcome Session::apply(SessionEvent event) {
    if (event.seq != 0 && event.seq <= state_.seq) {
        throw StateError("event sequence " + std::to_string(event.seq) + " is not after " + std::to_string(state_.seq));
    }
    EventOutcome out;
    out.seq = state_.seq;
    if (!check(event.payload)) return out;
    if (event.seq == 0) {
        event.seq = state_.seq + 1;
        event.at = std::max(clock_(), state_.last_at);
    }
    if (sink_) sink_(event);
    log_.push_back(event);
    return mutate(log_.back());
}

EventOutcome Session::mutate(const SessionEvent& event) {
    state_.seq = event.seq;
    state_.last_at = std::max(state_.last_at, event.at);
    EventOutcome out;
    out.seq = event.seq;
    out.changed = true;
    const auto& corpus = ws_->corpus();

    std::visit(
        [&](const auto& p) {
            using T = std::decay_t<decltype(p)>;
            if constexpr (std::is_same_v<T, ViewEvent>) {
                const auto c = corpus.index_of(p.comment_id);
                state_.viewed_any.insert(c);
                state_.engagement.push_back(c);
                for (const auto& t : view_targets(*ws_, c, p.topic_id)) {
                    state_.viewed[t].insert(c);
                    if (auto trig = evaluate_coverage_trigger(state_, *ws_, t, config_, event.seq)) {
                        out.triggers.push_back(std::move(*trig));
                    }
                }
            } else if constexpr (std::is_same_v<T, MarkEvent>) {
                const auto c = corpus.index_of(p.comment_id);
                if (p.useful) {
                    state_.useful[c] = event.seq;
                    state_.engagement.push_back(c);
                } else {
                    state_.useful.erase(c);
                }
                for (const auto& t : ws_->topics_of(c)) {
                    if (auto trig = evaluate_balance_trigger(state_, *ws_, t, config_, event.seq)) {
                        out.triggers.push_back(std::move(*trig));
                    }
                }
            } else if constexpr (std::is_same_v<T, SnippetEvent>) {
                const auto c = corpus.index_of(p.comment_id);
                EvidenceSnippet s;
                s.snippet_id = "s" + std::to_string(state_.snippets.size() + 1);
                s.comment_id = p.comment_id;
                s.begin = p.begin;
                s.end = p.end;
                s.text = corpus[c].text.substr(p.begin, p.end - p.begin);
                if (p.topic_id) {
                    s.topic_id = *p.topic_id;
                } else if (const auto topics = ws_->topics_of(c); !topics.empty()) {
                    s.topic_id = topics.front();
                }
                s.sentiment = corpus.sentiment(c);
                s.created_at = event.at;
                state_.snippets.push_back(s);
                out.snippet = std::move(s);
            } else if constexpr (std::is_same_v<T, ResolveEvent>) {
                auto& r = find_reminder(state_, p.reminder_id);
                r.status = p.action == ReminderAction::add ? ReminderStatus::added : ReminderStatus::dismissed;
                r.user_mind = p.user_mind;
                out.reminder = r;
            } else if constexpr (std::is_same_v<T, ThoughtEvent>) {
                Thought t{"th" + std::to_string(state_.thoughts.size() + 1), p.text, event.at, p.supersedes};
                state_.thoughts.push_back(t);
                out.thought = std::move(t);
            } else {
                auto& r = find_reminder(state_, p.reminder_id);
                r.summary = p.summary;
                r.suggestion = p.suggestion;
                r.text_source = "generator";
                out.reminder = r;
            }
        },
        event.payload);

    add_reminders(out, event.at);
    return out;
}

void Session::add_reminders(EventOutcome& out, std::int64_t at) {
    for (const auto& trig : out.triggers) {
        auto id = "r" + std::to_string(state_.reminders.size() + 1);
        state_.reminders.push_back(assemble_reminder(trig, state_, *ws_, config_, nullptr, id, at));
        out.new_reminders.push_back(std::move(id));
    }
}

EventOutcome Session::record_view(std::string_view comment_id, std::optional<std::string_view> topic_id) {
    ViewEvent e{std::string(comment_id), topic_id ? std::optional<std::string>(std::string(*topic_id)) : std::nullopt};
    return apply(SessionEvent{0, 0, std::move(e)});
}

EventOutcome Session::mark_useful(std::string_view comment_id, bool useful) {
    return apply(SessionEvent{0, 0, MarkEvent{std::string(comment_id), useful}});
}

EventOutcome Session::save_snippet(std::string_view comment_id, std::size_t begin, std::size_t end,
                                   std::optional<std::string_view> topic_id) {
    SnippetEvent e{std::string(comment_id), begin, end,
                   topic_id ? std::optional<std::string>(std::string(*topic_id)) : std::nullopt};
    return apply(SessionEvent{0, 0, std::move(e)});
}

EventOutcome Session::resolve_reminder(std::string_view reminder_id, ReminderAction action,
                                       std::optional<std::string> user_mind) {
    return apply(SessionEvent{0, 0, ResolveEvent{std::string(reminder_id), action, std::move(user_mind)}});
}

EventOutcome Session::add_thought(std::string text) {
    return apply(SessionEvent{0, 0, ThoughtEvent{std::move(text), std::nullopt}});
}

EventOutcome Session::edit_thought(std::string_view thought_id, std::string text) {
    return apply(SessionEvent{0, 0, ThoughtEvent{std::move(text), std::string(thought_id)}});
}

EventOutcome Session::set_reminder_text(std::string_view reminder_id, std::string summary, std::string suggestion) {
    return apply(SessionEvent{0, 0, ReminderTextEvent{std::string(reminder_id), std::move(summary), std::move(suggestion)}});
}

Progress Session::progress(const Selection& selection) const {
    const auto members = ws_->resolve(selection);
    Progress p{0, members.size()};
    for (auto c : members) p.viewed += state_.viewed_any.count(c);
    return p;
}

std::unordered_set<std::size_t> Session::viewed_set() const {
    return {state_.viewed_any.begin(), state_.viewed_any.end()};
}

const Reminder& Session::reminder(std::string_view reminder_id) const {
    for (const auto& r : state_.reminders) {
        if (r.reminder_id == reminder_id) return r;
    }
    throw NotFound("unknown reminder '" + std::string(reminder_id) + "'");
}

std::vector<Reminder> Session::pending_reminders() const {
    std::vector<Reminder> out;
    for (const auto& r : state_.reminders) {
        if (r.status == ReminderStatus::pending) out.push_back(r);
    }
    return out;
}

} // namespace commsense
