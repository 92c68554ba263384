#include "commsense/reminders.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <set>

#include "commsense/error.hpp"
#include "commsense/log.hpp"
#include "commsense/pipeline.hpp"
#include "commsense/session.hpp"
#include "commsense/workspace.hpp"

namespace commsense {

using json = nlohmann::json;

void TriggerConfig::validate() const {
    if (!(delta_theta > 0.0 && delta_theta < 1.0)) throw InvalidArgument("delta_theta must lie in (0, 1)");
    if (!(coverage_threshold > 0.0 && coverage_threshold <= 1.0)) {
        throw InvalidArgument("coverage_threshold must lie in (0, 1]");
    }
    if (!(rearm_level >= 0.0 && rearm_level < 1.0)) throw InvalidArgument("rearm_level must lie in [0, 1)");
}

double TriggerConfig::rearm_at() const noexcept {
    return rearm_policy == RearmPolicy::on_drop_below_theta ? delta_theta : std::min(rearm_level, delta_theta);
}

std::string_view to_string(RearmPolicy p) noexcept {
    return p == RearmPolicy::on_drop_below_theta ? "on_drop_below_theta" : "on_drop_below_level";
}

RearmPolicy parse_rearm_policy(std::string_view s) {
    if (s == "on_drop_below_theta") return RearmPolicy::on_drop_below_theta;
    if (s == "on_drop_below_level") return RearmPolicy::on_drop_below_level;
    throw InvalidArgument("unknown rearm_policy '" + std::string(s) + "'");
}

void to_json(json& j, const TriggerConfig& c) {
    j = json{{"delta_theta", c.delta_theta},
             {"coverage_threshold", c.coverage_threshold},
             {"rearm_policy", to_string(c.rearm_policy)},
             {"rearm_level", c.rearm_level}};
}

void from_json(const json& j, TriggerConfig& c) {
    TriggerConfig d;
    c.delta_theta = j.value("delta_theta", d.delta_theta);
    c.coverage_threshold = j.value("coverage_threshold", d.coverage_threshold);
    c.rearm_policy = parse_rearm_policy(j.value("rearm_policy", std::string(to_string(d.rearm_policy))));
    c.rearm_level = j.value("rearm_level", d.rearm_level);
}

std::string_view to_string(TriggerKind k) noexcept { return k == TriggerKind::coverage ? "coverage" : "balance"; }

std::string_view to_string(ReminderStatus s) noexcept {
    switch (s) {
    case ReminderStatus::pending: return "pending";
    case ReminderStatus::added: return "added";
    case ReminderStatus::dismissed: return "dismissed";
    }
    return "pending";
}

ReminderStatus parse_reminder_status(std::string_view s) {
    if (s == "pending") return ReminderStatus::pending;
    if (s == "added") return ReminderStatus::added;
    if (s == "dismissed") return ReminderStatus::dismissed;
    throw InvalidArgument("unknown reminder status '" + std::string(s) + "'");
}

void to_json(json& j, const DeviationStats& d) {
    j = json{{"topic_id", d.topic_id},   {"n_useful", d.n_useful},     {"n_pos", d.n_pos},
             {"n_neu", d.n_neu},         {"n_neg", d.n_neg},           {"local_pos", d.local_pos},
             {"local_neg", d.local_neg}, {"global_pos", d.global_pos}, {"global_neg", d.global_neg},
             {"delta_p", d.delta_p},     {"evaluated", d.evaluated}};
}

void from_json(const json& j, DeviationStats& d) {
    d.topic_id = j.at("topic_id").get<std::string>();
    d.n_useful = j.at("n_useful").get<std::size_t>();
    d.n_pos = j.at("n_pos").get<std::size_t>();
    d.n_neu = j.at("n_neu").get<std::size_t>();
    d.n_neg = j.at("n_neg").get<std::size_t>();
    d.local_pos = j.at("local_pos").get<double>();
    d.local_neg = j.at("local_neg").get<double>();
    d.global_pos = j.at("global_pos").get<double>();
    d.global_neg = j.at("global_neg").get<double>();
    d.delta_p = j.at("delta_p").get<double>();
    d.evaluated = j.at("evaluated").get<bool>();
}

void to_json(json& j, const CoverageStats& c) {
    j = json{{"topic_id", c.topic_id}, {"viewed", c.viewed},     {"total", c.total},
             {"required", c.required}, {"fraction", c.fraction}, {"threshold", c.threshold}};
}

void from_json(const json& j, CoverageStats& c) {
    c.topic_id = j.at("topic_id").get<std::string>();
    c.viewed = j.at("viewed").get<std::size_t>();
    c.total = j.at("total").get<std::size_t>();
    c.required = j.at("required").get<std::size_t>();
    c.fraction = j.at("fraction").get<double>();
    c.threshold = j.at("threshold").get<double>();
}

void to_json(json& j, const TriggerEvent& t) {
    j = json{{"kind", to_string(t.kind)}, {"topic_id", t.topic_id}, {"fired_at", t.fired_at}};
    if (t.deviation) j["evidence"] = *t.deviation;
    if (t.coverage) j["evidence"] = *t.coverage;
}

void from_json(const json& j, TriggerEvent& t) {
    const auto kind = j.at("kind").get<std::string>();
    t.kind = kind == "coverage" ? TriggerKind::coverage : TriggerKind::balance;
    t.topic_id = j.at("topic_id").get<std::string>();
    t.fired_at = j.at("fired_at").get<std::uint64_t>();
    t.deviation.reset();
    t.coverage.reset();
    if (t.kind == TriggerKind::balance) {
        t.deviation = j.at("evidence").get<DeviationStats>();
    } else {
        t.coverage = j.at("evidence").get<CoverageStats>();
    }
}

void to_json(json& j, const Reminder& r) {
    j = json{{"reminder_id", r.reminder_id},
             {"trigger", r.trigger},
             {"grounding", r.grounding},
             {"summary", r.summary},
             {"suggestion", r.suggestion},
             {"text_source", r.text_source},
             {"user_mind", r.user_mind ? json(*r.user_mind) : json(nullptr)},
             {"status", to_string(r.status)},
             {"created_at", r.created_at}};
}

void from_json(const json& j, Reminder& r) {
    r.reminder_id = j.at("reminder_id").get<std::string>();
    r.trigger = j.at("trigger").get<TriggerEvent>();
    r.grounding = j.at("grounding");
    r.summary = j.at("summary").get<std::string>();
    r.suggestion = j.at("suggestion").get<std::string>();
    r.text_source = j.at("text_source").get<std::string>();
    const auto& mind = j.at("user_mind");
    r.user_mind = mind.is_null() ? std::nullopt : std::optional<std::string>(mind.get<std::string>());
    r.status = parse_reminder_status(j.at("status").get<std::string>());
    r.created_at = j.at("created_at").get<std::int64_t>();
}

DeviationStats deviation(const SessionState& session, const Workspace& ws, std::string_view topic_id,
                         const SentimentDistribution& global) {
    const auto members = ws.topic_members(topic_id);
    DeviationStats d;
    d.topic_id = std::string(topic_id);
    d.global_pos = global.p_pos;
    d.global_neg = global.p_neg;
    for (const auto& [comment, _] : session.useful) {
        if (!std::binary_search(members.begin(), members.end(), comment)) continue;
        ++d.n_useful;
        switch (ws.corpus().sentiment(comment)) {
        case SentimentLabel::positive: ++d.n_pos; break;
        case SentimentLabel::neutral: ++d.n_neu; break;
        case SentimentLabel::negative: ++d.n_neg; break;
        }
    }
    if (d.n_useful == 0) return d;
    const double n = static_cast<double>(d.n_useful);
    d.local_pos = static_cast<double>(d.n_pos) / n;
    d.local_neg = static_cast<double>(d.n_neg) / n;
    d.delta_p = std::max(std::abs(d.local_neg - d.global_neg), std::abs(d.local_pos - d.global_pos));
    d.evaluated = true;
    return d;
}

DeviationStats deviation(const SessionState& session, const Workspace& ws, std::string_view topic_id) {
    return deviation(session, ws, topic_id, ws.stats(topic_id));
}

std::optional<TriggerEvent> evaluate_balance_trigger(SessionState& session, const Workspace& ws,
                                                     std::string_view topic_id, const TriggerConfig& config,
                                                     std::uint64_t seq,
                                                     const std::optional<SentimentDistribution>& global) {
    auto d = global ? deviation(session, ws, topic_id, *global) : deviation(session, ws, topic_id);
    if (!d.evaluated) return std::nullopt;
    auto& arm = session.balance_arm[std::string(topic_id)];
    if (d.delta_p > config.delta_theta) {
        if (arm == ArmState::fired) return std::nullopt;
        arm = ArmState::fired;
        return TriggerEvent{TriggerKind::balance, std::string(topic_id), std::move(d), std::nullopt, seq};
    }
    if (d.delta_p <= config.rearm_at()) arm = ArmState::armed;
    return std::nullopt;
}

std::size_t coverage_required(double threshold, std::size_t n) {
    // The epsilon absorbs products such as 0.7 * 40 landing a hair above 28.
    const double exact = threshold * static_cast<double>(n);
    return static_cast<std::size_t>(std::ceil(exact - 1e-9));
}

std::optional<TriggerEvent> evaluate_coverage_trigger(SessionState& session, const Workspace& ws,
                                                      std::string_view topic_id, const TriggerConfig& config,
                                                      std::uint64_t seq) {
    const std::size_t total = ws.topic_members(topic_id).size();
    if (total == 0) return std::nullopt;
    auto& fired = session.coverage_fired[std::string(topic_id)];
    if (fired) return std::nullopt;
    const auto it = session.viewed.find(std::string(topic_id));
    const std::size_t viewed = it == session.viewed.end() ? 0 : it->second.size();
    const std::size_t required = coverage_required(config.coverage_threshold, total);
    if (viewed < required) return std::nullopt;
    fired = true;
    CoverageStats c{std::string(topic_id), viewed, total, required,
                    static_cast<double>(viewed) / static_cast<double>(total), config.coverage_threshold};
    return TriggerEvent{TriggerKind::coverage, std::string(topic_id), std::nullopt, std::move(c), seq};
}

namespace {

std::string percent(double fraction) {
    return std::to_string(static_cast<long>(std::lround(fraction * 100.0))) + "%";
}

std::string fixed2(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.2f", v);
    return buf;
}

std::string topic_label(const Workspace& ws, std::string_view topic_id) {
    if (const auto* t = ws.scheme().find(topic_id)) return t->category;
    return std::string(topic_id);
}

enum class Lean { negative, positive, neutral };

Lean lean_of(const DeviationStats& d) {
    const double over_neg = d.local_neg - d.global_neg;
    const double over_pos = d.local_pos - d.global_pos;
    if (over_neg <= 0.0 && over_pos <= 0.0) return Lean::neutral;
    return over_neg >= over_pos ? Lean::negative : Lean::positive;
}

// Another topic the reader has covered least (ties in scheme order).
std::optional<std::string> suggest_other_topic(const SessionState& session, const Workspace& ws,
                                               std::string_view current) {
    std::optional<std::string> best;
    double best_fraction = 2.0;
    for (const auto& t : ws.scheme().topics) {
        if (t.topic_id == current) continue;
        const auto total = ws.topic_members(t.topic_id).size();
        if (total == 0) continue;
        const auto it = session.viewed.find(t.topic_id);
        const double f = it == session.viewed.end() ? 0.0 : static_cast<double>(it->second.size()) / static_cast<double>(total);
        if (f < best_fraction) {
            best_fraction = f;
            best = t.category;
        }
    }
    return best;
}

} // namespace

json grounding_for(const TriggerEvent& trigger, const Workspace& ws, const TriggerConfig& config) {
    json g{{"kind", to_string(trigger.kind)},
           {"topic_id", trigger.topic_id},
           {"topic", topic_label(ws, trigger.topic_id)}};
    if (trigger.deviation) {
        const auto& d = *trigger.deviation;
        g["useful"] = d.n_useful;
        g["positive"] = d.n_pos;
        g["neutral"] = d.n_neu;
        g["negative"] = d.n_neg;
        g["local_positive"] = d.local_pos;
        g["local_negative"] = d.local_neg;
        g["corpus_positive"] = d.global_pos;
        g["corpus_negative"] = d.global_neg;
        g["delta_p"] = d.delta_p;
        g["delta_theta"] = config.delta_theta;
    }
    if (trigger.coverage) {
        const auto& c = *trigger.coverage;
        g["viewed"] = c.viewed;
        g["total"] = c.total;
        g["fraction"] = c.fraction;
        g["threshold"] = c.threshold;
    }
    return g;
}

ReminderPrompt reminder_prompt(const TriggerEvent& trigger, const SessionState& session, const Workspace& ws,
                               const TriggerConfig& config) {
    ReminderPrompt p;
    const auto label = topic_label(ws, trigger.topic_id);
    if (trigger.deviation) {
        const auto& d = *trigger.deviation;
        const auto lean = lean_of(d);
        const char* lean_name = lean == Lean::negative ? "negative" : lean == Lean::positive ? "positive" : "neutral";
        p.trigger_reason = "Sentiment imbalance: the comments marked useful on '" + label + "' are mostly " +
                           lean_name + " compared with the overall distribution for this topic (deviation " +
                           fixed2(d.delta_p) + " > threshold " + fixed2(config.delta_theta) + ").";
        p.statistics = "Useful comments on '" + label + "': " + std::to_string(d.n_useful) + " (" +
                       std::to_string(d.n_pos) + " positive, " + std::to_string(d.n_neu) + " neutral, " +
                       std::to_string(d.n_neg) + " negative). Topic corpus: " + percent(d.global_pos) +
                       " positive, " + percent(d.global_neg) + " negative.";
    } else if (trigger.coverage) {
        const auto& c = *trigger.coverage;
        p.trigger_reason = "Topic coverage: the user has viewed " + percent(c.fraction) + " of the comments on '" +
                           label + "'.";
        p.statistics = "Viewed " + std::to_string(c.viewed) + " of " + std::to_string(c.total) +
                       " comments on '" + label + "' (threshold " + percent(c.threshold) + ").";
    }

    // Ten most recent distinct comments engaged with in this topic.
    std::vector<std::size_t> recent;
    std::set<std::size_t> seen;
    for (auto it = session.engagement.rbegin(); it != session.engagement.rend() && recent.size() < 10; ++it) {
        if (seen.count(*it) || !ws.in_topic(*it, trigger.topic_id)) continue;
        seen.insert(*it);
        recent.push_back(*it);
    }
    for (std::size_t i = 0; i < recent.size(); ++i) {
        if (i > 0) p.comment_texts += "\n";
        p.comment_texts += "- " + ws.corpus()[recent[i]].text;
    }
    p.request = {prompts::summary_system(), prompts::summary_user(p.trigger_reason, p.statistics, p.comment_texts),
                 0.3, true};
    return p;
}

ReminderText fallback_text(const TriggerEvent& trigger, const SessionState& session, const Workspace& ws) {
    const auto label = topic_label(ws, trigger.topic_id);
    ReminderText t;
    if (trigger.deviation) {
        const auto& d = *trigger.deviation;
        t.summary = "You marked " + std::to_string(d.n_useful) + (d.n_useful == 1 ? " comment" : " comments") +
                    " on '" + label + "' as useful: " +
                    std::to_string(d.n_pos) + " positive, " + std::to_string(d.n_neu) + " neutral, " +
                    std::to_string(d.n_neg) + " negative, against " + percent(d.global_pos) + " positive and " +
                    percent(d.global_neg) + " negative across the topic.";
        switch (lean_of(d)) {
        case Lean::negative:
            t.suggestion = "You have mainly read negative opinions—consider checking the other side.";
            break;
        case Lean::positive:
            t.suggestion = "You have mainly read positive opinions—consider checking the other side.";
            break;
        case Lean::neutral:
            t.suggestion = "You have mainly marked neutral comments—consider checking both positive and "
                           "negative opinions.";
            break;
        }
    } else {
        const double fraction = trigger.coverage ? trigger.coverage->fraction : 0.0;
        t.summary = "You have viewed " + percent(fraction) + " of the comments on '" + label + "'.";
        if (auto other = suggest_other_topic(session, ws, trigger.topic_id)) {
            t.suggestion = "Pause to sum up what you have learned here, then try another topic such as '" + *other + "'.";
        } else {
            t.suggestion = "Pause to sum up what you have learned before reading further.";
        }
    }
    return t;
}

ReminderText parse_reminder_response(const std::string& raw) {
    json doc;
    try {
        doc = json::parse(raw);
    } catch (const json::parse_error& e) {
        // Chat models sometimes wrap JSON in a fenced block.
        const auto open = raw.find('{');
        const auto close = raw.rfind('}');
        if (open == std::string::npos || close == std::string::npos || close < open) {
            throw SchemaViolation(std::string("reminder response is not JSON: ") + e.what(), raw);
        }
        try {
            doc = json::parse(raw.substr(open, close - open + 1));
        } catch (const json::parse_error& e2) {
            throw SchemaViolation(std::string("reminder response is not JSON: ") + e2.what(), raw);
        }
    }
    if (!doc.is_object() || !doc.contains("summary") || !doc.contains("suggestion") ||
        !doc["summary"].is_string() || !doc["suggestion"].is_string()) {
        throw SchemaViolation("reminder response needs string keys 'summary' and 'suggestion'", raw);
    }
    ReminderText t{doc["summary"].get<std::string>(), doc["suggestion"].get<std::string>()};
    if (t.summary.empty() || t.suggestion.empty()) {
        throw SchemaViolation("reminder response has an empty summary or suggestion", raw);
    }
    return t;
}

std::optional<ReminderText> generate_reminder_text(const ReminderPrompt& prompt, TextGenerator& generator) {
    try {
        return parse_reminder_response(generator.complete(prompt.request));
    } catch (const SchemaViolation& e) {
        log::warning(std::string("reminder generator answer rejected: ") + e.what() + "; raw response: " +
                     e.raw_response().substr(0, 2000));
    } catch (const std::exception& e) {
        log::warning(std::string("reminder generator failed: ") + e.what());
    }
    return std::nullopt;
}

Reminder assemble_reminder(const TriggerEvent& trigger, const SessionState& session, const Workspace& ws,
                           const TriggerConfig& config, TextGenerator* generator, std::string reminder_id,
                           std::int64_t created_at) {
    Reminder r;
    r.reminder_id = std::move(reminder_id);
    r.trigger = trigger;
    r.grounding = grounding_for(trigger, ws, config);
    r.created_at = created_at;
    r.status = ReminderStatus::pending;
    if (generator != nullptr) {
        if (auto text = generate_reminder_text(reminder_prompt(trigger, session, ws, config), *generator)) {
            r.summary = std::move(text->summary);
            r.suggestion = std::move(text->suggestion);
            r.text_source = "generator";
            return r;
        }
    }
    auto text = fallback_text(trigger, session, ws);
    r.summary = std::move(text.summary);
    r.suggestion = std::move(text.suggestion);
    r.text_source = "fallback";
    return r;
}

} // namespace commsense
