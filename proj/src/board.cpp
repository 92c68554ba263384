#include "commsense/board.hpp"

#include <cstdio>
#include <set>
#include <sstream>

#include "commsense/error.hpp"

namespace commsense {

using json = nlohmann::json;

namespace {
constexpr const char* kFormatTag = "commsense-board";
constexpr int kFormatVersion = 1;
} // namespace

void to_json(json& j, const SynthesisBoard& b) {
    j = json{{"format", kFormatTag},
             {"version", kFormatVersion},
             {"session_id", b.session_id},
             {"thoughts", b.thoughts},
             {"snippets", b.snippets},
             {"reminders", b.reminders}};
}

void from_json(const json& j, SynthesisBoard& b) {
    if (j.value("format", std::string()) != kFormatTag) throw InvalidArgument("not a board export");
    if (j.value("version", 0) != kFormatVersion) throw InvalidArgument("unsupported board export version");
    b.session_id = j.at("session_id").get<std::string>();
    b.thoughts = j.at("thoughts").get<std::vector<Thought>>();
    b.snippets = j.at("snippets").get<std::vector<EvidenceSnippet>>();
    b.reminders = j.at("reminders").get<std::vector<Reminder>>();
    for (const auto& r : b.reminders) {
        if (r.status != ReminderStatus::added) {
            throw InvalidArgument("board export lists reminder '" + r.reminder_id + "' that was not added");
        }
    }
}

SynthesisBoard board_snapshot(const Session& session) {
    const auto& st = session.state();
    SynthesisBoard b;
    b.session_id = st.session_id;
    std::set<std::string> superseded;
    for (const auto& t : st.thoughts) {
        if (t.supersedes) superseded.insert(*t.supersedes);
    }
    for (const auto& t : st.thoughts) {
        if (!superseded.count(t.thought_id)) b.thoughts.push_back(t);
    }
    b.snippets = st.snippets;
    for (const auto& r : st.reminders) {
        if (r.status == ReminderStatus::added) b.reminders.push_back(r);
    }
    return b;
}

ExportFormat parse_export_format(std::string_view s) {
    if (s == "markdown" || s == "md") return ExportFormat::markdown;
    if (s == "structured" || s == "json") return ExportFormat::structured;
    throw InvalidArgument("unknown export format '" + std::string(s) + "' (expected markdown or structured)");
}

namespace {

std::string pct(double f) {
    char buf[16];
    std::snprintf(buf, sizeof buf, "%.0f%%", f * 100.0);
    return buf;
}

std::string grounding_line(const json& g) {
    std::ostringstream os;
    if (g.value("kind", "") == "balance") {
        os << "useful " << g.value("useful", 0) << " (" << g.value("positive", 0) << " positive, "
           << g.value("neutral", 0) << " neutral, " << g.value("negative", 0) << " negative); topic "
           << pct(g.value("corpus_positive", 0.0)) << " positive, " << pct(g.value("corpus_negative", 0.0))
           << " negative; deviation " << pct(g.value("delta_p", 0.0));
    } else {
        os << "viewed " << g.value("viewed", 0) << " of " << g.value("total", 0) << " ("
           << pct(g.value("fraction", 0.0)) << ")";
    }
    return os.str();
}

std::string topic_name(const Workspace* ws, const std::string& topic_id) {
    if (topic_id.empty()) return "no topic";
    if (ws != nullptr) {
        if (const auto* t = ws->scheme().find(topic_id)) return t->category;
    }
    return topic_id;
}

std::string markdown(const SynthesisBoard& b, const Workspace* ws) {
    std::ostringstream os;
    os << "# Synthesis Board (" << b.session_id << ")\n\n";
    os << "## Instant Thoughts\n\n";
    for (const auto& t : b.thoughts) os << "- " << t.text << "\n";
    if (!b.thoughts.empty()) os << "\n";
    os << "## Evidence Snippets\n\n";
    for (const auto& s : b.snippets) {
        os << "- \"" << s.text << "\" [" << s.comment_id << ", " << to_string(s.sentiment) << ", "
           << topic_name(ws, s.topic_id) << "]\n";
    }
    if (!b.snippets.empty()) os << "\n";
    os << "## Saved Reminders\n\n";
    for (const auto& r : b.reminders) {
        os << "- **" << r.grounding.value("topic", r.trigger.topic_id) << "** (" << to_string(r.trigger.kind)
           << "): " << r.summary << " " << r.suggestion << "\n";
        os << "  - Grounding: " << grounding_line(r.grounding) << "\n";
        if (r.user_mind && !r.user_mind->empty()) os << "  - User mind: " << *r.user_mind << "\n";
    }
    return os.str();
}

} // namespace

std::string export_board(const SynthesisBoard& board, ExportFormat format, const Workspace* ws) {
    if (format == ExportFormat::markdown) return markdown(board, ws);
    return json(board).dump(2) + "\n";
}

std::string export_board(const Session& session, ExportFormat format) {
    return export_board(board_snapshot(session), format, &session.workspace());
}

SynthesisBoard import_board(std::string_view document) {
    json j;
    try {
        j = json::parse(document);
    } catch (const json::parse_error& e) {
        throw InvalidArgument(std::string("board export is not valid JSON: ") + e.what());
    }
    try {
        return j.get<SynthesisBoard>();
    } catch (const json::exception& e) {
        throw InvalidArgument(std::string("malformed board export: ") + e.what());
    }
}

} // namespace commsense
