#pragma once

#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "commsense/session.hpp"

namespace commsense {

struct SynthesisBoard {
    std::string session_id;
    std::vector<Thought> thoughts;           // latest version of each thought, by creation
    std::vector<EvidenceSnippet> snippets;
    std::vector<Reminder> reminders;         // status added only

    bool operator==(const SynthesisBoard&) const = default;
};

void to_json(nlohmann::json& j, const SynthesisBoard& b);
void from_json(const nlohmann::json& j, SynthesisBoard& b);

SynthesisBoard board_snapshot(const Session& session);

enum class ExportFormat { markdown, structured };
ExportFormat parse_export_format(std::string_view s);

// Markdown needs the workspace for topic labels; structured output does not.
std::string export_board(const SynthesisBoard& board, ExportFormat format, const Workspace* ws = nullptr);
std::string export_board(const Session& session, ExportFormat format);

// Parses a structured export. Throws InvalidArgument on anything else.
SynthesisBoard import_board(std::string_view document);

} // namespace commsense
