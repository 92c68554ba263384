#pragma once

#include <functional>
#include <string_view>

namespace commsense::log {

enum class Level { debug, info, warning, error };

using Sink = std::function<void(Level, std::string_view)>;

// Replaces the process-wide sink (default: stderr, info and above).
// Returns the previous sink so tests can restore it.
Sink set_sink(Sink sink);

void write(Level level, std::string_view message);
inline void info(std::string_view m) { write(Level::info, m); }
inline void warning(std::string_view m) { write(Level::warning, m); }
inline void error(std::string_view m) { write(Level::error, m); }

} // namespace commsense::log
