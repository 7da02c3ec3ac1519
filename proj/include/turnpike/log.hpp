#pragma once

#include <functional>
#include <string_view>

namespace turnpike {

enum class LogLevel { debug, info, warning };

using LogSink = std::function<void(LogLevel, std::string_view)>;

/// Replaces the process-wide sink. The default writes warnings to stderr when
/// TURNPIKE_LOG is set in the environment and drops everything otherwise.
void set_log_sink(LogSink sink);

void log(LogLevel level, std::string_view message);

}  // namespace turnpike
