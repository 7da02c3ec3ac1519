#include "turnpike/log.hpp"

#include <cstdlib>
#include <iostream>
#include <mutex>

namespace turnpike {
namespace {

std::mutex& sink_mutex() {
  static std::mutex m;
  return m;
}

LogSink& current_sink() {
  static LogSink sink = [](LogLevel level, std::string_view message) {
    static const bool enabled = std::getenv("TURNPIKE_LOG") != nullptr;
    if (!enabled) return;
    static constexpr const char* names[] = {"debug", "info", "warning"};
    std::clog << "[turnpike:" << names[static_cast<int>(level)] << "] " << message << '\n';
  };
  return sink;
}

}  // namespace

void set_log_sink(LogSink sink) {
  std::lock_guard lock(sink_mutex());
  current_sink() = std::move(sink);
}

void log(LogLevel level, std::string_view message) {
  std::lock_guard lock(sink_mutex());
  if (current_sink()) current_sink()(level, message);
}

}  // namespace turnpike
