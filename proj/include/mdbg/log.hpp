#pragma once

#include <functional>
#include <string>
#include <string_view>

#include <json.hpp>

namespace mdbg::log {

enum class Level { debug, info, warning, error };

using Sink = std::function<void(const nlohmann::json& record)>;

/// Emits one line-delimited JSON record: {"level", "event", ...fields}.
/// The default sink writes to stderr.
void emit(Level level, std::string_view event, nlohmann::json fields = nlohmann::json::object());

inline void info(std::string_view event, nlohmann::json fields = nlohmann::json::object()) {
  emit(Level::info, event, std::move(fields));
}
inline void warn(std::string_view event, nlohmann::json fields = nlohmann::json::object()) {
  emit(Level::warning, event, std::move(fields));
}

/// Replaces the process-wide sink; returns the previous one. Passing an
/// empty function restores the stderr sink.
Sink set_sink(Sink sink);

/// Records below this level are dropped.
void set_min_level(Level level);

/// Installs a sink for the lifetime of the guard.
class ScopedSink {
 public:
  explicit ScopedSink(Sink sink) : previous_(set_sink(std::move(sink))) {}
  ~ScopedSink() { set_sink(std::move(previous_)); }
  ScopedSink(const ScopedSink&) = delete;
  ScopedSink& operator=(const ScopedSink&) = delete;

 private:
  Sink previous_;
};

}  // namespace mdbg::log
