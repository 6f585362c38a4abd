#include "mdbg/log.hpp"

#include <iostream>
#include <mutex>

namespace mdbg::log {
namespace {

std::mutex& sink_mutex() {
  static std::mutex m;
  return m;
}

Sink& current_sink() {
  static Sink sink;
  return sink;
}

Level& min_level() {
  static Level level = Level::info;
  return level;
}

std::string_view level_name(Level level) {
  switch (level) {
    case Level::debug: return "debug";
    case Level::info: return "info";
    case Level::warning: return "warning";
    case Level::error: return "error";
  }
  return "info";
}

}  // namespace

void emit(Level level, std::string_view event, nlohmann::json fields) {
  std::lock_guard lock(sink_mutex());
  if (level < min_level()) return;
  nlohmann::json record = nlohmann::json::object();
  record["level"] = level_name(level);
  record["event"] = event;
  if (fields.is_object()) {
    for (auto& [key, value] : fields.items()) record[key] = value;
  }
  if (current_sink()) {
    current_sink()(record);
  } else {
    std::cerr << record.dump() << '\n';
  }
}

Sink set_sink(Sink sink) {
  std::lock_guard lock(sink_mutex());
  Sink previous = std::move(current_sink());
  current_sink() = std::move(sink);
  return previous;
}

void set_min_level(Level level) {
  std::lock_guard lock(sink_mutex());
  min_level() = level;
}

}  // namespace mdbg::log
