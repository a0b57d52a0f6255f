#include "qppeval/log.hpp"

#include <cstdlib>
#include <iostream>
#include <string>

namespace qpp::log {

namespace {

Level parse_level(const char* value) {
  if (value == nullptr) return Level::Warn;
  std::string v(value);
  if (v == "error" || v == "0") return Level::Error;
  if (v == "warn" || v == "1") return Level::Warn;
  if (v == "info" || v == "2") return Level::Info;
  if (v == "debug" || v == "3") return Level::Debug;
  return Level::Warn;
}

const char* level_name(Level level) {
  switch (level) {
    case Level::Error: return "error";
    case Level::Warn: return "warn";
    case Level::Info: return "info";
    case Level::Debug: return "debug";
  }
  return "?";
}

}  // namespace

Level threshold() {
  static const Level cached = parse_level(std::getenv("QPPM_LOG"));
  return cached;
}

void write(Level level, const std::string& message) {
  if (static_cast<int>(level) > static_cast<int>(threshold())) return;
  std::cerr << "qppeval [" << level_name(level) << "] " << message << "\n";
}

}  // namespace qpp::log
