#pragma once

#include <cstdlib>
#include <iostream>
#include <sstream>
#include <string>

namespace mn {

// Diagnostic logging, off unless the MNORM_LOG environment variable is set
// to a nonempty value other than "0". Output goes to stderr so machine
// readable stdout stays clean.
inline bool log_enabled() {
  static const bool on = [] {
    const char* v = std::getenv("MNORM_LOG");
    return v && *v && std::string(v) != "0";
  }();
  return on;
}

template <class... Args>
void logf(Args&&... args) {
  if (!log_enabled()) return;
  std::ostringstream os;
  (os << ... << args);
  std::cerr << "[mnorm] " << os.str() << "\n";
}

}  // namespace mn
