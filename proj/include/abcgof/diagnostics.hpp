#pragma once

#include <functional>
#include <string>
#include <vector>

namespace abcgof {

// Non-fatal conditions (dropped statistics, clamped acceptance counts,
// regression fallbacks) are reported through a process-wide sink. The default
// sink writes "warning: <message>" to stderr. Thread-safe.
using WarningSink = std::function<void(const std::string&)>;

void warn(const std::string& message);

// Installs a new sink and returns the previous one. An empty function
// silences warnings.
WarningSink set_warning_sink(WarningSink sink);

// RAII helper that collects warnings for the lifetime of the object.
class ScopedWarningCapture {
 public:
  ScopedWarningCapture();
  ~ScopedWarningCapture();
  ScopedWarningCapture(const ScopedWarningCapture&) = delete;
  ScopedWarningCapture& operator=(const ScopedWarningCapture&) = delete;

  const std::vector<std::string>& messages() const { return messages_; }
  bool contains(const std::string& fragment) const;

 private:
  WarningSink previous_;
  std::vector<std::string> messages_;
};

}  // namespace abcgof
