#include "abcgof/diagnostics.hpp"

#include <iostream>
#include <mutex>
#include <vector>

namespace abcgof {
namespace {

std::mutex& sink_mutex() {
  static std::mutex m;
  return m;
}

WarningSink& current_sink() {
  static WarningSink sink = [](const std::string& message) {
    std::cerr << "warning: " << message << '\n';
  };
  return sink;
}

}  // namespace

void warn(const std::string& message) {
  std::lock_guard lock(sink_mutex());
  if (auto& sink = current_sink()) sink(message);
}

WarningSink set_warning_sink(WarningSink sink) {
  std::lock_guard lock(sink_mutex());
  auto previous = std::move(current_sink());
  current_sink() = std::move(sink);
  return previous;
}

ScopedWarningCapture::ScopedWarningCapture() {
  previous_ = set_warning_sink(
      [this](const std::string& message) { messages_.push_back(message); });
}

ScopedWarningCapture::~ScopedWarningCapture() {
  set_warning_sink(std::move(previous_));
}

bool ScopedWarningCapture::contains(const std::string& fragment) const {
  for (const auto& m : messages_) {
    if (m.find(fragment) != std::string::npos) return true;
  }
  return false;
}

}  // namespace abcgof
