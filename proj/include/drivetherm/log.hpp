#pragma once

#include <functional>
#include <iostream>
#include <mutex>
#include <string_view>
#include <utility>

namespace drivetherm::log {

using Sink = std::function<void(std::string_view)>;

namespace detail {
struct SinkState {
  std::mutex mutex;
  Sink sink = [](std::string_view msg) { std::clog << "warning: " << msg << '\n'; };
};
inline SinkState& state() {
  static SinkState s;
  return s;
}
}  // namespace detail

/// Replace the warning sink; returns the previous one. Pass an empty
/// function to silence warnings.
inline Sink set_warning_sink(Sink sink) {
  auto& s = detail::state();
  std::lock_guard lock(s.mutex);
  return std::exchange(s.sink, std::move(sink));
}

inline void warn(std::string_view msg) {
  auto& s = detail::state();
  std::lock_guard lock(s.mutex);
  if (s.sink) s.sink(msg);
}

}  // namespace drivetherm::log
