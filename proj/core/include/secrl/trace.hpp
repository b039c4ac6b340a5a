#ifndef SECRL_TRACE_HPP
#define SECRL_TRACE_HPP

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "secrl/alphabet.hpp"

namespace secrl {

struct TimedEvent {
  std::uint64_t tau;
  Event event;

  bool operator==(const TimedEvent&) const = default;
};

/// Finite timed trace. Timestamps start at 0 and never decrease.
class TimedTrace {
 public:
  TimedTrace() = default;
  explicit TimedTrace(std::vector<TimedEvent> steps);

  /// Unit timestamps 0, 1, 2, ...
  static TimedTrace unit(const std::vector<Event>& events);

  std::size_t size() const noexcept { return steps_.size(); }
  bool empty() const noexcept { return steps_.empty(); }
  const TimedEvent& operator[](std::size_t i) const { return steps_[i]; }
  const std::vector<TimedEvent>& steps() const noexcept { return steps_; }
  bool unit_spaced() const noexcept;

  bool operator==(const TimedTrace&) const = default;

 private:
  std::vector<TimedEvent> steps_;
};

/// A finite set of traces over one proposition table.
struct TraceSet {
  Propositions propositions;
  std::vector<TimedTrace> traces;
};

/// Parses one trace per non-empty line, steps `tau:{a,b}` separated by `;`.
/// With `declared`, every name must belong to it (UnknownProposition
/// otherwise); without, the table is built from the names seen.
TraceSet parse_traces(std::string_view text, const std::optional<Propositions>& declared = std::nullopt);

std::string format_trace(const TimedTrace& t, const Propositions& props);
std::string format_traces(const TraceSet& ts);

}  // namespace secrl

#endif  // SECRL_TRACE_HPP
