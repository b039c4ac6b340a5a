#include "secrl/trace.hpp"

#include <cctype>

#include "secrl/error.hpp"

namespace secrl {

TimedTrace::TimedTrace(std::vector<TimedEvent> steps) : steps_(std::move(steps)) {
  if (!steps_.empty() && steps_.front().tau != 0) throw Error("trace must start at timestamp 0");
  for (std::size_t i = 1; i < steps_.size(); ++i) {
    if (steps_[i].tau < steps_[i - 1].tau) throw Error("trace timestamps decrease at position " + std::to_string(i));
  }
}

TimedTrace TimedTrace::unit(const std::vector<Event>& events) {
  std::vector<TimedEvent> steps;
  steps.reserve(events.size());
  for (std::size_t i = 0; i < events.size(); ++i) steps.push_back({i, events[i]});
  return TimedTrace(std::move(steps));
}

bool TimedTrace::unit_spaced() const noexcept {
  for (std::size_t i = 0; i < steps_.size(); ++i) {
    if (steps_[i].tau != i) return false;
  }
  return true;
}

namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return s;
}

[[noreturn]] void bad(std::size_t line, std::string_view what) {
  throw Error("trace line " + std::to_string(line) + ": " + std::string(what));
}

}  // namespace

TraceSet parse_traces(std::string_view text, const std::optional<Propositions>& declared) {
  TraceSet out;
  if (declared) out.propositions = *declared;
  std::size_t lineno = 0;
  while (!text.empty()) {
    ++lineno;
    const auto nl = text.find('\n');
    std::string_view line = trim(text.substr(0, nl));
    text = nl == std::string_view::npos ? std::string_view{} : text.substr(nl + 1);
    if (line.empty()) continue;

    std::vector<TimedEvent> steps;
    while (!line.empty()) {
      const auto semi = line.find(';');
      std::string_view step = trim(line.substr(0, semi));
      line = semi == std::string_view::npos ? std::string_view{} : line.substr(semi + 1);
      const auto colon = step.find(':');
      if (colon == std::string_view::npos) bad(lineno, "step without ':'");
      const std::string tau_text(trim(step.substr(0, colon)));
      std::string_view set = trim(step.substr(colon + 1));
      if (tau_text.empty() || tau_text.find_first_not_of("0123456789") != std::string::npos) {
        bad(lineno, "bad timestamp '" + tau_text + "'");
      }
      if (set.size() < 2 || set.front() != '{' || set.back() != '}') bad(lineno, "event must be written {a,b}");
      set = set.substr(1, set.size() - 2);
      Event e = 0;
      while (!trim(set).empty()) {
        const auto comma = set.find(',');
        const std::string name(trim(set.substr(0, comma)));
        set = comma == std::string_view::npos ? std::string_view{} : set.substr(comma + 1);
        if (name.empty()) bad(lineno, "empty proposition name");
        if (declared) {
          e |= out.propositions.bit(name);
        } else {
          e |= Event{1} << out.propositions.add(name);
        }
      }
      steps.push_back({std::stoull(tau_text), e});
    }
    out.traces.emplace_back(std::move(steps));
  }
  return out;
}

std::string format_trace(const TimedTrace& t, const Propositions& props) {
  std::string s;
  for (std::size_t i = 0; i < t.size(); ++i) {
    if (i) s += ';';
    s += std::to_string(t[i].tau) + ":" + props.format(t[i].event);
  }
  return s;
}

std::string format_traces(const TraceSet& ts) {
  std::string s;
  for (const auto& t : ts.traces) s += format_trace(t, ts.propositions) + "\n";
  return s;
}

}  // namespace secrl
