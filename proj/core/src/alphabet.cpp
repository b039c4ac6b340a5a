#include "secrl/alphabet.hpp"

#include <algorithm>

#include "secrl/error.hpp"

namespace secrl {

Propositions::Propositions(std::vector<std::string> names) {
  for (const auto& n : names) add(n);
}

std::size_t Propositions::add(std::string_view name) {
  if (auto idx = index_of(name)) return *idx;
  if (names_.size() >= kMaxPropositions) {
    throw Error("too many atomic propositions (limit 32)");
  }
  names_.emplace_back(name);
  return names_.size() - 1;
}

std::optional<std::size_t> Propositions::index_of(std::string_view name) const {
  auto it = std::find(names_.begin(), names_.end(), name);
  if (it == names_.end()) return std::nullopt;
  return static_cast<std::size_t>(it - names_.begin());
}

Event Propositions::bit(std::string_view name) const {
  auto idx = index_of(name);
  if (!idx) throw UnknownProposition("unknown proposition '" + std::string(name) + "'");
  return Event{1} << *idx;
}

Event Propositions::event_of(std::span<const std::string> names) const {
  Event e = 0;
  for (const auto& n : names) e |= bit(n);
  return e;
}

std::vector<std::string> Propositions::names_in(Event e) const {
  std::vector<std::string> out;
  for (std::size_t i = 0; i < names_.size(); ++i) {
    if (e & (Event{1} << i)) out.push_back(names_[i]);
  }
  return out;
}

std::string Propositions::format(Event e) const {
  std::string s = "{";
  bool first = true;
  for (const auto& n : names_in(e)) {
    if (!first) s += ',';
    s += n;
    first = false;
  }
  return s + "}";
}

TupleAlphabet::TupleAlphabet(Propositions props, std::vector<Event> events, std::size_t width)
    : props_(std::move(props)), events_(std::move(events)), width_(width) {
  if (events_.empty()) throw Error("tuple alphabet needs at least one event");
  std::vector<Event> sorted = events_;
  std::sort(sorted.begin(), sorted.end());
  if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end()) {
    throw Error("tuple alphabet events must be distinct");
  }
  size_ = 1;
  for (std::size_t c = 0; c < width_; ++c) size_ *= events_.size();
}

TupleAlphabet TupleAlphabet::powerset(Propositions props, std::size_t width) {
  std::vector<Event> events;
  const Event n = Event{1} << props.size();
  for (Event e = 0; e < n; ++e) events.push_back(e);
  return TupleAlphabet(std::move(props), std::move(events), width);
}

std::optional<std::size_t> TupleAlphabet::event_index(Event e) const {
  auto it = std::find(events_.begin(), events_.end(), e);
  if (it == events_.end()) return std::nullopt;
  return static_cast<std::size_t>(it - events_.begin());
}

std::size_t TupleAlphabet::encode(std::span<const Event> tuple) const {
  if (tuple.size() != width_) {
    throw WidthError("tuple of width " + std::to_string(tuple.size()) +
                     " for alphabet of width " + std::to_string(width_));
  }
  std::size_t sym = 0;
  std::size_t radix = 1;
  for (std::size_t c = 0; c < width_; ++c) {
    auto idx = event_index(tuple[c]);
    if (!idx) throw LabelMismatch("event " + props_.format(tuple[c]) + " is not in the alphabet");
    sym += *idx * radix;
    radix *= events_.size();
  }
  return sym;
}

std::vector<Event> TupleAlphabet::decode(std::size_t symbol) const {
  std::vector<Event> out(width_);
  for (std::size_t c = 0; c < width_; ++c) {
    out[c] = events_[symbol % events_.size()];
    symbol /= events_.size();
  }
  return out;
}

Event TupleAlphabet::coordinate(std::size_t symbol, std::size_t coord) const {
  for (std::size_t c = 0; c < coord; ++c) symbol /= events_.size();
  return events_[symbol % events_.size()];
}

TupleAlphabet TupleAlphabet::with_width(std::size_t width) const {
  return TupleAlphabet(props_, events_, width);
}

std::string TupleAlphabet::format_symbol(std::size_t symbol) const {
  std::string s = "(";
  auto tuple = decode(symbol);
  for (std::size_t c = 0; c < tuple.size(); ++c) {
    if (c) s += ',';
    s += props_.format(tuple[c]);
  }
  return s + ")";
}

}  // namespace secrl
