#ifndef SECRL_ALPHABET_HPP
#define SECRL_ALPHABET_HPP

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace secrl {

/// A set of atomic propositions encoded as a bitmask over a Propositions table.
using Event = std::uint32_t;

/// Ordered table of atomic proposition names (at most 32).
class Propositions {
 public:
  static constexpr std::size_t kMaxPropositions = 32;

  Propositions() = default;
  explicit Propositions(std::vector<std::string> names);

  /// Returns the index of `name`, appending it when absent.
  std::size_t add(std::string_view name);
  std::optional<std::size_t> index_of(std::string_view name) const;
  bool contains(std::string_view name) const { return index_of(name).has_value(); }

  /// Bit of `name`; throws UnknownProposition when absent.
  Event bit(std::string_view name) const;

  /// Event containing exactly `names`; throws UnknownProposition on unknown names.
  Event event_of(std::span<const std::string> names) const;

  std::vector<std::string> names_in(Event e) const;

  /// Renders `{a,b}` in table order.
  std::string format(Event e) const;

  std::size_t size() const noexcept { return names_.size(); }
  const std::vector<std::string>& names() const noexcept { return names_; }

  bool operator==(const Propositions&) const = default;

 private:
  std::vector<std::string> names_;
};

/// Alphabet of m-tuples of events. Every coordinate ranges over the same
/// finite list of events; a symbol is the mixed-radix index of the tuple with
/// coordinate 0 as the least significant digit.
class TupleAlphabet {
 public:
  TupleAlphabet() = default;
  TupleAlphabet(Propositions props, std::vector<Event> events, std::size_t width);

  /// All 2^|props| events, width `width`.
  static TupleAlphabet powerset(Propositions props, std::size_t width);

  const Propositions& propositions() const noexcept { return props_; }
  const std::vector<Event>& events() const noexcept { return events_; }
  std::size_t width() const noexcept { return width_; }

  /// Number of symbols, |events|^width.
  std::size_t size() const noexcept { return size_; }

  std::optional<std::size_t> event_index(Event e) const;

  /// Symbol for a tuple of events; throws LabelMismatch for unknown events
  /// and WidthError for a tuple of the wrong width.
  std::size_t encode(std::span<const Event> tuple) const;
  std::vector<Event> decode(std::size_t symbol) const;
  Event coordinate(std::size_t symbol, std::size_t coord) const;

  /// Same events and propositions, different width.
  TupleAlphabet with_width(std::size_t width) const;

  std::string format_symbol(std::size_t symbol) const;

  bool operator==(const TupleAlphabet& other) const {
    return props_ == other.props_ && events_ == other.events_ && width_ == other.width_;
  }

 private:
  Propositions props_;
  std::vector<Event> events_;
  std::size_t width_ = 0;
  std::size_t size_ = 1;
};

}  // namespace secrl

#endif  // SECRL_ALPHABET_HPP
