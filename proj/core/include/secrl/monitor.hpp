#ifndef SECRL_MONITOR_HPP
#define SECRL_MONITOR_HPP

#include <span>
#include <string>
#include <vector>

#include "secrl/alphabet.hpp"
#include "secrl/formula.hpp"
#include "secrl/trace.hpp"

namespace secrl {

/// How hold and within durations are measured on non-unit timestamps.
/// StrictIndex counts positions (d time units = d+1 events). TimestampSpan
/// measures elapsed timestamps; a hold covers the positions up to the first
/// one at least d after the window start. Both agree on unit timestamps.
enum class HoldMode { StrictIndex, TimestampSpan };

/// Formula body with trace variables resolved to tuple coordinates and
/// propositions resolved to event bits. Nodes are stored flat, children
/// before parents.
struct BoundFormula {
  enum class Kind { Hold, Not, And, Or, Implies, Concat, Within };

  struct Node {
    Kind kind;
    TimeUnits duration = 0;  // Hold
    std::size_t coord = 0;   // Hold
    Event bit = 0;           // Hold
    bool negated = false;    // Hold
    TimeUnits lower = 0;     // Within
    TimeUnits upper = 0;     // Within
    int lhs = -1;
    int rhs = -1;
    TimeUnits deadline = 0;
  };

  std::vector<Node> nodes;
  int root = -1;
  std::size_t width = 0;

  TimeUnits deadline() const { return nodes[root].deadline; }
};

/// Throws ClosureError when the body uses a variable outside `variables` and
/// UnknownProposition when it uses a proposition outside `props`.
BoundFormula bind_formula(const InnerFormula& body, const std::vector<std::string>& variables, const Propositions& props);

/// Full verdict: quantifiers range over every trace of `traces`.
bool evaluate(const FormulaAst& f, const TraceSet& traces, HoldMode mode = HoldMode::StrictIndex);

/// Verdict of the body with coordinate c bound to tuple[c]. The window is
/// [0, shortest length - 1]. Throws TraceTooShort when the tuple cannot
/// cover the deadline.
bool evaluate_bound(const BoundFormula& f, std::span<const TimedTrace* const> tuple,
                    HoldMode mode = HoldMode::StrictIndex);

/// Unit-timestamp shortcut over plain event sequences, one per coordinate.
bool evaluate_events(const BoundFormula& f, const std::vector<std::vector<Event>>& tuple);

}  // namespace secrl

#endif  // SECRL_MONITOR_HPP
