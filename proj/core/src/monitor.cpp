#include "secrl/monitor.hpp"

#include <algorithm>
#include <limits>

#include "secrl/error.hpp"

namespace secrl {

namespace {

using K = BoundFormula::Kind;

int bind_rec(const InnerFormula& f, const std::vector<std::string>& vars, const Propositions& props,
             BoundFormula& out) {
  BoundFormula::Node n;
  if (auto* h = f.as<Hold>()) {
    auto it = std::find(vars.begin(), vars.end(), h->variable);
    if (it == vars.end()) throw ClosureError("trace variable '" + h->variable + "' is not bound");
    n.kind = K::Hold;
    n.duration = h->duration;
    n.coord = static_cast<std::size_t>(it - vars.begin());
    n.bit = props.bit(h->proposition);
    n.negated = h->negated;
    n.deadline = h->duration;
  } else if (auto* x = f.as<Not>()) {
    n.kind = K::Not;
    n.lhs = bind_rec(*x->operand, vars, props, out);
    n.deadline = out.nodes[n.lhs].deadline;
  } else if (auto* b = f.as<Binary>()) {
    n.lhs = bind_rec(*b->lhs, vars, props, out);
    n.rhs = bind_rec(*b->rhs, vars, props, out);
    const TimeUnits l = out.nodes[n.lhs].deadline, r = out.nodes[n.rhs].deadline;
    switch (b->op) {
      case BinaryOp::And: n.kind = K::And; break;
      case BinaryOp::Or: n.kind = K::Or; break;
      case BinaryOp::Implies: n.kind = K::Implies; break;
      case BinaryOp::Concat: n.kind = K::Concat; break;
    }
    n.deadline = n.kind == K::Concat ? l + r + 1 : std::max(l, r);
  } else {
    auto* w = f.as<Within>();
    n.kind = K::Within;
    n.lower = w->lower;
    n.upper = w->upper;
    n.lhs = bind_rec(*w->operand, vars, props, out);
    n.deadline = w->upper;
  }
  out.nodes.push_back(n);
  return static_cast<int>(out.nodes.size() - 1);
}

// Window evaluator. T(p) is the position's time: the index itself in strict
// mode, the (shared) timestamp in span mode.
class Evaluator {
 public:
  Evaluator(const BoundFormula& f, std::span<const TimedTrace* const> tuple, HoldMode mode)
      : f_(f), tuple_(tuple), mode_(mode) {}

  bool sat(int id, std::size_t i, std::size_t j) const {
    const auto& n = f_.nodes[id];
    switch (n.kind) {
      case K::Hold: {
        if (i > j) return false;
        std::size_t end = i;
        while (T(end) - T(i) < n.duration) {
          if (++end > j) return false;
        }
        for (std::size_t p = i; p <= end; ++p) {
          const bool has = ((*tuple_[n.coord])[p].event & n.bit) != 0;
          if (has == n.negated) return false;
        }
        return true;
      }
      case K::Not: return !sat(n.lhs, i, j);
      case K::And: return sat(n.lhs, i, j) && sat(n.rhs, i, j);
      case K::Or: return sat(n.lhs, i, j) || sat(n.rhs, i, j);
      case K::Implies: return !sat(n.lhs, i, j) || sat(n.rhs, i, j);
      case K::Concat:
        // only the minimal split is tried
        for (std::size_t k = i; k <= j; ++k) {
          if (sat(n.lhs, i, k)) return sat(n.rhs, k + 1, j);
        }
        return false;
      case K::Within: {
        if (i > j) return false;
        // the window must reach time T(i)+upper
        std::size_t e = i;
        while (T(e) - T(i) < n.upper) {
          if (++e > j) return false;
        }
        // last position still inside the bound
        while (e + 1 <= j && T(e + 1) - T(i) <= n.upper) ++e;
        while (T(e) - T(i) > n.upper) --e;
        for (std::size_t k = i; k <= e; ++k) {
          if (T(k) - T(i) < n.lower) continue;
          if (sat(n.lhs, k, e)) return true;
        }
        return false;
      }
    }
    return false;
  }

 private:
  std::uint64_t T(std::size_t p) const { return mode_ == HoldMode::StrictIndex ? p : (*tuple_[0])[p].tau; }

  const BoundFormula& f_;
  std::span<const TimedTrace* const> tuple_;
  HoldMode mode_;
};

}  // namespace

BoundFormula bind_formula(const InnerFormula& body, const std::vector<std::string>& variables, const Propositions& props) {
  BoundFormula out;
  out.width = variables.size();
  out.root = bind_rec(body, variables, props, out);
  return out;
}

bool evaluate_bound(const BoundFormula& f, std::span<const TimedTrace* const> tuple, HoldMode mode) {
  if (tuple.size() != f.width) {
    throw WidthError("tuple of width " + std::to_string(tuple.size()) + " for formula of width " +
                     std::to_string(f.width));
  }
  if (tuple.empty()) throw WidthError("formula binds no trace");
  std::size_t len = std::numeric_limits<std::size_t>::max();
  for (const auto* t : tuple) len = std::min(len, t->size());
  for (const auto* t : tuple) {
    for (std::size_t p = 0; p < len; ++p) {
      if ((*t)[p].tau != (*tuple[0])[p].tau) throw Error("traces are not synchronous at position " + std::to_string(p));
    }
  }
  const TimeUnits dl = f.deadline();
  const bool covered = mode == HoldMode::StrictIndex ? len >= std::size_t{dl} + 1
                                                     : len > 0 && (*tuple[0])[len - 1].tau >= dl;
  if (!covered) {
    throw TraceTooShort("trace of length " + std::to_string(len) + " cannot cover deadline " + std::to_string(dl));
  }
  return Evaluator(f, tuple, mode).sat(f.root, 0, len - 1);
}

bool evaluate_events(const BoundFormula& f, const std::vector<std::vector<Event>>& tuple) {
  std::vector<TimedTrace> traces;
  traces.reserve(tuple.size());
  for (const auto& t : tuple) traces.push_back(TimedTrace::unit(t));
  std::vector<const TimedTrace*> ptrs;
  for (const auto& t : traces) ptrs.push_back(&t);
  return evaluate_bound(f, ptrs);
}

bool evaluate(const FormulaAst& f, const TraceSet& traces, HoldMode mode) {
  f.validate();
  const bool universal = f.quantifiers.empty() || f.quantifiers.front().kind == Quantifier::Forall;
  const std::size_t m = f.quantifiers.size();
  const std::size_t n = traces.traces.size();
  if (m == 0) throw Error("formula has no quantifier");
  if (n == 0) return universal;

  const BoundFormula bf = bind_formula(*f.body, f.variables(), traces.propositions);
  std::vector<std::size_t> idx(m, 0);
  std::vector<const TimedTrace*> tuple(m);
  while (true) {
    for (std::size_t c = 0; c < m; ++c) tuple[c] = &traces.traces[idx[c]];
    const bool v = evaluate_bound(bf, tuple, mode);
    if (universal && !v) return false;
    if (!universal && v) return true;
    std::size_t c = 0;
    while (c < m && ++idx[c] == n) idx[c++] = 0;
    if (c == m) break;
  }
  return universal;
}

}  // namespace secrl
