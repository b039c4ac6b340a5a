#include "secrl/formula.hpp"

#include <algorithm>
#include <set>

#include "secrl/error.hpp"

namespace secrl {

namespace {

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

FormulaPtr make(InnerFormula::Node n) { return std::make_shared<const InnerFormula>(std::move(n)); }

FormulaPtr binary(BinaryOp op, FormulaPtr lhs, FormulaPtr rhs) {
  if (!lhs || !rhs) throw Error("null operand");
  return make(Binary{op, std::move(lhs), std::move(rhs)});
}

const char* op_token(BinaryOp op) {
  switch (op) {
    case BinaryOp::And: return " & ";
    case BinaryOp::Or: return " | ";
    case BinaryOp::Implies: return " -> ";
    case BinaryOp::Concat: return " ; ";
  }
  return "?";
}

void collect(const InnerFormula& f, std::vector<std::string>& vars, std::vector<std::string>& props) {
  std::visit(overloaded{
                 [&](const Hold& h) {
                   if (std::find(vars.begin(), vars.end(), h.variable) == vars.end()) vars.push_back(h.variable);
                   if (std::find(props.begin(), props.end(), h.proposition) == props.end())
                     props.push_back(h.proposition);
                 },
                 [&](const Not& n) { collect(*n.operand, vars, props); },
                 [&](const Binary& b) {
                   collect(*b.lhs, vars, props);
                   collect(*b.rhs, vars, props);
                 },
                 [&](const Within& w) { collect(*w.operand, vars, props); },
             },
             f.node());
}

}  // namespace

FormulaPtr hold(TimeUnits d, std::string proposition, std::string variable, bool negated) {
  return make(Hold{d, std::move(proposition), std::move(variable), negated});
}

FormulaPtr negate(FormulaPtr f) {
  if (!f) throw Error("null operand");
  return make(Not{std::move(f)});
}

FormulaPtr conj(FormulaPtr lhs, FormulaPtr rhs) { return binary(BinaryOp::And, std::move(lhs), std::move(rhs)); }
FormulaPtr disj(FormulaPtr lhs, FormulaPtr rhs) { return binary(BinaryOp::Or, std::move(lhs), std::move(rhs)); }
FormulaPtr implies(FormulaPtr lhs, FormulaPtr rhs) {
  return binary(BinaryOp::Implies, std::move(lhs), std::move(rhs));
}
FormulaPtr concat(FormulaPtr lhs, FormulaPtr rhs) {
  return binary(BinaryOp::Concat, std::move(lhs), std::move(rhs));
}

FormulaPtr within(FormulaPtr f, TimeUnits lower, TimeUnits upper) {
  if (!f) throw Error("null operand");
  if (upper < lower) throw Error("within bound [" + std::to_string(lower) + "," + std::to_string(upper) + "] has upper < lower");
  return make(Within{std::move(f), lower, upper});
}

bool structurally_equal(const InnerFormula& a, const InnerFormula& b) {
  if (a.node().index() != b.node().index()) return false;
  if (auto* h = a.as<Hold>()) {
    auto* o = b.as<Hold>();
    return h->duration == o->duration && h->proposition == o->proposition && h->variable == o->variable &&
           h->negated == o->negated;
  }
  if (auto* n = a.as<Not>()) return structurally_equal(*n->operand, *b.as<Not>()->operand);
  if (auto* x = a.as<Binary>()) {
    auto* o = b.as<Binary>();
    return x->op == o->op && structurally_equal(*x->lhs, *o->lhs) && structurally_equal(*x->rhs, *o->rhs);
  }
  auto* w = a.as<Within>();
  auto* o = b.as<Within>();
  return w->lower == o->lower && w->upper == o->upper && structurally_equal(*w->operand, *o->operand);
}

void FormulaAst::validate() const {
  if (!body) throw Error("formula without body");
  std::set<std::string> bound;
  for (const auto& q : quantifiers) {
    if (!bound.insert(q.variable).second) {
      throw ClosureError("trace variable '" + q.variable + "' is quantified twice");
    }
    if (q.kind != quantifiers.front().kind) {
      throw AlternationError("quantifier prefix mixes forall and exists");
    }
  }
  for (const auto& v : body_variables(*body)) {
    if (!bound.count(v)) throw ClosureError("trace variable '" + v + "' is free");
  }
}

std::vector<std::string> FormulaAst::variables() const {
  std::vector<std::string> out;
  out.reserve(quantifiers.size());
  for (const auto& q : quantifiers) out.push_back(q.variable);
  return out;
}

std::string to_string(const InnerFormula& f) {
  return std::visit(overloaded{
                        [](const Hold& h) {
                          return "H^" + std::to_string(h.duration) + " " + (h.negated ? "!" : "") + h.proposition +
                                 "@" + h.variable;
                        },
                        [](const Not& n) { return "!(" + to_string(*n.operand) + ")"; },
                        [](const Binary& b) {
                          return "(" + to_string(*b.lhs) + op_token(b.op) + to_string(*b.rhs) + ")";
                        },
                        [](const Within& w) {
                          return "[" + to_string(*w.operand) + "]^[" + std::to_string(w.lower) + "," +
                                 std::to_string(w.upper) + "]";
                        },
                    },
                    f.node());
}

std::string to_string(const FormulaAst& f) {
  std::string s;
  for (const auto& q : f.quantifiers) {
    s += (q.kind == Quantifier::Forall ? "forall " : "exists ") + q.variable + " . ";
  }
  return s + to_string(*f.body);
}

TimeUnits deadline(const InnerFormula& f) {
  return std::visit(overloaded{
                        [](const Hold& h) { return h.duration; },
                        [](const Not& n) { return deadline(*n.operand); },
                        [](const Binary& b) {
                          const TimeUnits l = deadline(*b.lhs);
                          const TimeUnits r = deadline(*b.rhs);
                          return b.op == BinaryOp::Concat ? l + r + 1 : std::max(l, r);
                        },
                        [](const Within& w) { return w.upper; },
                    },
                    f.node());
}

std::vector<std::string> body_variables(const InnerFormula& f) {
  std::vector<std::string> vars, props;
  collect(f, vars, props);
  return vars;
}

std::vector<std::string> body_propositions(const InnerFormula& f) {
  std::vector<std::string> vars, props;
  collect(f, vars, props);
  return props;
}

std::size_t depth(const InnerFormula& f) {
  return std::visit(overloaded{
                        [](const Hold&) -> std::size_t { return 1; },
                        [](const Not& n) { return 1 + depth(*n.operand); },
                        [](const Binary& b) { return 1 + std::max(depth(*b.lhs), depth(*b.rhs)); },
                        [](const Within& w) { return 1 + depth(*w.operand); },
                    },
                    f.node());
}

}  // namespace secrl
