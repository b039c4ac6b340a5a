#ifndef SECRL_FORMULA_HPP
#define SECRL_FORMULA_HPP

// HyperTWTL abstract syntax.
//
// A formula is a prefix of trace quantifiers followed by a TWTL body built
// from hold, boolean, concatenation and within operators. Nodes are
// immutable and shared through FormulaPtr, so sub-formulas can be reused
// freely between formulas and threads.
//
// Concrete syntax (tightest binding first: `!`, `&`, `|`, `->`, `;`):
//
//   formula := { ("forall" | "exists") ident "." } expr
//   expr    := implies { ";" implies }            (right associative)
//   implies := or [ "->" implies ]
//   or      := and { "|" and }
//   and     := unary { "&" unary }
//   unary   := "!" unary | primary
//   primary := "H" "^" int [ "!" ] ident "@" ident
//            | "[" expr "]" "^" "[" int "," int "]"
//            | "(" expr ")"

#include <cstdint>
#include <memory>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace secrl {

using TimeUnits = std::uint32_t;

enum class Quantifier { Exists, Forall };

struct QuantifierBinding {
  Quantifier kind;
  std::string variable;

  bool operator==(const QuantifierBinding&) const = default;
};

class InnerFormula;
using FormulaPtr = std::shared_ptr<const InnerFormula>;

/// H^d a@v, or H^d !a@v when negated.
struct Hold {
  TimeUnits duration;
  std::string proposition;
  std::string variable;
  bool negated;
};

struct Not {
  FormulaPtr operand;
};

enum class BinaryOp { And, Or, Implies, Concat };

struct Binary {
  BinaryOp op;
  FormulaPtr lhs;
  FormulaPtr rhs;
};

/// [f]^[lower, upper]
struct Within {
  FormulaPtr operand;
  TimeUnits lower;
  TimeUnits upper;
};

class InnerFormula {
 public:
  using Node = std::variant<Hold, Not, Binary, Within>;

  explicit InnerFormula(Node node) : node_(std::move(node)) {}

  const Node& node() const noexcept { return node_; }

  template <typename T>
  const T* as() const noexcept {
    return std::get_if<T>(&node_);
  }

 private:
  Node node_;
};

// factories; within() throws Error when upper < lower
FormulaPtr hold(TimeUnits d, std::string proposition, std::string variable, bool negated = false);
FormulaPtr negate(FormulaPtr f);
FormulaPtr conj(FormulaPtr lhs, FormulaPtr rhs);
FormulaPtr disj(FormulaPtr lhs, FormulaPtr rhs);
FormulaPtr implies(FormulaPtr lhs, FormulaPtr rhs);
FormulaPtr concat(FormulaPtr lhs, FormulaPtr rhs);
FormulaPtr within(FormulaPtr f, TimeUnits lower, TimeUnits upper);

/// Structural equality of two bodies.
bool structurally_equal(const InnerFormula& a, const InnerFormula& b);

struct FormulaAst {
  std::vector<QuantifierBinding> quantifiers;
  FormulaPtr body;

  /// Throws ClosureError or AlternationError when the formula is not a closed,
  /// alternation-free formula.
  void validate() const;

  /// Variables in quantifier order; coordinate c of a tuple binds variables()[c].
  std::vector<std::string> variables() const;

  friend bool operator==(const FormulaAst& a, const FormulaAst& b) {
    return a.quantifiers == b.quantifiers && structurally_equal(*a.body, *b.body);
  }
};

/// Parses the concrete syntax above and validates closure and alternation.
FormulaAst parse(std::string_view text);

/// Parses a body without a quantifier prefix (no closure check).
FormulaPtr parse_body(std::string_view text);

/// Fully parenthesised rendering that `parse` accepts.
std::string to_string(const FormulaAst& f);
std::string to_string(const InnerFormula& f);

/// Execution deadline: maximum time needed to decide the formula.
TimeUnits deadline(const InnerFormula& f);
inline TimeUnits deadline(const FormulaAst& f) { return deadline(*f.body); }

/// Distinct trace variables referenced by the body, in first-use order.
std::vector<std::string> body_variables(const InnerFormula& f);

/// Distinct propositions referenced by the body, in first-use order.
std::vector<std::string> body_propositions(const InnerFormula& f);

/// Nesting depth: holds have depth 1.
std::size_t depth(const InnerFormula& f);

}  // namespace secrl

#endif  // SECRL_FORMULA_HPP
