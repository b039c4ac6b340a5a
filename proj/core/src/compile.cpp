#include "secrl/compile.hpp"

#include <absl/container/flat_hash_map.h>

#include <algorithm>
#include <limits>

#include "secrl/error.hpp"
#include "secrl/monitor.hpp"

namespace secrl {

namespace {

constexpr std::uint32_t kNoLo = std::numeric_limits<std::uint32_t>::max();

enum class PK : std::uint32_t { True, False, Atom, Not, And, Or };

// Boolean DAG over position atoms. Atom(c, bit, neg, lo, hi): the bit is
// (or with neg, is not) in coordinate c at every position lo..hi.
struct PNode {
  PK kind = PK::False;
  std::uint32_t coord = 0;
  Event bit = 0;
  bool neg = false;
  std::uint32_t lo = 0, hi = 0;
  std::vector<int> kids;
  std::uint32_t min_lo = kNoLo;
};

PNode node(PK kind) {
  PNode n;
  n.kind = kind;
  return n;
}

class Dag {
 public:
  static constexpr int kTrue = 0;
  static constexpr int kFalse = 1;

  Dag() {
    nodes_.push_back(node(PK::True));
    nodes_.push_back(node(PK::False));
  }

  const PNode& operator[](int id) const { return nodes_[id]; }
  std::size_t size() const { return nodes_.size(); }

  int atom(std::uint32_t c, Event bit, bool neg, std::uint32_t lo, std::uint32_t hi) {
    PNode n = node(PK::Atom);
    n.coord = c;
    n.bit = bit;
    n.neg = neg;
    n.lo = lo;
    n.hi = hi;
    n.min_lo = lo;
    return intern(std::move(n));
  }

  int mk_not(int x) {
    if (x == kTrue) return kFalse;
    if (x == kFalse) return kTrue;
    if (nodes_[x].kind == PK::Not) return nodes_[x].kids[0];
    PNode n = node(PK::Not);
    n.kids = {x};
    n.min_lo = nodes_[x].min_lo;
    return intern(std::move(n));
  }

  int mk_and(std::vector<int> xs) { return mk_nary(PK::And, std::move(xs)); }
  int mk_or(std::vector<int> xs) { return mk_nary(PK::Or, std::move(xs)); }

 private:
  int mk_nary(PK kind, std::vector<int> xs) {
    const int unit = kind == PK::And ? kTrue : kFalse;
    const int zero = kind == PK::And ? kFalse : kTrue;
    std::vector<int> flat;
    flat.reserve(xs.size());
    for (int x : xs) {
      if (x == unit) continue;
      if (x == zero) return zero;
      if (nodes_[x].kind == kind) {
        flat.insert(flat.end(), nodes_[x].kids.begin(), nodes_[x].kids.end());
      } else {
        flat.push_back(x);
      }
    }
    std::sort(flat.begin(), flat.end());
    flat.erase(std::unique(flat.begin(), flat.end()), flat.end());
    for (int x : flat) {
      if (nodes_[x].kind == PK::Not && std::binary_search(flat.begin(), flat.end(), nodes_[x].kids[0])) return zero;
    }
    if (flat.empty()) return unit;
    if (flat.size() == 1) return flat[0];
    PNode n = node(kind);
    for (int x : flat) n.min_lo = std::min(n.min_lo, nodes_[x].min_lo);
    n.kids = std::move(flat);
    return intern(std::move(n));
  }

  int intern(PNode n) {
    key_.clear();
    key_.push_back(static_cast<std::uint32_t>(n.kind));
    if (n.kind == PK::Atom) {
      key_.insert(key_.end(), {n.coord, n.bit, n.neg ? 1u : 0u, n.lo, n.hi});
    } else {
      for (int k : n.kids) key_.push_back(static_cast<std::uint32_t>(k));
    }
    auto it = index_.find(key_);
    if (it != index_.end()) return it->second;
    const int id = static_cast<int>(nodes_.size());
    nodes_.push_back(std::move(n));
    index_.emplace(key_, id);
    return id;
  }

  std::vector<PNode> nodes_;
  absl::flat_hash_map<std::vector<std::uint32_t>, int> index_;
  std::vector<std::uint32_t> key_;
};

using K = BoundFormula::Kind;

// Expands sat(node, i, j) of the window semantics into the DAG.
class Expander {
 public:
  Expander(const BoundFormula& f, Dag& dag) : f_(f), dag_(dag) {}

  int sat(int id, std::uint32_t i, std::uint32_t j) {
    const std::uint64_t key = (std::uint64_t(id) << 40) | (std::uint64_t(i) << 20) | j;
    if (auto it = memo_.find(key); it != memo_.end()) return it->second;
    const int r = expand(id, i, j);
    memo_.emplace(key, r);
    return r;
  }

 private:
  int expand(int id, std::uint32_t i, std::uint32_t j) {
    const auto& n = f_.nodes[id];
    switch (n.kind) {
      case K::Hold:
        if (j < i || j - i < n.duration) return Dag::kFalse;
        return dag_.atom(static_cast<std::uint32_t>(n.coord), n.bit, n.negated, i, i + n.duration);
      case K::Not: return dag_.mk_not(sat(n.lhs, i, j));
      case K::And: return dag_.mk_and({sat(n.lhs, i, j), sat(n.rhs, i, j)});
      case K::Or: return dag_.mk_or({sat(n.lhs, i, j), sat(n.rhs, i, j)});
      case K::Implies: return dag_.mk_or({dag_.mk_not(sat(n.lhs, i, j)), sat(n.rhs, i, j)});
      case K::Concat: {
        // k is the first split where the left part holds. Beyond i + deadline
        // the left verdict no longer changes, so later k cannot be minimal.
        std::vector<int> alts;
        int none_before = Dag::kTrue;
        const std::uint32_t kmax = std::min<std::uint64_t>(j, std::uint64_t(i) + f_.nodes[n.lhs].deadline);
        for (std::uint32_t k = i; k <= kmax && k <= j; ++k) {
          const int s1 = sat(n.lhs, i, k);
          alts.push_back(dag_.mk_and({none_before, s1, sat(n.rhs, k + 1, j)}));
          none_before = dag_.mk_and({none_before, dag_.mk_not(s1)});
          if (none_before == Dag::kFalse) break;
        }
        return dag_.mk_or(std::move(alts));
      }
      case K::Within: {
        if (j < i || j - i < n.upper) return Dag::kFalse;
        const std::uint32_t e = i + n.upper;
        std::vector<int> alts;
        for (std::uint32_t k = i + n.lower; k <= e; ++k) alts.push_back(sat(n.lhs, k, e));
        return dag_.mk_or(std::move(alts));
      }
    }
    return Dag::kFalse;
  }

  const BoundFormula& f_;
  Dag& dag_;
  absl::flat_hash_map<std::uint64_t, int> memo_;
};

// One step of progression at time t with the given event per coordinate.
class Progressor {
 public:
  explicit Progressor(Dag& dag) : dag_(dag) {}

  int step(int root, std::uint32_t t, const std::vector<Event>& ev) {
    memo_.clear();
    t_ = t;
    ev_ = &ev;
    return go(root);
  }

 private:
  int go(int id) {
    const PNode& n0 = dag_[id];
    if (n0.min_lo == kNoLo || n0.min_lo > t_) return id;
    if (auto it = memo_.find(id); it != memo_.end()) return it->second;
    int r;
    switch (n0.kind) {
      case PK::Atom: {
        const PNode n = n0;
        const bool has = ((*ev_)[n.coord] & n.bit) != 0;
        if (has == n.neg) {
          r = Dag::kFalse;
        } else if (n.hi == t_) {
          r = Dag::kTrue;
        } else {
          r = dag_.atom(n.coord, n.bit, n.neg, t_ + 1, n.hi);
        }
        break;
      }
      case PK::Not: r = dag_.mk_not(go(n0.kids[0])); break;
      default: {
        const PK kind = n0.kind;
        const std::vector<int> kids = n0.kids;  // copy: interning may grow the node table
        std::vector<int> out;
        out.reserve(kids.size());
        const int zero = kind == PK::And ? Dag::kFalse : Dag::kTrue;
        r = -1;
        for (int k : kids) {
          const int p = go(k);
          if (p == zero) {
            r = zero;
            break;
          }
          out.push_back(p);
        }
        if (r < 0) r = kind == PK::And ? dag_.mk_and(std::move(out)) : dag_.mk_or(std::move(out));
      }
    }
    memo_.emplace(id, r);
    return r;
  }

  Dag& dag_;
  std::uint32_t t_ = 0;
  const std::vector<Event>* ev_ = nullptr;
  absl::flat_hash_map<int, int> memo_;
};

}  // namespace

Dfa twtl_to_dfa(const InnerFormula& body, const std::vector<std::string>& variables, const TupleAlphabet& alphabet,
                std::optional<TimeUnits> horizon) {
  if (alphabet.width() != variables.size()) {
    throw WidthError("alphabet width " + std::to_string(alphabet.width()) + " for " +
                     std::to_string(variables.size()) + " trace variables");
  }
  BoundFormula bf;
  try {
    bf = bind_formula(body, variables, alphabet.propositions());
  } catch (const UnknownProposition& e) {
    throw AlphabetMismatch(e.what());
  }
  const TimeUnits h = horizon.value_or(bf.deadline());
  const std::size_t m = variables.size();

  // Symbols that agree on the formula's propositions behave alike.
  std::vector<Event> mask(m, 0);
  for (const auto& n : bf.nodes) {
    if (n.kind == K::Hold) mask[n.coord] |= n.bit;
  }
  const auto& events = alphabet.events();
  std::vector<std::vector<Event>> reps(m);
  std::vector<std::vector<std::uint32_t>> cls_of(m, std::vector<std::uint32_t>(events.size()));
  for (std::size_t c = 0; c < m; ++c) {
    for (std::size_t e = 0; e < events.size(); ++e) {
      const Event p = events[e] & mask[c];
      auto it = std::find(reps[c].begin(), reps[c].end(), p);
      cls_of[c][e] = static_cast<std::uint32_t>(it - reps[c].begin());
      if (it == reps[c].end()) reps[c].push_back(p);
    }
  }
  std::size_t nclass = 1;
  for (const auto& r : reps) nclass *= r.size();
  std::vector<std::uint32_t> sym_class(alphabet.size());
  for (Symbol s = 0; s < alphabet.size(); ++s) {
    Symbol rest = s;
    std::size_t cls = 0, radix = 1;
    for (std::size_t c = 0; c < m; ++c) {
      cls += cls_of[c][rest % events.size()] * radix;
      radix *= reps[c].size();
      rest /= events.size();
    }
    sym_class[s] = static_cast<std::uint32_t>(cls);
  }
  std::vector<std::vector<Event>> class_events(nclass, std::vector<Event>(m));
  for (std::size_t cls = 0; cls < nclass; ++cls) {
    std::size_t rest = cls;
    for (std::size_t c = 0; c < m; ++c) {
      class_events[cls][c] = reps[c][rest % reps[c].size()];
      rest /= reps[c].size();
    }
  }

  Dag dag;
  const int root = Expander(bf, dag).sat(bf.root, 0, h);

  // states are (time, residual); the constants are time-free sinks
  absl::flat_hash_map<std::uint64_t, StateId> ids;
  std::vector<std::pair<std::uint32_t, int>> states;
  auto intern = [&](std::uint32_t t, int r) -> StateId {
    if (r == Dag::kTrue || r == Dag::kFalse) t = 0;
    const std::uint64_t key = (std::uint64_t(t) << 32) | std::uint32_t(r);
    auto [it, fresh] = ids.emplace(key, static_cast<StateId>(states.size()));
    if (fresh) states.emplace_back(t, r);
    return it->second;
  };
  intern(0, root);

  Progressor prog(dag);
  std::vector<StateId> class_dst(nclass);
  std::vector<StateId> delta;
  std::vector<bool> acc;
  for (std::size_t cur = 0; cur < states.size(); ++cur) {
    const auto [t, r] = states[cur];
    if (r == Dag::kTrue || r == Dag::kFalse) {
      std::fill(class_dst.begin(), class_dst.end(), static_cast<StateId>(cur));
    } else {
      if (t > h) throw Error("residual obligation survives the horizon");
      for (std::size_t cls = 0; cls < nclass; ++cls) class_dst[cls] = intern(t + 1, prog.step(r, t, class_events[cls]));
    }
    acc.push_back(r == Dag::kTrue);
    for (Symbol s = 0; s < alphabet.size(); ++s) delta.push_back(class_dst[sym_class[s]]);
  }
  return Dfa(alphabet, states.size(), 0, std::move(delta), std::move(acc));
}

Dfa quantifier_eliminate(const FormulaAst& f, const TupleAlphabet& alphabet, EliminationOptions options) {
  f.validate();
  const auto vars = f.variables();
  if (vars.empty()) throw ClosureError("formula has no quantifier");
  Dfa d = twtl_to_dfa(*f.body, vars, alphabet.with_width(vars.size()));
  if (options.keep_width) return d;

  const bool universal = f.quantifiers.front().kind == Quantifier::Forall;
  for (std::size_t w = vars.size(); w > 1; --w) {
    // innermost variable is the last coordinate
    if (universal) {
      d = complement(determinize(project_existential(complement(d), w - 1)));
    } else {
      d = determinize(project_existential(d, w - 1));
    }
  }
  return d;
}

}  // namespace secrl
