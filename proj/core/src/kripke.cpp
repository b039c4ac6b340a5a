#include "secrl/kripke.hpp"

#include <deque>

#include "secrl/error.hpp"

namespace secrl {

KripkeStructure::KripkeStructure(std::vector<Event> labels, std::vector<std::uint32_t> initial,
                                 std::vector<KripkeTransition> transitions)
    : labels_(std::move(labels)), initial_(std::move(initial)), transitions_(std::move(transitions)) {
  std::vector<bool> has_out(labels_.size(), false);
  for (const auto& t : transitions_) {
    if (t.from >= labels_.size() || t.to >= labels_.size()) throw Error("kripke transition out of range");
    if (t.duration == 0) throw Error("kripke durations must be positive");
    has_out[t.from] = true;
  }
  for (std::size_t s = 0; s < labels_.size(); ++s) {
    if (!has_out[s]) throw Error("kripke state " + std::to_string(s) + " has no successor");
  }
  for (auto s : initial_) {
    if (s >= labels_.size()) throw Error("kripke initial state out of range");
  }
}

std::vector<std::uint32_t> KripkeStructure::successors(std::uint32_t s) const {
  std::vector<std::uint32_t> out;
  for (const auto& t : transitions_) {
    if (t.from == s) out.push_back(t.to);
  }
  return out;
}

KripkeProduct kripke_product(const Dfa& d, const KripkeStructure& k) {
  if (d.alphabet().width() != 1) throw WidthError("kripke product needs a width 1 automaton");
  std::vector<Symbol> sym(k.size());
  for (std::size_t s = 0; s < k.size(); ++s) {
    auto idx = d.alphabet().event_index(k.labels()[s]);
    if (!idx) {
      throw LabelMismatch("kripke label " + d.alphabet().propositions().format(k.labels()[s]) +
                          " is not an alphabet event");
    }
    sym[s] = *idx;
  }
  KripkeProduct p;
  p.dfa_states = d.size();
  p.kripke_states = k.size();
  p.accepting.resize(d.size() * k.size());
  p.successors.resize(d.size() * k.size());
  for (StateId x = 0; x < d.size(); ++x) {
    for (std::uint32_t s = 0; s < k.size(); ++s) p.accepting[p.id(x, s)] = d.accepting(x);
  }
  for (const auto& t : k.transitions()) {
    for (StateId x = 0; x < d.size(); ++x) {
      p.successors[p.id(x, t.from)].emplace_back(p.id(d.next(x, sym[t.from]), t.to), t.duration);
    }
  }
  for (auto s : k.initial()) p.initial.push_back(p.id(d.initial(), s));
  return p;
}

namespace {

std::optional<std::size_t> bfs(const KripkeProduct& p, const std::vector<std::uint32_t>& from) {
  std::vector<std::size_t> dist(p.size(), SIZE_MAX);
  std::deque<std::uint32_t> q;
  for (auto s : from) {
    if (dist[s] == SIZE_MAX) {
      dist[s] = 0;
      q.push_back(s);
    }
  }
  while (!q.empty()) {
    const auto s = q.front();
    q.pop_front();
    if (p.accepting[s]) return dist[s];
    for (auto [t, d] : p.successors[s]) {
      (void)d;
      if (dist[t] == SIZE_MAX) {
        dist[t] = dist[s] + 1;
        q.push_back(t);
      }
    }
  }
  return std::nullopt;
}

}  // namespace

std::optional<std::size_t> steps_to_accept(const KripkeProduct& p) { return bfs(p, p.initial); }

std::optional<std::size_t> steps_to_accept(const KripkeProduct& p, std::uint32_t from) { return bfs(p, {from}); }

}  // namespace secrl
