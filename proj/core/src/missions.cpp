#include "secrl/missions.hpp"

#include "secrl/error.hpp"

namespace secrl {

std::string MissionTask::name() const { return "p" + std::to_string(pickup) + "d" + std::to_string(delivery); }

const char* family_name(MissionFamily f) { return f == MissionFamily::Opacity ? "opacity" : "side_channel"; }
const char* family_short(MissionFamily f) { return f == MissionFamily::Opacity ? "op" : "sc"; }

MissionFamily parse_family(std::string_view s) {
  if (s == "opacity" || s == "op") return MissionFamily::Opacity;
  if (s == "side_channel" || s == "sc") return MissionFamily::SideChannel;
  throw ConfigError("unknown mission family '" + std::string(s) + "'");
}

MissionTask parse_task(std::string_view s) {
  if (s.size() == 4 && s[0] == 'p' && s[2] == 'd' && (s[1] == '1' || s[1] == '2') && (s[3] == '1' || s[3] == '2')) {
    return {s[1] - '0', s[3] - '0'};
  }
  throw ConfigError("unknown task '" + std::string(s) + "' (expected p1d1, p1d2, p2d1 or p2d2)");
}

std::vector<MissionTask> all_tasks() { return {{1, 1}, {1, 2}, {2, 1}, {2, 2}}; }

FormulaAst mission_formula(MissionFamily family, MissionTask task, const std::array<unsigned, 5>& T) {
  if (!(T[0] < T[1] && T[1] <= T[2] && T[2] < T[3] && T[3] <= T[4])) {
    throw ConfigError("time bounds must satisfy T1 < T2 <= T3 < T4 <= T5");
  }
  const std::string pv = "p" + std::to_string(task.pickup);
  const std::string dv = "d" + std::to_string(task.delivery);
  const std::string t1 = "pi1", t2 = "pi2";
  auto both = [&](unsigned d, const std::string& prop, bool neg) {
    return conj(hold(d, prop, t1, neg), hold(d, prop, t2, neg));
  };
  const unsigned span = T[4] - T[0];
  auto A = within(both(1, "I", false), 0, T[0]);
  auto B = within(both(1, pv, false), T[1], T[2]);
  auto E = within(both(span, "O", true), T[0], T[4]);

  FormulaAst f;
  f.quantifiers = {{Quantifier::Forall, t1}, {Quantifier::Forall, t2}};
  if (family == MissionFamily::Opacity) {
    auto C = within(both(1, dv, false), T[3], T[4]);
    auto D = within(both(span, "B", false), T[0], T[4]);
    f.body = conj(conj(concat(A, concat(B, C)), D), E);
  } else {
    auto C = within(concat(hold(1, dv, t1), hold(1, dv, t2)), T[3], T[4]);
    f.body = implies(A, conj(concat(B, C), E));
  }
  return f;
}

}  // namespace secrl
