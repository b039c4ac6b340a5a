#ifndef SECRL_MISSIONS_HPP
#define SECRL_MISSIONS_HPP

#include <array>
#include <string>
#include <string_view>
#include <vector>

#include "secrl/formula.hpp"

namespace secrl {

enum class MissionFamily { Opacity, SideChannel };

struct MissionTask {
  int pickup = 1;    // 1 or 2
  int delivery = 1;  // 1 or 2

  std::string name() const;  // "p1d2"
  bool operator==(const MissionTask&) const = default;
};

const char* family_name(MissionFamily f);         // "opacity" / "side_channel"
const char* family_short(MissionFamily f);        // "op" / "sc"
MissionFamily parse_family(std::string_view s);   // accepts either name; ConfigError otherwise
MissionTask parse_task(std::string_view s);       // "p1d1" ... ConfigError otherwise

std::vector<MissionTask> all_tasks();

/// Two-trace universal mission over pi1, pi2.
///
/// opacity:      (A ; B ; C) & D & E
/// side channel: A -> ((B ; C') & E)
///
///   A  = [H^1 I@pi1 & H^1 I@pi2]^[0,T1]
///   B  = [H^1 pi@pi1 & H^1 pi@pi2]^[T2,T3]
///   C  = [H^1 dj@pi1 & H^1 dj@pi2]^[T4,T5]
///   C' = [H^1 dj@pi1 ; H^1 dj@pi2]^[T4,T5]
///   D  = [H^(T5-T1) B@pi1 & H^(T5-T1) B@pi2]^[T1,T5]
///   E  = [H^(T5-T1) !O@pi1 & H^(T5-T1) !O@pi2]^[T1,T5]
FormulaAst mission_formula(MissionFamily family, MissionTask task, const std::array<unsigned, 5>& bounds);

}  // namespace secrl

#endif  // SECRL_MISSIONS_HPP
