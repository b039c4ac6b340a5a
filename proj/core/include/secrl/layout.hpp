#ifndef SECRL_LAYOUT_HPP
#define SECRL_LAYOUT_HPP

#include <array>
#include <cstdint>
#include <string>
#include <vector>

namespace secrl {

/// Grid cell; row 0 is the top row.
struct Cell {
  int x = 0;
  int y = 0;

  bool operator==(const Cell&) const = default;
  auto operator<=>(const Cell&) const = default;
};

struct RewardConstants {
  double step = -1.0;
  double reward_cell = 10.0;
  double obstacle = -50.0;
  double accept = 100.0;

  bool operator==(const RewardConstants&) const = default;
};

struct MissionLayout {
  int width = 8;
  int height = 8;
  std::vector<Cell> initial;
  std::vector<Cell> pickup1;
  std::vector<Cell> pickup2;
  std::vector<Cell> delivery1;
  std::vector<Cell> delivery2;
  std::vector<Cell> obstacles;
  std::vector<Cell> observed;
  std::vector<Cell> rewards;
  std::array<unsigned, 5> bounds{5, 6, 20, 21, 35};  // T1..T5
  double motion_eps = 0.05;
  double gamma = 0.95;
  RewardConstants reward;

  /// Throws LayoutError on out-of-range or overlapping cells, a missing or
  /// repeated initial cell, or unordered time bounds.
  void validate() const;

  bool operator==(const MissionLayout&) const = default;
};

/// The shipped 8x8 pick-up and delivery map. It is a schematic with the
/// same ingredients as the published figure, not a copy of it.
MissionLayout default_layout();

/// n x n map with uniformly placed initial, pick-up and delivery cells,
/// obstacle_density of the remaining cells blocked, and time bounds of the
/// default map scaled by n / 8.
MissionLayout random_layout(int n, std::uint64_t seed, double obstacle_density = 0.1);

MissionLayout load_layout(const std::string& path);
MissionLayout layout_from_json(const std::string& text);
std::string layout_to_json(const MissionLayout& layout);

}  // namespace secrl

#endif  // SECRL_LAYOUT_HPP
