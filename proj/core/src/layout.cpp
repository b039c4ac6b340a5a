#include "secrl/layout.hpp"

#include <algorithm>
#include <fstream>
#include <map>
#include <random>
#include <sstream>

#include <json.hpp>

#include "secrl/error.hpp"

namespace secrl {

namespace {

using nlohmann::json;

std::string cell_str(Cell c) { return "(" + std::to_string(c.x) + "," + std::to_string(c.y) + ")"; }

json cells_to_json(const std::vector<Cell>& cells) {
  json a = json::array();
  for (auto c : cells) a.push_back({c.x, c.y});
  return a;
}

std::vector<Cell> cells_from_json(const json& j, const char* key) {
  std::vector<Cell> out;
  if (!j.contains(key)) return out;
  for (const auto& c : j.at(key)) {
    if (!c.is_array() || c.size() != 2) throw LayoutError(std::string("cell in '") + key + "' must be [x, y]");
    out.push_back({c[0].get<int>(), c[1].get<int>()});
  }
  return out;
}

}  // namespace

void MissionLayout::validate() const {
  if (width < 1 || height < 1) throw LayoutError("grid must be at least 1x1");
  if (initial.size() != 1) throw LayoutError("layout needs exactly one initial cell");
  if (pickup1.empty() || pickup2.empty() || delivery1.empty() || delivery2.empty()) {
    throw LayoutError("layout needs pick-up and delivery cells");
  }
  // every special set except the observed region must be disjoint
  std::map<Cell, std::string> owner;
  auto check = [&](const std::vector<Cell>& cells, const std::string& name, bool exclusive) {
    for (auto c : cells) {
      if (c.x < 0 || c.y < 0 || c.x >= width || c.y >= height) {
        throw LayoutError(name + " cell " + cell_str(c) + " is outside the grid");
      }
      if (!exclusive) continue;
      auto [it, fresh] = owner.emplace(c, name);
      if (!fresh) throw LayoutError("cell " + cell_str(c) + " is both " + it->second + " and " + name);
    }
  };
  check(initial, "initial", true);
  check(pickup1, "pickup1", true);
  check(pickup2, "pickup2", true);
  check(delivery1, "delivery1", true);
  check(delivery2, "delivery2", true);
  check(obstacles, "obstacle", true);
  check(rewards, "reward", true);
  check(observed, "observed", false);
  const auto& t = bounds;
  if (!(t[0] < t[1] && t[1] <= t[2] && t[2] < t[3] && t[3] <= t[4])) {
    throw LayoutError("time bounds must satisfy T1 < T2 <= T3 < T4 <= T5");
  }
  if (!(motion_eps >= 0.0 && motion_eps < 1.0)) throw LayoutError("motion_eps must lie in [0, 1)");
  if (!(gamma > 0.0 && gamma <= 1.0)) throw LayoutError("gamma must lie in (0, 1]");
}

MissionLayout default_layout() {
  MissionLayout l;
  l.width = 8;
  l.height = 8;
  l.initial = {{3, 5}};
  l.pickup1 = {{0, 0}};
  l.delivery1 = {{7, 0}};
  l.pickup2 = {{7, 7}};
  l.delivery2 = {{0, 7}};
  l.obstacles = {{2, 3}, {3, 3}, {4, 3}, {5, 3}};
  l.rewards = {{1, 1}, {6, 1}, {1, 6}, {6, 6}};
  const std::vector<Cell> hidden = {{6, 2}, {6, 5}};
  for (int y = 0; y < l.height; ++y) {
    for (int x = 0; x < l.width; ++x) {
      const Cell c{x, y};
      if (std::find(l.obstacles.begin(), l.obstacles.end(), c) != l.obstacles.end()) continue;
      if (std::find(hidden.begin(), hidden.end(), c) != hidden.end()) continue;
      l.observed.push_back(c);
    }
  }
  return l;
}

MissionLayout random_layout(int n, std::uint64_t seed, double obstacle_density) {
  if (n < 3) throw LayoutError("random layouts need n >= 3");
  std::mt19937_64 rng(seed);
  std::vector<Cell> cells;
  for (int y = 0; y < n; ++y) {
    for (int x = 0; x < n; ++x) cells.push_back({x, y});
  }
  std::shuffle(cells.begin(), cells.end(), rng);
  MissionLayout l;
  l.width = n;
  l.height = n;
  std::size_t next = 0;
  l.initial = {cells[next++]};
  l.pickup1 = {cells[next++]};
  l.pickup2 = {cells[next++]};
  l.delivery1 = {cells[next++]};
  l.delivery2 = {cells[next++]};
  const auto n_obst = static_cast<std::size_t>(obstacle_density * n * n + 0.5);
  for (std::size_t k = 0; k < n_obst && next < cells.size(); ++k) l.obstacles.push_back(cells[next++]);
  const std::size_t n_rew = std::max<std::size_t>(1, static_cast<std::size_t>(n * n) / 16);
  for (std::size_t k = 0; k < n_rew && next < cells.size(); ++k) l.rewards.push_back(cells[next++]);
  for (int y = 0; y < n; ++y) {
    for (int x = 0; x < n; ++x) {
      const Cell c{x, y};
      if (std::find(l.obstacles.begin(), l.obstacles.end(), c) == l.obstacles.end()) l.observed.push_back(c);
    }
  }
  const auto base = default_layout().bounds;
  for (std::size_t k = 0; k < 5; ++k) l.bounds[k] = static_cast<unsigned>((base[k] * static_cast<unsigned>(n) + 4) / 8);
  // rounding can merge the one-step gaps on small maps
  auto& t = l.bounds;
  t[1] = std::max(t[1], t[0] + 1);
  t[2] = std::max(t[2], t[1]);
  t[3] = std::max(t[3], t[2] + 1);
  t[4] = std::max(t[4], t[3]);
  l.validate();
  return l;
}

MissionLayout layout_from_json(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::exception& e) {
    throw LayoutError(std::string("layout is not valid JSON: ") + e.what());
  }
  MissionLayout l;
  try {
    l.width = j.at("width").get<int>();
    l.height = j.at("height").get<int>();
    l.initial = cells_from_json(j, "initial");
    l.pickup1 = cells_from_json(j, "pickup1");
    l.pickup2 = cells_from_json(j, "pickup2");
    l.delivery1 = cells_from_json(j, "delivery1");
    l.delivery2 = cells_from_json(j, "delivery2");
    l.obstacles = cells_from_json(j, "obstacles");
    l.observed = cells_from_json(j, "observed");
    l.rewards = cells_from_json(j, "rewards");
    if (j.contains("time_bounds")) {
      const auto& t = j.at("time_bounds");
      if (!t.is_array() || t.size() != 5) throw LayoutError("time_bounds must list T1..T5");
      for (std::size_t k = 0; k < 5; ++k) l.bounds[k] = t[k].get<unsigned>();
    }
    l.motion_eps = j.value("motion_eps", l.motion_eps);
    l.gamma = j.value("gamma", l.gamma);
    if (j.contains("reward")) {
      const auto& r = j.at("reward");
      l.reward.step = r.value("step", l.reward.step);
      l.reward.reward_cell = r.value("reward_cell", l.reward.reward_cell);
      l.reward.obstacle = r.value("obstacle", l.reward.obstacle);
      l.reward.accept = r.value("accept", l.reward.accept);
    }
  } catch (const json::exception& e) {
    throw LayoutError(std::string("bad layout field: ") + e.what());
  }
  l.validate();
  return l;
}

MissionLayout load_layout(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw LayoutError("cannot open layout file " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return layout_from_json(ss.str());
}

std::string layout_to_json(const MissionLayout& l) {
  json j;
  j["width"] = l.width;
  j["height"] = l.height;
  j["initial"] = cells_to_json(l.initial);
  j["pickup1"] = cells_to_json(l.pickup1);
  j["pickup2"] = cells_to_json(l.pickup2);
  j["delivery1"] = cells_to_json(l.delivery1);
  j["delivery2"] = cells_to_json(l.delivery2);
  j["obstacles"] = cells_to_json(l.obstacles);
  j["observed"] = cells_to_json(l.observed);
  j["rewards"] = cells_to_json(l.rewards);
  j["time_bounds"] = l.bounds;
  j["motion_eps"] = l.motion_eps;
  j["gamma"] = l.gamma;
  j["reward"] = {{"step", l.reward.step},
                 {"reward_cell", l.reward.reward_cell},
                 {"obstacle", l.reward.obstacle},
                 {"accept", l.reward.accept}};
  return j.dump(2) + "\n";
}

}  // namespace secrl
