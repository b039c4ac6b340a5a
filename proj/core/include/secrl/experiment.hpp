#ifndef SECRL_EXPERIMENT_HPP
#define SECRL_EXPERIMENT_HPP

#include <cstdint>
#include <filesystem>
#include <memory>
#include <string>
#include <vector>

#include "secrl/automaton.hpp"
#include "secrl/layout.hpp"
#include "secrl/learner.hpp"
#include "secrl/missions.hpp"
#include "secrl/timed.hpp"

namespace secrl {

/// Everything built for one mission before training.
struct MissionPlan {
  MissionFamily family = MissionFamily::Opacity;
  MissionTask task;
  FormulaAst formula;
  std::shared_ptr<const Dfa> dfa;
  std::shared_ptr<const TimedMdp> timed;
  std::unique_ptr<DistanceMap> distances;
  PrunedTimedMdp pruned;
  double plan_ms = 0.0;

  std::string name() const;  // "op_p1d1"
};

/// formula -> automaton -> self-composition (m = 2) -> product -> timed ->
/// prune. Throws Infeasible with the mission name in the message.
MissionPlan plan_mission(const MissionLayout& layout, MissionFamily family, MissionTask task, double p_th,
                         double motion_eps);

/// Ratio of trailing window averages of episode reward at `checkpoint`
/// (1-based, inclusive). Throws InsufficientData when either series is
/// shorter than the checkpoint, the window is 0 or larger than the
/// checkpoint, or the baseline average is not positive.
double sample_efficiency(const std::vector<EpisodeRecord>& softmax, const std::vector<EpisodeRecord>& baseline,
                         std::uint64_t checkpoint, std::size_t window);

struct ExperimentConfig {
  MissionLayout layout = default_layout();
  std::string layout_path;  // empty means the built-in layout
  std::vector<MissionFamily> families{MissionFamily::Opacity, MissionFamily::SideChannel};
  std::vector<MissionTask> tasks = all_tasks();
  std::vector<Algorithm> algorithms{Algorithm::SoftmaxEps, Algorithm::QLearning, Algorithm::DynaQ};
  LearnerConfig learner;
  std::vector<std::uint64_t> seeds{1, 2, 3, 4, 5};
  std::filesystem::path out_dir = "results";
  std::uint64_t checkpoint = 30000;
  std::size_t window = 1000;
  unsigned workers = 0;  // 0 = hardware concurrency
  bool dry_run = false;
};

struct CellSummary {
  std::string mission;  // "op_p1d1"
  Algorithm algorithm;
  std::uint64_t seed;
  std::string csv;  // file name inside out_dir
  double final_reward;  // trailing window average at the end
  double satisfied;     // fraction over the trailing window
  double train_s;
  std::uint64_t monitor_mismatches;
};

struct EfficiencyRow {
  std::string mission;
  Algorithm baseline;
  std::vector<double> ratios;  // one per seed
  double median;
};

struct PlanRow {
  std::string mission;
  std::size_t dfa_states;
  std::uint32_t horizon;  // timed layers
  std::uint64_t nominal_states;
  std::size_t pruned_states;
  std::size_t transitions;
  std::uint32_t initial_distance;
  double plan_ms;
};

struct SuiteReport {
  std::vector<PlanRow> plans;
  std::vector<CellSummary> cells;
  std::vector<EfficiencyRow> efficiency;
  std::vector<std::string> files;  // written, relative to out_dir
};

/// Plans every (family, task), trains every (mission, algorithm, seed) on a
/// bounded worker pool, writes one CSV per cell, efficiency.csv, plans.csv
/// and manifest.json. With dry_run only plans are built and nothing is
/// written.
SuiteReport run_suite(const ExperimentConfig& cfg);

/// File name of a cell's record CSV.
std::string cell_csv_name(const std::string& mission, Algorithm algorithm, std::uint64_t seed);

struct SweepConfig {
  std::vector<int> sizes{8, 12, 16};
  unsigned missions_per_size = 2;  // alternating opacity / side channel
  LearnerConfig learner;           // episodes is the fixed episode count
  std::uint64_t seed = 1;
  unsigned max_resample = 20;      // layouts tried per mission before giving up
  std::filesystem::path out_dir = "results";
  bool dry_run = false;
};

struct SweepRow {
  int size;
  std::string mission;
  std::uint64_t layout_seed;
  std::uint32_t horizon;
  std::size_t pruned_states;
  double plan_s;
  double train_s;
};

struct SweepReport {
  std::vector<SweepRow> rows;
  /// Total training seconds per size, in the order of `sizes`.
  std::vector<double> train_s;
  std::vector<double> mean_states;
};

/// Random layouts per size (resampled while infeasible), planned and
/// trained with Softmax-eps for the fixed episode count; writes sweep.csv.
SweepReport scalability_sweep(const SweepConfig& cfg);

/// Manifest text (JSON) for a suite configuration.
std::string suite_manifest(const ExperimentConfig& cfg, const SuiteReport& report);

}  // namespace secrl

#endif  // SECRL_EXPERIMENT_HPP
