#include "secrl/experiment.hpp"

#include <json.hpp>

#include <algorithm>
#include <atomic>
#include <chrono>
#include <exception>
#include <fstream>
#include <limits>
#include <mutex>
#include <numeric>
#include <sstream>
#include <thread>

#include "secrl/compile.hpp"
#include "secrl/error.hpp"
#include "secrl/grid_mdp.hpp"
#include "secrl/product.hpp"

namespace secrl {

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

unsigned pool_size(unsigned requested, std::size_t jobs) {
  unsigned n = requested ? requested : std::max(1u, std::thread::hardware_concurrency());
  return static_cast<unsigned>(std::min<std::size_t>(n, std::max<std::size_t>(jobs, 1)));
}

// runs job(k) for k in [0, n) on `workers` threads; rethrows the first failure
template <class F>
void parallel_for(std::size_t n, unsigned workers, F&& job) {
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex mu;
  auto body = [&] {
    for (;;) {
      const std::size_t k = next.fetch_add(1);
      if (k >= n) return;
      {
        std::lock_guard lock(mu);
        if (failure) return;
      }
      try {
        job(k);
      } catch (...) {
        std::lock_guard lock(mu);
        if (!failure) failure = std::current_exception();
      }
    }
  };
  if (workers <= 1) {
    body();
  } else {
    std::vector<std::thread> pool;
    for (unsigned w = 0; w < workers; ++w) pool.emplace_back(body);
    for (auto& t : pool) t.join();
  }
  if (failure) std::rethrow_exception(failure);
}

double window_mean(const std::vector<EpisodeRecord>& r, std::size_t end, std::size_t window) {
  double s = 0.0;
  for (std::size_t k = end - window; k < end; ++k) s += r[k].reward;
  return s / static_cast<double>(window);
}

double median(std::vector<double> v) {
  if (v.empty()) return 0.0;
  std::sort(v.begin(), v.end());
  const std::size_t h = v.size() / 2;
  return v.size() % 2 ? v[h] : 0.5 * (v[h - 1] + v[h]);
}

void write_file(const std::filesystem::path& p, const std::string& text) {
  std::ofstream out(p, std::ios::binary);
  if (!out) throw ConfigError("cannot write " + p.string());
  out << text;
}

}  // namespace

std::string MissionPlan::name() const { return std::string(family_short(family)) + "_" + task.name(); }

MissionPlan plan_mission(const MissionLayout& layout, MissionFamily family, MissionTask task, double p_th,
                         double motion_eps) {
  const auto t0 = Clock::now();
  MissionPlan plan;
  plan.family = family;
  plan.task = task;
  plan.formula = mission_formula(family, task, layout.bounds);

  auto grid = std::make_shared<const GridMdp>(build_grid(layout, motion_eps));
  auto composed = std::make_shared<const ComposedMdp>(self_compose(grid, 2));
  const auto alphabet = grid_alphabet(*grid, 2);
  plan.dfa = std::make_shared<const Dfa>(quantifier_eliminate(plan.formula, alphabet));
  auto product = build_product(composed, plan.dfa);
  plan.timed = build_timed(product, deadline(plan.formula) + 2);
  plan.distances = std::make_unique<DistanceMap>(plan.timed, motion_eps);
  try {
    plan.pruned = prune(*plan.distances, p_th);
  } catch (const Infeasible& e) {
    throw Infeasible(plan.name() + ": " + e.what(), e.best_bound());
  }
  plan.plan_ms = seconds_since(t0) * 1000.0;
  return plan;
}

double sample_efficiency(const std::vector<EpisodeRecord>& softmax, const std::vector<EpisodeRecord>& baseline,
                         std::uint64_t checkpoint, std::size_t window) {
  if (window == 0 || window > checkpoint) throw InsufficientData("window must lie in [1, checkpoint]");
  if (softmax.size() < checkpoint || baseline.size() < checkpoint)
    throw InsufficientData("records end before episode " + std::to_string(checkpoint));
  const double num = window_mean(softmax, checkpoint, window);
  const double den = window_mean(baseline, checkpoint, window);
  if (!(den > 0.0) || !(num > 0.0)) throw InsufficientData("average reward at the checkpoint is not positive");
  return num / den;
}

std::string cell_csv_name(const std::string& mission, Algorithm algorithm, std::uint64_t seed) {
  return mission + "_" + algorithm_name(algorithm) + "_seed" + std::to_string(seed) + ".csv";
}

SuiteReport run_suite(const ExperimentConfig& cfg) {
  cfg.learner.validate();
  if (cfg.seeds.empty() || cfg.algorithms.empty() || cfg.tasks.empty() || cfg.families.empty())
    throw ConfigError("suite needs at least one family, task, algorithm and seed");
  cfg.layout.validate();

  struct Mission {
    MissionFamily family;
    MissionTask task;
  };
  std::vector<Mission> missions;
  for (auto f : cfg.families)
    for (auto t : cfg.tasks) missions.push_back({f, t});

  std::vector<MissionPlan> plans(missions.size());
  parallel_for(missions.size(), pool_size(cfg.workers, missions.size()), [&](std::size_t k) {
    plans[k] = plan_mission(cfg.layout, missions[k].family, missions[k].task, cfg.learner.p_th, cfg.learner.motion_eps);
  });

  SuiteReport report;
  for (const auto& p : plans) {
    report.plans.push_back({p.name(), p.dfa->size(), p.timed->layers(), p.timed->nominal_size(), p.pruned.size(),
                            p.pruned.transition_count(), p.pruned.dist[0], p.plan_ms});
  }
  if (cfg.dry_run) return report;

  std::filesystem::create_directories(cfg.out_dir);
  struct Cell {
    std::size_t plan;
    Algorithm algorithm;
    std::uint64_t seed;
  };
  std::vector<Cell> cells;
  for (std::size_t p = 0; p < plans.size(); ++p)
    for (auto a : cfg.algorithms)
      for (auto s : cfg.seeds) cells.push_back({p, a, s});

  std::vector<std::vector<EpisodeRecord>> records(cells.size());
  report.cells.resize(cells.size());
  parallel_for(cells.size(), pool_size(cfg.workers, cells.size()), [&](std::size_t k) {
    const Cell& c = cells[k];
    const MissionPlan& plan = plans[c.plan];
    LearnerConfig lc = cfg.learner;
    lc.seed = c.seed;
    const auto t0 = Clock::now();
    RunResult run = train(plan.pruned, plan.formula, c.algorithm, lc);
    const double secs = seconds_since(t0);
    const std::string name = cell_csv_name(plan.name(), c.algorithm, c.seed);
    write_file(cfg.out_dir / name, records_csv(run.records, lc.wall_clock));
    const std::size_t w = std::min(cfg.window, run.records.size());
    report.cells[k] = {plan.name(),
                       c.algorithm,
                       c.seed,
                       name,
                       window_mean(run.records, run.records.size(), w),
                       run.satisfied_fraction(w),
                       secs,
                       run.monitor_mismatches};
    records[k] = std::move(run.records);
  });
  for (const auto& c : report.cells) report.files.push_back(c.csv);

  // efficiency of softmax-eps against each baseline, per mission and seed
  auto find = [&](std::size_t plan, Algorithm a, std::uint64_t seed) -> const std::vector<EpisodeRecord>* {
    for (std::size_t k = 0; k < cells.size(); ++k)
      if (cells[k].plan == plan && cells[k].algorithm == a && cells[k].seed == seed) return &records[k];
    return nullptr;
  };
  const bool have_softmax =
      std::find(cfg.algorithms.begin(), cfg.algorithms.end(), Algorithm::SoftmaxEps) != cfg.algorithms.end();
  std::ostringstream eff;
  eff << "mission,baseline,checkpoint,window,median";
  for (auto s : cfg.seeds) eff << ",seed" << s;
  eff << "\n";
  if (have_softmax && cfg.learner.episodes >= cfg.checkpoint) {
    for (std::size_t p = 0; p < plans.size(); ++p) {
      for (auto base : cfg.algorithms) {
        if (base == Algorithm::SoftmaxEps) continue;
        EfficiencyRow row{plans[p].name(), base, {}, 0.0};
        for (auto s : cfg.seeds) {
          double r;
          try {
            r = sample_efficiency(*find(p, Algorithm::SoftmaxEps, s), *find(p, base, s), cfg.checkpoint, cfg.window);
          } catch (const InsufficientData&) {
            r = std::numeric_limits<double>::quiet_NaN();
          }
          row.ratios.push_back(r);
        }
        std::vector<double> finite;
        for (double r : row.ratios)
          if (r == r) finite.push_back(r);
        row.median = finite.empty() ? std::numeric_limits<double>::quiet_NaN() : median(finite);
        eff << row.mission << ',' << algorithm_name(base) << ',' << cfg.checkpoint << ',' << cfg.window << ','
            << row.median;
        for (double r : row.ratios) eff << ',' << r;
        eff << "\n";
        report.efficiency.push_back(std::move(row));
      }
    }
  }
  write_file(cfg.out_dir / "efficiency.csv", eff.str());
  report.files.push_back("efficiency.csv");

  std::ostringstream pl;
  pl << "mission,dfa_states,horizon,nominal_states,pruned_states,transitions,initial_distance\n";
  for (const auto& r : report.plans)
    pl << r.mission << ',' << r.dfa_states << ',' << r.horizon << ',' << r.nominal_states << ',' << r.pruned_states
       << ',' << r.transitions << ',' << r.initial_distance << "\n";
  write_file(cfg.out_dir / "plans.csv", pl.str());
  report.files.push_back("plans.csv");

  write_file(cfg.out_dir / "manifest.json", suite_manifest(cfg, report));
  report.files.push_back("manifest.json");
  return report;
}

std::string suite_manifest(const ExperimentConfig& cfg, const SuiteReport& report) {
  using nlohmann::ordered_json;
  ordered_json j;
  j["layout_path"] = cfg.layout_path;
  j["layout"] = ordered_json::parse(layout_to_json(cfg.layout));
  for (auto f : cfg.families) j["families"].push_back(family_name(f));
  for (auto t : cfg.tasks) j["tasks"].push_back(t.name());
  for (auto a : cfg.algorithms) j["algorithms"].push_back(algorithm_name(a));
  j["seeds"] = cfg.seeds;
  const auto& l = cfg.learner;
  j["learner"] = {{"p_th", l.p_th},
                  {"motion_eps", l.motion_eps},
                  {"explore_eps", l.explore_eps},
                  {"temperature", l.temperature},
                  {"temperature_decay", l.temperature_decay},
                  {"learning_rate", l.learning_rate},
                  {"gamma", l.gamma},
                  {"episodes", l.episodes},
                  {"planning_steps", l.planning_steps},
                  {"q_init", l.q_init},
                  {"wall_clock", l.wall_clock}};
  j["efficiency"] = {{"checkpoint", cfg.checkpoint}, {"window", cfg.window}};
  for (const auto& p : report.plans) {
    j["plans"].push_back({{"mission", p.mission},
                          {"dfa_states", p.dfa_states},
                          {"horizon", p.horizon},
                          {"pruned_states", p.pruned_states},
                          {"transitions", p.transitions}});
  }
  j["files"] = report.files;
  j["deviations"] = {
      "timed model uses deadline + 2 layers so the automaton can read the label at the deadline",
      "eps-probabilistic edges of the composed grid require every coordinate to move as intended",
      "the orphan rule of the pruner looks at likely (eps) successors only",
      "episode satisfaction is the automaton verdict; the monitor re-checks every 100th episode",
      "efficiency uses trailing 1000-episode averages of episode reward",
      "experience is logged but not replayed; the undefined scaling function is omitted",
  };
  return j.dump(2) + "\n";
}

SweepReport scalability_sweep(const SweepConfig& cfg) {
  cfg.learner.validate();
  if (!std::is_sorted(cfg.sizes.begin(), cfg.sizes.end())) throw ConfigError("sweep sizes must be ascending");
  SweepReport report;
  std::uint64_t layout_seed = cfg.seed;
  for (int n : cfg.sizes) {
    double total = 0.0, states = 0.0;
    for (unsigned m = 0; m < cfg.missions_per_size; ++m) {
      const MissionFamily fam = m % 2 ? MissionFamily::SideChannel : MissionFamily::Opacity;
      const MissionTask task = all_tasks()[m / 2 % 4];
      std::unique_ptr<MissionPlan> plan;
      double best = 0.0;
      for (unsigned tries = 0; !plan; ++tries) {
        if (tries >= cfg.max_resample)
          throw Infeasible("no feasible " + std::to_string(n) + "x" + std::to_string(n) + " layout after " +
                               std::to_string(tries) + " tries",
                           best);
        const MissionLayout layout = random_layout(n, layout_seed++);
        try {
          plan = std::make_unique<MissionPlan>(
              plan_mission(layout, fam, task, cfg.learner.p_th, cfg.learner.motion_eps));
        } catch (const Infeasible& e) {
          best = std::max(best, e.best_bound());
        }
      }
      SweepRow row{n, plan->name(), layout_seed - 1, plan->timed->layers(), plan->pruned.size(), plan->plan_ms / 1000.0,
                   0.0};
      if (!cfg.dry_run) {
        LearnerConfig lc = cfg.learner;
        lc.seed = cfg.seed + m;
        const auto t0 = Clock::now();
        train(plan->pruned, plan->formula, Algorithm::SoftmaxEps, lc);
        row.train_s = seconds_since(t0);
      }
      total += row.train_s;
      states += static_cast<double>(row.pruned_states);
      report.rows.push_back(row);
    }
    report.train_s.push_back(total);
    report.mean_states.push_back(cfg.missions_per_size ? states / cfg.missions_per_size : 0.0);
  }
  if (!cfg.dry_run) {
    std::filesystem::create_directories(cfg.out_dir);
    std::ostringstream os;
    os << "grid,mission,layout_seed,horizon,pruned_states,plan_s,train_s\n";
    for (const auto& r : report.rows)
      os << r.size << ',' << r.mission << ',' << r.layout_seed << ',' << r.horizon << ',' << r.pruned_states << ','
         << r.plan_s << ',' << r.train_s << "\n";
    write_file(cfg.out_dir / "sweep.csv", os.str());
  }
  return report;
}

}  // namespace secrl
