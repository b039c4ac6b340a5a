// secrl: parse, compile, plan, train, suite, sweep

#include <CLI11.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include "secrl/compile.hpp"
#include "secrl/error.hpp"
#include "secrl/experiment.hpp"
#include "secrl/grid_mdp.hpp"
#include "secrl/layout.hpp"

namespace fs = std::filesystem;
using namespace secrl;

namespace {

constexpr int kOk = 0;
constexpr int kInfeasible = 2;
constexpr int kConfig = 3;

struct Global {
  std::uint64_t seed = 1;
  std::string out = "results";
  bool dry_run = false;
};

struct MissionOpts {
  std::string layout;
  std::string family = "opacity";
  std::string task = "p1d1";
  double p_th = 0.85;
  double eps = -1.0;  // layout value unless given
};

std::string read_text(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot read " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

MissionLayout resolve_layout(const std::string& path) { return path.empty() ? default_layout() : load_layout(path); }

void add_mission_opts(CLI::App* app, MissionOpts& m) {
  app->add_option("--layout", m.layout, "layout JSON (default: built-in 8x8)");
  app->add_option("--mission,--family", m.family, "opacity | side_channel");
  app->add_option("--task", m.task, "p1d1 | p1d2 | p2d1 | p2d2");
  app->add_option("--p-th", m.p_th, "satisfaction threshold");
  app->add_option("--eps", m.eps, "motion uncertainty (default: layout value)");
}

void print_plan(const MissionPlan& p, std::ostream& os) {
  os << "mission        " << p.name() << "\n";
  os << "deadline       " << deadline(p.formula) << "\n";
  os << "dfa states     " << p.dfa->size() << "\n";
  os << "horizon        " << p.timed->layers() << "\n";
  os << "timed states   " << p.timed->nominal_size() << "\n";
  os << "pruned states  " << p.pruned.size() << "\n";
  os << "plan ms        " << p.plan_ms << "\n";
}

std::vector<std::string> split(const std::string& s) {
  std::vector<std::string> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ','))
    if (!item.empty()) out.push_back(item);
  return out;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"HyperTWTL-constrained reinforcement learning on grid missions"};
  app.require_subcommand(1);
  Global g;
  app.add_option("--seed", g.seed, "random seed")->capture_default_str();
  app.add_option("--out", g.out, "output directory")->capture_default_str();
  app.add_flag("--dry-run", g.dry_run, "plan only, write nothing");

  // parse
  auto* parse_cmd = app.add_subcommand("parse", "parse a formula, print it and its deadline");
  std::string formula_text, formula_file;
  parse_cmd->add_option("formula", formula_text, "formula text");
  parse_cmd->add_option("--file", formula_file, "read the formula from a file");

  // compile
  auto* compile_cmd = app.add_subcommand("compile", "compile a formula to a DFA and dump it");
  std::string compile_text, compile_file;
  MissionOpts compile_m;
  bool compile_mission = false;
  compile_cmd->add_option("formula", compile_text, "formula text (powerset alphabet of its propositions)");
  compile_cmd->add_option("--file", compile_file, "read the formula from a file");
  compile_cmd->add_flag("--from-mission", compile_mission, "compile the mission formula over the grid alphabet");
  add_mission_opts(compile_cmd, compile_m);

  // plan
  auto* plan_cmd = app.add_subcommand("plan", "build and prune the timed MDP of a mission");
  MissionOpts plan_m;
  bool explain = false;
  add_mission_opts(plan_cmd, plan_m);
  plan_cmd->add_flag("--explain", explain, "dump per-layer diagnostics");

  // train
  auto* train_cmd = app.add_subcommand("train", "train one algorithm on one mission");
  MissionOpts train_m;
  LearnerConfig lc;
  std::string algorithm = "softmax_eps";
  add_mission_opts(train_cmd, train_m);
  auto add_learner = [&](CLI::App* c, LearnerConfig& l) {
    c->add_option("--episodes", l.episodes)->capture_default_str();
    c->add_option("--explore-eps", l.explore_eps)->capture_default_str();
    c->add_option("--temperature", l.temperature)->capture_default_str();
    c->add_option("--temperature-decay", l.temperature_decay)->capture_default_str();
    c->add_option("--learning-rate", l.learning_rate)->capture_default_str();
    c->add_option("--gamma", l.gamma)->capture_default_str();
    c->add_option("--planning-steps", l.planning_steps)->capture_default_str();
    c->add_option("--q-init", l.q_init)->capture_default_str();
    c->add_flag("--wall-clock", l.wall_clock, "fill the cum_wall_ms column");
  };
  add_learner(train_cmd, lc);
  train_cmd->add_option("--algorithm", algorithm, "softmax_eps | q_learning | dyna_q")->capture_default_str();

  // suite
  auto* suite_cmd = app.add_subcommand("suite", "all missions x algorithms x seeds");
  ExperimentConfig ec;
  std::string suite_layout, suite_algorithms, suite_families, suite_tasks;
  unsigned suite_seeds = 5;
  double suite_p_th = 0.85, suite_eps = -1.0;
  suite_cmd->add_option("--layout", suite_layout, "layout JSON");
  suite_cmd->add_option("--seeds", suite_seeds, "number of seeds, starting at --seed")->capture_default_str();
  suite_cmd->add_option("--algorithms", suite_algorithms, "comma list (default: all three)");
  suite_cmd->add_option("--families", suite_families, "comma list (default: both)");
  suite_cmd->add_option("--tasks", suite_tasks, "comma list (default: all four)");
  suite_cmd->add_option("--checkpoint", ec.checkpoint)->capture_default_str();
  suite_cmd->add_option("--window", ec.window)->capture_default_str();
  suite_cmd->add_option("--workers", ec.workers, "0 = one per core")->capture_default_str();
  suite_cmd->add_option("--p-th", suite_p_th)->capture_default_str();
  suite_cmd->add_option("--eps", suite_eps, "motion uncertainty (default: layout value)");
  add_learner(suite_cmd, ec.learner);

  // sweep
  auto* sweep_cmd = app.add_subcommand("sweep", "scalability over grid sizes");
  SweepConfig sc;
  std::string sizes = "8,12,16";
  sweep_cmd->add_option("--sizes", sizes, "comma list of grid sizes")->capture_default_str();
  sweep_cmd->add_option("--missions", sc.missions_per_size, "missions per size")->capture_default_str();
  sweep_cmd->add_option("--max-resample", sc.max_resample)->capture_default_str();
  add_learner(sweep_cmd, sc.learner);
  sc.learner.episodes = 2000;

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? kOk : kConfig;
  }

  try {
    auto text_of = [](const std::string& text, const std::string& file) {
      if (!file.empty()) return read_text(file);
      if (text.empty()) throw ConfigError("no formula given");
      return text;
    };

    if (*parse_cmd) {
      const FormulaAst f = parse(text_of(formula_text, formula_file));
      std::cout << to_string(f) << "\n";
      std::cout << "deadline " << deadline(f) << "\n";
      std::cout << "depth " << depth(*f.body) << "\n";
      return kOk;
    }

    if (*compile_cmd) {
      FormulaAst f;
      TupleAlphabet alpha;
      if (compile_mission) {
        const MissionLayout layout = resolve_layout(compile_m.layout);
        f = mission_formula(parse_family(compile_m.family), parse_task(compile_m.task), layout.bounds);
        alpha = grid_alphabet(build_grid(layout), f.quantifiers.size());
      } else {
        f = parse(text_of(compile_text, compile_file));
        alpha = TupleAlphabet::powerset(Propositions(body_propositions(*f.body)), f.quantifiers.size());
      }
      const Dfa d = quantifier_eliminate(f, alpha);
      std::cout << d.to_text();
      return kOk;
    }

    if (*plan_cmd) {
      const MissionLayout layout = resolve_layout(plan_m.layout);
      const double eps = plan_m.eps >= 0 ? plan_m.eps : layout.motion_eps;
      const MissionPlan p = plan_mission(layout, parse_family(plan_m.family), parse_task(plan_m.task), plan_m.p_th, eps);
      print_plan(p, std::cout);
      if (explain) std::cout << p.pruned.explain();
      return kOk;
    }

    if (*train_cmd) {
      const MissionLayout layout = resolve_layout(train_m.layout);
      lc.motion_eps = train_m.eps >= 0 ? train_m.eps : layout.motion_eps;
      lc.p_th = train_m.p_th;
      lc.seed = g.seed;
      lc.validate();
      const Algorithm alg = parse_algorithm(algorithm);
      const MissionPlan p = plan_mission(layout, parse_family(train_m.family), parse_task(train_m.task), lc.p_th,
                                         lc.motion_eps);
      print_plan(p, std::cout);
      if (g.dry_run) return kOk;
      const RunResult r = train(p.pruned, p.formula, alg, lc);
      fs::create_directories(g.out);
      const fs::path csv = fs::path(g.out) / cell_csv_name(p.name(), alg, lc.seed);
      std::ofstream(csv, std::ios::binary) << records_csv(r.records, lc.wall_clock);
      const std::size_t w = std::min<std::size_t>(1000, r.records.size());
      double avg = 0.0;
      for (std::size_t k = r.records.size() - w; k < r.records.size(); ++k) avg += r.records[k].reward;
      std::cout << "algorithm      " << algorithm_name(alg) << "\n";
      std::cout << "episodes       " << r.records.size() << "\n";
      std::cout << "final reward   " << avg / static_cast<double>(w) << "\n";
      std::cout << "satisfied      " << r.satisfied_fraction(w) << "\n";
      std::cout << "monitor checks " << r.monitor_checks << " mismatches " << r.monitor_mismatches << "\n";
      std::cout << "records        " << csv.string() << "\n";
      return kOk;
    }

    if (*suite_cmd) {
      if (!suite_layout.empty()) {
        ec.layout = load_layout(suite_layout);
        ec.layout_path = suite_layout;
      }
      ec.learner.p_th = suite_p_th;
      ec.learner.motion_eps = suite_eps >= 0 ? suite_eps : ec.layout.motion_eps;
      ec.learner.gamma = ec.layout.gamma;
      ec.out_dir = g.out;
      ec.dry_run = g.dry_run;
      ec.seeds.clear();
      for (unsigned k = 0; k < suite_seeds; ++k) ec.seeds.push_back(g.seed + k);
      if (!suite_algorithms.empty()) {
        ec.algorithms.clear();
        for (const auto& a : split(suite_algorithms)) ec.algorithms.push_back(parse_algorithm(a));
      }
      if (!suite_families.empty()) {
        ec.families.clear();
        for (const auto& f : split(suite_families)) ec.families.push_back(parse_family(f));
      }
      if (!suite_tasks.empty()) {
        ec.tasks.clear();
        for (const auto& t : split(suite_tasks)) ec.tasks.push_back(parse_task(t));
      }
      const SuiteReport rep = run_suite(ec);
      std::cout << "mission dfa_states horizon pruned_states initial_distance plan_ms\n";
      for (const auto& p : rep.plans)
        std::cout << p.mission << " " << p.dfa_states << " " << p.horizon << " " << p.pruned_states << " "
                  << p.initial_distance << " " << p.plan_ms << "\n";
      if (ec.dry_run) return kOk;
      std::cout << "mission baseline median_efficiency\n";
      for (const auto& e : rep.efficiency)
        std::cout << e.mission << " " << algorithm_name(e.baseline) << " " << e.median << "\n";
      std::cout << rep.files.size() << " files in " << ec.out_dir.string() << "\n";
      return kOk;
    }

    if (*sweep_cmd) {
      sc.sizes.clear();
      for (const auto& s : split(sizes)) sc.sizes.push_back(std::stoi(s));
      sc.seed = g.seed;
      sc.out_dir = g.out;
      sc.dry_run = g.dry_run;
      const SweepReport rep = scalability_sweep(sc);
      std::cout << "grid mission horizon pruned_states plan_s train_s\n";
      for (const auto& r : rep.rows)
        std::cout << r.size << " " << r.mission << " " << r.horizon << " " << r.pruned_states << " " << r.plan_s
                  << " " << r.train_s << "\n";
      return kOk;
    }
  } catch (const Infeasible& e) {
    std::cerr << "infeasible: " << e.what() << "\n";
    return kInfeasible;
  } catch (const SyntaxError& e) {
    std::cerr << "syntax error: " << e.what() << "\n";
    return kConfig;
  } catch (const std::invalid_argument& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kConfig;
  } catch (const Error& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kConfig;
  }
  return kOk;
}
