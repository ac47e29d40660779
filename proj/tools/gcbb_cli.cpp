// gcbb: generate instances, solve them, run paired experiments and rebuild
// performance profiles from saved reports.

#include <chrono>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "gcbb/bench.hpp"
#include "gcbb/error.hpp"
#include "gcbb/instance.hpp"
#include "gcbb/probability.hpp"
#include "gcbb/report_io.hpp"
#include "gcbb/solver.hpp"

namespace fs = std::filesystem;
using namespace gcbb;

namespace {

struct SolverFlags {
  std::string mode = "classic";
  double time_limit = 600.0;
  std::optional<double> tie_eps;
  std::optional<int> root_iters;
  std::optional<int> node_iters;
  bool no_fixing = false;

  void attach(CLI::App* app, bool with_mode) {
    if (with_mode) {
      app->add_option("--mode", mode, "classic or gcbb")->check(CLI::IsMember({"classic", "gcbb"}));
    }
    app->add_option("--time-limit-s", time_limit, "time limit per solve in seconds")->check(CLI::PositiveNumber);
    app->add_option("--tie-eps", tie_eps, "gcbb open-node tie window (default 1e-3 x root bound)");
    app->add_option("--root-iters", root_iters, "ascent iterations at the root (default 5n)");
    app->add_option("--node-iters", node_iters, "ascent iterations at other nodes (default n)");
    app->add_flag("--no-fixing", no_fixing, "disable reduced-cost edge fixing");
  }

  SolverConfig config() const {
    SolverConfig cfg;
    cfg.mode = mode == "gcbb" ? Mode::gcbb : Mode::classic;
    cfg.time_limit = time_limit;
    cfg.tie_eps = tie_eps;
    cfg.root_iters = root_iters;
    cfg.node_iters = node_iters;
    cfg.edge_fixing = !no_fixing;
    return cfg;
  }
};

void ensure_dir(const std::string& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw Error(ErrorKind::config, "cannot create '" + dir + "': " + ec.message());
}

std::ofstream open_out(const fs::path& p) {
  std::ofstream out(p);
  if (!out) throw Error(ErrorKind::config, "cannot write '" + p.string() + "'");
  return out;
}

void write_outputs(const std::vector<bench::PairedRun>& runs, const std::string& out_dir, double time_limit) {
  for (const auto& group : bench::by_size(runs)) {
    const int n = group.front().n;
    const auto grid = bench::log_grid(1e-3, time_limit);
    {
      auto out = open_out(fs::path(out_dir) / bench::cumulative_profile_name(n));
      bench::write_profile_csv(out, bench::cumulative_profile(group, grid));
    }
    {
      auto out = open_out(fs::path(out_dir) / bench::performance_profile_name(n));
      bench::write_profile_csv(out, bench::better_solution_profile(group, grid));
    }
    try {
      const auto table = bench::aggregate_table(group);
      auto csv = open_out(fs::path(out_dir) / (std::to_string(n) + "_aggregate.csv"));
      bench::write_table_csv(csv, table);
      const std::string text = bench::render_table(table);
      auto txt = open_out(fs::path(out_dir) / (std::to_string(n) + "_aggregate.txt"));
      txt << text;
      std::cout << text << '\n';
    } catch (const Error& e) {
      if (e.kind() != ErrorKind::empty_table) throw;
      std::cerr << "n=" << n << ": " << e.what() << '\n';
    }
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"1-tree branch and bound for the TSP with probability-guided search"};
  app.require_subcommand(1);

  // generate
  auto* gen = app.add_subcommand("generate", "write random unit-square instances in TSPLIB format");
  int gen_n = 20;
  int gen_count = 1;
  std::uint64_t gen_seed = 0;
  std::string gen_out = ".";
  std::optional<std::string> gen_prob;
  gen->add_option("--n", gen_n, "vertices per instance")->required()->check(CLI::Range(3, 1 << 20));
  gen->add_option("--count", gen_count, "number of instances")->check(CLI::PositiveNumber);
  gen->add_option("--seed", gen_seed, "seed base");
  gen->add_option("--out-dir", gen_out, "output directory");
  gen->add_option("--prob-source", gen_prob, "also write <n>_<i>.prob: oracle | noisy:<level>");

  // solve
  auto* sol = app.add_subcommand("solve", "solve one instance and print its report record");
  SolverFlags sol_flags;
  sol_flags.attach(sol, true);
  std::optional<std::string> sol_instance;
  std::optional<int> sol_n;
  std::uint64_t sol_seed = 0;
  std::optional<std::string> sol_prob_file;
  std::optional<std::string> sol_prob_source;
  std::optional<std::string> sol_out;
  sol->add_option("--instance", sol_instance, "TSPLIB file");
  sol->add_option("--n", sol_n, "generate a random instance of this size instead");
  sol->add_option("--seed", sol_seed, "seed for --n");
  auto* pf = sol->add_option("--prob-file", sol_prob_file, "probability matrix file");
  sol->add_option("--prob-source", sol_prob_source, "oracle | noisy:<level>")->excludes(pf);
  sol->add_option("--out", sol_out, "append the report record here instead of stdout");

  // experiment
  auto* exp = app.add_subcommand("experiment", "paired classic/gcbb runs with tables and profiles");
  SolverFlags exp_flags;
  exp_flags.attach(exp, false);
  std::vector<int> exp_sizes;
  int exp_count = 10;
  std::uint64_t exp_seed = 0;
  std::string exp_source = "oracle";
  std::optional<std::string> exp_prob_dir;
  std::string exp_out = "results";
  int exp_workers = 1;
  exp->add_option("--n", exp_sizes, "instance sizes (repeatable)")->required();
  exp->add_option("--count", exp_count, "instances per size")->check(CLI::PositiveNumber);
  exp->add_option("--seed", exp_seed, "seed base");
  auto* ep = exp->add_option("--prob-file", exp_prob_dir, "directory of <n>_<index>.prob files");
  exp->add_option("--prob-source", exp_source, "oracle | noisy:<level>")->excludes(ep);
  exp->add_option("--out-dir", exp_out, "output directory");
  exp->add_option("--workers", exp_workers, "concurrent instances")->check(CLI::PositiveNumber);

  // profile
  auto* prof = app.add_subcommand("profile", "rebuild tables and profile CSVs from a reports file");
  std::string prof_reports;
  std::string prof_out = ".";
  double prof_limit = 600.0;
  prof->add_option("--reports", prof_reports, "newline-delimited report records")->required();
  prof->add_option("--out-dir", prof_out, "output directory");
  prof->add_option("--time-limit-s", prof_limit, "profile grid upper end")->check(CLI::PositiveNumber);

  CLI11_PARSE(app, argc, argv);

  try {
    if (*gen) {
      ensure_dir(gen_out);
      std::optional<bench::ProbabilitySource> src;
      if (gen_prob) src = bench::ProbabilitySource::parse(*gen_prob);
      for (int i = 0; i < gen_count; ++i) {
        const std::uint64_t seed = bench::instance_seed(gen_seed, gen_n, i);
        const Instance inst = generate(gen_n, seed);
        auto out = open_out(fs::path(gen_out) / (std::to_string(gen_n) + "_" + std::to_string(i) + ".tsp"));
        write_tsplib(out, inst);
        if (src) {
          const ProbabilityMatrix p = src->kind == bench::SourceKind::oracle
                                          ? oracle_matrix(inst)
                                          : noisy_oracle_matrix(inst, src->noise, seed);
          write_matrix_file((fs::path(gen_out) / bench::prob_file_name(gen_n, i)).string(), p);
        }
      }
      std::cerr << "wrote " << gen_count << " instance(s) to " << gen_out << '\n';
    } else if (*sol) {
      const auto t0 = std::chrono::steady_clock::now();
      if (sol_instance.has_value() == sol_n.has_value()) {
        throw Error(ErrorKind::config, "give exactly one of --instance or --n");
      }
      const Instance inst = sol_instance ? parse_tsplib_file(*sol_instance) : generate(*sol_n, sol_seed);
      SolverConfig cfg = sol_flags.config();
      cfg.seed = sol_seed;
      std::optional<ProbabilityMatrix> probs;
      if (sol_prob_file) {
        probs = load_matrix_file(*sol_prob_file);
      } else if (sol_prob_source) {
        const auto src = bench::ProbabilitySource::parse(*sol_prob_source);
        if (src.kind == bench::SourceKind::file) {
          probs = load_matrix_file(src.path);
        } else {
          probs = src.kind == bench::SourceKind::oracle ? oracle_matrix(inst)
                                                        : noisy_oracle_matrix(inst, src.noise, sol_seed);
        }
      }
      const double setup = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
      SolveReport rep = solve(inst, probs ? &*probs : nullptr, cfg);
      rep.total_time += setup;
      for (auto& p : rep.incumbent_trajectory) p.time += setup;
      if (sol_out) {
        std::ofstream out(*sol_out, std::ios::app);
        if (!out) throw Error(ErrorKind::config, "cannot write '" + *sol_out + "'");
        out << to_record(rep) << '\n';
      } else {
        std::cout << to_record(rep) << '\n';
      }
      std::cerr << (rep.solved ? "optimal" : "time limit") << " length " << rep.optimum.length << ", "
                << rep.generated_nodes << " nodes generated, " << rep.explored_nodes << " explored, "
                << rep.total_time << " s\n";
    } else if (*exp) {
      bench::ExperimentSpec spec;
      spec.sizes = exp_sizes;
      spec.count = exp_count;
      spec.seed_base = exp_seed;
      spec.time_limit = exp_flags.time_limit;
      spec.solver = exp_flags.config();
      spec.source = exp_prob_dir ? bench::ProbabilitySource::parse("file:" + *exp_prob_dir)
                                 : bench::ProbabilitySource::parse(exp_source);
      spec.workers = exp_workers;
      ensure_dir(exp_out);
      const auto runs = bench::run_experiment(spec);
      {
        auto out = open_out(fs::path(exp_out) / "reports.jsonl");
        for (const auto& r : runs) out << to_record(r.classic) << '\n' << to_record(r.gcbb) << '\n';
      }
      write_outputs(runs, exp_out, spec.time_limit);
    } else if (*prof) {
      std::ifstream in(prof_reports);
      if (!in) throw Error(ErrorKind::config, "cannot open '" + prof_reports + "'");
      const auto reports = read_records(in);
      ensure_dir(prof_out);
      write_outputs(bench::pair_reports(reports), prof_out, prof_limit);
    }
  } catch (const Error& e) {
    std::cerr << "gcbb: " << e.what() << '\n';
    return 2;
  }
  return 0;
}
