#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <random>
#include <sstream>

#include "gcbb/bench.hpp"
#include "gcbb/error.hpp"
#include "gcbb/report_io.hpp"
#include "oracles.hpp"

using namespace gcbb;
using namespace gcbb::bench;
using gcbb::testing::wilcoxon_reference;

namespace {

ErrorKind kind_of(auto&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.kind();
  }
  FAIL("expected gcbb::Error");
  return ErrorKind::input;
}

ExperimentSpec small_spec(int count) {
  ExperimentSpec s;
  s.sizes = {8};
  s.count = count;
  s.seed_base = 42;
  s.time_limit = 60.0;
  s.source = ProbabilitySource::parse("oracle");
  return s;
}

SolveReport fake(Mode mode, bool solved, double total, std::vector<TrajectoryPoint> traj, std::uint64_t nodes = 10) {
  SolveReport r;
  r.n = 8;
  r.mode = mode;
  r.solved = solved;
  r.total_time = total;
  r.bb_time = total;
  r.generated_nodes = nodes;
  r.incumbent_trajectory = std::move(traj);
  r.optimum.length = r.incumbent_trajectory.back().length;
  if (mode == Mode::gcbb) r.opt_score_normalized = 1.0;
  return r;
}

PairedRun pair(int index, SolveReport c, SolveReport g) {
  PairedRun p;
  p.n = 8;
  p.index = index;
  p.classic = std::move(c);
  p.gcbb = std::move(g);
  p.classic.instance_index = p.gcbb.instance_index = index;
  return p;
}

const MetricRow& metric(const AggregateTable& t, const std::string& name) {
  for (const auto& m : t.metrics)
    if (m.name == name) return m;
  FAIL("no metric " << name);
  return t.metrics.front();
}

}  // namespace

TEST_CASE("probability source parsing") {
  CHECK(ProbabilitySource::parse("oracle").kind == SourceKind::oracle);
  const auto noisy = ProbabilitySource::parse("noisy:0.3");
  CHECK(noisy.kind == SourceKind::noisy);
  CHECK(noisy.noise == 0.3);
  const auto file = ProbabilitySource::parse("file:/tmp/x");
  CHECK(file.kind == SourceKind::file);
  CHECK(file.path == "/tmp/x");
  CHECK(kind_of([] { ProbabilitySource::parse("noisy:0.7"); }) == ErrorKind::config);
  CHECK(kind_of([] { ProbabilitySource::parse("noisy:abc"); }) == ErrorKind::config);
  CHECK(kind_of([] { ProbabilitySource::parse("gcn"); }) == ErrorKind::config);
  CHECK(prob_file_name(20, 3) == "20_3.prob");
}

TEST_CASE("oracle experiment at n = 8") {
  const auto runs = run_experiment(small_spec(10));
  REQUIRE(runs.size() == 10);
  for (int i = 0; i < 10; ++i) {
    CHECK(runs[i].index == i);
    CHECK(runs[i].classic.solved);
    CHECK(runs[i].gcbb.solved);
    CHECK(runs[i].classic.optimum.length == doctest::Approx(runs[i].gcbb.optimum.length).epsilon(1e-12));
    CHECK(runs[i].seed == instance_seed(42, 8, i));
  }
  const AggregateTable t = aggregate_table(runs);
  CHECK(t.paired == 10);
  CHECK(t.solved_classic == 100.0);
  CHECK(t.solved_gcbb == 100.0);
  CHECK(t.with_nn_gcbb + t.with_pnn_gcbb == 100.0);  // oracle PNN is optimal
  const MetricRow& score = metric(t, "optimality_score");
  CHECK_FALSE(score.classic.has_value());
  CHECK(score.gcbb->mean == 1.0);
  CHECK(score.gcbb->half_width == 0.0);
  CHECK(metric(t, "bb_nodes_before_optimum").gcbb->mean == 0.0);

  std::ostringstream csv;
  write_table_csv(csv, t);
  CHECK(csv.str().rfind("# ci:", 0) == 0);
  CHECK(csv.str().find("8,with_pnn_pct,-,") != std::string::npos);
  CHECK(csv.str().find("8,optimality_score,-,") != std::string::npos);
  const std::string text = render_table(t);
  CHECK(text.find("with PNN") != std::string::npos);

  // workers do not change results
  ExperimentSpec par = small_spec(10);
  par.workers = 4;
  const auto again = run_experiment(par);
  for (int i = 0; i < 10; ++i) {
    CHECK(again[i].classic.generated_nodes == runs[i].classic.generated_nodes);
    CHECK(again[i].gcbb.generated_nodes == runs[i].gcbb.generated_nodes);
    CHECK(again[i].gcbb.optimum.order == runs[i].gcbb.optimum.order);
  }
}

TEST_CASE("experiment validation happens before solving") {
  ExperimentSpec s = small_spec(2);
  s.source = ProbabilitySource::parse("file:/nonexistent-gcbb-dir");
  CHECK(kind_of([&] { run_experiment(s); }) == ErrorKind::config);
  s = small_spec(2);
  s.sizes = {13};
  CHECK(kind_of([&] { run_experiment(s); }) == ErrorKind::config);
  s.sizes = {2};
  CHECK(kind_of([&] { run_experiment(s); }) == ErrorKind::config);
}

TEST_CASE("file source reads <n>_<i>.prob") {
  namespace fs = std::filesystem;
  const fs::path dir = fs::temp_directory_path() / "gcbb_test_probs";
  fs::create_directories(dir);
  ExperimentSpec s = small_spec(3);
  for (int i = 0; i < 3; ++i) {
    const Instance inst = generate(8, instance_seed(s.seed_base, 8, i));
    write_matrix_file((dir / prob_file_name(8, i)).string(), oracle_matrix(inst));
  }
  s.source = ProbabilitySource::parse("file:" + dir.string());
  const auto runs = run_experiment(s);
  for (const auto& r : runs) CHECK(r.gcbb.opt_score_normalized == 1.0);
  fs::remove(dir / prob_file_name(8, 2));
  CHECK(kind_of([&] { run_experiment(s); }) == ErrorKind::config);
  fs::remove_all(dir);
}

TEST_CASE("mean_interval") {
  const std::vector<double> same(7, 3.25);
  const Interval a = mean_interval(same);
  CHECK(a.mean == 3.25);
  CHECK(a.half_width == 0.0);
  const std::vector<double> v{1, 2, 3, 4};
  const Interval b = mean_interval(v);
  CHECK(b.mean == 2.5);
  CHECK(b.half_width == doctest::Approx(1.96 * std::sqrt(5.0 / 3.0) / 2.0));
}

TEST_CASE("duplicated reports give zero-width intervals") {
  const SolveReport c = fake(Mode::classic, true, 2.0, {{0.1, 5.0}, {1.0, 4.0}}, 30);
  const SolveReport g = fake(Mode::gcbb, true, 1.0, {{0.1, 4.0}}, 12);
  std::vector<PairedRun> runs;
  for (int i = 0; i < 5; ++i) runs.push_back(pair(i, c, g));
  const AggregateTable t = aggregate_table(runs);
  for (const auto& m : t.metrics) {
    CHECK(m.gcbb->half_width == 0.0);
    if (m.classic) CHECK(m.classic->half_width == 0.0);
  }
  const MetricRow& nodes = metric(t, "generated_bb_nodes");
  CHECK(nodes.classic->mean == 30.0);
  CHECK(nodes.gcbb->mean == 12.0);
  CHECK(nodes.better == 1);
  CHECK_FALSE(nodes.p_value.has_value());  // 5 pairs is too few
}

TEST_CASE("timeouts leave the means but stay in the profiles") {
  std::vector<PairedRun> runs;
  runs.push_back(pair(0, fake(Mode::classic, true, 1.0, {{0.01, 5.0}}, 100),
                      fake(Mode::gcbb, true, 0.5, {{0.01, 5.0}}, 50)));
  runs.push_back(pair(1, fake(Mode::classic, false, 10.0, {{0.01, 9.0}, {2.0, 8.0}}, 100000),
                      fake(Mode::gcbb, true, 3.0, {{0.01, 7.0}}, 70)));
  const AggregateTable t = aggregate_table(runs);
  CHECK(t.instances == 2);
  CHECK(t.paired == 1);
  CHECK(t.solved_classic == 50.0);
  CHECK(t.solved_gcbb == 100.0);
  CHECK(metric(t, "generated_bb_nodes").classic->mean == 100.0);
  CHECK(metric(t, "generated_bb_nodes").gcbb->mean == 50.0);

  const auto grid = log_grid(1e-3, 10.0);
  const auto prof = better_solution_profile(runs, grid);
  const auto at = [&](double t) {
    return *std::find_if(prof.begin(), prof.end(), [&](const ProfilePoint& p) { return p.time >= t; });
  };
  CHECK(at(1.0).hybrid == 0.5);  // instance 1: 7 against 9
  CHECK(at(1.0).classic == 0.0);
  CHECK(at(5.0).hybrid == 0.5);  // 7 against 8

  std::vector<PairedRun> none{pair(0, fake(Mode::classic, false, 10.0, {{0.01, 5.0}}),
                                   fake(Mode::gcbb, true, 1.0, {{0.01, 5.0}}))};
  CHECK(kind_of([&] { aggregate_table(none); }) == ErrorKind::empty_table);
}

TEST_CASE("profiles") {
  std::mt19937_64 rng(6);
  std::uniform_real_distribution<double> d(0.002, 5.0);
  std::vector<PairedRun> runs;
  for (int i = 0; i < 40; ++i) {
    const double tc = d(rng), tg = d(rng);
    runs.push_back(pair(i, fake(Mode::classic, i % 7 != 0, tc, {{tc / 3, 6.0}, {tc, 5.0}}),
                        fake(Mode::gcbb, i % 5 != 0, tg, {{tg / 2, 5.5}, {tg, 5.0}})));
  }
  const double limit = 10.0;
  const auto grid = log_grid(1e-3, limit);
  REQUIRE(grid.size() == 512);
  CHECK(grid.front() == 1e-3);
  CHECK(grid.back() == limit);
  const auto cum = cumulative_profile(runs, grid);
  for (std::size_t k = 1; k < cum.size(); ++k) {
    CHECK(cum[k].hybrid >= cum[k - 1].hybrid);
    CHECK(cum[k].classic >= cum[k - 1].classic);
  }
  const AggregateTable t = aggregate_table(runs);
  CHECK(cum.back().hybrid * 100.0 == doctest::Approx(t.solved_gcbb));
  CHECK(cum.back().classic * 100.0 == doctest::Approx(t.solved_classic));
  const std::vector<double> zero{0.0};
  const auto z = cumulative_profile(runs, zero);
  CHECK(z[0].hybrid == 0.0);
  CHECK(z[0].classic == 0.0);

  const auto better = better_solution_profile(runs, grid);
  for (const auto& p : better) {
    CHECK(p.hybrid + p.classic <= 1.0);
    CHECK(p.hybrid >= 0.0);
    CHECK(p.classic >= 0.0);
  }
  CHECK(better.back().hybrid == 0.0);  // both end at 5.0
  CHECK(better.back().classic == 0.0);

  std::ostringstream csv;
  write_profile_csv(csv, cum);
  CHECK(csv.str().rfind("Time,Hybrid,Classic\n", 0) == 0);
  CHECK(cumulative_profile_name(20) == "20_cumulative_profile.csv");
  CHECK(performance_profile_name(20) == "20_performance_profile.csv");

  const std::vector<double> descending{2.0, 1.0};
  CHECK(kind_of([&] { cumulative_profile(runs, descending); }) == ErrorKind::input);
}

TEST_CASE("identical trajectories never make a winner") {
  std::vector<PairedRun> runs;
  for (int i = 0; i < 10; ++i) {
    const std::vector<TrajectoryPoint> tr{{0.01 * (i + 1), 9.0}, {0.5, 7.0 + i}};
    runs.push_back(pair(i, fake(Mode::classic, true, 1.0, tr), fake(Mode::gcbb, true, 1.0, tr)));
  }
  for (const auto& p : better_solution_profile(runs, log_grid(1e-3, 2.0))) {
    CHECK(p.hybrid == 0.0);
    CHECK(p.classic == 0.0);
  }
  runs[0].gcbb.incumbent_trajectory.clear();
  CHECK(kind_of([&] { better_solution_profile(runs, log_grid(1e-3, 2.0)); }) == ErrorKind::input);
}

TEST_CASE("an instant guided solve leads early") {
  std::vector<PairedRun> runs{pair(0, fake(Mode::classic, true, 3.0, {{0.01, 9.0}, {2.5, 6.0}}),
                                   fake(Mode::gcbb, true, 0.02, {{0.01, 6.0}}))};
  const auto prof = better_solution_profile(runs, log_grid(1e-3, 10.0));
  CHECK(prof.front().hybrid == 0.0);  // nothing yet at 1 ms
  bool led = false;
  for (const auto& p : prof) led |= p.time < 1.0 && p.hybrid == 1.0;
  CHECK(led);
  CHECK(prof.back().hybrid == 0.0);
}

TEST_CASE("wilcoxon examples") {
  const std::vector<double> zeros(30, 0.0);
  CHECK(kind_of([&] { wilcoxon_signed_rank(zeros); }) == ErrorKind::insufficient_data);
  const std::vector<double> nine{1, 2, 3, 4, 5, 6, 7, 8, 9, 0, 0};
  CHECK(kind_of([&] { wilcoxon_signed_rank(nine); }) == ErrorKind::insufficient_data);

  std::vector<double> pos;
  for (int i = 1; i <= 20; ++i) pos.push_back(0.5 * i);
  const double p = wilcoxon_signed_rank(pos);
  CHECK(p < 0.05);
  // W+ = 210, mean 105, variance 717.5
  CHECK(p == doctest::Approx(std::erfc((105.0 / std::sqrt(717.5)) / std::sqrt(2.0))).epsilon(1e-12));

  std::vector<double> sym;
  for (int i = 1; i <= 8; ++i) {
    sym.push_back(i * 0.75);
    sym.push_back(-i * 0.75);
  }
  CHECK(std::abs(wilcoxon_signed_rank(sym) - 1.0) <= 1e-9);
}

TEST_CASE("wilcoxon agrees with rank counting") {
  std::mt19937_64 rng(10);
  for (int trial = 0; trial < 200; ++trial) {
    const int n = 10 + static_cast<int>(rng() % 40);
    std::vector<double> d;
    for (int i = 0; i < n; ++i) {
      // small integer support forces ties and zeros
      d.push_back(static_cast<double>(static_cast<int>(rng() % 9) - 3));
    }
    std::size_t nonzero = 0;
    for (double x : d) nonzero += x != 0.0;
    if (nonzero < kWilcoxonMinPairs) continue;
    CHECK(std::abs(wilcoxon_signed_rank(d) - std::min(1.0, wilcoxon_reference(d))) <= 1e-9);
  }
}

TEST_CASE("report records round-trip") {
  const Instance inst = generate(9, 5);
  const ProbabilityMatrix p = oracle_matrix(inst);
  SolverConfig cfg;
  cfg.mode = Mode::gcbb;
  cfg.seed = 77;
  SolveReport r = solve(inst, &p, cfg);
  r.instance_index = 4;
  const SolveReport back = parse_record(to_record(r));
  CHECK(back.n == r.n);
  CHECK(back.mode == r.mode);
  CHECK(back.seed == 77);
  CHECK(back.instance_index == 4);
  CHECK(back.solved == r.solved);
  CHECK(back.optimum.order == r.optimum.order);
  CHECK(back.optimum.length == r.optimum.length);
  CHECK(back.total_time == r.total_time);
  CHECK(back.generated_nodes == r.generated_nodes);
  CHECK(back.nodes_before_opt == r.nodes_before_opt);
  CHECK(back.opt_score_normalized == r.opt_score_normalized);
  CHECK(back.incumbent_source == r.incumbent_source);
  CHECK(back.optimum_source == r.optimum_source);
  CHECK(back.root == r.root);
  REQUIRE(back.incumbent_trajectory.size() == r.incumbent_trajectory.size());
  CHECK(back.incumbent_trajectory.back().length == r.incumbent_trajectory.back().length);

  const std::string rec = to_record(r);
  for (const char* key : {"\"total_time\"", "\"bb_time\"", "\"time_to_best\"", "\"bb_tree_depth\"",
                          "\"depth_of_the_optimum\"", "\"generated_bb_nodes\"", "\"explored_bb_nodes\"",
                          "\"bb_nodes_before_optimum\"", "\"optimality_score\""}) {
    CHECK(rec.find(key) != std::string::npos);
  }
  CHECK(kind_of([] { parse_record("{\"n\": 3}"); }) == ErrorKind::parse);
}

TEST_CASE("pair_reports rebuilds pairs") {
  const auto runs = run_experiment(small_spec(3));
  std::vector<SolveReport> flat;
  for (const auto& r : runs) {
    flat.push_back(r.gcbb);
    flat.push_back(r.classic);
  }
  std::stringstream buf;
  write_records(buf, flat);
  const auto back = pair_reports(read_records(buf));
  REQUIRE(back.size() == 3);
  for (int i = 0; i < 3; ++i) {
    CHECK(back[i].index == i);
    CHECK(back[i].classic.mode == Mode::classic);
    CHECK(back[i].gcbb.generated_nodes == runs[i].gcbb.generated_nodes);
  }
  flat.pop_back();
  CHECK(kind_of([&] { pair_reports(flat); }) == ErrorKind::input);
}
