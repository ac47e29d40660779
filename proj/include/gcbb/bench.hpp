#pragma once

// Experiment harness: paired classic/gcbb runs over generated instances,
// aggregate tables with confidence intervals and paired significance, and
// the two time profiles (instances solved, instances with a better tour).

#include <cstdint>
#include <optional>
#include <ostream>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "gcbb/solver.hpp"

namespace gcbb::bench {

enum class SourceKind { file, oracle, noisy };

// Where gcbb runs get their probability matrix. For `file`, path is a
// directory holding <n>_<index>.prob for every generated instance.
struct ProbabilitySource {
  SourceKind kind = SourceKind::oracle;
  std::string path;
  double noise = 0.0;

  // "oracle", "noisy:<level>" or "file:<dir>".
  static ProbabilitySource parse(std::string_view text);
  std::string describe() const;
};

struct ExperimentSpec {
  std::vector<int> sizes;
  int count = 1;
  std::uint64_t seed_base = 0;
  double time_limit = 600.0;
  ProbabilitySource source;
  SolverConfig solver;  // mode and time limit are overridden per run
  int workers = 1;
};

struct PairedRun {
  int n = 0;
  int index = 0;
  std::uint64_t seed = 0;
  SolveReport classic;
  SolveReport gcbb;
};

std::uint64_t instance_seed(std::uint64_t base, int n, int index);
std::string prob_file_name(int n, int index);

// Results ordered by (size in spec order, index). Throws Error(config)
// before solving anything if a probability source cannot be resolved.
std::vector<PairedRun> run_experiment(const ExperimentSpec& spec);

struct Interval {
  double mean = 0.0;
  double half_width = 0.0;  // 1.96 * sd / sqrt(k)
};

Interval mean_interval(std::span<const double> values);

struct MetricRow {
  std::string name;
  std::optional<Interval> classic;  // nullopt renders as "-"
  std::optional<Interval> gcbb;
  std::optional<double> p_value;    // paired Wilcoxon, when computable
  bool significant = false;         // p < 0.05
  int better = 0;                   // -1 classic lower mean, +1 gcbb, 0 equal
};

struct AggregateTable {
  int n = 0;
  std::size_t instances = 0;
  std::size_t paired = 0;  // solved by both modes
  double solved_classic = 0.0;
  double solved_gcbb = 0.0;
  double with_nn_classic = 0.0;
  double with_nn_gcbb = 0.0;
  double with_pnn_gcbb = 0.0;  // classic has no PNN row
  std::vector<MetricRow> metrics;
};

// Means and intervals over the instances solved by both modes.
AggregateTable aggregate_table(std::span<const PairedRun> runs);
void write_table_csv(std::ostream& out, const AggregateTable& table);
std::string render_table(const AggregateTable& table);

struct ProfilePoint {
  double time = 0.0;
  double hybrid = 0.0;
  double classic = 0.0;
};

std::vector<double> log_grid(double lo, double hi, int points = 512);

// Fraction of instances proven optimal by time t.
std::vector<ProfilePoint> cumulative_profile(std::span<const PairedRun> runs, std::span<const double> grid,
                                             double margin = kDefaultPruneEps);
// Fraction of instances where a mode's incumbent at time t is strictly
// shorter than the other mode's.
std::vector<ProfilePoint> better_solution_profile(std::span<const PairedRun> runs,
                                                  std::span<const double> grid,
                                                  double margin = kDefaultPruneEps);

// Header is exactly "Time,Hybrid,Classic".
void write_profile_csv(std::ostream& out, std::span<const ProfilePoint> points);
std::string cumulative_profile_name(int n);
std::string performance_profile_name(int n);

// Two-sided p-value of the signed-rank test, normal approximation with tie
// correction, zero differences dropped. Needs >= 10 nonzero pairs.
double wilcoxon_signed_rank(std::span<const double> differences);
inline constexpr std::size_t kWilcoxonMinPairs = 10;

// Groups runs by size, preserving spec order.
std::vector<std::vector<PairedRun>> by_size(std::span<const PairedRun> runs);

// Rebuilds pairs from flat reports (matching on n and instance_index).
std::vector<PairedRun> pair_reports(std::span<const SolveReport> reports);

}  // namespace gcbb::bench
