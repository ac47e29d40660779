#include "gcbb/bench.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <exception>
#include <filesystem>
#include <functional>
#include <map>
#include <mutex>
#include <sstream>
#include <thread>

#include "gcbb/error.hpp"
#include "gcbb/random.hpp"

namespace gcbb::bench {

namespace {

constexpr double kZ95 = 1.96;
constexpr double kAlpha = 0.05;

double parse_double(std::string_view s, const char* what) {
  try {
    std::size_t used = 0;
    const std::string str(s);
    const double v = std::stod(str, &used);
    if (used != str.size()) throw std::invalid_argument(what);
    return v;
  } catch (const std::exception&) {
    throw Error(ErrorKind::config, std::string("bad ") + what + " '" + std::string(s) + "'");
  }
}

std::string fmt(double v, int prec) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", prec, v);
  return buf;
}

std::string fmt_g(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

}  // namespace

// ---------------------------------------------------------------------------
// Probability sources

ProbabilitySource ProbabilitySource::parse(std::string_view text) {
  ProbabilitySource s;
  if (text == "oracle") {
    s.kind = SourceKind::oracle;
  } else if (text.rfind("noisy:", 0) == 0) {
    s.kind = SourceKind::noisy;
    s.noise = parse_double(text.substr(6), "noise level");
    if (!(s.noise >= 0.0 && s.noise <= 0.5)) throw Error(ErrorKind::config, "noise level must be in [0, 0.5]");
  } else if (text.rfind("file:", 0) == 0) {
    s.kind = SourceKind::file;
    s.path = std::string(text.substr(5));
  } else {
    throw Error(ErrorKind::config, "unknown probability source '" + std::string(text) + "'");
  }
  return s;
}

std::string ProbabilitySource::describe() const {
  switch (kind) {
    case SourceKind::oracle: return "oracle";
    case SourceKind::noisy: return "noisy:" + fmt_g(noise);
    case SourceKind::file: return "file:" + path;
  }
  return "?";
}

std::uint64_t instance_seed(std::uint64_t base, int n, int index) {
  return derive_seed(base, static_cast<std::uint64_t>(n), static_cast<std::uint64_t>(index));
}

std::string prob_file_name(int n, int index) {
  return std::to_string(n) + "_" + std::to_string(index) + ".prob";
}

// ---------------------------------------------------------------------------
// run_experiment

namespace {

void check_spec(const ExperimentSpec& spec) {
  if (spec.sizes.empty()) throw Error(ErrorKind::config, "no instance sizes");
  if (spec.count < 1) throw Error(ErrorKind::config, "count must be >= 1");
  if (!(spec.time_limit > 0.0)) throw Error(ErrorKind::config, "time limit must be positive");
  for (int n : spec.sizes) {
    if (n < 3) throw Error(ErrorKind::config, "instance size must be >= 3, got " + std::to_string(n));
    if (spec.source.kind != SourceKind::file && n > kBruteForceMaxN) {
      throw Error(ErrorKind::config, "oracle probabilities need n <= " + std::to_string(kBruteForceMaxN) +
                                         ", got " + std::to_string(n));
    }
  }
  if (spec.source.kind == SourceKind::file) {
    namespace fs = std::filesystem;
    for (int n : spec.sizes) {
      for (int i = 0; i < spec.count; ++i) {
        const fs::path p = fs::path(spec.source.path) / prob_file_name(n, i);
        if (!fs::is_regular_file(p)) throw Error(ErrorKind::config, "missing probability file " + p.string());
      }
    }
  }
}

ProbabilityMatrix acquire(const ProbabilitySource& src, const Instance& inst, int n, int index,
                          std::uint64_t seed) {
  switch (src.kind) {
    case SourceKind::oracle: return oracle_matrix(inst);
    case SourceKind::noisy: return noisy_oracle_matrix(inst, src.noise, derive_seed(seed, 0x6e6f697379ULL));
    case SourceKind::file:
      return load_matrix_file((std::filesystem::path(src.path) / prob_file_name(n, index)).string());
  }
  throw Error(ErrorKind::config, "unknown probability source");
}

PairedRun run_one(const ExperimentSpec& spec, int n, int index) {
  PairedRun run;
  run.n = n;
  run.index = index;
  run.seed = instance_seed(spec.seed_base, n, index);
  const Instance inst = generate(n, run.seed);

  SolverConfig cfg = spec.solver;
  cfg.time_limit = spec.time_limit;
  cfg.seed = run.seed;

  cfg.mode = Mode::classic;
  run.classic = solve(inst, nullptr, cfg);

  const auto t0 = std::chrono::steady_clock::now();
  const ProbabilityMatrix probs = acquire(spec.source, inst, n, index, run.seed);
  const double overhead = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  if (probs.size() != n) {
    throw Error(ErrorKind::input, "probability file for instance " + std::to_string(index) + " has dimension " +
                                      std::to_string(probs.size()) + ", expected " + std::to_string(n));
  }
  cfg.mode = Mode::gcbb;
  run.gcbb = solve(inst, &probs, cfg);
  // Obtaining P counts against the guided solver, as inference would.
  run.gcbb.total_time += overhead;
  for (auto& p : run.gcbb.incumbent_trajectory) p.time += overhead;
  if (run.gcbb.total_time > spec.time_limit) run.gcbb.solved = false;

  run.classic.instance_index = run.gcbb.instance_index = index;
  return run;
}

}  // namespace

std::vector<PairedRun> run_experiment(const ExperimentSpec& spec) {
  check_spec(spec);
  std::vector<std::pair<int, int>> jobs;
  for (int n : spec.sizes)
    for (int i = 0; i < spec.count; ++i) jobs.emplace_back(n, i);

  std::vector<PairedRun> results(jobs.size());
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  const auto work = [&] {
    for (;;) {
      const std::size_t k = next.fetch_add(1);
      if (k >= jobs.size()) return;
      try {
        results[k] = run_one(spec, jobs[k].first, jobs[k].second);
      } catch (...) {
        std::lock_guard<std::mutex> lock(failure_mutex);
        if (!failure) failure = std::current_exception();
        next.store(jobs.size());
      }
    }
  };
  const int workers = std::clamp(spec.workers, 1, static_cast<int>(std::max<std::size_t>(jobs.size(), 1)));
  if (workers == 1) {
    work();
  } else {
    std::vector<std::thread> pool;
    for (int w = 0; w < workers; ++w) pool.emplace_back(work);
    for (auto& t : pool) t.join();
  }
  if (failure) std::rethrow_exception(failure);
  return results;
}

// ---------------------------------------------------------------------------
// Aggregation

Interval mean_interval(std::span<const double> values) {
  Interval out;
  if (values.empty()) return out;
  const auto k = static_cast<double>(values.size());
  if (std::all_of(values.begin(), values.end(), [&](double v) { return v == values.front(); })) {
    out.mean = values.front();
    return out;
  }
  double sum = 0.0;
  for (double v : values) sum += v;
  out.mean = sum / k;
  if (values.size() < 2) return out;
  double ss = 0.0;
  for (double v : values) ss += (v - out.mean) * (v - out.mean);
  out.half_width = kZ95 * std::sqrt(ss / (k - 1.0)) / std::sqrt(k);
  return out;
}

namespace {

struct MetricDef {
  const char* name;
  std::function<double(const SolveReport&)> get;
  bool classic_defined;
};

const std::vector<MetricDef>& metric_defs() {
  static const std::vector<MetricDef> defs = {
      {"total_time", [](const SolveReport& r) { return r.total_time; }, true},
      {"bb_time", [](const SolveReport& r) { return r.bb_time; }, true},
      {"time_to_best", [](const SolveReport& r) { return r.time_to_best; }, true},
      {"bb_tree_depth", [](const SolveReport& r) { return static_cast<double>(r.tree_depth); }, true},
      {"depth_of_the_optimum", [](const SolveReport& r) { return static_cast<double>(r.opt_depth); }, true},
      {"generated_bb_nodes", [](const SolveReport& r) { return static_cast<double>(r.generated_nodes); }, true},
      {"explored_bb_nodes", [](const SolveReport& r) { return static_cast<double>(r.explored_nodes); }, true},
      {"bb_nodes_before_optimum", [](const SolveReport& r) { return static_cast<double>(r.nodes_before_opt); },
       true},
      {"optimality_score", [](const SolveReport& r) { return r.opt_score_normalized.value_or(0.0); }, false},
  };
  return defs;
}

double fraction(std::size_t num, std::size_t den) {
  return den == 0 ? 0.0 : static_cast<double>(num) / static_cast<double>(den);
}

}  // namespace

AggregateTable aggregate_table(std::span<const PairedRun> runs) {
  std::vector<const PairedRun*> paired;
  std::size_t solved_c = 0, solved_g = 0;
  for (const auto& r : runs) {
    solved_c += r.classic.solved;
    solved_g += r.gcbb.solved;
    if (r.classic.solved && r.gcbb.solved) paired.push_back(&r);
  }
  if (paired.empty()) throw Error(ErrorKind::empty_table, "no instance was solved by both modes");

  AggregateTable t;
  t.n = runs.front().n;
  t.instances = runs.size();
  t.paired = paired.size();
  t.solved_classic = 100.0 * fraction(solved_c, runs.size());
  t.solved_gcbb = 100.0 * fraction(solved_g, runs.size());
  std::size_t nn_c = 0, nn_g = 0, pnn_g = 0;
  for (const PairedRun* r : paired) {
    nn_c += r->classic.optimum_source == TourSource::nn;
    nn_g += r->gcbb.optimum_source == TourSource::nn;
    pnn_g += r->gcbb.optimum_source == TourSource::pnn;
  }
  t.with_nn_classic = 100.0 * fraction(nn_c, paired.size());
  t.with_nn_gcbb = 100.0 * fraction(nn_g, paired.size());
  t.with_pnn_gcbb = 100.0 * fraction(pnn_g, paired.size());

  for (const MetricDef& def : metric_defs()) {
    MetricRow row;
    row.name = def.name;
    std::vector<double> c, g, d;
    for (const PairedRun* r : paired) {
      c.push_back(def.get(r->classic));
      g.push_back(def.get(r->gcbb));
      d.push_back(c.back() - g.back());
    }
    row.gcbb = mean_interval(g);
    if (def.classic_defined) {
      row.classic = mean_interval(c);
      if (row.classic->mean != row.gcbb->mean) row.better = row.classic->mean < row.gcbb->mean ? -1 : 1;
      try {
        row.p_value = wilcoxon_signed_rank(d);
        row.significant = *row.p_value < kAlpha;
      } catch (const Error& e) {
        if (e.kind() != ErrorKind::insufficient_data) throw;
      }
    }
    t.metrics.push_back(std::move(row));
  }
  return t;
}

void write_table_csv(std::ostream& out, const AggregateTable& t) {
  out << "# ci: mean +- 1.96*sd/sqrt(k) (normal approximation, 95%); significance: paired two-sided "
         "Wilcoxon signed-rank, normal approximation with tie correction, alpha=0.05\n";
  out << "n,metric,classic_mean,classic_half_width,gcbb_mean,gcbb_half_width,better,p_value,significant\n";
  const auto pct = [&](const char* name, std::optional<double> c, double g) {
    out << t.n << ',' << name << ',' << (c ? fmt_g(*c) : "-") << ",," << fmt_g(g) << ",,,,\n";
  };
  pct("instances_solved_pct", t.solved_classic, t.solved_gcbb);
  pct("with_nn_pct", t.with_nn_classic, t.with_nn_gcbb);
  pct("with_pnn_pct", std::nullopt, t.with_pnn_gcbb);
  for (const auto& row : t.metrics) {
    out << t.n << ',' << row.name << ',';
    if (row.classic) {
      out << fmt_g(row.classic->mean) << ',' << fmt_g(row.classic->half_width);
    } else {
      out << "-,";
    }
    out << ',' << fmt_g(row.gcbb->mean) << ',' << fmt_g(row.gcbb->half_width) << ',';
    out << (row.better < 0 ? "classic" : row.better > 0 ? "gcbb" : "") << ',';
    out << (row.p_value ? fmt_g(*row.p_value) : "") << ',' << (row.significant ? 1 : 0) << '\n';
  }
}

std::string render_table(const AggregateTable& t) {
  std::ostringstream out;
  char line[256];
  out << "n = " << t.n << "  (" << t.paired << " of " << t.instances << " instances solved by both)\n";
  std::snprintf(line, sizeof line, "%-26s %24s %24s\n", "", "BB", "GCBB");
  out << line;
  const auto pct_row = [&](const char* name, std::optional<double> c, double g) {
    std::snprintf(line, sizeof line, "%-26s %24s %24s\n", name, c ? (fmt(*c, 1) + "%").c_str() : "-",
                  (fmt(g, 1) + "%").c_str());
    out << line;
  };
  pct_row("Instances solved", t.solved_classic, t.solved_gcbb);
  pct_row("  with NN", t.with_nn_classic, t.with_nn_gcbb);
  pct_row("  with PNN", std::nullopt, t.with_pnn_gcbb);
  for (const auto& row : t.metrics) {
    const auto cell = [&](const std::optional<Interval>& iv, bool lead) {
      if (!iv) return std::string("-");
      const int prec = row.name.find("time") != std::string::npos ? 4 : 2;
      std::string s = fmt(iv->mean, prec) + " +- " + fmt(iv->half_width, prec);
      if (lead) s += row.significant ? " *_" : " *";
      return s;
    };
    std::snprintf(line, sizeof line, "%-26s %24s %24s\n", row.name.c_str(), cell(row.classic, row.better < 0).c_str(),
                  cell(row.gcbb, row.better > 0).c_str());
    out << line;
  }
  out << "(* lower mean; _ difference significant at 5%, paired Wilcoxon signed-rank; +- is a 95% normal CI)\n";
  return out.str();
}

// ---------------------------------------------------------------------------
// Profiles

std::vector<double> log_grid(double lo, double hi, int points) {
  if (!(lo > 0.0) || !(hi > lo) || points < 2) throw Error(ErrorKind::config, "bad profile grid");
  std::vector<double> g(static_cast<std::size_t>(points));
  const double a = std::log(lo);
  const double b = std::log(hi);
  for (int i = 0; i < points; ++i) g[static_cast<std::size_t>(i)] = std::exp(a + (b - a) * i / (points - 1));
  g.front() = lo;
  g.back() = hi;
  return g;
}

namespace {

void check_grid(std::span<const double> grid) {
  if (!std::is_sorted(grid.begin(), grid.end())) throw Error(ErrorKind::input, "profile grid must be ascending");
}

double incumbent_at(const SolveReport& r, double t) {
  double best = std::numeric_limits<double>::infinity();
  for (const auto& p : r.incumbent_trajectory) {
    if (p.time > t) break;
    best = p.length;
  }
  return best;
}

}  // namespace

std::vector<ProfilePoint> cumulative_profile(std::span<const PairedRun> runs, std::span<const double> grid,
                                             double) {
  check_grid(grid);
  std::vector<ProfilePoint> out;
  out.reserve(grid.size());
  for (double t : grid) {
    std::size_t h = 0, c = 0;
    for (const auto& r : runs) {
      h += r.gcbb.solved && r.gcbb.total_time <= t;
      c += r.classic.solved && r.classic.total_time <= t;
    }
    out.push_back({t, fraction(h, runs.size()), fraction(c, runs.size())});
  }
  return out;
}

std::vector<ProfilePoint> better_solution_profile(std::span<const PairedRun> runs, std::span<const double> grid,
                                                  double margin) {
  check_grid(grid);
  for (const auto& r : runs) {
    if (r.classic.incumbent_trajectory.empty() || r.gcbb.incumbent_trajectory.empty()) {
      throw Error(ErrorKind::input, "report without incumbent trajectory (instance " + std::to_string(r.index) + ")");
    }
  }
  std::vector<ProfilePoint> out;
  out.reserve(grid.size());
  for (double t : grid) {
    std::size_t h = 0, c = 0;
    for (const auto& r : runs) {
      const double lh = incumbent_at(r.gcbb, t);
      const double lc = incumbent_at(r.classic, t);
      h += lh < lc - margin;
      c += lc < lh - margin;
    }
    out.push_back({t, fraction(h, runs.size()), fraction(c, runs.size())});
  }
  return out;
}

void write_profile_csv(std::ostream& out, std::span<const ProfilePoint> points) {
  out << "Time,Hybrid,Classic\n";
  for (const auto& p : points) out << fmt_g(p.time) << ',' << fmt_g(p.hybrid) << ',' << fmt_g(p.classic) << '\n';
}

std::string cumulative_profile_name(int n) { return std::to_string(n) + "_cumulative_profile.csv"; }
std::string performance_profile_name(int n) { return std::to_string(n) + "_performance_profile.csv"; }

// ---------------------------------------------------------------------------
// Wilcoxon signed-rank

double wilcoxon_signed_rank(std::span<const double> differences) {
  std::vector<double> d;
  for (double x : differences)
    if (x != 0.0) d.push_back(x);
  if (d.size() < kWilcoxonMinPairs) {
    throw Error(ErrorKind::insufficient_data, std::to_string(d.size()) + " nonzero pairs, need " +
                                                  std::to_string(kWilcoxonMinPairs));
  }
  const std::size_t n = d.size();
  std::vector<std::size_t> order(n);
  for (std::size_t i = 0; i < n; ++i) order[i] = i;
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return std::abs(d[a]) < std::abs(d[b]); });

  double w_plus = 0.0;
  double tie_term = 0.0;
  for (std::size_t i = 0; i < n;) {
    std::size_t j = i;
    while (j + 1 < n && std::abs(d[order[j + 1]]) == std::abs(d[order[i]])) ++j;
    const double rank = 0.5 * static_cast<double>(i + 1 + j + 1);
    const auto t = static_cast<double>(j - i + 1);
    tie_term += t * t * t - t;
    for (std::size_t k = i; k <= j; ++k)
      if (d[order[k]] > 0.0) w_plus += rank;
    i = j + 1;
  }
  const auto nn = static_cast<double>(n);
  const double mean = nn * (nn + 1.0) / 4.0;
  const double var = nn * (nn + 1.0) * (2.0 * nn + 1.0) / 24.0 - tie_term / 48.0;
  if (!(var > 0.0)) return 1.0;
  const double z = (w_plus - mean) / std::sqrt(var);
  return std::min(1.0, std::erfc(std::abs(z) / std::sqrt(2.0)));
}

// ---------------------------------------------------------------------------

std::vector<std::vector<PairedRun>> by_size(std::span<const PairedRun> runs) {
  std::vector<std::vector<PairedRun>> groups;
  std::map<int, std::size_t> slot;
  for (const auto& r : runs) {
    auto [it, fresh] = slot.emplace(r.n, groups.size());
    if (fresh) groups.emplace_back();
    groups[it->second].push_back(r);
  }
  return groups;
}

std::vector<PairedRun> pair_reports(std::span<const SolveReport> reports) {
  std::map<std::pair<int, int>, PairedRun> pairs;
  std::map<std::pair<int, int>, int> seen;
  for (const auto& r : reports) {
    const auto key = std::make_pair(r.n, r.instance_index);
    PairedRun& p = pairs[key];
    p.n = r.n;
    p.index = r.instance_index;
    p.seed = r.seed;
    (r.mode == Mode::classic ? p.classic : p.gcbb) = r;
    seen[key] |= r.mode == Mode::classic ? 1 : 2;
  }
  std::vector<PairedRun> out;
  for (auto& [key, p] : pairs) {
    if (seen[key] != 3) {
      throw Error(ErrorKind::input, "instance " + std::to_string(key.second) + " (n=" + std::to_string(key.first) +
                                        ") lacks a classic or gcbb report");
    }
    out.push_back(std::move(p));
  }
  return out;
}

}  // namespace gcbb::bench
