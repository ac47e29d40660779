#include "gcbb/report_io.hpp"

#include <json.hpp>

#include "gcbb/error.hpp"

namespace gcbb {

using nlohmann::json;

namespace {

TourSource source_from(const std::string& s) {
  if (s == "NN") return TourSource::nn;
  if (s == "PNN") return TourSource::pnn;
  if (s == "BB") return TourSource::bb;
  throw Error(ErrorKind::parse, "unknown tour source '" + s + "'");
}

Mode mode_from(const std::string& s) {
  if (s == "classic") return Mode::classic;
  if (s == "gcbb") return Mode::gcbb;
  throw Error(ErrorKind::parse, "unknown mode '" + s + "'");
}

}  // namespace

std::string to_record(const SolveReport& r) {
  json j;
  j["n"] = r.n;
  j["instance_index"] = r.instance_index;
  j["seed"] = r.seed;
  j["mode"] = std::string(to_string(r.mode));
  j["solved"] = r.solved;
  j["optimum_length"] = r.optimum.length;
  std::vector<int> tour;
  tour.reserve(r.optimum.order.size());
  for (Vertex v : r.optimum.order) tour.push_back(v + 1);
  j["tour"] = tour;
  j["total_time"] = r.total_time;
  j["bb_time"] = r.bb_time;
  j["time_to_best"] = r.time_to_best;
  j["bb_tree_depth"] = r.tree_depth;
  j["depth_of_the_optimum"] = r.opt_depth;
  j["generated_bb_nodes"] = r.generated_nodes;
  j["explored_bb_nodes"] = r.explored_nodes;
  j["bb_nodes_before_optimum"] = r.nodes_before_opt;
  j["optimality_score"] = r.opt_score_normalized ? json(*r.opt_score_normalized) : json(nullptr);
  j["incumbent_source"] = std::string(to_string(r.incumbent_source));
  j["optimum_source"] = std::string(to_string(r.optimum_source));
  json traj = json::array();
  for (const auto& p : r.incumbent_trajectory) traj.push_back({p.time, p.length});
  j["incumbent_trajectory"] = traj;
  j["root"] = r.root + 1;
  j["root_lb"] = r.root_lb;
  j["tie_eps"] = r.tie_eps;
  return j.dump();
}

SolveReport parse_record(const std::string& line) {
  SolveReport r;
  try {
    const json j = json::parse(line);
    r.n = j.at("n").get<int>();
    r.instance_index = j.value("instance_index", 0);
    r.seed = j.at("seed").get<std::uint64_t>();
    r.mode = mode_from(j.at("mode").get<std::string>());
    r.solved = j.at("solved").get<bool>();
    for (int v : j.at("tour").get<std::vector<int>>()) r.optimum.order.push_back(v - 1);
    r.optimum.length = j.at("optimum_length").get<double>();
    r.total_time = j.at("total_time").get<double>();
    r.bb_time = j.at("bb_time").get<double>();
    r.time_to_best = j.at("time_to_best").get<double>();
    r.tree_depth = j.at("bb_tree_depth").get<int>();
    r.opt_depth = j.at("depth_of_the_optimum").get<int>();
    r.generated_nodes = j.at("generated_bb_nodes").get<std::uint64_t>();
    r.explored_nodes = j.at("explored_bb_nodes").get<std::uint64_t>();
    r.nodes_before_opt = j.at("bb_nodes_before_optimum").get<std::uint64_t>();
    if (!j.at("optimality_score").is_null()) r.opt_score_normalized = j["optimality_score"].get<double>();
    r.incumbent_source = source_from(j.at("incumbent_source").get<std::string>());
    r.optimum_source = source_from(j.at("optimum_source").get<std::string>());
    for (const auto& p : j.at("incumbent_trajectory")) {
      r.incumbent_trajectory.push_back({p.at(0).get<double>(), p.at(1).get<double>()});
    }
    r.root = j.value("root", 1) - 1;
    r.root_lb = j.value("root_lb", 0.0);
    r.tie_eps = j.value("tie_eps", 0.0);
  } catch (const json::exception& e) {
    throw Error(ErrorKind::parse, std::string("bad report record: ") + e.what());
  }
  return r;
}

void write_records(std::ostream& out, const std::vector<SolveReport>& reports) {
  for (const auto& r : reports) out << to_record(r) << '\n';
}

std::vector<SolveReport> read_records(std::istream& in) {
  std::vector<SolveReport> out;
  std::string line;
  while (std::getline(in, line)) {
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    out.push_back(parse_record(line));
  }
  return out;
}

}  // namespace gcbb
