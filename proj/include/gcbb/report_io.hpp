#pragma once

#include <istream>
#include <ostream>
#include <string>
#include <vector>

#include "gcbb/solver.hpp"

namespace gcbb {

// One flat JSON object per report. Metric fields use the snake_case metric
// names: total_time, bb_time, time_to_best, bb_tree_depth,
// depth_of_the_optimum, generated_bb_nodes, explored_bb_nodes,
// bb_nodes_before_optimum, optimality_score. Tour vertices are 1-based.
std::string to_record(const SolveReport& r);
SolveReport parse_record(const std::string& line);

// Newline-delimited records.
void write_records(std::ostream& out, const std::vector<SolveReport>& reports);
std::vector<SolveReport> read_records(std::istream& in);

}  // namespace gcbb
