#pragma once

#include <string>
#include <string_view>

namespace gcbb {

// classic: plain 1-tree branch and bound. gcbb: same search, with the edge
// probability matrix steering root choice, the initial tour, branching
// tie-breaks and open-node ordering.
enum class Mode { classic, gcbb };

inline std::string_view to_string(Mode m) { return m == Mode::classic ? "classic" : "gcbb"; }

}  // namespace gcbb
