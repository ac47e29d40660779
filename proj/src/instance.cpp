#include "gcbb/instance.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <limits>
#include <optional>
#include <sstream>

#include "gcbb/error.hpp"
#include "gcbb/kernels.hpp"
#include "gcbb/random.hpp"

namespace gcbb {

Instance::Instance(std::vector<Point> coords, std::string name)
    : n_(static_cast<int>(coords.size())), name_(std::move(name)), coords_(std::move(coords)) {
  if (n_ < 3) {
    throw Error(ErrorKind::invalid_instance,
                "need at least 3 vertices, got " + std::to_string(n_));
  }
  const std::size_t n = static_cast<std::size_t>(n_);
  std::vector<double> xs(n), ys(n);
  for (std::size_t i = 0; i < n; ++i) {
    xs[i] = coords_[i].x;
    ys[i] = coords_[i].y;
  }
  dist_.resize(n * n);
  const auto& k = kernels::active();
  for (std::size_t i = 0; i < n; ++i) {
    k.euclidean_row(xs.data(), ys.data(), xs[i], ys[i], dist_.data() + i * n, n);
  }
}

std::vector<Edge> Tour::edges() const {
  std::vector<Edge> out;
  out.reserve(order.size());
  for (std::size_t k = 0; k < order.size(); ++k) {
    out.emplace_back(order[k], order[(k + 1) % order.size()]);
  }
  return out;
}

double tour_length(const Instance& inst, std::span<const Vertex> order) {
  double total = 0.0;
  for (std::size_t k = 0; k < order.size(); ++k) {
    total += inst.cost(order[k], order[(k + 1) % order.size()]);
  }
  return total;
}

Tour make_tour(const Instance& inst, std::vector<Vertex> order) {
  Tour t;
  t.length = tour_length(inst, order);
  t.order = std::move(order);
  return t;
}

Instance generate(int n, std::uint64_t seed) {
  if (n < 3) {
    throw Error(ErrorKind::invalid_instance, "need at least 3 vertices, got " + std::to_string(n));
  }
  Rng rng(seed);
  std::vector<Point> pts(static_cast<std::size_t>(n));
  for (auto& p : pts) {
    p.x = rng.uniform01();
    p.y = rng.uniform01();
  }
  return Instance(std::move(pts), "rand" + std::to_string(n) + "_" + std::to_string(seed));
}

namespace {

std::string trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return std::string(s.substr(first, last - first + 1));
}

[[noreturn]] void parse_fail(int line, const std::string& msg) {
  throw Error(ErrorKind::parse, "line " + std::to_string(line) + ": " + msg);
}

template <typename T>
std::optional<T> parse_number(std::string_view token) {
  T value{};
  if (!token.empty() && token.front() == '+') token.remove_prefix(1);
  const auto [ptr, ec] = std::from_chars(token.data(), token.data() + token.size(), value);
  if (ec != std::errc() || ptr != token.data() + token.size()) return std::nullopt;
  return value;
}

std::vector<std::string_view> split_ws(std::string_view s) {
  std::vector<std::string_view> out;
  std::size_t i = 0;
  while (i < s.size()) {
    while (i < s.size() && (s[i] == ' ' || s[i] == '\t' || s[i] == '\r')) ++i;
    std::size_t j = i;
    while (j < s.size() && s[j] != ' ' && s[j] != '\t' && s[j] != '\r') ++j;
    if (j > i) out.push_back(s.substr(i, j - i));
    i = j;
  }
  return out;
}

std::string format_double(double v) {
  char buf[64];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, ptr);
}

}  // namespace

Instance parse_tsplib(std::istream& in) {
  std::string name;
  std::optional<int> dimension;
  std::optional<std::string> weight_type;
  std::vector<std::optional<Point>> coords;
  bool in_coords = false;
  bool saw_coords = false;
  int coord_lines = 0;
  int line_no = 0;
  int coord_start = 0;
  std::string raw;

  while (std::getline(in, raw)) {
    ++line_no;
    const std::string line = trim(raw);
    if (line.empty()) continue;
    if (line == "EOF") break;

    if (in_coords) {
      const auto tok = split_ws(line);
      const bool numeric_start = !tok.empty() && parse_number<long>(tok[0]).has_value();
      if (numeric_start) {
        if (tok.size() != 3) parse_fail(line_no, "expected 'index x y'");
        const auto idx = parse_number<long>(tok[0]);
        const auto x = parse_number<double>(tok[1]);
        const auto y = parse_number<double>(tok[2]);
        if (!x || !y) parse_fail(line_no, "non-numeric coordinate");
        if (*idx < 1 || *idx > *dimension) parse_fail(line_no, "vertex index out of range");
        auto& slot = coords[static_cast<std::size_t>(*idx - 1)];
        if (slot) parse_fail(line_no, "duplicate vertex index " + std::to_string(*idx));
        slot = Point{*x, *y};
        ++coord_lines;
        continue;
      }
      in_coords = false;
    }

    const auto colon = line.find(':');
    const std::string key = trim(line.substr(0, colon));
    const std::string value = colon == std::string::npos ? std::string() : trim(line.substr(colon + 1));

    if (key == "NAME") {
      name = value;
    } else if (key == "TYPE") {
      if (value != "TSP") parse_fail(line_no, "unsupported TYPE '" + value + "'");
    } else if (key == "COMMENT") {
    } else if (key == "DIMENSION") {
      const auto d = parse_number<int>(value);
      if (!d || *d < 3) parse_fail(line_no, "invalid DIMENSION '" + value + "'");
      dimension = *d;
    } else if (key == "EDGE_WEIGHT_TYPE") {
      if (value != "EUC_2D") parse_fail(line_no, "unsupported EDGE_WEIGHT_TYPE '" + value + "'");
      weight_type = value;
    } else if (key == "NODE_COORD_SECTION") {
      if (!dimension) parse_fail(line_no, "NODE_COORD_SECTION before DIMENSION");
      if (saw_coords) parse_fail(line_no, "repeated NODE_COORD_SECTION");
      coords.assign(static_cast<std::size_t>(*dimension), std::nullopt);
      in_coords = true;
      saw_coords = true;
      coord_start = line_no;
    } else {
      parse_fail(line_no, "unexpected line '" + line + "'");
    }
  }

  if (!dimension) parse_fail(line_no, "missing DIMENSION");
  if (!weight_type) parse_fail(line_no, "missing EDGE_WEIGHT_TYPE");
  if (!saw_coords) parse_fail(line_no, "missing NODE_COORD_SECTION");
  if (coord_lines != *dimension) {
    parse_fail(coord_start, "DIMENSION is " + std::to_string(*dimension) + " but " +
                                std::to_string(coord_lines) + " coordinate lines follow");
  }
  std::vector<Point> pts;
  pts.reserve(coords.size());
  for (const auto& c : coords) pts.push_back(*c);
  return Instance(std::move(pts), name);
}

Instance parse_tsplib_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::input, "cannot open '" + path + "'");
  return parse_tsplib(in);
}

void write_tsplib(std::ostream& out, const Instance& inst) {
  out << "NAME : " << (inst.name().empty() ? "unnamed" : inst.name()) << '\n'
      << "TYPE : TSP\n"
      << "DIMENSION : " << inst.size() << '\n'
      << "EDGE_WEIGHT_TYPE : EUC_2D\n"
      << "NODE_COORD_SECTION\n";
  const auto pts = inst.coords();
  for (std::size_t i = 0; i < pts.size(); ++i) {
    out << (i + 1) << ' ' << format_double(pts[i].x) << ' ' << format_double(pts[i].y) << '\n';
  }
  out << "EOF\n";
}

bool validate_tour(const Instance& inst, const Tour& tour) {
  const int n = inst.size();
  if (static_cast<int>(tour.order.size()) != n) return false;
  std::vector<char> seen(static_cast<std::size_t>(n), 0);
  for (const Vertex v : tour.order) {
    if (v < 0 || v >= n || seen[static_cast<std::size_t>(v)]) return false;
    seen[static_cast<std::size_t>(v)] = 1;
  }
  // A permutation closes into exactly n edges, each vertex degree 2, one
  // cycle; only the recorded length remains to be checked.
  return std::abs(tour_length(inst, tour.order) - tour.length) <= 1e-9;
}

namespace {

struct BruteForce {
  const Instance& inst;
  int n;
  std::vector<Vertex> path;
  std::vector<char> used;
  std::vector<Vertex> best_order;
  double best = std::numeric_limits<double>::infinity();

  void extend(double partial) {
    if (static_cast<int>(path.size()) == n) {
      const double total = partial + inst.cost(path.back(), path.front());
      if (total < best) {
        best = total;
        best_order = path;
      }
      return;
    }
    for (Vertex v = 1; v < n; ++v) {
      if (used[static_cast<std::size_t>(v)]) continue;
      used[static_cast<std::size_t>(v)] = 1;
      const double next = partial + inst.cost(path.back(), v);
      path.push_back(v);
      extend(next);
      path.pop_back();
      used[static_cast<std::size_t>(v)] = 0;
    }
  }
};

}  // namespace

Tour brute_force_optimum(const Instance& inst) {
  if (inst.size() > kBruteForceMaxN) {
    throw Error(ErrorKind::oracle_size, "brute force limited to n <= " +
                                            std::to_string(kBruteForceMaxN) + ", got " +
                                            std::to_string(inst.size()));
  }
  BruteForce bf{inst, inst.size(), {0}, std::vector<char>(static_cast<std::size_t>(inst.size()), 0),
                {}, std::numeric_limits<double>::infinity()};
  bf.used[0] = 1;
  bf.extend(0.0);
  return make_tour(inst, std::move(bf.best_order));
}

}  // namespace gcbb
