#include <doctest.h>

#include <cmath>
#include <cstring>
#include <random>
#include <sstream>

#include "gcbb/error.hpp"
#include "gcbb/instance.hpp"
#include "oracles.hpp"

using namespace gcbb;
using gcbb::testing::unit_square;

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

const char* kSquare =
    "NAME : square\n"
    "TYPE : TSP\n"
    "DIMENSION : 4\n"
    "EDGE_WEIGHT_TYPE : EUC_2D\n"
    "NODE_COORD_SECTION\n"
    "1 0 0\n"
    "2 1 0\n"
    "3 1 1\n"
    "4 0 1\n"
    "EOF\n";

}  // namespace

TEST_CASE("generate is deterministic and stays in the unit square") {
  const Instance a = generate(4, 99);
  const Instance b = generate(4, 99);
  REQUIRE(a.size() == 4);
  for (int i = 0; i < 4; ++i) {
    CHECK(a.coords()[i].x == b.coords()[i].x);
    CHECK(a.coords()[i].y == b.coords()[i].y);
  }
  const Instance big = generate(500, 3);
  for (const Point& p : big.coords()) {
    CHECK(p.x >= 0.0);
    CHECK(p.x <= 1.0);
    CHECK(p.y >= 0.0);
    CHECK(p.y <= 1.0);
  }
  CHECK(generate(4, 100).coords()[0].x != a.coords()[0].x);
}

TEST_CASE("generate rejects fewer than three vertices") {
  CHECK(kind_of([] { generate(2, 1); }) == ErrorKind::invalid_instance);
}

TEST_CASE("costs are symmetric exact distances") {
  const Instance inst = generate(30, 5);
  for (int i = 0; i < 30; ++i) {
    for (int j = 0; j < 30; ++j) {
      if (i == j) continue;
      CHECK(inst.cost(i, j) == inst.cost(j, i));
      const double dx = inst.coords()[i].x - inst.coords()[j].x;
      const double dy = inst.coords()[i].y - inst.coords()[j].y;
      CHECK(inst.cost(i, j) == doctest::Approx(std::sqrt(dx * dx + dy * dy)).epsilon(1e-15));
    }
  }
}

TEST_CASE("edge_index is the lexicographic rank") {
  const Instance inst = generate(7, 1);
  std::size_t k = 0;
  for (int u = 0; u < 7; ++u)
    for (int v = u + 1; v < 7; ++v) CHECK(inst.edge_index(Edge(v, u)) == k++);
  CHECK(k == inst.edge_count());
}

TEST_CASE("parse_tsplib reads the four-corner square") {
  std::istringstream in(kSquare);
  const Instance inst = parse_tsplib(in);
  REQUIRE(inst.size() == 4);
  CHECK(inst.name() == "square");
  CHECK(inst.cost(0, 1) == 1.0);
  CHECK(inst.cost(0, 2) == std::sqrt(2.0));
}

TEST_CASE("parse_tsplib errors name the problem") {
  SUBCASE("too few coordinate lines") {
    std::istringstream in("DIMENSION: 3\nEDGE_WEIGHT_TYPE: EUC_2D\nNODE_COORD_SECTION\n1 0 0\n2 1 0\nEOF\n");
    CHECK(kind_of([&] { parse_tsplib(in); }) == ErrorKind::parse);
  }
  SUBCASE("unsupported weight type") {
    std::istringstream in("DIMENSION: 3\nEDGE_WEIGHT_TYPE: GEO\nNODE_COORD_SECTION\n1 0 0\n2 1 0\n3 2 2\n");
    try {
      parse_tsplib(in);
      FAIL("no error");
    } catch (const Error& e) {
      CHECK(e.kind() == ErrorKind::parse);
      CHECK(std::string(e.what()).find("line 2") != std::string::npos);
      CHECK(std::string(e.what()).find("GEO") != std::string::npos);
    }
  }
  SUBCASE("non-numeric coordinate") {
    std::istringstream in("DIMENSION: 3\nEDGE_WEIGHT_TYPE: EUC_2D\nNODE_COORD_SECTION\n1 0 0\n2 x 0\n3 2 2\n");
    try {
      parse_tsplib(in);
      FAIL("no error");
    } catch (const Error& e) {
      CHECK(std::string(e.what()).find("line 5") != std::string::npos);
    }
  }
  SUBCASE("missing coordinate section") {
    std::istringstream in("DIMENSION: 3\nEDGE_WEIGHT_TYPE: EUC_2D\nEOF\n");
    CHECK(kind_of([&] { parse_tsplib(in); }) == ErrorKind::parse);
  }
  SUBCASE("missing weight type") {
    std::istringstream in("DIMENSION: 3\nNODE_COORD_SECTION\n1 0 0\n2 1 0\n3 2 2\n");
    CHECK(kind_of([&] { parse_tsplib(in); }) == ErrorKind::parse);
  }
}

TEST_CASE("parse_tsplib accepts coordinates outside the unit square") {
  std::istringstream in("DIMENSION : 3\nEDGE_WEIGHT_TYPE : EUC_2D\nNODE_COORD_SECTION\n1 -5 0\n2 10 0\n3 2.5e1 3\nEOF\n");
  const Instance inst = parse_tsplib(in);
  CHECK(inst.cost(0, 1) == 15.0);
  CHECK(inst.coords()[2].x == 25.0);
}

TEST_CASE("write/parse round-trips coordinates bit-exactly") {
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const Instance inst = generate(3 + static_cast<int>(seed % 17), seed);
    std::stringstream buf;
    write_tsplib(buf, inst);
    const Instance back = parse_tsplib(buf);
    REQUIRE(back.size() == inst.size());
    for (int i = 0; i < inst.size(); ++i) {
      CHECK(std::memcmp(&back.coords()[i], &inst.coords()[i], sizeof(Point)) == 0);
    }
  }
}

TEST_CASE("validate_tour on the square") {
  const Instance sq = unit_square();
  const Tour ring = make_tour(sq, {0, 1, 2, 3});
  CHECK(ring.length == 4.0);
  CHECK(validate_tour(sq, ring));

  const Tour crossed = make_tour(sq, {0, 2, 1, 3});
  CHECK(crossed.length == doctest::Approx(2.0 + 2.0 * std::sqrt(2.0)).epsilon(1e-15));
  CHECK(validate_tour(sq, crossed));

  CHECK_FALSE(validate_tour(sq, Tour{{0, 1, 1, 3}, 4.0}));
  CHECK_FALSE(validate_tour(sq, Tour{{0, 1, 2, 3}, 4.5}));
}

TEST_CASE("validate_tour accepts permutations and rejects mutations") {
  std::mt19937_64 rng(11);
  for (int trial = 0; trial < 200; ++trial) {
    const int n = 3 + static_cast<int>(rng() % 15);
    const Instance inst = generate(n, rng());
    std::vector<Vertex> order(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) order[i] = i;
    std::shuffle(order.begin(), order.end(), rng);
    const Tour t = make_tour(inst, order);
    REQUIRE(validate_tour(inst, t));

    // dropped vertex: one edge fewer, a degree-1 pair
    Tour dropped = t;
    dropped.order.pop_back();
    CHECK_FALSE(validate_tour(inst, dropped));

    // duplicated vertex
    Tour dup = t;
    dup.order[1] = dup.order[0];
    CHECK_FALSE(validate_tour(inst, dup));

    // two subtours written back to back: lengths disagree with the cycle
    if (n >= 6) {
      const std::vector<Vertex> a(order.begin(), order.begin() + 3);
      const std::vector<Vertex> b(order.begin() + 3, order.end());
      Tour split{order, tour_length(inst, a) + tour_length(inst, b)};
      if (std::abs(split.length - t.length) > 1e-9) CHECK_FALSE(validate_tour(inst, split));
    }

    Tour out_of_range = t;
    out_of_range.order[0] = n;
    CHECK_FALSE(validate_tour(inst, out_of_range));
  }
}

TEST_CASE("brute_force_optimum") {
  CHECK(brute_force_optimum(unit_square()).length == 4.0);

  const Instance tri({{0, 0}, {3, 0}, {0, 4}});
  const Tour t = brute_force_optimum(tri);
  CHECK(t.length == 12.0);
  CHECK(validate_tour(tri, t));

  CHECK(kind_of([] { brute_force_optimum(generate(13, 1)); }) == ErrorKind::oracle_size);
}

TEST_CASE("brute force is a lower bound on every tour") {
  std::mt19937_64 rng(5);
  for (int trial = 0; trial < 30; ++trial) {
    const int n = 4 + static_cast<int>(rng() % 5);
    const Instance inst = generate(n, rng());
    const Tour best = brute_force_optimum(inst);
    REQUIRE(validate_tour(inst, best));
    std::vector<Vertex> order(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) order[i] = i;
    for (int k = 0; k < 50; ++k) {
      std::shuffle(order.begin(), order.end(), rng);
      CHECK(best.length <= tour_length(inst, order) + 1e-12);
    }
  }
}
