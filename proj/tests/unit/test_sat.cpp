#include <doctest.h>

#include <random>
#include <sstream>

#include "oracles.hpp"
#include "phoenix/error.hpp"
#include "phoenix/sat.hpp"

using namespace phoenix;
using namespace phoenix::sat;

namespace {

Cnf random_cnf(std::mt19937_64& g, std::size_t vars, std::size_t clauses, std::size_t width) {
  Cnf c;
  c.variables = vars;
  for (std::size_t i = 0; i < clauses; ++i) {
    std::vector<Lit> cl;
    const auto w = 1 + g() % width;
    for (std::size_t k = 0; k < w; ++k) {
      const auto v = static_cast<Lit>(1 + g() % vars);
      cl.push_back((g() & 1u) ? v : -v);
    }
    c.add(cl);
  }
  return c;
}

}  // namespace

TEST_CASE("tiny instances") {
  Cnf unsat;
  const auto x = unsat.new_var();
  unsat.add({x});
  unsat.add({-x});
  CHECK_FALSE(solve(unsat).has_value());

  Cnf sat2;
  const auto a = sat2.new_var();
  const auto b = sat2.new_var();
  sat2.add({a, b});
  sat2.add({-a});
  const auto m = solve(sat2);
  REQUIRE(m.has_value());
  CHECK_FALSE((*m)[1]);
  CHECK((*m)[2]);

  Cnf empty;
  CHECK(solve(empty).has_value());
}

TEST_CASE("clause validation") {
  Cnf c;
  c.new_var();
  CHECK_THROWS_AS(c.add(std::vector<Lit>{}), ValidationError);
  CHECK_THROWS_AS(c.add({2}), ValidationError);
  CHECK_THROWS_AS(c.add({0}), ValidationError);
}

TEST_CASE("solver agrees with exhaustive search") {
  std::mt19937_64 g(17);
  std::size_t mismatches = 0;
  for (int it = 0; it < 600; ++it) {
    const std::size_t n = 1 + g() % 10;
    const auto cnf = random_cnf(g, n, 1 + g() % (5 * n), 3);
    const auto expected = oracle::brute_force_sat(cnf);
    const auto got = solve(cnf);
    mismatches += expected.has_value() != got.has_value();
    if (got) mismatches += !satisfies(cnf, *got);
  }
  CHECK(mismatches == 0);
}

TEST_CASE("pigeonhole 6 into 5 is unsatisfiable") {
  Cnf c;
  const int pigeons = 6;
  const int holes = 5;
  auto var = [&](int p, int h) { return p * holes + h + 1; };
  c.variables = static_cast<std::size_t>(pigeons * holes);
  for (int p = 0; p < pigeons; ++p) {
    std::vector<Lit> cl;
    for (int h = 0; h < holes; ++h) cl.push_back(var(p, h));
    c.add(cl);
  }
  for (int h = 0; h < holes; ++h) {
    for (int p = 0; p < pigeons; ++p) {
      for (int q = p + 1; q < pigeons; ++q) c.add({-var(p, h), -var(q, h)});
    }
  }
  Solver s(c);
  CHECK(s.solve() == Result::Unsat);
  CHECK(s.stats().conflicts > 0);
}

TEST_CASE("incremental clauses enumerate all models") {
  Cnf c;
  for (int i = 0; i < 4; ++i) c.new_var();
  c.add({1, 2});
  c.add({-3, 4});
  std::size_t expected = 0;
  for (int bits = 0; bits < 16; ++bits) {
    const bool x1 = bits & 1, x2 = bits & 2, x3 = bits & 4, x4 = bits & 8;
    expected += (x1 || x2) && (!x3 || x4);
  }
  Solver s(c);
  std::size_t found = 0;
  while (s.solve() == Result::Sat) {
    ++found;
    const auto m = s.model();
    CHECK(satisfies(c, m));
    std::vector<Lit> block;
    for (Lit v = 1; v <= 4; ++v) block.push_back(m[static_cast<std::size_t>(v)] ? -v : v);
    if (!s.add_clause(block)) break;
  }
  CHECK(found == expected);
}

TEST_CASE("deterministic models") {
  std::mt19937_64 g(4);
  const auto cnf = random_cnf(g, 40, 150, 3);
  CHECK(solve(cnf) == solve(cnf));
}

TEST_CASE("deadline in the past yields Unknown on a hard instance") {
  Cnf c;
  const int pigeons = 10;
  const int holes = 9;
  auto var = [&](int p, int h) { return p * holes + h + 1; };
  c.variables = static_cast<std::size_t>(pigeons * holes);
  for (int p = 0; p < pigeons; ++p) {
    std::vector<Lit> cl;
    for (int h = 0; h < holes; ++h) cl.push_back(var(p, h));
    c.add(cl);
  }
  for (int h = 0; h < holes; ++h) {
    for (int p = 0; p < pigeons; ++p) {
      for (int q = p + 1; q < pigeons; ++q) c.add({-var(p, h), -var(q, h)});
    }
  }
  Solver s(c);
  s.set_deadline(std::chrono::steady_clock::now());
  CHECK(s.solve() == Result::Unknown);
}

TEST_CASE("DIMACS round trip and errors") {
  std::mt19937_64 g(8);
  const auto cnf = random_cnf(g, 12, 30, 4);
  std::stringstream s;
  write_dimacs(s, cnf);
  const auto back = read_dimacs(s);
  CHECK(back.variables == cnf.variables);
  CHECK(back.clauses == cnf.clauses);

  std::istringstream ok("c comment\np cnf 2 2\n1 -2 0\n2 0\n");
  CHECK(read_dimacs(ok).clauses.size() == 2);
  std::istringstream no_header("1 2 0\n");
  CHECK_THROWS_AS(read_dimacs(no_header), ParseError);
  std::istringstream bad_count("p cnf 2 3\n1 0\n");
  CHECK_THROWS_AS(read_dimacs(bad_count), ParseError);
  std::istringstream open_clause("p cnf 2 1\n1 2\n");
  CHECK_THROWS_AS(read_dimacs(open_clause), ParseError);
}
