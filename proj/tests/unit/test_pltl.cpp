#include <doctest.h>

#include <random>

#include "oracles.hpp"
#include "phoenix/error.hpp"
#include "phoenix/pltl.hpp"
#include "phoenix/traces.hpp"

using namespace phoenix;
using namespace phoenix::pltl;

namespace {

Alphabet ab() { return Alphabet(std::vector<std::string>{"a", "b"}); }

Trace trace_of(std::vector<std::vector<int>> rows) {
  Trace t;
  for (const auto& r : rows) {
    State s(r.size());
    for (std::size_t i = 0; i < r.size(); ++i) s.set(i, r[i] != 0);
    t.states.push_back(s);
  }
  return t;
}

const char* kRlf =
    "(imp (prop ueInformationRequest) (S (not (prop rrcConnectionRequest)) (prop securityModeComplete)))";

Formula random_formula(std::mt19937_64& g, std::size_t budget, std::size_t props) {
  if (budget <= 1) {
    const auto k = g() % (props + 2);
    if (k == 0) return Formula::truth();
    if (k == 1) return Formula::falsity();
    return Formula::prop(k - 2);
  }
  switch (g() % 7) {
    case 0: return Formula::negation(random_formula(g, budget - 1, props));
    case 1: return Formula::yesterday(random_formula(g, budget - 1, props));
    case 2: return Formula::once(random_formula(g, budget - 1, props));
    case 3: return Formula::historically(random_formula(g, budget - 1, props));
    default: {
      if (budget < 3) return random_formula(g, 1, props);
      const auto left = 1 + g() % (budget - 2);
      auto l = random_formula(g, left, props);
      auto r = random_formula(g, budget - 1 - left, props);
      const auto k = g() % 3;
      if (k == 0) return Formula::conjunction(l, r);
      if (k == 1) return Formula::disjunction(l, r);
      return Formula::since(l, r);
    }
  }
}

Trace random_trace(std::mt19937_64& g, std::size_t len, std::size_t props) {
  Trace t;
  for (std::size_t i = 0; i < len; ++i) {
    State s(props);
    for (std::size_t q = 0; q < props; ++q) s.set(q, g() & 1u);
    t.states.push_back(s);
  }
  return t;
}

}  // namespace

TEST_CASE("alphabet rejects duplicates and bad identifiers") {
  CHECK_THROWS_AS(Alphabet(std::vector<std::string>{"a", "a"}), ValidationError);
  CHECK_THROWS_AS(Alphabet(std::vector<std::string>{"1a"}), ValidationError);
  const Alphabet a(std::vector<std::string>{"x"}, std::vector<std::string>{"y"});
  CHECK(a.size() == 2);
  CHECK(a.is_predicate(1));
  CHECK_FALSE(a.is_predicate(0));
  CHECK(a.index_of("y") == 1);
  CHECK_THROWS_AS(a.index_of("z"), ValidationError);
}

TEST_CASE("parse: Since over a negation") {
  const auto f = parse_formula("(S (not (prop a)) (prop b))", ab());
  CHECK(f == Formula::since(Formula::negation(Formula::prop(0)), Formula::prop(1)));
}

TEST_CASE("parse: implication is desugared") {
  const Alphabet a(std::vector<std::string>{"ueInformationRequest", "rrcConnectionRequest", "securityModeComplete"});
  const auto f = parse_formula(kRlf, a);
  const auto expected = Formula::disjunction(
      Formula::negation(Formula::prop(0)),
      Formula::since(Formula::negation(Formula::prop(1)), Formula::prop(2)));
  CHECK(f == expected);
  CHECK(size(f) == 7);
}

TEST_CASE("parse errors") {
  CHECK_THROWS_AS(parse_formula("(and (prop a))", ab()), ParseError);
  CHECK_THROWS_AS(parse_formula("(prop c)", ab()), ValidationError);
  CHECK_THROWS_AS(parse_formula("(not (prop a)", ab()), ParseError);
  CHECK_THROWS_AS(parse_formula("(foo (prop a))", ab()), ParseError);
  CHECK_THROWS_AS(parse_formula("true true", ab()), ParseError);
  try {
    parse_formula("(and (prop a) @)", ab());
    FAIL("expected a parse error");
  } catch (const ParseError& e) {
    CHECK(e.position() == 14);
  }
}

TEST_CASE("size counts node occurrences") {
  CHECK(size(Formula::prop(0)) == 1);
  CHECK(size(Formula::negation(Formula::prop(0))) == 2);
  const auto p = Formula::prop(0);
  CHECK(size(Formula::conjunction(p, p)) == 3);
}

TEST_CASE("eval_at examples") {
  const auto t = trace_of({{0, 1}, {0, 0}});
  CHECK(eval_at(Formula::truth(), t, 0));
  CHECK_FALSE(eval_at(Formula::yesterday(Formula::prop(0)), trace_of({{1, 1}}), 0));
  CHECK(eval_at(Formula::since(Formula::negation(Formula::prop(0)), Formula::prop(1)), t, 1));
  CHECK_THROWS_AS(eval_at(Formula::truth(), t, 2), ValidationError);
}

TEST_CASE("holds_globally and earliest_violation") {
  const auto p = Formula::prop(0);
  CHECK(holds_globally(Formula::truth(), trace_of({{0}, {1}})));
  CHECK_FALSE(holds_globally(p, trace_of({{1}, {0}})));
  CHECK(earliest_violation(Formula::truth(), trace_of({{0}})) == std::nullopt);
  CHECK(earliest_violation(p, trace_of({{1}, {0}, {0}})) == std::size_t{1});
  CHECK(holds_globally(Formula::falsity(), Trace{}));
  CHECK(earliest_violation(Formula::falsity(), Trace{}) == std::nullopt);
}

TEST_CASE("monitor layout") {
  const auto a = ab();
  Monitor m(Formula::prop(0), a.size());
  CHECK(m.subformula_count() == 1);
  CHECK(m.step_count() == 0);

  Monitor s(parse_formula("(S (not (prop a)) (prop b))", a), a.size());
  REQUIRE(s.subformula_count() == 4);
  const auto prog = s.program();
  CHECK(prog[0].op == Op::Prop);
  CHECK(prog[0].a == 0);
  CHECK(prog[1].op == Op::Not);
  CHECK(prog[2].op == Op::Prop);
  CHECK(prog[2].a == 1);
  CHECK(prog[3].op == Op::Since);

  const auto& full = traces::default_alphabet();
  Monitor rlf(parse_formula(kRlf, full), full.size());
  CHECK(rlf.subformula_count() == 7);
  CHECK(rlf.previous_bits().size() == 7);
}

TEST_CASE("monitor steps") {
  Monitor t(Formula::truth(), 1);
  CHECK(t.step(State(1)));
  Monitor y(Formula::yesterday(Formula::prop(0)), 1);
  State on(1);
  on.set(0);
  CHECK_FALSE(y.step(on));
  CHECK(y.step(on));
  CHECK(y.step_count() == 2);
  y.reset();
  CHECK(y.step_count() == 0);
  CHECK_FALSE(y.step(on));
  CHECK_THROWS_AS(y.step(State(2)), ValidationError);
}

TEST_CASE("monitor agrees with the reference semantics (sizes <= 3, length <= 4)") {
  const auto by = oracle::formulas_by_size(3, 2);
  const auto ts = oracle::all_traces(4, 2);
  std::size_t mismatches = 0;
  for (std::size_t s = 1; s <= 3; ++s) {
    for (const auto& f : by[s]) {
      for (const auto& t : ts) {
        const auto bits = monitor_trace(f, t, 2);
        for (std::size_t i = 0; i < t.size(); ++i) {
          const bool ref = oracle::holds(f, t, i);
          mismatches += bits[i] != ref;
          mismatches += eval_at(f, t, i) != ref;
          mismatches += eval_at_rewritten(f, t, i) != ref;
        }
      }
    }
  }
  CHECK(mismatches == 0);
}

TEST_CASE("monitor agrees with the reference semantics on random cases") {
  std::mt19937_64 g(42);
  std::size_t mismatches = 0;
  for (int it = 0; it < 500; ++it) {
    const auto f = random_formula(g, 1 + g() % 12, 3);
    const auto t = random_trace(g, 1 + g() % 24, 3);
    const auto bits = monitor_trace(f, t, 3);
    for (std::size_t i = 0; i < t.size(); ++i) mismatches += bits[i] != oracle::holds(f, t, i);
  }
  CHECK(mismatches == 0);
}

TEST_CASE("equivalence laws hold pointwise") {
  std::mt19937_64 g(3);
  for (int it = 0; it < 200; ++it) {
    const auto phi = random_formula(g, 1 + g() % 5, 2);
    const auto psi = random_formula(g, 1 + g() % 5, 2);
    const auto t = random_trace(g, 1 + g() % 10, 2);
    for (std::size_t i = 0; i < t.size(); ++i) {
      CHECK(eval_at(Formula::once(phi), t, i) == eval_at(Formula::since(Formula::truth(), phi), t, i));
      CHECK(eval_at(Formula::historically(phi), t, i) ==
            eval_at(Formula::negation(Formula::once(Formula::negation(phi))), t, i));
      CHECK(eval_at(Formula::implication(phi, psi), t, i) == (!eval_at(phi, t, i) || eval_at(psi, t, i)));
    }
  }
}

TEST_CASE("format and parse round trip") {
  std::mt19937_64 g(9);
  const auto a = Alphabet(std::vector<std::string>{"p", "q", "r"});
  for (int it = 0; it < 300; ++it) {
    const auto f = random_formula(g, 1 + g() % 15, 3);
    CHECK(parse_formula(format_formula(f, a), a) == f);
  }
}

TEST_CASE("monitor state size is independent of trace length") {
  std::mt19937_64 g(5);
  const auto f = random_formula(g, 10, 2);
  Monitor m(f, 2);
  const auto before = m.previous_bits().size();
  const auto* data = m.previous_bits().data();
  for (int i = 0; i < 5000; ++i) {
    State s(2);
    s.set(0, g() & 1u);
    m.step(s);
  }
  CHECK(m.previous_bits().size() == before);
  CHECK(m.previous_bits().data() == data);
}

TEST_CASE("count_props splits propositions from operators") {
  const auto& a = traces::default_alphabet();
  const auto f = parse_formula(kRlf, a);
  CHECK(count_props(f) == 3);
  CHECK(size(f) - count_props(f) == 4);
}
