#pragma once

// Independent reference implementations used as test oracles. They favour
// obviousness over speed and share no code with the library beyond the
// formula and trace data types.

#include <cstddef>
#include <functional>
#include <optional>
#include <vector>

#include "phoenix/pltl.hpp"
#include "phoenix/sat.hpp"

namespace oracle {

using phoenix::pltl::Formula;
using phoenix::pltl::Op;
using phoenix::pltl::State;
using phoenix::pltl::Trace;

/// Satisfaction relation written straight from the inductive clauses, with
/// Once and Historically expanded as quantifiers over earlier positions.
inline bool holds(const Formula& f, const Trace& t, std::size_t i) {
  switch (f.op()) {
    case Op::True: return true;
    case Op::False: return false;
    case Op::Prop: return t.states[i].get(f.prop_index());
    case Op::Not: return !holds(f.left(), t, i);
    case Op::And: return holds(f.left(), t, i) && holds(f.right(), t, i);
    case Op::Or: return holds(f.left(), t, i) || holds(f.right(), t, i);
    case Op::Yesterday: return i > 0 && holds(f.left(), t, i - 1);
    case Op::Once:
      for (std::size_t j = 0; j <= i; ++j) {
        if (holds(f.left(), t, j)) return true;
      }
      return false;
    case Op::Historically:
      for (std::size_t j = 0; j <= i; ++j) {
        if (!holds(f.left(), t, j)) return false;
      }
      return true;
    case Op::Since:
      for (std::size_t j = i + 1; j-- > 0;) {
        if (!holds(f.right(), t, j)) continue;
        bool all = true;
        for (std::size_t k = j + 1; k <= i; ++k) all = all && holds(f.left(), t, k);
        if (all) return true;
      }
      return false;
  }
  return false;
}

inline bool holds_everywhere(const Formula& f, const Trace& t) {
  for (std::size_t i = 0; i < t.size(); ++i) {
    if (!holds(f, t, i)) return false;
  }
  return true;
}

/// Every formula of exactly each size 1..max over `props` propositions;
/// result[s] holds the size-s formulas.
inline std::vector<std::vector<Formula>> formulas_by_size(std::size_t max, std::size_t props) {
  std::vector<std::vector<Formula>> by(max + 1);
  if (max == 0) return by;
  by[1] = {Formula::truth(), Formula::falsity()};
  for (std::size_t q = 0; q < props; ++q) by[1].push_back(Formula::prop(q));
  for (std::size_t s = 2; s <= max; ++s) {
    for (const auto& c : by[s - 1]) {
      by[s].push_back(Formula::negation(c));
      by[s].push_back(Formula::yesterday(c));
      by[s].push_back(Formula::once(c));
      by[s].push_back(Formula::historically(c));
    }
    for (std::size_t a = 1; a + 1 < s; ++a) {
      for (const auto& l : by[a]) {
        for (const auto& r : by[s - 1 - a]) {
          by[s].push_back(Formula::conjunction(l, r));
          by[s].push_back(Formula::disjunction(l, r));
          by[s].push_back(Formula::since(l, r));
        }
      }
    }
  }
  return by;
}

/// Every trace of length 1..max_len over `props` propositions.
inline std::vector<Trace> all_traces(std::size_t max_len, std::size_t props) {
  std::vector<Trace> out;
  const std::size_t letters = std::size_t{1} << props;
  for (std::size_t len = 1; len <= max_len; ++len) {
    std::size_t total = 1;
    for (std::size_t i = 0; i < len; ++i) total *= letters;
    for (std::size_t code = 0; code < total; ++code) {
      Trace t;
      std::size_t c = code;
      for (std::size_t i = 0; i < len; ++i) {
        State s(props);
        for (std::size_t q = 0; q < props; ++q) s.set(q, ((c % letters) >> q) & 1u);
        c /= letters;
        t.states.push_back(s);
      }
      out.push_back(t);
    }
  }
  return out;
}

/// Exhaustive satisfiability for small CNFs.
inline std::optional<phoenix::sat::Model> brute_force_sat(const phoenix::sat::Cnf& cnf) {
  const std::size_t n = cnf.variables;
  for (std::uint64_t bits = 0; bits < (std::uint64_t{1} << n); ++bits) {
    phoenix::sat::Model m(n + 1, false);
    for (std::size_t v = 1; v <= n; ++v) m[v] = (bits >> (v - 1)) & 1u;
    bool ok = true;
    for (const auto& c : cnf.clauses) {
      bool sat = false;
      for (auto l : c) sat = sat || (l > 0 ? m[static_cast<std::size_t>(l)] : !m[static_cast<std::size_t>(-l)]);
      if (!sat) {
        ok = false;
        break;
      }
    }
    if (ok) return m;
  }
  return std::nullopt;
}

}  // namespace oracle
