#pragma once

// Conflict-driven clause-learning SAT solver and DIMACS CNF I/O.

#include <chrono>
#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <memory>
#include <optional>
#include <span>
#include <vector>

namespace phoenix::sat {

/// DIMACS-style literal: +v or -v for variable v >= 1.
using Lit = int;

struct Cnf {
  std::size_t variables = 0;
  std::vector<std::vector<Lit>> clauses;

  Lit new_var() { return static_cast<Lit>(++variables); }
  /// Throws ValidationError for empty clauses or out-of-range literals.
  void add(std::vector<Lit> clause);
  void add(std::initializer_list<Lit> clause) { add(std::vector<Lit>(clause)); }
};

/// Index v holds the value of variable v; index 0 is unused.
using Model = std::vector<bool>;

bool satisfies(const Cnf& cnf, const Model& model);

enum class Result { Sat, Unsat, Unknown };

struct Stats {
  std::uint64_t decisions = 0;
  std::uint64_t propagations = 0;
  std::uint64_t conflicts = 0;
  std::uint64_t restarts = 0;
  std::uint64_t learned = 0;
  std::uint64_t deleted = 0;
};

/// Two-watched-literal CDCL with VSIDS, first-UIP learning, Luby restarts,
/// phase saving and LBD-based clause deletion. Fully deterministic. Clauses
/// may be added between solve() calls.
class Solver {
 public:
  Solver();
  explicit Solver(const Cnf& cnf);
  ~Solver();
  Solver(const Solver&) = delete;
  Solver& operator=(const Solver&) = delete;

  Lit new_var();
  std::size_t variable_count() const noexcept;
  void reserve_vars(std::size_t count);
  /// Returns false once the clause set is known to be unsatisfiable.
  bool add_clause(std::span<const Lit> clause);
  bool add_clause(std::initializer_list<Lit> clause) { return add_clause(std::span<const Lit>(clause.begin(), clause.size())); }

  /// Unknown only when the deadline passes.
  Result solve();
  void set_deadline(std::optional<std::chrono::steady_clock::time_point> deadline);

  /// Valid after Sat.
  bool value(Lit var) const;
  Model model() const;
  const Stats& stats() const noexcept;

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

/// One-shot solve; the model is checked against every clause before return.
std::optional<Model> solve(const Cnf& cnf);

void write_dimacs(std::ostream& out, const Cnf& cnf);
/// Throws ParseError with the line number on malformed input.
Cnf read_dimacs(std::istream& in);

}  // namespace phoenix::sat
