#pragma once

// DFA and Mealy-machine signatures, their step monitors, and the
// line-oriented text formats.

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace phoenix::automata {

/// Ordered set of event symbols with O(1) lookup.
class SymbolTable {
 public:
  SymbolTable() = default;
  explicit SymbolTable(std::vector<std::string> symbols);

  std::size_t size() const noexcept { return symbols_.size(); }
  const std::string& at(std::size_t i) const { return symbols_.at(i); }
  const std::vector<std::string>& symbols() const noexcept { return symbols_; }
  std::optional<std::size_t> find(std::string_view symbol) const;
  /// Appends if missing; returns the index either way.
  std::size_t intern(const std::string& symbol);

  friend bool operator==(const SymbolTable& a, const SymbolTable& b) { return a.symbols_ == b.symbols_; }

 private:
  std::vector<std::string> symbols_;
  std::unordered_map<std::string, std::size_t> index_;
};

inline constexpr std::int32_t kNoTransition = -1;

/// Deterministic, possibly partial, finite automaton. Missing transitions
/// lead to an implicit rejecting sink.
class Dfa {
 public:
  Dfa(std::size_t state_count, std::size_t start, SymbolTable alphabet);

  void set_accepting(std::size_t state, bool accepting = true);
  /// Throws ValidationError if a different target is already defined.
  void add_transition(std::size_t from, std::size_t symbol, std::size_t to);

  std::size_t state_count() const noexcept { return accepting_.size(); }
  std::size_t start() const noexcept { return start_; }
  bool accepting(std::size_t state) const { return accepting_.at(state) != 0; }
  const SymbolTable& alphabet() const noexcept { return alphabet_; }
  std::int32_t next(std::size_t state, std::size_t symbol) const noexcept {
    return table_[state * alphabet_.size() + symbol];
  }
  std::size_t transition_count() const noexcept { return transitions_; }

  friend bool operator==(const Dfa&, const Dfa&) = default;

 private:
  std::size_t start_;
  SymbolTable alphabet_;
  std::vector<std::uint8_t> accepting_;
  std::vector<std::int32_t> table_;
  std::size_t transitions_ = 0;
};

inline constexpr std::string_view kBenign = "benign";

/// Deterministic transducer whose outputs are `benign` or a vulnerability name.
class MealyMachine {
 public:
  struct Edge {
    std::int32_t to = kNoTransition;
    std::int32_t output = 0;
    friend bool operator==(const Edge&, const Edge&) = default;
  };

  /// `outputs` must contain `benign`.
  MealyMachine(std::size_t state_count, std::size_t start, SymbolTable inputs, SymbolTable outputs);

  void add_transition(std::size_t from, std::size_t input, std::size_t to, std::size_t output);

  std::size_t state_count() const noexcept { return state_count_; }
  std::size_t start() const noexcept { return start_; }
  const SymbolTable& inputs() const noexcept { return inputs_; }
  const SymbolTable& outputs() const noexcept { return outputs_; }
  std::size_t benign_output() const noexcept { return benign_; }
  const Edge& edge(std::size_t state, std::size_t input) const noexcept {
    return table_[state * inputs_.size() + input];
  }
  std::size_t transition_count() const noexcept { return transitions_; }

  friend bool operator==(const MealyMachine&, const MealyMachine&) = default;

 private:
  std::size_t state_count_;
  std::size_t start_;
  SymbolTable inputs_;
  SymbolTable outputs_;
  std::size_t benign_ = 0;
  std::vector<Edge> table_;
  std::size_t transitions_ = 0;
};

enum class RunMode { StopAtFirst, ReportAll };

struct StepOutcome {
  bool violation = false;
  /// Vulnerability name for Mealy outputs; empty for DFA rejections.
  std::string name;
  friend bool operator==(const StepOutcome&, const StepOutcome&) = default;
};

struct RunVerdict {
  std::vector<StepOutcome> steps;
  std::optional<std::size_t> first_violation;
  /// Mealy only: steps that hit an undefined transition.
  std::size_t undefined_transitions = 0;
};

/// Throws ValidationError for symbols outside the alphabet.
RunVerdict dfa_run(const Dfa& d, const std::vector<std::string>& word,
                   RunMode mode = RunMode::StopAtFirst);
RunVerdict mm_run(const MealyMachine& m, const std::vector<std::string>& word,
                  RunMode mode = RunMode::StopAtFirst);

/// Step-wise DFA cursor over symbol indices. Once in the sink it stays there.
class DfaCursor {
 public:
  explicit DfaCursor(const Dfa& d) : dfa_(&d), state_(static_cast<std::int32_t>(d.start())) {}
  /// True when the step lands in an accepting state.
  bool step(std::size_t symbol) noexcept {
    if (state_ != kNoTransition) state_ = dfa_->next(static_cast<std::size_t>(state_), symbol);
    return state_ != kNoTransition && dfa_->accepting(static_cast<std::size_t>(state_));
  }
  void reset() noexcept { state_ = static_cast<std::int32_t>(dfa_->start()); }
  bool in_sink() const noexcept { return state_ == kNoTransition; }

 private:
  const Dfa* dfa_;
  std::int32_t state_;
};

/// Step-wise Mealy cursor; undefined transitions emit benign and stay put.
class MealyCursor {
 public:
  explicit MealyCursor(const MealyMachine& m) : mm_(&m), state_(m.start()) {}
  /// Returns the output index of the step.
  std::size_t step(std::size_t input) noexcept {
    const auto& e = mm_->edge(state_, input);
    if (e.to == kNoTransition) {
      ++undefined_;
      return mm_->benign_output();
    }
    state_ = static_cast<std::size_t>(e.to);
    return static_cast<std::size_t>(e.output);
  }
  void reset() noexcept { state_ = mm_->start(); }
  std::size_t undefined_transitions() const noexcept { return undefined_; }

 private:
  const MealyMachine* mm_;
  std::size_t state_;
  std::size_t undefined_ = 0;
};

Dfa read_dfa(std::istream& in);
void write_dfa(std::ostream& out, const Dfa& d);
MealyMachine read_mealy(std::istream& in);
void write_mealy(std::ostream& out, const MealyMachine& m);

Dfa load_dfa(const std::string& path);
void save_dfa(const std::string& path, const Dfa& d);
MealyMachine load_mealy(const std::string& path);
void save_mealy(const std::string& path, const MealyMachine& m);

}  // namespace phoenix::automata
