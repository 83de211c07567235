#pragma once

// Past-time propositional LTL over finite traces: formulas, the reference
// semantics, and the constant-space dynamic-programming monitor.

#include <cstddef>
#include <cstdint>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace phoenix::pltl {

/// Ordered set of proposition names. The first `message_count()` entries are
/// message labels, the remaining ones are payload predicates; for the logic
/// they are all plain propositions.
class Alphabet {
 public:
  Alphabet() = default;
  explicit Alphabet(const std::vector<std::string>& propositions);
  Alphabet(const std::vector<std::string>& messages, const std::vector<std::string>& predicates);

  std::size_t size() const noexcept { return names_.size(); }
  std::size_t message_count() const noexcept { return message_count_; }
  const std::string& name(std::size_t index) const { return names_.at(index); }
  const std::vector<std::string>& names() const noexcept { return names_; }
  std::optional<std::size_t> find(std::string_view name) const;
  /// Throws ValidationError for unknown names.
  std::size_t index_of(std::string_view name) const;
  bool is_predicate(std::size_t index) const noexcept { return index >= message_count_; }

  static bool is_identifier(std::string_view text) noexcept;

  friend bool operator==(const Alphabet& a, const Alphabet& b) {
    return a.names_ == b.names_ && a.message_count_ == b.message_count_;
  }

 private:
  void add(const std::string& name);

  std::vector<std::string> names_;
  std::unordered_map<std::string, std::size_t> index_;
  std::size_t message_count_ = 0;
};

/// Total assignment of Booleans to the propositions of an alphabet.
class State {
 public:
  State() = default;
  explicit State(std::size_t size) : size_(size), words_((size + 63) / 64, 0) {}

  std::size_t size() const noexcept { return size_; }
  bool get(std::size_t index) const noexcept { return (words_[index >> 6] >> (index & 63)) & 1u; }
  void set(std::size_t index, bool value = true) noexcept {
    const std::uint64_t bit = std::uint64_t{1} << (index & 63);
    if (value) {
      words_[index >> 6] |= bit;
    } else {
      words_[index >> 6] &= ~bit;
    }
  }

  friend bool operator==(const State&, const State&) = default;

 private:
  std::size_t size_ = 0;
  std::vector<std::uint64_t> words_;
};

/// Classification attached to a trace: benign, or an attack with its name.
struct TraceLabel {
  bool attack = false;
  std::string name;

  static TraceLabel benign() { return {}; }
  static TraceLabel of_attack(std::string attack_name) { return {true, std::move(attack_name)}; }
  friend bool operator==(const TraceLabel&, const TraceLabel&) = default;
};

/// Finite sequence of states over one alphabet.
struct Trace {
  std::vector<State> states;
  std::optional<TraceLabel> label;

  std::size_t size() const noexcept { return states.size(); }
  friend bool operator==(const Trace&, const Trace&) = default;
};

enum class Op : std::uint8_t {
  True,
  False,
  Prop,
  Not,
  And,
  Or,
  Yesterday,
  Once,
  Historically,
  Since,
};

int arity(Op op) noexcept;
/// Keyword used by the prefix syntax ("true", "prop", "not", "S", ...).
std::string_view keyword(Op op) noexcept;

/// Immutable formula tree. Copies share structure.
class Formula {
 public:
  static Formula truth();
  static Formula falsity();
  static Formula prop(std::size_t index);
  static Formula negation(Formula child);
  static Formula conjunction(Formula left, Formula right);
  static Formula disjunction(Formula left, Formula right);
  /// Desugared into `Or(Not(left), right)`.
  static Formula implication(Formula left, Formula right);
  static Formula yesterday(Formula child);
  static Formula once(Formula child);
  static Formula historically(Formula child);
  /// `left S right`: right held at some point, left at every later point.
  static Formula since(Formula left, Formula right);
  static Formula make(Op op, std::size_t prop_index, std::optional<Formula> left,
                      std::optional<Formula> right);

  Op op() const noexcept { return node_->op; }
  std::size_t prop_index() const noexcept { return node_->prop; }
  /// Only child of a unary node, left child of a binary node.
  Formula left() const { return Formula(node_->left); }
  Formula right() const { return Formula(node_->right); }
  /// Largest proposition index used, or nullopt when the formula has none.
  std::optional<std::size_t> max_prop() const;

  friend bool operator==(const Formula& a, const Formula& b);

 private:
  struct Node {
    Op op;
    std::size_t prop = 0;
    std::shared_ptr<const Node> left;
    std::shared_ptr<const Node> right;
  };

  explicit Formula(std::shared_ptr<const Node> node) : node_(std::move(node)) {}

  std::shared_ptr<const Node> node_;
};

/// Parses the prefix syntax; `imp` is desugared. Throws ParseError (syntax,
/// arity) or ValidationError (unknown proposition).
Formula parse_formula(std::string_view text, const Alphabet& alphabet);
std::string format_formula(const Formula& f, const Alphabet& alphabet);

/// Number of AST node occurrences.
std::size_t size(const Formula& f);
/// Propositions (P) and operators including constants (T) for memory accounting.
std::size_t count_props(const Formula& f);

/// Reference semantics, evaluated directly from the satisfaction clauses.
bool eval_at(const Formula& f, const Trace& t, std::size_t i);
/// Same as eval_at, with Once/Historically rewritten through Since/Not.
bool eval_at_rewritten(const Formula& f, const Trace& t, std::size_t i);
bool holds_globally(const Formula& f, const Trace& t);
std::optional<std::size_t> earliest_violation(const Formula& f, const Trace& t);

/// Online monitor holding one previous and one current bit per distinct
/// subformula. Feeding states one at a time yields eval_at at each position.
class Monitor {
 public:
  struct Instr {
    Op op;
    std::uint32_t a = 0;  // prop index, or first operand slot
    std::uint32_t b = 0;  // second operand slot
  };

  /// `alphabet_size` bounds the proposition indices the formula may use.
  Monitor(const Formula& f, std::size_t alphabet_size);

  /// Returns the root bit at the new position (true = no violation).
  bool step(const State& s);
  void reset() noexcept;

  std::size_t subformula_count() const noexcept { return program_.size(); }
  std::size_t step_count() const noexcept { return steps_; }
  std::span<const Instr> program() const noexcept { return program_; }
  std::span<const std::uint8_t> previous_bits() const noexcept { return prev_; }
  std::span<const std::uint8_t> current_bits() const noexcept { return curr_; }
  std::size_t alphabet_size() const noexcept { return alphabet_size_; }

 private:
  std::vector<Instr> program_;
  std::vector<std::uint8_t> prev_;
  std::vector<std::uint8_t> curr_;
  std::size_t steps_ = 0;
  std::size_t alphabet_size_;
};

/// Runs a fresh monitor over a whole trace; one result per position.
std::vector<bool> monitor_trace(const Formula& f, const Trace& t, std::size_t alphabet_size);

}  // namespace phoenix::pltl
