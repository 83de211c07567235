#include "phoenix/pltl.hpp"

#include <cctype>
#include <map>
#include <tuple>

#include "phoenix/error.hpp"

namespace phoenix::pltl {

// ---------------------------------------------------------------------------
// Alphabet

Alphabet::Alphabet(const std::vector<std::string>& propositions) {
  for (const auto& p : propositions) add(p);
  message_count_ = names_.size();
}

Alphabet::Alphabet(const std::vector<std::string>& messages,
                   const std::vector<std::string>& predicates) {
  for (const auto& m : messages) add(m);
  message_count_ = names_.size();
  for (const auto& p : predicates) add(p);
}

void Alphabet::add(const std::string& name) {
  if (!is_identifier(name)) throw ValidationError("invalid proposition name '" + name + "'");
  if (!index_.emplace(name, names_.size()).second) {
    throw ValidationError("duplicate proposition '" + name + "'");
  }
  names_.push_back(name);
}

std::optional<std::size_t> Alphabet::find(std::string_view name) const {
  auto it = index_.find(std::string(name));
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

std::size_t Alphabet::index_of(std::string_view name) const {
  if (auto i = find(name)) return *i;
  throw ValidationError("unknown proposition '" + std::string(name) + "'");
}

bool Alphabet::is_identifier(std::string_view text) noexcept {
  if (text.empty()) return false;
  auto c0 = static_cast<unsigned char>(text[0]);
  if (!(std::isalpha(c0) || c0 == '_')) return false;
  for (char ch : text) {
    auto c = static_cast<unsigned char>(ch);
    if (!(std::isalnum(c) || c == '_')) return false;
  }
  return true;
}

// ---------------------------------------------------------------------------
// Formula

int arity(Op op) noexcept {
  switch (op) {
    case Op::True:
    case Op::False:
    case Op::Prop:
      return 0;
    case Op::Not:
    case Op::Yesterday:
    case Op::Once:
    case Op::Historically:
      return 1;
    case Op::And:
    case Op::Or:
    case Op::Since:
      return 2;
  }
  return 0;
}

std::string_view keyword(Op op) noexcept {
  switch (op) {
    case Op::True: return "true";
    case Op::False: return "false";
    case Op::Prop: return "prop";
    case Op::Not: return "not";
    case Op::And: return "and";
    case Op::Or: return "or";
    case Op::Yesterday: return "Y";
    case Op::Once: return "O";
    case Op::Historically: return "H";
    case Op::Since: return "S";
  }
  return "?";
}

Formula Formula::make(Op op, std::size_t prop_index, std::optional<Formula> left,
                      std::optional<Formula> right) {
  const int n = arity(op);
  if ((n >= 1) != left.has_value() || (n == 2) != right.has_value()) {
    throw ValidationError("arity mismatch for '" + std::string(keyword(op)) + "'");
  }
  auto node = std::make_shared<Node>();
  node->op = op;
  node->prop = op == Op::Prop ? prop_index : 0;
  if (left) node->left = left->node_;
  if (right) node->right = right->node_;
  return Formula(std::move(node));
}

Formula Formula::truth() { return make(Op::True, 0, std::nullopt, std::nullopt); }
Formula Formula::falsity() { return make(Op::False, 0, std::nullopt, std::nullopt); }
Formula Formula::prop(std::size_t index) { return make(Op::Prop, index, std::nullopt, std::nullopt); }
Formula Formula::negation(Formula child) { return make(Op::Not, 0, std::move(child), std::nullopt); }
Formula Formula::conjunction(Formula l, Formula r) { return make(Op::And, 0, std::move(l), std::move(r)); }
Formula Formula::disjunction(Formula l, Formula r) { return make(Op::Or, 0, std::move(l), std::move(r)); }
Formula Formula::implication(Formula l, Formula r) {
  return disjunction(negation(std::move(l)), std::move(r));
}
Formula Formula::yesterday(Formula child) { return make(Op::Yesterday, 0, std::move(child), std::nullopt); }
Formula Formula::once(Formula child) { return make(Op::Once, 0, std::move(child), std::nullopt); }
Formula Formula::historically(Formula child) {
  return make(Op::Historically, 0, std::move(child), std::nullopt);
}
Formula Formula::since(Formula l, Formula r) { return make(Op::Since, 0, std::move(l), std::move(r)); }

std::optional<std::size_t> Formula::max_prop() const {
  std::optional<std::size_t> best;
  if (op() == Op::Prop) best = prop_index();
  const int n = arity(op());
  for (int k = 0; k < n; ++k) {
    auto sub = (k == 0 ? left() : right()).max_prop();
    if (sub && (!best || *sub > *best)) best = sub;
  }
  return best;
}

bool operator==(const Formula& a, const Formula& b) {
  if (a.node_ == b.node_) return true;
  if (a.op() != b.op()) return false;
  if (a.op() == Op::Prop) return a.prop_index() == b.prop_index();
  const int n = arity(a.op());
  if (n >= 1 && !(a.left() == b.left())) return false;
  if (n == 2 && !(a.right() == b.right())) return false;
  return true;
}

std::size_t size(const Formula& f) {
  switch (arity(f.op())) {
    case 0: return 1;
    case 1: return 1 + size(f.left());
    default: return 1 + size(f.left()) + size(f.right());
  }
}

std::size_t count_props(const Formula& f) {
  std::size_t own = f.op() == Op::Prop ? 1 : 0;
  switch (arity(f.op())) {
    case 0: return own;
    case 1: return count_props(f.left());
    default: return count_props(f.left()) + count_props(f.right());
  }
}

// ---------------------------------------------------------------------------
// Parsing / formatting

namespace {

class Parser {
 public:
  Parser(std::string_view text, const Alphabet& alphabet) : text_(text), alphabet_(alphabet) {}

  Formula parse_all() {
    Formula f = parse();
    skip_ws();
    if (pos_ != text_.size()) throw ParseError("trailing input", pos_);
    return f;
  }

 private:
  void skip_ws() {
    while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
  }

  bool at_close() {
    skip_ws();
    return pos_ < text_.size() && text_[pos_] == ')';
  }

  std::string_view atom() {
    skip_ws();
    const std::size_t start = pos_;
    while (pos_ < text_.size()) {
      char c = text_[pos_];
      if (std::isspace(static_cast<unsigned char>(c)) || c == '(' || c == ')') break;
      ++pos_;
    }
    if (start == pos_) throw ParseError("expected a token", start);
    return text_.substr(start, pos_ - start);
  }

  void expect_close(std::string_view op, std::size_t open_at) {
    skip_ws();
    if (pos_ >= text_.size()) throw ParseError("unterminated '(" + std::string(op) + "'", open_at);
    if (text_[pos_] != ')') {
      throw ParseError("arity mismatch: too many operands for '" + std::string(op) + "'", pos_);
    }
    ++pos_;
  }

  Formula operand(std::string_view op, std::size_t open_at) {
    if (at_close()) {
      throw ParseError("arity mismatch: too few operands for '" + std::string(op) + "'", open_at);
    }
    return parse();
  }

  Formula parse() {
    skip_ws();
    if (pos_ >= text_.size()) throw ParseError("unexpected end of formula", pos_);
    if (text_[pos_] != '(') {
      const std::size_t at = pos_;
      auto word = atom();
      if (word == "true") return Formula::truth();
      if (word == "false") return Formula::falsity();
      throw ParseError("unexpected token '" + std::string(word) + "'", at);
    }
    const std::size_t open_at = pos_++;
    const std::size_t op_at = (skip_ws(), pos_);
    auto op = atom();
    Formula result = Formula::truth();
    if (op == "prop") {
      const std::size_t name_at = (skip_ws(), pos_);
      if (at_close()) throw ParseError("arity mismatch: 'prop' needs a name", open_at);
      auto name = atom();
      auto index = alphabet_.find(name);
      if (!index) {
        throw ValidationError("unknown proposition '" + std::string(name) + "' at " +
                              std::to_string(name_at));
      }
      result = Formula::prop(*index);
    } else if (op == "not" || op == "Y" || op == "O" || op == "H") {
      Formula child = operand(op, open_at);
      if (op == "not") result = Formula::negation(child);
      else if (op == "Y") result = Formula::yesterday(child);
      else if (op == "O") result = Formula::once(child);
      else result = Formula::historically(child);
    } else if (op == "and" || op == "or" || op == "imp" || op == "S") {
      Formula l = operand(op, open_at);
      Formula r = operand(op, open_at);
      if (op == "and") result = Formula::conjunction(l, r);
      else if (op == "or") result = Formula::disjunction(l, r);
      else if (op == "imp") result = Formula::implication(l, r);
      else result = Formula::since(l, r);
    } else {
      throw ParseError("unknown operator '" + std::string(op) + "'", op_at);
    }
    expect_close(op, open_at);
    return result;
  }

  std::string_view text_;
  const Alphabet& alphabet_;
  std::size_t pos_ = 0;
};

void format_into(const Formula& f, const Alphabet& alphabet, std::string& out) {
  switch (f.op()) {
    case Op::True: out += "true"; return;
    case Op::False: out += "false"; return;
    case Op::Prop:
      out += "(prop ";
      out += alphabet.name(f.prop_index());
      out += ')';
      return;
    default: break;
  }
  out += '(';
  out += keyword(f.op());
  out += ' ';
  format_into(f.left(), alphabet, out);
  if (arity(f.op()) == 2) {
    out += ' ';
    format_into(f.right(), alphabet, out);
  }
  out += ')';
}

}  // namespace

Formula parse_formula(std::string_view text, const Alphabet& alphabet) {
  return Parser(text, alphabet).parse_all();
}

std::string format_formula(const Formula& f, const Alphabet& alphabet) {
  std::string out;
  format_into(f, alphabet, out);
  return out;
}

// ---------------------------------------------------------------------------
// Reference semantics

namespace {

void check_props(const Formula& f, const Trace& t) {
  if (t.states.empty()) return;
  if (auto m = f.max_prop(); m && *m >= t.states.front().size()) {
    throw ValidationError("formula uses a proposition outside the trace alphabet");
  }
}

bool eval_impl(const Formula& f, const Trace& t, std::size_t i, bool rewrite) {
  switch (f.op()) {
    case Op::True: return true;
    case Op::False: return false;
    case Op::Prop: return t.states[i].get(f.prop_index());
    case Op::Not: return !eval_impl(f.left(), t, i, rewrite);
    case Op::And: return eval_impl(f.left(), t, i, rewrite) && eval_impl(f.right(), t, i, rewrite);
    case Op::Or: return eval_impl(f.left(), t, i, rewrite) || eval_impl(f.right(), t, i, rewrite);
    case Op::Yesterday: return i > 0 && eval_impl(f.left(), t, i - 1, rewrite);
    case Op::Once:
      if (rewrite) return eval_impl(Formula::since(Formula::truth(), f.left()), t, i, true);
      for (std::size_t j = 0; j <= i; ++j) {
        if (eval_impl(f.left(), t, j, rewrite)) return true;
      }
      return false;
    case Op::Historically:
      if (rewrite) {
        auto rewritten = Formula::negation(Formula::since(Formula::truth(), Formula::negation(f.left())));
        return eval_impl(rewritten, t, i, true);
      }
      for (std::size_t j = 0; j <= i; ++j) {
        if (!eval_impl(f.left(), t, j, rewrite)) return false;
      }
      return true;
    case Op::Since:
      for (std::size_t j = i + 1; j-- > 0;) {
        if (!eval_impl(f.right(), t, j, rewrite)) continue;
        bool all = true;
        for (std::size_t k = j + 1; k <= i && all; ++k) all = eval_impl(f.left(), t, k, rewrite);
        if (all) return true;
      }
      return false;
  }
  return false;
}

}  // namespace

bool eval_at(const Formula& f, const Trace& t, std::size_t i) {
  if (i >= t.size()) throw ValidationError("position " + std::to_string(i) + " outside trace");
  check_props(f, t);
  return eval_impl(f, t, i, false);
}

bool eval_at_rewritten(const Formula& f, const Trace& t, std::size_t i) {
  if (i >= t.size()) throw ValidationError("position " + std::to_string(i) + " outside trace");
  check_props(f, t);
  return eval_impl(f, t, i, true);
}

bool holds_globally(const Formula& f, const Trace& t) { return !earliest_violation(f, t); }

std::optional<std::size_t> earliest_violation(const Formula& f, const Trace& t) {
  for (std::size_t i = 0; i < t.size(); ++i) {
    if (!eval_at(f, t, i)) return i;
  }
  return std::nullopt;
}

// ---------------------------------------------------------------------------
// Monitor

namespace {

struct Compiler {
  std::vector<Monitor::Instr> program;
  std::map<std::tuple<Op, std::uint32_t, std::uint32_t>, std::uint32_t> seen;

  std::uint32_t emit(const Formula& f) {
    std::uint32_t a = 0;
    std::uint32_t b = 0;
    const int n = arity(f.op());
    if (f.op() == Op::Prop) a = static_cast<std::uint32_t>(f.prop_index());
    if (n >= 1) a = emit(f.left());
    if (n == 2) b = emit(f.right());
    auto key = std::make_tuple(f.op(), a, b);
    if (auto it = seen.find(key); it != seen.end()) return it->second;
    const auto slot = static_cast<std::uint32_t>(program.size());
    program.push_back({f.op(), a, b});
    seen.emplace(key, slot);
    return slot;
  }
};

}  // namespace

Monitor::Monitor(const Formula& f, std::size_t alphabet_size) : alphabet_size_(alphabet_size) {
  if (auto m = f.max_prop(); m && *m >= alphabet_size) {
    throw ValidationError("formula uses a proposition outside the monitor alphabet");
  }
  Compiler c;
  const auto root = c.emit(f);
  program_ = std::move(c.program);
  // Deduplication can only drop entries, so the root is still last.
  if (root + 1 != program_.size()) throw Error("monitor compilation lost the root");
  prev_.assign(program_.size(), 0);
  curr_.assign(program_.size(), 0);
}

bool Monitor::step(const State& s) {
  if (s.size() != alphabet_size_) throw ValidationError("state does not match the monitor alphabet");
  const bool first = steps_ == 0;
  const std::size_t n = program_.size();
  for (std::size_t k = 0; k < n; ++k) {
    const Instr& in = program_[k];
    bool v = false;
    switch (in.op) {
      case Op::True: v = true; break;
      case Op::False: v = false; break;
      case Op::Prop: v = s.get(in.a); break;
      case Op::Not: v = !curr_[in.a]; break;
      case Op::And: v = curr_[in.a] && curr_[in.b]; break;
      case Op::Or: v = curr_[in.a] || curr_[in.b]; break;
      case Op::Yesterday: v = !first && prev_[in.a]; break;
      case Op::Once: v = curr_[in.a] || (!first && prev_[k]); break;
      case Op::Historically: v = curr_[in.a] && (first || prev_[k]); break;
      case Op::Since: v = curr_[in.b] || (!first && prev_[k] && curr_[in.a]); break;
    }
    curr_[k] = v;
  }
  prev_.swap(curr_);
  ++steps_;
  return prev_[n - 1] != 0;
}

void Monitor::reset() noexcept {
  std::fill(prev_.begin(), prev_.end(), 0);
  std::fill(curr_.begin(), curr_.end(), 0);
  steps_ = 0;
}

std::vector<bool> monitor_trace(const Formula& f, const Trace& t, std::size_t alphabet_size) {
  Monitor m(f, alphabet_size);
  std::vector<bool> out;
  out.reserve(t.size());
  for (const auto& s : t.states) out.push_back(m.step(s));
  return out;
}

}  // namespace phoenix::pltl
