#include "phoenix/automata.hpp"

#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>

#include "phoenix/error.hpp"

namespace phoenix::automata {

SymbolTable::SymbolTable(std::vector<std::string> symbols) {
  for (auto& s : symbols) {
    if (s.empty() || s.find_first_of(" \t\r\n") != std::string::npos) {
      throw ValidationError("invalid symbol '" + s + "'");
    }
    if (!index_.emplace(s, symbols_.size()).second) throw ValidationError("duplicate symbol '" + s + "'");
    symbols_.push_back(std::move(s));
  }
}

std::optional<std::size_t> SymbolTable::find(std::string_view symbol) const {
  auto it = index_.find(std::string(symbol));
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

std::size_t SymbolTable::intern(const std::string& symbol) {
  if (auto i = find(symbol)) return *i;
  index_.emplace(symbol, symbols_.size());
  symbols_.push_back(symbol);
  return symbols_.size() - 1;
}

// ---------------------------------------------------------------------------

Dfa::Dfa(std::size_t state_count, std::size_t start, SymbolTable alphabet)
    : start_(start),
      alphabet_(std::move(alphabet)),
      accepting_(state_count, 0),
      table_(state_count * alphabet_.size(), kNoTransition) {
  if (state_count == 0) throw ValidationError("a DFA needs at least one state");
  if (start >= state_count) throw ValidationError("start state out of range");
}

void Dfa::set_accepting(std::size_t state, bool accepting) {
  if (state >= state_count()) throw ValidationError("accepting state out of range");
  accepting_[state] = accepting ? 1 : 0;
}

void Dfa::add_transition(std::size_t from, std::size_t symbol, std::size_t to) {
  if (from >= state_count() || to >= state_count()) throw ValidationError("transition endpoint out of range");
  if (symbol >= alphabet_.size()) throw ValidationError("transition symbol out of range");
  auto& slot = table_[from * alphabet_.size() + symbol];
  if (slot != kNoTransition) {
    if (slot != static_cast<std::int32_t>(to)) {
      throw ValidationError("nondeterministic transition from state " + std::to_string(from) + " on '" +
                            alphabet_.at(symbol) + "'");
    }
    return;
  }
  slot = static_cast<std::int32_t>(to);
  ++transitions_;
}

MealyMachine::MealyMachine(std::size_t state_count, std::size_t start, SymbolTable inputs,
                           SymbolTable outputs)
    : state_count_(state_count),
      start_(start),
      inputs_(std::move(inputs)),
      outputs_(std::move(outputs)),
      table_(state_count * inputs_.size()) {
  if (state_count == 0) throw ValidationError("a Mealy machine needs at least one state");
  if (start >= state_count) throw ValidationError("start state out of range");
  auto b = outputs_.find(kBenign);
  if (!b) throw ValidationError("output alphabet must contain 'benign'");
  benign_ = *b;
}

void MealyMachine::add_transition(std::size_t from, std::size_t input, std::size_t to, std::size_t output) {
  if (from >= state_count_ || to >= state_count_) throw ValidationError("transition endpoint out of range");
  if (input >= inputs_.size() || output >= outputs_.size()) throw ValidationError("transition label out of range");
  auto& e = table_[from * inputs_.size() + input];
  if (e.to != kNoTransition) {
    if (e.to != static_cast<std::int32_t>(to) || e.output != static_cast<std::int32_t>(output)) {
      throw ValidationError("nondeterministic transition from state " + std::to_string(from) + " on '" +
                            inputs_.at(input) + "'");
    }
    return;
  }
  e.to = static_cast<std::int32_t>(to);
  e.output = static_cast<std::int32_t>(output);
  ++transitions_;
}

// ---------------------------------------------------------------------------

namespace {

std::size_t lookup(const SymbolTable& table, const std::string& symbol) {
  auto i = table.find(symbol);
  if (!i) throw ValidationError("symbol '" + symbol + "' is not in the alphabet");
  return *i;
}

void record(RunVerdict& v, std::size_t step, bool violation, std::string name) {
  v.steps.push_back({violation, std::move(name)});
  if (violation && !v.first_violation) v.first_violation = step;
}

}  // namespace

RunVerdict dfa_run(const Dfa& d, const std::vector<std::string>& word, RunMode mode) {
  std::vector<std::size_t> symbols;
  symbols.reserve(word.size());
  for (const auto& w : word) symbols.push_back(lookup(d.alphabet(), w));

  RunVerdict v;
  DfaCursor cursor(d);
  for (std::size_t i = 0; i < symbols.size(); ++i) {
    const bool ok = cursor.step(symbols[i]);
    record(v, i, !ok, {});
    if (!ok && mode == RunMode::StopAtFirst) break;
  }
  return v;
}

RunVerdict mm_run(const MealyMachine& m, const std::vector<std::string>& word, RunMode mode) {
  std::vector<std::size_t> inputs;
  inputs.reserve(word.size());
  for (const auto& w : word) inputs.push_back(lookup(m.inputs(), w));

  RunVerdict v;
  MealyCursor cursor(m);
  for (std::size_t i = 0; i < inputs.size(); ++i) {
    const std::size_t out = cursor.step(inputs[i]);
    const bool bad = out != m.benign_output();
    record(v, i, bad, bad ? m.outputs().at(out) : std::string(kBenign));
    if (bad && mode == RunMode::StopAtFirst) break;
  }
  v.undefined_transitions = cursor.undefined_transitions();
  return v;
}

// ---------------------------------------------------------------------------
// Text formats

namespace {

struct Line {
  std::size_t number;
  std::string key;
  std::vector<std::string> values;
};

std::vector<Line> read_lines(std::istream& in) {
  std::vector<Line> lines;
  std::string raw;
  std::size_t number = 0;
  while (std::getline(in, raw)) {
    ++number;
    if (!raw.empty() && raw.back() == '\r') raw.pop_back();
    const auto first = raw.find_first_not_of(" \t");
    if (first == std::string::npos || raw[first] == '#') continue;
    const auto colon = raw.find(':');
    if (colon == std::string::npos) throw ParseError("expected 'key: values'", number);
    Line line{number, raw.substr(first, colon - first), {}};
    std::istringstream rest(raw.substr(colon + 1));
    for (std::string tok; rest >> tok;) line.values.push_back(tok);
    lines.push_back(std::move(line));
  }
  return lines;
}

std::size_t to_index(const std::string& text, std::size_t line) {
  std::size_t used = 0;
  unsigned long long v = 0;
  try {
    v = std::stoull(text, &used);
  } catch (const std::exception&) {
    throw ParseError("expected a state index, got '" + text + "'", line);
  }
  if (used != text.size() || text.front() == '-') throw ParseError("expected a state index, got '" + text + "'", line);
  return static_cast<std::size_t>(v);
}

struct Header {
  std::optional<std::size_t> states;
  std::optional<std::size_t> start;
  std::vector<std::size_t> accepting;
  std::optional<std::vector<std::string>> alphabet;
  std::optional<std::vector<std::string>> outputs;
  std::vector<Line> transitions;
};

Header read_header(std::istream& in, bool mealy) {
  Header h;
  for (auto& line : read_lines(in)) {
    auto single = [&]() {
      if (line.values.size() != 1) throw ParseError("'" + line.key + "' takes one value", line.number);
      return to_index(line.values[0], line.number);
    };
    if (line.key == "states") {
      h.states = single();
    } else if (line.key == "start") {
      h.start = single();
    } else if (line.key == "alphabet") {
      h.alphabet = line.values;
    } else if (!mealy && line.key == "accepting") {
      for (const auto& v : line.values) h.accepting.push_back(to_index(v, line.number));
    } else if (mealy && line.key == "outputs") {
      h.outputs = line.values;
    } else if (line.key == "trans") {
      if (line.values.size() != (mealy ? 4u : 3u)) throw ParseError("malformed transition", line.number);
      h.transitions.push_back(std::move(line));
    } else {
      throw ParseError("unknown key '" + line.key + "'", line.number);
    }
  }
  if (!h.states || !h.start || !h.alphabet) throw ParseError("missing states/start/alphabet header", 0);
  if (mealy && !h.outputs) throw ParseError("missing outputs header", 0);
  return h;
}

std::string join(const std::vector<std::string>& xs) {
  std::string out;
  for (const auto& x : xs) {
    out += ' ';
    out += x;
  }
  return out;
}

}  // namespace

Dfa read_dfa(std::istream& in) {
  Header h = read_header(in, false);
  Dfa d(*h.states, *h.start, SymbolTable(*h.alphabet));
  for (auto s : h.accepting) d.set_accepting(s);
  for (const auto& t : h.transitions) {
    auto sym = d.alphabet().find(t.values[1]);
    if (!sym) throw ParseError("transition symbol '" + t.values[1] + "' not in alphabet", t.number);
    d.add_transition(to_index(t.values[0], t.number), *sym, to_index(t.values[2], t.number));
  }
  return d;
}

void write_dfa(std::ostream& out, const Dfa& d) {
  out << "states: " << d.state_count() << '\n';
  out << "start: " << d.start() << '\n';
  out << "accepting:";
  for (std::size_t s = 0; s < d.state_count(); ++s) {
    if (d.accepting(s)) out << ' ' << s;
  }
  out << '\n';
  out << "alphabet:" << join(d.alphabet().symbols()) << '\n';
  for (std::size_t s = 0; s < d.state_count(); ++s) {
    for (std::size_t a = 0; a < d.alphabet().size(); ++a) {
      auto to = d.next(s, a);
      if (to != kNoTransition) out << "trans: " << s << ' ' << d.alphabet().at(a) << ' ' << to << '\n';
    }
  }
}

MealyMachine read_mealy(std::istream& in) {
  Header h = read_header(in, true);
  MealyMachine m(*h.states, *h.start, SymbolTable(*h.alphabet), SymbolTable(*h.outputs));
  for (const auto& t : h.transitions) {
    auto input = m.inputs().find(t.values[1]);
    if (!input) throw ParseError("transition input '" + t.values[1] + "' not in alphabet", t.number);
    auto output = m.outputs().find(t.values[3]);
    if (!output) throw ParseError("transition output '" + t.values[3] + "' not in outputs", t.number);
    m.add_transition(to_index(t.values[0], t.number), *input, to_index(t.values[2], t.number), *output);
  }
  return m;
}

void write_mealy(std::ostream& out, const MealyMachine& m) {
  out << "states: " << m.state_count() << '\n';
  out << "start: " << m.start() << '\n';
  out << "outputs:" << join(m.outputs().symbols()) << '\n';
  out << "alphabet:" << join(m.inputs().symbols()) << '\n';
  for (std::size_t s = 0; s < m.state_count(); ++s) {
    for (std::size_t a = 0; a < m.inputs().size(); ++a) {
      const auto& e = m.edge(s, a);
      if (e.to != kNoTransition) {
        out << "trans: " << s << ' ' << m.inputs().at(a) << ' ' << e.to << ' '
            << m.outputs().at(static_cast<std::size_t>(e.output)) << '\n';
      }
    }
  }
}

namespace {

std::ifstream open_in(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open '" + path + "'");
  return in;
}

std::ofstream open_out(const std::string& path) {
  std::ofstream out(path);
  if (!out) throw Error("cannot write '" + path + "'");
  return out;
}

}  // namespace

Dfa load_dfa(const std::string& path) {
  auto in = open_in(path);
  return read_dfa(in);
}

void save_dfa(const std::string& path, const Dfa& d) {
  auto out = open_out(path);
  write_dfa(out, d);
}

MealyMachine load_mealy(const std::string& path) {
  auto in = open_in(path);
  return read_mealy(in);
}

void save_mealy(const std::string& path, const MealyMachine& m) {
  auto out = open_out(path);
  write_mealy(out, m);
}

}  // namespace phoenix::automata
