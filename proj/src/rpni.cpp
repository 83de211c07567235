#include "phoenix/rpni.hpp"

#include <algorithm>
#include <deque>
#include <limits>

#include "phoenix/error.hpp"

namespace phoenix::learn {

namespace {

std::string show(const Word& w) {
  if (w.empty()) return "<empty word>";
  std::string out;
  for (const auto& s : w) {
    if (!out.empty()) out += ' ';
    out += s;
  }
  return out;
}

constexpr std::int32_t kNone = -1;

enum Label : std::uint8_t { kUnknown = 0, kAccept = 1, kReject = 2 };

/// Prefix tree plus the mutable quotient built from it during merging. Nodes
/// are numbered in breadth-first order with children taken in symbol order, so
/// node ids double as the canonical merge order.
class Learner {
 public:
  Learner(std::size_t symbols, bool mealy) : symbols_(symbols), mealy_(mealy) {}

  void build(const std::vector<std::vector<std::size_t>>& inputs, const std::vector<std::vector<std::int32_t>>& outputs,
             const std::vector<Label>& labels) {
    // Build an unordered trie first, then renumber breadth-first.
    std::vector<std::vector<std::int32_t>> trie(1, std::vector<std::int32_t>(symbols_, kNone));
    std::vector<std::vector<std::int32_t>> trie_out(1, std::vector<std::int32_t>(mealy_ ? symbols_ : 0, kNone));
    std::vector<Label> trie_label(1, kUnknown);
    for (std::size_t w = 0; w < inputs.size(); ++w) {
      std::size_t node = 0;
      for (std::size_t i = 0; i < inputs[w].size(); ++i) {
        const auto a = inputs[w][i];
        if (mealy_) {
          auto& o = trie_out[node][a];
          if (o != kNone && o != outputs[w][i]) {
            throw ValidationError("inconsistent sample: two outputs after the same input prefix");
          }
          o = outputs[w][i];
        }
        if (trie[node][a] == kNone) {
          trie[node][a] = static_cast<std::int32_t>(trie.size());
          trie.emplace_back(symbols_, kNone);
          trie_out.emplace_back(mealy_ ? symbols_ : 0, kNone);
          trie_label.push_back(kUnknown);
        }
        node = static_cast<std::size_t>(trie[node][a]);
      }
      if (!mealy_) {
        auto& l = trie_label[node];
        if (l != kUnknown && l != labels[w]) throw ValidationError("inconsistent sample: word is both positive and negative");
        l = labels[w];
      }
    }

    std::vector<std::int32_t> order(trie.size(), kNone);
    std::vector<std::size_t> bfs{0};
    order[0] = 0;
    for (std::size_t head = 0; head < bfs.size(); ++head) {
      for (std::size_t a = 0; a < symbols_; ++a) {
        const auto c = trie[bfs[head]][a];
        if (c != kNone) {
          order[c] = static_cast<std::int32_t>(bfs.size());
          bfs.push_back(static_cast<std::size_t>(c));
        }
      }
    }

    const std::size_t n = trie.size();
    delta_.assign(n * symbols_, kNone);
    if (mealy_) out_.assign(n * symbols_, kNone);
    label_.assign(n, kUnknown);
    for (std::size_t old = 0; old < n; ++old) {
      const auto id = static_cast<std::size_t>(order[old]);
      label_[id] = trie_label[old];
      for (std::size_t a = 0; a < symbols_; ++a) {
        if (trie[old][a] == kNone) continue;
        delta_[id * symbols_ + a] = order[trie[old][a]];
        if (mealy_) out_[id * symbols_ + a] = trie_out[old][a];
      }
    }
  }

  std::size_t size() const { return label_.size(); }

  void run(RpniStats* stats) {
    red_ = {0};
    is_red_.assign(size(), 0);
    is_red_[0] = 1;
    std::size_t merges = 0;
    std::size_t attempts = 0;
    for (;;) {
      // Smallest blue state: a non-red target of a red state's transition.
      std::int32_t blue = kNone;
      std::size_t from = 0;
      std::size_t via = 0;
      for (auto r : red_) {
        for (std::size_t a = 0; a < symbols_; ++a) {
          const auto t = delta_[r * symbols_ + a];
          if (t != kNone && !is_red_[t] && (blue == kNone || t < blue)) {
            blue = t;
            from = r;
            via = a;
          }
        }
      }
      if (blue == kNone) break;

      bool merged = false;
      for (auto r : red_) {
        ++attempts;
        if (try_merge(r, static_cast<std::size_t>(blue), from, via)) {
          merged = true;
          ++merges;
          break;
        }
      }
      if (!merged) {
        red_.push_back(static_cast<std::size_t>(blue));
        is_red_[blue] = 1;
      }
    }
    if (stats) {
      stats->pta_states = size();
      stats->merges = merges;
      stats->merge_attempts = attempts;
    }
  }

  /// Red states renumbered in discovery order from the start state.
  std::vector<std::int32_t> renumber() const {
    std::vector<std::int32_t> id(size(), kNone);
    std::vector<std::size_t> queue{0};
    id[0] = 0;
    for (std::size_t head = 0; head < queue.size(); ++head) {
      for (std::size_t a = 0; a < symbols_; ++a) {
        const auto t = delta_[queue[head] * symbols_ + a];
        if (t != kNone && id[t] == kNone) {
          id[t] = static_cast<std::int32_t>(queue.size());
          queue.push_back(static_cast<std::size_t>(t));
        }
      }
    }
    return id;
  }

  std::int32_t delta(std::size_t s, std::size_t a) const { return delta_[s * symbols_ + a]; }
  std::int32_t output(std::size_t s, std::size_t a) const { return out_[s * symbols_ + a]; }
  Label label(std::size_t s) const { return label_[s]; }

 private:
  struct Undo {
    enum Kind : std::uint8_t { Delta, Out, Lab } kind;
    std::size_t index;
    std::int32_t old;
  };

  void set_delta(std::size_t i, std::int32_t v) {
    log_.push_back({Undo::Delta, i, delta_[i]});
    delta_[i] = v;
  }
  void set_out(std::size_t i, std::int32_t v) {
    log_.push_back({Undo::Out, i, out_[i]});
    out_[i] = v;
  }
  void set_label(std::size_t s, Label v) {
    log_.push_back({Undo::Lab, s, label_[s]});
    label_[s] = v;
  }

  void rollback() {
    for (auto it = log_.rbegin(); it != log_.rend(); ++it) {
      switch (it->kind) {
        case Undo::Delta: delta_[it->index] = it->old; break;
        case Undo::Out: out_[it->index] = it->old; break;
        case Undo::Lab: label_[it->index] = static_cast<Label>(it->old); break;
      }
    }
    log_.clear();
  }

  /// Redirects from --via--> blue onto red and folds blue's subtree into red.
  bool try_merge(std::size_t red, std::size_t blue, std::size_t from, std::size_t via) {
    log_.clear();
    set_delta(from * symbols_ + via, static_cast<std::int32_t>(red));
    stack_.clear();
    stack_.emplace_back(red, blue);
    while (!stack_.empty()) {
      const auto [r, b] = stack_.back();
      stack_.pop_back();
      if (!mealy_ && label_[b] != kUnknown) {
        if (label_[r] == kUnknown) {
          set_label(r, label_[b]);
        } else if (label_[r] != label_[b]) {
          rollback();
          return false;
        }
      }
      // Earlier folds may have attached subtrees to b, so walk its current
      // transitions rather than its prefix-tree children.
      for (std::size_t a = 0; a < symbols_; ++a) {
        const std::size_t bi = b * symbols_ + a;
        if (delta_[bi] == kNone) continue;
        const std::size_t ri = r * symbols_ + a;
        if (delta_[ri] == kNone) {
          set_delta(ri, delta_[bi]);
          if (mealy_) set_out(ri, out_[bi]);
          continue;
        }
        if (mealy_ && out_[ri] != out_[bi]) {
          rollback();
          return false;
        }
        stack_.emplace_back(static_cast<std::size_t>(delta_[ri]), static_cast<std::size_t>(delta_[bi]));
      }
    }
    log_.clear();
    return true;
  }

  std::size_t symbols_;
  bool mealy_;
  std::vector<std::int32_t> delta_;
  std::vector<std::int32_t> out_;
  std::vector<Label> label_;
  std::vector<std::size_t> red_;
  std::vector<std::uint8_t> is_red_;
  std::vector<Undo> log_;
  std::vector<std::pair<std::size_t, std::size_t>> stack_;
};

automata::SymbolTable sorted_symbols(const std::set<std::string>& symbols) {
  return automata::SymbolTable(std::vector<std::string>(symbols.begin(), symbols.end()));
}

std::vector<std::size_t> encode(const Word& w, const automata::SymbolTable& table) {
  std::vector<std::size_t> out;
  out.reserve(w.size());
  for (const auto& s : w) out.push_back(*table.find(s));
  return out;
}

}  // namespace

std::string vulnerability_output(const std::string& attack) { return "vulnerability_" + attack; }

DfaSample prep_dfa_sample(const std::vector<Word>& positive, const std::vector<Word>& negative) {
  DfaSample s;
  s.positive.insert(Word{});
  for (const auto& w : positive) {
    for (std::size_t k = 1; k <= w.size(); ++k) s.positive.emplace(w.begin(), w.begin() + static_cast<std::ptrdiff_t>(k));
  }
  for (const auto& w : negative) {
    if (s.positive.count(w)) throw ValidationError("sample conflict: word is both positive and negative: " + show(w));
    s.negative.insert(w);
  }
  return s;
}

MealySample prep_mm_sample(const std::map<std::string, std::pair<std::vector<Word>, std::vector<Word>>>& per_attack,
                           NegativeLabeling labeling) {
  // Input word -> (outputs, source) for conflict reporting.
  std::map<Word, std::pair<Word, std::string>> seen;
  MealySample sample;
  auto add = [&](const Word& input, Word output, const std::string& source) {
    auto [it, fresh] = seen.try_emplace(input, output, source);
    if (!fresh) {
      if (it->second.first != output) {
        throw ValidationError("sample conflict between '" + it->second.second + "' and '" + source +
                              "' on input: " + show(input));
      }
      return;
    }
    sample.pairs.push_back({input, std::move(output)});
  };
  const std::string benign(automata::kBenign);
  for (const auto& [attack, words] : per_attack) {
    for (const auto& w : words.first) add(w, Word(w.size(), benign), "benign (" + attack + ")");
  }
  for (const auto& [attack, words] : per_attack) {
    const auto vuln = vulnerability_output(attack);
    for (const auto& w : words.second) {
      if (w.empty()) throw ValidationError("negative trace for '" + attack + "' is empty");
      Word out(w.size(), labeling == NegativeLabeling::EveryStep ? vuln : benign);
      out.back() = vuln;
      add(w, std::move(out), attack);
    }
  }

  // `seen` is ordered, so every extension of a word follows it directly.
  std::set<std::size_t> drop;
  std::map<Word, std::size_t> index;
  for (std::size_t i = 0; i < sample.pairs.size(); ++i) index.emplace(sample.pairs[i].input, i);
  for (auto it = seen.begin(); it != seen.end(); ++it) {
    const auto& [w, entry] = *it;
    if (w.empty() || entry.first.back() == benign) continue;
    for (auto next = std::next(it); next != seen.end(); ++next) {
      const auto& longer = next->first;
      if (longer.size() <= w.size() || !std::equal(w.begin(), w.end(), longer.begin())) break;
      if (next->second.first[w.size() - 1] != entry.first.back()) {
        drop.insert(index.at(w));
        break;
      }
    }
  }
  if (!drop.empty()) {
    std::vector<IOPair> kept;
    for (std::size_t i = 0; i < sample.pairs.size(); ++i) {
      (drop.count(i) ? sample.dropped : kept).push_back(std::move(sample.pairs[i]));
    }
    sample.pairs = std::move(kept);
  }
  return sample;
}

automata::Dfa rpni(const DfaSample& sample, RpniStats* stats) {
  std::set<std::string> symbols;
  for (const auto* set : {&sample.positive, &sample.negative}) {
    for (const auto& w : *set) symbols.insert(w.begin(), w.end());
  }
  auto table = sorted_symbols(symbols);

  std::vector<std::vector<std::size_t>> inputs;
  std::vector<Label> labels;
  for (const auto& w : sample.positive) {
    inputs.push_back(encode(w, table));
    labels.push_back(kAccept);
  }
  for (const auto& w : sample.negative) {
    inputs.push_back(encode(w, table));
    labels.push_back(kReject);
  }

  Learner learner(table.size(), false);
  learner.build(inputs, {}, labels);
  learner.run(stats);

  const auto id = learner.renumber();
  const auto count = static_cast<std::size_t>(std::count_if(id.begin(), id.end(), [](auto v) { return v != kNone; }));
  automata::Dfa dfa(count, 0, table);
  for (std::size_t s = 0; s < id.size(); ++s) {
    if (id[s] == kNone) continue;
    const auto from = static_cast<std::size_t>(id[s]);
    // Unknown states default to accepting.
    dfa.set_accepting(from, learner.label(s) != kReject);
    for (std::size_t a = 0; a < table.size(); ++a) {
      const auto t = learner.delta(s, a);
      if (t != kNone) dfa.add_transition(from, a, static_cast<std::size_t>(id[t]));
    }
  }
  return dfa;
}

automata::MealyMachine rpni_mealy(const MealySample& sample, RpniStats* stats) {
  std::set<std::string> inputs_set;
  std::set<std::string> outputs_set{std::string(automata::kBenign)};
  for (const auto& p : sample.pairs) {
    if (p.input.size() != p.output.size()) {
      throw ValidationError("input and output words differ in length: " + show(p.input));
    }
    inputs_set.insert(p.input.begin(), p.input.end());
    outputs_set.insert(p.output.begin(), p.output.end());
  }
  auto inputs = sorted_symbols(inputs_set);
  // benign first, vulnerability names after in sorted order
  outputs_set.erase(std::string(automata::kBenign));
  std::vector<std::string> out_names{std::string(automata::kBenign)};
  out_names.insert(out_names.end(), outputs_set.begin(), outputs_set.end());
  automata::SymbolTable outputs(out_names);

  std::vector<std::vector<std::size_t>> in_words;
  std::vector<std::vector<std::int32_t>> out_words;
  for (const auto& p : sample.pairs) {
    in_words.push_back(encode(p.input, inputs));
    std::vector<std::int32_t> o;
    for (const auto& s : p.output) o.push_back(static_cast<std::int32_t>(*outputs.find(s)));
    out_words.push_back(std::move(o));
  }

  Learner learner(inputs.size(), true);
  learner.build(in_words, out_words, std::vector<Label>(in_words.size(), kUnknown));
  learner.run(stats);

  const auto id = learner.renumber();
  const auto count = static_cast<std::size_t>(std::count_if(id.begin(), id.end(), [](auto v) { return v != kNone; }));
  automata::MealyMachine mm(count, 0, inputs, outputs);
  for (std::size_t s = 0; s < id.size(); ++s) {
    if (id[s] == kNone) continue;
    for (std::size_t a = 0; a < inputs.size(); ++a) {
      const auto t = learner.delta(s, a);
      if (t != kNone) {
        mm.add_transition(static_cast<std::size_t>(id[s]), a, static_cast<std::size_t>(id[t]),
                          static_cast<std::size_t>(learner.output(s, a)));
      }
    }
  }
  return mm;
}

std::vector<Word> words_of(const std::vector<traces::EventTrace>& traces) {
  std::vector<Word> out;
  out.reserve(traces.size());
  for (const auto& t : traces) out.push_back(traces::symbol_word(t));
  return out;
}

NegativeCut parse_negative_cut(const std::string& text) {
  if (text == "verbatim") return NegativeCut::Verbatim;
  if (text == "session") return NegativeCut::AttackSession;
  if (text == "deviation") return NegativeCut::FirstDeviation;
  throw ValidationError("unknown negative cut '" + text + "' (expected verbatim, session or deviation)");
}

std::string to_string(NegativeCut cut) {
  switch (cut) {
    case NegativeCut::Verbatim: return "verbatim";
    case NegativeCut::AttackSession: return "session";
    case NegativeCut::FirstDeviation: return "deviation";
  }
  return {};
}

std::set<Word> session_prefixes(const std::vector<traces::EventTrace>& benign) {
  std::set<Word> out;
  for (const auto& t : benign) {
    for (const auto& s : t.sessions) {
      Word w;
      for (const auto& e : s) {
        w.push_back(traces::event_symbol(e));
        out.insert(w);
      }
    }
  }
  return out;
}

traces::EventTrace cut_negative(const traces::EventTrace& t, const std::set<Word>& benign_prefixes,
                                NegativeCut cut) {
  if (cut == NegativeCut::Verbatim || t.attack_sessions.empty()) return t;
  const auto first = *std::min_element(t.attack_sessions.begin(), t.attack_sessions.end());
  traces::EventTrace out;
  out.label = t.label;
  out.attack_sessions = {first};
  out.sessions.assign(t.sessions.begin(), t.sessions.begin() + static_cast<std::ptrdiff_t>(first));
  traces::Session session;
  Word symbols;
  for (const auto& e : t.sessions.at(first)) {
    session.push_back(e);
    symbols.push_back(traces::event_symbol(e));
    if (cut == NegativeCut::FirstDeviation && !benign_prefixes.count(symbols)) break;
  }
  out.sessions.push_back(std::move(session));
  return out;
}

Word negative_word(const traces::EventTrace& t, const std::set<Word>& benign_prefixes, NegativeCut cut) {
  return traces::symbol_word(cut_negative(t, benign_prefixes, cut));
}

std::vector<Word> negative_words(const std::vector<traces::EventTrace>& malicious,
                                 const std::vector<traces::EventTrace>& benign, NegativeCut cut) {
  const auto prefixes = cut == NegativeCut::FirstDeviation ? session_prefixes(benign) : std::set<Word>{};
  std::vector<Word> out;
  out.reserve(malicious.size());
  for (const auto& t : malicious) out.push_back(negative_word(t, prefixes, cut));
  return out;
}

automata::Dfa learn_dfa(const std::vector<traces::EventTrace>& benign,
                        const std::vector<traces::EventTrace>& malicious, const LearnOptions& options,
                        RpniStats* stats) {
  return rpni(prep_dfa_sample(words_of(benign), negative_words(malicious, benign, options.cut)), stats);
}

automata::MealyMachine learn_mealy(const std::vector<traces::EventTrace>& benign,
                                   const std::map<std::string, std::vector<traces::EventTrace>>& malicious,
                                   const LearnOptions& options, RpniStats* stats) {
  std::map<std::string, std::pair<std::vector<Word>, std::vector<Word>>> per_attack;
  const auto positives = words_of(benign);
  for (const auto& [attack, traces] : malicious) {
    per_attack[attack] = {positives, negative_words(traces, benign, options.cut)};
  }
  return rpni_mealy(prep_mm_sample(per_attack, options.labeling), stats);
}

}  // namespace phoenix::learn
