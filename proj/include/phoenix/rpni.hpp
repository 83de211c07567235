#pragma once

// Passive learning of DFA and Mealy signatures with RPNI over a prefix-tree
// acceptor, plus the sample preparation that turns labeled traces into an
// informed sample.

#include <cstddef>
#include <map>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "phoenix/automata.hpp"
#include "phoenix/traces.hpp"

namespace phoenix::learn {

using Word = std::vector<std::string>;

/// Informed sample for DFA learning. `positive` is prefix-closed and holds the
/// empty word once prepared.
struct DfaSample {
  std::set<Word> positive;
  std::set<Word> negative;
};

struct IOPair {
  Word input;
  Word output;
  friend bool operator==(const IOPair&, const IOPair&) = default;
};

struct MealySample {
  std::vector<IOPair> pairs;
  /// Negative pairs left out because their input is a proper prefix of
  /// another pair whose output differs at that step.
  std::vector<IOPair> dropped;
};

/// Where a negative Mealy trace carries its vulnerability output.
enum class NegativeLabeling { FinalStep, EveryStep };

/// Output symbol emitted for an attack, `vulnerability_<attack>`.
std::string vulnerability_output(const std::string& attack);

/// P = {eps} plus every prefix of every positive word; N = negatives verbatim.
/// Throws ValidationError naming the first word that lands in both.
DfaSample prep_dfa_sample(const std::vector<Word>& positive, const std::vector<Word>& negative);

/// Per attack: (positive words, negative words). Positives of every attack are
/// pooled as all-benign pairs. Throws on conflicting outputs for one input.
/// A negative that is a proper prefix of a longer word disagreeing at its
/// last step is moved to `dropped` (the longer word already covers it).
MealySample prep_mm_sample(const std::map<std::string, std::pair<std::vector<Word>, std::vector<Word>>>& per_attack,
                           NegativeLabeling labeling = NegativeLabeling::FinalStep);

struct RpniStats {
  std::size_t pta_states = 0;
  std::size_t merges = 0;
  std::size_t merge_attempts = 0;
};

/// Blue-fringe RPNI in breadth-first canonical order. The alphabet is the set
/// of symbols in the sample, sorted. Throws ValidationError when the sample is
/// inconsistent.
automata::Dfa rpni(const DfaSample& sample, RpniStats* stats = nullptr);
automata::MealyMachine rpni_mealy(const MealySample& sample, RpniStats* stats = nullptr);

/// Trace-level conveniences: words from `traces::symbol_word`.
std::vector<Word> words_of(const std::vector<traces::EventTrace>& traces);

/// How much of a malicious trace becomes the negative word.
enum class NegativeCut {
  Verbatim,        // the whole trace
  AttackSession,   // up to the end of its first attack session
  FirstDeviation,  // up to the first event of that session that no benign session prefix explains
};

NegativeCut parse_negative_cut(const std::string& text);
std::string to_string(NegativeCut cut);

/// Every non-empty prefix of every session of the given traces, as symbols.
std::set<Word> session_prefixes(const std::vector<traces::EventTrace>& benign);

/// Truncates a malicious trace per `cut`. Traces without recorded attack
/// sessions are always kept whole.
traces::EventTrace cut_negative(const traces::EventTrace& t, const std::set<Word>& benign_prefixes,
                                NegativeCut cut);
Word negative_word(const traces::EventTrace& t, const std::set<Word>& benign_prefixes, NegativeCut cut);
std::vector<Word> negative_words(const std::vector<traces::EventTrace>& malicious,
                                 const std::vector<traces::EventTrace>& benign, NegativeCut cut);

struct LearnOptions {
  NegativeCut cut = NegativeCut::FirstDeviation;
  NegativeLabeling labeling = NegativeLabeling::FinalStep;
};

/// Learns one attack's DFA from benign and malicious traces.
automata::Dfa learn_dfa(const std::vector<traces::EventTrace>& benign,
                        const std::vector<traces::EventTrace>& malicious, const LearnOptions& options = {},
                        RpniStats* stats = nullptr);

/// Learns a combined Mealy machine. `malicious` maps attack names to traces;
/// benign traces are shared by all attacks.
automata::MealyMachine learn_mealy(const std::vector<traces::EventTrace>& benign,
                                   const std::map<std::string, std::vector<traces::EventTrace>>& malicious,
                                   const LearnOptions& options = {}, RpniStats* stats = nullptr);

}  // namespace phoenix::learn
