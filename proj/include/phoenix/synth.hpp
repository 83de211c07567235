#pragma once

// SAT-based synthesis of minimal PLTL formulas consistent with an informed
// sample, candidate enumeration, and hold-out selection.

#include <chrono>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "phoenix/metrics.hpp"
#include "phoenix/pltl.hpp"
#include "phoenix/sat.hpp"

namespace phoenix::synth {

/// What consistency means for a trace: the formula holds at every position,
/// or only at the last one.
enum class Semantics { Global, LastPosition };

struct SynthesisProblem {
  pltl::Alphabet alphabet;
  std::vector<pltl::Trace> positive;
  std::vector<pltl::Trace> negative;
  /// Largest size tried (the threshold on the node count).
  std::size_t max_size = 12;
  Semantics semantics = Semantics::Global;
  /// Offer Once/Historically as node labels; otherwise only the core set.
  bool once_historically = true;
  /// Leave out propositions that are false in every sample state.
  bool prune_propositions = true;
  /// Wall-clock budget for a whole synthesis call; nullopt = unlimited.
  std::optional<std::chrono::milliseconds> timeout = std::chrono::seconds(60);
};

/// Holds at every position (Global) or at the final position.
bool satisfied(const pltl::Formula& f, const pltl::Trace& t, Semantics semantics);
bool consistent(const pltl::Formula& f, const SynthesisProblem& p);

/// Node label in the encoding.
struct NodeLabel {
  pltl::Op op;
  std::size_t prop = 0;
};

/// CNF for "some formula with exactly `size` nodes is consistent with the
/// sample", with the variable layout needed to decode models. Nodes are
/// numbered in post-order; node size-1 is the root.
struct Encoding {
  sat::Cnf cnf;
  std::size_t size = 0;
  std::vector<NodeLabel> labels;
  /// label_var[i][k]: node i carries labels[k].
  std::vector<std::vector<sat::Lit>> label_var;
  /// left_var[i][j]: left child of binary node i is j (j <= i-2); 0 if absent.
  std::vector<std::vector<sat::Lit>> left_var;
  /// value_var[t][i][pos] for each distinct sample trace t.
  std::vector<std::vector<std::vector<sat::Lit>>> value_var;
  /// Distinct traces in encoding order; the first `positive_count` are positive.
  std::vector<pltl::Trace> traces;
  std::size_t positive_count = 0;

  /// Structural literals (labels and left children) true in `model`.
  std::vector<sat::Lit> structure(const sat::Model& model) const;
};

/// Throws ValidationError for an empty alphabet, traces whose states do not
/// match the alphabet, size 0, or a trace that is both positive and negative.
Encoding encode(const SynthesisProblem& p, std::size_t size);

/// Reads the formula out of a model and verifies it against the sample.
/// Throws Error when the model is malformed or the formula is inconsistent.
pltl::Formula decode(const sat::Model& model, const Encoding& e, const SynthesisProblem& p);

/// Unit clauses forcing the encoding's structure to `f` (size(f) must equal
/// the encoding size and every proposition of f must be available).
std::vector<sat::Lit> structure_units(const Encoding& e, const pltl::Formula& f);

enum class Status { Found, BoundExceeded, TimedOut };
std::string to_string(Status s);

struct SynthesisResult {
  Status status = Status::BoundExceeded;
  std::optional<pltl::Formula> formula;
  /// Sizes proven to admit no consistent formula.
  std::vector<std::size_t> refuted_sizes;
};

SynthesisResult synthesize_min(const SynthesisProblem& p);

struct CandidateList {
  std::vector<pltl::Formula> formulas;
  /// Set when enumeration stopped early on the time budget.
  bool timed_out = false;
};

/// Up to k formulas: the minimal one, then further models at the same size
/// (structure blocked), then larger sizes up to max_size.
CandidateList synthesize_candidates(const SynthesisProblem& p, std::size_t k);

struct ScoredCandidate {
  pltl::Formula formula;
  std::size_t size = 0;
  Confusion holdout;
};

/// Attack traces count as positives of the classifier: a trace is flagged
/// when the formula is violated.
Confusion score(const pltl::Formula& f, const std::vector<pltl::Trace>& benign,
                const std::vector<pltl::Trace>& attack, Semantics semantics = Semantics::Global);

/// Index of the best candidate: highest holdout F1, then smallest size, then
/// earliest. Throws ValidationError on an empty list.
std::size_t select_best(const std::vector<ScoredCandidate>& candidates);
std::vector<ScoredCandidate> score_all(const std::vector<pltl::Formula>& formulas,
                                       const std::vector<pltl::Trace>& benign,
                                       const std::vector<pltl::Trace>& attack,
                                       Semantics semantics = Semantics::Global);

struct HoldoutSplit {
  std::vector<pltl::Trace> train_positive;
  std::vector<pltl::Trace> train_negative;
  std::vector<pltl::Trace> holdout_positive;
  std::vector<pltl::Trace> holdout_negative;
};

/// Seeded split stratified by label; each class keeps at least one training
/// trace when it has any.
HoldoutSplit split_holdout(const std::vector<pltl::Trace>& positive, const std::vector<pltl::Trace>& negative,
                           double holdout_fraction, std::uint64_t seed);

struct SignatureOptions {
  std::size_t candidates = 5;
  double holdout = 0.2;
  std::uint64_t seed = 7;
};

struct SignatureReport {
  std::vector<ScoredCandidate> candidates;
  std::optional<std::size_t> best;
  bool timed_out = false;
};

/// The full workflow: split, enumerate candidates on the training part, pick
/// the best on the holdout part. `p.positive`/`p.negative` hold all traces.
SignatureReport synthesize_signature(const SynthesisProblem& p, const SignatureOptions& options = {});

}  // namespace phoenix::synth
