#pragma once

// Signature database, the monitoring engine, evaluation metrics, the
// throughput benchmark and lower-bound memory reports.

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "phoenix/automata.hpp"
#include "phoenix/metrics.hpp"
#include "phoenix/pltl.hpp"
#include "phoenix/rpni.hpp"
#include "phoenix/synth.hpp"
#include "phoenix/traces.hpp"

namespace phoenix::harness {

enum class Kind { Pltl, Dfa, Mealy };
std::string to_string(Kind k);
Kind parse_kind(const std::string& text);

enum class Severity { Low, Medium, High };
std::string to_string(Severity s);
Severity parse_severity(const std::string& text);

struct SignatureEntry {
  std::string name;
  traces::Layer layer = traces::Layer::NAS;
  Kind kind = Kind::Pltl;
  Severity severity = Severity::Medium;
  std::string remedy;
  /// Formula text for pltl; automaton path (relative to the db file) otherwise.
  std::string body;
  /// Attack this signature detects; defaults to `name`. Unused for mm.
  std::string attack;

  std::optional<pltl::Formula> formula;
  std::shared_ptr<const automata::Dfa> dfa;
  std::shared_ptr<const automata::MealyMachine> mealy;

  /// Attacks this signature reports: its `attack`, or every non-benign output.
  std::vector<std::string> targets() const;
};

/// Immutable after load; entries are dispatched in file order.
struct SignatureDb {
  pltl::Alphabet alphabet;
  std::vector<SignatureEntry> entries;

  /// Parses and validates the body of `e` (relative paths against `base_dir`)
  /// and appends it. Throws ValidationError on a duplicate name.
  void add(SignatureEntry e, const std::string& base_dir = ".");
  const SignatureEntry* find(const std::string& name) const;
};

/// Block format: `[signature]` followed by `key=value` lines (name, layer,
/// kind, severity, remedy, body, optional attack). `#` starts a comment line.
/// Throws ParseError (line number) or ValidationError.
SignatureDb read_db(std::istream& in, const pltl::Alphabet& alphabet, const std::string& base_dir = ".");
SignatureDb load_db(const std::string& path, const pltl::Alphabet& alphabet = traces::default_alphabet());
void write_db(std::ostream& out, const SignatureDb& db);
/// Writes the db file; automaton bodies are saved next to it under their
/// recorded relative paths.
void save_db(const std::string& path, const SignatureDb& db);

// ---------------------------------------------------------------------------
// Monitoring

enum class Mode { StopFirst, ReportAll };

enum class HitKind { DfaReject, MealyOutput, PltlFalse };
std::string to_string(HitKind k);

struct Verdict {
  std::size_t trace = 0;
  std::size_t step = 0;
  std::size_t signature = 0;
  HitKind kind = HitKind::PltlFalse;
  /// Mealy output name; empty otherwise.
  std::string output;
  friend bool operator==(const Verdict&, const Verdict&) = default;
};

/// A trace converted once for every monitor type.
struct PreparedTrace {
  std::vector<pltl::State> states;
  /// Per event, the index in the engine's symbol table.
  std::vector<std::uint32_t> symbols;
};

struct MonitorReport {
  std::vector<Verdict> verdicts;
  /// Per trace, the attacks flagged (signature targets, or Mealy outputs).
  std::vector<std::vector<std::string>> flagged;
  /// Per signature, events skipped because their symbol is outside the
  /// automaton's alphabet.
  std::vector<std::size_t> skipped;
  /// Per signature, Mealy steps on undefined transitions.
  std::vector<std::size_t> undefined;
};

/// One engine per stream; shares the immutable db.
class Engine {
 public:
  explicit Engine(const SignatureDb& db);

  /// Throws ValidationError when an event does not fit the pltl alphabet.
  PreparedTrace prepare(const traces::EventTrace& t);
  /// Runs every signature over the trace from a fresh state; `trace_id` is
  /// copied into the verdicts. Appends to `report`.
  void run(const PreparedTrace& t, std::size_t trace_id, Mode mode, MonitorReport& report);
  /// Events processed so far; used to keep benchmark loops observable.
  std::uint64_t events_seen() const noexcept { return events_; }

 private:
  struct Impl;
  std::shared_ptr<Impl> impl_;
  std::uint64_t events_ = 0;
};

MonitorReport run_monitors(const SignatureDb& db, const std::vector<traces::EventTrace>& traces, Mode mode);

// ---------------------------------------------------------------------------
// Evaluation

struct MetricsRow {
  std::string signature;
  std::string attack;
  Confusion counts;
};

struct MetricsReport {
  /// One row per (signature, target attack). Traces labeled with other
  /// attacks are ignored for that row.
  std::vector<MetricsRow> rows;
  /// Trace-level: any verdict versus the trace label.
  Confusion overall;
};

/// Throws ValidationError when a trace has no label.
MetricsReport evaluate(const SignatureDb& db, const std::vector<traces::EventTrace>& traces);

// ---------------------------------------------------------------------------
// Throughput

struct Throughput {
  double mean = 0;
  double stddev = 0;
  std::size_t messages = 0;
  std::size_t repeat = 0;
};

/// Messages per second over `repeat` timed runs of the prepared trace.
Throughput bench_throughput(const SignatureDb& db, const traces::EventTrace& trace, std::size_t repeat);

// ---------------------------------------------------------------------------
// Memory

/// ceil(log2 n), with 0 for n <= 1.
std::uint64_t clog2(std::uint64_t n) noexcept;

/// Number of distinct operator labels a PLTL node can carry.
inline constexpr std::uint64_t kPltlOperatorCount = 9;

struct MemoryFigures {
  /// Structure bits (automaton table, or formula encoding).
  std::uint64_t structure_bits = 0;
  /// Live monitor bits (PLTL previous/current values); 0 for automata.
  std::uint64_t monitor_bits = 0;
  std::uint64_t header_bytes = 0;
  std::uint64_t total_bits() const noexcept { return structure_bits + monitor_bits + 8 * header_bytes; }
};

/// DFA with N states, M transitions, A symbols.
MemoryFigures dfa_memory(std::uint64_t n, std::uint64_t m, std::uint64_t a);
/// Mealy machine with N states, M transitions, I inputs, O outputs.
MemoryFigures mealy_memory(std::uint64_t n, std::uint64_t m, std::uint64_t i, std::uint64_t o);
/// Formula with P proposition nodes, T operator nodes, alphabet size A.
MemoryFigures pltl_memory(std::uint64_t p, std::uint64_t t, std::uint64_t a);
MemoryFigures memory_of(const SignatureEntry& e, std::size_t alphabet_size);

struct MemoryRow {
  std::string signature;
  traces::Layer layer;
  Kind kind;
  MemoryFigures figures;
};

struct MemoryReport {
  std::vector<MemoryRow> rows;
  /// Totals of structure + monitor bits (headers excluded) per layer and kind.
  std::map<std::pair<traces::Layer, Kind>, std::uint64_t> totals;
};

MemoryReport mem_report(const SignatureDb& db);

/// Published per-layer totals, for side-by-side display only.
std::optional<std::uint64_t> reference_total_bits(traces::Layer layer, Kind kind);

// ---------------------------------------------------------------------------
// Training helpers

/// PLTL sample: benign traces are positive; malicious traces, truncated per
/// `cut`, are negative. Cutting at the end of the attack session keeps what
/// follows the attack out of the sample.
synth::SynthesisProblem pltl_problem(const pltl::Alphabet& alphabet, const std::vector<traces::EventTrace>& benign,
                                     const std::vector<traces::EventTrace>& malicious,
                                     learn::NegativeCut cut = learn::NegativeCut::AttackSession);

/// Attack name behind a Mealy output, or nullopt for benign/foreign outputs.
std::optional<std::string> attack_of_output(const std::string& output);

}  // namespace phoenix::harness
