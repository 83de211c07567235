#pragma once

// Control-plane event traces: the data model, the line-oriented trace file
// format, benign/malicious trace generation, and the attack-variant catalog.

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "phoenix/pltl.hpp"
#include "phoenix/rng.hpp"

namespace phoenix::traces {

using pltl::TraceLabel;

/// One protocol message with its payload predicates.
struct Event {
  std::string label;
  /// Kept in file order so writing reproduces the input.
  std::vector<std::pair<std::string, bool>> predicates;

  bool predicate(const std::string& name) const;
  friend bool operator==(const Event&, const Event&) = default;
};

using Session = std::vector<Event>;

struct EventTrace {
  std::vector<Session> sessions;
  std::optional<TraceLabel> label;
  /// Positions in `sessions` holding injected attack variants.
  std::vector<std::size_t> attack_sessions;

  std::vector<Event> events() const;
  std::size_t event_count() const;
  friend bool operator==(const EventTrace&, const EventTrace&) = default;
};

enum class Layer { RRC, NAS };
std::string to_string(Layer layer);
Layer parse_layer(const std::string& text);

struct InitiationLabels {
  std::set<std::string> labels{"rrcConnectionRequest", "attachRequest", "serviceRequest", "tauRequest"};
  bool contains(const std::string& label) const { return labels.count(label) != 0; }
};

/// Layer implied by a session's connection-initiation message.
Layer layer_of(const Session& s);

/// One-hot message proposition plus the event's predicate values.
pltl::State event_to_state(const Event& e, const pltl::Alphabet& alphabet);
pltl::Trace to_state_trace(const EventTrace& t, const pltl::Alphabet& alphabet);

/// Automaton input symbol: the label followed by `+name` for every true
/// predicate, names sorted.
std::string event_symbol(const Event& e);
std::vector<std::string> symbol_word(const EventTrace& t);

// ---------------------------------------------------------------------------
// Files

struct ParsedTraces {
  std::vector<EventTrace> traces;
  std::vector<std::string> warnings;
};

ParsedTraces parse_traces(std::istream& in, const InitiationLabels& init = {});
void write_traces(std::ostream& out, const std::vector<EventTrace>& traces);
ParsedTraces load_traces(const std::string& path, const InitiationLabels& init = {});
void save_traces(const std::string& path, const std::vector<EventTrace>& traces);

/// Message labels, then `%predicates`, then predicate names; one per line.
pltl::Alphabet read_alphabet(std::istream& in);
void write_alphabet(std::ostream& out, const pltl::Alphabet& alphabet);
pltl::Alphabet load_alphabet(const std::string& path);

// ---------------------------------------------------------------------------
// Generation

using phoenix::Rng;

struct AttackEntry {
  std::string name;
  Layer layer = Layer::RRC;
  std::vector<Session> variants;
};

/// Attack name to its undesired-behavior session variants.
class VariantCatalog {
 public:
  /// Adds or replaces an attack; validates every variant.
  void put(AttackEntry entry, const InitiationLabels& init = {});
  /// Appends variants to an existing attack (or creates it).
  void extend(AttackEntry entry, const InitiationLabels& init = {});

  const AttackEntry& at(const std::string& name) const;
  bool contains(const std::string& name) const { return entries_.count(name) != 0; }
  std::vector<std::string> names() const;
  std::vector<std::string> names(Layer layer) const;
  std::size_t size() const { return entries_.size(); }

 private:
  std::map<std::string, AttackEntry> entries_;
};

struct GenOptions {
  /// Draw benign sessions with replacement (default) or without.
  bool with_replacement = true;
};

std::vector<EventTrace> gen_benign(const std::vector<Session>& seeds, std::size_t sessions_per_trace,
                                   std::size_t count, std::uint64_t seed, GenOptions options = {});
std::vector<EventTrace> gen_malicious(const std::vector<Session>& seeds, const VariantCatalog& catalog,
                                      const std::string& attack, std::size_t sessions_per_trace,
                                      std::size_t count, std::uint64_t seed, GenOptions options = {});

// ---------------------------------------------------------------------------
// Built-in corpus

/// All message labels and predicates used by the built-in corpus.
const pltl::Alphabet& default_alphabet();
const std::vector<Session>& default_seed_sessions(Layer layer);
/// Built-in attack variants.
VariantCatalog default_catalog();
/// Defaults extended/overridden by every `*.trc` file in `dir` (empty = none).
VariantCatalog load_catalog(const std::string& dir, const InitiationLabels& init = {});
/// Hand-written reference PLTL signature for a built-in attack, formula text.
std::optional<std::string> reference_signature(const std::string& attack);

}  // namespace phoenix::traces
