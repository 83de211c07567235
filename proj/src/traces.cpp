#include "phoenix/traces.hpp"

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>

#include "corpus_data.hpp"
#include "phoenix/error.hpp"

namespace phoenix::traces {

bool Event::predicate(const std::string& name) const {
  for (const auto& [k, v] : predicates) {
    if (k == name) return v;
  }
  return false;
}

std::vector<Event> EventTrace::events() const {
  std::vector<Event> out;
  out.reserve(event_count());
  for (const auto& s : sessions) out.insert(out.end(), s.begin(), s.end());
  return out;
}

std::size_t EventTrace::event_count() const {
  std::size_t n = 0;
  for (const auto& s : sessions) n += s.size();
  return n;
}

std::string to_string(Layer layer) { return layer == Layer::RRC ? "RRC" : "NAS"; }

Layer parse_layer(const std::string& text) {
  if (text == "RRC") return Layer::RRC;
  if (text == "NAS") return Layer::NAS;
  throw ValidationError("unknown layer '" + text + "' (expected RRC or NAS)");
}

Layer layer_of(const Session& s) {
  return !s.empty() && s.front().label == "rrcConnectionRequest" ? Layer::RRC : Layer::NAS;
}

pltl::State event_to_state(const Event& e, const pltl::Alphabet& alphabet) {
  pltl::State s(alphabet.size());
  auto label = alphabet.find(e.label);
  if (!label || alphabet.is_predicate(*label)) {
    throw ValidationError("message label '" + e.label + "' is not in the alphabet");
  }
  s.set(*label);
  for (const auto& [name, value] : e.predicates) {
    auto p = alphabet.find(name);
    if (!p || !alphabet.is_predicate(*p)) throw ValidationError("predicate '" + name + "' is not in the alphabet");
    s.set(*p, value);
  }
  return s;
}

pltl::Trace to_state_trace(const EventTrace& t, const pltl::Alphabet& alphabet) {
  pltl::Trace out;
  out.label = t.label;
  out.states.reserve(t.event_count());
  for (const auto& session : t.sessions) {
    for (const auto& e : session) out.states.push_back(event_to_state(e, alphabet));
  }
  return out;
}

std::string event_symbol(const Event& e) {
  std::vector<std::string> on;
  for (const auto& [name, value] : e.predicates) {
    if (value) on.push_back(name);
  }
  std::sort(on.begin(), on.end());
  on.erase(std::unique(on.begin(), on.end()), on.end());
  std::string out = e.label;
  for (const auto& p : on) {
    out += '+';
    out += p;
  }
  return out;
}

std::vector<std::string> symbol_word(const EventTrace& t) {
  std::vector<std::string> out;
  out.reserve(t.event_count());
  for (const auto& s : t.sessions) {
    for (const auto& e : s) out.push_back(event_symbol(e));
  }
  return out;
}

// ---------------------------------------------------------------------------
// Trace files

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

std::vector<std::string> split_ws(const std::string& s) {
  std::istringstream in(s);
  std::vector<std::string> out;
  for (std::string tok; in >> tok;) out.push_back(tok);
  return out;
}

Event parse_event(const std::string& line, std::size_t number) {
  auto toks = split_ws(line);
  Event e;
  e.label = toks.front();
  if (!pltl::Alphabet::is_identifier(e.label)) throw ParseError("invalid message label '" + e.label + "'", number);
  for (std::size_t i = 1; i < toks.size(); ++i) {
    const auto eq = toks[i].find('=');
    if (eq == std::string::npos) throw ParseError("expected pred=0|1, got '" + toks[i] + "'", number);
    auto name = toks[i].substr(0, eq);
    auto value = toks[i].substr(eq + 1);
    if (!pltl::Alphabet::is_identifier(name)) throw ParseError("invalid predicate name '" + name + "'", number);
    if (value != "0" && value != "1") throw ParseError("predicate value must be 0 or 1", number);
    e.predicates.emplace_back(std::move(name), value == "1");
  }
  return e;
}

}  // namespace

ParsedTraces parse_traces(std::istream& in, const InitiationLabels& init) {
  ParsedTraces result;
  EventTrace current;
  Session session;
  bool touched = false;  // current trace has a directive or an event
  std::size_t number = 0;

  auto close_session = [&]() {
    if (session.empty()) return;
    if (!init.contains(session.front().label)) {
      result.warnings.push_back("line " + std::to_string(number) + ": session starts with '" +
                                session.front().label + "', not a connection-initiation message");
    }
    current.sessions.push_back(std::move(session));
    session.clear();
  };
  auto close_trace = [&]() {
    close_session();
    if (!touched) return;
    for (auto idx : current.attack_sessions) {
      if (idx >= current.sessions.size()) {
        throw ParseError("attack session index " + std::to_string(idx) + " out of range", number);
      }
    }
    result.traces.push_back(std::move(current));
    current = EventTrace{};
    touched = false;
  };

  std::string raw;
  while (std::getline(in, raw)) {
    ++number;
    const std::string line = trim(raw);
    if (line.empty()) {
      close_session();
      continue;
    }
    if (line[0] == '#') continue;
    if (line == "---") {
      close_trace();
      continue;
    }
    if (line[0] == '@') {
      auto toks = split_ws(line);
      if (toks[0] == "@label") {
        if (!current.sessions.empty() || !session.empty()) {
          throw ParseError("@label must precede the trace's events", number);
        }
        if (toks.size() == 2 && toks[1] == "benign") {
          current.label = TraceLabel::benign();
        } else if (toks.size() == 3 && toks[1] == "attack") {
          current.label = TraceLabel::of_attack(toks[2]);
        } else {
          throw ParseError("expected '@label benign' or '@label attack <name>'", number);
        }
      } else if (toks[0] == "@attack_sessions") {
        current.attack_sessions.clear();
        for (std::size_t i = 1; i < toks.size(); ++i) {
          try {
            current.attack_sessions.push_back(std::stoul(toks[i]));
          } catch (const std::exception&) {
            throw ParseError("bad session index '" + toks[i] + "'", number);
          }
        }
      } else {
        throw ParseError("unknown directive '" + toks[0] + "'", number);
      }
      touched = true;
      continue;
    }
    session.push_back(parse_event(line, number));
    touched = true;
  }
  close_trace();
  return result;
}

void write_traces(std::ostream& out, const std::vector<EventTrace>& traces) {
  for (std::size_t t = 0; t < traces.size(); ++t) {
    const auto& trace = traces[t];
    if (t > 0) out << "---\n";
    if (trace.label) {
      if (trace.label->attack) {
        out << "@label attack " << trace.label->name << '\n';
      } else {
        out << "@label benign\n";
      }
    }
    if (!trace.attack_sessions.empty()) {
      out << "@attack_sessions";
      for (auto i : trace.attack_sessions) out << ' ' << i;
      out << '\n';
    }
    for (std::size_t s = 0; s < trace.sessions.size(); ++s) {
      if (s > 0) out << '\n';
      for (const auto& e : trace.sessions[s]) {
        out << e.label;
        for (const auto& [name, value] : e.predicates) out << ' ' << name << '=' << (value ? '1' : '0');
        out << '\n';
      }
    }
  }
}

ParsedTraces load_traces(const std::string& path, const InitiationLabels& init) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open '" + path + "'");
  return parse_traces(in, init);
}

void save_traces(const std::string& path, const std::vector<EventTrace>& traces) {
  std::ofstream out(path);
  if (!out) throw Error("cannot write '" + path + "'");
  write_traces(out, traces);
}

pltl::Alphabet read_alphabet(std::istream& in) {
  std::vector<std::string> messages;
  std::vector<std::string> predicates;
  bool in_predicates = false;
  std::string raw;
  std::size_t number = 0;
  while (std::getline(in, raw)) {
    ++number;
    const std::string line = trim(raw);
    if (line.empty() || line[0] == '#') continue;
    if (line == "%predicates") {
      if (in_predicates) throw ParseError("duplicate %predicates marker", number);
      in_predicates = true;
      continue;
    }
    if (!pltl::Alphabet::is_identifier(line)) throw ParseError("invalid identifier '" + line + "'", number);
    (in_predicates ? predicates : messages).push_back(line);
  }
  return pltl::Alphabet(messages, predicates);
}

void write_alphabet(std::ostream& out, const pltl::Alphabet& alphabet) {
  for (std::size_t i = 0; i < alphabet.message_count(); ++i) out << alphabet.name(i) << '\n';
  out << "%predicates\n";
  for (std::size_t i = alphabet.message_count(); i < alphabet.size(); ++i) out << alphabet.name(i) << '\n';
}

pltl::Alphabet load_alphabet(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open '" + path + "'");
  return read_alphabet(in);
}

// ---------------------------------------------------------------------------
// Generation

void VariantCatalog::put(AttackEntry entry, const InitiationLabels& init) {
  if (entry.name.empty()) throw ValidationError("attack name must not be empty");
  if (entry.variants.empty()) throw ValidationError("attack '" + entry.name + "' has no variants");
  for (std::size_t i = 0; i < entry.variants.size(); ++i) {
    const auto& v = entry.variants[i];
    if (v.empty() || !init.contains(v.front().label)) {
      throw ValidationError("variant " + std::to_string(i) + " of '" + entry.name +
                            "' does not start with a connection-initiation message");
    }
    for (std::size_t j = 0; j < i; ++j) {
      if (entry.variants[j] == v) {
        throw ValidationError("variants " + std::to_string(j) + " and " + std::to_string(i) + " of '" +
                              entry.name + "' are identical");
      }
    }
  }
  entry.layer = layer_of(entry.variants.front());
  entries_[entry.name] = std::move(entry);
}

void VariantCatalog::extend(AttackEntry entry, const InitiationLabels& init) {
  auto it = entries_.find(entry.name);
  if (it == entries_.end()) {
    put(std::move(entry), init);
    return;
  }
  AttackEntry merged = it->second;
  for (auto& v : entry.variants) {
    if (std::find(merged.variants.begin(), merged.variants.end(), v) == merged.variants.end()) {
      merged.variants.push_back(std::move(v));
    }
  }
  put(std::move(merged), init);
}

const AttackEntry& VariantCatalog::at(const std::string& name) const {
  auto it = entries_.find(name);
  if (it == entries_.end()) throw ValidationError("unknown attack '" + name + "'");
  return it->second;
}

std::vector<std::string> VariantCatalog::names() const {
  std::vector<std::string> out;
  for (const auto& [name, _] : entries_) out.push_back(name);
  return out;
}

std::vector<std::string> VariantCatalog::names(Layer layer) const {
  std::vector<std::string> out;
  for (const auto& [name, entry] : entries_) {
    if (entry.layer == layer) out.push_back(name);
  }
  return out;
}

namespace {

/// `k` distinct indices from [0, n), in draw order (partial Fisher-Yates).
std::vector<std::size_t> distinct_draw(Rng& rng, std::size_t n, std::size_t k) {
  std::vector<std::size_t> pool(n);
  for (std::size_t i = 0; i < n; ++i) pool[i] = i;
  for (std::size_t i = 0; i < k; ++i) std::swap(pool[i], pool[i + rng.below(n - i)]);
  pool.resize(k);
  return pool;
}

EventTrace benign_skeleton(Rng& rng, const std::vector<Session>& seeds, std::size_t m, GenOptions options) {
  EventTrace t;
  t.label = TraceLabel::benign();
  if (options.with_replacement) {
    for (std::size_t i = 0; i < m; ++i) t.sessions.push_back(seeds[rng.below(seeds.size())]);
  } else {
    if (m > seeds.size()) throw ValidationError("cannot draw more sessions than seeds without replacement");
    for (auto i : distinct_draw(rng, seeds.size(), m)) t.sessions.push_back(seeds[i]);
  }
  return t;
}

void check_generation(const std::vector<Session>& seeds, std::size_t m) {
  if (seeds.empty()) throw ValidationError("seed session pool is empty");
  if (m == 0) throw ValidationError("sessions per trace must be at least 1");
}

}  // namespace

std::vector<EventTrace> gen_benign(const std::vector<Session>& seeds, std::size_t sessions_per_trace,
                                   std::size_t count, std::uint64_t seed, GenOptions options) {
  check_generation(seeds, sessions_per_trace);
  Rng rng(seed);
  std::vector<EventTrace> out;
  out.reserve(count);
  for (std::size_t i = 0; i < count; ++i) out.push_back(benign_skeleton(rng, seeds, sessions_per_trace, options));
  return out;
}

std::vector<EventTrace> gen_malicious(const std::vector<Session>& seeds, const VariantCatalog& catalog,
                                      const std::string& attack, std::size_t sessions_per_trace,
                                      std::size_t count, std::uint64_t seed, GenOptions options) {
  check_generation(seeds, sessions_per_trace);
  const auto& entry = catalog.at(attack);
  const std::size_t k = entry.variants.size();
  const std::size_t bound = std::min(sessions_per_trace, k);
  Rng rng(seed);
  std::vector<EventTrace> out;
  out.reserve(count);
  for (std::size_t i = 0; i < count; ++i) {
    EventTrace t = benign_skeleton(rng, seeds, sessions_per_trace, options);
    // 1 <= a_s < min(M, K), collapsing to a_s = 1 when that range is empty.
    const std::size_t attacks = bound <= 2 ? 1 : 1 + rng.below(bound - 1);
    const auto variants = distinct_draw(rng, k, attacks);
    auto positions = distinct_draw(rng, sessions_per_trace, attacks);
    for (std::size_t a = 0; a < attacks; ++a) t.sessions[positions[a]] = entry.variants[variants[a]];
    std::sort(positions.begin(), positions.end());
    t.attack_sessions = positions;
    t.label = TraceLabel::of_attack(attack);
    out.push_back(std::move(t));
  }
  return out;
}

// ---------------------------------------------------------------------------
// Built-in corpus

namespace {

std::vector<Session> sessions_of(const char* text) {
  std::istringstream in(text);
  auto parsed = parse_traces(in);
  std::vector<Session> out;
  for (auto& t : parsed.traces) {
    for (auto& s : t.sessions) out.push_back(std::move(s));
  }
  return out;
}

}  // namespace

const pltl::Alphabet& default_alphabet() {
  static const pltl::Alphabet alphabet = [] {
    std::istringstream in(data::kAlphabet);
    return read_alphabet(in);
  }();
  return alphabet;
}

const std::vector<Session>& default_seed_sessions(Layer layer) {
  static const std::vector<Session> rrc = sessions_of(data::kRrcSeeds);
  static const std::vector<Session> nas = sessions_of(data::kNasSeeds);
  return layer == Layer::RRC ? rrc : nas;
}

VariantCatalog default_catalog() {
  VariantCatalog catalog;
  for (const auto& entry : data::catalog()) {
    catalog.put({entry.attack, Layer::RRC, sessions_of(entry.variants.c_str())});
  }
  return catalog;
}

VariantCatalog load_catalog(const std::string& dir, const InitiationLabels& init) {
  VariantCatalog catalog = default_catalog();
  if (dir.empty()) return catalog;
  namespace fs = std::filesystem;
  if (!fs::is_directory(dir)) throw Error("catalog directory '" + dir + "' does not exist");
  std::vector<fs::path> files;
  for (const auto& item : fs::directory_iterator(dir)) {
    if (item.is_regular_file() && item.path().extension() == ".trc") files.push_back(item.path());
  }
  std::sort(files.begin(), files.end());
  for (const auto& file : files) {
    std::ifstream in(file);
    if (!in) throw Error("cannot open '" + file.string() + "'");
    // A leading `@replace` line overrides the built-in variants instead of extending them.
    std::stringstream body;
    bool replace = false;
    for (std::string line; std::getline(in, line);) {
      if (trim(line) == "@replace") {
        replace = true;
        continue;
      }
      body << line << '\n';
    }
    ParsedTraces parsed;
    try {
      parsed = parse_traces(body, init);
    } catch (const ParseError& e) {
      throw Error("malformed skeleton file '" + file.string() + "': " + e.what());
    }
    AttackEntry entry;
    entry.name = file.stem().string();
    for (auto& t : parsed.traces) {
      if (t.label && t.label->attack) entry.name = t.label->name;
      for (auto& s : t.sessions) entry.variants.push_back(std::move(s));
    }
    try {
      if (replace) {
        catalog.put(std::move(entry), init);
      } else {
        catalog.extend(std::move(entry), init);
      }
    } catch (const ValidationError& e) {
      throw Error("malformed skeleton file '" + file.string() + "': " + e.what());
    }
  }
  return catalog;
}

std::optional<std::string> reference_signature(const std::string& attack) {
  for (const auto& entry : data::catalog()) {
    if (entry.attack == attack) return entry.signature;
  }
  return std::nullopt;
}

}  // namespace phoenix::traces
