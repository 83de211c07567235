#include "phoenix/harness.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <istream>
#include <ostream>
#include <set>
#include <sstream>

#include "phoenix/error.hpp"

namespace phoenix::harness {

namespace fs = std::filesystem;

std::string to_string(Kind k) {
  switch (k) {
    case Kind::Pltl: return "pltl";
    case Kind::Dfa: return "dfa";
    case Kind::Mealy: return "mm";
  }
  return {};
}

Kind parse_kind(const std::string& text) {
  if (text == "pltl") return Kind::Pltl;
  if (text == "dfa") return Kind::Dfa;
  if (text == "mm") return Kind::Mealy;
  throw ValidationError("unknown signature kind '" + text + "' (expected pltl, dfa or mm)");
}

std::string to_string(Severity s) {
  switch (s) {
    case Severity::Low: return "low";
    case Severity::Medium: return "medium";
    case Severity::High: return "high";
  }
  return {};
}

Severity parse_severity(const std::string& text) {
  if (text == "low") return Severity::Low;
  if (text == "medium") return Severity::Medium;
  if (text == "high") return Severity::High;
  throw ValidationError("unknown severity '" + text + "' (expected low, medium or high)");
}

std::string to_string(HitKind k) {
  switch (k) {
    case HitKind::DfaReject: return "dfa-reject";
    case HitKind::MealyOutput: return "mm-output";
    case HitKind::PltlFalse: return "pltl-false";
  }
  return {};
}

std::optional<std::string> attack_of_output(const std::string& output) {
  const auto prefix = learn::vulnerability_output("");
  if (output.size() <= prefix.size() || output.compare(0, prefix.size(), prefix) != 0) return std::nullopt;
  return output.substr(prefix.size());
}

std::vector<std::string> SignatureEntry::targets() const {
  if (kind != Kind::Mealy) return {attack.empty() ? name : attack};
  std::vector<std::string> out;
  if (!mealy) return out;
  for (std::size_t o = 0; o < mealy->outputs().size(); ++o) {
    if (o == mealy->benign_output()) continue;
    const auto& name = mealy->outputs().at(o);
    out.push_back(attack_of_output(name).value_or(name));
  }
  return out;
}

// ---------------------------------------------------------------------------
// Database

void SignatureDb::add(SignatureEntry e, const std::string& base_dir) {
  if (e.name.empty()) throw ValidationError("signature without a name");
  if (find(e.name)) throw ValidationError("duplicate signature name '" + e.name + "'");
  if (e.body.empty()) throw ValidationError("signature '" + e.name + "' has no body");
  if (e.attack.empty()) e.attack = e.name;
  switch (e.kind) {
    case Kind::Pltl:
      if (!e.formula) e.formula = pltl::parse_formula(e.body, alphabet);
      break;
    case Kind::Dfa:
    case Kind::Mealy: {
      const auto needed = e.kind == Kind::Dfa ? static_cast<bool>(e.dfa) : static_cast<bool>(e.mealy);
      if (needed) break;
      const auto path = fs::path(base_dir) / e.body;
      if (!fs::is_regular_file(path)) {
        throw ValidationError("signature '" + e.name + "': automaton file not found: " + path.string());
      }
      if (e.kind == Kind::Dfa) {
        e.dfa = std::make_shared<const automata::Dfa>(automata::load_dfa(path.string()));
      } else {
        e.mealy = std::make_shared<const automata::MealyMachine>(automata::load_mealy(path.string()));
      }
      break;
    }
  }
  entries.push_back(std::move(e));
}

const SignatureEntry* SignatureDb::find(const std::string& name) const {
  for (const auto& e : entries) {
    if (e.name == name) return &e;
  }
  return nullptr;
}

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

}  // namespace

SignatureDb read_db(std::istream& in, const pltl::Alphabet& alphabet, const std::string& base_dir) {
  SignatureDb db;
  db.alphabet = alphabet;
  std::optional<SignatureEntry> current;
  std::set<std::string> seen_keys;
  std::size_t block_line = 0;
  auto flush = [&] {
    if (!current) return;
    for (const auto* key : {"name", "layer", "kind", "body"}) {
      if (!seen_keys.count(key)) throw ParseError(std::string("signature block without '") + key + "'", block_line);
    }
    try {
      db.add(std::move(*current), base_dir);
    } catch (const ParseError& e) {
      throw ParseError(std::string("signature body: ") + e.what(), block_line);
    }
    current.reset();
  };

  std::string raw;
  std::size_t line_no = 0;
  while (std::getline(in, raw)) {
    ++line_no;
    const auto line = trim(raw);
    if (line.empty() || line[0] == '#') continue;
    if (line == "[signature]") {
      flush();
      current.emplace();
      seen_keys.clear();
      block_line = line_no;
      continue;
    }
    if (!current) throw ParseError("expected '[signature]'", line_no);
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw ParseError("expected key=value", line_no);
    const auto key = trim(line.substr(0, eq));
    const auto value = trim(line.substr(eq + 1));
    if (!seen_keys.insert(key).second) throw ParseError("repeated key '" + key + "'", line_no);
    try {
      if (key == "name") {
        current->name = value;
      } else if (key == "layer") {
        current->layer = traces::parse_layer(value);
      } else if (key == "kind") {
        current->kind = parse_kind(value);
      } else if (key == "severity") {
        current->severity = parse_severity(value);
      } else if (key == "remedy") {
        current->remedy = value;
      } else if (key == "body") {
        current->body = value;
      } else if (key == "attack") {
        current->attack = value;
      } else {
        throw ParseError("unknown key '" + key + "'", line_no);
      }
    } catch (const ValidationError& e) {
      throw ParseError(e.what(), line_no);
    }
  }
  flush();
  return db;
}

SignatureDb load_db(const std::string& path, const pltl::Alphabet& alphabet) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open signature database: " + path);
  const auto dir = fs::path(path).parent_path();
  return read_db(in, alphabet, dir.empty() ? "." : dir.string());
}

void write_db(std::ostream& out, const SignatureDb& db) {
  bool first = true;
  for (const auto& e : db.entries) {
    if (!first) out << '\n';
    first = false;
    out << "[signature]\n";
    out << "name=" << e.name << '\n';
    out << "layer=" << traces::to_string(e.layer) << '\n';
    out << "kind=" << to_string(e.kind) << '\n';
    out << "severity=" << to_string(e.severity) << '\n';
    if (!e.remedy.empty()) out << "remedy=" << e.remedy << '\n';
    if (e.body.empty() && e.formula) {
      out << "body=" << pltl::format_formula(*e.formula, db.alphabet) << '\n';
    } else {
      out << "body=" << e.body << '\n';
    }
    if (!e.attack.empty() && e.attack != e.name) out << "attack=" << e.attack << '\n';
  }
}

void save_db(const std::string& path, const SignatureDb& db) {
  const auto dir = fs::path(path).parent_path();
  for (const auto& e : db.entries) {
    if (e.kind == Kind::Pltl) continue;
    const auto target = dir / e.body;
    if (target.has_parent_path()) fs::create_directories(target.parent_path());
    if (e.kind == Kind::Dfa && e.dfa) automata::save_dfa(target.string(), *e.dfa);
    if (e.kind == Kind::Mealy && e.mealy) automata::save_mealy(target.string(), *e.mealy);
  }
  std::ofstream out(path);
  if (!out) throw Error("cannot write signature database: " + path);
  write_db(out, db);
}

// ---------------------------------------------------------------------------
// Engine

struct Engine::Impl {
  const SignatureDb* db;
  bool has_pltl = false;
  automata::SymbolTable symbols;
  /// Per signature: engine symbol id to automaton symbol index, -1 if foreign.
  std::vector<std::vector<std::int32_t>> local;
  std::vector<std::vector<std::string>> output_attacks;

  explicit Impl(const SignatureDb& d) : db(&d), local(d.entries.size()), output_attacks(d.entries.size()) {
    for (std::size_t s = 0; s < d.entries.size(); ++s) {
      const auto& e = d.entries[s];
      has_pltl = has_pltl || e.kind == Kind::Pltl;
      if (e.kind == Kind::Mealy) {
        for (const auto& o : e.mealy->outputs().symbols()) output_attacks[s].push_back(attack_of_output(o).value_or(o));
      }
    }
  }

  std::uint32_t intern(const std::string& symbol) {
    const auto id = symbols.intern(symbol);
    for (std::size_t s = 0; s < db->entries.size(); ++s) {
      const auto& e = db->entries[s];
      auto& map = local[s];
      while (map.size() <= id) {
        const auto& sym = symbols.at(map.size());
        std::optional<std::size_t> idx;
        if (e.kind == Kind::Dfa) idx = e.dfa->alphabet().find(sym);
        if (e.kind == Kind::Mealy) idx = e.mealy->inputs().find(sym);
        map.push_back(idx ? static_cast<std::int32_t>(*idx) : -1);
      }
    }
    return static_cast<std::uint32_t>(id);
  }
};

Engine::Engine(const SignatureDb& db) : impl_(std::make_shared<Impl>(db)) {}

PreparedTrace Engine::prepare(const traces::EventTrace& t) {
  PreparedTrace out;
  for (const auto& session : t.sessions) {
    for (const auto& e : session) {
      if (impl_->has_pltl) out.states.push_back(traces::event_to_state(e, impl_->db->alphabet));
      out.symbols.push_back(impl_->intern(traces::event_symbol(e)));
    }
  }
  return out;
}

void Engine::run(const PreparedTrace& t, std::size_t trace_id, Mode mode, MonitorReport& report) {
  const auto& entries = impl_->db->entries;
  const std::size_t n = entries.size();
  const std::size_t steps = t.symbols.size();
  report.skipped.resize(n, 0);
  report.undefined.resize(n, 0);
  if (report.flagged.size() <= trace_id) report.flagged.resize(trace_id + 1);
  auto& flagged = report.flagged[trace_id];

  std::vector<std::optional<pltl::Monitor>> pltl_mon(n);
  std::vector<std::optional<automata::DfaCursor>> dfa_cur(n);
  std::vector<std::optional<automata::MealyCursor>> mm_cur(n);
  std::vector<std::uint8_t> stopped(n, 0);
  for (std::size_t s = 0; s < n; ++s) {
    const auto& e = entries[s];
    if (e.kind == Kind::Pltl) pltl_mon[s].emplace(*e.formula, impl_->db->alphabet.size());
    if (e.kind == Kind::Dfa) dfa_cur[s].emplace(*e.dfa);
    if (e.kind == Kind::Mealy) mm_cur[s].emplace(*e.mealy);
  }
  auto flag = [&](const std::string& attack) {
    if (std::find(flagged.begin(), flagged.end(), attack) == flagged.end()) flagged.push_back(attack);
  };

  for (std::size_t i = 0; i < steps; ++i) {
    for (std::size_t s = 0; s < n; ++s) {
      if (stopped[s]) continue;
      const auto& e = entries[s];
      switch (e.kind) {
        case Kind::Pltl: {
          if (!pltl_mon[s]->step(t.states[i])) {
            report.verdicts.push_back({trace_id, i, s, HitKind::PltlFalse, {}});
            flag(e.attack);
            if (mode == Mode::StopFirst) stopped[s] = 1;
          }
          break;
        }
        case Kind::Dfa: {
          const auto sym = impl_->local[s][t.symbols[i]];
          if (sym < 0) {
            ++report.skipped[s];
            break;
          }
          if (!dfa_cur[s]->step(static_cast<std::size_t>(sym))) {
            report.verdicts.push_back({trace_id, i, s, HitKind::DfaReject, {}});
            flag(e.attack);
            if (mode == Mode::StopFirst) stopped[s] = 1;
          }
          break;
        }
        case Kind::Mealy: {
          const auto sym = impl_->local[s][t.symbols[i]];
          if (sym < 0) {
            ++report.skipped[s];
            break;
          }
          const auto out = mm_cur[s]->step(static_cast<std::size_t>(sym));
          if (out != e.mealy->benign_output()) {
            report.verdicts.push_back({trace_id, i, s, HitKind::MealyOutput, e.mealy->outputs().at(out)});
            flag(impl_->output_attacks[s][out]);
            if (mode == Mode::StopFirst) stopped[s] = 1;
          }
          break;
        }
      }
    }
  }
  for (std::size_t s = 0; s < n; ++s) {
    if (mm_cur[s]) report.undefined[s] += mm_cur[s]->undefined_transitions();
  }
  events_ += steps;
}

MonitorReport run_monitors(const SignatureDb& db, const std::vector<traces::EventTrace>& traces, Mode mode) {
  Engine engine(db);
  MonitorReport report;
  report.flagged.resize(traces.size());
  report.skipped.assign(db.entries.size(), 0);
  report.undefined.assign(db.entries.size(), 0);
  for (std::size_t i = 0; i < traces.size(); ++i) engine.run(engine.prepare(traces[i]), i, mode, report);
  return report;
}

// ---------------------------------------------------------------------------
// Evaluation

MetricsReport evaluate(const SignatureDb& db, const std::vector<traces::EventTrace>& traces) {
  for (const auto& t : traces) {
    if (!t.label) throw ValidationError("evaluation needs labeled traces");
  }
  Engine engine(db);
  MetricsReport out;
  for (std::size_t s = 0; s < db.entries.size(); ++s) {
    for (const auto& a : db.entries[s].targets()) out.rows.push_back({db.entries[s].name, a, {}});
  }
  for (std::size_t i = 0; i < traces.size(); ++i) {
    MonitorReport report;
    engine.run(engine.prepare(traces[i]), 0, Mode::ReportAll, report);
    const auto& label = *traces[i].label;
    out.overall.record(label.attack, !report.verdicts.empty());
    std::size_t row = 0;
    for (std::size_t s = 0; s < db.entries.size(); ++s) {
      for (const auto& a : db.entries[s].targets()) {
        auto& r = out.rows[row++];
        if (label.attack && label.name != a) continue;
        bool hit = false;
        for (const auto& v : report.verdicts) {
          if (v.signature != s) continue;
          hit = hit || v.kind != HitKind::MealyOutput || attack_of_output(v.output).value_or(v.output) == a;
        }
        r.counts.record(label.attack, hit);
      }
    }
  }
  return out;
}

// ---------------------------------------------------------------------------
// Throughput

Throughput bench_throughput(const SignatureDb& db, const traces::EventTrace& trace, std::size_t repeat) {
  if (repeat == 0) throw ValidationError("repeat must be at least 1");
  Engine engine(db);
  const auto prepared = engine.prepare(trace);
  Throughput out;
  out.messages = prepared.symbols.size();
  out.repeat = repeat;
  std::vector<double> rates;
  MonitorReport report;
  for (std::size_t r = 0; r < repeat; ++r) {
    report.verdicts.clear();
    const auto t0 = std::chrono::steady_clock::now();
    engine.run(prepared, 0, Mode::ReportAll, report);
    const auto t1 = std::chrono::steady_clock::now();
    const double secs = std::max(std::chrono::duration<double>(t1 - t0).count(), 1e-9);
    rates.push_back(static_cast<double>(out.messages) / secs);
  }
  double sum = 0;
  for (auto x : rates) sum += x;
  out.mean = sum / static_cast<double>(rates.size());
  double var = 0;
  for (auto x : rates) var += (x - out.mean) * (x - out.mean);
  out.stddev = rates.size() > 1 ? std::sqrt(var / static_cast<double>(rates.size() - 1)) : 0.0;
  return out;
}

// ---------------------------------------------------------------------------
// Memory

std::uint64_t clog2(std::uint64_t n) noexcept {
  std::uint64_t bits = 0;
  while (bits < 64 && (std::uint64_t{1} << bits) < n) ++bits;
  return bits;
}

MemoryFigures dfa_memory(std::uint64_t n, std::uint64_t m, std::uint64_t a) {
  return {m * (2 * clog2(n) + clog2(a)) + 2 * n + clog2(n), 0, 12};
}

MemoryFigures mealy_memory(std::uint64_t n, std::uint64_t m, std::uint64_t i, std::uint64_t o) {
  return {m * (2 * clog2(n) + clog2(i) + clog2(o)) + n + clog2(n), 0, 16};
}

MemoryFigures pltl_memory(std::uint64_t p, std::uint64_t t, std::uint64_t a) {
  return {p * clog2(a) + t * clog2(kPltlOperatorCount), 2 * (p + t), 8};
}

MemoryFigures memory_of(const SignatureEntry& e, std::size_t alphabet_size) {
  switch (e.kind) {
    case Kind::Pltl: {
      // Counted over the compiled program, where repeated subformulas share a slot.
      const pltl::Monitor m(*e.formula, alphabet_size);
      std::uint64_t props = 0;
      for (const auto& in : m.program()) props += in.op == pltl::Op::Prop;
      return pltl_memory(props, m.subformula_count() - props, alphabet_size);
    }
    case Kind::Dfa:
      return dfa_memory(e.dfa->state_count(), e.dfa->transition_count(), e.dfa->alphabet().size());
    case Kind::Mealy:
      return mealy_memory(e.mealy->state_count(), e.mealy->transition_count(), e.mealy->inputs().size(),
                          e.mealy->outputs().size());
  }
  return {};
}

MemoryReport mem_report(const SignatureDb& db) {
  MemoryReport out;
  for (const auto& e : db.entries) {
    const auto f = memory_of(e, db.alphabet.size());
    out.rows.push_back({e.name, e.layer, e.kind, f});
    out.totals[{e.layer, e.kind}] += f.structure_bits + f.monitor_bits;
  }
  return out;
}

std::optional<std::uint64_t> reference_total_bits(traces::Layer layer, Kind kind) {
  const bool nas = layer == traces::Layer::NAS;
  switch (kind) {
    case Kind::Pltl: return nas ? 90 : 104;
    case Kind::Mealy: return nas ? 1186 : 629;
    case Kind::Dfa: return nas ? 8146 : 166886;
  }
  return std::nullopt;
}

// ---------------------------------------------------------------------------
// Training helpers

synth::SynthesisProblem pltl_problem(const pltl::Alphabet& alphabet, const std::vector<traces::EventTrace>& benign,
                                     const std::vector<traces::EventTrace>& malicious, learn::NegativeCut cut) {
  synth::SynthesisProblem p;
  p.alphabet = alphabet;
  for (const auto& t : benign) p.positive.push_back(traces::to_state_trace(t, alphabet));
  const auto prefixes =
      cut == learn::NegativeCut::FirstDeviation ? learn::session_prefixes(benign) : std::set<learn::Word>{};
  for (const auto& t : malicious) {
    p.negative.push_back(traces::to_state_trace(learn::cut_negative(t, prefixes, cut), alphabet));
  }
  return p;
}

}  // namespace phoenix::harness
