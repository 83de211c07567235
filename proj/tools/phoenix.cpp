// Command-line front end: monitoring, synthesis, generation, evaluation,
// benchmarking and memory reports.

#include <CLI11.hpp>

#include <algorithm>
#include <cctype>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <map>
#include <sstream>

#include "phoenix/error.hpp"
#include "phoenix/harness.hpp"
#include "phoenix/rpni.hpp"
#include "phoenix/synth.hpp"
#include "phoenix/traces.hpp"

using namespace phoenix;

namespace {

constexpr int kClean = 0;
constexpr int kViolations = 1;
constexpr int kUsage = 2;

struct Common {
  std::string alphabet_path;
  std::string format = "text";
  std::uint64_t seed = 1;
};

pltl::Alphabet alphabet_of(const Common& c) {
  return c.alphabet_path.empty() ? traces::default_alphabet() : traces::load_alphabet(c.alphabet_path);
}

std::vector<traces::EventTrace> read_traces(const std::string& path) {
  auto parsed = traces::load_traces(path);
  for (const auto& w : parsed.warnings) std::cerr << "warning: " << path << ": " << w << '\n';
  return std::move(parsed.traces);
}

std::vector<traces::EventTrace> read_all(const std::vector<std::string>& paths) {
  std::vector<traces::EventTrace> out;
  for (const auto& p : paths) {
    auto t = read_traces(p);
    out.insert(out.end(), std::make_move_iterator(t.begin()), std::make_move_iterator(t.end()));
  }
  return out;
}

std::vector<traces::Session> sessions_of(const std::vector<traces::EventTrace>& ts) {
  std::vector<traces::Session> out;
  for (const auto& t : ts) out.insert(out.end(), t.sessions.begin(), t.sessions.end());
  return out;
}

void write_or_print(const std::string& out, const std::vector<traces::EventTrace>& ts) {
  if (out.empty() || out == "-") {
    traces::write_traces(std::cout, ts);
  } else {
    traces::save_traces(out, ts);
  }
}

std::string fixed(double x, int digits = 4) {
  std::ostringstream s;
  s << std::fixed << std::setprecision(digits) << x;
  return s.str();
}

void print_table(const Common& c, const std::vector<std::string>& header,
                 const std::vector<std::vector<std::string>>& rows) {
  const char sep = c.format == "csv" ? ',' : '\t';
  auto line = [&](const std::vector<std::string>& cells) {
    for (std::size_t i = 0; i < cells.size(); ++i) std::cout << (i ? std::string(1, sep) : "") << cells[i];
    std::cout << '\n';
  };
  line(header);
  for (const auto& r : rows) line(r);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Signature monitoring and synthesis for cellular control-plane traces"};
  app.require_subcommand(1);
  Common common;
  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--alphabet", common.alphabet_path, "Alphabet file (default: built-in corpus alphabet)");
    sub->add_option("--format", common.format, "Output format")->check(CLI::IsMember({"text", "csv"}));
  };

  // monitor
  std::string db_path;
  std::vector<std::string> trace_paths;
  std::string mode_text = "stop-first";
  auto* monitor = app.add_subcommand("monitor", "Run a signature database over traces");
  add_common(monitor);
  monitor->add_option("--db", db_path, "Signature database")->required();
  monitor->add_option("--trace", trace_paths, "Trace file(s)")->required();
  monitor->add_option("--mode", mode_text)->check(CLI::IsMember({"stop-first", "report-all"}));

  // synth
  auto* synth_cmd = app.add_subcommand("synth", "Synthesize a signature from examples");
  synth_cmd->require_subcommand(1);
  std::vector<std::string> pos_paths;
  std::vector<std::string> neg_paths;
  std::string out_path;
  std::string cut_text;
  std::size_t max_size = 12;
  std::size_t candidates = 5;
  double holdout = 0.2;
  std::uint64_t synth_seed = 7;
  std::string semantics_text = "global";
  double timeout_s = 60;
  bool no_once = false;
  bool every_step = false;

  auto* synth_pltl = synth_cmd->add_subcommand("pltl", "Minimal PLTL candidates ranked on a hold-out split");
  add_common(synth_pltl);
  synth_pltl->add_option("--pos", pos_paths, "Benign trace file(s)")->required();
  synth_pltl->add_option("--neg", neg_paths, "Malicious trace file(s)")->required();
  synth_pltl->add_option("--max-size", max_size)->check(CLI::PositiveNumber);
  synth_pltl->add_option("--candidates", candidates)->check(CLI::PositiveNumber);
  synth_pltl->add_option("--holdout", holdout)->check(CLI::Range(0.0, 0.95));
  synth_pltl->add_option("--seed", synth_seed);
  synth_pltl->add_option("--semantics", semantics_text)->check(CLI::IsMember({"global", "last"}));
  synth_pltl->add_option("--cut", cut_text, "Negative truncation: verbatim, session (default) or deviation");
  synth_pltl->add_option("--timeout", timeout_s, "Seconds; 0 = unlimited")->check(CLI::NonNegativeNumber);
  synth_pltl->add_flag("--no-once-historically", no_once, "Use only Y, S and Boolean operators");

  auto* synth_dfa = synth_cmd->add_subcommand("dfa", "Learn a DFA with RPNI");
  add_common(synth_dfa);
  synth_dfa->add_option("--pos", pos_paths, "Benign trace file(s)")->required();
  synth_dfa->add_option("--neg", neg_paths, "Malicious trace file(s)")->required();
  synth_dfa->add_option("--out", out_path, "Output automaton file (default: stdout)");
  synth_dfa->add_option("--cut", cut_text, "Negative truncation: verbatim, session or deviation (default)");

  auto* synth_mm = synth_cmd->add_subcommand("mm", "Learn a combined Mealy machine with RPNI");
  add_common(synth_mm);
  synth_mm->add_option("--pos", pos_paths, "Benign trace file(s)")->required();
  synth_mm->add_option("--neg", neg_paths, "Malicious trace file(s), grouped by their attack label")->required();
  synth_mm->add_option("--out", out_path, "Output automaton file (default: stdout)");
  synth_mm->add_option("--cut", cut_text, "Negative truncation: verbatim, session or deviation (default)");
  synth_mm->add_flag("--every-step", every_step, "Label every step of a negative word as vulnerable");

  // gen
  auto* gen = app.add_subcommand("gen", "Generate labeled traces");
  gen->require_subcommand(1);
  std::string sessions_path;
  std::string layer_text;
  std::string attack;
  std::string catalog_dir;
  std::size_t length = 5;
  std::size_t count = 100;
  bool without_replacement = false;
  auto add_gen = [&](CLI::App* sub) {
    add_common(sub);
    sub->add_option("--sessions", sessions_path, "Seed session file (default: built-in seeds)");
    sub->add_option("--length", length, "Sessions per trace")->check(CLI::PositiveNumber);
    sub->add_option("--count", count, "Number of traces");
    sub->add_option("--seed", common.seed);
    sub->add_option("--out", out_path, "Output trace file (default: stdout)");
    sub->add_flag("--without-replacement", without_replacement, "Draw benign sessions without replacement");
  };
  auto* gen_benign = gen->add_subcommand("benign", "Concatenate benign seed sessions");
  add_gen(gen_benign);
  gen_benign->add_option("--layer", layer_text, "Layer of the built-in seeds (NAS or RRC)");
  auto* gen_mal = gen->add_subcommand("malicious", "Inject attack sessions into benign traces");
  add_gen(gen_mal);
  gen_mal->add_option("--attack", attack)->required();
  gen_mal->add_option("--catalog", catalog_dir, "Directory of extra attack skeleton files");

  // eval
  auto* eval = app.add_subcommand("eval", "Precision, recall and F1 per signature");
  add_common(eval);
  eval->add_option("--db", db_path)->required();
  eval->add_option("--traces", trace_paths, "Labeled trace file(s)")->required();

  // bench
  std::size_t repeat = 10;
  auto* bench = app.add_subcommand("bench", "Messages per second of a database on one trace");
  add_common(bench);
  bench->add_option("--db", db_path)->required();
  bench->add_option("--trace", trace_paths, "Trace file; all traces are concatenated")->required();
  bench->add_option("--repeat", repeat)->check(CLI::PositiveNumber);

  // mem
  auto* mem = app.add_subcommand("mem", "Lower-bound memory of every signature");
  add_common(mem);
  mem->add_option("--db", db_path)->required();

  // catalog
  bool dump = false;
  auto* catalog_cmd = app.add_subcommand("catalog", "Inspect the attack catalog");
  catalog_cmd->add_option("--catalog", catalog_dir, "Directory of extra attack skeleton files");
  catalog_cmd->add_flag("--dump", dump, "Print every variant");
  std::string write_alphabet;
  std::string write_seeds;
  std::string write_db;
  catalog_cmd->add_option("--write-alphabet", write_alphabet, "Write the built-in alphabet to a file");
  catalog_cmd->add_option("--write-db", write_db, "Write the reference PLTL signatures as a database");
  catalog_cmd->add_option("--write-seeds", write_seeds, "Write the built-in seed sessions as <dir>/<layer>_seeds.trc");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kClean : kUsage;
  }

  try {
    if (*monitor) {
      const auto alphabet = alphabet_of(common);
      const auto db = harness::load_db(db_path, alphabet);
      const auto ts = read_all(trace_paths);
      const auto mode = mode_text == "report-all" ? harness::Mode::ReportAll : harness::Mode::StopFirst;
      const auto report = harness::run_monitors(db, ts, mode);
      std::vector<std::vector<std::string>> rows;
      for (const auto& v : report.verdicts) {
        const auto& e = db.entries[v.signature];
        auto kind = harness::to_string(v.kind);
        if (v.kind == harness::HitKind::MealyOutput) kind += "(" + v.output + ")";
        rows.push_back({std::to_string(v.trace), std::to_string(v.step), e.name, kind,
                        harness::to_string(e.severity), e.remedy});
      }
      print_table(common, {"trace", "step", "signature", "hit", "severity", "remedy"}, rows);
      for (std::size_t s = 0; s < db.entries.size(); ++s) {
        if (report.skipped[s]) {
          std::cerr << "note: " << db.entries[s].name << " skipped " << report.skipped[s]
                    << " events outside its alphabet\n";
        }
      }
      return report.verdicts.empty() ? kClean : kViolations;
    }

    if (*synth_pltl) {
      const auto alphabet = alphabet_of(common);
      const auto cut = cut_text.empty() ? learn::NegativeCut::AttackSession : learn::parse_negative_cut(cut_text);
      auto problem = harness::pltl_problem(alphabet, read_all(pos_paths), read_all(neg_paths), cut);
      problem.max_size = max_size;
      problem.semantics = semantics_text == "last" ? synth::Semantics::LastPosition : synth::Semantics::Global;
      problem.once_historically = !no_once;
      if (timeout_s > 0) {
        problem.timeout = std::chrono::milliseconds(static_cast<std::int64_t>(timeout_s * 1000));
      } else {
        problem.timeout.reset();
      }
      synth::SignatureOptions options;
      options.candidates = candidates;
      options.holdout = holdout;
      options.seed = synth_seed;
      const auto report = synth::synthesize_signature(problem, options);
      if (report.candidates.empty()) {
        std::cerr << (report.timed_out ? "timed out before any candidate was found\n"
                                       : "no consistent formula within the size bound\n");
        return kViolations;
      }
      std::vector<std::size_t> order(report.candidates.size());
      for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
      std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        const auto& x = report.candidates[a];
        const auto& y = report.candidates[b];
        if (x.holdout.f1() != y.holdout.f1()) return x.holdout.f1() > y.holdout.f1();
        return x.size < y.size;
      });
      std::vector<std::vector<std::string>> rows;
      std::size_t rank = 1;
      for (auto i : order) {
        const auto& c = report.candidates[i];
        rows.push_back({std::to_string(rank++), std::to_string(c.size), fixed(c.holdout.precision()),
                        fixed(c.holdout.recall()), fixed(c.holdout.f1()), pltl::format_formula(c.formula, alphabet)});
      }
      print_table(common, {"rank", "size", "precision", "recall", "f1", "formula"}, rows);
      if (report.timed_out) std::cerr << "note: enumeration stopped at the time budget\n";
      return kClean;
    }

    if (*synth_dfa || *synth_mm) {
      learn::LearnOptions options;
      if (!cut_text.empty()) options.cut = learn::parse_negative_cut(cut_text);
      if (every_step) options.labeling = learn::NegativeLabeling::EveryStep;
      const auto benign = read_all(pos_paths);
      const auto malicious = read_all(neg_paths);
      std::ostringstream text;
      if (*synth_dfa) {
        automata::write_dfa(text, learn::learn_dfa(benign, malicious, options));
      } else {
        std::map<std::string, std::vector<traces::EventTrace>> by_attack;
        for (const auto& t : malicious) {
          if (!t.label || !t.label->attack) throw ValidationError("malicious traces need '@label attack <name>'");
          by_attack[t.label->name].push_back(t);
        }
        automata::write_mealy(text, learn::learn_mealy(benign, by_attack, options));
      }
      if (out_path.empty() || out_path == "-") {
        std::cout << text.str();
      } else {
        std::ofstream out(out_path);
        if (!out) throw Error("cannot write " + out_path);
        out << text.str();
      }
      return kClean;
    }

    if (*gen_benign || *gen_mal) {
      traces::GenOptions options;
      options.with_replacement = !without_replacement;
      const auto catalog = traces::load_catalog(catalog_dir);
      std::vector<traces::Session> seeds;
      if (!sessions_path.empty()) {
        seeds = sessions_of(read_traces(sessions_path));
      } else {
        traces::Layer layer = traces::Layer::NAS;
        if (*gen_mal) {
          layer = catalog.at(attack).layer;
        } else if (!layer_text.empty()) {
          layer = traces::parse_layer(layer_text);
        } else {
          throw ValidationError("gen benign needs --sessions or --layer");
        }
        seeds = traces::default_seed_sessions(layer);
      }
      const auto ts = *gen_benign ? traces::gen_benign(seeds, length, count, common.seed, options)
                                  : traces::gen_malicious(seeds, catalog, attack, length, count, common.seed, options);
      write_or_print(out_path, ts);
      return kClean;
    }

    if (*eval) {
      const auto alphabet = alphabet_of(common);
      const auto db = harness::load_db(db_path, alphabet);
      const auto report = harness::evaluate(db, read_all(trace_paths));
      std::vector<std::vector<std::string>> rows;
      auto add = [&](const std::string& sig, const std::string& atk, const Confusion& c) {
        rows.push_back({sig, atk, std::to_string(c.tp), std::to_string(c.fp), std::to_string(c.fn),
                        std::to_string(c.tn), fixed(c.precision()), fixed(c.recall()), fixed(c.f1())});
      };
      for (const auto& r : report.rows) add(r.signature, r.attack, r.counts);
      add("*", "*", report.overall);
      print_table(common, {"signature", "attack", "tp", "fp", "fn", "tn", "precision", "recall", "f1"}, rows);
      return kClean;
    }

    if (*bench) {
      const auto alphabet = alphabet_of(common);
      const auto db = harness::load_db(db_path, alphabet);
      traces::EventTrace joined;
      for (const auto& t : read_all(trace_paths)) {
        joined.sessions.insert(joined.sessions.end(), t.sessions.begin(), t.sessions.end());
      }
      const auto r = harness::bench_throughput(db, joined, repeat);
      print_table(common, {"signatures", "messages", "repeat", "mean_msg_per_s", "sd_msg_per_s"},
                  {{std::to_string(db.entries.size()), std::to_string(r.messages), std::to_string(r.repeat),
                    fixed(r.mean, 1), fixed(r.stddev, 1)}});
      return kClean;
    }

    if (*mem) {
      const auto alphabet = alphabet_of(common);
      const auto db = harness::load_db(db_path, alphabet);
      const auto report = harness::mem_report(db);
      std::vector<std::vector<std::string>> rows;
      for (const auto& r : report.rows) {
        rows.push_back({r.signature, traces::to_string(r.layer), harness::to_string(r.kind),
                        std::to_string(r.figures.structure_bits), std::to_string(r.figures.monitor_bits),
                        std::to_string(r.figures.header_bytes), std::to_string(r.figures.total_bits()), ""});
      }
      for (const auto& [key, bits] : report.totals) {
        const auto ref = harness::reference_total_bits(key.first, key.second);
        rows.push_back({"total", traces::to_string(key.first), harness::to_string(key.second), "", "", "",
                        std::to_string(bits), ref ? std::to_string(*ref) : ""});
      }
      print_table(common,
                  {"signature", "layer", "kind", "structure_bits", "monitor_bits", "header_bytes", "bits",
                   "published_bits"},
                  rows);
      return kClean;
    }

    if (*catalog_cmd) {
      if (!write_alphabet.empty()) {
        std::ofstream out(write_alphabet);
        if (!out) throw Error("cannot write " + write_alphabet);
        traces::write_alphabet(out, traces::default_alphabet());
      }
      if (!write_seeds.empty()) {
        std::filesystem::create_directories(write_seeds);
        for (auto layer : {traces::Layer::NAS, traces::Layer::RRC}) {
          traces::EventTrace t;
          t.label = pltl::TraceLabel::benign();
          t.sessions = traces::default_seed_sessions(layer);
          auto name = traces::to_string(layer);
          std::transform(name.begin(), name.end(), name.begin(), [](unsigned char c) { return std::tolower(c); });
          traces::save_traces((std::filesystem::path(write_seeds) / (name + "_seeds.trc")).string(), {t});
        }
      }
      if (!write_db.empty()) {
        harness::SignatureDb db;
        db.alphabet = traces::default_alphabet();
        const auto catalog = traces::default_catalog();
        for (const auto& name : catalog.names()) {
          const auto sig = traces::reference_signature(name);
          if (!sig) continue;
          harness::SignatureEntry e;
          e.name = name;
          e.layer = catalog.at(name).layer;
          e.kind = harness::Kind::Pltl;
          e.severity = harness::Severity::High;
          e.remedy = "drop the connection and re-attach with security activated";
          e.body = *sig;
          db.add(std::move(e));
        }
        harness::save_db(write_db, db);
      }
      if (!write_alphabet.empty() || !write_seeds.empty() || !write_db.empty()) return kClean;
      const auto catalog = traces::load_catalog(catalog_dir);
      for (const auto& name : catalog.names()) {
        const auto& e = catalog.at(name);
        std::cout << name << '\t' << traces::to_string(e.layer) << '\t' << e.variants.size() << " variants\n";
        if (!dump) continue;
        for (std::size_t v = 0; v < e.variants.size(); ++v) {
          std::cout << "  variant " << v + 1 << ':';
          for (const auto& ev : e.variants[v]) std::cout << ' ' << traces::event_symbol(ev);
          std::cout << '\n';
        }
        if (const auto sig = traces::reference_signature(name)) std::cout << "  signature: " << *sig << '\n';
      }
      return kClean;
    }
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kUsage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kUsage;
  }
  return kUsage;
}
