// Python bindings. Formulas and automata are wrapped; traces cross the
// boundary as EventTrace objects or nested lists of booleans.

#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <chrono>
#include <sstream>

#include "phoenix/error.hpp"
#include "phoenix/harness.hpp"
#include "phoenix/rpni.hpp"
#include "phoenix/synth.hpp"
#include "phoenix/traces.hpp"

namespace py = pybind11;
using namespace phoenix;

namespace {

pltl::Trace to_trace(const std::vector<std::vector<bool>>& rows, std::size_t props) {
  pltl::Trace t;
  for (const auto& r : rows) {
    if (r.size() != props) throw ValidationError("state has " + std::to_string(r.size()) + " values, expected " +
                                                 std::to_string(props));
    pltl::State s(props);
    for (std::size_t i = 0; i < props; ++i) s.set(i, r[i]);
    t.states.push_back(s);
  }
  return t;
}

std::vector<pltl::Trace> to_traces(const std::vector<std::vector<std::vector<bool>>>& ts, std::size_t props) {
  std::vector<pltl::Trace> out;
  for (const auto& t : ts) out.push_back(to_trace(t, props));
  return out;
}

synth::SynthesisProblem problem(const pltl::Alphabet& a, const std::vector<std::vector<std::vector<bool>>>& pos,
                                const std::vector<std::vector<std::vector<bool>>>& neg, std::size_t max_size,
                                const std::string& semantics, std::optional<double> timeout) {
  synth::SynthesisProblem p{a, to_traces(pos, a.size()), to_traces(neg, a.size())};
  p.max_size = max_size;
  if (semantics == "global") {
    p.semantics = synth::Semantics::Global;
  } else if (semantics == "last") {
    p.semantics = synth::Semantics::LastPosition;
  } else {
    throw ValidationError("semantics must be 'global' or 'last'");
  }
  if (timeout) {
    p.timeout = std::chrono::milliseconds(static_cast<long long>(*timeout * 1000.0));
  } else {
    p.timeout.reset();
  }
  return p;
}

harness::Mode parse_mode(const std::string& m) {
  if (m == "stop-first") return harness::Mode::StopFirst;
  if (m == "report-all") return harness::Mode::ReportAll;
  throw ValidationError("mode must be 'stop-first' or 'report-all'");
}

py::dict figures(const harness::MemoryFigures& f) {
  py::dict d;
  d["structure_bits"] = f.structure_bits;
  d["monitor_bits"] = f.monitor_bits;
  d["header_bytes"] = f.header_bytes;
  d["total_bits"] = f.total_bits();
  return d;
}

py::dict confusion(const Confusion& c) {
  py::dict d;
  d["tp"] = c.tp;
  d["fp"] = c.fp;
  d["fn"] = c.fn;
  d["tn"] = c.tn;
  d["precision"] = c.precision();
  d["recall"] = c.recall();
  d["f1"] = c.f1();
  return d;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Signature monitoring and synthesis for cellular control-plane traces";

  auto error = py::register_exception<Error>(m, "Error", PyExc_RuntimeError);
  py::register_exception<ParseError>(m, "ParseError", error.ptr());
  py::register_exception<ValidationError>(m, "ValidationError", error.ptr());

  // Formulas -----------------------------------------------------------------
  py::class_<pltl::Alphabet>(m, "Alphabet")
      .def(py::init<const std::vector<std::string>&>(), py::arg("propositions"))
      .def(py::init<const std::vector<std::string>&, const std::vector<std::string>&>(), py::arg("messages"),
           py::arg("predicates"))
      .def_property_readonly("names", &pltl::Alphabet::names)
      .def("index_of", [](const pltl::Alphabet& a, const std::string& n) { return a.index_of(n); })
      .def("__len__", &pltl::Alphabet::size)
      .def("__eq__", [](const pltl::Alphabet& a, const pltl::Alphabet& b) { return a == b; });
  m.def("default_alphabet", &traces::default_alphabet, py::return_value_policy::copy);

  py::class_<pltl::Formula>(m, "Formula")
      .def_static("parse", &pltl::parse_formula, py::arg("text"), py::arg("alphabet"))
      .def("format", [](const pltl::Formula& f, const pltl::Alphabet& a) { return pltl::format_formula(f, a); })
      .def("size", [](const pltl::Formula& f) { return pltl::size(f); })
      .def("holds_globally",
           [](const pltl::Formula& f, const std::vector<std::vector<bool>>& states, std::size_t props) {
             return pltl::holds_globally(f, to_trace(states, props));
           })
      .def("earliest_violation",
           [](const pltl::Formula& f, const std::vector<std::vector<bool>>& states, std::size_t props) {
             return pltl::earliest_violation(f, to_trace(states, props));
           })
      .def("monitor",
           [](const pltl::Formula& f, const std::vector<std::vector<bool>>& states, std::size_t props) {
             return pltl::monitor_trace(f, to_trace(states, props), props);
           },
           "Per-position truth values from the incremental monitor.")
      .def("__eq__", [](const pltl::Formula& a, const pltl::Formula& b) { return a == b; });

  // Synthesis ----------------------------------------------------------------
  m.def(
      "synthesize_min",
      [](const pltl::Alphabet& a, const std::vector<std::vector<std::vector<bool>>>& pos,
         const std::vector<std::vector<std::vector<bool>>>& neg, std::size_t max_size, const std::string& semantics,
         std::optional<double> timeout) {
        const auto p = problem(a, pos, neg, max_size, semantics, timeout);
        py::gil_scoped_release release;
        const auto r = synth::synthesize_min(p);
        py::gil_scoped_acquire acquire;
        return py::make_tuple(synth::to_string(r.status), r.formula);
      },
      py::arg("alphabet"), py::arg("positive"), py::arg("negative"), py::arg("max_size") = 12,
      py::arg("semantics") = "global", py::arg("timeout") = 60.0,
      "Returns (status, formula or None) for the smallest consistent formula.");
  m.def(
      "synthesize_candidates",
      [](const pltl::Alphabet& a, const std::vector<std::vector<std::vector<bool>>>& pos,
         const std::vector<std::vector<std::vector<bool>>>& neg, std::size_t k, std::size_t max_size,
         const std::string& semantics, std::optional<double> timeout) {
        const auto p = problem(a, pos, neg, max_size, semantics, timeout);
        py::gil_scoped_release release;
        return synth::synthesize_candidates(p, k).formulas;
      },
      py::arg("alphabet"), py::arg("positive"), py::arg("negative"), py::arg("k") = 5, py::arg("max_size") = 12,
      py::arg("semantics") = "global", py::arg("timeout") = 60.0);

  // Traces -------------------------------------------------------------------
  py::class_<traces::EventTrace>(m, "EventTrace")
      .def_property_readonly("sessions",
                             [](const traces::EventTrace& t) {
                               std::vector<std::vector<std::string>> out;
                               for (const auto& s : t.sessions) {
                                 std::vector<std::string> symbols;
                                 for (const auto& e : s) symbols.push_back(traces::event_symbol(e));
                                 out.push_back(symbols);
                               }
                               return out;
                             })
      .def_property_readonly("symbols", &traces::symbol_word)
      .def_property_readonly("is_attack", [](const traces::EventTrace& t) { return t.label && t.label->attack; })
      .def_property_readonly("attack",
                             [](const traces::EventTrace& t) -> std::optional<std::string> {
                               if (t.label && t.label->attack) return t.label->name;
                               return std::nullopt;
                             })
      .def_readonly("attack_sessions", &traces::EventTrace::attack_sessions)
      .def("states",
           [](const traces::EventTrace& t, const pltl::Alphabet& a) {
             std::vector<std::vector<bool>> out;
             for (const auto& s : traces::to_state_trace(t, a).states) {
               std::vector<bool> row(a.size());
               for (std::size_t i = 0; i < a.size(); ++i) row[i] = s.get(i);
               out.push_back(row);
             }
             return out;
           })
      .def("__len__", &traces::EventTrace::event_count)
      .def("__eq__", [](const traces::EventTrace& a, const traces::EventTrace& b) { return a == b; });

  m.def("parse_traces", [](const std::string& text) {
    std::istringstream in(text);
    return traces::parse_traces(in).traces;
  });
  m.def("load_traces", [](const std::string& path) { return traces::load_traces(path).traces; });
  m.def("format_traces", [](const std::vector<traces::EventTrace>& ts) {
    std::ostringstream out;
    traces::write_traces(out, ts);
    return out.str();
  });
  m.def(
      "gen_benign",
      [](const std::string& layer, std::size_t length, std::size_t count, std::uint64_t seed) {
        return traces::gen_benign(traces::default_seed_sessions(traces::parse_layer(layer)), length, count, seed);
      },
      py::arg("layer"), py::arg("length"), py::arg("count"), py::arg("seed") = 0);
  m.def(
      "gen_malicious",
      [](const std::string& attack, std::size_t length, std::size_t count, std::uint64_t seed) {
        const auto cat = traces::default_catalog();
        const auto& seeds = traces::default_seed_sessions(cat.at(attack).layer);
        return traces::gen_malicious(seeds, cat, attack, length, count, seed);
      },
      py::arg("attack"), py::arg("length"), py::arg("count"), py::arg("seed") = 0);
  m.def("attacks", []() { return traces::default_catalog().names(); });
  m.def("reference_signature", &traces::reference_signature);

  // Automata -----------------------------------------------------------------
  py::class_<automata::Dfa>(m, "Dfa")
      .def_property_readonly("state_count", &automata::Dfa::state_count)
      .def_property_readonly("transition_count", &automata::Dfa::transition_count)
      .def_property_readonly("alphabet", [](const automata::Dfa& d) { return d.alphabet().symbols(); })
      .def("first_violation",
           [](const automata::Dfa& d, const std::vector<std::string>& w) { return automata::dfa_run(d, w).first_violation; });
  py::class_<automata::MealyMachine>(m, "MealyMachine")
      .def_property_readonly("state_count", &automata::MealyMachine::state_count)
      .def_property_readonly("transition_count", &automata::MealyMachine::transition_count)
      .def("outputs", [](const automata::MealyMachine& mm, const std::vector<std::string>& w) {
        std::vector<std::string> out;
        for (const auto& s : automata::mm_run(mm, w, automata::RunMode::ReportAll).steps) {
          out.push_back(s.violation ? s.name : std::string(automata::kBenign));
        }
        return out;
      });
  m.def("learn_dfa", [](const std::vector<traces::EventTrace>& benign, const std::vector<traces::EventTrace>& mal) {
    return learn::learn_dfa(benign, mal);
  });
  m.def("learn_mealy", [](const std::vector<traces::EventTrace>& benign,
                          const std::map<std::string, std::vector<traces::EventTrace>>& mal) {
    return learn::learn_mealy(benign, mal);
  });

  // Signature database and monitoring -----------------------------------------
  py::class_<harness::SignatureDb>(m, "SignatureDb")
      .def_property_readonly("names",
                             [](const harness::SignatureDb& db) {
                               std::vector<std::string> out;
                               for (const auto& e : db.entries) out.push_back(e.name);
                               return out;
                             })
      .def_property_readonly("kinds",
                             [](const harness::SignatureDb& db) {
                               std::vector<std::string> out;
                               for (const auto& e : db.entries) out.push_back(harness::to_string(e.kind));
                               return out;
                             })
      .def("__len__", [](const harness::SignatureDb& db) { return db.entries.size(); });
  m.def("load_db", [](const std::string& path) { return harness::load_db(path); });
  m.def(
      "run_monitors",
      [](const harness::SignatureDb& db, const std::vector<traces::EventTrace>& ts, const std::string& mode) {
        const auto r = harness::run_monitors(db, ts, parse_mode(mode));
        py::list out;
        for (const auto& v : r.verdicts) {
          py::dict d;
          d["trace"] = v.trace;
          d["step"] = v.step;
          d["signature"] = db.entries[v.signature].name;
          d["kind"] = harness::to_string(v.kind);
          d["output"] = v.output;
          out.append(d);
        }
        return out;
      },
      py::arg("db"), py::arg("traces"), py::arg("mode") = "stop-first");
  m.def("evaluate", [](const harness::SignatureDb& db, const std::vector<traces::EventTrace>& ts) {
    const auto r = harness::evaluate(db, ts);
    py::list rows;
    for (const auto& row : r.rows) {
      auto d = confusion(row.counts);
      d["signature"] = row.signature;
      d["attack"] = row.attack;
      rows.append(d);
    }
    return py::make_tuple(rows, confusion(r.overall));
  });
  m.def(
      "bench_throughput",
      [](const harness::SignatureDb& db, const traces::EventTrace& t, std::size_t repeat) {
        const auto r = harness::bench_throughput(db, t, repeat);
        py::dict d;
        d["mean"] = r.mean;
        d["stddev"] = r.stddev;
        d["messages"] = r.messages;
        d["repeat"] = r.repeat;
        return d;
      },
      py::arg("db"), py::arg("trace"), py::arg("repeat") = 5);
  m.def("mem_report", [](const harness::SignatureDb& db) {
    py::list rows;
    for (const auto& row : harness::mem_report(db).rows) {
      auto d = figures(row.figures);
      d["signature"] = row.signature;
      d["layer"] = traces::to_string(row.layer);
      d["kind"] = harness::to_string(row.kind);
      rows.append(d);
    }
    return rows;
  });
  m.def("clog2", &harness::clog2);
  m.def("dfa_memory", [](std::uint64_t n, std::uint64_t mm, std::uint64_t a) { return figures(harness::dfa_memory(n, mm, a)); },
        py::arg("states"), py::arg("transitions"), py::arg("symbols"));
  m.def(
      "mealy_memory",
      [](std::uint64_t n, std::uint64_t mm, std::uint64_t i, std::uint64_t o) {
        return figures(harness::mealy_memory(n, mm, i, o));
      },
      py::arg("states"), py::arg("transitions"), py::arg("inputs"), py::arg("outputs"));
  m.def("pltl_memory", [](std::uint64_t p, std::uint64_t t, std::uint64_t a) { return figures(harness::pltl_memory(p, t, a)); },
        py::arg("propositions"), py::arg("operators"), py::arg("alphabet_size"));
}
