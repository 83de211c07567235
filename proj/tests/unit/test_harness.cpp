#include <doctest.h>

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "oracles.hpp"
#include "phoenix/error.hpp"
#include "phoenix/harness.hpp"

using namespace phoenix;
using namespace phoenix::harness;

namespace fs = std::filesystem;

namespace {

const std::string kData = PHOENIX_DATA_DIR;
const char* kRlf =
    "(imp (prop ueInformationRequest) (S (not (prop rrcConnectionRequest)) (prop securityModeComplete)))";

SignatureDb db_from(const std::string& text, const std::string& base = ".") {
  std::istringstream in(text);
  return read_db(in, traces::default_alphabet(), base);
}

std::string pltl_block(const std::string& name, const std::string& body) {
  return "[signature]\nname=" + name + "\nlayer=RRC\nkind=pltl\nseverity=high\nremedy=re-attach\nbody=" + body +
         "\n";
}

fs::path temp_dir(const std::string& name) {
  auto p = fs::temp_directory_path() / ("phoenix_unit_" + name);
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

std::size_t event_count(const traces::EventTrace& t) {
  std::size_t n = 0;
  for (const auto& s : t.sessions) n += s.size();
  return n;
}

}  // namespace

TEST_CASE("database loading") {
  const auto one = db_from(pltl_block("rlf", kRlf));
  REQUIRE(one.entries.size() == 1);
  CHECK(one.entries[0].formula.has_value());
  CHECK(one.entries[0].attack == "rlf");
  CHECK(one.entries[0].targets() == std::vector<std::string>{"rlf"});

  CHECK_THROWS_AS(db_from(pltl_block("rlf", kRlf) + pltl_block("rlf", kRlf)), ValidationError);
  CHECK_THROWS_AS(db_from(pltl_block("rlf", "(prop nope)")), ValidationError);
  CHECK_THROWS_AS(db_from(pltl_block("rlf", "(and")), ParseError);
  CHECK_THROWS_AS(db_from("[signature]\nname=x\n"), ParseError);
  CHECK_THROWS_AS(db_from("name=x\n"), ParseError);
  CHECK_THROWS_AS(db_from(pltl_block("rlf", kRlf) + "colour=red\n"), ParseError);
  CHECK_THROWS_AS(db_from("[signature]\nname=x\nlayer=RRC\nkind=dfa\nseverity=low\nremedy=r\nbody=missing.dfa\n"),
                  ValidationError);
}

TEST_CASE("mixed database and round trip") {
  const auto db = load_db(kData + "/mixed.db");
  REQUIRE(db.entries.size() == 3);
  CHECK(db.entries[0].formula.has_value());
  CHECK(db.entries[1].dfa != nullptr);
  CHECK(db.entries[2].mealy != nullptr);

  const auto dir = temp_dir("db");
  save_db((dir / "copy.db").string(), db);
  const auto back = load_db((dir / "copy.db").string());
  REQUIRE(back.entries.size() == db.entries.size());
  for (std::size_t i = 0; i < db.entries.size(); ++i) {
    const auto& a = db.entries[i];
    const auto& b = back.entries[i];
    CHECK(a.name == b.name);
    CHECK(a.layer == b.layer);
    CHECK(a.kind == b.kind);
    CHECK(a.severity == b.severity);
    CHECK(a.remedy == b.remedy);
    CHECK(a.body == b.body);
    CHECK(a.attack == b.attack);
    CHECK(a.formula == b.formula);
    if (a.dfa) CHECK(*a.dfa == *b.dfa);
    if (a.mealy) CHECK(*a.mealy == *b.mealy);
  }
  fs::remove_all(dir);
}

TEST_CASE("pltl verdicts match the reference earliest violation") {
  const auto db = load_db(kData + "/reference.db");
  const auto& a = traces::default_alphabet();
  const auto cat = traces::default_catalog();
  std::vector<traces::EventTrace> ts;
  for (const auto layer : {traces::Layer::NAS, traces::Layer::RRC}) {
    const auto& seeds = traces::default_seed_sessions(layer);
    const auto b = traces::gen_benign(seeds, 5, 20, 3);
    ts.insert(ts.end(), b.begin(), b.end());
    for (const auto& name : cat.names(layer)) {
      const auto m = traces::gen_malicious(seeds, cat, name, 5, 10, 4);
      ts.insert(ts.end(), m.begin(), m.end());
    }
  }
  const auto report = run_monitors(db, ts, Mode::StopFirst);
  std::size_t mismatches = 0;
  for (std::size_t s = 0; s < db.entries.size(); ++s) {
    const auto& f = *db.entries[s].formula;
    for (std::size_t t = 0; t < ts.size(); ++t) {
      const auto st = traces::to_state_trace(ts[t], a);
      std::optional<std::size_t> expected;
      for (std::size_t i = 0; i < st.size() && !expected; ++i) {
        if (!oracle::holds(f, st, i)) expected = i;
      }
      std::optional<std::size_t> got;
      for (const auto& v : report.verdicts) {
        if (v.trace == t && v.signature == s) {
          mismatches += got.has_value();
          got = v.step;
          CHECK(v.kind == HitKind::PltlFalse);
        }
      }
      mismatches += got != expected;
    }
  }
  CHECK(mismatches == 0);

  for (std::size_t t = 0; t < ts.size(); ++t) {
    CHECK(report.flagged[t].empty() == !ts[t].label->attack);
  }
}

TEST_CASE("report-all mode lists every violating step") {
  const auto db = db_from(pltl_block("rlf", kRlf));
  traces::EventTrace t;
  t.sessions = {{{"rrcConnectionRequest", {}}, {"ueInformationRequest", {}}, {"ueInformationRequest", {}}}};
  const auto all = run_monitors(db, {t}, Mode::ReportAll);
  CHECK(all.verdicts.size() == 2);
  const auto first = run_monitors(db, {t}, Mode::StopFirst);
  REQUIRE(first.verdicts.size() == 1);
  CHECK(first.verdicts[0].step == 1);
}

TEST_CASE("RLF variant 1 is flagged at the plaintext ueInformationRequest") {
  const auto db = db_from(pltl_block("rlf", kRlf));
  const auto cat = traces::default_catalog();
  const auto& variant = cat.at("rlf_report").variants.at(0);
  traces::EventTrace t;
  t.sessions = {traces::default_seed_sessions(traces::Layer::RRC).at(0), variant};
  const auto r = run_monitors(db, {t}, Mode::StopFirst);
  REQUIRE(r.verdicts.size() == 1);
  const auto offset = t.sessions[0].size();
  const auto uir = std::find_if(variant.begin(), variant.end(),
                                [](const traces::Event& e) { return e.label == "ueInformationRequest"; });
  const auto report = std::find_if(variant.begin(), variant.end(),
                                   [](const traces::Event& e) { return e.label == "rlfReport"; });
  REQUIRE(uir != variant.end());
  CHECK(r.verdicts[0].step == offset + static_cast<std::size_t>(uir - variant.begin()));
  CHECK(r.verdicts[0].step < offset + static_cast<std::size_t>(report - variant.begin()));
}

TEST_CASE("a learned Mealy machine names the IMSI catching attack") {
  const auto cat = traces::default_catalog();
  const auto& seeds = traces::default_seed_sessions(traces::Layer::NAS);
  const auto benign = traces::gen_benign(seeds, 5, 100, 1);
  const auto mal = traces::gen_malicious(seeds, cat, "imsi_catching", 5, 100, 2);
  SignatureDb db{traces::default_alphabet(), {}};
  SignatureEntry e;
  e.name = "nas_mm";
  e.kind = Kind::Mealy;
  e.body = "nas.mm";
  e.mealy = std::make_shared<const automata::MealyMachine>(learn::learn_mealy(benign, {{"imsi_catching", mal}}));
  db.add(e);

  const auto test = traces::gen_malicious(seeds, cat, "imsi_catching", 5, 20, 9);
  const auto r = run_monitors(db, test, Mode::StopFirst);
  REQUIRE_FALSE(r.verdicts.empty());
  for (const auto& v : r.verdicts) {
    CHECK(v.kind == HitKind::MealyOutput);
    CHECK(v.output == "vulnerability_imsi_catching");
  }
  CHECK(attack_of_output("vulnerability_imsi_catching") == std::string("imsi_catching"));
  CHECK_FALSE(attack_of_output("benign").has_value());
}

TEST_CASE("metrics arithmetic and identities") {
  Confusion c;
  c.tp = 9;
  c.fp = 1;
  CHECK(c.precision() == doctest::Approx(0.9));
  CHECK(c.recall() == doctest::Approx(1.0));
  CHECK(c.f1() == doctest::Approx(18.0 / 19.0));
  for (std::size_t tp = 0; tp < 5; ++tp) {
    for (std::size_t fp = 0; fp < 5; ++fp) {
      for (std::size_t fn = 0; fn < 5; ++fn) {
        Confusion k{tp, fp, fn, 0};
        if (tp + fp > 0) CHECK(k.precision() * static_cast<double>(tp + fp) == doctest::Approx(static_cast<double>(tp)));
        if (tp + fn > 0) CHECK(k.recall() * static_cast<double>(tp + fn) == doctest::Approx(static_cast<double>(tp)));
        CHECK(k.f1() <= std::min(2 * k.precision(), 2 * k.recall()) + 1e-12);
      }
    }
  }
  CHECK(Confusion{}.f1() == 1.0);
  CHECK(Confusion{0, 1, 1, 0}.f1() == 0.0);
}

TEST_CASE("evaluate on the mixed database") {
  const auto db = load_db(kData + "/mixed.db");
  auto ts = traces::load_traces(kData + "/rlf_test.trc").traces;
  const auto attacks = ts.size();
  const auto benign = traces::load_traces(kData + "/rrc_benign.trc").traces;
  ts.insert(ts.end(), benign.begin(), benign.end());
  const auto r = evaluate(db, ts);
  REQUIRE_FALSE(r.rows.empty());
  std::size_t rlf_rows = 0;
  for (const auto& row : r.rows) {
    const auto total = row.counts.tp + row.counts.fn + row.counts.fp + row.counts.tn;
    // Rows for attacks absent from the corpus only see the benign traces.
    CHECK(total == (row.attack == "rlf_report" ? attacks + benign.size() : benign.size()));
    rlf_rows += row.attack == "rlf_report";
  }
  CHECK(rlf_rows == 3);
  CHECK(r.overall.tp + r.overall.fn == attacks);
  traces::EventTrace unlabeled;
  unlabeled.sessions = {{{"rrcConnectionRequest", {}}}};
  CHECK_THROWS_AS(evaluate(db, {unlabeled}), ValidationError);
}

TEST_CASE("memory formulas") {
  CHECK(clog2(0) == 0);
  CHECK(clog2(1) == 0);
  CHECK(clog2(2) == 1);
  CHECK(clog2(3) == 2);
  CHECK(clog2(9) == 4);

  const auto d = dfa_memory(2, 4, 4);
  CHECK(d.structure_bits == 21);
  CHECK(d.monitor_bits == 0);
  CHECK(d.header_bytes == 12);

  const auto p = pltl_memory(2, 2, 4);
  CHECK(p.structure_bits == 12);
  CHECK(p.monitor_bits == 8);
  CHECK(p.header_bytes == 8);

  // N=3, M=5, I=4, O=2: 5*(2+2+2+1) + 3 + 2.
  const auto m = mealy_memory(3, 5, 4, 2);
  CHECK(m.structure_bits == 40);
  CHECK(m.header_bytes == 16);
}

TEST_CASE("memory report over a database") {
  const auto db = db_from(pltl_block("rlf", kRlf));
  const auto r = mem_report(db);
  REQUIRE(r.rows.size() == 1);
  const auto& a = traces::default_alphabet();
  // 3 proposition nodes, 4 operator nodes; 2 live bits per subformula.
  const auto expected = pltl_memory(3, 4, a.size());
  CHECK(r.rows[0].figures.structure_bits == expected.structure_bits);
  CHECK(r.rows[0].figures.monitor_bits == 2 * 7);
  CHECK(r.totals.at({traces::Layer::RRC, Kind::Pltl}) == expected.structure_bits + 14);
  CHECK(reference_total_bits(traces::Layer::NAS, Kind::Pltl) == std::uint64_t{90});
}

TEST_CASE("throughput of an empty database") {
  const SignatureDb empty{traces::default_alphabet(), {}};
  const auto t = traces::gen_benign(traces::default_seed_sessions(traces::Layer::NAS), 200, 1, 5).at(0);
  const auto r = bench_throughput(empty, t, 5);
  CHECK(r.messages == event_count(t));
  CHECK(r.repeat == 5);
  CHECK(r.mean > 1e6);
  CHECK_THROWS_AS(bench_throughput(empty, t, 0), ValidationError);
}

TEST_CASE("pltl_problem cuts malicious traces after the attack session") {
  const auto& seeds = traces::default_seed_sessions(traces::Layer::RRC);
  const auto b = traces::gen_benign(seeds, 3, 4, 1);
  const auto m = traces::gen_malicious(seeds, traces::default_catalog(), "rlf_report", 3, 4, 2);
  const auto p = pltl_problem(traces::default_alphabet(), b, m);
  CHECK(p.positive.size() == 4);
  REQUIRE(p.negative.size() == 4);
  for (std::size_t i = 0; i < m.size(); ++i) {
    std::size_t end = 0;
    for (std::size_t s = 0; s <= m[i].attack_sessions.front(); ++s) end += m[i].sessions[s].size();
    CHECK(p.negative[i].size() == end);
  }
}
