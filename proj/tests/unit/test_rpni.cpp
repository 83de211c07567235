#include <doctest.h>

#include <random>

#include "phoenix/error.hpp"
#include "phoenix/rpni.hpp"

using namespace phoenix;
using namespace phoenix::learn;

namespace {

// Direct walks over the transition tables, independent of the run helpers.
bool accepts(const automata::Dfa& d, const Word& w) {
  std::int32_t s = static_cast<std::int32_t>(d.start());
  for (const auto& x : w) {
    const auto k = d.alphabet().find(x);
    if (!k) return false;
    s = d.next(static_cast<std::size_t>(s), *k);
    if (s == automata::kNoTransition) return false;
  }
  return d.accepting(static_cast<std::size_t>(s));
}

Word outputs(const automata::MealyMachine& m, const Word& w) {
  Word out;
  std::size_t s = m.start();
  for (const auto& x : w) {
    const auto k = m.inputs().find(x);
    if (!k) {
      out.emplace_back(automata::kBenign);
      continue;
    }
    const auto& e = m.edge(s, *k);
    if (e.to == automata::kNoTransition) {
      out.emplace_back(automata::kBenign);
      continue;
    }
    out.push_back(m.outputs().at(static_cast<std::size_t>(e.output)));
    s = static_cast<std::size_t>(e.to);
  }
  return out;
}

Word random_word(std::mt19937_64& g, std::size_t max_len) {
  static const char* letters[] = {"a", "b", "c"};
  Word w;
  const auto len = g() % (max_len + 1);
  for (std::size_t i = 0; i < len; ++i) w.emplace_back(letters[g() % 3]);
  return w;
}

// Target language: words with an even number of "a" and no "cc".
bool target(const Word& w) {
  std::size_t as = 0;
  for (std::size_t i = 0; i < w.size(); ++i) {
    as += w[i] == "a";
    if (i > 0 && w[i] == "c" && w[i - 1] == "c") return false;
  }
  return as % 2 == 0;
}

}  // namespace

TEST_CASE("prep_dfa_sample closes positives under prefixes") {
  const auto s = prep_dfa_sample({{"a", "b"}}, {{"c"}});
  CHECK(s.positive == std::set<Word>{{}, {"a"}, {"a", "b"}});
  CHECK(s.negative == std::set<Word>{{"c"}});
  CHECK_THROWS_AS(prep_dfa_sample({{"a", "b"}}, {{"a"}}), ValidationError);
}

TEST_CASE("rpni on a tiny sample generalises to a loop") {
  const auto d = rpni(prep_dfa_sample({{"a", "a", "a"}}, {{"b"}}));
  CHECK(accepts(d, {"a", "a", "a", "a", "a"}));
  CHECK_FALSE(accepts(d, {"b"}));
  // The start state loops on "a"; "b" leads to a separate rejecting state.
  CHECK(d.state_count() == 2);
}

TEST_CASE("rpni is consistent with random samples") {
  std::mt19937_64 g(21);
  for (int it = 0; it < 40; ++it) {
    std::vector<Word> pos;
    std::vector<Word> neg;
    const std::size_t n = 10 + g() % 150;
    for (std::size_t i = 0; i < n; ++i) {
      auto w = random_word(g, 8);
      // Positives must be prefix-closed in the target too; keep whole
      // prefix-closed positives only.
      bool closed = true;
      for (std::size_t k = 0; k <= w.size(); ++k) closed = closed && target(Word(w.begin(), w.begin() + k));
      if (closed) {
        pos.push_back(w);
      } else if (!target(w)) {
        neg.push_back(w);
      }
    }
    const auto sample = prep_dfa_sample(pos, neg);
    RpniStats stats;
    const auto d = rpni(sample, &stats);
    for (const auto& w : sample.positive) CHECK(accepts(d, w));
    for (const auto& w : sample.negative) CHECK_FALSE(accepts(d, w));
    CHECK(d.state_count() <= stats.pta_states);
  }
}

TEST_CASE("rpni is deterministic") {
  const auto s = prep_dfa_sample({{"a", "b", "a"}, {"b", "b"}}, {{"a", "a"}, {"b", "a", "b"}});
  CHECK(rpni(s) == rpni(s));
}

TEST_CASE("prep_mm_sample labels and drops") {
  std::map<std::string, std::pair<std::vector<Word>, std::vector<Word>>> per;
  per["x"] = {{{"a", "b"}}, {{"a", "c"}}};
  const auto s = prep_mm_sample(per);
  bool saw_attack = false;
  for (const auto& p : s.pairs) {
    if (p.input == Word{"a", "c"}) {
      CHECK(p.output == Word{"benign", "vulnerability_x"});
      saw_attack = true;
    }
  }
  CHECK(saw_attack);

  const auto every = prep_mm_sample(per, NegativeLabeling::EveryStep);
  for (const auto& p : every.pairs) {
    if (p.input == Word{"a", "c"}) CHECK(p.output == Word{"vulnerability_x", "vulnerability_x"});
  }

  // A negative that is a proper prefix of a benign word with a different
  // final output is dropped rather than contradicting it.
  per["x"] = {{{"a", "b", "c"}}, {{"a", "b"}}};
  const auto d = prep_mm_sample(per);
  REQUIRE(d.dropped.size() == 1);
  CHECK(d.dropped[0].input == Word{"a", "b"});

  per["x"] = {{{"a"}}, {{"a"}}};
  CHECK_THROWS_AS(prep_mm_sample(per), ValidationError);
}

TEST_CASE("rpni_mealy reproduces every training output") {
  std::mt19937_64 g(5);
  for (int it = 0; it < 30; ++it) {
    std::map<std::string, std::pair<std::vector<Word>, std::vector<Word>>> per;
    for (const char* attack : {"x", "y"}) {
      auto& [pos, neg] = per[attack];
      for (int i = 0; i < 40; ++i) {
        auto w = random_word(g, 7);
        if (w.empty()) continue;
        // Ending with "c" after a "b" marks attack x; "cc" marks attack y.
        const bool is_x = w.size() >= 2 && w[w.size() - 2] == "b" && w.back() == "c";
        const bool is_y = w.size() >= 2 && w[w.size() - 2] == "c" && w.back() == "c";
        bool clean = true;
        for (std::size_t k = 1; k < w.size(); ++k) clean = clean && !(w[k] == "c" && (w[k - 1] == "b" || w[k - 1] == "c"));
        if (clean) {
          pos.push_back(w);
        } else if ((std::string(attack) == "x" && is_x) || (std::string(attack) == "y" && is_y)) {
          bool earlier = false;
          for (std::size_t k = 1; k + 1 < w.size(); ++k) earlier = earlier || (w[k] == "c" && (w[k - 1] == "b" || w[k - 1] == "c"));
          if (!earlier) neg.push_back(w);
        }
      }
    }
    const auto s = prep_mm_sample(per);
    const auto m = rpni_mealy(s);
    for (const auto& p : s.pairs) CHECK(outputs(m, p.input) == p.output);
  }
}

TEST_CASE("negative cuts") {
  using traces::Event;
  using traces::EventTrace;
  const traces::Session benign{{"attachRequest", {}}, {"attachAccept", {}}};
  const traces::Session attack{{"attachRequest", {}}, {"authenticationReject", {}}, {"detachRequest", {}}};
  EventTrace t;
  t.sessions = {benign, attack, benign};
  t.attack_sessions = {1};
  t.label = traces::TraceLabel::of_attack("numb");
  EventTrace b;
  b.sessions = {benign};
  const auto prefixes = session_prefixes({b});

  CHECK(negative_word(t, prefixes, NegativeCut::Verbatim).size() == 7);
  CHECK(negative_word(t, prefixes, NegativeCut::AttackSession).size() == 5);
  const auto dev = negative_word(t, prefixes, NegativeCut::FirstDeviation);
  CHECK(dev == Word{"attachRequest", "attachAccept", "attachRequest", "authenticationReject"});

  EventTrace unmarked = t;
  unmarked.attack_sessions.clear();
  CHECK(negative_word(unmarked, prefixes, NegativeCut::FirstDeviation).size() == 7);

  CHECK(parse_negative_cut(to_string(NegativeCut::AttackSession)) == NegativeCut::AttackSession);
  CHECK_THROWS_AS(parse_negative_cut("sideways"), ValidationError);
}

TEST_CASE("learn_dfa and learn_mealy on generated traces") {
  const auto cat = traces::default_catalog();
  const auto& seeds = traces::default_seed_sessions(traces::Layer::RRC);
  const auto benign = traces::gen_benign(seeds, 5, 60, 1);
  const auto mal = traces::gen_malicious(seeds, cat, "rlf_report", 5, 60, 2);
  const auto d = learn_dfa(benign, mal);
  for (const auto& w : words_of(benign)) CHECK(accepts(d, w));
  for (const auto& w : negative_words(mal, benign, NegativeCut::FirstDeviation)) CHECK_FALSE(accepts(d, w));

  const auto m = learn_mealy(benign, {{"rlf_report", mal}});
  for (const auto& w : words_of(benign)) {
    for (const auto& o : outputs(m, w)) CHECK(o == "benign");
  }
  for (const auto& w : negative_words(mal, benign, NegativeCut::FirstDeviation)) {
    CHECK(outputs(m, w).back() == "vulnerability_rlf_report");
  }
}
