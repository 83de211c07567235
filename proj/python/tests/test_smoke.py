import itertools
import os
from pathlib import Path

import pytest

import phoenix

DATA = Path(os.environ.get("PHOENIX_DATA_DIR", Path(__file__).resolve().parents[2] / "data"))
RLF = "(imp (prop ueInformationRequest) (S (not (prop rrcConnectionRequest)) (prop securityModeComplete)))"


def holds(f, t, i):
    """Since written as a quantifier over earlier positions, for S over props only."""
    return any(t[j][1] and all(not t[k][0] for k in range(j + 1, i + 1)) for j in range(i + 1))


def test_parse_and_format_round_trip():
    a = phoenix.default_alphabet()
    f = phoenix.Formula.parse(RLF, a)
    assert f.size() == 7
    assert phoenix.Formula.parse(f.format(a), a) == f


def test_errors_map_to_python_exceptions():
    a = phoenix.Alphabet(["p", "q"])
    with pytest.raises(phoenix.ParseError):
        phoenix.Formula.parse("(and (prop p)", a)
    with pytest.raises(phoenix.ValidationError):
        phoenix.Formula.parse("(prop r)", a)
    assert issubclass(phoenix.ParseError, phoenix.Error)


def test_monitor_matches_quantifier_semantics():
    a = phoenix.Alphabet(["p", "q"])
    f = phoenix.Formula.parse("(S (not (prop p)) (prop q))", a)
    for n in range(1, 5):
        for bits in itertools.product([False, True], repeat=2 * n):
            t = [list(bits[2 * i : 2 * i + 2]) for i in range(n)]
            assert f.monitor(t, 2) == [holds(f, t, i) for i in range(n)]


def test_synthesize_negation():
    a = phoenix.Alphabet(["p"])
    status, f = phoenix.synthesize_min(a, [[[False]], [[False], [False]]], [[[False], [True]]])
    assert status == "found"
    assert f.format(a) == "(not (prop p))"
    cands = phoenix.synthesize_candidates(a, [[[True]]], [[[False]]], k=3)
    assert [c.size() for c in cands][0] == 1
    assert all(c.size() >= 2 for c in cands[1:])


def test_generated_traces_and_reference_signature():
    a = phoenix.default_alphabet()
    f = phoenix.Formula.parse(phoenix.reference_signature("rlf_report"), a)
    benign = phoenix.gen_benign("RRC", 5, 20, seed=1)
    attack = phoenix.gen_malicious("rlf_report", 5, 20, seed=2)
    assert all(f.holds_globally(t.states(a), len(a)) for t in benign)
    assert all(not f.holds_globally(t.states(a), len(a)) for t in attack)
    assert all(t.attack == "rlf_report" for t in attack)
    assert phoenix.parse_traces(phoenix.format_traces(attack)) == attack


def test_database_monitoring_and_metrics():
    db = phoenix.load_db(str(DATA / "mixed.db"))
    assert db.kinds == ["pltl", "dfa", "mm"]
    attack = phoenix.load_traces(str(DATA / "rlf_test.trc"))
    benign = phoenix.load_traces(str(DATA / "rrc_benign.trc"))
    assert phoenix.run_monitors(db, benign) == []
    verdicts = phoenix.run_monitors(db, attack)
    assert {v["trace"] for v in verdicts} == set(range(len(attack)))
    rows, overall = phoenix.evaluate(db, attack + benign)
    pltl = next(r for r in rows if r["signature"] == "rlf_report_pltl")
    assert (pltl["precision"], pltl["recall"], pltl["f1"]) == (1.0, 1.0, 1.0)
    assert overall["tp"] == len(attack)


def test_learned_automata():
    benign = phoenix.gen_benign("NAS", 5, 100, seed=1)
    attack = phoenix.gen_malicious("imsi_catching", 5, 100, seed=2)
    mm = phoenix.learn_mealy(benign, {"imsi_catching": attack})
    test = phoenix.gen_malicious("imsi_catching", 5, 10, seed=3)
    for t in test:
        assert "vulnerability_imsi_catching" in mm.outputs(t.symbols)
    d = phoenix.learn_dfa(benign, attack)
    assert all(d.first_violation(t.symbols) is None for t in benign)


def test_memory_examples():
    assert phoenix.dfa_memory(2, 4, 4) == {"structure_bits": 21, "monitor_bits": 0, "header_bytes": 12,
                                           "total_bits": 21 + 96}
    p = phoenix.pltl_memory(2, 2, 4)
    assert (p["structure_bits"], p["monitor_bits"], p["header_bytes"]) == (12, 8, 8)
    assert [phoenix.clog2(n) for n in (0, 1, 2, 3, 9)] == [0, 0, 1, 2, 4]
    rows = phoenix.mem_report(phoenix.load_db(str(DATA / "mixed.db")))
    assert [r["kind"] for r in rows] == ["pltl", "dfa", "mm"]
