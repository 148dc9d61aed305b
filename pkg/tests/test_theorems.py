import numpy as np
import pytest

from weightseq import conditions as cond
from weightseq.sequence import SequenceError, TruncationConfig, from_log_quotients
from weightseq.theorems import (
    CONSISTENT,
    REJECTED,
    THEOREM_IDS,
    VIOLATED,
    Subject,
    equiv,
    implies,
    judge,
    random_lc_corpus,
    sweep,
    verify_theorem,
)
from weightseq.verdict import FAILS, HOLDS, INCONCLUSIVE, ConditionVerdict
from weightseq.weightfn import make_closed_form


def _v(status):
    return ConditionVerdict("x", status, {}, 0.0, (0, 0))


def test_judge_graph():
    edges = implies("a", "b")
    assert judge("t", "s", [("a", _v(HOLDS)), ("b", _v(HOLDS))], edges).consistency == CONSISTENT
    rep = judge("t", "s", [("a", _v(HOLDS)), ("b", _v(FAILS))], edges)
    assert rep.consistency == VIOLATED and rep.violation_detail["antecedent"] == "a"
    # the converse direction is not asserted
    assert judge("t", "s", [("a", _v(FAILS)), ("b", _v(HOLDS))], edges).consistency == CONSISTENT
    # inconclusive never counts as a violation
    assert judge("t", "s", [("a", _v(HOLDS)), ("b", _v(INCONCLUSIVE))], edges).consistency == "inconclusive"
    assert len(equiv("a", "b", "c")) == 6


def test_alpha0theorem1rem_gevrey2(g2, cfg):
    rep = verify_theorem("alpha0theorem1rem", Subject(g2, cfg), cfg)
    assert rep.consistency == CONSISTENT
    assert len(rep.assertions) == 7
    assert all(v.holds for _, v in rep.assertions)


def test_counterexample_reports(cex, cfg):
    s = Subject(cex, cfg)
    rep = verify_theorem("omega1charact", s, cfg)
    assert rep.consistency == CONSISTENT
    a = dict(rep.assertions)
    assert a["(i) root ratio liminf"].holds and a["(i) root ratio liminf"].witnesses["L"] == 2
    assert a["(iii) omega1 of omega_M"].holds
    rep = verify_theorem("beta3comparsion", s, cfg)
    a = dict(rep.assertions)
    assert rep.consistency == CONSISTENT
    assert a["(i) beta3"].fails and a["(ii) root ratio liminf"].holds and a["(iii) omega1 of omega_M"].holds


def test_alpha0theorem1rem_requires_mg(qg2, cfg):
    assert verify_theorem("alpha0theorem1rem", Subject(qg2, cfg), cfg).consistency == REJECTED


def test_non_lc_subject_rejected(cfg):
    M = from_log_quotients([0.0, 1.0, 0.5, 2.0, 3.0, 4.0], flags=())
    rep = verify_theorem("omega1charact", Subject(M, cfg), cfg)
    assert rep.consistency == REJECTED


def test_unknown_theorem(g1, cfg):
    with pytest.raises((ValueError, SequenceError)):
        verify_theorem("no_such_theorem", Subject(g1, cfg), cfg)


def test_report_to_dict(g1, cfg):
    d = verify_theorem("chain", Subject(g1, cfg), cfg).to_dict()
    assert d["theorem_id"] == "chain" and d["consistency"] in (CONSISTENT, "inconclusive")
    assert all("label" in a and "status" in a for a in d["assertions"])


def test_fixtures_all_theorems(g1, g2, g3, qg2, cex, cfg):
    subjects = [g1, g2, g3, qg2, cex, make_closed_form("power", 0.5), make_closed_form("t_log_t"),
                make_closed_form("linear")]
    summary = sweep(subjects, THEOREM_IDS, cfg)
    assert summary["violated"] == 0, summary["violations"]


# ---------------------------------------------------------------- corpus


def test_generic_corpus_flags(cfg):
    corpus = random_lc_corpus(100, "generic", cfg)
    assert len(corpus) == 100
    assert all(M.is_lc for M in corpus)


def test_mg_corpus_holds_mg(cfg):
    assert all(cond.check_mg(M, cfg).holds for M in random_lc_corpus(50, "mg", cfg))


def test_corpus_determinism(cfg):
    a = random_lc_corpus(20, "staircase", cfg)
    b = random_lc_corpus(20, "staircase", cfg)
    assert all(np.array_equal(x.log_mu, y.log_mu) for x, y in zip(a, b))
    c = random_lc_corpus(20, "staircase", TruncationConfig(seed=8))
    assert not all(np.array_equal(x.log_mu, y.log_mu) for x, y in zip(a, c))


def test_corpus_bad_args(cfg):
    with pytest.raises(ValueError):
        random_lc_corpus(0, "generic", cfg)
    with pytest.raises(ValueError):
        random_lc_corpus(5, "nope", cfg)


def test_mg_corpus_alpha0theorem1rem(cfg):
    s = sweep(random_lc_corpus(50, "mg", cfg), ["alpha0theorem1rem"], cfg)
    assert s["violated"] == 0, s["violations"]


def test_staircase_corpus_all_theorems(cfg):
    s = sweep(random_lc_corpus(50, "staircase", cfg), THEOREM_IDS, cfg)
    assert s["violated"] == 0, s["violations"]


def test_sweep_summary_shape(cfg):
    s = sweep(random_lc_corpus(3, "generic", cfg), ["chain"], cfg)
    assert s["schema"] == "weightseq.sweep/1" and s["subjects"] == 3
    assert sum(s["counts"]["chain"].values()) == 3
    with pytest.raises(ValueError):
        sweep([], ["nope"], cfg)
