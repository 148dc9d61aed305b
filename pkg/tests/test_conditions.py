import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy.special import gammaln

from weightseq import conditions as cond
from weightseq.sequence import SequenceError, TruncationConfig, from_log_quotients, gevrey

# Frozen verdict table on the fixtures (default config).
EXPECTED = {
    "gevrey(s=1)": dict(slc="holds", mg="holds", beta1="fails", gamma1="fails", beta3="holds", rai="holds",
                        raimixed="holds", raimixedM="holds", omega1_seq="holds", alpha0_mg_forms="holds",
                        omega1mixed="holds", omega7_seq="fails"),
    "gevrey(s=2)": dict(slc="holds", mg="holds", beta1="holds", gamma1="holds", beta3="holds", rai="holds",
                        raimixed="holds", raimixedM="holds", omega1_seq="holds", alpha0_mg_forms="holds",
                        omega1mixed="holds", omega7_seq="fails"),
    "gevrey(s=3)": dict(slc="holds", mg="holds", beta1="holds", gamma1="holds", beta3="holds", rai="holds",
                        raimixed="holds", raimixedM="holds", omega1_seq="holds", alpha0_mg_forms="holds",
                        omega1mixed="holds", omega7_seq="fails"),
    "q_gevrey(q=2)": dict(slc="holds", mg="fails", beta1="holds", gamma1="holds", beta3="holds", rai="holds",
                          raimixed="holds", raimixedM="holds", omega1_seq="holds", alpha0_mg_forms="holds",
                          omega1mixed="holds", omega7_seq="holds"),
    "beta3_counterexample(J=5)": dict(slc="fails", mg="inconclusive", beta1="fails", gamma1="fails", beta3="fails",
                                      rai="holds", raimixed="holds", raimixedM="holds", omega1_seq="holds",
                                      alpha0_mg_forms="inconclusive", omega1mixed="holds", omega7_seq="holds"),
}


@pytest.fixture(scope="module")
def all_fixtures(g1, g2, g3, qg2, cex):
    return [g1, g2, g3, qg2, cex]


def test_frozen_verdict_table(all_fixtures, cfg):
    for M in all_fixtures:
        got = {c: cond.check(c, M, cfg).status for c in cond.CONDITIONS}
        assert got == EXPECTED[M.label], M.label


def test_holding_verdicts_replay(all_fixtures, cfg):
    replayable = ("mg", "rai", "raimixed", "raimixedM", "beta1", "beta3", "omega1_seq")
    for M in all_fixtures:
        for c in replayable:
            v = cond.check(c, M, cfg)
            if v.holds:
                assert cond.replay(v, M, cfg), (M.label, c)


def test_fails_carry_violating_witness(all_fixtures, cfg):
    for M in all_fixtures:
        for c in cond.CONDITIONS:
            v = cond.check(c, M, cfg)
            if v.fails and c not in ("alpha0_mg_forms", "omega1mixed", "beta1", "beta3", "omega1_seq", "raimixed",
                                     "raimixedM", "omega7_seq"):
                assert "violating_index" in v.witnesses, (M.label, c)


def test_unknown_condition(g1, cfg):
    with pytest.raises(SequenceError):
        cond.check("no_such_condition", g1, cfg)


# ---------------------------------------------------------------- slc, mg


def test_slc_small_instance(cfg):
    M = from_log_quotients(np.concatenate(([0.0, 5, 5, 5], np.arange(6.0, 70.0))))
    v = cond.check_slc(M, cfg)
    assert v.fails and v.witnesses["violating_index"] >= 1


@pytest.mark.parametrize("s", [1, 2, 3])
def test_mg_gevrey_ratio(s, cfg):
    v = cond.check_mg(gevrey(s, 512), cfg)
    assert v.holds
    assert v.witnesses["ratio_sup"] == pytest.approx(2.0**s, rel=1e-12)
    assert v.witnesses["sub_agreement"]


def test_mg_q_gevrey_fails(qg2, cfg):
    v = cond.check_mg(qg2, cfg)
    assert v.fails
    p = v.witnesses["violating_index"]
    assert v.witnesses["violating_ratio"] == pytest.approx(2.0 ** (2 * p), rel=1e-9)


def test_mg_profiles_agree_on_fixtures(g1, g2, qg2, cfg):
    for M in (g1, g2, qg2):
        subs = cond.check_mg(M, cfg).witnesses["sub_status"]
        conclusive = {s for s in subs.values() if s != "inconclusive"}
        assert len(conclusive) <= 1


# ---------------------------------------------------------------- quotient liminf conditions


def test_beta1(g1, g2, cex, cfg):
    v = cond.check_beta1(g2, cfg)
    assert v.holds and v.witnesses["Q"] == 2 and v.witnesses["liminf_ratio"] == pytest.approx(4.0)
    assert cond.check_beta1(g1, cfg).fails
    assert cond.check_beta1(cex, cfg).fails


def test_beta3(g1, qg2, cex, cfg):
    v = cond.check_beta3(g1, cfg)
    assert v.holds and v.witnesses["Q"] == 2 and v.witnesses["liminf_ratio"] == pytest.approx(2.0)
    assert cond.check_beta3(qg2, cfg).holds
    b = cond.check_beta3(cex, cfg)
    assert b.fails
    assert {w["ratio"] for w in b.witnesses["block_witnesses"]} == {1.0}


def test_gamma1_profile(g1, g2, cfg):
    prof = cond.gamma1_profile(g2)
    assert prof[-1] == pytest.approx(1 / g2.P)
    for p in (1, 10, 100):
        brute = g2.mu[p] / p * sum(1 / g2.mu[k] for k in range(p, g2.P + 1))
        assert prof[p - 1] == pytest.approx(brute, rel=1e-10)
    v = cond.check_gamma1(g2, cfg)
    assert v.holds and v.witnesses["sup"] < 2
    assert not cond.check_gamma1(g1, cfg).holds


# ---------------------------------------------------------------- root almost increasing


def test_rai_gevrey(g1, g2, cfg):
    for M in (g1, g2):
        v = cond.check_rai(M, cfg)
        assert v.holds and v.witnesses["A"] == pytest.approx(1.0)
        r = cond.check_raimixed(M, cfg)
        assert r.holds and r.witnesses["C"] == 1


def test_rai_inflated_head(cfg):
    v = np.array([0.0, 10, 10, 10] + [math.log(p) + 10 - math.log(4) for p in range(4, 513)])
    M = from_log_quotients(v)
    r = cond.check_rai(M, cfg)
    x = M.log_m_root
    brute = max(x[p] - x[q] for p in range(1, 513) for q in range(p, 513))
    assert r.holds
    assert r.witnesses["log_sup"] == pytest.approx(brute, abs=1e-12)
    assert cond.replay(r, M, cfg)


def staircase_roots(P: int = 1024):
    """Non-log-convex M whose m-roots dip right after each 2^k but recover by 2^(k+1)."""
    r = np.zeros(P + 1)
    for p in range(1, P + 1):
        k = int(math.floor(math.log2(p)))
        s = p / 2**k
        H, B, Hn = k * k, (k - 1) ** 2, (k + 1) ** 2
        r[p] = H + (B - H) * (s - 1) / 0.1 if s < 1.1 else B + (Hn - B) * (s - 1.1) / 0.9
    log_M = np.arange(P + 1) * r + gammaln(np.arange(P + 1) + 1)
    v = np.diff(log_M, prepend=0.0)
    v[0] = 0.0
    return from_log_quotients(v, flags=())


def test_raimixed_staircase(cfg):
    M = staircase_roots()
    assert cond.check_rai(M, cfg).fails
    v = cond.check_raimixed(M, cfg)
    assert v.holds and v.witnesses["C"] == 2


def test_raimixedM(g1, qg2, cfg):
    assert cond.check_raimixedM(g1, cfg).holds
    v = cond.check_raimixedM(qg2, cfg)
    assert v.holds


# ---------------------------------------------------------------- root ratios


def test_omega1_seq_gevrey_ratio(g1, cfg):
    v = cond.check_omega1_seq(g1, cfg)
    assert v.holds and v.witnesses["L"] == 2
    p, ratios = cond.root_ratio_profile(g1, 2)
    closed = np.exp(gammaln(2 * 50 + 1) / 100 - gammaln(51) / 50)
    assert ratios[p == 50][0] == pytest.approx(closed, rel=1e-12)
    # Stirling: (2p/e) / (p/e) -> 2 from below
    assert np.all(np.diff(ratios) > 0) and ratios[-1] < 2 and abs(ratios[-1] - 2) < 0.02


def test_omega1_seq_constant_fails(cfg):
    v = cond.check_omega1_seq(from_log_quotients(np.zeros(513)), cfg)
    assert v.fails


def test_omega1_seq_counterexample(cex, cfg):
    v = cond.check_omega1_seq(cex, cfg)
    assert v.holds and v.witnesses["L"] == 2 and v.witnesses["liminf_ratio"] >= 2


def test_alpha0_mg_forms(g1, g2, cfg):
    for M in (g1, g2):
        v = cond.check_alpha0_mg_forms(M, cfg)
        assert v.holds and v.witnesses["sub_agreement"]


def test_omega1mixed(g1, g2, cfg):
    assert cond.check_omega1mixed(g1, g1, cfg).holds
    v = cond.check_omega1mixed(g1, g2, cfg)
    assert v.holds and v.witnesses["C"] == 1


def test_omega7_seq(g1, g2, qg2, cfg):
    v = cond.check_omega7_seq(qg2, cfg)
    assert v.holds and v.witnesses["L"] == 2
    for M in (g1, g2):
        assert cond.check_omega7_seq(M, cfg).fails
        # (omega7) => (omega1) is the only direction asserted
    assert cond.check_omega1_seq(qg2, cfg).holds


def test_drawdown_matches_bruteforce():
    rng = np.random.default_rng(3)
    v = np.concatenate(([0.0], rng.normal(size=40)))
    for C in (1, 2, 3):
        dd = cond.drawdown(v, C)
        for q in range(C, 41):
            assert dd[q] == pytest.approx(max(v[p] for p in range(1, q // C + 1)) - v[q])


@settings(max_examples=30, deadline=None)
@given(st.lists(st.floats(0.0, 2.0), min_size=64, max_size=200))
def test_raimixed_no_stronger_than_rai(inc):
    """rai holding forces the truncated form to hold with C = 1 and the same constant."""
    cfg = TruncationConfig()
    M = from_log_quotients(np.concatenate(([0.0], np.cumsum(inc))))
    a, b = cond.check_rai(M, cfg), cond.check_raimixed(M, cfg)
    if a.holds:
        assert b.holds and b.witnesses["C"] == 1 and b.witnesses["A"] == pytest.approx(a.witnesses["A"])
