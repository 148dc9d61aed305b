import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy.special import gammaln

from weightseq.sequence import (
    SequenceError,
    TruncationConfig,
    counterexample_beta3,
    equivalent,
    from_log_quotients,
    gevrey,
    preceq,
    q_gevrey,
    root_power_sequence,
    sequence_from_spec,
    slc_regularization,
    stirling_sandwich_holds,
)

LOG2 = math.log(2.0)


lc_strategy = st.lists(st.floats(0.0, 3.0, allow_nan=False), min_size=3, max_size=80).map(
    lambda inc: np.concatenate(([0.0], np.cumsum(inc)))
)


# ---------------------------------------------------------------- construction


def test_all_zero_quotients():
    M = from_log_quotients(np.zeros(11))
    assert M.P == 10
    assert np.all(M.log_M == 0.0)
    assert M.is_lc
    assert not M.diverges_on_window()


def test_factorial_from_log_integers():
    P = 30
    M = from_log_quotients(np.concatenate(([0.0], np.log(np.arange(1, P + 1)))))
    np.testing.assert_allclose(M.log_M, gammaln(np.arange(P + 1) + 1), atol=1e-10)


def test_log_convexity_violation_rejected():
    v = [0.0, 1.0, 2.0, 1.5, 3.0]
    with pytest.raises(SequenceError, match="log-convexity"):
        from_log_quotients(v)
    M = from_log_quotients(v, flags=())
    assert not M.is_lc


@pytest.mark.parametrize("bad", [[0.0, 1.0, math.inf], [0.0, math.nan, 1.0], [1.0, 2.0, 3.0], [0.0, 1.0]])
def test_invalid_quotients_rejected(bad):
    with pytest.raises(SequenceError):
        from_log_quotients(bad, flags=())


def test_normalization_violation_rejected():
    with pytest.raises(SequenceError, match="normalization"):
        from_log_quotients([0.0, -1.0, 0.0, 1.0])


def test_gevrey_one():
    M = gevrey(1, 50)
    np.testing.assert_allclose(M.mu[1:], np.arange(1, 51), rtol=1e-12)
    np.testing.assert_allclose(M.log_m, 0.0, atol=1e-10)


def test_gevrey_two_quotient_ratio_and_root_bound():
    M = gevrey(2, 100)
    p = np.arange(1, 51)
    np.testing.assert_allclose(M.log_mu[2 * p] - M.log_mu[p], math.log(4.0), atol=1e-12)
    assert np.all(M.log_root[1:] <= M.log_mu[1:] + 1e-12)


def test_gevrey_rejects_small_s():
    with pytest.raises(SequenceError):
        gevrey(0.5, 10)


def test_q_gevrey():
    M = q_gevrey(2, 50)
    p = np.arange(51)
    np.testing.assert_allclose(M.log_M, p**2 * LOG2, rtol=1e-13, atol=1e-12)
    h = np.arange(1, 26)
    np.testing.assert_allclose(M.log_mu[2 * h] - M.log_mu[h], 2 * h * LOG2, rtol=1e-12)
    # (M_p)^4 <= M_{2p} with equality
    np.testing.assert_allclose(4 * M.log_M[h], M.log_M[2 * h], rtol=1e-13)
    with pytest.raises(SequenceError):
        q_gevrey(1.0, 10)


def test_counterexample_small():
    M = counterexample_beta3(4)
    assert M.meta["a"][:3] == [1, 2, 8]
    assert M.log_mu[1] == 0.0
    assert M.log_mu[2] == pytest.approx(8 * LOG2)  # c_2 = 2^(a_3 / (a_2 - 1))
    with pytest.raises(SequenceError):
        counterexample_beta3(3)


def test_counterexample_block_ratios_and_roots():
    M = counterexample_beta3(5)
    a = M.meta["a"]
    for j in range(2, 6):
        for Q in range(2, j + 1):
            if Q * a[j - 1] <= M.P:
                assert M.log_mu[Q * a[j - 1]] == M.log_mu[a[j - 1]]
    p = np.arange(a[1], M.P // 2 + 1)
    assert np.all(M.log_root[2 * p] - M.log_root[p] >= LOG2 - 1e-12)
    assert M.is_lc


# ---------------------------------------------------------------- auxiliary sequences


def test_root_power_identity_and_gevrey():
    N = gevrey(1, 100)
    assert root_power_sequence(N, 1) is N
    L2 = root_power_sequence(N, 2)
    p = np.arange(L2.P + 1)
    np.testing.assert_allclose(L2.log_M, 0.5 * gammaln(2 * p + 1), atol=1e-9)


def test_root_power_ordering():
    N = gevrey(2, 120)
    L2, L3 = root_power_sequence(N, 2), root_power_sequence(N, 3)
    n = L3.P
    assert np.all(N.log_M[: n + 1] <= L2.log_M[: n + 1] + 1e-9)
    assert np.all(L2.log_M[: n + 1] <= L3.log_M[: n + 1] + 1e-9)


def test_slc_regularization_examples():
    for s in (1, 2):
        M = gevrey(s, 100)
        np.testing.assert_allclose(slc_regularization(M).log_mu, M.log_mu, atol=1e-12)
    S = slc_regularization(counterexample_beta3(5))
    p = np.arange(1, S.P + 1)
    assert np.all(np.diff(S.log_mu[1:] - np.log(p)) >= -1e-12)


def test_stirling_sandwich():
    assert stirling_sandwich_holds(1000)


# ---------------------------------------------------------------- relations


def test_preceq_examples():
    cfg = TruncationConfig()
    g1, g2 = gevrey(1, 512), gevrey(2, 512)
    v = preceq(g1, g1, cfg)
    assert v.holds and v.witnesses["log_sup"] == 0.0
    assert preceq(g1, g2, cfg).holds
    back = preceq(g2, g1, cfg)
    assert back.fails and back.witnesses["trend"] == "diverging" and "violating_index" in back.witnesses
    assert equivalent(g2, g2, cfg).holds
    assert equivalent(g1, g2, cfg).fails


# ---------------------------------------------------------------- config and spec loading


def test_config_round_trip_and_validation():
    cfg = TruncationConfig(P=300, seed=11)
    assert TruncationConfig.from_dict(cfg.to_dict()) == cfg
    with pytest.raises((ValueError, TypeError)):
        TruncationConfig.from_dict({"no_such_field": 1})
    with pytest.raises(ValueError):
        TruncationConfig(t_min=-1.0)


def test_sequence_from_spec():
    M = sequence_from_spec({"family": "gevrey", "params": {"s": 2}, "P": 40})
    np.testing.assert_allclose(M.log_mu[1:], 2 * np.log(np.arange(1, 41)))
    E = sequence_from_spec(M.to_dict())
    np.testing.assert_array_equal(E.log_mu, M.log_mu)
    assert sequence_from_spec({"family": "beta3_counterexample", "params": {"J": 4}}).meta["J"] == 4
    for bad in ({"family": "nope"}, {"log_mu": "x"}, [], {"family": "gevrey", "params": {"s": 0.2}}):
        with pytest.raises(SequenceError):
            sequence_from_spec(bad)


# ---------------------------------------------------------------- properties


@settings(max_examples=60, deadline=None)
@given(lc_strategy)
def test_lc_invariants(v):
    M = from_log_quotients(v)
    p = np.arange(1, M.P + 1)
    roots = M.log_M[1:] / p
    assert M.log_M[0] == 0.0
    np.testing.assert_allclose(M.log_M, np.cumsum(v), atol=1e-9)
    assert np.all(np.diff(roots) >= -1e-9)
    assert np.all(roots <= M.log_mu[1:] + 1e-9)


@settings(max_examples=40, deadline=None)
@given(lc_strategy, st.integers(2, 4))
def test_root_power_dominates(v, C):
    N = from_log_quotients(v)
    if N.P // C < 2:
        return
    L = root_power_sequence(N, C)
    assert np.all(N.log_M[: L.P + 1] <= L.log_M + 1e-9)
