import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from weightseq.associated import DomainError
from weightseq.sequence import gevrey, q_gevrey
from weightseq.weightfn import (
    biconjugate,
    check_alpha0_fn,
    check_alpha1_fn,
    check_majorant_equivalence,
    check_omega7_fn,
    check_omega_conditions,
    check_strong_nq,
    equivalent_fn,
    from_sequence,
    function_from_spec,
    gamma_bounds,
    gamma_index,
    kappa,
    least_concave_majorant,
    make_closed_form,
    phi_star,
    phi_star_domain,
    upper_hull,
)

LIN = make_closed_form("linear")
SQRT = make_closed_form("power", 0.5)
TLT = make_closed_form("t_log_t")


@pytest.fixture(scope="module")
def wg2():
    return from_sequence(gevrey(2, 512))


def test_closed_forms():
    assert TLT(2.0) == pytest.approx(2 * math.log(2))
    assert SQRT(4.0) == pytest.approx(1.0)
    for fam, a in (("power", 0.5), ("t_log_t", None), ("log_power", 2.0), ("linear", None)):
        w = make_closed_form(fam, a)
        assert w(1.0) == 0.0 and w(0.0) == 0.0
        t = np.geomspace(1e-3, 1e6, 300)
        assert np.all(np.diff(w(t)) >= 0)
    with pytest.raises(ValueError):
        make_closed_form("nope")


def test_phi_star_examples(wg2):
    for w in (LIN, SQRT, TLT, wg2):
        assert phi_star(w, 0.0) == 0.0
    assert phi_star(LIN, 2.0) == pytest.approx(2 * math.log(2) - 1, abs=1e-9)
    assert phi_star(LIN, 1.0) == pytest.approx(0.0, abs=1e-12)
    # dense-grid oracle
    y = np.linspace(-5, 10, 200001)
    assert phi_star(LIN, 3.0) == pytest.approx(np.max(3.0 * y - LIN.phi(y)), abs=1e-6)


def test_phi_star_domain_cap(wg2):
    x = np.array([1.0, 10.0, 1e4])
    dom, vals = phi_star_domain(wg2, x)
    assert dom.size == 2 and vals.size == 2
    with pytest.raises(DomainError):
        phi_star(wg2, 1e4)


def test_biconjugate(wg2):
    y = np.linspace(0.0, 6.0, 20)
    for w in (LIN, SQRT, wg2):
        np.testing.assert_allclose(biconjugate(w, y), w.phi(y), atol=1e-4)


def test_omega_conditions_examples(wg2, cfg):
    st_ = lambda w: {k: v.status for k, v in check_omega_conditions(w, cfg).items()}  # noqa: E731
    g = st_(wg2)
    assert g["omega5"] == "holds" and g["omega6"] == "holds"
    t = st_(TLT)
    assert t["omega2"] == "fails" and t["omega6"] == "holds"
    lin = st_(LIN)
    assert all(lin[k] == "holds" for k in ("omega0", "omega1", "omega2", "omega3", "omega4", "omega6"))
    assert lin["omega5"] == "fails"


def test_alpha0(cfg):
    for w in (LIN, SQRT):
        v = check_alpha0_fn(w, cfg)
        assert v.holds and v.witnesses["C"] == pytest.approx(1.0, abs=0.05)
    assert check_alpha0_fn(TLT, cfg).fails


def test_alpha1(cfg):
    v = check_alpha1_fn(TLT, cfg)
    assert v.holds and 1.0 <= v.witnesses["sup_ratio"] <= 1.1
    s = check_alpha1_fn(SQRT, cfg)
    assert s.holds and s.witnesses["sup_ratio"] <= 1.0
    assert check_alpha1_fn(make_closed_form("power", 2.0), cfg).fails


def test_gamma(cfg):
    assert gamma_index(SQRT, cfg) == pytest.approx(2.0, abs=0.25)
    assert gamma_index(TLT, cfg) == pytest.approx(1.0, abs=0.25)
    est = gamma_bounds(from_sequence(q_gevrey(2, 512)), cfg)
    assert est.at_sentinel and est.value == math.inf


def test_kappa_and_strong_nq(cfg):
    assert kappa(SQRT, 0.0) == 0.0
    # kappa(y) / omega(y) -> int_1^inf t^(-3/2) dt = 2
    assert kappa(SQRT, 1e6) / SQRT(1e6) == pytest.approx(2.0, rel=0.01)
    v = check_strong_nq(SQRT, cfg)
    assert v.holds and v.witnesses["C"] == pytest.approx(2.0, rel=0.05)
    assert not check_strong_nq(LIN, cfg).holds


def test_omega7(cfg):
    assert check_omega7_fn(from_sequence(q_gevrey(2, 512)), cfg).holds
    assert check_omega7_fn(SQRT, cfg).fails
    assert check_omega7_fn(TLT, cfg).fails


def test_concave_majorant():
    F = least_concave_majorant(SQRT, T=1e6)
    hx, hy = F.params["hull_t"], F.params["hull_v"]
    np.testing.assert_allclose(hy, SQRT(hx), atol=1e-9)
    G = least_concave_majorant(TLT, T=100.0)
    assert G(50.0) == pytest.approx(TLT(100.0) / 2, rel=1e-9)
    assert G(50.0) > TLT(50.0)


def test_majorant_equivalence_matches_alpha0(cfg):
    for w in (LIN, SQRT, TLT):
        a0, maj = check_alpha0_fn(w, cfg), check_majorant_equivalence(w, cfg)
        assert a0.status == maj.status, w


def test_equivalent_fn(cfg):
    v = equivalent_fn(SQRT, SQRT, cfg)
    assert v.holds and v.witnesses["A"] == 1.0
    assert equivalent_fn(SQRT, LIN, cfg).fails


def test_function_from_spec():
    assert function_from_spec({"family": "power", "param": 0.5})(4.0) == pytest.approx(1.0)
    w = function_from_spec({"family": "gevrey", "params": {"s": 1}, "P": 50})
    assert w(math.e) == pytest.approx(2 - math.log(2))
    with pytest.raises(ValueError):
        function_from_spec([1, 2])


@settings(max_examples=50, deadline=None)
@given(st.lists(st.tuples(st.integers(0, 400).map(lambda k: k / 4), st.floats(-50, 50)), min_size=3, max_size=60, unique_by=lambda p: p[0]))
def test_upper_hull_is_concave_majorant(points):
    pts = sorted(points)
    x, y = np.array([p[0] for p in pts]), np.array([p[1] for p in pts])
    hx, hy = upper_hull(x, y)
    assert np.all(np.interp(x, hx, hy) >= y - 1e-9)
    if hx.size >= 3:
        slopes = np.diff(hy) / np.diff(hx)
        assert np.all(np.diff(slopes) <= 1e-9)


@settings(max_examples=30, deadline=None)
@given(st.floats(0.2, 0.9), st.lists(st.floats(0.0, 30.0), min_size=4, max_size=12))
def test_phi_star_monotone_convex(a, xs):
    w = make_closed_form("power", a)
    x = np.sort(np.asarray(xs))
    v = phi_star(w, x)
    assert np.all(np.diff(v) >= -1e-9)
    mid = phi_star(w, (x[:-1] + x[1:]) / 2)
    assert np.all(mid <= (v[:-1] + v[1:]) / 2 + 1e-7)
