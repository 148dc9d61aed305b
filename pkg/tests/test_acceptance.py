"""The ten acceptance criteria, each at its stated tolerance and runtime budget.

Every criterion prints one PASS/FAIL line (shown in the pytest terminal summary,
or directly when this file is run as a script).
"""

import json
import math
import time

import numpy as np
import pytest

from weightseq import TruncationConfig, counterexample_beta3, gevrey, q_gevrey
from weightseq.associated import default_t_grid, omega_M, omega_M_bruteforce, recover_M
from weightseq.conditions import check, root_ratio_profile
from weightseq.matrix import build_matrix, mixed_moderate_growth, row_fixpoint, sandwich, transform_identity
from weightseq.theorems import random_lc_corpus, sweep
from weightseq.weightfn import (
    biconjugate,
    check_alpha0_fn,
    check_alpha1_fn,
    check_omega7_fn,
    from_sequence,
    gamma_bounds,
    gamma_index,
    make_closed_form,
    phi_star,
    phi_star_domain,
)

try:
    from conftest import ACCEPTANCE_LINES
except ImportError:  # run as a script
    ACCEPTANCE_LINES = []

CFG = TruncationConfig()


def fixtures():
    return [gevrey(1, 512), gevrey(2, 512), gevrey(3, 512), q_gevrey(2, 512), counterexample_beta3(5)]


def report(n: int, ok: bool, detail: str) -> None:
    line = f"[{'PASS' if ok else 'FAIL'}] criterion {n:2d}: {detail}"
    ACCEPTANCE_LINES.append(line)
    print(line)


# ---------------------------------------------------------------- 1


def test_criterion_01_oracle_equivalence():
    t0 = time.perf_counter()
    subjects = fixtures() + random_lc_corpus(100, "generic", CFG)
    worst = 0.0
    for M in subjects:
        t = default_t_grid(M, 200)
        fast = omega_M(M, t)
        brute = np.array([omega_M_bruteforce(M, float(x)) for x in t])
        worst = max(worst, float(np.max(np.abs(fast - brute))))
    dt = time.perf_counter() - t0
    ok = worst <= 1e-9 and dt < 10
    report(1, ok, f"max |omega_M - bruteforce| = {worst:.2e} over {len(subjects)} sequences in {dt:.1f}s")
    assert worst <= 1e-9
    assert dt < 10


# ---------------------------------------------------------------- 2


def test_criterion_02_round_trip():
    t0 = time.perf_counter()
    rec_err = row_err = 0.0
    for M in (gevrey(1, 200), q_gevrey(2, 120)):
        for p in range(0, 81):
            rec_err = max(rec_err, abs(recover_M(M, p) - float(M.log_M[p])))
        Mx = build_matrix(from_sequence(M), (1.0,), P=80)
        row_err = max(row_err, row_fixpoint(Mx, p_max=80).witnesses["max_abs_err"])
    dt = time.perf_counter() - t0
    ok = rec_err <= 1e-6 and row_err <= 1e-6 and dt < 30
    report(2, ok, f"recover_M err {rec_err:.2e}, W^(1) err {row_err:.2e} (p <= 80) in {dt:.1f}s")
    assert rec_err <= 1e-6 and row_err <= 1e-6
    assert dt < 30


# ---------------------------------------------------------------- 3


def test_criterion_03_vanishing():
    bad = []
    for M in fixtures():
        mu1 = float(M.mu[1])
        vals = omega_M(M, np.array([0.0, mu1 / 2, mu1]))
        if np.any(vals != 0.0):
            bad.append((M.label, vals.tolist()))
    report(3, not bad, "omega_M bit-zero at {0, mu_1/2, mu_1} on all fixtures" if not bad else f"nonzero: {bad}")
    assert not bad


# ---------------------------------------------------------------- 4


def test_criterion_04_example_fidelity():
    M = counterexample_beta3(5)
    b3 = check("beta3", M, CFG)
    blocks = b3.witnesses["block_witnesses"]
    beta3_ok = b3.fails and blocks and all(b["ratio"] == 1.0 and b["Q"] <= b["j"] for b in blocks)
    o1 = check("omega1_seq", M, CFG)
    a2 = M.meta["a"][1]
    _, ratios = root_ratio_profile(M, 2, p_min=a2)
    rmin = float(ratios.min())
    omega1_ok = o1.holds and o1.witnesses["L"] == 2 and rmin >= 2 - 1e-9 and o1.witnesses["all_ratios_min"] >= 2 - 1e-9
    ok = bool(beta3_ok and omega1_ok)
    report(4, ok, f"beta3 {b3.status} ({len(blocks)} block ratios == 1); omega1_seq {o1.status} L={o1.witnesses.get('L')} "
                  f"min ratio {rmin:.9f}")
    assert beta3_ok
    assert omega1_ok


# ---------------------------------------------------------------- 5


def test_criterion_05_tlogt_separation():
    w = make_closed_form("t_log_t")
    a1 = check_alpha1_fn(w, CFG)
    a0 = check_alpha0_fn(w, CFG)
    lams = a0.witnesses["lambdas"]
    small_t = a0.witnesses["D_lambda_small_t"]
    big = [d for lam, d in zip(lams, small_t) if lam <= 64 and d > 10]
    ok = a1.holds and a1.witnesses["sup_ratio"] <= 1.1 and a0.fails and bool(big)
    report(5, ok, f"alpha1 {a1.status} (sup ratio {a1.witnesses['sup_ratio']:.4f}); alpha0 {a0.status} "
                  f"(small-t sup {max(small_t):.1f} at lambda <= {max(lams)})")
    assert a1.holds and a1.witnesses["sup_ratio"] <= 1.1
    assert a0.fails and big


# ---------------------------------------------------------------- 6


def test_criterion_06_gamma_targets():
    t0 = time.perf_counter()
    g_pow = gamma_index(make_closed_form("power", 0.5), CFG)
    g_tlt = gamma_index(make_closed_form("t_log_t"), CFG)
    wq = from_sequence(q_gevrey(2, 512))
    est = gamma_bounds(wq, CFG)
    o7 = check_omega7_fn(wq, CFG)
    dt = time.perf_counter() - t0
    ok = 1.75 <= g_pow <= 2.25 and 0.75 <= g_tlt <= 1.25 and est.at_sentinel and o7.holds and dt < 60
    report(6, ok, f"gamma(power 1/2) = {g_pow:.3f}, gamma(t log t) = {g_tlt:.3f}, q_gevrey(2) sentinel={est.at_sentinel} "
                  f"omega7 {o7.status} in {dt:.1f}s")
    assert 1.75 <= g_pow <= 2.25
    assert 0.75 <= g_tlt <= 1.25
    assert est.at_sentinel and o7.holds
    assert dt < 60


# ---------------------------------------------------------------- 7


def test_criterion_07_matrix_identities():
    worst_transform, mg_ok, sandwich_D = 0.0, True, {}
    for s in (1, 2, 3):
        M = gevrey(s, 512)
        Mx = build_matrix(from_sequence(M), (1.0, 2.0, 3.0, 4.0), P=120)
        for l in (2.0, 3.0):
            worst_transform = max(worst_transform, transform_identity(Mx, l, p_max=60).witnesses["max_abs_err"])
        for l in (1.0, 2.0):
            mg_ok &= mixed_moderate_growth(Mx, l, n_max=100).holds
        v = sandwich(Mx, 2.0, CFG)
        sandwich_D[s] = v.witnesses["D_x"] if v.holds else math.inf
    sw_ok = all(math.isfinite(d) for d in sandwich_D.values())
    ok = worst_transform <= 1e-6 and mg_ok and sw_ok
    report(7, ok, f"transform err {worst_transform:.2e}; mixed mg {'holds' if mg_ok else 'fails'}; "
                  f"D_2 = {', '.join(f'{d:.3g}' for d in sandwich_D.values())}")
    assert worst_transform <= 1e-6
    assert mg_ok
    assert sw_ok


# ---------------------------------------------------------------- 8 and 10

FIXTURE_THEOREMS = ["omega1charact", "alpha0theorem", "alpha0theorem1rem", "omega7prop", "beta3comparsion"]
CORPUS_THEOREMS = ["chain", "alpha0theorem"]


def criterion_8_summary(cfg: TruncationConfig) -> str:
    parts = {
        "fixtures": sweep(fixtures(), FIXTURE_THEOREMS, cfg),
        "generic": sweep(random_lc_corpus(200, "generic", cfg), CORPUS_THEOREMS, cfg),
        "mg": sweep(random_lc_corpus(50, "mg", cfg), CORPUS_THEOREMS, cfg),
    }
    return json.dumps(parts, sort_keys=True)


_RUNS: list[str] = []


def test_criterion_08_theorem_sweeps():
    t0 = time.perf_counter()
    text = criterion_8_summary(TruncationConfig(seed=7))
    dt = time.perf_counter() - t0
    _RUNS.append(text)
    parts = json.loads(text)
    violated = {k: v["violated"] for k, v in parts.items()}
    ok = sum(violated.values()) == 0 and dt < 300
    report(8, ok, f"violated {violated} in {dt:.0f}s")
    assert sum(violated.values()) == 0, [v for p in parts.values() for v in p["violations"]]
    assert dt < 300


# ---------------------------------------------------------------- 9


def test_criterion_09_conjugate():
    rng = np.random.default_rng(7)
    lin = make_closed_form("linear")
    fns = {"linear": lin, "power(1/2)": make_closed_form("power", 0.5), "omega_M gevrey(2)": from_sequence(gevrey(2, 512))}
    problems = []
    worst_bi = 0.0
    for name, w in fns.items():
        if phi_star(w, 0.0) != 0.0:
            problems.append(f"{name}: phi*(0) != 0")
        x_all = np.sort(rng.uniform(0.0, 20.0, 50))
        x, v = phi_star_domain(w, x_all)
        if x.size < 50:
            problems.append(f"{name}: only {x.size} of 50 x inside the domain")
        if np.any(np.diff(v) < -1e-12):
            problems.append(f"{name}: not monotone")
        a, b = x[: x.size // 2], x[x.size // 2 :][: x.size // 2]
        mid = phi_star(w, (a + b) / 2)
        if np.any(mid > (phi_star(w, a) + phi_star(w, b)) / 2 + 1e-9):
            problems.append(f"{name}: not midpoint-convex")
        y = np.sort(rng.uniform(0.0, 6.0, 20))
        err = float(np.max(np.abs(biconjugate(w, y) - w.phi(y))))
        worst_bi = max(worst_bi, err)
    p2 = phi_star(lin, 2.0)
    if abs(p2 - (2 * math.log(2) - 1)) > 1e-6:
        problems.append(f"linear: phi*(2) = {p2}")
    ok = not problems and worst_bi <= 1e-4
    report(9, ok, f"biconjugation err {worst_bi:.2e}; phi*(2) = {p2:.9f}" + (f"; {problems}" if problems else ""))
    assert not problems
    assert worst_bi <= 1e-4


# ---------------------------------------------------------------- 10


def test_criterion_10_determinism():
    first = _RUNS[0] if _RUNS else criterion_8_summary(TruncationConfig(seed=7))
    second = criterion_8_summary(TruncationConfig(seed=7))
    ok = first == second
    report(10, ok, f"two seed-7 sweeps {'byte-identical' if ok else 'DIFFER'} ({len(first)} bytes)")
    assert ok


if __name__ == "__main__":
    import sys

    sys.exit(pytest.main([__file__, "-q"]))
