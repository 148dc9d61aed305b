"""Verification of the equivalence theorems and the implication chain on fixtures and random corpora."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from . import conditions as cond
from .matrix import build_matrix, rows_equivalent, verify_identities
from .sequence import LC_FLAGS, SequenceError, TruncationConfig, WeightSequence, from_log_quotients
from .verdict import FAILS, HOLDS, INCONCLUSIVE, ConditionVerdict, _jsonable
from .weightfn import (
    WeightFunction,
    check_alpha0_fn,
    check_alpha1_fn,
    check_majorant_equivalence,
    check_omega6_fn,
    check_omega7_fn,
    check_omega1_fn,
    check_strong_nq,
    from_sequence,
    gamma_bounds,
    gamma_verdict,
)

CONSISTENT = "consistent"
VIOLATED = "violated"
REJECTED = "rejected"
THEOREM_IDS = (
    "omega1charact",
    "beta3comparsion",
    "alpha0theorem",
    "alpha0theorem1rem",
    "alpha0theoremcor",
    "omega7prop",
    "chain",
    "matrix_identities",
    "alpha0_fn_equivalence",
)
PROFILES = ("generic", "mg", "staircase")


@dataclass
class TheoremReport:
    theorem_id: str
    subject: str
    assertions: list  # (label, ConditionVerdict)
    edges: list  # (a, b): "a holds" must not meet "b fails"
    consistency: str
    violation_detail: dict = field(default_factory=dict)
    notes: str = ""

    def to_dict(self) -> dict:
        return {
            "theorem_id": self.theorem_id,
            "subject": self.subject,
            "consistency": self.consistency,
            "assertions": [{"label": k, **v.to_dict()} for k, v in self.assertions],
            "edges": [list(e) for e in self.edges],
            "violation_detail": _jsonable(self.violation_detail),
            "notes": self.notes,
        }


def implies(a: str, b: str) -> list[tuple[str, str]]:
    return [(a, b)]


def equiv(*labels: str) -> list[tuple[str, str]]:
    return [(a, b) for a in labels for b in labels if a != b]


def judge(theorem_id: str, subject: str, assertions: list, edges: list, notes: str = "") -> TheoremReport:
    """Graph consistency of the conclusive verdicts."""
    status = dict(assertions)
    for a, b in edges:
        if status[a].holds and status[b].fails:
            detail = {
                "antecedent": a,
                "consequent": b,
                "antecedent_witnesses": status[a].witnesses,
                "consequent_witnesses": status[b].witnesses,
            }
            return TheoremReport(theorem_id, subject, assertions, edges, VIOLATED, detail, notes)
    involved = {x for e in edges for x in e}
    state = CONSISTENT if all(status[x].conclusive for x in involved) else INCONCLUSIVE
    return TheoremReport(theorem_id, subject, assertions, edges, state, {}, notes)


def _reject(theorem_id: str, subject: str, reason: str, assertions=None) -> TheoremReport:
    return TheoremReport(theorem_id, subject, assertions or [], [], REJECTED, {}, reason)


class Subject:
    """A sequence or a weight function with memoized verdicts (shared across theorems)."""

    def __init__(self, obj, cfg: TruncationConfig):
        self.cfg = cfg
        self._memo: dict[str, ConditionVerdict] = {}
        if isinstance(obj, WeightSequence):
            self.M = obj
            self.w = from_sequence(obj) if obj.flags >= LC_FLAGS else None
            self.label = obj.label
        elif isinstance(obj, WeightFunction):
            self.M = obj.sequence
            self.w = obj
            self.label = obj.family_tag
        else:
            raise TypeError("subject must be a WeightSequence or a WeightFunction")
        self._gamma = None

    def gamma(self):
        if self._gamma is None:
            self._gamma = gamma_bounds(self.w, self.cfg)
        return self._gamma

    def get(self, key: str) -> ConditionVerdict:
        if key not in self._memo:
            self._memo[key] = self._compute(key)
        return self._memo[key]

    def _compute(self, key: str) -> ConditionVerdict:
        cfg, M, w = self.cfg, self.M, self.w
        fn_side: dict[str, Callable[[], ConditionVerdict]] = {
            "omega1_fn": lambda: check_omega1_fn(w, cfg),
            "omega6_fn": lambda: check_omega6_fn(w, cfg),
            "omega7_fn": lambda: check_omega7_fn(w, cfg),
            "alpha0_fn": lambda: check_alpha0_fn(w, cfg),
            "alpha1_fn": lambda: check_alpha1_fn(w, cfg),
            "strong_nq": lambda: check_strong_nq(w, cfg),
            "majorant_equivalence": lambda: check_majorant_equivalence(w, cfg),
            "gamma_gt0": lambda: gamma_verdict(self.gamma(), 0.0, "gamma_gt0"),
            "gamma_gt1": lambda: gamma_verdict(self.gamma(), 1.0, "gamma_gt1"),
            "gamma_inf": lambda: gamma_verdict(self.gamma(), math.inf, "gamma_inf"),
        }
        if key in fn_side:
            return fn_side[key]()
        if M is None:
            raise SequenceError(f"{key} needs a sequence subject")
        seq_side: dict[str, Callable[[], ConditionVerdict]] = {
            "omega1mixed": lambda: cond.check_omega1mixed(M, M, cfg),
            "root_form": lambda: cond.check_raimixedM(M, cfg, C_values=[1]),
            "mu_form": lambda: cond.check_mu_form(M, cfg),
            "mu_over_p": lambda: cond.check_mu_over_p(M, cfg),
            "slc_equivalent": lambda: cond.check_slc_equivalent(M, cfg),
            "raimixed_LC": lambda: cond.check_raimixed_via_LC(M, cfg),
        }
        if key in seq_side:
            return seq_side[key]()
        return cond.check(key, M, cfg)


def _lc_gate(theorem_id: str, s: Subject) -> TheoremReport | None:
    if s.M is None:
        return _reject(theorem_id, s.label, "theorem is stated for weight sequences")
    if not s.M.flags >= LC_FLAGS:
        return _reject(theorem_id, s.label, "subject is not flagged log-convex and normalized")
    if not s.M.diverges_on_window(s.cfg):
        return _reject(theorem_id, s.label, "roots do not grow on the tail window")
    return None


def _collect(s: Subject, labels: dict[str, str]) -> list:
    return [(label, s.get(key)) for label, key in labels.items()]


def _omega1charact(s: Subject) -> TheoremReport:
    a = _collect(s, {"(i) root ratio liminf": "omega1_seq", "(iii) omega1 of omega_M": "omega1_fn", "gamma > 0": "gamma_gt0"})
    return judge("omega1charact", s.label, a, equiv(*(x for x, _ in a)))


def _beta3comparsion(s: Subject) -> TheoremReport:
    a = _collect(s, {"(i) beta3": "beta3", "(ii) root ratio liminf": "omega1_seq", "(iii) omega1 of omega_M": "omega1_fn"})
    edges = implies("(i) beta3", "(ii) root ratio liminf") + equiv("(ii) root ratio liminf", "(iii) omega1 of omega_M")
    return judge("beta3comparsion", s.label, a, edges)


def _alpha0theorem(s: Subject) -> TheoremReport:
    a = _collect(s, {"(i) alpha0 of omega_M": "alpha0_fn", "(ii) raimixedM": "raimixedM", "(iii) raimixed": "raimixed"})
    return judge("alpha0theorem", s.label, a, equiv(*(x for x, _ in a)))


def _alpha0theorem1rem(s: Subject) -> TheoremReport:
    mg = s.get("mg")
    labels = {
        "(i) alpha0 of omega_M": "alpha0_fn",
        "(ii) raimixedM": "raimixedM",
        "(iii) root form, C = 1": "root_form",
        "(iv) mu_p/p almost increasing": "mu_over_p",
        "(v) equivalent to slc": "slc_equivalent",
        "(vi) quotient form": "mu_form",
        "(vii) rai": "rai",
    }
    if not mg.holds:
        return _reject("alpha0theorem1rem", s.label, f"hypothesis (mg) not certified (status {mg.status})", [("mg", mg)])
    a = _collect(s, labels)
    return judge("alpha0theorem1rem", s.label, a, equiv(*labels), "mg holds")


def _alpha0theoremcor(s: Subject) -> TheoremReport:
    a = _collect(s, {"alpha1 of omega_M": "alpha1_fn", "mixed root condition (M, M)": "omega1mixed"})
    return judge("alpha0theoremcor", s.label, a, equiv(*(x for x, _ in a)))


def _omega7prop(s: Subject) -> TheoremReport:
    a = _collect(s, {"omega7 sequence form": "omega7_seq", "omega7 of omega_M": "omega7_fn", "root ratio liminf": "omega1_seq"})
    edges = equiv("omega7 sequence form", "omega7 of omega_M") + implies("omega7 sequence form", "root ratio liminf")
    return judge("omega7prop", s.label, a, edges)


FN_CHAIN = {
    "omega7": "omega7_fn",
    "gamma = inf": "gamma_inf",
    "gamma > 1": "gamma_gt1",
    "strong non-quasianalyticity": "strong_nq",
    "alpha0": "alpha0_fn",
    "alpha1": "alpha1_fn",
    "omega1": "omega1_fn",
    "gamma > 0": "gamma_gt0",
}
FN_CHAIN_EDGES = (
    implies("omega7", "gamma = inf")
    + implies("gamma = inf", "gamma > 1")
    + equiv("gamma > 1", "strong non-quasianalyticity")
    + implies("gamma > 1", "alpha0")
    + implies("alpha0", "alpha1")
    + implies("alpha1", "omega1")
    + equiv("omega1", "gamma > 0")
)
SEQ_CHAIN = {
    "seq: omega7": "omega7_seq",
    "seq: beta1": "beta1",
    "seq: beta3": "beta3",
    "seq: root ratio liminf": "omega1_seq",
    "seq: rai": "rai",
    "seq: raimixed": "raimixed",
    "seq: raimixedM": "raimixedM",
    "seq: mixed root condition": "omega1mixed",
}
SEQ_CHAIN_EDGES = (
    implies("seq: beta1", "seq: beta3")
    + implies("seq: beta3", "seq: root ratio liminf")
    + implies("seq: omega7", "seq: root ratio liminf")
    + implies("seq: rai", "seq: raimixed")
    + equiv("seq: raimixed", "seq: raimixedM")
    + implies("seq: raimixedM", "seq: mixed root condition")
    + equiv("seq: omega7", "omega7")
    + equiv("seq: raimixedM", "alpha0")
    + equiv("seq: mixed root condition", "alpha1")
    + equiv("seq: root ratio liminf", "omega1")
)


def _chain(s: Subject) -> TheoremReport:
    a = _collect(s, FN_CHAIN)
    edges = list(FN_CHAIN_EDGES)
    if s.M is not None:
        a += _collect(s, SEQ_CHAIN)
        edges += SEQ_CHAIN_EDGES
    return judge("chain", s.label, a, edges)


def _matrix_identities(s: Subject) -> TheoremReport:
    M = s.M
    P = min(M.P, 512) if M is not None else 200
    try:
        Mx = build_matrix(s.w, P=P)
    except SequenceError as exc:
        return _reject("matrix_identities", s.label, f"matrix not buildable: {exc}")
    a = verify_identities(Mx, s.cfg)
    # each identity is unconditional: a failure contradicts the always-holding node
    true = ConditionVerdict("identity", HOLDS, {}, 0.0, (0, 0))
    a = [("always", true)] + a
    edges = [("always", label) for label, _ in a[1:]]
    if M is not None:
        a += [("rows equivalent", rows_equivalent(Mx, s.cfg)), ("mg", s.get("mg")), ("omega6 of omega_M", s.get("omega6_fn"))]
        edges += equiv("rows equivalent", "mg", "omega6 of omega_M")
    return judge("matrix_identities", s.label, a, edges)


def _alpha0_fn_equivalence(s: Subject) -> TheoremReport:
    a = _collect(s, {"alpha0": "alpha0_fn", "equivalent to concave majorant": "majorant_equivalence"})
    return judge("alpha0_fn_equivalence", s.label, a, equiv(*(x for x, _ in a)))


_SEQ_THEOREMS = {
    "omega1charact": _omega1charact,
    "beta3comparsion": _beta3comparsion,
    "alpha0theorem": _alpha0theorem,
    "alpha0theorem1rem": _alpha0theorem1rem,
    "alpha0theoremcor": _alpha0theoremcor,
    "omega7prop": _omega7prop,
}
_ANY_THEOREMS = {
    "chain": _chain,
    "matrix_identities": _matrix_identities,
    "alpha0_fn_equivalence": _alpha0_fn_equivalence,
}


def verify_theorem(theorem_id: str, subject, cfg: TruncationConfig) -> TheoremReport:
    """Evaluate every assertion of the theorem and judge the pattern of conclusive verdicts.

    ``subject`` is a WeightSequence, a WeightFunction or an already wrapped Subject.
    """
    s = subject if isinstance(subject, Subject) else Subject(subject, cfg)
    if theorem_id in _SEQ_THEOREMS:
        gate = _lc_gate(theorem_id, s)
        return gate if gate else _SEQ_THEOREMS[theorem_id](s)
    if theorem_id in _ANY_THEOREMS:
        if s.M is not None:
            gate = _lc_gate(theorem_id, s)
            if gate:
                return gate
        return _ANY_THEOREMS[theorem_id](s)
    raise ValueError(f"unknown theorem {theorem_id!r}; known: {', '.join(THEOREM_IDS)}")


# ---------------------------------------------------------------- random corpora


def _tail(rng: np.random.Generator, p: np.ndarray, allow_fast: bool = True) -> tuple[np.ndarray, dict]:
    """Increasing regular tail profile f(p) for log mu_p."""
    kinds = ["power", "log_power"] + (["q_type"] if allow_fast else [])
    kind = kinds[int(rng.integers(len(kinds)))]
    if kind == "power":
        # exponents near 1 sit on the boundary of several conditions
        s = float(rng.uniform(0.5, 0.8)) if rng.random() < 0.3 else float(rng.uniform(1.2, 3.0))
        return s * np.log(p), {"tail": kind, "s": s}
    if kind == "log_power":
        b = float(rng.uniform(1.5, 2.5))
        c = float(rng.uniform(0.5, 2.0))
        return c * np.log(p) ** b, {"tail": kind, "b": b, "c": c}
    beta = float(rng.uniform(0.5, 1.0))
    c = float(rng.uniform(0.2, 1.0))
    return c * p**beta, {"tail": kind, "beta": beta, "c": c}


def _draft(rng: np.random.Generator, P: int, profile: str, k: int) -> WeightSequence:
    p = np.arange(1, P + 1, dtype=float)
    if profile == "staircase":
        # constant quotients on geometrically growing blocks
        v = np.zeros(P + 1)
        edges = [1]
        while edges[-1] <= P:
            edges.append(int(math.ceil(edges[-1] * rng.uniform(1.5, 4.0))) + 1)
        level = float(rng.uniform(0.0, 1.0))
        for a, b in zip(edges[:-1], edges[1:]):
            v[a : min(b, P + 1)] = level
            level += float(rng.uniform(0.3, 1.5)) * math.log(b)
        meta = {"profile": profile, "blocks": edges[:-1]}
        return from_log_quotients(v, label=f"{profile}#{k}", meta=meta)
    head = int(rng.integers(2, 33))
    inc = rng.exponential(float(rng.uniform(0.05, 1.0)), size=head)
    inc[0] = float(rng.uniform(0.0, 2.0))
    hv = np.cumsum(inc)
    f, meta = _tail(rng, p, allow_fast=profile != "mg")
    v = np.zeros(P + 1)
    v[1 : head + 1] = hv
    v[head + 1 :] = np.maximum(hv[-1], hv[-1] + f[head:] - f[head - 1])
    v = np.concatenate(([0.0], np.maximum.accumulate(v[1:])))
    meta.update(profile=profile, head=head)
    return from_log_quotients(v, label=f"{profile}#{k}", meta=meta)


MG_LOG_RATIO_BOUND = math.log(16.0)


def random_lc_corpus(n: int, profile: str, cfg: TruncationConfig, budget: int | None = None) -> list[WeightSequence]:
    """n log-convex normalized sequences, deterministic in cfg.seed.

    Profile mg keeps drafts with sup mu_{2p}/mu_p <= 16 and a holding (mg) verdict.
    """
    if n < 1:
        raise ValueError("n must be >= 1")
    if profile not in PROFILES:
        raise ValueError(f"unknown profile {profile!r}; known: {', '.join(PROFILES)}")
    rng = np.random.default_rng(cfg.seed)
    budget = 50 * n if budget is None else budget
    out, tries = [], 0
    while len(out) < n:
        if tries >= budget:
            raise RuntimeError(f"rejection budget {budget} exhausted with {len(out)} of {n} accepted")
        tries += 1
        M = _draft(rng, cfg.P, profile, len(out))
        if profile == "mg":
            h = np.arange(1, M.P // 2 + 1)
            if np.max(M.log_mu[2 * h] - M.log_mu[h]) > MG_LOG_RATIO_BOUND or not cond.check_mg(M, cfg).holds:
                continue
        out.append(M)
    return out


def open_problem_candidate(s: Subject) -> bool:
    """Mixed root condition holds while raimixedM fails conclusively."""
    return s.get("omega1mixed").holds and s.get("raimixedM").fails


def sweep(corpus, theorem_ids, cfg: TruncationConfig) -> dict:
    """Run every theorem on every subject; deterministic summary (no timing data)."""
    theorem_ids = list(theorem_ids)
    for t in theorem_ids:
        if t not in THEOREM_IDS:
            raise ValueError(f"unknown theorem {t!r}")
    counts = {t: {CONSISTENT: 0, VIOLATED: 0, INCONCLUSIVE: 0, REJECTED: 0} for t in theorem_ids}
    violations, candidates = [], []
    for obj in corpus:
        s = Subject(obj, cfg)
        for t in theorem_ids:
            rep = verify_theorem(t, s, cfg)
            counts[t][rep.consistency] += 1
            if rep.consistency == VIOLATED:
                violations.append(rep.to_dict())
        if s.M is not None and s.w is not None and open_problem_candidate(s):
            candidates.append(s.label)
    total = {k: sum(c[k] for c in counts.values()) for k in (CONSISTENT, VIOLATED, INCONCLUSIVE, REJECTED)}
    return {
        "schema": "weightseq.sweep/1",
        "subjects": len(corpus),
        "theorems": theorem_ids,
        "counts": counts,
        "total": total,
        "violated": total[VIOLATED],
        "violations": violations,
        "open_problem_candidates": candidates,
        "config": cfg.to_dict(),
    }
