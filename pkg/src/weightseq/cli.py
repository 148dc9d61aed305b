"""Command-line front end.

Exit codes: 0 ran (verdicts are data, whatever they say), 2 input error,
3 theorem violation found by ``verify`` or ``corpus`` (an estimator defect).
"""

from __future__ import annotations

import argparse
import hashlib
import json
import math
import platform
import sys
import time
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np
import scipy

from . import __version__
from . import conditions as cond
from .associated import DomainError, default_t_grid, omega_M, omega_csv
from .matrix import DEFAULT_L_GRID, build_matrix, verify_identities
from .sequence import SequenceError, TruncationConfig, WeightSequence, sequence_from_spec
from .theorems import PROFILES, THEOREM_IDS, VIOLATED, Subject, random_lc_corpus, sweep, verify_theorem
from .verdict import _jsonable
from .weightfn import (
    FAMILIES,
    WeightFunction,
    check_alpha0_fn,
    check_alpha1_fn,
    check_majorant_equivalence,
    check_omega7_fn,
    check_omega_conditions,
    check_strong_nq,
    function_from_spec,
    gamma_bounds,
    phi_star_domain,
)

EXIT_OK, EXIT_INPUT, EXIT_VIOLATION = 0, 2, 3

FN_CONDITIONS = ("omega0", "omega1", "omega2", "omega3", "omega4", "omega5", "omega6", "omega7",
                 "alpha0", "alpha1", "strong_nq", "majorant_equivalence", "gamma")


class InputError(Exception):
    """Bad command-line input: reported with exit code 2."""


@dataclass
class RunManifest:
    command: str
    config: dict
    inputs: dict = field(default_factory=dict)  # name -> sha256 of the raw input
    versions: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        return {"command": self.command, "config": self.config, "inputs": self.inputs, "versions": self.versions}


def _versions() -> dict:
    return {"weightseq": __version__, "numpy": np.__version__, "scipy": scipy.__version__, "python": platform.python_version()}


# ---------------------------------------------------------------- input


def _read_json(path: str, manifest: RunManifest) -> dict:
    try:
        raw = Path(path).read_bytes()
    except OSError as e:
        raise InputError(f"{path}: {e.strerror}") from None
    manifest.inputs[path] = hashlib.sha256(raw).hexdigest()
    try:
        return json.loads(raw)
    except json.JSONDecodeError as e:
        raise InputError(f"{path}: line {e.lineno}, column {e.colno}: {e.msg}") from None
    except UnicodeDecodeError as e:
        raise InputError(f"{path}: not UTF-8 text ({e.reason})") from None


def _config(args) -> TruncationConfig:
    d = {}
    if getattr(args, "config", None):
        d = _read_json(args.config, args.manifest)
        if not isinstance(d, dict):
            raise InputError(f"{args.config}: config must be a JSON object")
    if getattr(args, "seed", None) is not None:
        d["seed"] = args.seed
    try:
        cfg = TruncationConfig.from_dict(d)
    except (TypeError, ValueError) as e:
        raise InputError(f"config: {e}") from None
    args.manifest.config = cfg.to_dict()
    return cfg


def _load_sequence(path: str, args) -> WeightSequence:
    try:
        return sequence_from_spec(_read_json(path, args.manifest))
    except SequenceError as e:
        raise InputError(f"{path}: {e}") from None


def _load_subject(path: str, args) -> WeightSequence | WeightFunction:
    """A sequence spec/export, or a closed-form weight-function spec."""
    spec = _read_json(path, args.manifest)
    try:
        if isinstance(spec, dict) and spec.get("family") in FAMILIES:
            return function_from_spec(spec)
        return sequence_from_spec(spec)
    except (SequenceError, ValueError) as e:
        raise InputError(f"{path}: {e}") from None


def _floats(text: str, name: str) -> list[float]:
    try:
        vals = [float(x) for x in text.split(",") if x.strip()]
    except ValueError:
        raise InputError(f"{name}: expected comma-separated numbers, got {text!r}") from None
    if not vals:
        raise InputError(f"{name}: empty list")
    return vals


def _grid(text: str, name: str) -> np.ndarray:
    """'a:b:n' (geometric, a > 0) or 'a,b,c'."""
    if ":" in text:
        parts = text.split(":")
        if len(parts) != 3:
            raise InputError(f"{name}: expected lo:hi:n")
        try:
            lo, hi, n = float(parts[0]), float(parts[1]), int(parts[2])
        except ValueError:
            raise InputError(f"{name}: expected lo:hi:n with numbers") from None
        if lo <= 0 or hi < lo or n < 2:
            raise InputError(f"{name}: need 0 < lo <= hi and n >= 2")
        return np.geomspace(lo, hi, n)
    return np.asarray(_floats(text, name))


# ---------------------------------------------------------------- output


def _emit(payload: dict, args, schema: str) -> None:
    """JSON with schema, manifest and a separate timestamp field (excluded from determinism)."""
    doc = {"schema": schema, **_jsonable(payload), "manifest": args.manifest.to_dict(),
           "timestamp": time.strftime("%Y-%m-%dT%H:%M:%SZ", time.gmtime())}
    _write(json.dumps(doc, indent=2, sort_keys=True) + "\n", args)


def _write(text: str, args) -> None:
    if getattr(args, "out", None):
        Path(args.out).write_text(text)
    else:
        sys.stdout.write(text)


# ---------------------------------------------------------------- commands


def cmd_seq(args) -> int:
    if args.spec:
        M = _load_sequence(args.spec, args)
    else:
        if not args.family:
            raise InputError("give a spec file or --family")
        params = {k: v for k, v in (("s", args.s), ("q", args.q), ("J", args.J)) if v is not None}
        spec = {"family": args.family, "params": params, "P": args.P}
        try:
            M = sequence_from_spec(spec)
        except SequenceError as e:
            raise InputError(str(e)) from None
    args.manifest.config = {"P": M.P}
    out = M.to_dict()
    out.pop("schema")
    if M.meta.get("family") == "beta3_counterexample":
        a, log_c = M.meta["a"], M.meta["log_c"]
        out["blocks"] = [{"j": j + 1, "a_j": a[j], "log_c_j": log_c[j]} for j in range(len(log_c))]
    print(f"{M.label}: P={M.P} log_convex={'log_convex' in M.flags} normalized={'normalized' in M.flags} "
          f"roots_diverge_on_window={M.diverges_on_window()}", file=sys.stderr)
    _emit(out, args, "weightseq.sequence/1")
    return EXIT_OK


def _fn_verdicts(w: WeightFunction, ids, cfg: TruncationConfig) -> dict:
    out = {}
    omegas = None
    for cid in ids:
        if cid.startswith("omega") and cid != "omega7":
            omegas = omegas or check_omega_conditions(w, cfg)
            out[cid] = omegas[cid].to_dict()
        elif cid == "omega7":
            out[cid] = check_omega7_fn(w, cfg).to_dict()
        elif cid == "alpha0":
            out[cid] = check_alpha0_fn(w, cfg).to_dict()
        elif cid == "alpha1":
            out[cid] = check_alpha1_fn(w, cfg).to_dict()
        elif cid == "strong_nq":
            out[cid] = check_strong_nq(w, cfg).to_dict()
        elif cid == "majorant_equivalence":
            out[cid] = check_majorant_equivalence(w, cfg).to_dict()
        elif cid == "gamma":
            est = gamma_bounds(w, cfg)
            out[cid] = {"value": est.value, "lower": est.lower, "upper": est.upper, "gamma_max": est.gamma_max,
                        "at_sentinel": est.at_sentinel}
    return out


def cmd_check(args) -> int:
    cfg = _config(args)
    subject = _load_subject(args.subject, args)
    is_seq = isinstance(subject, WeightSequence)
    if args.conditions == "all":
        ids = list(cond.CONDITIONS if is_seq else FN_CONDITIONS)
    else:
        ids = [c.strip() for c in args.conditions.split(",") if c.strip()]
    known = (set(cond.CONDITIONS) if is_seq else set()) | set(FN_CONDITIONS)
    unknown = [c for c in ids if c not in known]
    if unknown:
        raise InputError(f"unknown condition(s) {', '.join(unknown)}; known: {', '.join(sorted(known))}")
    verdicts = {}
    fn_ids = [c for c in ids if c in FN_CONDITIONS and not (is_seq and c in cond.CONDITIONS)]
    for c in ids:
        if is_seq and c in cond.CONDITIONS:
            verdicts[c] = cond.check(c, subject, cfg).to_dict()
    if fn_ids:
        if is_seq:
            subject_fn = Subject(subject, cfg).w
            if subject_fn is None:
                raise InputError("function-side conditions need a log-convex normalized sequence")
        else:
            subject_fn = subject
        verdicts.update(_fn_verdicts(subject_fn, fn_ids, cfg))
    label = subject.label if is_seq else subject.family_tag
    _emit({"subject": label, "verdicts": {c: verdicts[c] for c in ids}}, args, "weightseq.verdicts/1")
    return EXIT_OK


def cmd_omega(args) -> int:
    M = _load_sequence(args.subject, args)
    if args.t is not None:
        ts = np.asarray(_floats(args.t, "--t"))
    elif args.t_grid:
        ts = _grid(args.t_grid, "--t-grid")
    else:
        ts = default_t_grid(M)
    try:
        omega_M(M, ts)
        text = omega_csv(M, ts)
    except (DomainError, SequenceError) as e:
        raise InputError(str(e)) from None
    _write(text, args)
    return EXIT_OK


def cmd_conjugate(args) -> int:
    if args.subject:
        try:
            w = function_from_spec(_read_json(args.subject, args.manifest))
        except (SequenceError, ValueError) as e:
            raise InputError(f"{args.subject}: {e}") from None
    elif args.family:
        try:
            w = function_from_spec({"family": args.family, "param": args.param})
        except ValueError as e:
            raise InputError(str(e)) from None
    else:
        raise InputError("give a function/sequence spec file or --family")
    xs = _grid(args.x_grid, "--x-grid") if args.x_grid else np.asarray(_floats(args.x, "--x"))
    if np.any(xs < 0):
        raise InputError("x must be >= 0")
    dom, vals = phi_star_domain(w, xs)
    lines = ["x,phi_star"]
    for i, x in enumerate(xs):
        v = vals[i] if i < dom.size else math.nan  # beyond the domain the maximizer is capped
        lines.append(f"{x:.17g},{v:.17g}")
    _write("\n".join(lines) + "\n", args)
    return EXIT_OK


def cmd_matrix(args) -> int:
    cfg = _config(args)
    subject = _load_subject(args.subject, args)
    w = Subject(subject, cfg).w if isinstance(subject, WeightSequence) else subject
    if w is None:
        raise InputError("matrix needs a log-convex normalized sequence or a weight function")
    grid = _floats(args.l_grid, "--l-grid") if args.l_grid else DEFAULT_L_GRID
    try:
        Mx = build_matrix(w, grid, args.P)
    except (SequenceError, ValueError) as e:
        raise InputError(str(e)) from None
    out = Mx.to_dict()
    out.pop("schema")
    if w.sequence is not None:
        out["identities"] = [{"label": k, **v.to_dict()} for k, v in verify_identities(Mx, cfg)]
    _emit(out, args, "weightseq.matrix/1")
    return EXIT_OK


def cmd_verify(args) -> int:
    cfg = _config(args)
    subject = _load_subject(args.subject, args)
    ids = list(THEOREM_IDS) if args.theorem == "all" else [t.strip() for t in args.theorem.split(",")]
    bad = [t for t in ids if t not in THEOREM_IDS]
    if bad:
        raise InputError(f"unknown theorem(s) {', '.join(bad)}; known: {', '.join(THEOREM_IDS)}")
    s = Subject(subject, cfg)
    reports = [verify_theorem(t, s, cfg).to_dict() for t in ids]
    violated = sum(r["consistency"] == VIOLATED for r in reports)
    _emit({"subject": s.label, "reports": reports, "violated": violated}, args, "weightseq.theorem_reports/1")
    return EXIT_VIOLATION if violated else EXIT_OK


def cmd_corpus(args) -> int:
    cfg = _config(args)
    ids = list(THEOREM_IDS) if args.theorems == "all" else [t.strip() for t in args.theorems.split(",")]
    bad = [t for t in ids if t not in THEOREM_IDS]
    if bad:
        raise InputError(f"unknown theorem(s) {', '.join(bad)}; known: {', '.join(THEOREM_IDS)}")
    if args.n < 1:
        raise InputError("--n must be >= 1")
    corpus = random_lc_corpus(args.n, args.profile, cfg)
    summary = sweep(corpus, ids, cfg)
    summary.pop("schema")
    summary["profile"] = args.profile
    _emit(summary, args, "weightseq.sweep/1")
    if args.report_dir:
        d = Path(args.report_dir)
        d.mkdir(parents=True, exist_ok=True)
        for M in corpus:
            s = Subject(M, cfg)
            reports = [verify_theorem(t, s, cfg).to_dict() for t in ids]
            (d / f"{M.label.replace('#', '_')}.json").write_text(
                json.dumps({"schema": "weightseq.theorem_reports/1", "subject": M.label, "reports": _jsonable(reports)},
                           indent=2, sort_keys=True) + "\n")
    print(f"{args.profile} x {len(corpus)}: violated={summary['violated']} totals={summary['total']}", file=sys.stderr)
    return EXIT_VIOLATION if summary["violated"] else EXIT_OK


# ---------------------------------------------------------------- parser


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="weightseq", description="Weight sequences, weight functions and growth-condition audits.")
    ap.add_argument("--version", action="version", version=f"weightseq {__version__}")
    sub = ap.add_subparsers(dest="command", required=True)

    def common(p, config=True):
        p.add_argument("--out", help="write to this file instead of stdout")
        if config:
            p.add_argument("--config", help="JSON file with TruncationConfig fields")
        return p

    p = common(sub.add_parser("seq", help="build a sequence and export it"), config=False)
    p.add_argument("spec", nargs="?", help="sequence spec JSON")
    p.add_argument("--family", choices=["gevrey", "q_gevrey", "beta3_counterexample"])
    p.add_argument("--s", type=float)
    p.add_argument("--q", type=float)
    p.add_argument("--J", type=int)
    p.add_argument("--P", type=int, default=200)
    p.set_defaults(func=cmd_seq)

    p = common(sub.add_parser("check", help="evaluate growth conditions"))
    p.add_argument("subject", help="sequence spec/export or weight-function spec JSON")
    p.add_argument("--conditions", default="all", help="comma-separated ids or 'all'")
    p.set_defaults(func=cmd_check)

    p = common(sub.add_parser("omega", help="associated function omega_M as CSV"), config=False)
    p.add_argument("subject")
    g = p.add_mutually_exclusive_group()
    g.add_argument("--t", help="comma-separated t values")
    g.add_argument("--t-grid", help="lo:hi:n geometric grid")
    p.set_defaults(func=cmd_omega)

    p = common(sub.add_parser("conjugate", help="Young conjugate phi*(x) as CSV"), config=False)
    p.add_argument("subject", nargs="?", help="weight-function or sequence spec JSON")
    p.add_argument("--family", choices=list(FAMILIES))
    p.add_argument("--param", type=float)
    g = p.add_mutually_exclusive_group(required=True)
    g.add_argument("--x", help="comma-separated x values")
    g.add_argument("--x-grid", help="lo:hi:n geometric grid")
    p.set_defaults(func=cmd_conjugate)

    p = common(sub.add_parser("matrix", help="associated weight matrix and its identities"))
    p.add_argument("subject")
    p.add_argument("--l-grid", help="comma-separated l values")
    p.add_argument("--P", type=int, default=200)
    p.set_defaults(func=cmd_matrix)

    p = common(sub.add_parser("verify", help="verify theorems on one subject"))
    p.add_argument("subject")
    p.add_argument("--theorem", default="all", help="theorem id(s) or 'all'")
    p.set_defaults(func=cmd_verify)

    p = common(sub.add_parser("corpus", help="sweep theorems over a random corpus"))
    p.add_argument("--n", type=int, default=50)
    p.add_argument("--profile", choices=list(PROFILES), default="generic")
    p.add_argument("--theorems", default="chain")
    p.add_argument("--seed", type=int)
    p.add_argument("--report-dir", help="also write one report file per subject here")
    p.set_defaults(func=cmd_corpus)
    return ap


def main(argv=None) -> int:
    ap = build_parser()
    try:
        args = ap.parse_args(argv)
    except SystemExit as e:  # argparse exits 2 on usage errors, 0 on --help
        return int(e.code or 0)
    args.manifest = RunManifest(args.command, {}, {}, _versions())
    try:
        return args.func(args)
    except InputError as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
