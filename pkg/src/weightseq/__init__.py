"""Weight sequences, associated weight functions and weight matrices, with growth-condition audits."""

__version__ = "0.1.0"

from .associated import DomainError, omega_M, omega_M_bruteforce, recover_M
from .matrix import WeightMatrix, build_matrix, verify_identities
from .sequence import (
    SequenceError,
    TruncationConfig,
    WeightSequence,
    counterexample_beta3,
    equivalent,
    from_log_quotients,
    gevrey,
    preceq,
    q_gevrey,
    sequence_from_spec,
)
from .theorems import THEOREM_IDS, Subject, TheoremReport, random_lc_corpus, sweep, verify_theorem
from .verdict import FAILS, HOLDS, INCONCLUSIVE, ConditionVerdict
from .weightfn import WeightFunction, function_from_spec, gamma_index, make_closed_form, phi_star

__all__ = [
    "ConditionVerdict", "DomainError", "FAILS", "HOLDS", "INCONCLUSIVE", "SequenceError", "THEOREM_IDS",
    "Subject", "TheoremReport", "TruncationConfig", "WeightFunction", "WeightMatrix", "WeightSequence",
    "build_matrix", "counterexample_beta3", "equivalent", "from_log_quotients", "function_from_spec",
    "gamma_index", "gevrey", "make_closed_form", "omega_M", "omega_M_bruteforce", "phi_star", "preceq",
    "q_gevrey", "random_lc_corpus", "recover_M", "sequence_from_spec", "sweep", "verify_identities",
    "verify_theorem",
]
