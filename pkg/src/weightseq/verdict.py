"""Three-valued condition verdicts."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Any

HOLDS = "holds"
FAILS = "fails"
INCONCLUSIVE = "inconclusive"
STATUSES = (HOLDS, FAILS, INCONCLUSIVE)


def _jsonable(x: Any) -> Any:
    if isinstance(x, dict):
        return {str(k): _jsonable(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [_jsonable(v) for v in x]
    if hasattr(x, "item") and callable(x.item):  # numpy scalars
        x = x.item()
    if isinstance(x, float):
        if math.isnan(x):
            return "nan"
        if math.isinf(x):
            return "inf" if x > 0 else "-inf"
    return x


@dataclass(frozen=True)
class ConditionVerdict:
    condition_id: str
    status: str
    witnesses: dict = field(default_factory=dict)
    margin: float = math.nan
    window: tuple = (0, 0)
    notes: str = ""

    def __post_init__(self):
        if self.status not in STATUSES:
            raise ValueError(f"unknown status {self.status!r}")

    @property
    def holds(self) -> bool:
        return self.status == HOLDS

    @property
    def fails(self) -> bool:
        return self.status == FAILS

    @property
    def conclusive(self) -> bool:
        return self.status != INCONCLUSIVE

    def to_dict(self) -> dict:
        return {
            "condition_id": self.condition_id,
            "status": self.status,
            "witnesses": _jsonable(self.witnesses),
            "margin": _jsonable(float(self.margin)),
            "window": _jsonable(list(self.window)),
            "notes": self.notes,
        }


def combine_any(condition_id: str, parts: list[tuple[Any, ConditionVerdict]], key: str, window, notes=""):
    """Existential combination over a searched parameter.

    holds if some part holds (first one wins), fails if all fail, inconclusive otherwise.
    """
    for value, v in parts:
        if v.holds:
            w = dict(v.witnesses)
            w[key] = value
            return ConditionVerdict(condition_id, HOLDS, w, v.margin, window, (v.notes + " " + notes).strip())
    if parts and all(v.fails for _, v in parts):
        last_value, last = parts[-1]
        w = dict(last.witnesses)
        w[key] = last_value
        w["searched"] = [value for value, _ in parts]
        msg = f"fails-within-bounds: no {key} up to {last_value} satisfies the condition"
        return ConditionVerdict(condition_id, FAILS, w, last.margin, window, (msg + " " + notes).strip())
    best = [value for value, v in parts if v.status == INCONCLUSIVE]
    w = {"searched": [value for value, _ in parts], "inconclusive_at": best}
    return ConditionVerdict(condition_id, INCONCLUSIVE, w, math.nan, window, notes)
