"""Per-user APLT utopia values derived from item popularity.

Each user gets a target long-tail share in [0, 1]: users whose history leans
on niche items get targets near 1, mainstream users near 0.
"""
from __future__ import annotations

import math
from collections import Counter
from dataclasses import dataclass, field
from typing import Mapping, Optional, Sequence

import numpy as np

from .core import DomainError, InputError


@dataclass(frozen=True)
class InteractionLog:
    records: tuple[tuple[str, str], ...]

    def __post_init__(self):
        recs = tuple((str(u), str(i)) for u, i in self.records)
        if not recs:
            raise InputError("interaction log is empty")
        object.__setattr__(self, "records", recs)

    @property
    def users(self) -> list[str]:
        return sorted({u for u, _ in self.records})

    def profiles(self) -> dict[str, list[str]]:
        out: dict[str, list[str]] = {}
        for user, item in self.records:
            out.setdefault(user, []).append(item)
        return out


@dataclass(frozen=True)
class CalibrationParams:
    alpha: float = 1.0
    beta: float = 1.0
    T_override: Optional[int] = None
    accuracy_utopia: float = 1.0
    # "musigma" aggregates anchor sets like user profiles; "mean" uses the plain mean
    anchor_agg: str = "musigma"

    def __post_init__(self):
        if self.T_override is not None and self.T_override < 1:
            raise InputError("T must be a positive integer")
        if self.anchor_agg not in ("musigma", "mean"):
            raise InputError(f"unknown anchor aggregation {self.anchor_agg!r}")
        for name in ("alpha", "beta", "accuracy_utopia"):
            if not math.isfinite(getattr(self, name)):
                raise InputError(f"{name} must be finite")


@dataclass(frozen=True)
class UtopiaTable:
    rows: dict[str, tuple[float, float]]
    T: int = 0
    pop_tail: float = math.nan
    pop_head: float = math.nan
    clamp_count: int = 0
    stats: dict = field(default_factory=dict)

    @property
    def mean_aplt_utopia(self) -> float:
        return float(np.mean([r[1] for r in self.rows.values()]))


def mu_sigma(values: Sequence[float], alpha: float = 1.0, beta: float = 1.0) -> float:
    """alpha * mean + beta * population standard deviation."""
    arr = np.asarray(values, dtype=float)
    if arr.size == 0:
        raise InputError("cannot aggregate an empty set")
    return float(alpha * arr.mean() + beta * arr.std(ddof=0))


def item_popularity(log: InteractionLog) -> dict[str, int]:
    """Number of transactions each item appears in."""
    return dict(sorted(Counter(item for _, item in log.records).items()))


def user_popularity(log: InteractionLog, pops: Mapping[str, int],
                    alpha: float = 1.0, beta: float = 1.0) -> dict[str, float]:
    out = {}
    for user, items in sorted(log.profiles().items()):
        try:
            gamma = [pops[i] for i in items]
        except KeyError as exc:
            raise InputError(f"item {exc.args[0]!r} of user {user!r} has no popularity") from None
        out[user] = mu_sigma(gamma, alpha, beta)
    return out


def tail_head_anchors(pops: Mapping[str, int], T: int, alpha: float = 1.0,
                      beta: float = 1.0, agg: str = "musigma") -> tuple[float, float]:
    """Popularity of the T least consumed items and of the T most consumed items.

    Items tied on popularity are taken in ascending item-id order.
    """
    if T < 1 or T > len(pops):
        raise InputError(f"T={T} must lie in [1, {len(pops)}] (number of distinct items)")
    tail = sorted(pops.items(), key=lambda kv: (kv[1], kv[0]))[:T]
    head = sorted(pops.items(), key=lambda kv: (-kv[1], kv[0]))[:T]
    if agg == "mean":
        pop_tail = float(np.mean([v for _, v in tail]))
        pop_head = float(np.mean([v for _, v in head]))
    else:
        pop_tail = mu_sigma([v for _, v in tail], alpha, beta)
        pop_head = mu_sigma([v for _, v in head], alpha, beta)
    if not pop_head > pop_tail:
        raise DomainError(
            f"degenerate calibration: head anchor {pop_head:g} does not exceed "
            f"tail anchor {pop_tail:g}")
    return pop_tail, pop_head


def aplt_utopia_raw(pop_u: float, pop_tail: float, pop_head: float) -> float:
    if not pop_head > pop_tail:
        raise InputError("head anchor must exceed tail anchor")
    return (pop_head - pop_u) / (pop_head - pop_tail)


def aplt_utopia(pop_u: float, pop_tail: float, pop_head: float) -> float:
    """Long-tail target in [0, 1]; 1 at the tail anchor, 0 at the head anchor."""
    return min(1.0, max(0.0, aplt_utopia_raw(pop_u, pop_tail, pop_head)))


def default_T(log: InteractionLog) -> int:
    """Mean number of interactions per user, rounded half up."""
    per_user = len(log.records) / len(log.users)
    return max(1, int(math.floor(per_user + 0.5)))


def calibrate(log: InteractionLog, params: Optional[CalibrationParams] = None) -> UtopiaTable:
    params = params or CalibrationParams()
    pops = item_popularity(log)
    if params.T_override is not None:
        T = params.T_override
    else:
        T = min(default_T(log), len(pops))
    pop_tail, pop_head = tail_head_anchors(pops, T, params.alpha, params.beta, params.anchor_agg)
    rows = {}
    clamps = 0
    for user, pop_u in user_popularity(log, pops, params.alpha, params.beta).items():
        raw = aplt_utopia_raw(pop_u, pop_tail, pop_head)
        value = min(1.0, max(0.0, raw))
        clamps += value != raw
        rows[user] = (params.accuracy_utopia, value)
    f2 = [r[1] for r in rows.values()]
    stats = {"users": len(rows), "items": len(pops), "T": T,
             "pop_tail": pop_tail, "pop_head": pop_head,
             "mean_aplt_utopia": float(np.mean(f2)), "clamp_count": clamps}
    return UtopiaTable(rows, T, pop_tail, pop_head, clamps, stats)

