"""Pareto dominance, frontier extraction and empirical utopia/nadir points."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .core import CandidateSet, InputError, signs


@dataclass(frozen=True)
class Frontier:
    member_ids: tuple[str, ...]
    parent: CandidateSet

    def __len__(self):
        return len(self.member_ids)

    def __contains__(self, solution_id):
        return solution_id in self.member_ids

    def members(self) -> CandidateSet:
        """Frontier members as a candidate set, in ascending id order."""
        lookup = {s.id: s for s in self.parent.solutions}
        return CandidateSet(self.parent.specs, tuple(lookup[i] for i in self.member_ids))


def dominates(a, b) -> bool:
    """True if oriented vector ``a`` Pareto-dominates ``b`` (minimization)."""
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    if a.shape != b.shape:
        raise InputError(f"cannot compare vectors of shape {a.shape} and {b.shape}")
    return bool(np.all(a <= b) and np.any(a < b))


def non_dominated_mask(points: np.ndarray) -> np.ndarray:
    """Boolean mask of rows not dominated by any other row (minimization)."""
    pts = np.asarray(points, dtype=float)
    n = pts.shape[0]
    mask = np.ones(n, dtype=bool)
    for i in range(n):
        le = np.all(pts <= pts[i], axis=1)
        lt = np.any(pts < pts[i], axis=1)
        if np.any(le & lt):
            mask[i] = False
    return mask


def non_dominated_mask_2d(points: np.ndarray) -> np.ndarray:
    """Sort-and-sweep variant of :func:`non_dominated_mask` for two objectives."""
    pts = np.asarray(points, dtype=float)
    if pts.shape[1] != 2:
        raise InputError("sweep frontier requires exactly two objectives")
    order = np.lexsort((pts[:, 1], pts[:, 0]))
    mask = np.zeros(len(pts), dtype=bool)
    best_y = np.inf
    prev = None
    for idx in order:
        x, y = pts[idx]
        if prev is not None and x == prev[0] and y == prev[1]:
            # exact duplicate of a kept point survives with it
            mask[idx] = mask[prev[2]]
            continue
        if y < best_y:
            mask[idx] = True
            best_y = y
        prev = (x, y, idx)
    return mask


def pareto_frontier(cset: CandidateSet, method: str = "naive") -> Frontier:
    pts = cset.oriented()
    if method == "sweep":
        mask = non_dominated_mask_2d(pts)
    elif method == "naive":
        mask = non_dominated_mask(pts)
    else:
        raise InputError(f"unknown frontier method {method!r}")
    ids = sorted(sid for sid, keep in zip(cset.ids, mask) if keep)
    return Frontier(tuple(ids), cset)


def _scope(cset: CandidateSet, frontier_only: bool) -> CandidateSet:
    return pareto_frontier(cset).members() if frontier_only else cset


def empirical_utopia(cset: CandidateSet, frontier_only: bool = False) -> np.ndarray:
    """Componentwise best observed value, in native orientation.

    Stands in for the true utopia point, which would require the whole
    feasible set.
    """
    s = signs(cset.specs)
    return _scope(cset, frontier_only).oriented().min(axis=0) * s


def empirical_nadir(cset: CandidateSet, frontier_only: bool = False) -> np.ndarray:
    """Componentwise worst observed value, in native orientation."""
    s = signs(cset.specs)
    return _scope(cset, frontier_only).oriented().max(axis=0) * s

