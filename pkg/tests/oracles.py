"""Reference computations used to freeze or cross-check expected values.

Each one takes a different route from the package code it checks: plain
Python loops, the statistics module, acos/cross-product geometry or
Monte-Carlo integration.
"""
import math
import random
import statistics
from collections import defaultdict

import numpy as np

from paretoselect import dominates


def frontier_ids(ids, oriented_rows):
    """All-pairs O(n^2) frontier using the scalar ``dominates`` predicate."""
    keep = []
    for i, a in zip(ids, oriented_rows):
        if not any(dominates(b, a) for j, b in zip(ids, oriented_rows) if j != i):
            keep.append(i)
    return sorted(keep)


def reflex_angle_oracle(points):
    """Reflex angle (degrees) per point of a 2-D frontier via acos + cross sign.

    Neighbours are taken along ascending first coordinate; the left end uses
    an upward ray and the right end a rightward ray.
    """
    order = sorted(range(len(points)), key=lambda i: (points[i][0], points[i][1]))
    out = [0.0] * len(points)
    for pos, idx in enumerate(order):
        bx, by = points[idx]
        if pos > 0:
            ax, ay = points[order[pos - 1]]
            u = (ax - bx, ay - by)
        else:
            u = (0.0, 1.0)
        if pos < len(order) - 1:
            cx, cy = points[order[pos + 1]]
            v = (cx - bx, cy - by)
        else:
            v = (1.0, 0.0)
        nu, nv = math.hypot(*u), math.hypot(*v)
        cos_t = max(-1.0, min(1.0, (u[0] * v[0] + u[1] * v[1]) / (nu * nv)))
        theta = math.degrees(math.acos(cos_t))
        cross = u[0] * v[1] - u[1] * v[0]
        # counter-clockwise sweep from u to v
        out[idx] = theta if cross > 0 else (360.0 - theta if cross < 0 else 180.0)
    return out


def box_volume_mc(x, r, n, seed):
    """Monte-Carlo measure of {y : x <= y <= r} inside an enclosing box.

    Returns (estimate, standard error).
    """
    rng = random.Random(seed)
    lo = [xi - 1.0 for xi in x]
    hi = list(r)
    box = math.prod(h - l for h, l in zip(hi, lo))
    hits = 0
    for _ in range(n):
        y = [rng.uniform(l, h) for l, h in zip(lo, hi)]
        if all(xi <= yi <= ri for xi, yi, ri in zip(x, y, r)):
            hits += 1
    p = hits / n
    return p * box, math.sqrt(p * (1 - p) / n) * box


def box_volume_mc_native(x, r, n, rng, pad=0.5):
    """Monte-Carlo measure of the axis box spanned by x and r in raw units.

    Works on unoriented coordinates: the box is [min(x,r), max(x,r)] per axis,
    sampled inside an enclosure padded by ``pad`` of each side length.
    Returns (estimate, standard error).
    """
    x, r = np.asarray(x, dtype=float), np.asarray(r, dtype=float)
    lo, hi = np.minimum(x, r), np.maximum(x, r)
    span = hi - lo
    elo, ehi = lo - pad * span, hi + pad * span
    box = float(np.prod(ehi - elo))
    y = rng.uniform(elo, ehi, size=(n, len(x)))
    p = float(np.mean(np.all((y >= lo) & (y <= hi), axis=1)))
    return p * box, math.sqrt(p * (1 - p) / n) * box


def calibration_oracle(records, T, alpha=1.0, beta=1.0):
    """Spreadsheet-style per-user APLT utopia, unclamped and clamped."""
    pop = defaultdict(int)
    for _, item in records:
        pop[item] += 1
    by_user = defaultdict(list)
    for user, item in records:
        by_user[user].append(pop[item])

    def agg(vals):
        return alpha * statistics.fmean(vals) + beta * statistics.pstdev(vals)

    ranked_low = sorted(pop, key=lambda i: (pop[i], i))[:T]
    ranked_high = sorted(pop, key=lambda i: (-pop[i], i))[:T]
    tail = agg([pop[i] for i in ranked_low])
    head = agg([pop[i] for i in ranked_high])
    raw = {u: (head - agg(g)) / (head - tail) for u, g in by_user.items()}
    clamped = {u: min(1.0, max(0.0, v)) for u, v in raw.items()}
    return raw, clamped, tail, head
