"""Selection strategies: score each frontier member, then pick the best one.

Every strategy reports a score per evaluated solution. ED, PDU and C-PDU are
minimized; WM, HV, U-KP win counts and A-KP reflex angles are maximized. Ties
go to the lowest id and the whole tie set is reported.
"""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from typing import Mapping, Optional, Sequence, Union

import numpy as np

from .core import (
    CandidateSet,
    DomainError,
    InputError,
    ObjectiveSpec,
    SamplePopulation,
    SelectionResult,
    SolutionPoint,
    Strategy,
    UnsupportedStrategyError,
    UtopiaAssignment,
    check_populations,
    min_max_normalize,
    orient,
)
from .dominance import Frontier, pareto_frontier

# Score of a population that sits exactly on its utopia points.
PERFECT_PDU = -math.inf

DEFAULT_SEED = 42
DEFAULT_WEIGHT_SAMPLES = 1000
TIE_RTOL = 1e-12

Vector = Union[SolutionPoint, Sequence[float], np.ndarray]


class Distance(enum.Enum):
    EUCLIDEAN = "euclidean"
    MANHATTAN = "manhattan"
    CHEBYSHEV = "chebyshev"

    @classmethod
    def parse(cls, text: str) -> "Distance":
        try:
            return cls(text.strip().lower())
        except ValueError:
            raise InputError(f"unknown distance {text!r}") from None


@dataclass(frozen=True)
class StrategyParams:
    utopia: Optional[UtopiaAssignment] = None
    reference: Optional[tuple[float, ...]] = None
    weights: Optional[tuple[float, ...]] = None
    m_weight_samples: int = DEFAULT_WEIGHT_SAMPLES
    seed: int = DEFAULT_SEED
    distance_kind: Distance = Distance.EUCLIDEAN
    normalize_first: bool = False
    # fit the min-max transform on frontier members instead of all candidates
    fit_on_frontier: bool = False
    # utopia/reference are already expressed in normalized units
    targets_normalized: bool = False

    def __post_init__(self):
        if self.m_weight_samples < 1:
            raise InputError("m_weight_samples must be a positive integer")
        if not 0 <= int(self.seed) < 2**64:
            raise InputError("seed must be an unsigned 64-bit integer")
        for attr in ("reference", "weights"):
            val = getattr(self, attr)
            if val is not None:
                val = tuple(float(v) for v in val)
                if not all(math.isfinite(v) for v in val):
                    raise InputError(f"{attr} must be finite")
                object.__setattr__(self, attr, val)
        if isinstance(self.distance_kind, str):
            object.__setattr__(self, "distance_kind", Distance.parse(self.distance_kind))


def _vec(x: Vector) -> np.ndarray:
    if isinstance(x, SolutionPoint):
        x = x.values
    return np.asarray(x, dtype=float)


def _check_len(a: np.ndarray, b: np.ndarray, what: str) -> None:
    if a.shape != b.shape:
        raise InputError(f"{what} has {b.size} components, expected {a.size}")


# -- per-solution scores -----------------------------------------------------

def score_ed(solution: Vector, utopia: Sequence[float]) -> float:
    """Euclidean distance to the utopia point (lower is better)."""
    x, u = _vec(solution), np.asarray(utopia, dtype=float)
    _check_len(x, u, "utopia")
    return float(math.sqrt(math.fsum((x - u) ** 2)))


def score_wm(solution: Vector, weights: Sequence[float],
             specs: Sequence[ObjectiveSpec]) -> float:
    """Weighted mean with maximized objectives counted positively (higher is better)."""
    x, w = _vec(solution), np.asarray(weights, dtype=float)
    _check_len(x, w, "weights")
    gain = -orient(x, specs)
    return float(math.fsum(w * gain) / len(x))


def score_hv(solution: Vector, reference: Sequence[float],
             specs: Sequence[ObjectiveSpec]) -> float:
    """Volume of the box between the solution and the reference point.

    Both arguments are in native orientation. Returns 0.0 when the solution
    fails to strictly beat the reference on some objective.
    """
    x, r = _vec(solution), np.asarray(reference, dtype=float)
    _check_len(x, r, "reference")
    gaps = np.maximum(0.0, orient(r, specs) - orient(x, specs))
    return float(np.prod(gaps))


def squared_errors(points: np.ndarray, targets: np.ndarray,
                   kind: Distance = Distance.EUCLIDEAN) -> np.ndarray:
    diff = np.abs(points - targets)
    if kind is Distance.EUCLIDEAN:
        return np.sum(diff ** 2, axis=1)
    if kind is Distance.MANHATTAN:
        return np.sum(diff, axis=1) ** 2
    if kind is Distance.CHEBYSHEV:
        return np.max(diff, axis=1) ** 2
    raise InputError(f"unknown distance {kind!r}")


def score_pdu(population: SamplePopulation, utopia: UtopiaAssignment,
              distance_kind: Distance | str = Distance.EUCLIDEAN) -> float:
    """Log of the summed squared sample-to-utopia errors (lower is better).

    A global utopia gives plain PDU; a per-sample table gives the calibrated
    variant. Samples are summed in sample-id order, so shuffling a population
    cannot change the score. A zero total returns ``PERFECT_PDU``.
    """
    if isinstance(distance_kind, str):
        distance_kind = Distance.parse(distance_kind)
    if population.m == 0:
        raise InputError(f"population of {population.solution_id!r} is empty")
    pop = population.sorted()
    targets = utopia.resolve(pop.sample_ids)
    if targets.shape[1] != pop.values.shape[1]:
        raise InputError(f"utopia has {targets.shape[1]} components, "
                         f"expected {pop.values.shape[1]}")
    total = math.fsum(squared_errors(pop.values, targets, distance_kind))
    if total == 0.0:
        return PERFECT_PDU
    return math.log(total)


# -- knee points ---------------------------------------------------------------

def reflex_angles(points: np.ndarray) -> np.ndarray:
    """Reflex angle in degrees at every point of a 2-D oriented frontier.

    Points are ordered by the first objective. The angle at B is swept
    counter-clockwise from ray BA (left neighbour) to ray BC (right
    neighbour), i.e. through the side facing the utopia region. Missing
    neighbours are replaced by a unit vertical ray (left end) or a unit
    horizontal ray (right end). Identical points share one angle.
    """
    pts = np.asarray(points, dtype=float)
    uniq, inverse = np.unique(pts, axis=0, return_inverse=True)
    inverse = np.asarray(inverse).reshape(-1)
    n = len(uniq)
    angles = np.empty(n)
    for i in range(n):
        left = uniq[i - 1] - uniq[i] if i > 0 else np.array([0.0, 1.0])
        right = uniq[i + 1] - uniq[i] if i < n - 1 else np.array([1.0, 0.0])
        sweep = math.atan2(right[1], right[0]) - math.atan2(left[1], left[0])
        angles[i] = math.degrees(sweep % (2 * math.pi))
    return angles[inverse]


def sample_weight_vectors(k: int, m: int, seed: int) -> np.ndarray:
    """``m`` weight vectors drawn uniformly from the (k-1)-simplex.

    Normalized i.i.d. exponential draws from a PCG64 generator; a given seed
    always yields the same array.
    """
    if k < 2:
        raise InputError("weight sampling needs at least two objectives")
    if m < 1:
        raise InputError("number of weight vectors must be positive")
    rng = np.random.Generator(np.random.PCG64(seed))
    draws = rng.standard_exponential((m, k))
    return draws / draws.sum(axis=1, keepdims=True)


def ukp_wins(oriented: np.ndarray, m: int, seed: int,
             names: Optional[Sequence[str]] = None) -> np.ndarray:
    """Win counts per row: the row with the lowest weighted sum wins each draw.

    Rows must already be in ascending id order; a per-draw tie goes to the
    earliest row. Weight columns are matched to objectives in ``names``
    order, so reordering the objective columns cannot change the result.
    """
    pts = np.asarray(oriented, dtype=float)
    k = pts.shape[1]
    if k < 2:
        weights = np.ones((m, 1))
    else:
        weights = sample_weight_vectors(k, m, seed)
    if names is not None:
        pts = pts[:, sorted(range(k), key=lambda j: names[j])]
    utility = weights @ pts.T
    winners = np.argmin(utility, axis=1)
    return np.bincount(winners, minlength=len(pts))


def _pick(scores: Mapping[str, float], maximize: bool) -> tuple[str, tuple[str, ...]]:
    ids = sorted(scores)
    vals = np.array([scores[i] for i in ids], dtype=float)
    best = vals.max() if maximize else vals.min()
    if math.isinf(best):
        tied = vals == best
    else:
        tied = np.abs(vals - best) <= TIE_RTOL * max(1.0, abs(best))
    tie_ids = tuple(i for i, t in zip(ids, tied) if t)
    return tie_ids[0], tie_ids


def select_akp(frontier: Frontier, oriented: Optional[np.ndarray] = None,
               echo: Optional[dict] = None) -> SelectionResult:
    """Angle-based knee point on a two-objective frontier."""
    if frontier.parent.k != 2:
        raise UnsupportedStrategyError(
            f"A-KP needs exactly two objectives, got {frontier.parent.k}")
    if oriented is None:
        oriented = frontier.members().oriented()
    angles = reflex_angles(oriented)
    scores = dict(zip(frontier.member_ids, (float(a) for a in angles)))
    chosen, ties = _pick(scores, maximize=True)
    return SelectionResult(Strategy.AKP, chosen, scores, dict(echo or {}), ties)


def select_ukp(frontier: Frontier, m_weight_samples: int = DEFAULT_WEIGHT_SAMPLES,
               seed: int = DEFAULT_SEED, oriented: Optional[np.ndarray] = None,
               echo: Optional[dict] = None) -> SelectionResult:
    """Utility-based knee point: most frequent argmin over random weightings."""
    if oriented is None:
        oriented = frontier.members().oriented()
    wins = ukp_wins(oriented, m_weight_samples, seed, frontier.parent.names)
    scores = {sid: int(w) for sid, w in zip(frontier.member_ids, wins)}
    chosen, ties = _pick(scores, maximize=True)
    params = dict(echo or {})
    params.update(seed=seed, m_weight_samples=m_weight_samples)
    return SelectionResult(Strategy.UKP, chosen, scores, params, ties)


# -- dispatch ----------------------------------------------------------------

def _require(value, name: str, strategy: Strategy):
    if value is None:
        raise InputError(f"strategy {strategy.value} requires parameter '{name}'")
    return value


def _echo(strategy: Strategy, params: StrategyParams, scope: str, transform) -> dict:
    utopia = params.utopia
    if utopia is None:
        utopia_echo = None
    elif utopia.is_global:
        utopia_echo = list(utopia.global_point)
    else:
        utopia_echo = f"per-sample ({len(utopia.per_sample)} rows)"
    echo = {
        "strategy": strategy.value,
        "utopia": utopia_echo,
        "reference": list(params.reference) if params.reference else None,
        "weights": list(params.weights) if params.weights else None,
        "seed": params.seed,
        "m_weight_samples": params.m_weight_samples,
        "distance_kind": params.distance_kind.value,
        "normalize_first": params.normalize_first,
        "scope": scope,
    }
    if transform is not None:
        echo["normalization"] = transform.as_dict()
    return echo


def select(strategy: Strategy | str, cset: CandidateSet,
           populations: Optional[Mapping[str, SamplePopulation]] = None,
           params: Optional[StrategyParams] = None,
           scope: str = "frontier",
           frontier: Optional[Frontier] = None) -> SelectionResult:
    """Extract the frontier and choose one solution with ``strategy``.

    ``scope="all"`` also scores dominated candidates (diagnostics only); A-KP
    always works on the frontier since it needs frontier neighbours.
    """
    if isinstance(strategy, str):
        strategy = Strategy.parse(strategy)
    params = params or StrategyParams()
    if scope not in ("frontier", "all"):
        raise InputError(f"unknown scope {scope!r}")

    k = cset.k
    if strategy is Strategy.AKP and k != 2:
        raise UnsupportedStrategyError(f"A-KP needs exactly two objectives, got {k}")
    if strategy is Strategy.ED:
        _require(params.utopia, "utopia", strategy)
        if not params.utopia.is_global:
            raise InputError("strategy ed requires a global utopia point")
    if strategy in (Strategy.PDU, Strategy.CPDU):
        _require(populations, "populations", strategy)
        _require(params.utopia, "utopia", strategy)
    if strategy is Strategy.HV:
        _require(params.reference, "reference", strategy)
    if strategy is Strategy.WM:
        _require(params.weights, "weights", strategy)
    for vec, name in ((params.reference, "reference"), (params.weights, "weights")):
        if vec is not None and len(vec) != k:
            raise InputError(f"{name} has {len(vec)} components, expected {k}")
    if params.utopia is not None and params.utopia.k != k:
        raise InputError(f"utopia has {params.utopia.k} components, expected {k}")

    if frontier is None:
        frontier = pareto_frontier(cset)
    if len(frontier) == 0:
        raise DomainError("Pareto frontier is empty")

    work, pops = cset, populations
    utopia, reference = params.utopia, params.reference
    transform = None
    if params.normalize_first:
        fit_ids = frontier.member_ids if params.fit_on_frontier else None
        work, transform = min_max_normalize(cset, fit_ids)
        if pops is not None:
            pops = {sid: SamplePopulation(p.solution_id, p.sample_ids, transform.apply(p.values))
                    for sid, p in pops.items()}
        if not params.targets_normalized:
            if utopia is not None:
                utopia = utopia.map(transform.apply)
            if reference is not None:
                reference = tuple(transform.apply(reference))

    echo = _echo(strategy, params, scope, transform)
    eval_ids = list(frontier.member_ids) if scope == "frontier" else sorted(cset.ids)
    lookup = {s.id: s for s in work.solutions}
    rows = np.array([lookup[i].values for i in eval_ids], dtype=float)
    specs = work.specs

    if strategy is Strategy.AKP:
        sub = np.array([lookup[i].values for i in frontier.member_ids], dtype=float)
        return select_akp(frontier, orient(sub, specs), echo)
    if strategy is Strategy.UKP:
        eval_frontier = Frontier(tuple(eval_ids), cset)
        return select_ukp(eval_frontier, params.m_weight_samples, params.seed,
                          orient(rows, specs), echo)

    if strategy is Strategy.ED:
        scores = {i: score_ed(r, utopia.global_point) for i, r in zip(eval_ids, rows)}
    elif strategy is Strategy.WM:
        scores = {i: score_wm(r, params.weights, specs) for i, r in zip(eval_ids, rows)}
    elif strategy is Strategy.HV:
        scores = {i: score_hv(r, reference, specs) for i, r in zip(eval_ids, rows)}
    else:
        check_populations(pops, k)
        missing = [i for i in eval_ids if i not in pops]
        if missing:
            raise InputError(f"no sample population for solution {missing[0]!r}")
        scores = {i: score_pdu(pops[i], utopia, params.distance_kind) for i in eval_ids}

    chosen, ties = _pick(scores, strategy.maximize)
    return SelectionResult(strategy, chosen, scores, echo, ties)
