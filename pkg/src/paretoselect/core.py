"""Domain types, objective orientation and min-max normalization."""
from __future__ import annotations

import enum
import math
import warnings
from dataclasses import dataclass, field
from typing import Iterable, Mapping, Optional, Sequence

import numpy as np


class InputError(ValueError):
    """Malformed or inconsistent input (exit code 2 at the CLI)."""


class UnsupportedStrategyError(InputError):
    """Strategy cannot be applied to this problem shape."""


class DomainError(Exception):
    """Input is well-formed but the computation is infeasible (exit code 3)."""


class Direction(enum.Enum):
    MINIMIZE = "min"
    MAXIMIZE = "max"

    @classmethod
    def parse(cls, text: str) -> "Direction":
        key = text.strip().lower()
        aliases = {"min": cls.MINIMIZE, "minimize": cls.MINIMIZE,
                   "max": cls.MAXIMIZE, "maximize": cls.MAXIMIZE}
        if key not in aliases:
            raise InputError(f"invalid direction {text!r} (expected min or max)")
        return aliases[key]

    @property
    def sign(self) -> float:
        return 1.0 if self is Direction.MINIMIZE else -1.0


def _finite(x: float, what: str) -> float:
    x = float(x)
    if not math.isfinite(x):
        raise InputError(f"{what} must be finite, got {x!r}")
    return x


@dataclass(frozen=True)
class ObjectiveSpec:
    name: str
    direction: Direction
    weight: Optional[float] = None
    utopia_component: Optional[float] = None
    reference_component: Optional[float] = None

    def __post_init__(self):
        if not self.name:
            raise InputError("objective name must be non-empty")
        for attr in ("weight", "utopia_component", "reference_component"):
            val = getattr(self, attr)
            if val is not None:
                object.__setattr__(self, attr, _finite(val, f"{self.name}.{attr}"))


def check_specs(specs: Sequence[ObjectiveSpec]) -> tuple[ObjectiveSpec, ...]:
    specs = tuple(specs)
    if not specs:
        raise InputError("at least one objective is required")
    names = [s.name for s in specs]
    dupes = sorted({n for n in names if names.count(n) > 1})
    if dupes:
        raise InputError(f"duplicate objective names: {', '.join(dupes)}")
    return specs


def signs(specs: Sequence[ObjectiveSpec]) -> np.ndarray:
    """+1 for minimized objectives, -1 for maximized ones."""
    return np.array([s.direction.sign for s in specs])


@dataclass(frozen=True)
class SolutionPoint:
    id: str
    values: tuple[float, ...]

    def __post_init__(self):
        object.__setattr__(self, "id", str(self.id))
        vals = tuple(_finite(v, f"solution {self.id!r} value") for v in self.values)
        object.__setattr__(self, "values", vals)


@dataclass(frozen=True)
class CandidateSet:
    specs: tuple[ObjectiveSpec, ...]
    solutions: tuple[SolutionPoint, ...]

    def __post_init__(self):
        specs = check_specs(self.specs)
        sols = tuple(self.solutions)
        if not sols:
            raise InputError("candidate set is empty")
        k = len(specs)
        seen = set()
        for s in sols:
            if len(s.values) != k:
                raise InputError(
                    f"solution {s.id!r} has {len(s.values)} values, expected {k}")
            if s.id in seen:
                raise InputError(f"duplicate solution id {s.id!r}")
            seen.add(s.id)
        object.__setattr__(self, "specs", specs)
        object.__setattr__(self, "solutions", sols)

    @property
    def k(self) -> int:
        return len(self.specs)

    @property
    def ids(self) -> list[str]:
        return [s.id for s in self.solutions]

    @property
    def names(self) -> list[str]:
        return [s.name for s in self.specs]

    def matrix(self) -> np.ndarray:
        """Native-orientation values, one row per solution (input order)."""
        return np.array([s.values for s in self.solutions], dtype=float)

    def oriented(self) -> np.ndarray:
        return self.matrix() * signs(self.specs)

    def get(self, solution_id: str) -> SolutionPoint:
        for s in self.solutions:
            if s.id == solution_id:
                return s
        raise KeyError(solution_id)

    def subset(self, ids: Iterable[str]) -> "CandidateSet":
        wanted = set(ids)
        return CandidateSet(self.specs, tuple(s for s in self.solutions if s.id in wanted))


@dataclass(frozen=True, eq=False)
class SamplePopulation:
    """Per-sample objective vectors behind one aggregate solution."""

    solution_id: str
    sample_ids: tuple[str, ...]
    values: np.ndarray  # shape (m, k)

    def __post_init__(self):
        vals = np.array(self.values, dtype=float)
        ids = tuple(str(s) for s in self.sample_ids)
        if vals.ndim != 2 or vals.shape[0] == 0:
            raise InputError(f"population of {self.solution_id!r} is empty")
        if vals.shape[0] != len(ids):
            raise InputError(f"population of {self.solution_id!r}: sample id count mismatch")
        if len(set(ids)) != len(ids):
            raise InputError(f"population of {self.solution_id!r} repeats a sample id")
        if not np.all(np.isfinite(vals)):
            raise InputError(f"population of {self.solution_id!r} has non-finite values")
        vals.setflags(write=False)
        object.__setattr__(self, "sample_ids", ids)
        object.__setattr__(self, "values", vals)

    @property
    def m(self) -> int:
        return len(self.sample_ids)

    def __eq__(self, other):
        if not isinstance(other, SamplePopulation):
            return NotImplemented
        return (self.solution_id == other.solution_id
                and self.sample_ids == other.sample_ids
                and np.array_equal(self.values, other.values))

    def sorted(self) -> "SamplePopulation":
        order = sorted(range(self.m), key=self.sample_ids.__getitem__)
        return SamplePopulation(self.solution_id,
                                tuple(self.sample_ids[i] for i in order),
                                self.values[order])


def check_populations(populations: Mapping[str, SamplePopulation], k: int) -> None:
    """All populations must share one sample-id set and have k columns."""
    reference: Optional[set] = None
    ref_owner = ""
    for sid, pop in populations.items():
        if pop.values.shape[1] != k:
            raise InputError(f"population of {sid!r} has {pop.values.shape[1]} objectives, expected {k}")
        ids = set(pop.sample_ids)
        if reference is None:
            reference, ref_owner = ids, sid
        elif ids != reference:
            missing = sorted(reference - ids) or sorted(ids - reference)
            raise InputError(
                f"population of {sid!r} and {ref_owner!r} differ on sample {missing[0]!r}")


@dataclass(frozen=True)
class UtopiaAssignment:
    """One global utopia vector, or one generalized utopia vector per sample."""

    global_point: Optional[tuple[float, ...]] = None
    per_sample: Optional[Mapping[str, tuple[float, ...]]] = None

    def __post_init__(self):
        if (self.global_point is None) == (self.per_sample is None):
            raise InputError("utopia must be either global or per-sample")
        if self.global_point is not None:
            object.__setattr__(self, "global_point",
                               tuple(_finite(v, "utopia component") for v in self.global_point))
        else:
            rows = {str(k): tuple(_finite(v, f"utopia of {k!r}") for v in vec)
                    for k, vec in self.per_sample.items()}
            if not rows:
                raise InputError("per-sample utopia table is empty")
            if len({len(v) for v in rows.values()}) != 1:
                raise InputError("per-sample utopia vectors differ in length")
            object.__setattr__(self, "per_sample", rows)

    @classmethod
    def global_(cls, point: Sequence[float]) -> "UtopiaAssignment":
        return cls(global_point=tuple(point))

    @classmethod
    def from_table(cls, rows: Mapping[str, Sequence[float]]) -> "UtopiaAssignment":
        return cls(per_sample={k: tuple(v) for k, v in rows.items()})

    @property
    def is_global(self) -> bool:
        return self.global_point is not None

    @property
    def k(self) -> int:
        if self.global_point is not None:
            return len(self.global_point)
        return len(next(iter(self.per_sample.values())))

    def resolve(self, sample_ids: Sequence[str]) -> np.ndarray:
        """Utopia rows aligned with ``sample_ids``."""
        if self.global_point is not None:
            return np.tile(np.array(self.global_point, dtype=float), (len(sample_ids), 1))
        rows = []
        for s in sample_ids:
            if s not in self.per_sample:
                raise InputError(f"no utopia point for sample {s!r}")
            rows.append(self.per_sample[s])
        return np.array(rows, dtype=float)

    def map(self, fn) -> "UtopiaAssignment":
        """Apply ``fn`` (array -> array) to every utopia vector."""
        if self.global_point is not None:
            return UtopiaAssignment.global_(fn(np.array(self.global_point, dtype=float)))
        return UtopiaAssignment.from_table(
            {k: fn(np.array(v, dtype=float)) for k, v in self.per_sample.items()})


class Strategy(enum.Enum):
    AKP = "akp"
    UKP = "ukp"
    HV = "hv"
    ED = "ed"
    WM = "wm"
    PDU = "pdu"
    CPDU = "cpdu"

    @classmethod
    def parse(cls, text: str) -> "Strategy":
        try:
            return cls(text.strip().lower())
        except ValueError:
            names = ", ".join(s.value for s in cls)
            raise InputError(f"unknown strategy {text!r} (choose from {names})") from None

    @property
    def maximize(self) -> bool:
        return self in (Strategy.AKP, Strategy.UKP, Strategy.HV, Strategy.WM)


@dataclass(frozen=True)
class SelectionResult:
    strategy: Strategy
    chosen_id: str
    scores: dict[str, float]
    params_echo: dict = field(default_factory=dict)
    tie_ids: tuple[str, ...] = ()

    @property
    def best_score(self) -> float:
        return self.scores[self.chosen_id]


def orient(values: Sequence[float], specs: Sequence[ObjectiveSpec]) -> np.ndarray:
    """Rewrite values so every objective is minimized (maximized ones are negated)."""
    vals = np.asarray(values, dtype=float)
    if vals.shape[-1] != len(specs):
        raise InputError(f"vector has {vals.shape[-1]} components, expected {len(specs)}")
    return vals * signs(specs)


@dataclass(frozen=True, eq=False)
class NormalizationTransform:
    mins: np.ndarray
    maxs: np.ndarray
    constant: tuple[bool, ...]

    def apply(self, values) -> np.ndarray:
        vals = np.asarray(values, dtype=float)
        span = self.maxs - self.mins
        safe = np.where(span > 0, span, 1.0)
        out = (vals - self.mins) / safe
        return np.where(span > 0, out, 0.0)

    def as_dict(self) -> dict:
        return {"min": self.mins.tolist(), "max": self.maxs.tolist(),
                "constant": list(self.constant)}


def fit_min_max(matrix: np.ndarray, names: Sequence[str] = ()) -> NormalizationTransform:
    mat = np.asarray(matrix, dtype=float)
    mins, maxs = mat.min(axis=0), mat.max(axis=0)
    constant = tuple(bool(c) for c in (maxs == mins))
    for i, flag in enumerate(constant):
        if flag:
            label = names[i] if i < len(names) else str(i)
            warnings.warn(f"objective {label!r} is constant; normalized to 0.0", stacklevel=3)
    return NormalizationTransform(mins, maxs, constant)


def min_max_normalize(cset: CandidateSet, fit_ids: Optional[Iterable[str]] = None
                      ) -> tuple[CandidateSet, NormalizationTransform]:
    """Map each objective to [0, 1] by its min and max.

    The transform is fitted on all candidates, or only on ``fit_ids`` when
    given, and is returned so populations and targets can be mapped the same
    way.
    """
    fit_set = cset if fit_ids is None else cset.subset(fit_ids)
    transform = fit_min_max(fit_set.matrix(), cset.names)
    normed = transform.apply(cset.matrix())
    sols = tuple(SolutionPoint(s.id, tuple(row)) for s, row in zip(cset.solutions, normed))
    return CandidateSet(cset.specs, sols), transform
