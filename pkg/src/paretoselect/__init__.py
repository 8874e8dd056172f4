"""Pick one solution from a Pareto frontier of already-evaluated candidates."""
from importlib import resources

from .calibration import CalibrationParams, InteractionLog, UtopiaTable, calibrate
from .core import (
    CandidateSet,
    Direction,
    DomainError,
    InputError,
    ObjectiveSpec,
    SamplePopulation,
    SelectionResult,
    SolutionPoint,
    Strategy,
    UnsupportedStrategyError,
    UtopiaAssignment,
    min_max_normalize,
    orient,
)
from .dominance import Frontier, dominates, empirical_nadir, empirical_utopia, pareto_frontier
from .strategies import (
    Distance,
    StrategyParams,
    sample_weight_vectors,
    score_ed,
    score_hv,
    score_pdu,
    score_wm,
    select,
    select_akp,
    select_ukp,
)

__version__ = "0.1.0"


def fixture_path(name: str):
    """Path of a bundled CSV fixture, e.g. ``fixture_path("table1_solutions.csv")``."""
    return resources.files(__package__).joinpath("data", name)


__all__ = [
    "CalibrationParams", "CandidateSet", "Direction", "Distance", "DomainError", "Frontier",
    "InputError", "InteractionLog", "ObjectiveSpec", "SamplePopulation", "SelectionResult",
    "SolutionPoint", "Strategy", "StrategyParams", "UnsupportedStrategyError",
    "UtopiaAssignment", "UtopiaTable", "calibrate", "dominates", "empirical_nadir",
    "empirical_utopia", "fixture_path", "min_max_normalize", "orient", "pareto_frontier",
    "sample_weight_vectors", "score_ed", "score_hv", "score_pdu", "score_wm", "select",
    "select_akp", "select_ukp",
]
