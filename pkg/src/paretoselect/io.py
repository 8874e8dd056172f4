"""CSV readers and writers for every file kind the tool consumes or emits.

All files are UTF-8, comma separated, with a header row. Output uses LF line
endings and is byte-deterministic for identical inputs.
"""
from __future__ import annotations

import csv
import io
import math
import os
import re
from typing import Iterable, Iterator, Mapping, Sequence

import numpy as np

from .calibration import InteractionLog, UtopiaTable
from .core import (
    CandidateSet,
    Direction,
    InputError,
    ObjectiveSpec,
    SamplePopulation,
    SelectionResult,
    SolutionPoint,
    UnsupportedStrategyError,
    UtopiaAssignment,
    check_populations,
    check_specs,
)
from .dominance import Frontier

SCHEMA_HEADER = ["name", "direction", "weight", "utopia", "reference"]
GLOBAL_SAMPLE = "*"

_NUMBER = re.compile(r"^[+-]?(\d+\.?\d*|\.\d+)([eE][+-]?\d+)?$")


def parse_number(text: str, where: str = "") -> float:
    """Strict decimal parser: no thousands separators, no nan/inf."""
    cell = text.strip()
    if not _NUMBER.match(cell):
        raise InputError(f"{where}: not a finite number: {text!r}" if where
                         else f"not a finite number: {text!r}")
    value = float(cell)
    if not math.isfinite(value):
        raise InputError(f"{where}: number out of range: {text!r}")
    return value


def parse_vector(text: str, what: str = "vector") -> tuple[float, ...]:
    """Comma-separated components, as given on the command line."""
    parts = text.split(",")
    if not text.strip() or any(not p.strip() for p in parts):
        raise InputError(f"{what}: expected comma-separated numbers, got {text!r}")
    return tuple(parse_number(p, what) for p in parts)


def format_number(x: float) -> str:
    """Shortest text that reads back to the same float."""
    return repr(float(x))


def format_6g(x) -> str:
    if isinstance(x, (int, np.integer)) and not isinstance(x, bool):
        return str(int(x))
    return f"{float(x):.6g}"


def _rows(path) -> Iterator[tuple[int, list[str]]]:
    path = os.fspath(path)
    if not os.path.isfile(path):
        raise InputError(f"{path}: no such file")
    try:
        with open(path, newline="", encoding="utf-8") as fh:
            for lineno, row in enumerate(csv.reader(fh), start=1):
                if not row or all(not c.strip() for c in row):
                    continue
                yield lineno, [c.strip() for c in row]
    except UnicodeDecodeError as exc:
        raise InputError(f"{path}: not valid UTF-8 ({exc.reason})") from None
    except csv.Error as exc:
        raise InputError(f"{path}: malformed CSV ({exc})") from None


def _read(path, expected_prefix: Sequence[str]) -> tuple[list[str], list[tuple[int, list[str]]]]:
    rows = list(_rows(path))
    if not rows:
        raise InputError(f"{os.fspath(path)}: file is empty")
    _, header = rows[0]
    n = len(expected_prefix)
    if [h.lower() for h in header[:n]] != list(expected_prefix):
        raise InputError(f"{os.fspath(path)}: header must start with {','.join(expected_prefix)}, "
                         f"got {','.join(header)}")
    body = rows[1:]
    for lineno, row in body:
        if len(row) != len(header):
            raise InputError(f"{os.fspath(path)}:{lineno}: expected {len(header)} columns, "
                             f"got {len(row)}")
    return header, body


def _check_objective_columns(path, found: Sequence[str], specs: Sequence[ObjectiveSpec]) -> None:
    names = [s.name for s in specs]
    if list(found) != names:
        raise InputError(f"{os.fspath(path)}: objective columns {','.join(found) or '(none)'} "
                         f"do not match schema {','.join(names)}")


def _cell_number(path, lineno: int, column: str, text: str) -> float:
    return parse_number(text, f"{os.fspath(path)}:{lineno} column {column!r}")


def _writer(fh):
    return csv.writer(fh, lineterminator="\n")


def _emit(path, rows: Iterable[Sequence[str]]) -> str:
    buf = io.StringIO()
    w = _writer(buf)
    for row in rows:
        w.writerow(row)
    text = buf.getvalue()
    if path is not None:
        with open(os.fspath(path), "w", newline="", encoding="utf-8") as fh:
            fh.write(text)
    return text


# -- objective schema --------------------------------------------------------

def load_schema(path) -> tuple[ObjectiveSpec, ...]:
    header, body = _read(path, ["name", "direction"])
    if [h.lower() for h in header] != SCHEMA_HEADER:
        raise InputError(f"{os.fspath(path)}: header must be {','.join(SCHEMA_HEADER)}")
    specs = []
    for lineno, (name, direction, weight, utopia, reference) in body:
        where = f"{os.fspath(path)}:{lineno}"
        if not name:
            raise InputError(f"{where}: empty objective name")
        try:
            d = Direction.parse(direction)
        except InputError as exc:
            raise InputError(f"{where}: {exc}") from None
        opt = [None if not c else _cell_number(path, lineno, col, c)
               for col, c in zip(SCHEMA_HEADER[2:], (weight, utopia, reference))]
        specs.append(ObjectiveSpec(name, d, *opt))
    try:
        return check_specs(specs)
    except InputError as exc:
        raise InputError(f"{os.fspath(path)}: {exc}") from None


def write_schema(specs: Sequence[ObjectiveSpec], path=None) -> str:
    def opt(v):
        return "" if v is None else format_number(v)
    rows = [SCHEMA_HEADER]
    rows += [[s.name, s.direction.value, opt(s.weight), opt(s.utopia_component),
              opt(s.reference_component)] for s in specs]
    return _emit(path, rows)


# -- solutions ---------------------------------------------------------------

def load_solutions(path, specs: Sequence[ObjectiveSpec]) -> CandidateSet:
    header, body = _read(path, ["id"])
    _check_objective_columns(path, header[1:], specs)
    if not body:
        raise InputError(f"{os.fspath(path)}: no solutions")
    seen = {}
    sols = []
    for lineno, row in body:
        sid = row[0]
        if not sid:
            raise InputError(f"{os.fspath(path)}:{lineno}: empty id")
        if sid in seen:
            raise InputError(f"{os.fspath(path)}:{lineno}: duplicate id {sid!r} "
                             f"(first on line {seen[sid]})")
        seen[sid] = lineno
        vals = tuple(_cell_number(path, lineno, col, c) for col, c in zip(header[1:], row[1:]))
        sols.append(SolutionPoint(sid, vals))
    return CandidateSet(tuple(specs), tuple(sols))


def write_solutions(cset: CandidateSet, path=None) -> str:
    rows = [["id", *cset.names]]
    rows += [[s.id, *map(format_number, s.values)] for s in cset.solutions]
    return _emit(path, rows)


# -- per-sample populations ----------------------------------------------------

def load_samples(path, specs: Sequence[ObjectiveSpec]) -> dict[str, SamplePopulation]:
    header, body = _read(path, ["solution_id", "sample_id"])
    _check_objective_columns(path, header[2:], specs)
    if not body:
        raise InputError(f"{os.fspath(path)}: no samples")
    grouped: dict[str, tuple[list[str], list[tuple[float, ...]]]] = {}
    seen: set[tuple[str, str]] = set()
    for lineno, row in body:
        sol, sample = row[0], row[1]
        if not sol or not sample:
            raise InputError(f"{os.fspath(path)}:{lineno}: empty solution_id or sample_id")
        ids, vals = grouped.setdefault(sol, ([], []))
        if (sol, sample) in seen:
            raise InputError(f"{os.fspath(path)}:{lineno}: sample {sample!r} repeated "
                             f"for solution {sol!r}")
        seen.add((sol, sample))
        ids.append(sample)
        vals.append(tuple(_cell_number(path, lineno, col, c)
                          for col, c in zip(header[2:], row[2:])))
    pops = {sol: SamplePopulation(sol, tuple(ids), np.array(vals))
            for sol, (ids, vals) in grouped.items()}
    try:
        check_populations(pops, len(specs))
    except InputError as exc:
        raise InputError(f"{os.fspath(path)}: {exc}") from None
    return pops


def write_samples(populations: Mapping[str, SamplePopulation],
                  specs: Sequence[ObjectiveSpec], path=None) -> str:
    rows = [["solution_id", "sample_id", *[s.name for s in specs]]]
    for sol in populations:
        pop = populations[sol]
        for sample, vals in zip(pop.sample_ids, pop.values):
            rows.append([sol, sample, *map(format_number, vals)])
    return _emit(path, rows)


# -- interactions ----------------------------------------------------------------

def load_interactions(path) -> InteractionLog:
    header, body = _read(path, ["user_id", "item_id"])
    if len(header) != 2:
        raise InputError(f"{os.fspath(path)}: header must be user_id,item_id")
    if not body:
        raise InputError(f"{os.fspath(path)}: no interactions")
    records = []
    for lineno, (user, item) in body:
        if not user or not item:
            raise InputError(f"{os.fspath(path)}:{lineno}: empty user_id or item_id")
        records.append((user, item))
    return InteractionLog(tuple(records))


def write_interactions(log: InteractionLog, path=None) -> str:
    return _emit(path, [["user_id", "item_id"], *map(list, log.records)])


# -- utopia points -----------------------------------------------------------------

def load_utopia(path, specs: Sequence[ObjectiveSpec]) -> UtopiaAssignment:
    header, body = _read(path, ["sample_id"])
    _check_objective_columns(path, header[1:], specs)
    if not body:
        raise InputError(f"{os.fspath(path)}: no utopia rows")
    rows: dict[str, tuple[float, ...]] = {}
    for lineno, row in body:
        sample = row[0]
        if not sample:
            raise InputError(f"{os.fspath(path)}:{lineno}: empty sample_id")
        if sample in rows:
            raise InputError(f"{os.fspath(path)}:{lineno}: duplicate sample_id {sample!r}")
        rows[sample] = tuple(_cell_number(path, lineno, col, c)
                             for col, c in zip(header[1:], row[1:]))
    if GLOBAL_SAMPLE in rows:
        if len(rows) != 1:
            raise InputError(f"{os.fspath(path)}: a global row '*' must be the only row")
        return UtopiaAssignment.global_(rows[GLOBAL_SAMPLE])
    return UtopiaAssignment.from_table(rows)


def write_utopia(utopia: UtopiaAssignment, names: Sequence[str], path=None) -> str:
    rows = [["sample_id", *names]]
    if utopia.is_global:
        rows.append([GLOBAL_SAMPLE, *map(format_number, utopia.global_point)])
    else:
        for sample in sorted(utopia.per_sample):
            rows.append([sample, *map(format_number, utopia.per_sample[sample])])
    return _emit(path, rows)


def utopia_table_assignment(table: UtopiaTable) -> UtopiaAssignment:
    return UtopiaAssignment.from_table(table.rows)


def check_utopia_covers(utopia: UtopiaAssignment,
                        populations: Mapping[str, SamplePopulation]) -> None:
    """A per-sample table must list exactly the samples of the analysis."""
    if utopia.is_global or not populations:
        return
    samples = set(next(iter(populations.values())).sample_ids)
    table = set(utopia.per_sample)
    if samples != table:
        missing = sorted(samples - table)
        extra = sorted(table - samples)
        detail = f"missing sample {missing[0]!r}" if missing else f"unknown sample {extra[0]!r}"
        raise InputError(f"utopia table does not match the sample set: {detail}")


# -- selection output --------------------------------------------------------------

def write_selection(result: SelectionResult, path=None) -> str:
    rows = [["strategy", "id", "score", "chosen", "tied"]]
    for sid in sorted(result.scores):
        rows.append([result.strategy.value, sid, format_6g(result.scores[sid]),
                     str(int(sid == result.chosen_id)), str(int(sid in result.tie_ids))])
    return _emit(path, rows)


def _selected_by(results: Sequence[SelectionResult]) -> dict[str, list[str]]:
    marks: dict[str, list[str]] = {}
    for res in results:
        marks.setdefault(res.chosen_id, []).append(res.strategy.value)
    return marks


def report_rows(results: Sequence[SelectionResult], cset: CandidateSet,
                frontier: Frontier) -> list[list[str]]:
    """Table rows: objectives, one score column per strategy, then selected_by."""
    ids = sorted(set(frontier.member_ids).union(*(r.scores for r in results)))
    marks = _selected_by(results)
    header = ["id", *cset.names, *[r.strategy.value.upper() for r in results], "selected_by"]
    rows = [header]
    for sid in ids:
        sol = cset.get(sid)
        scores = [format_6g(r.scores[sid]) if sid in r.scores else "" for r in results]
        rows.append([sid, *map(format_6g, sol.values), *scores, ";".join(marks.get(sid, []))])
    return rows


def render_table(rows: Sequence[Sequence[str]], best: Mapping[tuple[int, int], bool]) -> str:
    """Fixed-width text table; cells flagged in ``best`` are wrapped in ``*``."""
    cells = [[f"*{c}*" if best.get((i, j)) else c for j, c in enumerate(row)]
             for i, row in enumerate(rows)]
    widths = [max(len(r[j]) for r in cells) for j in range(len(cells[0]))]
    lines = []
    for i, row in enumerate(cells):
        lines.append("  ".join(c.ljust(w) for c, w in zip(row, widths)).rstrip())
        if i == 0:
            lines.append("  ".join("-" * w for w in widths))
    return "\n".join(lines) + "\n"


def write_report(results: Sequence[SelectionResult], cset: CandidateSet, frontier: Frontier,
                 path=None) -> tuple[str, str]:
    """Write the side-by-side report CSV; return ``(csv_text, text_table)``."""
    for res in results:
        stray = set(res.scores) - set(cset.ids)
        if stray:
            raise InputError(f"result for {res.strategy.value} scores unknown id {sorted(stray)[0]!r}")
    rows = report_rows(results, cset, frontier)
    csv_text = _emit(path, rows)
    k = cset.k
    best = {}
    for j, res in enumerate(results):
        col = 1 + k + j
        for i, row in enumerate(rows[1:], start=1):
            if row[0] in res.tie_ids:
                best[(i, col)] = True
    return csv_text, render_table(rows, best)


def emit_plot_data(cset: CandidateSet, frontier: Frontier, results: Sequence[SelectionResult],
                   path=None) -> str:
    """Plot-ready CSV of every candidate with frontier and selection flags."""
    if cset.k not in (2, 3):
        raise UnsupportedStrategyError(f"plot data needs 2 or 3 objectives, got {cset.k}")
    marks = _selected_by(results)
    rows = [["id", *cset.names, "on_frontier", "selected_by"]]
    for sol in sorted(cset.solutions, key=lambda s: s.id):
        rows.append([sol.id, *map(format_number, sol.values),
                     str(int(sol.id in frontier)), ";".join(marks.get(sol.id, []))])
    return _emit(path, rows)


def read_table(path) -> list[dict[str, str]]:
    """Rows of any emitted CSV as dicts keyed by header."""
    header, body = _read(path, [])
    return [dict(zip(header, row)) for _, row in body]
