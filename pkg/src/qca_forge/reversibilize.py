"""Greedy conversion of a multi-output function into an injective one.

Rows that share an output vector collide. Input columns are appended as
garbage outputs, each time picking the column that leaves the fewest
colliding row pairs, until every output row is distinct.
"""
from __future__ import annotations

import csv
import math
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .logic_core import TruthSpec

LOWEST = "lowest"
HIGHEST = "highest"


@dataclass(frozen=True)
class CollisionReport:
    classes: tuple[tuple[int, ...], ...]
    colliding_pair_count: int
    max_class_size: int


@dataclass(frozen=True)
class ReversibilizeResult:
    augmented: TruthSpec
    garbage_sources: tuple[int, ...]
    step_pair_counts: tuple[int, ...]

    @property
    def garbage_names(self) -> tuple[str, ...]:
        return self.augmented.output_names[-len(self.garbage_sources):] if self.garbage_sources else ()


def _row_keys(rows: np.ndarray) -> np.ndarray:
    if rows.shape[1] == 0:
        return np.zeros(rows.shape[0], dtype=np.int64)
    # packbits keeps keys compact for wide tables
    packed = np.packbits(rows, axis=1)
    return np.unique(packed, axis=0, return_inverse=True)[1].reshape(-1)


def _pair_count(rows: np.ndarray) -> int:
    _, counts = np.unique(_row_keys(rows), return_counts=True)
    return int(sum(c * (c - 1) // 2 for c in counts))


def collision_report(spec: TruthSpec) -> CollisionReport:
    keys = _row_keys(spec.rows)
    groups: dict[int, list[int]] = {}
    for row, key in enumerate(keys):
        groups.setdefault(int(key), []).append(row)
    classes = sorted((tuple(g) for g in groups.values() if len(g) > 1), key=lambda g: g[0])
    pairs = sum(len(g) * (len(g) - 1) // 2 for g in classes)
    largest = max((len(g) for g in groups.values()), default=0)
    return CollisionReport(tuple(classes), pairs, largest)


def garbage_lower_bound(spec: TruthSpec) -> int:
    size = collision_report(spec).max_class_size
    return math.ceil(math.log2(size)) if size > 1 else 0


def is_reversible(spec: TruthSpec) -> bool:
    return collision_report(spec).colliding_pair_count == 0


def _garbage_name(spec: TruthSpec, existing: tuple[str, ...], k: int) -> str:
    name = f"Gar{k}"
    while name in existing or name in spec.input_names:
        name += "_"
    return name


def reversibilize(spec: TruthSpec, tie_break: str = LOWEST) -> ReversibilizeResult:
    if tie_break not in (LOWEST, HIGHEST):
        raise ValueError(f"unknown tie-break policy {tie_break!r}")
    rows = spec.rows
    chosen: list[int] = []
    steps: list[int] = []
    current = _pair_count(rows)
    while current:
        best = None
        for col in range(spec.n_inputs):
            if col in chosen:
                continue
            cand = np.hstack([rows, spec.input_column(col)[:, None]])
            score = _pair_count(cand)
            if best is None or score < best[0] or (score == best[0] and tie_break == HIGHEST):
                best = (score, col, cand)
        current, col, rows = best
        chosen.append(col)
        steps.append(current)
    names, cols = [], []
    out_names = spec.output_names
    for k, col in enumerate(chosen, start=1):
        name = _garbage_name(spec, out_names + tuple(names), k)
        names.append(name)
        cols.append(spec.input_column(col))
    return ReversibilizeResult(spec.with_columns(names, cols), tuple(chosen), tuple(steps))


def write_step_log(result: ReversibilizeResult, spec: TruthSpec, path) -> None:
    with Path(path).open("w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(["step", "column", "input", "garbage_output", "remaining_pairs"])
        garbage = result.garbage_names
        for step, (col, pairs) in enumerate(zip(result.garbage_sources, result.step_pair_counts), 1):
            writer.writerow([step, col, spec.input_names[col], garbage[step - 1], pairs])
