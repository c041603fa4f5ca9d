"""Displacement fault injection.

A named cell is pushed step by step in one compass direction and the layout
is re-verified at every step.  The report records where correct behaviour
first breaks, or whether the move was geometrically impossible.
"""

from __future__ import annotations

import csv
import enum
import json
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from typing import Iterable, Mapping, Sequence

from .logic_core import TruthSpec
from .qca_layout import CELL_SIZE_NM, Layout, LayoutError
from .qca_sim import ClockScheme, SimConfig, verify_layout


class Direction(str, enum.Enum):
    N = "N"
    S = "S"
    E = "E"
    W = "W"

    @property
    def unit(self) -> tuple[int, int]:
        return {"N": (0, 1), "S": (0, -1), "E": (1, 0), "W": (-1, 0)}[self.value]


# how a direction maps when the layout is reflected about each axis
_MIRROR = {
    "vertical": {"N": "N", "S": "S", "E": "W", "W": "E"},
    "horizontal": {"N": "S", "S": "N", "E": "E", "W": "W"},
}


class Verdict(str, enum.Enum):
    NORMAL = "normal"
    FAULTY = "faulty"
    NOT_POSSIBLE = "not_possible"


class NotPossible:
    """Returned by :func:`displace` when the move would overlap another cell."""

    def __init__(self, label: str, blocker: int, distance: float):
        self.label = label
        self.blocker = blocker
        self.distance = distance

    def __bool__(self):
        return False

    def __repr__(self):
        return f"NotPossible({self.label!r}, blocked by cell {self.blocker} at {self.distance:.2f} nm)"


class BaselineError(RuntimeError):
    """The undisturbed layout already fails its truth table."""


def displace(layout: Layout, label: str, dx_nm: float, dy_nm: float,
             min_gap: float = CELL_SIZE_NM) -> Layout | NotPossible:
    idx = layout.index_of(label)
    moved = layout.cells[idx].moved(dx_nm, dy_nm)
    for j, other in enumerate(layout.cells):
        if j == idx or other.layer != moved.layer:
            continue
        gap = math.hypot(moved.x - other.x, moved.y - other.y)
        if gap < min_gap - 1e-9:
            return NotPossible(label, j, gap)
    cells = list(layout.cells)
    cells[idx] = moved
    return layout.with_cells(cells)


@dataclass(frozen=True)
class FaultSweepConfig:
    target_label: str
    direction: Direction | str
    spec: TruthSpec
    step_nm: float = 1.0
    max_nm: float = 20.0
    sim: SimConfig = field(default_factory=SimConfig)
    clock: ClockScheme | str = ClockScheme.LANDAUER

    def __post_init__(self):
        object.__setattr__(self, "direction", Direction(self.direction))
        if self.step_nm <= 0:
            raise ValueError("step_nm must be positive")
        if self.max_nm < self.step_nm:
            raise ValueError("max_nm must be at least step_nm")

    def distances(self) -> list[float]:
        n = int(math.floor(self.max_nm / self.step_nm + 1e-9))
        return [round(k * self.step_nm, 9) for k in range(n + 1)]


@dataclass(frozen=True)
class DirectionResult:
    label: str
    direction: Direction
    verdicts: tuple[tuple[float, Verdict], ...]

    @property
    def max_normal_nm(self) -> float | None:
        """Largest d such that every step 0..d was normal; None if d=0 fails."""
        best = None
        for d, v in self.verdicts:
            if v is not Verdict.NORMAL:
                break
            best = d
        return best

    @property
    def not_possible(self) -> bool:
        """True when the sweep hit a geometric block before any functional failure."""
        for _, v in self.verdicts:
            if v is Verdict.FAULTY:
                return False
            if v is Verdict.NOT_POSSIBLE:
                return True
        return False


@dataclass(frozen=True)
class FaultReport:
    label: str
    results: Mapping[Direction, DirectionResult]

    def max_normal(self) -> dict[str, float | None]:
        return {d.value: r.max_normal_nm for d, r in self.results.items()}

    def summary(self) -> dict:
        return {
            "label": self.label,
            "directions": {
                d.value: {"max_normal_nm": r.max_normal_nm, "not_possible": r.not_possible}
                for d, r in self.results.items()
            },
        }

    def rows(self) -> Iterable[tuple[str, str, float, str]]:
        for d, r in self.results.items():
            for dist, v in r.verdicts:
                yield self.label, d.value, dist, v.value

    def to_csv(self, path) -> None:
        with open(path, "w", newline="", encoding="utf-8") as fh:
            w = csv.writer(fh)
            w.writerow(["label", "direction", "d_nm", "verdict"])
            for lab, d, dist, v in self.rows():
                w.writerow([lab, d, f"{dist:g}", v])

    def to_json(self, path) -> None:
        with open(path, "w", encoding="utf-8") as fh:
            json.dump(self.summary(), fh, indent=2)


def _point(layout: Layout, cfg: FaultSweepConfig, d: float) -> Verdict:
    ux, uy = cfg.direction.unit
    moved = displace(layout, cfg.target_label, ux * d, uy * d)
    if isinstance(moved, NotPossible):
        return Verdict.NOT_POSSIBLE
    ok = verify_layout(moved, cfg.spec, cfg.sim, cfg.clock)
    return Verdict.NORMAL if ok.passed else Verdict.FAULTY


def _job(args):
    return _point(*args)


def check_baseline(layout: Layout, spec: TruthSpec, sim: SimConfig = SimConfig(),
                   clock: ClockScheme | str = ClockScheme.LANDAUER) -> None:
    base = verify_layout(layout, spec, sim, clock)
    if not base.passed:
        raise BaselineError(
            f"baseline layout fails on vectors {list(base.mismatches)} "
            f"(min signed level {base.min_level:.3f})"
        )


def sweep(layout: Layout, config: FaultSweepConfig, workers: int = 1,
          stop_at_first: bool = False, check: bool = True) -> DirectionResult:
    """Sweep one cell in one direction.

    With ``stop_at_first`` the sweep ends at the first non-normal step, which
    is all that ``max_normal_nm`` needs; otherwise every distance is recorded.
    """
    layout.index_of(config.target_label)
    if check:
        check_baseline(layout, config.spec, config.sim, config.clock)
    dists = config.distances()
    if stop_at_first:
        verdicts = []
        for d in dists:
            v = _point(layout, config, d)
            verdicts.append((d, v))
            if v is not Verdict.NORMAL:
                break
    elif workers > 1:
        with ProcessPoolExecutor(workers) as pool:
            got = list(pool.map(_job, [(layout, config, d) for d in dists]))
        verdicts = list(zip(dists, got))
    else:
        verdicts = [(d, _point(layout, config, d)) for d in dists]
    return DirectionResult(config.target_label, config.direction, tuple(verdicts))


def sweep_cell(layout: Layout, label: str, spec: TruthSpec, directions: str | Sequence = "NSEW",
               step_nm: float = 1.0, max_nm: float = 20.0, sim: SimConfig = SimConfig(),
               clock: ClockScheme | str = ClockScheme.LANDAUER, workers: int = 1,
               stop_at_first: bool = False) -> FaultReport:
    check_baseline(layout, spec, sim, clock)
    results = {}
    for d in directions:
        cfg = FaultSweepConfig(label, d, spec, step_nm, max_nm, sim, clock)
        results[cfg.direction] = sweep(layout, cfg, workers, stop_at_first, check=False)
    return FaultReport(label, results)


def mirror_check(report_a: FaultReport, report_c: FaultReport, axis: str = "vertical") -> bool:
    """True when C's tolerances are A's seen through a mirror.

    ``axis="vertical"`` swaps E and W; ``"horizontal"`` swaps N and S.
    """
    if axis not in _MIRROR:
        raise LayoutError(f"unknown mirror axis {axis!r}")
    dirs_a = {d.value for d in report_a.results}
    dirs_c = {d.value for d in report_c.results}
    flip = _MIRROR[axis]
    if {flip[d] for d in dirs_a} != dirs_c:
        raise ValueError(f"direction sets differ: {sorted(dirs_a)} vs {sorted(dirs_c)}")
    for d, ra in report_a.results.items():
        rc = report_c.results[Direction(flip[d.value])]
        if ra.max_normal_nm != rc.max_normal_nm or ra.not_possible != rc.not_possible:
            return False
    return True


def mirrored_report(report: FaultReport, axis: str = "vertical", label: str | None = None) -> FaultReport:
    flip = _MIRROR[axis]
    res = {}
    for d, r in report.results.items():
        nd = Direction(flip[d.value])
        res[nd] = DirectionResult(label or r.label, nd, r.verdicts)
    return FaultReport(label or report.label, res)
