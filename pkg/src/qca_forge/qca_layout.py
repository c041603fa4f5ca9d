"""Geometric QCA cells, primitive generators and layout metrics.

Coordinates are cell centres in nanometres with north = +y and east = +x.
Every generated layout sits on a 20 nm grid (18 nm cells, 2 nm gap).
"""
from __future__ import annotations

import enum
import json
import math
from collections import defaultdict
from dataclasses import dataclass, field, replace
from pathlib import Path
from typing import Iterable, Mapping, Sequence

CELL_SIZE_NM = 18.0
PITCH_NM = 20.0


class CellKind(str, enum.Enum):
    NORMAL = "normal"
    INPUT = "input"
    OUTPUT = "output"
    FIXED = "fixed"


class LayoutError(ValueError):
    pass


@dataclass(frozen=True)
class Cell:
    x: float
    y: float
    layer: int = 0
    clock_zone: int = 0
    kind: CellKind = CellKind.NORMAL
    polarization: float | None = None
    rotation: int = 0
    label: str | None = None

    def __post_init__(self):
        object.__setattr__(self, "kind", CellKind(self.kind))
        if self.rotation not in (0, 45):
            raise LayoutError(f"rotation must be 0 or 45, got {self.rotation}")
        if not 0 <= self.clock_zone <= 3:
            raise LayoutError(f"clock zone {self.clock_zone} outside 0..3")
        if self.layer < 0:
            raise LayoutError("layer must be non-negative")
        if self.kind is CellKind.FIXED:
            if self.polarization is None or not -1.0 <= self.polarization <= 1.0:
                raise LayoutError("fixed cells need a polarization in [-1, 1]")
        if self.kind in (CellKind.INPUT, CellKind.OUTPUT) and not self.label:
            raise LayoutError(f"{self.kind.value} cells need a label")

    def moved(self, dx: float, dy: float) -> "Cell":
        return replace(self, x=self.x + dx, y=self.y + dy)

    def to_json(self) -> dict:
        # fixed key order keeps golden files diff-friendly
        out = {
            "x": _num(self.x),
            "y": _num(self.y),
            "layer": self.layer,
            "clock": self.clock_zone,
            "kind": self.kind.value,
            "rotation": self.rotation,
        }
        if self.polarization is not None:
            out["polarization"] = _num(self.polarization)
        if self.label is not None:
            out["label"] = self.label
        return out

    @classmethod
    def from_json(cls, data: Mapping) -> "Cell":
        return cls(
            x=float(data["x"]),
            y=float(data["y"]),
            layer=int(data.get("layer", 0)),
            clock_zone=int(data.get("clock", 0)),
            kind=CellKind(data.get("kind", "normal")),
            polarization=None if data.get("polarization") is None else float(data["polarization"]),
            rotation=int(data.get("rotation", 0)),
            label=data.get("label"),
        )


def _num(v: float):
    return int(v) if float(v).is_integer() else round(float(v), 6)


@dataclass(frozen=True)
class Layout:
    cells: tuple[Cell, ...]
    name: str = ""
    metadata: Mapping = field(default_factory=dict)

    def __post_init__(self):
        object.__setattr__(self, "cells", tuple(self.cells))

    def __len__(self):
        return len(self.cells)

    def labeled(self, kind: CellKind | None = None) -> dict[str, int]:
        return {
            c.label: i
            for i, c in enumerate(self.cells)
            if c.label is not None and (kind is None or c.kind is kind)
        }

    def pads(self) -> dict[str, list[int]]:
        """Input cells grouped by label; one signal may enter through several pads."""
        out: dict[str, list[int]] = {}
        for i, c in enumerate(self.cells):
            if c.kind is CellKind.INPUT and c.label is not None:
                out.setdefault(c.label, []).append(i)
        return out

    @property
    def input_labels(self) -> tuple[str, ...]:
        return tuple(self.labeled(CellKind.INPUT))

    @property
    def output_labels(self) -> tuple[str, ...]:
        return tuple(self.labeled(CellKind.OUTPUT))

    def index_of(self, label: str) -> int:
        for i, c in enumerate(self.cells):
            if c.label == label:
                return i
        raise KeyError(f"no cell labeled {label!r}")

    def with_cells(self, cells: Iterable[Cell], **meta) -> "Layout":
        return Layout(tuple(cells), self.name, {**self.metadata, **meta})

    def translated(self, dx: float, dy: float) -> "Layout":
        return self.with_cells(c.moved(dx, dy) for c in self.cells)

    def mirrored(self, axis: str = "vertical", about: float = 0.0) -> "Layout":
        """Reflect about the line x=about ("vertical") or y=about ("horizontal").

        90° cells map onto themselves; nothing else about a cell changes.
        """
        if axis == "vertical":
            cells = (replace(c, x=2 * about - c.x) for c in self.cells)
        elif axis == "horizontal":
            cells = (replace(c, y=2 * about - c.y) for c in self.cells)
        else:
            raise ValueError(f"axis must be 'vertical' or 'horizontal', not {axis!r}")
        return self.with_cells(cells)

    def relabeled(self, mapping: Mapping[str, str]) -> "Layout":
        return self.with_cells(
            replace(c, label=mapping.get(c.label, c.label)) if c.label else c for c in self.cells
        )

    def to_json(self) -> dict:
        return {
            "name": self.name,
            "metadata": dict(self.metadata),
            "cells": [c.to_json() for c in self.cells],
        }

    @classmethod
    def from_json(cls, data: Mapping) -> "Layout":
        return cls(
            tuple(Cell.from_json(c) for c in data["cells"]),
            data.get("name", ""),
            dict(data.get("metadata", {})),
        )

    def save(self, path) -> None:
        Path(path).write_text(json.dumps(self.to_json(), indent=1) + "\n", encoding="utf-8")

    @classmethod
    def load(cls, path) -> "Layout":
        return cls.from_json(json.loads(Path(path).read_text(encoding="utf-8")))


def merge(name: str, *parts: Layout, **metadata) -> Layout:
    cells = [c for p in parts for c in p.cells]
    return Layout(tuple(cells), name, metadata)


def validate(layout: Layout, min_spacing: float = PITCH_NM) -> None:
    """Raise :class:`LayoutError` listing every structural problem found."""
    problems = []
    cells = layout.cells
    if not cells:
        problems.append("layout has no cells")
    # input pads may repeat a label; any other repeat is ambiguous
    labels = [c.label for c in cells if c.label is not None and c.kind is not CellKind.INPUT]
    labels += list(layout.pads())
    dupes = sorted({lab for lab in labels if labels.count(lab) > 1})
    if dupes:
        problems.append(f"duplicate labels: {', '.join(dupes)}")
    zones = sorted({c.clock_zone for c in cells})
    if zones and zones != list(range(len(zones))):
        problems.append(f"clock zones {zones} are not contiguous from 0")
    tol = 1e-6
    by_layer = defaultdict(list)
    for i, c in enumerate(cells):
        by_layer[c.layer].append(i)
    for idx in by_layer.values():
        for p, i in enumerate(idx):
            for j in idx[p + 1:]:
                d = math.hypot(cells[i].x - cells[j].x, cells[i].y - cells[j].y)
                if d < min_spacing - tol:
                    problems.append(f"cells {i} and {j} are {d:.2f} nm apart on layer {cells[i].layer}")
    if problems:
        raise LayoutError("; ".join(problems))


def is_grid_aligned(layout: Layout, pitch: float = PITCH_NM) -> bool:
    return all(
        abs(c.x / pitch - round(c.x / pitch)) < 1e-9 and abs(c.y / pitch - round(c.y / pitch)) < 1e-9
        for c in layout.cells
    )


# ---------------------------------------------------------------- primitives

_DIRS = {"E": (1, 0), "W": (-1, 0), "N": (0, 1), "S": (0, -1)}


def gen_wire(
    start: tuple[float, float] = (0.0, 0.0),
    direction: str = "E",
    length: int = 5,
    rotation: int = 0,
    clock_zones: int | Sequence[int] = 0,
    input_label: str | None = "in",
    output_label: str | None = "out",
    layer: int = 0,
    pitch: float = PITCH_NM,
) -> Layout:
    """A straight wire; ``clock_zones`` is one zone or a per-cell schedule."""
    if length < 1:
        raise LayoutError("wire length must be at least 1")
    dx, dy = _DIRS[direction]
    zones = [clock_zones] * length if isinstance(clock_zones, int) else list(clock_zones)
    if len(zones) != length:
        raise LayoutError("clock schedule length must match wire length")
    cells = []
    for k in range(length):
        kind, label = CellKind.NORMAL, None
        if k == 0 and input_label:
            kind, label = CellKind.INPUT, input_label
        elif k == length - 1 and output_label:
            kind, label = CellKind.OUTPUT, output_label
        cells.append(
            Cell(start[0] + k * dx * pitch, start[1] + k * dy * pitch, layer, zones[k], kind,
                 None, rotation, label)
        )
    return Layout(tuple(cells), f"wire{length}-{rotation}")


def gen_maj3(
    center: tuple[float, float] = (0.0, 0.0),
    clock_zone: int = 0,
    labels: Sequence[str] = ("A", "B", "C"),
    output_label: str = "out",
    pitch: float = PITCH_NM,
) -> Layout:
    """Five-cell cross: inputs north, west and south, output east."""
    x, y = center
    n, w, s = labels
    cells = (
        Cell(x, y + pitch, 0, clock_zone, CellKind.INPUT, label=n),
        Cell(x - pitch, y, 0, clock_zone, CellKind.INPUT, label=w),
        Cell(x, y - pitch, 0, clock_zone, CellKind.INPUT, label=s),
        Cell(x, y, 0, clock_zone),
        Cell(x + pitch, y, 0, clock_zone, CellKind.OUTPUT, label=output_label),
    )
    return Layout(cells, "maj3")


def gen_inverter(
    start: tuple[float, float] = (0.0, 0.0),
    clock_zones: Sequence[int] = (0, 0, 0, 0, 1, 1),
    input_label: str = "in",
    output_label: str = "out",
    pitch: float = PITCH_NM,
) -> Layout:
    """Fork-and-rejoin inverter running west to east.

    The input wire splits into two arms; the output wire starts one pitch
    east of the arm ends, diagonal to both, which flips the polarization.
    ``clock_zones`` gives zones for (input, stem, arms, arm ends, out1, out).
    """
    x, y = start
    zi, zs, za, ze, zo1, zo = clock_zones
    p = pitch
    cells = [
        Cell(x, y, 0, zi, CellKind.INPUT, label=input_label),
        Cell(x + p, y, 0, zs),
        Cell(x + p, y + p, 0, za),
        Cell(x + p, y - p, 0, za),
        Cell(x + 2 * p, y + p, 0, ze),
        Cell(x + 2 * p, y - p, 0, ze),
        Cell(x + 3 * p, y, 0, zo1),
        Cell(x + 4 * p, y, 0, zo, CellKind.OUTPUT, label=output_label),
    ]
    return Layout(tuple(cells), "inverter")


@dataclass(frozen=True)
class Maj5Template:
    """Offsets of the ten-cell five-input majority gate from its west device cell.

    A T-shaped device block: a west arm that B drives, and an east column
    whose ends the mirror pair A/C drive from the north and south.  The
    second mirror pair sits in the notches of the T and reaches the block
    through one side and one diagonal neighbour.
    """

    inputs: tuple[tuple[float, float], ...] = (
        (-20.0, 0.0),
        (20.0, 40.0),
        (20.0, -40.0),
        (0.0, 20.0),
        (0.0, -20.0),
    )
    devices: tuple[tuple[float, float], ...] = (
        (0.0, 0.0),
        (20.0, 20.0),
        (20.0, 0.0),
        (20.0, -20.0),
    )
    output: tuple[float, float] = (40.0, 0.0)

    def cells(self) -> list[tuple[float, float]]:
        return list(self.inputs) + list(self.devices) + [self.output]

    def validate(self) -> None:
        pts = self.cells()
        if len(self.inputs) != 5 or len(self.devices) != 4:
            raise LayoutError("template needs five inputs and four device cells")
        for i, p in enumerate(pts):
            for q in pts[i + 1:]:
                if math.dist(p, q) < PITCH_NM - 1e-9:
                    raise LayoutError(f"template offsets {p} and {q} overlap")
        mirrored = sorted((x, -y) for x, y in pts)
        if mirrored != sorted(pts):
            raise LayoutError("template is not mirror-symmetric about its axis")


def gen_maj5(
    template: Maj5Template = Maj5Template(),
    center: tuple[float, float] = (0.0, 0.0),
    clock_zone: int = 0,
    labels: Sequence[str] = ("B", "A", "C", "D", "E"),
    output_label: str = "out",
    fixed: Mapping[str, float] | None = None,
) -> Layout:
    """Place the template; labels follow ``template.inputs`` order.

    Any label listed in ``fixed`` becomes a polarization-fixed cell.
    """
    template.validate()
    fixed = dict(fixed or {})
    x0, y0 = center
    cells = []
    for (dx, dy), lab in zip(template.inputs, labels):
        if lab in fixed:
            cells.append(Cell(x0 + dx, y0 + dy, 0, clock_zone, CellKind.FIXED, fixed[lab], label=lab))
        else:
            cells.append(Cell(x0 + dx, y0 + dy, 0, clock_zone, CellKind.INPUT, label=lab))
    cells += [Cell(x0 + dx, y0 + dy, 0, clock_zone) for dx, dy in template.devices]
    ox, oy = template.output
    cells.append(Cell(x0 + ox, y0 + oy, 0, clock_zone, CellKind.OUTPUT, label=output_label))
    return Layout(tuple(cells), "maj5")


def gen_and3(template: Maj5Template = Maj5Template(), clock_zone: int = 0) -> Layout:
    """Three-input AND: the majority template with two inputs fixed at -1.

    B sits on the symmetry axis west of the device block; A and C are a
    mirror pair north and south of it.
    """
    lay = gen_maj5(
        template,
        clock_zone=clock_zone,
        labels=("B", "A", "C", "F1", "F2"),
        fixed={"F1": -1.0, "F2": -1.0},
    )
    return Layout(lay.cells, "and3", {"mirror_axis": "horizontal", "mirror_pairs": [["A", "C"]]})


def gen_crossing(kind: str = "multilayer", length: int = 7, pitch: float = PITCH_NM) -> Layout:
    """Two wires crossing at right angles.

    ``multilayer`` routes the vertical wire on layer 2 with layer-1 vias at
    its ends; ``coplanar`` uses a 45° vertical wire through a 90° one.
    """
    if length % 2 == 0 or length < 3:
        raise LayoutError("crossing length must be odd and at least 3")
    mid = length // 2
    horiz = gen_wire((0.0, 0.0), "E", length, 0, 0, "h_in", "h_out", 0, pitch)
    top = mid * pitch
    if kind == "multilayer":
        cells = []
        for k in range(length):
            y = top - k * pitch
            if k in (0, length - 1):
                kind_, lab = (CellKind.INPUT, "v_in") if k == 0 else (CellKind.OUTPUT, "v_out")
                cells.append(Cell(mid * pitch, y, 0, 0, kind_, label=lab))
                cells.append(Cell(mid * pitch, y, 1, 0))
            else:
                cells.append(Cell(mid * pitch, y, 2, 0))
        vert = Layout(tuple(cells))
        h = horiz.cells
    elif kind == "coplanar":
        vert = gen_wire((mid * pitch, top), "S", length, 45, 0, "v_in", "v_out", 0, pitch)
        # the 45-degree cell takes the shared site; the horizontal wire skips it
        h = tuple(c for c in horiz.cells if not (abs(c.x - mid * pitch) < 1e-9))
    else:
        raise LayoutError(f"unknown crossing kind {kind!r}")
    return merge(f"crossing-{kind}", Layout(tuple(h)), vert)


# ------------------------------------------------------------ circuit layouts

CIRCUIT_KINDS = ("fa", "fas", "fa5", "ripple8", "ripple8_sub")


def gen_circuit(net_kind: str) -> Layout:
    """Hand-placed layout for one of :data:`CIRCUIT_KINDS` (``-`` may replace ``_``)."""
    from . import circuit_layouts as cl

    makers = {
        "fa": cl.full_adder_layout,
        "fas": cl.adder_subtractor_layout,
        "fa5": cl.fa5_layout,
        "ripple8": cl.ripple_adder_layout,
        "ripple8_sub": cl.ripple_adder_subtractor_layout,
    }
    key = net_kind.replace("-", "_")
    if key not in makers:
        raise LayoutError(f"unknown circuit {net_kind!r}; choose from {', '.join(CIRCUIT_KINDS)}")
    return makers[key]()


# ------------------------------------------------------------- ASCII layouts

def from_art(
    art: str,
    legend: Mapping[str, Mapping] | None = None,
    name: str = "",
    origin: tuple[float, float] = (0.0, 0.0),
    pitch: float = PITCH_NM,
    **metadata,
) -> Layout:
    """Build a single-layer layout from a whitespace-separated grid.

    Tokens: ``.`` empty; ``0``-``3`` a normal cell in that clock zone;
    ``r0``-``r3`` a 45° cell; ``+0``/``-0`` a cell fixed at ±1 in zone 0
    (any zone digit). Other tokens are looked up in ``legend`` as keyword
    arguments for :class:`Cell` (``kind``, ``label``, ``clock_zone``...).
    The first row is the northernmost.
    """
    legend = legend or {}
    rows = [r.split() for r in art.strip("\n").splitlines() if r.strip()]
    cells = []
    nrows = len(rows)
    for r, row in enumerate(rows):
        for c, tok in enumerate(row):
            if tok == ".":
                continue
            x = origin[0] + c * pitch
            y = origin[1] + (nrows - 1 - r) * pitch
            if tok in legend:
                cells.append(Cell(x, y, **legend[tok]))
            elif tok.isdigit():
                cells.append(Cell(x, y, 0, int(tok)))
            elif tok[0] == "r" and tok[1:].isdigit():
                cells.append(Cell(x, y, 0, int(tok[1:]), rotation=45))
            elif tok[0] in "+-" and tok[1:].isdigit():
                pol = 1.0 if tok[0] == "+" else -1.0
                cells.append(Cell(x, y, 0, int(tok[1:]), CellKind.FIXED, pol))
            else:
                raise LayoutError(f"unknown layout token {tok!r} at row {r}, column {c}")
    return Layout(tuple(cells), name, metadata)


# ------------------------------------------------------------------ metrics

@dataclass(frozen=True)
class LayoutMetrics:
    cell_count: int
    area_um2: float
    delay_zones: int
    layer_count: int


def _neighbours(layout: Layout, reach: float) -> list[list[int]]:
    """Cells close enough to pass a signal: same layer within ``reach``,
    or stacked directly above one another on adjacent layers."""
    cells = layout.cells
    out = [[] for _ in cells]
    for i, a in enumerate(cells):
        for j in range(i + 1, len(cells)):
            b = cells[j]
            d = math.hypot(a.x - b.x, a.y - b.y)
            if (a.layer == b.layer and d <= reach) or (abs(a.layer - b.layer) == 1 and d < 1e-6):
                out[i].append(j)
                out[j].append(i)
    return out


def zone_regions(layout: Layout, reach: float = PITCH_NM * math.sqrt(2) + 1e-6):
    """Group cells into connected same-zone regions.

    Returns ``(region_of_cell, successors)`` where successors[r] lists the
    regions whose zone is one step later and which touch region r.
    """
    cells = layout.cells
    nb = _neighbours(layout, reach)
    region = [-1] * len(cells)
    count = 0
    for start in range(len(cells)):
        if region[start] >= 0:
            continue
        region[start] = count
        stack = [start]
        while stack:
            i = stack.pop()
            for j in nb[i]:
                if region[j] < 0 and cells[j].clock_zone == cells[i].clock_zone:
                    region[j] = count
                    stack.append(j)
        count += 1
    succ = [set() for _ in range(count)]
    for i, a in enumerate(cells):
        for j in nb[i]:
            if cells[j].clock_zone == (a.clock_zone + 1) % 4:
                succ[region[i]].add(region[j])
    return region, [sorted(s) for s in succ]


def pipeline_stages(layout: Layout) -> dict[int, int]:
    """Longest number of zone hand-offs from any input region to each region.

    Fixed cells do not start a signal path. Raises on cyclic zone flow.
    """
    region, succ = zone_regions(layout)
    nreg = len(succ)
    indeg = [0] * nreg
    for r in range(nreg):
        for s in succ[r]:
            indeg[s] += 1
    order, queue = [], [r for r in range(nreg) if indeg[r] == 0]
    while queue:
        r = queue.pop()
        order.append(r)
        for s in succ[r]:
            indeg[s] -= 1
            if indeg[s] == 0:
                queue.append(s)
    if len(order) != nreg:
        raise LayoutError("clock zones form a cycle; data flow is ill-defined")
    stage = {region[i]: 0 for i, c in enumerate(layout.cells) if c.kind is CellKind.INPUT}
    for r in order:
        if r not in stage:
            continue
        for s in succ[r]:
            stage[s] = max(stage.get(s, 0), stage[r] + 1)
    return stage


def output_latencies(layout: Layout) -> dict[str, int]:
    """Zone hand-offs between the inputs and each output cell."""
    region, _ = zone_regions(layout)
    stage = pipeline_stages(layout)
    return {
        c.label: stage.get(region[i], 0)
        for i, c in enumerate(layout.cells)
        if c.kind is CellKind.OUTPUT
    }


def layout_metrics(layout: Layout, cell_size: float = CELL_SIZE_NM) -> LayoutMetrics:
    if not layout.cells:
        raise LayoutError("cannot measure an empty layout")
    xs = [c.x for c in layout.cells]
    ys = [c.y for c in layout.cells]
    width = max(xs) - min(xs) + cell_size
    height = max(ys) - min(ys) + cell_size
    lat = output_latencies(layout)
    delay = 1 + max(lat.values()) if lat else 1
    return LayoutMetrics(
        cell_count=len(layout.cells),
        area_um2=width * height * 1e-6,
        delay_zones=delay,
        layer_count=len({c.layer for c in layout.cells}),
    )
