"""Bistable-approximation simulation of clocked QCA layouts.

Each free cell relaxes to ``P = x / sqrt(1 + x^2)`` with
``x = sum_j Ek(i, j) P_j / (2 gamma)``, where ``Ek`` is the kink energy to
neighbour ``j`` and ``gamma`` is the tunnelling energy set by the cell's
clock zone. Cells are swept in index order (Gauss-Seidel) at every sample.
"""
from __future__ import annotations

import enum
import itertools
import logging
import math
from dataclasses import dataclass, field, replace

import numba
import numpy as np

from .logic_core import TruthSpec, int_to_bits
from .qca_layout import Cell, CellKind, Layout, LayoutError, output_latencies

log = logging.getLogger(__name__)

ELEMENTARY_CHARGE = 1.602176634e-19
VACUUM_PERMITTIVITY = 8.8541878128e-12
WEAK_LEVEL = 0.5


@dataclass(frozen=True)
class SimConfig:
    cell_size_nm: float = 18.0
    samples: int = 12800
    convergence_tolerance: float = 1e-3
    radius_of_effect_nm: float = 65.0
    relative_permittivity: float = 12.9
    clock_high_J: float = 9.8e-22
    clock_low_J: float = 3.8e-23
    clock_amplitude_factor: float = 2.0
    layer_separation_nm: float = 11.5
    max_iterations_per_sample: int = 100
    # dot centres sit this far from the cell centre along x and y
    dot_offset_nm: float = 4.5
    pitch_nm: float = 20.0

    def __post_init__(self):
        if self.convergence_tolerance <= 0:
            raise ValueError("convergence tolerance must be positive")
        if not self.clock_high_J > self.clock_low_J > 0:
            raise ValueError("need clock_high > clock_low > 0")
        if self.radius_of_effect_nm <= self.pitch_nm:
            raise ValueError("radius of effect must exceed the grid pitch")
        if self.samples < 1 or self.max_iterations_per_sample < 1:
            raise ValueError("samples and iteration cap must be positive")


# ------------------------------------------------------------ electrostatics

# dot order: two "+1" diagonal sites, then the two "-1" sites
_DOT_SIGNS = np.array([1.0, 1.0, -1.0, -1.0])


def dot_positions(cell: Cell, config: SimConfig) -> np.ndarray:
    h = config.dot_offset_nm
    if cell.rotation == 45:
        r = h * math.sqrt(2.0)
        local = np.array([(0.0, r), (0.0, -r), (-r, 0.0), (r, 0.0)])
    else:
        local = np.array([(h, h), (-h, -h), (-h, h), (h, -h)])
    z = cell.layer * config.layer_separation_nm
    return np.column_stack([local[:, 0] + cell.x, local[:, 1] + cell.y, np.full(4, z)])


def _center_distance(ci: Cell, cj: Cell, config: SimConfig) -> float:
    dz = (ci.layer - cj.layer) * config.layer_separation_nm
    return math.sqrt((ci.x - cj.x) ** 2 + (ci.y - cj.y) ** 2 + dz * dz)


def kink_energy(ci: Cell, cj: Cell, config: SimConfig = SimConfig()) -> float:
    """Energy of opposite minus equal polarizations, in joules.

    Each dot carries ±e/2 (the mobile electron charge less the fixed
    neutralising background), interacting through a screened Coulomb law.
    """
    d = _center_distance(ci, cj, config)
    if d < 1e-9:
        raise LayoutError("kink energy is undefined for coincident cells")
    if d > config.radius_of_effect_nm:
        return 0.0
    pi_, pj = dot_positions(ci, config), dot_positions(cj, config)
    diff = pi_[:, None, :] - pj[None, :, :]
    dist = np.sqrt((diff**2).sum(axis=2)) * 1e-9
    signs = _DOT_SIGNS[:, None] * _DOT_SIGNS[None, :]
    k = 1.0 / (4 * math.pi * VACUUM_PERMITTIVITY * config.relative_permittivity)
    q = ELEMENTARY_CHARGE / 2
    same = k * q * q * float((signs / dist).sum())
    return -2.0 * same


def coupling_matrix(layout: Layout, config: SimConfig = SimConfig()):
    """Sparse neighbour lists: (indptr, indices, energies) in CSR form."""
    cells = layout.cells
    n = len(cells)
    xy = np.array([(c.x, c.y, c.layer * config.layer_separation_nm) for c in cells]).reshape(n, 3)
    rows: list[list[tuple[int, float]]] = [[] for _ in range(n)]
    r2 = config.radius_of_effect_nm**2
    for i in range(n):
        d2 = ((xy - xy[i]) ** 2).sum(axis=1)
        for j in np.flatnonzero(d2 <= r2):
            j = int(j)
            if j <= i:
                continue
            e = kink_energy(cells[i], cells[j], config)
            if e != 0.0:
                rows[i].append((j, e))
                rows[j].append((i, e))
    indptr = np.zeros(n + 1, dtype=np.int64)
    for i in range(n):
        indptr[i + 1] = indptr[i] + len(rows[i])
    indices = np.empty(indptr[-1], dtype=np.int64)
    energies = np.empty(indptr[-1], dtype=np.float64)
    for i in range(n):
        for k, (j, e) in enumerate(sorted(rows[i])):
            indices[indptr[i] + k] = j
            energies[indptr[i] + k] = e
    return indptr, indices, energies


# -------------------------------------------------------------------- clocks

class ClockScheme(str, enum.Enum):
    LANDAUER = "landauer"
    BENNETT = "bennett"


PHASES = ("Switch", "Hold", "Release", "Relax")
SWITCH, HOLD, RELEASE, RELAX = range(4)
N_ZONES = 4


@dataclass(frozen=True)
class ClockProgram:
    """Piecewise clock: each zone steps through Switch/Hold/Release/Relax.

    Landauer cycles have four slots and zone k lags zone k-1 by one slot.
    Bennett cycles have nine slots: zones latch in order C0..C3, stay in
    Hold until the last zone has computed, then release from C3 back to C0.
    """

    scheme: ClockScheme = ClockScheme.LANDAUER
    samples_per_cycle: int = 400

    def __post_init__(self):
        object.__setattr__(self, "scheme", ClockScheme(self.scheme))
        if self.samples_per_cycle < self.slots_per_cycle:
            raise ValueError("need at least one sample per clock slot")

    @property
    def slots_per_cycle(self) -> int:
        return 4 if self.scheme is ClockScheme.LANDAUER else 2 * N_ZONES + 1

    def phase(self, zone: int, slot: int) -> int:
        if self.scheme is ClockScheme.LANDAUER:
            return (slot - zone) % 4
        slot %= self.slots_per_cycle
        release = 2 * N_ZONES - zone
        if slot == zone:
            return SWITCH
        if zone < slot < release:
            return HOLD
        if slot == release:
            return RELEASE
        return RELAX

    def schedule(self, slots: int | None = None) -> list[list[str]]:
        """Phase names per slot (rows) and zone (columns)."""
        slots = slots or self.slots_per_cycle
        return [[PHASES[self.phase(z, s)] for z in range(N_ZONES)] for s in range(slots)]

    def slot_position(self, sample: int) -> tuple[int, float]:
        """Slot index and fractional progress through it for a sample."""
        pos = (sample + 0.5) * self.slots_per_cycle / self.samples_per_cycle
        slot = int(pos)
        return slot, pos - slot

    def gammas(self, n_samples: int, config: SimConfig) -> np.ndarray:
        """Tunnelling energy per sample and zone, shape (n_samples, 4)."""
        lo, hi = config.clock_low_J, config.clock_high_J
        mid, half = (hi + lo) / 2, (hi - lo) / 2
        amp = config.clock_amplitude_factor
        out = np.empty((n_samples, N_ZONES))
        for s in range(n_samples):
            slot, frac = self.slot_position(s)
            ramp = math.cos(math.pi * frac)
            for z in range(N_ZONES):
                ph = self.phase(z, slot)
                if ph == SWITCH:
                    g = mid + amp * half * ramp
                elif ph == HOLD:
                    g = lo
                elif ph == RELEASE:
                    g = mid - amp * half * ramp
                else:
                    g = hi
                out[s, z] = min(hi, max(lo, g))
        return out


# ---------------------------------------------------------------- the engine

@numba.njit(cache=True)
def _relax(pol, free, zone, indptr, indices, energies, gam, tol, max_iter,
           rec_idx, rec_out, converged, drive_idx, drive_val):
    n_samples = gam.shape[0]
    n_drive = drive_idx.shape[0]
    for s in range(n_samples):
        for k in range(n_drive):
            pol[drive_idx[k]] = drive_val[s, k]
        ok = False
        for it in range(max_iter):
            worst = 0.0
            for i in free:
                acc = 0.0
                for p in range(indptr[i], indptr[i + 1]):
                    acc += energies[p] * pol[indices[p]]
                x = acc / (2.0 * gam[s, zone[i]])
                new = x / math.sqrt(1.0 + x * x)
                delta = abs(new - pol[i])
                if delta > worst:
                    worst = delta
                pol[i] = new
            if worst < tol:
                ok = True
                break
        converged[s] = ok
        for k in range(rec_idx.shape[0]):
            rec_out[s, k] = pol[rec_idx[k]]


@dataclass
class SimTrace:
    labels: tuple[str, ...]
    polarization: np.ndarray  # (samples, labels)
    clock: np.ndarray  # (samples, 4)
    vector_index: np.ndarray  # (samples,)
    vectors: np.ndarray  # (n_vectors, n_inputs)
    input_names: tuple[str, ...]
    program: ClockProgram
    cycles_per_vector: int
    converged: np.ndarray  # (samples,)
    free_labels: tuple[str, ...] = field(default=())

    def __len__(self):
        return self.polarization.shape[0]

    def series(self, label: str) -> np.ndarray:
        return self.polarization[:, self.labels.index(label)]

    def to_csv(self, path) -> None:
        header = ["sample"] + [f"clock{z}" for z in range(N_ZONES)] + list(self.labels)
        with open(path, "w", encoding="utf-8") as fh:
            fh.write(",".join(header) + "\n")
            for s in range(len(self)):
                vals = [str(s)] + [f"{g:.6e}" for g in self.clock[s]]
                vals += [f"{p:.6f}" for p in self.polarization[s]]
                fh.write(",".join(vals) + "\n")


def exhaustive_vectors(n_inputs: int) -> np.ndarray:
    return np.array([int_to_bits(i, n_inputs) for i in range(1 << n_inputs)], dtype=np.uint8).reshape(
        1 << n_inputs, n_inputs
    )


def _max_latency(layout: Layout) -> int:
    lat = output_latencies(layout)
    return max(lat.values()) if lat else 0


def simulate(
    layout: Layout,
    vectors,
    config: SimConfig = SimConfig(),
    clock: ClockScheme | str = ClockScheme.LANDAUER,
    input_names=None,
    cycles_per_vector: int | None = None,
    record_all: bool = False,
) -> SimTrace:
    """Drive ``vectors`` (rows of bits, columns in ``input_names`` order)
    through the layout, one clock cycle per vector or more for deep
    pipelines. All ``config.samples`` samples are simulated."""
    cells = layout.cells
    inputs = layout.pads()
    names = tuple(input_names) if input_names is not None else tuple(inputs)
    missing = set(inputs) - set(names)
    if missing:
        raise LayoutError(f"no values supplied for inputs {sorted(missing)}")
    unknown = set(names) - set(inputs)
    if unknown:
        raise LayoutError(f"layout has no input cells {sorted(unknown)}")
    vecs = np.asarray(vectors, dtype=np.uint8).reshape(-1, len(names))
    scheme = ClockScheme(clock)
    latency = _max_latency(layout)
    if cycles_per_vector is None:
        cycles_per_vector = 1 + latency // 4
    if scheme is ClockScheme.BENNETT and latency > N_ZONES - 1:
        raise LayoutError("Bennett clocking covers at most four zones of latency")
    n_vec = len(vecs)
    if scheme is ClockScheme.LANDAUER:
        quarters = 4 * (n_vec - 1) * cycles_per_vector + latency + 2
        total_cycles = -(-quarters // 4)
    else:
        total_cycles = n_vec * cycles_per_vector
    spc = config.samples // total_cycles
    program = ClockProgram(scheme, spc)
    n_samples = config.samples

    gam = program.gammas(n_samples, config)
    cycle = np.arange(n_samples) // spc
    vidx = np.minimum(cycle // cycles_per_vector, n_vec - 1)

    indptr, indices, energies = coupling_matrix(layout, config)
    pol = np.zeros(len(cells))
    drive_idx, drive_cols = [], []
    for k, name in enumerate(names):
        level = np.where(vecs[vidx, k] == 1, 1.0, -1.0)
        for i in inputs[name]:
            drive_idx.append(i)
            drive_cols.append(level)
    for i, c in enumerate(cells):
        if c.kind is CellKind.FIXED:
            pol[i] = c.polarization
    drive_val = np.column_stack(drive_cols) if drive_cols else np.zeros((n_samples, 0))
    free = np.array([i for i, c in enumerate(cells) if c.kind in (CellKind.NORMAL, CellKind.OUTPUT)],
                    dtype=np.int64)
    zone = np.array([c.clock_zone for c in cells], dtype=np.int64)
    if record_all:
        rec = list(range(len(cells)))
        labels = tuple(c.label or f"#{i}" for i, c in enumerate(cells))
    else:
        rec = [i for i, c in enumerate(cells) if c.label is not None]
        labels = tuple(cells[i].label for i in rec)
    rec_idx = np.array(rec, dtype=np.int64)
    rec_out = np.zeros((n_samples, len(rec)))
    converged = np.zeros(n_samples, dtype=np.bool_)
    _relax(pol, free, zone, indptr, indices, energies, gam, config.convergence_tolerance,
           config.max_iterations_per_sample, rec_idx, rec_out, converged,
           np.array(drive_idx, dtype=np.int64), np.ascontiguousarray(drive_val))
    bad = int((~converged).sum())
    if bad:
        log.warning("%d of %d samples hit the iteration cap", bad, n_samples)
    free_labels = tuple(labels[k] for k, i in enumerate(rec) if cells[i].kind in (CellKind.NORMAL, CellKind.OUTPUT))
    return SimTrace(labels, rec_out, gam, vidx, vecs, names, program, cycles_per_vector, converged,
                    free_labels)


def decode_sample(trace: SimTrace, vector: int, latency: int) -> int:
    """Last sample of the Hold phase that carries ``vector`` at ``latency``."""
    prog = trace.program
    spc = prog.samples_per_cycle
    start = vector * trace.cycles_per_vector * spc
    if prog.scheme is ClockScheme.LANDAUER:
        end_slot = latency + 2
    else:
        end_slot = 2 * N_ZONES - latency
    return start + (end_slot * spc) // prog.slots_per_cycle - 1


@dataclass(frozen=True)
class DecodeResult:
    output_names: tuple[str, ...]
    bits: np.ndarray  # (n_vectors, outputs)
    levels: np.ndarray  # sampled polarizations
    weak: tuple[tuple[int, str], ...]  # (vector index, output label)


def decode_levels(trace: SimTrace, layout: Layout, latency_zones=None, outputs=None) -> DecodeResult:
    """Sample every output once per vector.

    ``latency_zones`` may be one number for all outputs, a per-label
    mapping, or None to use each output's own distance from the inputs.
    """
    names = tuple(outputs) if outputs is not None else layout.output_labels
    lat = output_latencies(layout)
    n_vec = len(trace.vectors)
    levels = np.zeros((n_vec, len(names)))
    for j, name in enumerate(names):
        if latency_zones is None:
            z = lat[name]
        elif isinstance(latency_zones, int):
            z = latency_zones
        else:
            z = latency_zones[name]
        col = trace.series(name)
        for v in range(n_vec):
            levels[v, j] = col[decode_sample(trace, v, z)]
    bits = (levels > 0).astype(np.uint8)
    weak = tuple(
        (int(v), names[j]) for v, j in zip(*np.nonzero(np.abs(levels) < WEAK_LEVEL))
    )
    return DecodeResult(names, bits, levels, weak)


def decode(trace: SimTrace, layout: Layout, latency_zones=None, outputs=None) -> TruthSpec:
    """Truth table read back from an exhaustive, in-order sweep."""
    res = decode_levels(trace, layout, latency_zones, outputs)
    n = len(trace.input_names)
    if not np.array_equal(trace.vectors, exhaustive_vectors(n)):
        raise ValueError("decode needs the exhaustive vector sweep in ascending order")
    for v, name in res.weak:
        log.warning("weak output %s on vector %d", name, v)
    return TruthSpec(trace.input_names, res.output_names, res.bits)


@dataclass(frozen=True)
class LayoutVerdict:
    passed: bool
    mismatches: tuple[int, ...]
    weak: tuple[tuple[int, str], ...]
    min_level: float

    def __bool__(self):
        return self.passed


def verify_vectors(
    layout: Layout,
    vectors,
    expected_rows,
    input_names,
    output_names,
    config: SimConfig = SimConfig(),
    clock: ClockScheme | str = ClockScheme.LANDAUER,
    allow_weak: bool = False,
    min_samples_per_cycle: int = 512,
    chunk: int | None = None,
) -> LayoutVerdict:
    """Simulate ``vectors`` in order and compare against ``expected_rows``.

    The sample budget grows when needed so every clock cycle still gets at
    least ``min_samples_per_cycle`` samples; coarser ramps let long
    single-zone wires re-grow from the previous vector's remnant
    polarization.  With ``chunk`` the vectors are simulated in independent
    runs of that many vectors, which bounds memory for long sampled sweeps.
    Mismatch indices refer to positions in ``vectors``.
    """
    ins, outs = set(layout.input_labels), set(layout.output_labels)
    if set(input_names) != ins:
        raise LayoutError(f"spec inputs {tuple(input_names)} != layout inputs {sorted(ins)}")
    if not set(output_names) <= outs:
        raise LayoutError(f"spec outputs {tuple(output_names)} missing from layout {sorted(outs)}")
    vecs = np.asarray(vectors, dtype=np.uint8).reshape(-1, len(input_names))
    expected_rows = np.asarray(expected_rows, dtype=np.uint8).reshape(len(vecs), len(output_names))
    latency = _max_latency(layout)
    scheme = ClockScheme(clock)
    cpv = 1 + latency // 4
    chunk = chunk or len(vecs)
    bits, levels, weak = [], [], []
    for lo in range(0, len(vecs), chunk):
        part = vecs[lo:lo + chunk]
        cycles = len(part) * cpv + (1 if scheme is ClockScheme.LANDAUER else 0)
        cfg = config
        if cfg.samples < cycles * min_samples_per_cycle:
            cfg = replace(cfg, samples=cycles * min_samples_per_cycle)
        trace = simulate(layout, part, cfg, clock, input_names)
        res = decode_levels(trace, layout, outputs=output_names)
        bits.append(res.bits)
        levels.append(res.levels)
        weak.extend((lo + v, name) for v, name in res.weak)
    bits, levels = np.concatenate(bits), np.concatenate(levels)
    wrong = set(np.flatnonzero((bits != expected_rows).any(axis=1)).tolist())
    if not allow_weak:
        wrong |= {v for v, _ in weak}
    signed = np.where(expected_rows == 1, levels, -levels)
    return LayoutVerdict(not wrong, tuple(sorted(wrong)), tuple(weak), float(signed.min()))


def verify_layout(
    layout: Layout,
    expected: TruthSpec,
    config: SimConfig = SimConfig(),
    clock: ClockScheme | str = ClockScheme.LANDAUER,
    allow_weak: bool = False,
) -> LayoutVerdict:
    """Simulate every input vector and compare against ``expected``.

    Outputs weaker than |P| = 0.5 count as failures unless ``allow_weak``.
    """
    return verify_vectors(layout, exhaustive_vectors(expected.n_inputs), expected.rows,
                          expected.input_names, expected.output_names, config, clock, allow_weak,
                          min_samples_per_cycle=1)


def bennett_schedule_ok(program: ClockProgram) -> bool:
    """Structural check: zones latch C0..C3 in order, all hold while the
    last computes, then release in reverse order."""
    sched = [[program.phase(z, s) for z in range(N_ZONES)] for s in range(program.slots_per_cycle)]
    switch_at = [next(s for s in range(len(sched)) if sched[s][z] == SWITCH) for z in range(N_ZONES)]
    release_at = [next(s for s in range(len(sched)) if sched[s][z] == RELEASE) for z in range(N_ZONES)]
    if switch_at != sorted(switch_at) or release_at != sorted(release_at, reverse=True):
        return False
    last = switch_at[-1]
    return all(sched[last][z] == HOLD for z in range(N_ZONES - 1)) and all(
        r > last for r in release_at
    )


def all_vectors(names) -> list[dict[str, int]]:
    return [dict(zip(names, bits)) for bits in itertools.product((0, 1), repeat=len(names))]
