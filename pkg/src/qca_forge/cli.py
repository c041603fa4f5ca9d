"""``qca-forge`` command-line front end.

Each subcommand reads and writes plain UTF-8 JSON/CSV files so the stages
can be chained by hand or all at once with ``pipeline``.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import logging
import sys
from dataclasses import asdict, dataclass
from pathlib import Path

import numpy as np

from . import __version__
from . import adder_lib as al
from . import fault_lab as fl
from . import logic_core as lc
from . import qca_layout as ql
from . import qca_sim as qs
from . import reversibilize as rv

log = logging.getLogger("qca_forge")

DEFAULT_SEED = 2024
DEFAULT_VECTORS = 1000
EXHAUSTIVE_LIMIT = 10  # layouts with more inputs are simulated on a random sample

CIRCUIT_CHOICES = ("fa", "fas", "fa5", "ripple8", "ripple8-sub", "ripple8_sub")
PRIMITIVES = {
    "maj3": lambda: ql.gen_maj3(),
    "maj5": lambda: ql.gen_maj5(),
    "and3": lambda: ql.gen_and3(),
    "inverter": lambda: ql.gen_inverter(),
}

# Published figures quoted next to computed ones; never compared for equality.
PUBLISHED_ROWS = {
    "fa": {"cell_count": 48, "area_um2": 0.04, "delay_zones": 3, "maj_count": 3, "not_count": 2,
           "garbage_outputs": 2, "constant_inputs": 0},
    "fas": {"cell_count": 48, "area_um2": 0.04, "delay_zones": 3, "maj_count": 3, "not_count": 2,
            "garbage_outputs": 2, "constant_inputs": 0},
    "fa5": {"cell_count": 58, "area_um2": 0.04, "delay_zones": 3, "maj_count": 2, "not_count": 2,
            "garbage_outputs": 2, "constant_inputs": 0},
    "ripple8": {"cell_count": 570, "area_um2": 0.55, "delay_zones": 32},
    "ripple8_sub": {"cell_count": 1040, "area_um2": 1.12, "delay_zones": 42},
}
COLUMNS = ("cell_count", "area_um2", "delay_zones", "maj_count", "not_count",
           "garbage_outputs", "constant_inputs")


class CliError(Exception):
    """A user-facing failure; printed without a traceback."""


class StageError(CliError):
    def __init__(self, stage: str, cause: BaseException):
        super().__init__(f"stage '{stage}' failed: {cause}")
        self.stage = stage


def _key(circuit: str) -> str:
    return circuit.replace("-", "_")


def _out_dir(path) -> Path:
    out = Path(path)
    out.mkdir(parents=True, exist_ok=True)
    return out


def _write_json(path: Path, data) -> None:
    path.write_text(json.dumps(data, indent=2) + "\n", encoding="utf-8")


def _load_spec(path) -> lc.TruthSpec:
    try:
        obj = lc.load_json(path)
    except FileNotFoundError:
        raise CliError(f"no such file: {path}") from None
    except (json.JSONDecodeError, KeyError, TypeError, ValueError) as exc:
        raise CliError(f"malformed spec file {path}: {exc}") from None
    return lc.to_truth_spec(obj) if isinstance(obj, lc.MajNetwork) else obj


def _load_layout(path) -> ql.Layout:
    try:
        return ql.Layout.load(path)
    except FileNotFoundError:
        raise CliError(f"no such file: {path}") from None
    except (json.JSONDecodeError, KeyError, TypeError, ValueError) as exc:
        raise CliError(f"malformed layout file {path}: {exc}") from None


def build_layout(name: str) -> ql.Layout:
    if name in PRIMITIVES:
        return PRIMITIVES[name]()
    return ql.gen_circuit(name)


def reference_spec(name: str) -> lc.TruthSpec:
    """Truth table a named layout should reproduce (circuits and gate primitives)."""
    key = _key(name)
    if key in al.CIRCUITS:
        return lc.to_truth_spec(al.circuit(key))
    if key == "maj3":
        return lc.TruthSpec.from_function(("A", "B", "C"), ("out",), lambda a, b, c: (int(a + b + c >= 2),))
    if key == "maj5":
        return lc.TruthSpec.from_function(("B", "A", "C", "D", "E"), ("out",), lambda *v: (int(sum(v) >= 3),))
    if key == "and3":
        return lc.TruthSpec.from_function(("B", "A", "C"), ("out",), lambda b, a, c: (a & b & c,))
    if key == "inverter":
        return lc.TruthSpec.from_function(("in",), ("out",), lambda a: (1 - a,))
    raise CliError(f"no reference truth table for {name!r}")


# ------------------------------------------------------------------ reports

@dataclass(frozen=True)
class ReportRow:
    design: str
    cell_count: int
    area_um2: float
    delay_zones: int
    maj_count: int
    not_count: int
    garbage_outputs: int
    constant_inputs: int
    published: dict | None = None

    def cells(self) -> list:
        row = [self.design] + [getattr(self, c) for c in COLUMNS]
        published = self.published or {}
        return row + [published.get(c, "") for c in COLUMNS]


def report_row(design: str) -> ReportRow:
    key = _key(design)
    if key not in al.CIRCUITS:
        raise CliError(f"unknown design {design!r}; choose from {', '.join(al.CIRCUITS)}")
    m = lc.metrics(al.circuit(key))
    lm = ql.layout_metrics(ql.gen_circuit(key))
    return ReportRow(key, lm.cell_count, round(lm.area_um2, 4), lm.delay_zones, m.majority_count,
                     m.not_count, m.garbage_output_count, m.constant_input_count, PUBLISHED_ROWS.get(key))


def report_table(rows: list[ReportRow]) -> tuple[str, str]:
    header = ["design", *COLUMNS, *(f"published_{c}" for c in COLUMNS)]
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for r in rows:
        w.writerow(r.cells())
    table = [header] + [[str(v) for v in r.cells()] for r in rows]
    widths = [max(len(row[i]) for row in table) for i in range(len(header))]
    text = "\n".join("  ".join(v.ljust(n) for v, n in zip(row, widths)).rstrip() for row in table)
    return text + "\n", buf.getvalue()


# ----------------------------------------------------------------- commands

def cmd_synth(args) -> int:
    net = al.circuit(_key(args.circuit), al.AdderForm(args.form) if args.form else None)
    if args.out:
        lc.save_json(net, args.out)
        log.info("wrote %s", args.out)
    else:
        print(json.dumps(net.to_json(), indent=2))
    return 0


def cmd_reversibilize(args) -> int:
    spec = _load_spec(args.spec)
    result = rv.reversibilize(spec, args.policy)
    out = _out_dir(args.out)
    stem = Path(args.spec).stem
    lc.save_json(result.augmented, out / f"{stem}.reversible.json")
    rv.write_step_log(result, spec, out / f"{stem}.steps.csv")
    print(f"{len(result.garbage_sources)} garbage column(s): {', '.join(result.garbage_names) or 'none'}")
    return 0


def cmd_layout(args) -> int:
    lay = build_layout(_key(args.circuit))
    ql.validate(lay)
    m = ql.layout_metrics(lay)
    if args.out:
        lay.save(args.out)
    print(json.dumps(asdict(m)))
    return 0


def _vectors(spec_inputs: int, count: int, seed: int) -> np.ndarray:
    if spec_inputs <= EXHAUSTIVE_LIMIT:
        return qs.exhaustive_vectors(spec_inputs)
    rng = np.random.default_rng(seed)
    return rng.integers(0, 2, (count, spec_inputs), dtype=np.uint8)


def _expected(spec: lc.TruthSpec, vecs: np.ndarray) -> np.ndarray:
    idx = vecs.astype(np.int64) @ (1 << np.arange(spec.n_inputs - 1, -1, -1))
    return spec.rows[idx]


def simulate_and_verify(lay: ql.Layout, spec: lc.TruthSpec, out: Path, clock: str,
                        vectors: int, seed: int, waveform_vectors: int = 16) -> dict:
    """Simulate ``lay`` against ``spec`` and write the waveform and verdict files."""
    vecs = _vectors(spec.n_inputs, vectors, seed)
    expected = _expected(spec, vecs)
    exhaustive = spec.n_inputs <= EXHAUSTIVE_LIMIT
    if exhaustive:
        verdict = qs.verify_layout(lay, spec, clock=clock)
    else:
        verdict = qs.verify_vectors(lay, vecs, expected, spec.input_names, spec.output_names,
                                    clock=clock, chunk=100)
    # the waveform covers the first vectors only; a 1000-vector trace would be huge
    head = vecs[:waveform_vectors]
    cfg = qs.SimConfig()
    cycles = len(head) * (1 + qs._max_latency(lay) // 4) + 1
    trace = qs.simulate(lay, head, qs.SimConfig(samples=max(cfg.samples, cycles * 512)), clock,
                        spec.input_names)
    trace.to_csv(out / "waveform.csv")
    decoded = qs.decode_levels(trace, lay, outputs=spec.output_names)
    summary = {
        "layout": lay.name,
        "clock": str(qs.ClockScheme(clock).value),
        "vectors": int(len(vecs)),
        "exhaustive": exhaustive,
        "seed": None if exhaustive else seed,
        "passed": bool(verdict.passed),
        "mismatches": [int(v) for v in verdict.mismatches],
        "weak": [[int(v), n] for v, n in verdict.weak],
        "min_level": verdict.min_level,
        "waveform_vectors": int(len(head)),
        "waveform_decodes_correctly": bool((decoded.bits == expected[:len(head)]).all()),
    }
    _write_json(out / "verdict.json", summary)
    return summary


def cmd_sim(args) -> int:
    lay = _load_layout(args.layout)
    spec = _load_spec(args.spec)
    summary = simulate_and_verify(lay, spec, _out_dir(args.out), args.clock, args.vectors, args.seed)
    print(f"{'PASS' if summary['passed'] else 'FAIL'} {summary['vectors']} vectors, "
          f"min level {summary['min_level']:.3f}")
    return 0 if summary["passed"] else 1


def cmd_fault_sweep(args) -> int:
    lay = _load_layout(args.layout)
    spec = _load_spec(args.spec) if args.spec else reference_spec(lay.metadata.get("circuit", lay.name))
    out = _out_dir(args.out)
    report = fl.sweep_cell(lay, args.cell, spec, args.dirs, args.step, args.max, clock=args.clock,
                           workers=args.workers)
    report.to_csv(out / f"fault_{args.cell}.csv")
    report.to_json(out / f"fault_{args.cell}.json")
    for d, r in report.results.items():
        tag = " (not possible)" if r.not_possible else ""
        print(f"{args.cell} {d.value}: max normal {r.max_normal_nm} nm{tag}")
    return 0


def cmd_report(args) -> int:
    targets = list(al.CIRCUITS) if args.targets == ["all"] else args.targets
    text, table_csv = report_table([report_row(t) for t in targets])
    print(text, end="")
    if args.out:
        out = _out_dir(args.out)
        (out / "report.csv").write_text(table_csv, encoding="utf-8")
    return 0


def _stage(name, fn, *a, **kw):
    try:
        return fn(*a, **kw)
    except CliError:
        raise
    except Exception as exc:
        raise StageError(name, exc) from exc


def cmd_pipeline(args) -> int:
    key = _key(args.circuit)
    out = _out_dir(args.out)
    net = _stage("synth", al.circuit, key, al.AdderForm(args.form) if args.form else None)
    lc.save_json(net, out / "net.json")
    spec = _stage("evaluate", lc.to_truth_spec, net)
    lc.save_json(spec, out / "spec.json")
    if key.startswith("ripple"):
        cfg = al.RippleConfig(8, al.RippleKind.ADDER_SUBTRACTOR if key.endswith("sub") else al.RippleKind.ADDER)
        oracle = _stage("oracle", al.ripple_oracle_rows, cfg)
        if not np.array_equal(spec.rows, oracle):
            raise StageError("oracle", ValueError("network disagrees with the integer oracle"))
    lay = _stage("layout", ql.gen_circuit, key)
    _stage("validate", ql.validate, lay)
    lay.save(out / "layout.json")
    summary = _stage("simulate", simulate_and_verify, lay, spec, out, args.clock, args.vectors, args.seed)
    _write_json(out / "metrics.json", asdict(report_row(key)))
    print(f"{key}: {'PASS' if summary['passed'] else 'FAIL'} over {summary['vectors']} vectors "
          f"({'exhaustive' if summary['exhaustive'] else f'seed {args.seed}'})")
    return 0 if summary["passed"] else 1


# ------------------------------------------------------------------- parser

def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="qca-forge", description=__doc__.splitlines()[0])
    p.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    p.add_argument("-v", "--verbose", action="store_true")
    sub = p.add_subparsers(dest="command", required=True)
    forms = [f.value for f in al.AdderForm]

    s = sub.add_parser("synth", help="build a majority network")
    s.add_argument("--circuit", required=True, choices=CIRCUIT_CHOICES)
    s.add_argument("--form", choices=forms)
    s.add_argument("--out", help="network JSON file (stdout if omitted)")
    s.set_defaults(func=cmd_synth)

    s = sub.add_parser("reversibilize", help="append garbage columns until the truth table is injective")
    s.add_argument("spec")
    s.add_argument("--policy", choices=(rv.LOWEST, rv.HIGHEST), default=rv.LOWEST)
    s.add_argument("--out", default=".")
    s.set_defaults(func=cmd_reversibilize)

    s = sub.add_parser("layout", help="generate a cell layout")
    s.add_argument("--circuit", required=True, choices=CIRCUIT_CHOICES + tuple(PRIMITIVES))
    s.add_argument("--out", help="layout JSON file")
    s.set_defaults(func=cmd_layout)

    s = sub.add_parser("sim", help="simulate a layout against a truth table")
    s.add_argument("--layout", required=True)
    s.add_argument("--spec", required=True)
    s.add_argument("--clock", choices=("landauer", "bennett"), default="landauer")
    s.add_argument("--vectors", type=int, default=DEFAULT_VECTORS)
    s.add_argument("--seed", type=int, default=DEFAULT_SEED)
    s.add_argument("--out", default=".")
    s.set_defaults(func=cmd_sim)

    s = sub.add_parser("fault-sweep", help="displace one cell and re-verify")
    s.add_argument("--layout", required=True)
    s.add_argument("--cell", required=True)
    s.add_argument("--spec")
    s.add_argument("--dirs", default="NSEW")
    s.add_argument("--step", type=float, default=1.0)
    s.add_argument("--max", type=float, default=20.0)
    s.add_argument("--clock", choices=("landauer", "bennett"), default="landauer")
    s.add_argument("--workers", type=int, default=1)
    s.add_argument("--out", default=".")
    s.set_defaults(func=cmd_fault_sweep)

    s = sub.add_parser("report", help="metric table with published figures alongside")
    s.add_argument("targets", nargs="*", help="design names, or 'all'")
    s.add_argument("--out")
    s.set_defaults(func=cmd_report)

    s = sub.add_parser("pipeline", help="synthesize, lay out, simulate and report one circuit")
    s.add_argument("circuit", choices=CIRCUIT_CHOICES)
    s.add_argument("--form", choices=forms)
    s.add_argument("--clock", choices=("landauer", "bennett"), default="landauer")
    s.add_argument("--vectors", type=int, default=DEFAULT_VECTORS)
    s.add_argument("--seed", type=int, default=DEFAULT_SEED)
    s.add_argument("--out", default="qca-out")
    s.set_defaults(func=cmd_pipeline)
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(message)s")
    try:
        return args.func(args)
    except (CliError, ql.LayoutError, lc.ArityError, lc.CapacityError, ValueError) as exc:
        print(f"qca-forge: error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
