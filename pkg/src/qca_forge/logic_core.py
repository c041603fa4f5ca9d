"""Majority/NOT networks: construction, evaluation, equivalence and metrics.

Inputs are ordered MSB-first: row ``i`` of a truth table is the assignment
whose bits, read left to right in declaration order, spell ``i`` in binary.
"""
from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Sequence, Union

import numpy as np

MAX_INPUTS = 24

INPUT, CONST, NOT, MAJ3, MAJ5 = "input", "const", "not", "maj3", "maj5"
_ARITY = {NOT: 1, MAJ3: 3, MAJ5: 5}


class ArityError(ValueError):
    """Input or output counts do not line up."""


class CapacityError(ValueError):
    """Too many inputs for an exhaustive table."""


@dataclass(frozen=True)
class Node:
    op: str
    args: tuple[int, ...] = ()
    # input index for INPUT nodes, bit value for CONST nodes
    value: int = 0


def _freeze(rows: np.ndarray) -> np.ndarray:
    rows = np.ascontiguousarray(rows, dtype=np.uint8)
    rows.setflags(write=False)
    return rows


@dataclass(frozen=True, eq=False)
class TruthSpec:
    input_names: tuple[str, ...]
    output_names: tuple[str, ...]
    rows: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "input_names", tuple(self.input_names))
        object.__setattr__(self, "output_names", tuple(self.output_names))
        n = len(self.input_names)
        if n > MAX_INPUTS:
            raise CapacityError(f"{n} inputs exceeds the limit of {MAX_INPUTS}")
        rows = np.asarray(self.rows, dtype=np.uint8)
        if rows.ndim == 1:
            rows = rows.reshape(-1, 1)
        if rows.shape != (1 << n, len(self.output_names)):
            raise ArityError(
                f"rows have shape {rows.shape}, expected {(1 << n, len(self.output_names))}"
            )
        if rows.size and rows.max() > 1:
            raise ValueError("rows must hold 0/1 values")
        object.__setattr__(self, "rows", _freeze(rows))

    @property
    def n_inputs(self) -> int:
        return len(self.input_names)

    @property
    def n_outputs(self) -> int:
        return len(self.output_names)

    def column(self, name: str) -> np.ndarray:
        return self.rows[:, self.output_names.index(name)]

    def select(self, names: Sequence[str]) -> "TruthSpec":
        idx = [self.output_names.index(n) for n in names]
        return TruthSpec(self.input_names, tuple(names), self.rows[:, idx])

    def input_column(self, index: int) -> np.ndarray:
        n = self.n_inputs
        return ((np.arange(1 << n) >> (n - 1 - index)) & 1).astype(np.uint8)

    def with_columns(self, names: Sequence[str], columns: Sequence[np.ndarray]) -> "TruthSpec":
        if not names:
            return self
        extra = np.column_stack([np.asarray(c, dtype=np.uint8) for c in columns])
        return TruthSpec(
            self.input_names, self.output_names + tuple(names), np.hstack([self.rows, extra])
        )

    def __eq__(self, other):
        if not isinstance(other, TruthSpec):
            return NotImplemented
        return (
            self.input_names == other.input_names
            and self.output_names == other.output_names
            and np.array_equal(self.rows, other.rows)
        )

    def __hash__(self):
        return hash((self.input_names, self.output_names, self.rows.tobytes()))

    @classmethod
    def from_function(cls, input_names, output_names, fn) -> "TruthSpec":
        """Tabulate ``fn(*bits) -> tuple of bits`` over every assignment."""
        n = len(input_names)
        rows = [fn(*int_to_bits(i, n)) for i in range(1 << n)]
        return cls(input_names, output_names, np.array(rows, dtype=np.uint8).reshape(1 << n, -1))

    def to_json(self) -> dict:
        return {
            "inputs": list(self.input_names),
            "outputs": list(self.output_names),
            "rows": ["".join(str(int(b)) for b in row) for row in self.rows],
        }

    @classmethod
    def from_json(cls, data: dict) -> "TruthSpec":
        rows = [[int(ch) for ch in r] for r in data["rows"]]
        n_out = len(data["outputs"])
        arr = np.array(rows, dtype=np.uint8).reshape(len(rows), n_out)
        return cls(data["inputs"], data["outputs"], arr)


def int_to_bits(value: int, width: int) -> tuple[int, ...]:
    return tuple((value >> (width - 1 - k)) & 1 for k in range(width))


def bits_to_int(bits: Iterable[int]) -> int:
    out = 0
    for b in bits:
        out = (out << 1) | int(b)
    return out


@dataclass(frozen=True)
class MajNetwork:
    input_names: tuple[str, ...]
    nodes: tuple[Node, ...]
    outputs: tuple[tuple[str, int], ...]
    main_output_count: int
    name: str = ""

    def __post_init__(self):
        if not self.input_names:
            raise ValueError("network needs at least one input")
        for i, node in enumerate(self.nodes):
            if node.op == INPUT:
                if not 0 <= node.value < len(self.input_names):
                    raise ValueError(f"node {i}: input index {node.value} out of range")
            elif node.op == CONST:
                if node.value not in (0, 1):
                    raise ValueError(f"node {i}: constant must be 0 or 1")
            elif node.op in _ARITY:
                if len(node.args) != _ARITY[node.op]:
                    raise ValueError(f"node {i}: {node.op} takes {_ARITY[node.op]} operands")
                if any(not 0 <= a < i for a in node.args):
                    raise ValueError(f"node {i}: operands must refer to earlier nodes")
            else:
                raise ValueError(f"node {i}: unknown op {node.op!r}")
        for name, ref in self.outputs:
            if not 0 <= ref < len(self.nodes):
                raise ValueError(f"output {name!r} refers to missing node {ref}")
        if not 0 <= self.main_output_count <= len(self.outputs):
            raise ValueError("main_output_count out of range")

    @property
    def n_inputs(self) -> int:
        return len(self.input_names)

    @property
    def output_names(self) -> tuple[str, ...]:
        return tuple(name for name, _ in self.outputs)

    def to_json(self) -> dict:
        nodes = []
        for node in self.nodes:
            if node.op == INPUT:
                nodes.append({"op": INPUT, "index": node.value})
            elif node.op == CONST:
                nodes.append({"op": CONST, "value": node.value})
            else:
                nodes.append({"op": node.op, "args": list(node.args)})
        return {
            "name": self.name,
            "inputs": list(self.input_names),
            "nodes": nodes,
            "outputs": [{"name": n, "node": r} for n, r in self.outputs],
            "main_outputs": self.main_output_count,
        }

    @classmethod
    def from_json(cls, data: dict) -> "MajNetwork":
        nodes = []
        for entry in data["nodes"]:
            op = entry["op"]
            if op == INPUT:
                nodes.append(Node(INPUT, (), int(entry["index"])))
            elif op == CONST:
                nodes.append(Node(CONST, (), int(entry["value"])))
            else:
                nodes.append(Node(op, tuple(int(a) for a in entry["args"])))
        outputs = tuple((o["name"], int(o["node"])) for o in data["outputs"])
        return cls(
            tuple(data["inputs"]),
            tuple(nodes),
            outputs,
            int(data.get("main_outputs", len(outputs))),
            data.get("name", ""),
        )


class NetworkBuilder:
    """Incremental constructor for :class:`MajNetwork`.

    Structurally identical nodes are shared, so a NOT reused by several
    gates exists once, and ``not_(not_(x))`` returns ``x``.
    """

    def __init__(self, name: str = ""):
        self.name = name
        self._inputs: list[str] = []
        self._nodes: list[Node] = []
        self._index: dict[Node, int] = {}
        self._outputs: list[tuple[str, int]] = []
        self._garbage: list[tuple[str, int]] = []

    def _add(self, node: Node) -> int:
        ref = self._index.get(node)
        if ref is None:
            ref = len(self._nodes)
            self._nodes.append(node)
            self._index[node] = ref
        return ref

    def input(self, name: str) -> int:
        if name in self._inputs:
            raise ValueError(f"duplicate input {name!r}")
        self._inputs.append(name)
        return self._add(Node(INPUT, (), len(self._inputs) - 1))

    def inputs(self, *names: str) -> list[int]:
        return [self.input(n) for n in names]

    def const(self, bit: int) -> int:
        return self._add(Node(CONST, (), int(bit)))

    def not_(self, ref: int) -> int:
        node = self._nodes[ref]
        if node.op == NOT:
            return node.args[0]
        return self._add(Node(NOT, (ref,)))

    def maj(self, *refs: int) -> int:
        if len(refs) == 3:
            return self._add(Node(MAJ3, tuple(refs)))
        if len(refs) == 5:
            return self._add(Node(MAJ5, tuple(refs)))
        raise ValueError("majority gates take 3 or 5 operands")

    def and_(self, x: int, y: int) -> int:
        return self.maj(x, y, self.const(0))

    def or_(self, x: int, y: int) -> int:
        return self.maj(x, y, self.const(1))

    def output(self, name: str, ref: int) -> None:
        self._outputs.append((name, ref))

    def garbage(self, name: str, ref: int) -> None:
        self._garbage.append((name, ref))

    def build(self) -> MajNetwork:
        outputs = tuple(self._outputs) + tuple(self._garbage)
        names = [n for n, _ in outputs]
        if len(set(names)) != len(names):
            raise ValueError("duplicate output names")
        return MajNetwork(
            tuple(self._inputs), tuple(self._nodes), outputs, len(self._outputs), self.name
        )


def _node_values(net: MajNetwork, inputs: Sequence) -> list:
    """Evaluate every node; works on ints or on numpy bit arrays alike."""
    vals: list = []
    for node in net.nodes:
        if node.op == INPUT:
            vals.append(inputs[node.value])
        elif node.op == CONST:
            vals.append(node.value)
        elif node.op == NOT:
            vals.append(1 - vals[node.args[0]])
        elif node.op == MAJ3:
            a, b, c = (vals[k] for k in node.args)
            vals.append((a & b) | (b & c) | (a & c))
        else:
            total = sum(vals[k] for k in node.args)
            vals.append((total >= 3) * 1)
    return vals


def eval(net: MajNetwork, assignment: Sequence[int]) -> tuple[int, ...]:  # noqa: A001
    if len(assignment) != net.n_inputs:
        raise ArityError(f"expected {net.n_inputs} input bits, got {len(assignment)}")
    vals = _node_values(net, [int(b) & 1 for b in assignment])
    return tuple(int(vals[ref]) for _, ref in net.outputs)


def evaluate_all(net: MajNetwork) -> np.ndarray:
    """Bit-parallel evaluation of every assignment; shape (2**n, outputs)."""
    n = net.n_inputs
    if n > MAX_INPUTS:
        raise CapacityError(f"{n} inputs exceeds the limit of {MAX_INPUTS}")
    idx = np.arange(1 << n, dtype=np.uint32)
    cols = [((idx >> (n - 1 - k)) & 1).astype(np.uint8) for k in range(n)]
    vals = _node_values(net, cols)
    out = np.empty((1 << n, len(net.outputs)), dtype=np.uint8)
    for j, (_, ref) in enumerate(net.outputs):
        out[:, j] = vals[ref]
    return out


def to_truth_spec(net: MajNetwork) -> TruthSpec:
    return TruthSpec(net.input_names, net.output_names, evaluate_all(net))


@dataclass(frozen=True)
class Verdict:
    equal: bool
    counterexample: int | None = None
    assignment: tuple[int, ...] | None = None
    lhs_row: tuple[int, ...] | None = None
    rhs_row: tuple[int, ...] | None = None

    def __bool__(self):
        return self.equal


def _as_spec(obj: Union[MajNetwork, TruthSpec]) -> TruthSpec:
    return obj if isinstance(obj, TruthSpec) else to_truth_spec(obj)


def equivalent(lhs: Union[MajNetwork, TruthSpec], rhs: Union[MajNetwork, TruthSpec]) -> Verdict:
    """Exhaustive comparison; reports the smallest disagreeing row."""
    if lhs.n_inputs != rhs.n_inputs:
        raise ArityError(f"input arity {lhs.n_inputs} != {rhs.n_inputs}")
    left, right = _as_spec(lhs), _as_spec(rhs)
    if left.n_outputs != right.n_outputs:
        raise ArityError(f"output arity {left.n_outputs} != {right.n_outputs}")
    diff = np.flatnonzero((left.rows != right.rows).any(axis=1))
    if diff.size == 0:
        return Verdict(True)
    i = int(diff[0])
    return Verdict(
        False,
        i,
        int_to_bits(i, left.n_inputs),
        tuple(int(b) for b in left.rows[i]),
        tuple(int(b) for b in right.rows[i]),
    )


@dataclass(frozen=True)
class NetworkMetrics:
    maj3_count: int = 0
    maj5_count: int = 0
    not_count: int = 0
    constant_input_count: int = 0
    garbage_output_count: int = 0
    logic_depth: int = 0

    @property
    def majority_count(self) -> int:
        return self.maj3_count + self.maj5_count


def metrics(net: MajNetwork) -> NetworkMetrics:
    """Structural counts over nodes reachable from the outputs."""
    live = set()
    stack = [ref for _, ref in net.outputs]
    while stack:
        ref = stack.pop()
        if ref in live:
            continue
        live.add(ref)
        stack.extend(net.nodes[ref].args)
    counts = {MAJ3: 0, MAJ5: 0, NOT: 0}
    depth = [0] * len(net.nodes)
    for i, node in enumerate(net.nodes):
        if node.args:
            depth[i] = 1 + max(depth[a] for a in node.args)
        if i in live and node.op in counts:
            counts[node.op] += 1
    # one per Const node, and only when it drives a gate operand
    consts_feeding_gates = sum(
        1
        for i, node in enumerate(net.nodes)
        if node.op == CONST
        and any(i in net.nodes[j].args for j in live if net.nodes[j].op in _ARITY)
    )
    return NetworkMetrics(
        maj3_count=counts[MAJ3],
        maj5_count=counts[MAJ5],
        not_count=counts[NOT],
        constant_input_count=consts_feeding_gates,
        garbage_output_count=len(net.outputs) - net.main_output_count,
        logic_depth=max((depth[ref] for _, ref in net.outputs), default=0),
    )


def load_json(path) -> Union[MajNetwork, TruthSpec]:
    data = json.loads(Path(path).read_text(encoding="utf-8"))
    if "nodes" in data:
        return MajNetwork.from_json(data)
    return TruthSpec.from_json(data)


def save_json(obj: Union[MajNetwork, TruthSpec], path) -> None:
    Path(path).write_text(json.dumps(obj.to_json(), indent=2) + "\n", encoding="utf-8")
