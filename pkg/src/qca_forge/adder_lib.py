"""Full-adder, adder/subtractor and ripple-chain networks in majority logic."""
from __future__ import annotations

import enum
from dataclasses import dataclass

import numpy as np

from .logic_core import MajNetwork, NetworkBuilder, TruthSpec


class AdderForm(str, enum.Enum):
    EQ6 = "eq6"
    EQ7A_PRINTED = "eq7a-printed"
    EQ7B = "eq7b"
    EQ8A_PRINTED = "eq8a-printed"
    EQ8B_PRINTED = "eq8b-printed"
    EQ8C_PRINTED = "eq8c-printed"
    EQ7A_CORRECTED = "eq7a-corrected"
    EQ8_CORRECTED = "eq8-corrected"
    MAJ5 = "maj5"

    @property
    def printed_typo(self) -> bool:
        """Forms kept verbatim although they do not compute a⊕b⊕c."""
        return self.value.endswith("-printed")


class RippleKind(str, enum.Enum):
    ADDER = "adder"
    ADDER_SUBTRACTOR = "adder-subtractor"


@dataclass(frozen=True)
class RippleConfig:
    width: int = 8
    kind: RippleKind = RippleKind.ADDER
    form: AdderForm = AdderForm.EQ6

    def __post_init__(self):
        if self.width < 1:
            raise ValueError("ripple width must be at least 1")
        if self.width > 16:
            raise ValueError("ripple width above 16 is outside the verified range")


def _sum(g: NetworkBuilder, form: AdderForm, a: int, b: int, c: int, cout: int) -> int:
    n = g.not_
    m = g.maj
    if form is AdderForm.EQ6:
        return m(n(cout), a, m(n(a), b, c))
    if form is AdderForm.EQ7A_PRINTED:
        return m(n(cout), b, m(a, n(b), n(c)))
    if form is AdderForm.EQ7A_CORRECTED:
        return m(n(cout), b, m(a, n(b), c))
    if form is AdderForm.EQ7B:
        return m(n(cout), c, m(a, b, n(c)))
    if form is AdderForm.EQ8A_PRINTED:
        return m(m(a, b, n(c)), m(a, n(b), n(c)), n(a))
    if form is AdderForm.EQ8B_PRINTED:
        return m(m(a, b, n(c)), m(n(a), b, n(c)), n(b))
    if form is AdderForm.EQ8C_PRINTED:
        return m(m(n(a), b, n(c)), m(a, n(b), n(c)), n(c))
    if form is AdderForm.EQ8_CORRECTED:
        return m(m(a, b, n(c)), m(a, n(b), c), n(a))
    if form is AdderForm.MAJ5:
        return m(n(cout), n(cout), a, b, c)
    raise ValueError(f"unknown form {form!r}")


def full_adder(form: AdderForm = AdderForm.EQ6, reversible: bool = True) -> MajNetwork:
    """Inputs (a, b, c_in); outputs (Cout, Sum) plus Gar1=a, Gar2=c_in."""
    form = AdderForm(form)
    g = NetworkBuilder(f"full-adder[{form.value}]")
    a, b, c = g.inputs("a", "b", "c_in")
    cout = g.maj(a, b, c)
    g.output("Cout", cout)
    g.output("Sum", _sum(g, form, a, b, c, cout))
    if reversible:
        g.garbage("Gar1", a)
        g.garbage("Gar2", c)
    return g.build()


def adder_subtractor(form: AdderForm = AdderForm.EQ6, reversible: bool = True) -> MajNetwork:
    """Outputs (Cout, Sum/Sub, Bout) plus Gar1=c_in.

    With the default form, Bout = M(a', b, c_in) is the same node the Sum
    construction already uses, so the borrow costs no extra gate.
    """
    form = AdderForm(form)
    g = NetworkBuilder(f"adder-subtractor[{form.value}]")
    a, b, c = g.inputs("a", "b", "c_in")
    cout = g.maj(a, b, c)
    total = _sum(g, form, a, b, c, cout)
    borrow = g.maj(g.not_(a), b, c)
    g.output("Cout", cout)
    g.output("Sum/Sub", total)
    g.output("Bout", borrow)
    if reversible:
        g.garbage("Gar1", c)
    return g.build()


def mux2(g: NetworkBuilder, sel: int, x: int, y: int) -> int:
    """sel'·x + sel·y as M(M(x, sel', 0), M(y, sel, 0), 1)."""
    zero = g.const(0)
    return g.maj(g.maj(x, g.not_(sel), zero), g.maj(y, sel, zero), g.const(1))


def mux2_network() -> MajNetwork:
    g = NetworkBuilder("mux2")
    sel, x, y = g.inputs("sel", "x", "y")
    g.output("out", mux2(g, sel, x, y))
    return g.build()


def ripple(config: RippleConfig = RippleConfig()) -> MajNetwork:
    """Ripple chain of ``width`` stages.

    Inputs are a[w-1..0], b[w-1..0], c0 and, for the adder/subtractor, sel.
    Outputs are s[w-1..0] followed by the chain output. With sel=1 the chain
    carries a borrow and the result is a - b - c0.
    """
    w = config.width
    sub = config.kind is RippleKind.ADDER_SUBTRACTOR
    g = NetworkBuilder(f"ripple{w}-{config.kind.value}")
    a = g.inputs(*(f"a{i}" for i in reversed(range(w))))[::-1]
    b = g.inputs(*(f"b{i}" for i in reversed(range(w))))[::-1]
    chain = g.input("c0")
    sel = g.input("sel") if sub else None
    sums = []
    for i in range(w):
        cout = g.maj(a[i], b[i], chain)
        sums.append(_sum(g, config.form, a[i], b[i], chain, cout))
        if sub:
            borrow = g.maj(g.not_(a[i]), b[i], chain)
            chain = mux2(g, sel, cout, borrow)
        else:
            chain = cout
    for i in reversed(range(w)):
        g.output(f"s{i}", sums[i])
    g.output("bout" if sub else "cout", chain)
    return g.build()


def arithmetic_oracle(a: int, b: int, chain_in: int, sel: int, width: int) -> tuple[int, int]:
    if not (0 <= a < 1 << width and 0 <= b < 1 << width):
        raise ValueError(f"operands must lie in [0, {1 << width})")
    if chain_in not in (0, 1) or sel not in (0, 1):
        raise ValueError("chain_in and sel are single bits")
    if sel:
        t = a - b - chain_in
        return t % (1 << width), int(t < 0)
    t = a + b + chain_in
    return t % (1 << width), t >> width


def ripple_oracle_rows(config: RippleConfig) -> np.ndarray:
    """Expected output rows of :func:`ripple`, computed with integers."""
    w = config.width
    sub = config.kind is RippleKind.ADDER_SUBTRACTOR
    n = 2 * w + 1 + int(sub)
    idx = np.arange(1 << n, dtype=np.int64)
    shift = n - 2 * w
    a = idx >> (shift + w)
    b = (idx >> shift) & ((1 << w) - 1)
    if sub:
        c = (idx >> 1) & 1
        s = idx & 1
        t = np.where(s == 1, a - b - c, a + b + c)
        chain = np.where(s == 1, t < 0, t >> w).astype(np.int64)
    else:
        c = idx & 1
        t = a + b + c
        chain = t >> w
    result = t % (1 << w)
    cols = [(result >> i) & 1 for i in reversed(range(w))] + [chain]
    return np.column_stack(cols).astype(np.uint8)


def reversible_adder_table() -> TruthSpec:
    """The reversible full-adder: Cout, Sum and garbage copies of a and c_in."""
    return TruthSpec.from_function(
        ("a", "b", "c_in"),
        ("Cout", "Sum", "Gar1", "Gar2"),
        lambda a, b, c: (int(a + b + c >= 2), a ^ b ^ c, a, c),
    )


def reversible_adder_subtractor_table() -> TruthSpec:
    return TruthSpec.from_function(
        ("a", "b", "c_in"),
        ("Cout", "Sum/Sub", "Bout", "Gar1"),
        lambda a, b, c: (int(a + b + c >= 2), a ^ b ^ c, int((1 - a) + b + c >= 2), c),
    )


CIRCUITS = ("fa", "fas", "fa5", "ripple8", "ripple8_sub")


def circuit(name: str, form: AdderForm | None = None) -> MajNetwork:
    key = name.replace("-", "_")
    if key == "fa":
        return full_adder(form or AdderForm.EQ6)
    if key == "fas":
        return adder_subtractor(form or AdderForm.EQ6)
    if key == "fa5":
        return full_adder(AdderForm.MAJ5)
    if key == "ripple8":
        return ripple(RippleConfig(8, RippleKind.ADDER, form or AdderForm.EQ6))
    if key == "ripple8_sub":
        return ripple(RippleConfig(8, RippleKind.ADDER_SUBTRACTOR, form or AdderForm.EQ6))
    raise ValueError(f"unknown circuit {name!r}; choose from {', '.join(CIRCUITS)}")
