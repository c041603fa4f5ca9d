"""Hand-placed cell layouts for the adder circuits.

Everything is drawn on the 20 nm grid with a small sketch helper that
places cells in grid units, offsets clock zones, and refuses to put two
cells on one site.  Each full-adder stage follows the same floor plan:

* ``a`` sits between the two input gates and feeds M1 directly, M2 through
  a fork-and-rejoin inverter, and the Sum gate through an eastbound wire;
* ``b`` runs down a short inner column to both input gates;
* the carry ``c`` enters from the north and wraps around the west side so
  a preceding stage can hand its carry over without a wire crossing;
* ``Cout`` is inverted by a second fork-and-rejoin before the Sum gate.

Clock zones: inputs and M1 in the stage's base zone, M2 and the inverted
carry one zone later, the Sum gate two zones later.  Every gate sees its
inputs through short live wires of similar length; a long wire feeding a
gate is clocked a zone early so that its value is already held.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .qca_layout import PITCH_NM, Cell, CellKind, Layout, LayoutError

I, O, N = CellKind.INPUT, CellKind.OUTPUT, CellKind.NORMAL


@dataclass
class Sketch:
    origin: tuple[int, int] = (0, 0)
    zone: int = 0
    cells: dict = field(default_factory=dict)

    def at(self, origin: tuple[int, int], zone: int) -> "Sketch":
        """A view that shares this sketch's cells but draws shifted."""
        return Sketch(origin, zone, self.cells)

    def put(self, x, y, z=0, kind=N, label=None, pol=None):
        gx, gy = x + self.origin[0], y + self.origin[1]
        if (gx, gy) in self.cells:
            raise LayoutError(f"site ({gx}, {gy}) used twice")
        self.cells[(gx, gy)] = Cell(gx * PITCH_NM, gy * PITCH_NM, 0, (self.zone + z) % 4,
                                    kind, pol, 0, label)

    def path(self, pts, zones):
        if isinstance(zones, int):
            zones = [zones] * len(pts)
        for (x, y), z in zip(pts, zones):
            self.put(x, y, z)

    def layout(self, name: str, **meta) -> Layout:
        return Layout(tuple(self.cells[k] for k in sorted(self.cells)), name, meta)


def _run(x0, y0, x1, y1):
    """Grid points from (x0, y0) to (x1, y1) inclusive along one axis."""
    if x0 == x1:
        step = 1 if y1 >= y0 else -1
        return [(x0, y) for y in range(y0, y1 + step, step)]
    if y0 == y1:
        step = 1 if x1 >= x0 else -1
        return [(x, y0) for x in range(x0, x1 + step, step)]
    raise LayoutError("runs must be axis-aligned")


def _zoned(pts, tail, z0=0):
    """Zone ``z0`` for the run, then ``z0 + 1`` for its last ``tail`` cells."""
    return [z0] * (len(pts) - tail) + [z0 + 1] * tail


def adder_stage(sk: Sketch, names: dict, carry_input: bool = True, garbage: tuple = (),
                borrow: str | None = None) -> None:
    """Draw one full-adder stage: Cout = M(a,b,c), Sum = M(Cout', a, M(a',b,c)).

    ``names`` maps the roles a, b, c, Cout, Sum to labels (a missing Cout
    means the carry cell stays unlabelled).  With ``carry_input`` the carry
    is an input cell at (4, 5); otherwise the caller routes a wire onto that
    site, clocked one zone before the stage.  ``garbage`` lists
    ``(label, role)`` taps for the reversible outputs, and ``borrow`` labels
    a tap on M(a',b,c).
    """
    p = sk.put
    p(4, 0, 0, I, names["a"])
    p(1, 2, 0, I, names["b"])
    if carry_input:
        p(4, 5, 0, I, names["c"])
    # M1 = M(a, b, c), fed by equally short wires
    sk.path([(4, 1), (4, 4), (4, 3), (2, 2), (3, 2), (4, 2)], 0)
    p(5, 2, 0, O if names.get("Cout") else N, names.get("Cout"))
    # a -> M2 through a southbound inverter
    sk.path([(4, -1), (3, -1), (5, -1), (3, -2), (5, -2)], 0)
    sk.path([(4, -3), (4, -4)], 1)
    # M2 = M(a', b, c)
    sk.path([(3, -5), (4, -5), (4, -6), (5, -5)], 1)
    col = _run(1, 1, 1, -5) + [(2, -5)]
    sk.path(col, _zoned(col, 2))
    # carry wrap: from the carry site west along y=5 (two pitches clear of
    # the b input), down the west side and back east under M2.  The carry
    # site itself is held (an input cell, or a link clocked a zone early),
    # so the long wrap always grows from a fully polarized source.
    head = _run(3, 5, -2, 5) + _run(-2, 4, -2, -7) + _run(-1, -7, 1, -7)
    sk.path(head, 0)
    sk.path(_run(2, -7, 4, -7), 1)
    # a eastward to the Sum gate
    sk.path([(5, 0), (6, 0), (6, -1), (6, -2), (7, -2), (8, -2), (9, -2)], [0, 0, 1, 1, 1, 2, 2])
    # Cout inverter
    sk.path([(6, 2), (7, 2), (7, 3), (7, 1), (8, 3), (8, 1)], 0)
    sk.path([(9, 2), (10, 2), (10, 1), (10, 0), (10, -1)], [1, 1, 1, 2, 2])
    # M2 output to the Sum gate
    sk.path(_run(6, -5, 9, -5) + [(10, -5), (10, -4), (10, -3)], [1, 1, 1, 1, 2, 2, 2])
    p(10, -2, 2)
    p(11, -2, 2, O, names["Sum"])
    taps = {"a": (3, 0, 0), "c": (5, 5, 0)}
    for label, role in garbage:
        x, y, z = taps[role]
        p(x, y, z, O, label)
    if borrow:
        p(6, -6, 1, O, borrow)


def full_adder_layout() -> Layout:
    sk = Sketch()
    adder_stage(sk, {"a": "a", "b": "b", "c": "c_in", "Cout": "Cout", "Sum": "Sum"},
                garbage=(("Gar1", "a"), ("Gar2", "c")))
    return sk.layout("fa", circuit="fa")


def adder_subtractor_layout() -> Layout:
    sk = Sketch()
    adder_stage(sk, {"a": "a", "b": "b", "c": "c_in", "Cout": "Cout", "Sum": "Sum/Sub"},
                garbage=(("Gar1", "c"),), borrow="Bout")
    return sk.layout("fas", circuit="fas")


STAGE_WIDTH = 18  # grid columns between stage origins; keeps wraps clear of the previous stage


def _carry_link(sk: Sketch, width: int = STAGE_WIDTH) -> None:
    """Carry from this stage's Cout inverter arm to the next stage's site.

    Leaves the arm end north, runs east above the next stage and drops onto
    its carry site.  The whole link is clocked one zone after this stage, so
    it is held while the next stage (two zones later) switches.
    """
    sk.path(_run(8, 4, 8, 7) + _run(9, 7, width + 4, 7) + _run(width + 4, 6, width + 4, 5), 1)


def ripple_adder_layout(width: int = 8) -> Layout:
    """Ripple-carry adder; stage i is clocked 2i zones after stage 0."""
    sk = Sketch()
    for i in range(width):
        st = sk.at((i * STAGE_WIDTH, 0), 2 * i)
        names = {"a": f"a{i}", "b": f"b{i}", "c": "c0", "Sum": f"s{i}"}
        if i == width - 1:
            names["Cout"] = "cout"
        adder_stage(st, names, carry_input=(i == 0))
        if i < width - 1:
            _carry_link(st)
    return sk.layout(f"ripple{width}", circuit=f"ripple{width}")


SUB_STAGE_WIDTH = 24  # the mux sits in the gap east of each stage


def _chain_mux(sk: Sketch, out_label: str | None) -> None:
    """Carry-or-borrow select east of an adder stage.

    chain = M(M(sel', Cout, 0), M(sel, Bout, 0), 1): both AND gates in the
    stage's zone 2, the OR gate in zone 3.  ``sel`` enters through two local
    pads, one of them behind a fork-and-rejoin inverter clocked a zone early.
    """
    p = sk.put
    F = CellKind.FIXED
    # Cout leaves the top of the Cout inverter's upper arm
    sk.path(_run(8, 4, 13, 4) + [(14, 4), (14, 3)], 1)
    # Bout leaves the M2 row southward and runs under the Sum gate
    sk.path([(8, -6)] + _run(8, -7, 16, -7), 1)
    # AND(sel', Cout); every input is held or fixed when the gate switches,
    # since a fixed cell beside the device outweighs any long live wire
    p(16, 8, 1, I, "sel")
    sk.path([(16, 7), (15, 7), (17, 7), (15, 6), (17, 6), (16, 5)], 1)
    sk.path([(15, 3), (16, 4), (16, 3), (16, 2), (16, 1)], 2)
    p(17, 3, 2, F, pol=-1.0)
    # AND(sel, Bout)
    sk.path([(16, -6), (16, -5), (16, -4), (16, -3)], 2)
    p(15, -5, 2, F, pol=-1.0)
    p(17, -5, 2, I, "sel")
    # OR of the two
    sk.path([(16, 0), (16, -2), (16, -1)], 3)
    p(15, -1, 3, F, pol=1.0)
    p(17, -1, 3, O if out_label else N, out_label)


def _sub_link(sk: Sketch, width: int) -> None:
    """From the mux output up the east side and onto the next carry site.

    Clocked one zone after the OR gate, so the gate drives only its own
    output cell, and one zone before the next stage, so that stage's carry
    site is held when its first gate switches.
    """
    pts = _run(18, -1, 19, -1) + _run(19, 0, 19, 10) + _run(20, 10, width + 4, 10) \
        + _run(width + 4, 9, width + 4, 5)
    sk.path(pts, 4)


def ripple_adder_subtractor_layout(width: int = 8) -> Layout:
    """Ripple adder/subtractor; stage i is clocked five zones after stage i-1."""
    sk = Sketch()
    for i in range(width):
        st = sk.at((i * SUB_STAGE_WIDTH, 0), 5 * i)
        adder_stage(st, {"a": f"a{i}", "b": f"b{i}", "c": "c0", "Sum": f"s{i}"},
                    carry_input=(i == 0))
        last = i == width - 1
        _chain_mux(st, "bout" if last else None)
        if not last:
            _sub_link(st, SUB_STAGE_WIDTH)
    return sk.layout(f"ripple{width}_sub", circuit=f"ripple{width}_sub")


def fa5_layout() -> Layout:
    """Full adder with Sum = Maj5(Cout', Cout', a, b, c).

    The five-input gate is a five-cell block.  Cout' touches it along a
    two-cell segment, which gives it the weight of two inputs, and a, b, c
    each arrive through a single port.  M1 sits south of the block, its
    output climbing through a fork-and-rejoin inverter into the double port;
    the three input trunks fan out next to M1 and wrap round to the gate.
    """
    sk = Sketch()
    p = sk.put
    # the gate switches two zones after M1 while its four port cells hold;
    # live port cells would let the block talk back into the weaker ports
    sk.path([(-1, 1), (0, 0), (0, 1), (1, 1), (2, 1)], 2)
    p(-1, 0, 2, O, "Sum")
    sk.path([(1, -1), (1, 0)], 1)
    sk.path([(-1, 2), (1, 2), (3, 1)], 1)
    # M1 = M(a, b, c) and its output
    sk.path([(0, -8), (2, -8), (1, -9), (1, -8)], 0)
    p(1, -7, 0, O, "Cout")
    # Cout inverter, northbound into the double port
    sk.path([(1, -6), (0, -6), (2, -6), (0, -5), (2, -5)], 0)
    sk.path([(1, -4), (1, -3), (1, -2)], 1)
    # input pads beside M1
    p(-1, -8, 0, I, "a")
    p(1, -10, 0, I, "b")
    p(3, -8, 0, I, "c_in")
    # a: up the west side, turning in below b's descent
    a = _run(-2, -8, -3, -8) + _run(-3, -7, -3, 3) + _run(-2, 3, -1, 3)
    sk.path(a, _zoned(a, 1))
    # b: round the outside of a, down onto the north port.  Its column keeps
    # three pitches from a's and switches a zone later, so it grows from the
    # held bottom row instead of copying its neighbour.
    sk.path(_run(1, -11, -6, -11), 0)
    sk.path(_run(-6, -10, -6, 7) + _run(-5, 7, 1, 7) + _run(1, 6, 1, 3), 1)
    # c: up the east side onto the east port
    c = _run(4, -8, 6, -8) + _run(6, -7, 6, 1) + _run(5, 1, 4, 1)
    sk.path(c, _zoned(c, 1))
    p(-3, -9, 0, O, "Gar1")
    p(7, -8, 0, O, "Gar2")
    return sk.layout("fa5", circuit="fa5")
