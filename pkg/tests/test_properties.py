import math

import numpy as np
from hypothesis import HealthCheck, given, settings
from hypothesis import strategies as st

from oracles import brute_kink_energy, dots, is_injective
from qca_forge import adder_lib as al
from qca_forge import logic_core as lc
from qca_forge import qca_sim as qs
from qca_forge import reversibilize as rv
from qca_forge.logic_core import NetworkBuilder, TruthSpec
from qca_forge.qca_layout import Cell, CellKind, Layout


@st.composite
def networks(draw):
    n_in = draw(st.integers(1, 5))
    g = NetworkBuilder("rand")
    pool = list(g.inputs(*(f"x{i}" for i in range(n_in))))
    for _ in range(draw(st.integers(0, 12))):
        op = draw(st.sampled_from(["maj3", "maj5", "not", "const"]))
        if op == "not":
            pool.append(g.not_(draw(st.sampled_from(pool))))
        elif op == "const":
            pool.append(g.const(draw(st.integers(0, 1))))
        else:
            k = 3 if op == "maj3" else 5
            pool.append(g.maj(*(draw(st.sampled_from(pool)) for _ in range(k))))
    for j in range(draw(st.integers(1, 3))):
        g.output(f"y{j}", draw(st.sampled_from(pool)))
    return g.build()


@st.composite
def specs(draw):
    n_in = draw(st.integers(1, 4))
    n_out = draw(st.integers(1, 3))
    bits = draw(st.lists(st.integers(0, 1), min_size=(1 << n_in) * n_out, max_size=(1 << n_in) * n_out))
    rows = np.array(bits, dtype=np.uint8).reshape(1 << n_in, n_out)
    return TruthSpec(tuple(f"i{k}" for k in range(n_in)), tuple(f"o{k}" for k in range(n_out)), rows)


@given(networks())
def test_batch_evaluation_agrees_with_single_rows(net):
    table = lc.evaluate_all(net)
    for i in range(len(table)):
        bits = tuple((i >> (net.n_inputs - 1 - k)) & 1 for k in range(net.n_inputs))
        assert tuple(table[i]) == lc.eval(net, bits)


@given(networks())
def test_network_json_round_trip(net):
    back = lc.MajNetwork.from_json(net.to_json())
    assert back == net


@given(specs())
def test_spec_json_round_trip(spec):
    assert TruthSpec.from_json(spec.to_json()) == spec


@given(specs(), st.sampled_from([rv.LOWEST, rv.HIGHEST]))
def test_reversibilize_gives_an_injective_table(spec, policy):
    res = rv.reversibilize(spec, policy)
    rows = res.augmented.rows.tolist()
    assert is_injective(rows)
    assert len(res.garbage_sources) >= rv.garbage_lower_bound(spec)
    # the original outputs are untouched and only input copies are appended
    assert np.array_equal(res.augmented.rows[:, : spec.n_outputs], spec.rows)
    for j, src in enumerate(res.garbage_sources):
        assert np.array_equal(res.augmented.rows[:, spec.n_outputs + j], spec.input_column(src))


coords = st.floats(-60.0, 60.0, allow_nan=False).map(lambda v: round(v, 3))


@settings(suppress_health_check=[HealthCheck.filter_too_much])
@given(coords, coords, st.sampled_from([0, 45]), st.sampled_from([0, 45]), st.integers(0, 1))
def test_kink_energy_is_symmetric_and_matches_coulomb(x, y, ra, rb, layer):
    a, b = Cell(0.0, 0.0, rotation=ra), Cell(x, y, layer=layer, rotation=rb)
    cfg = qs.SimConfig()
    if layer == 0 and math.hypot(x, y) < 1e-6:
        return
    e_ab, e_ba = qs.kink_energy(a, b, cfg), qs.kink_energy(b, a, cfg)
    assert math.isclose(e_ab, e_ba, rel_tol=1e-9, abs_tol=1e-30)
    dist = math.sqrt(x * x + y * y + (layer * cfg.layer_separation_nm) ** 2)
    if dist <= cfg.radius_of_effect_nm and dist > 5.0:
        za = dots(0.0, 0.0, 0.0, rotated=ra == 45)
        zb = dots(x, y, layer * cfg.layer_separation_nm, rotated=rb == 45)
        assert math.isclose(e_ab, brute_kink_energy(za, zb), rel_tol=1e-9, abs_tol=1e-30)


cells = st.builds(
    Cell,
    x=st.integers(-10, 10).map(lambda k: 20.0 * k),
    y=st.integers(-10, 10).map(lambda k: 20.0 * k),
    layer=st.integers(0, 2),
    clock_zone=st.integers(0, 3),
    kind=st.just(CellKind.NORMAL),
    rotation=st.sampled_from([0, 45]),
)


@given(st.lists(cells, min_size=1, max_size=12), st.text("abcxyz", min_size=1, max_size=6))
def test_layout_json_round_trip(cell_list, name):
    lay = Layout(tuple(cell_list), name=name, metadata={"k": 1})
    assert Layout.from_json(lay.to_json()) == lay


@settings(max_examples=25, deadline=None)
@given(st.integers(1, 6), st.data())
def test_ripple_networks_match_integer_arithmetic(width, data):
    sub = data.draw(st.booleans())
    kind = al.RippleKind.ADDER_SUBTRACTOR if sub else al.RippleKind.ADDER
    net = al.ripple(al.RippleConfig(width, kind))
    top = (1 << width) - 1
    a, b = data.draw(st.integers(0, top)), data.draw(st.integers(0, top))
    c = data.draw(st.integers(0, 1))
    sel = data.draw(st.integers(0, 1)) if sub else 0
    bits = [(a >> k) & 1 for k in reversed(range(width))] + [(b >> k) & 1 for k in reversed(range(width))] + [c]
    if sub:
        bits.append(sel)
    out = lc.eval(net, tuple(bits))
    value = sum(bit << k for k, bit in enumerate(reversed(out[:width])))
    assert (value, out[width]) == al.arithmetic_oracle(a, b, c, sel, width)
