import csv
import math

import numpy as np
import pytest

from oracles import colliding_classes, is_injective
from qca_forge import reversibilize as rv
from qca_forge.adder_lib import reversible_adder_subtractor_table, reversible_adder_table
from qca_forge.logic_core import TruthSpec

# (Cout, Sum) of the full adder, written out row by row
ADDER_MAIN = ["00", "01", "01", "10", "01", "10", "10", "11"]
# (Cout, Sum/Sub, Bout) of the adder/subtractor
ADDSUB_MAIN = ["000", "011", "011", "101", "010", "100", "100", "111"]


def _spec(rows, outputs):
    arr = np.array([[int(ch) for ch in r] for r in rows], dtype=np.uint8)
    return TruthSpec(("a", "b", "c_in"), outputs, arr)


@pytest.fixture
def adder():
    return _spec(ADDER_MAIN, ("Cout", "Sum"))


@pytest.fixture
def addsub():
    return _spec(ADDSUB_MAIN, ("Cout", "Sum/Sub", "Bout"))


def test_hand_written_rows_match_library_tables(adder, addsub):
    assert reversible_adder_table().select(("Cout", "Sum")) == adder
    assert reversible_adder_subtractor_table().select(("Cout", "Sum/Sub", "Bout")) == addsub


def test_collision_classes_match_brute_force(adder):
    rep = rv.collision_report(adder)
    assert list(rep.classes) == colliding_classes(adder.rows.tolist())
    assert rep.classes == ((1, 2, 4), (3, 5, 6))
    assert rep.colliding_pair_count == 6
    assert rep.max_class_size == 3


def test_adder_needs_two_garbage_columns(adder):
    res = rv.reversibilize(adder)
    assert len(res.garbage_sources) == 2 == rv.garbage_lower_bound(adder) == math.ceil(math.log2(3))
    assert is_injective(res.augmented.rows.tolist())
    assert res.garbage_names == ("Gar1", "Gar2")
    # lowest-index tie-break: a first, then b resolves everything
    assert res.garbage_sources == (0, 1)
    assert res.step_pair_counts == (2, 0)


def test_highest_policy_prefers_later_columns(adder, addsub):
    res = rv.reversibilize(adder, rv.HIGHEST)
    assert res.garbage_sources == (2, 1)
    assert is_injective(res.augmented.rows.tolist())
    # the hand-built adder/subtractor keeps c_in; only the highest policy lands there
    assert rv.reversibilize(addsub, rv.HIGHEST).garbage_sources == (2,)


def test_adder_subtractor_needs_one_column(addsub):
    res = rv.reversibilize(addsub)
    assert len(res.garbage_sources) == 1 == rv.garbage_lower_bound(addsub)
    assert is_injective(res.augmented.rows.tolist())


def test_copying_a_cannot_make_the_adder_subtractor_reversible(addsub):
    """a is constant across the colliding pairs 001/010 and 101/110."""
    with_a = addsub.with_columns(("Gar",), (addsub.input_column(0),))
    assert not rv.is_reversible(with_a)
    with_c = addsub.with_columns(("Gar",), (addsub.input_column(2),))
    assert rv.is_reversible(with_c)


def test_injective_spec_is_left_alone():
    ident = TruthSpec.from_function(("x", "y"), ("x", "y"), lambda x, y: (x, y))
    res = rv.reversibilize(ident)
    assert res.augmented is ident
    assert res.garbage_sources == () and res.step_pair_counts == ()
    assert res.garbage_names == ()


def test_and2_needs_two_columns():
    and2 = TruthSpec.from_function(("x", "y"), ("z",), lambda x, y: (x & y,))
    # brute force: rows 00, 01, 10 all map to 0
    assert colliding_classes(and2.rows.tolist()) == [(0, 1, 2)]
    res = rv.reversibilize(and2)
    assert len(res.garbage_sources) == 2
    assert is_injective(res.augmented.rows.tolist())


def test_constant_function_copies_every_input():
    const = TruthSpec(("p", "q", "r"), ("k",), np.zeros((8, 1), dtype=np.uint8))
    res = rv.reversibilize(const)
    assert sorted(res.garbage_sources) == [0, 1, 2]
    assert rv.garbage_lower_bound(const) == 3


def test_garbage_names_avoid_existing_names():
    spec = TruthSpec(("Gar1",), ("Gar2",), np.array([[0], [0]]))
    res = rv.reversibilize(spec)
    assert res.garbage_names == ("Gar1_",)


def test_unknown_policy_is_rejected(adder):
    with pytest.raises(ValueError):
        rv.reversibilize(adder, "random")


def test_step_log(tmp_path, adder):
    res = rv.reversibilize(adder)
    path = tmp_path / "log.csv"
    rv.write_step_log(res, adder, path)
    rows = list(csv.reader(path.open()))
    assert rows[0] == ["step", "column", "input", "garbage_output", "remaining_pairs"]
    assert rows[1:] == [["1", "0", "a", "Gar1", "2"], ["2", "1", "b", "Gar2", "0"]]
