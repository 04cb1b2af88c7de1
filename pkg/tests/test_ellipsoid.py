from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, strategies as st

from symplex.angles import UnitAnglePoint
from symplex.core import SymmetryDescriptor
from symplex.ellipsoid import (
    COUNT_ASSUMPTION,
    EllipsoidSpec,
    end_to_end_verification,
    flow_residual,
    orbit_index,
    orbits,
    p_symmetry_check,
    symmetric_decomposition,
)
from symplex.iteration import bott_check, iterate_sym
from symplex.paths import is_close_path

ONE = UnitAnglePoint.one()
PAIR = EllipsoidSpec.parse("1,8/5")
FOUR = EllipsoidSpec.parse("1,8/5,9/4,49/12")


def test_spec_parsing_and_validation():
    assert PAIR.radii_squared == (Fraction(1), Fraction(8, 5))
    assert EllipsoidSpec.parse("1,1").has_equal_radii
    assert not PAIR.has_equal_radii
    with pytest.raises(ValueError):
        EllipsoidSpec.parse("1,-2")


def test_periods_and_speeds():
    round_pair = orbits(EllipsoidSpec.parse("1,1"))
    assert [o.period for o in round_pair] == pytest.approx([np.pi, np.pi])
    pair = orbits(PAIR)
    assert [o.period for o in pair] == pytest.approx([np.pi, 8 * np.pi / 5])
    assert pair[0].speeds == [2, Fraction(5, 4)]
    assert all(o.path.turns[o.plane] == 1 for o in pair)


@pytest.mark.parametrize("j", [0, 1])
def test_integrated_flow_matches_circle(j):
    assert flow_residual(PAIR, j) < 1e-8


def test_orbit_indices():
    rec = orbit_index(EllipsoidSpec.parse("1,1"), 0, 1, ONE)
    assert (rec.i_omega, rec.nu_omega) == (2, 4)
    rec = orbit_index(PAIR, 1, 1, ONE)
    assert (rec.i_omega, rec.nu_omega) == (4, 2)
    rec = orbit_index(PAIR, 0, 1, ONE)
    assert (rec.i_omega, rec.nu_omega) == (2, 2)


@pytest.mark.parametrize("j", range(4))
def test_orbit_iterates_gap_and_bott(j):
    for m in range(1, 7):
        here, nxt = orbit_index(FOUR, j, m, ONE), orbit_index(FOUR, j, m + 1, ONE)
        assert nxt.i_omega - here.i_omega >= 2
        assert here.nu_omega >= 2
        assert here.i_omega >= FOUR.n if m == 1 else True
        res = bott_check(orbits(FOUR)[j].path, np.eye(8), m, ONE, "index")
        assert res.equal and res.lhs - FOUR.n == here.i_omega


def test_half_turn_symmetry_on_circle():
    rep = p_symmetry_check(EllipsoidSpec.parse("1"), SymmetryDescriptor(1, 2, 1, 0))
    row = rep["orbits"][0]
    assert row["shift"] == pytest.approx(np.pi / 2)
    assert row["l"] == 1 and row["k"] == 2 and row["pathIdentity"]


def test_unit_shift_for_order_five():
    rep = p_symmetry_check(PAIR, SymmetryDescriptor(2, 5, 1, 0))
    assert rep["allUnitShift"]
    for row, orb in zip(rep["orbits"], orbits(PAIR)):
        assert row["shift"] == pytest.approx(orb.period / 5)
        assert row["orbitResidual"] < 1e-12 and row["pathIdentity"]


def test_shift_label_two_negative_control():
    rep = p_symmetry_check(PAIR, SymmetryDescriptor(2, 5, 2, 0))
    assert not rep["allUnitShift"]
    for row in rep["orbits"]:
        assert (row["l"], row["k"]) == (2, 5)
        assert row["pathIdentity"] and row["powerResidual"] < 1e-12


@pytest.mark.parametrize("m, k, s", [(3, 1, 2), (3, 1, 1), (5, 2, 3), (4, 1, 2), (6, 1, 0)])
def test_symmetric_decomposition_rebuilds_orbit(m, k, s):
    d = SymmetryDescriptor(4, m, k, s)
    for j, orb in enumerate(orbits(FOUR)):
        hat, Pr, order = symmetric_decomposition(FOUR, d, j)
        rebuilt = iterate_sym(hat, Pr, order, closed_form=False)
        assert is_close_path(rebuilt, orb.path) < 1e-9


def test_end_to_end_four_planes():
    rep = end_to_end_verification(FOUR, SymmetryDescriptor(4, 3, 1, 2))
    assert rep["count"] == 4 and rep["bound"] == 3
    assert rep["countNote"] == COUNT_ASSUMPTION
    assert rep["marginsOk"] and rep["ok"]
    assert {m["variant"] for m in rep["margins"]} == {"general", "tilde0"}


def test_end_to_end_small_cases():
    rep = end_to_end_verification(PAIR, SymmetryDescriptor(2, 5, 1, 0))
    assert (rep["count"], rep["bound"], rep["ok"]) == (2, 2, True)
    rep = end_to_end_verification(EllipsoidSpec.parse("1"), SymmetryDescriptor(1, 2, 1, 0))
    assert (rep["count"], rep["bound"], rep["ok"]) == (1, 1, True)
    even = [m for m in rep["margins"] if m["variant"] == "mEven"]
    assert even and even[0]["margin"] == "0"


def test_equal_radii_skip_count():
    rep = end_to_end_verification(EllipsoidSpec.parse("1,1"), SymmetryDescriptor(2, 3, 1, 0))
    assert rep["count"] is None and rep["countCheck"] is None
    assert "continuum" in rep["countNote"]


radii = st.lists(st.fractions(min_value=Fraction(1, 2), max_value=5, max_denominator=12), min_size=1, max_size=3)


@given(radii, st.integers(2, 7), st.data())
def test_margins_nonnegative_on_random_ellipsoids(r2, m, data):
    E = EllipsoidSpec(tuple(r2))
    n = E.n
    d = SymmetryDescriptor(n, m, data.draw(st.integers(1, m // 2)), data.draw(st.integers(0, n)))
    rep = end_to_end_verification(E, d)
    assert rep["marginsOk"]
