from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, strategies as st

from symplex.angles import UnitAnglePoint
from symplex.core import diamond, generalized_eigenspace, rotation
from symplex.corpus import random_diagonalizable
from symplex.errors import UnsupportedInputError
from symplex.krein import krein_numbers, limit_epsilon, spectral_table, splitting_numbers
from symplex.paths import RotationProduct, connecting_path

ONE = UnitAnglePoint.one()
JORDAN = np.array([[1.0, 1.0], [0.0, 1.0]])


@pytest.mark.parametrize("q", [3, 4, 5])
def test_rotation_krein_pairs(q):
    w = UnitAnglePoint.exact(1, q)
    k = krein_numbers(rotation(w), w)
    assert (k.p_omega, k.q_omega) == (0, 1)
    k = krein_numbers(rotation(-w.radians), w)
    assert (k.p_omega, k.q_omega) == (1, 0)


def test_krein_counts_fill_eigenspace():
    M = diamond(rotation(Fraction(1, 3)), rotation(Fraction(-1, 3)), np.eye(2))
    for w in (ONE, UnitAnglePoint.exact(1, 3)):
        k = krein_numbers(M, w)
        assert k.dim == generalized_eigenspace(M, w).dim


def test_splitting_examples():
    assert splitting_numbers(np.eye(2), ONE).pair() == (1, 1)
    assert splitting_numbers(-np.eye(2), UnitAnglePoint.exact(1, 2)).pair() == (1, 1)
    assert splitting_numbers(np.diag([2.0, 0.5]), ONE).pair() == (0, 0)


def test_path_limit_on_circle():
    circle = RotationProduct([1], 2 * np.pi)
    assert splitting_numbers(circle.end, ONE, circle, "path-limit").pair() == (1, 1)
    assert splitting_numbers(circle.end, ONE, circle, "both").method == "both"


def test_non_semisimple_needs_path():
    with pytest.raises(UnsupportedInputError):
        splitting_numbers(JORDAN, ONE)



@pytest.mark.parametrize("shear, expected", [(1.0, (1, 1)), (-1.0, (0, 0))])
def test_shear_normal_forms(shear, expected):
    M = np.array([[1.0, shear], [0.0, 1.0]])
    s = splitting_numbers(M, ONE, connecting_path(M))
    assert s.method == "path-limit"
    assert s.pair() == expected


def test_path_must_end_at_matrix():
    with pytest.raises(ValueError):
        splitting_numbers(np.eye(2), ONE, RotationProduct([Fraction(1, 2)], 1.0))


def test_limit_epsilon_bounded_by_gap():
    M = diamond(rotation(Fraction(1, 12)), rotation(Fraction(1, 6)))
    assert limit_epsilon(M, UnitAnglePoint.exact(1, 12)) == pytest.approx(2 * np.pi / 12 / 8)


def test_spectral_table_rows():
    rows = spectral_table(diamond(rotation(Fraction(1, 4)), np.eye(2)))
    assert {r["omega"]["exact"][1] for r in rows} == {1, 4}
    for r in rows:
        assert r["pOmega"] + r["qOmega"] == r["multiplicity"]


@given(st.integers(0, 10_000), st.integers(1, 3))
def test_shortcut_equals_path_limit(seed, n):
    sample = random_diagonalizable(n, np.random.default_rng(seed))
    M = sample.matrix
    from symplex.core import unit_spectrum

    for w, _ in unit_spectrum(M):
        assert splitting_numbers(M, w, sample.path, "shortcut").pair() == \
            splitting_numbers(M, w, sample.path, "path-limit").pair()
