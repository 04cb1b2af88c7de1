from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, strategies as st

from symplex.angles import UnitAnglePoint
from symplex.core import SymmetryDescriptor, build_symmetry, matrix_power, random_symplectic, symplectic_inverse
from symplex.corpus import random_diagonalizable, random_rotation_product
from symplex.index import mean_index
from symplex.iteration import (
    IterationSpec,
    bott_check,
    bott_sweep,
    check_symmetric_identity,
    closure,
    iterate,
    iterate_sym,
)
from symplex.jump import index_profile
from symplex.paths import RotationProduct, is_close_path

ONE = UnitAnglePoint.one()
CIRCLE = RotationProduct([1], 2 * np.pi)
HALF = RotationProduct([Fraction(1, 2)], np.pi)


def test_iteration_spec_validation():
    with pytest.raises(ValueError):
        IterationSpec(np.eye(2), 0)
    with pytest.raises(ValueError):
        IterationSpec(np.eye(2), 4, 2, 4)


def test_iterate_basics(rng):
    assert iterate(CIRCLE, 1) is CIRCLE
    assert is_close_path(iterate(CIRCLE, 2, closed_form=False), RotationProduct([2], 4 * np.pi)) < 1e-9
    gen = random_diagonalizable(2, rng).path
    assert np.allclose(iterate(gen, 3).end, matrix_power(gen.end, 3), atol=1e-8)


def test_iterate_joints_are_continuous(rng):
    gen = random_diagonalizable(2, rng).path
    it = iterate(gen, 3)
    for j in (1, 2):
        t = j * gen.tau
        assert np.allclose(it.parts[j - 1].end, it.parts[j].evaluate(0.0), atol=1e-9)
        assert np.allclose(it.evaluate(t), matrix_power(gen.end, j), atol=1e-9)


def test_iterate_sym_reduces_to_iterate(rng):
    gen = random_diagonalizable(2, rng).path
    for m in range(1, 5):
        assert is_close_path(iterate_sym(gen, np.eye(4), m), iterate(gen, m)) < 1e-9


def test_half_circle_under_minus_identity():
    full = iterate_sym(HALF, -np.eye(2), 2, closed_form=False)
    assert is_close_path(full, RotationProduct([1], 2 * np.pi)) < 1e-9


@given(st.integers(0, 10_000), st.integers(1, 4))
def test_iterate_sym_endpoint(seed, m):
    rng = np.random.default_rng(seed)
    gen = random_diagonalizable(2, rng).path
    P = random_symplectic(2, rng, 0.3)
    it = iterate_sym(gen, P, m)
    want = matrix_power(symplectic_inverse(P), m) @ matrix_power(P @ gen.end, m)
    assert np.allclose(it.end, want, atol=1e-8)


@given(st.integers(0, 10_000), st.integers(2, 5))
def test_symmetric_identity_holds_by_construction(seed, m):
    rng = np.random.default_rng(seed)
    gen = random_diagonalizable(2, rng).path
    P = random_symplectic(2, rng, 0.3)
    ok, residual = check_symmetric_identity(iterate_sym(gen, P, m), P, 1, m)
    assert ok, residual


def test_symmetric_identity_negative_control(rng):
    gen = random_diagonalizable(2, rng, conjugate_scale=0.5).path
    P = build_symmetry(SymmetryDescriptor(2, 3, 1, 1))
    ok, residual = check_symmetric_identity(iterate(gen, 3), P, 1, 3)
    assert not ok and residual > 0.1


def test_closure_starts_at_identity():
    moved = RotationProduct([1], 1.0, [Fraction(1, 3)])
    closed = closure(moved)
    assert np.allclose(closed.evaluate(0.0), np.eye(2))
    assert np.allclose(closed.end, moved.end)


def test_bott_examples():
    res = bott_check(CIRCLE, np.eye(2), 2, ONE, "index")
    assert (res.lhs, res.rhs, res.terms) == (4, 4, [2, 2])
    res = bott_check(HALF, -np.eye(2), 2, ONE, "index", closed_form=False)
    assert (res.lhs, res.rhs) == (2, 2) and sorted(res.terms) == [0, 2]
    res = bott_check(HALF, -np.eye(2), 2, ONE, "nullity")
    assert (res.lhs, res.rhs) == (2, 2)
    res = bott_check(HALF, -np.eye(2), 2, ONE, "splitting")
    assert res.lhs == res.rhs == (1, 1)


def test_bott_label():
    res = bott_check(CIRCLE, np.eye(2), 3, ONE, "nullity")
    assert res.label() == "Bott / nullity / m=3 / omega0=0"


def test_bott_sweep_generic_form_subset():
    results = bott_sweep(2, 3, seed=7, closed_form=False)
    assert results and all(r.equal for r in results)


@given(st.integers(0, 10_000))
def test_bott_on_random_rotation_products(seed):
    rng = np.random.default_rng(seed)
    n = 1 + seed % 3
    m = int(rng.integers(2, 7))
    d = SymmetryDescriptor(n, m, int(rng.integers(1, m // 2 + 1)), int(rng.integers(0, n + 1)))
    path = random_rotation_product(n, rng)
    w0 = UnitAnglePoint.exact(int(rng.integers(0, m)), m)
    for which in ("index", "nullity", "splitting"):
        assert bott_check(path, build_symmetry(d), m, w0, which).equal


def test_bott_with_infinite_order_symmetry(rng):
    """Symmetries with P^m != I: the outcome is recorded, not asserted."""
    path = random_rotation_product(1, rng)
    P = random_symplectic(1, rng, 0.3)
    outcomes = []
    for which in ("nullity", "splitting"):
        try:
            res = bott_check(path, P, 2, ONE, which)
            outcomes.append((which, res.lhs, res.rhs))
        except Exception as exc:  # noqa: BLE001 - any outcome is acceptable here
            outcomes.append((which, type(exc).__name__))
    print("P^m != I outcomes:", outcomes)
    assert len(outcomes) == 2


@given(st.integers(0, 10_000), st.integers(1, 3))
def test_iteration_gaps_on_closed_orbit_paths(seed, turns):
    # the flow direction of a closed orbit makes one block close up after whole turns
    other = random_rotation_product(1, np.random.default_rng(seed), max_turns=2)
    path = RotationProduct([turns, other.turns[0]], other.tau)
    prof = index_profile(path, 4)
    assert prof.i(1) >= path.n and prof.nu(1) >= 1
    assert prof.gaps_ok()
    for (m, i, nu), (_, i_next, _) in zip(prof.per_iterate, prof.per_iterate[1:]):
        assert i_next > i + nu - 1
        assert 0 <= nu <= 2 * path.n


def test_gaps_can_fail_without_a_closed_block():
    prof = index_profile(RotationProduct([Fraction(1, 2), Fraction(3, 4)], 1.0), 4)
    assert prof.i(3) == prof.i(4) == 8


@given(st.integers(0, 10_000), st.integers(1, 5))
def test_mean_index_scales_with_iteration(seed, m):
    path = random_rotation_product(2, np.random.default_rng(seed))
    assert mean_index(iterate(path, m)).exact == m * mean_index(path).exact
