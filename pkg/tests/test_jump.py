from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, strategies as st

from symplex.angles import UnitAnglePoint
from symplex.core import SymmetryDescriptor, build_symmetry, random_symplectic
from symplex.corpus import random_rotation_product
from symplex.errors import UnsupportedInputError
from symplex.iteration import bott_check, iterate
from symplex.jump import (
    all_descriptors,
    applicable_variants,
    bound_consistency,
    cijt_search,
    classify_symmetry,
    index_profile,
    iterate_index,
    jump_relations,
    multiplicity_bound,
    n1_inequality,
    n1_rhs,
    second_iterate_margin,
)
from symplex.paths import RotationProduct

CIRCLE = RotationProduct([1], 2 * np.pi)
HALF = RotationProduct([Fraction(1, 2)], np.pi)


def test_circle_profile():
    prof = index_profile(CIRCLE, 3)
    assert prof.per_iterate == [(1, 1, 2), (2, 3, 2), (3, 5, 2)]
    assert prof.mean_index == 2.0
    assert prof.endpoint_splitting.pair() == (1, 1)
    assert prof.gaps_ok()


def test_irrational_speed_profile_matches_bott():
    path = RotationProduct.from_speeds([1.0, np.sqrt(2)], 2 * np.pi)
    prof = index_profile(path, 2)
    # the second block closes up once inside (0, 2 pi), at t = 2 pi / sqrt(2)
    assert prof.i(1) == 2 + 2
    assert index_profile(path, 2, "crossing-form").per_iterate == prof.per_iterate
    res = bott_check(path, np.eye(4), 2, UnitAnglePoint.one(), "index")
    assert res.equal and prof.i(2) == res.lhs - path.n


def test_circle_jump_tuples():
    found = cijt_search([CIRCLE], 8)
    assert [t.key() for t in found] == [(2, 1), (4, 2), (6, 3), (8, 4)]
    for t in found:
        m = t.ms[0]
        rel = t.checks[0]
        assert rel["upper"] == [4 * m + 1, 2 * t.N + 1]
        assert rel["lower"][0] == 4 * m - 1 == rel["lower"][1]


def test_jump_relations_by_recomputation():
    rel = jump_relations(CIRCLE, 4, 2, 1)
    assert rel["ok"]
    assert not jump_relations(CIRCLE, 5, 2, 1)["ok"]


def test_two_path_tuple_exists():
    paths = [CIRCLE, RotationProduct([2], 2 * np.pi)]
    found = cijt_search(paths, 100)
    assert found and all(t.valid and len(t.ms) == 2 for t in found)


def test_search_below_dimension_is_empty():
    path = RotationProduct([1, 2, 3], 2 * np.pi)
    assert cijt_search([path], 2) == []


def test_search_needs_positive_mean_index():
    with pytest.raises(UnsupportedInputError):
        cijt_search([RotationProduct([-1], 1.0)], 4)


def test_search_budget_warns():
    with pytest.warns(UserWarning):
        cijt_search([CIRCLE], 8, m_budget=5)


def test_wide_window_adds_nothing_for_circle():
    narrow = {t.key() for t in cijt_search([CIRCLE], 12)}
    wide = {t.key() for t in cijt_search([CIRCLE], 12, window=8)}
    assert narrow == wide


@given(st.integers(0, 10_000))
def test_second_iterate_bound_on_closed_orbit_paths(seed):
    other = random_rotation_product(1, np.random.default_rng(seed))
    assert second_iterate_margin(RotationProduct([1, other.turns[0]], other.tau)) >= 0


def test_classify_symmetry():
    cls = classify_symmetry(build_symmetry(SymmetryDescriptor(3, 5, 2, 1)), 5)
    assert cls.omega == UnitAnglePoint.exact(2, 5)
    assert (cls.s_plus, cls.s_minus) == (2, 1)
    with pytest.raises(UnsupportedInputError):
        classify_symmetry(random_symplectic(1, np.random.default_rng(0)), 3)
    with pytest.raises(UnsupportedInputError):
        classify_symmetry(np.eye(2), 3)


def test_n1_rhs_arithmetic():
    assert n1_rhs(2, 1, "general") == 3
    assert n1_rhs(3, 0, "mEven") == 6
    assert n1_rhs(3, 0, "tilde0") == Fraction(9, 2)
    assert n1_rhs(3, 0, "tilde+1") == 5
    assert n1_rhs(3, 0, "tilde-1") == 4


def test_n1_round_case_is_tight():
    res = n1_inequality(HALF, -np.eye(2), 2, "mEven")
    assert (res.mu, res.s_plus_end, res.nu_end, res.lhs, res.rhs, res.margin) == (2, 1, 2, 2, 2, 0)


def test_n1_tilde_zero_case():
    P = build_symmetry(SymmetryDescriptor(2, 3, 1, 1))
    hat = RotationProduct([Fraction(1, 3), Fraction(1, 3)], 2 * np.pi / 3)
    res = n1_inequality(hat, P, 3, "tilde0")
    assert res.rhs == 3 and res.margin >= 0


def test_n1_variant_preconditions():
    P = build_symmetry(SymmetryDescriptor(2, 3, 1, 1))
    hat = RotationProduct([Fraction(1, 3), Fraction(1, 3)], 1.0)
    with pytest.raises(UnsupportedInputError):
        n1_inequality(hat, P, 3, "mEven")
    with pytest.raises(UnsupportedInputError):
        n1_inequality(hat, P, 3, "tilde+1")
    assert applicable_variants(P, 3) == ["general", "tilde0"]
    assert applicable_variants(-np.eye(2), 2) == ["general", "mEven"]


@given(st.integers(0, 10_000))
def test_n1_margin_nonnegative(seed):
    rng = np.random.default_rng(seed)
    n = 1 + seed % 3
    m = int(rng.integers(2, 7))
    d = SymmetryDescriptor(n, m, int(rng.integers(1, m // 2 + 1)), int(rng.integers(0, n + 1)))
    P = build_symmetry(d)
    # a closed orbit in plane 0 shifted by P: that block turns by 1/m of a turn per piece
    first = Fraction(-d.block_turns[0]) % 1
    hat = RotationProduct([first] + [random_rotation_product(1, rng).turns[0] for _ in range(n - 1)], 1.0)
    for variant in applicable_variants(P, m):
        assert n1_inequality(hat, P, m, variant).margin >= 0


@pytest.mark.parametrize("n", range(1, 17))
def test_three_quarter_bound(n):
    assert multiplicity_bound(SymmetryDescriptor(n, 3, 1, n // 2)) == (3 * n) // 4


def test_worked_bounds():
    assert multiplicity_bound(SymmetryDescriptor(4, 3, 1, 2)) == 3
    assert multiplicity_bound(SymmetryDescriptor(5, 3, 1, 2)) == 3
    for m in range(2, 13, 2):
        for n in (1, 4, 7):
            assert multiplicity_bound(SymmetryDescriptor(n, m, 1, n // 3)) == n


def test_unit_shift_bound_equals_n_without_negative_blocks():
    for n in range(1, 6):
        for m in (3, 5, 7):
            assert multiplicity_bound(SymmetryDescriptor(n, m, 1, 0), unit_shift=True) == n


def test_bound_consistency_sweep():
    assert all(bound_consistency(d) for d in all_descriptors(8, 12))


@given(st.integers(1, 8), st.sampled_from([3, 5, 7, 9, 11]))
def test_bound_monotone_in_negative_blocks(n, m):
    bounds = [multiplicity_bound(SymmetryDescriptor(n, m, 1, s)) for s in range(n + 1)]
    s_minus_max = [max(s, n - s) for s in range(n + 1)]
    order = sorted(range(n + 1), key=lambda s: s_minus_max[s])
    assert all(bounds[a] >= bounds[b] for a, b in zip(order, order[1:]))


def test_iterate_index_matches_iterate():
    path = RotationProduct([1, Fraction(3, 2)], 1.0)
    from symplex.index import maslov_type_index

    rec = maslov_type_index(iterate(path, 3), UnitAnglePoint.one())
    assert iterate_index(path, 3) == (rec.i_omega, rec.nu_omega)
