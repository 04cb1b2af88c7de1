"""Iterated paths and Bott-type sum formulas."""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .angles import UnitAnglePoint
from .core import SymmetryDescriptor, build_symmetry, matrix_power, nullity, rotation_angles, symplectic_inverse
from .index import graph_index
from .errors import DegenerateFormError, UnsupportedInputError
from .krein import splitting_numbers
from .paths import RotationProduct, Segmented, SymplecticPath, Transformed, concatenate, connecting_path


@dataclass(frozen=True)
class IterationSpec:
    P: np.ndarray
    m: int
    l: int | None = None
    k: int | None = None

    def __post_init__(self):
        if self.m < 1:
            raise ValueError("m must be positive")
        if self.l is not None and self.k is not None and math.gcd(self.l, self.k) != 1:
            raise ValueError(f"l={self.l} and k={self.k} must be coprime")


def iterate(path: SymplecticPath, m: int, closed_form: bool = True) -> SymplecticPath:
    """``gamma^m(t) = gamma(t - j tau) gamma(tau)^j`` on ``[j tau, (j+1) tau]``."""
    if m < 1:
        raise ValueError("m must be positive")
    if m == 1:
        return path
    if closed_form and isinstance(path, RotationProduct) and path.starts_at_identity:
        return RotationProduct([x * m for x in path.turns], path.tau * m)
    end = path.end
    return Segmented([Transformed(path, right=matrix_power(end, j)) for j in range(m)])


def iterate_sym(path: SymplecticPath, P, m: int, closed_form: bool = True) -> SymplecticPath:
    """The ``(P, m)``-iteration ``P^{-(j-1)} gamma(t - (j-1) tau) (P gamma(tau))^{j-1}``.

    When ``gamma`` is a rotation product and ``P`` a diamond of rotations all
    factors commute and the result is the plain iterate.
    """
    P = np.asarray(P, dtype=float)
    if m < 1:
        raise ValueError("m must be positive")
    if closed_form and isinstance(path, RotationProduct) and path.starts_at_identity and rotation_angles(P) is not None:
        return iterate(path, m)
    if m == 1:
        return path
    P_inv = symplectic_inverse(P)
    step = P @ path.end
    parts = [Transformed(path, left=matrix_power(P_inv, j), right=matrix_power(step, j)) for j in range(m)]
    return Segmented(parts)


def closure(path: SymplecticPath) -> SymplecticPath:
    """``path * xi`` with ``xi`` a canonical connection from the identity to ``path(0)``."""
    xi = connecting_path(path.evaluate(0.0), path.tau)
    return concatenate(xi, path)


def check_symmetric_identity(path: SymplecticPath, P, l: int, k: int, samples: int = 65) -> tuple[bool, float]:
    """Residual of the two P-symmetric path identities.

    ``path`` covers ``[0, l tau]``; checked are
    ``gamma(t + l tau/k) = P^{-1} gamma(t) P gamma(l tau/k)`` on a grid and
    ``gamma(l tau) = P^{-k} (P gamma(l tau/k))^k``.
    """
    IterationSpec(np.asarray(P), k, l, k)
    P = np.asarray(P, dtype=float)
    P_inv = symplectic_inverse(P)
    shift = path.tau / k
    g_shift = path.evaluate(shift)
    tail = P @ g_shift
    residual = 0.0
    for t in np.linspace(0.0, path.tau - shift, samples):
        lhs = path.evaluate(t + shift)
        rhs = P_inv @ path.evaluate(t) @ tail
        residual = max(residual, float(np.max(np.abs(lhs - rhs))))
    end = matrix_power(P_inv, k) @ matrix_power(tail, k)
    residual = max(residual, float(np.max(np.abs(path.end - end))))
    return residual <= 1e-9 * max(1.0, float(np.max(np.abs(path.end)))), residual


@dataclass
class BottResult:
    which: str
    m: int
    omega0: UnitAnglePoint
    lhs: object
    rhs: object
    terms: list
    descriptor: SymmetryDescriptor | None = field(default=None)

    @property
    def equal(self) -> bool:
        return self.lhs == self.rhs

    def label(self) -> str:
        return f"Bott / {self.which} / m={self.m} / omega0={self.omega0.turn_value}"


def bott_check(path: SymplecticPath, P, m: int, omega0: UnitAnglePoint, which: str,
               method: str = "auto", closed_form: bool = True) -> BottResult:
    """Compare the ``m``-th (P, m)-iterate against the sum over the ``m``-th roots of ``omega0``.

    ``which`` is ``"index"`` (graph index of ``P^m gamma^{m,P}``),
    ``"nullity"`` or ``"splitting"`` (the pair ``(S+, S-)``).
    """
    P = np.asarray(P, dtype=float)
    roots = omega0.roots(m)
    it = iterate_sym(path, P, m, closed_form)
    Pm = matrix_power(P, m)
    if which == "index":
        lhs = graph_index(it, omega0, Pm, method).mu
        terms = [graph_index(path, w, P, method).mu for w in roots]
        rhs = sum(terms)
    elif which == "nullity":
        lhs = nullity(Pm @ it.end, omega0)
        terms = [nullity(P @ path.end, w) for w in roots]
        rhs = sum(terms)
    elif which == "splitting":
        lhs = _splitting(Transformed(it, left=Pm), omega0)
        terms = [_splitting(Transformed(path, left=P), w) for w in roots]
        rhs = (sum(t[0] for t in terms), sum(t[1] for t in terms))
    else:
        raise ValueError(f"unknown check {which!r}")
    return BottResult(which, m, omega0, lhs, rhs, terms)


def _splitting(path: SymplecticPath, omega: UnitAnglePoint) -> tuple[int, int]:
    M = path.end
    try:
        return splitting_numbers(M, omega).pair()
    except (UnsupportedInputError, DegenerateFormError):
        return splitting_numbers(M, omega, closure(path), method="path-limit").pair()


def bott_sweep(n_max: int = 3, m_max: int = 6, seed: int = 0, closed_form: bool = True,
               which=("index", "nullity", "splitting")) -> list[BottResult]:
    """Every Bott check over ``P = build_symmetry(n, m, k, s)`` and all ``m``-th roots of unity.

    One random positive rotation product is drawn per ``(n, m, k, s)``.
    """
    from .corpus import random_rotation_product

    rng = np.random.default_rng(seed)
    out = []
    for n in range(1, n_max + 1):
        for m in range(2, m_max + 1):
            for k in range(1, m // 2 + 1):
                for s in range(n + 1):
                    d = SymmetryDescriptor(n, m, k, s)
                    P = build_symmetry(d)
                    path = random_rotation_product(n, rng)
                    for j in range(m):
                        omega0 = UnitAnglePoint.exact(j, m)
                        for w in which:
                            res = bott_check(path, P, m, omega0, w, closed_form=closed_form)
                            res.descriptor = d
                            out.append(res)
    return out
