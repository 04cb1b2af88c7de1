"""Linear algebra on the symplectic group Sp(2n).

Matrices are plain ``numpy`` arrays throughout; :class:`SymplecticMatrix`
is only a validated carrier for I/O.  Coordinates are ordered
``(x_1, ..., x_n, y_1, ..., y_n)`` so that ``J = [[0, -I], [I, 0]]``.
"""

from __future__ import annotations

import math
import os
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np
import scipy.linalg

from .angles import TWO_PI, UnitAnglePoint, exact_cos_sin
from .errors import AmbiguousSpectrumError, NotSymplecticError, RankAmbiguityError

DEFAULT_TOL = float(os.environ.get("SYMPLEX_TOL", 1e-10))
RANK_RTOL = 1e-8
UNIT_MODULUS_TOL = 1e-7
CLUSTER_TOL = 1e-7
NOISE_TOL = 1e-9


def standard_J(n: int) -> np.ndarray:
    """The standard symplectic matrix ``[[0, -I_n], [I_n, 0]]``."""
    if n < 1:
        raise ValueError("n must be a positive integer")
    eye = np.eye(n)
    zero = np.zeros((n, n))
    return np.block([[zero, -eye], [eye, zero]])


def half_dim(M) -> int:
    M = np.asarray(M)
    if M.ndim != 2 or M.shape[0] != M.shape[1] or M.shape[0] % 2:
        raise ValueError(f"expected a 2n x 2n matrix, got shape {M.shape}")
    return M.shape[0] // 2


def symplectic_defect(M) -> float:
    """``max |M^T J M - J|``."""
    M = np.asarray(M, dtype=float)
    J = standard_J(half_dim(M))
    return float(np.max(np.abs(M.T @ J @ M - J)))


def check_symplectic(M, tol: float = DEFAULT_TOL) -> np.ndarray:
    M = np.asarray(M, dtype=float)
    defect = symplectic_defect(M)
    # relative to the size of the entries: products of large matrices lose digits
    scale = max(1.0, float(np.max(np.abs(M))) ** 2)
    if defect > tol * scale:
        raise NotSymplecticError(f"M^T J M - J has max-norm {defect:.3e} > {tol:.1e}")
    if np.linalg.det(M) <= 0:
        raise NotSymplecticError("determinant is not positive")
    return M


@dataclass(frozen=True)
class SymplecticMatrix:
    """A validated 2n x 2n symplectic matrix."""

    entries: np.ndarray
    tol: float = DEFAULT_TOL
    n: int = field(init=False)

    def __post_init__(self):
        arr = check_symplectic(np.array(self.entries, dtype=float), self.tol)
        arr.setflags(write=False)
        object.__setattr__(self, "entries", arr)
        object.__setattr__(self, "n", arr.shape[0] // 2)

    def __array__(self, dtype=None, copy=None):
        return self.entries if dtype is None else self.entries.astype(dtype)

    def to_json(self) -> dict:
        return {"n": self.n, "entries": self.entries.tolist()}

    @classmethod
    def from_json(cls, obj: dict, tol: float = DEFAULT_TOL) -> "SymplecticMatrix":
        mat = cls(np.array(obj["entries"], dtype=float), tol)
        if "n" in obj and int(obj["n"]) != mat.n:
            raise ValueError(f"declared n={obj['n']} does not match a {2 * mat.n}x{2 * mat.n} matrix")
        return mat


def diamond(*mats) -> np.ndarray:
    """Diamond product: interleave the x- and y-blocks of each factor.

    For ``M1 = [[A1, A2], [A3, A4]]`` and ``M2 = [[B1, B2], [B3, B4]]`` the
    result is ``[[A1, 0, A2, 0], [0, B1, 0, B2], [A3, 0, A4, 0], [0, B3, 0, B4]]``.
    """
    if not mats:
        raise ValueError("diamond of no matrices")
    mats = [np.asarray(M, dtype=float) for M in mats]
    dims = [half_dim(M) for M in mats]
    n = sum(dims)
    out = np.zeros((2 * n, 2 * n))
    offset = 0
    for M, d in zip(mats, dims):
        rows = np.r_[offset:offset + d, n + offset:n + offset + d]
        out[np.ix_(rows, rows)] = M
        offset += d
    return out


def diamond_power(M, k: int) -> np.ndarray:
    if k < 1:
        raise ValueError("k must be positive")
    return diamond(*([M] * k))


def _as_turns(theta):
    if isinstance(theta, UnitAnglePoint):
        return theta.turn_value
    if isinstance(theta, Fraction):
        return theta
    return float(theta) / TWO_PI


def rotation(theta) -> np.ndarray:
    """``R(theta)``; ``theta`` is a :class:`UnitAnglePoint` or radians.

    Exact points whose angle is a multiple of 30 degrees give exact entries.
    """
    c, s = exact_cos_sin(_as_turns(theta))
    return np.array([[c, -s], [s, c]])


def rotation_from_turns(turns) -> np.ndarray:
    c, s = exact_cos_sin(turns)
    return np.array([[c, -s], [s, c]])


def rotation_diamond(turns) -> np.ndarray:
    """``R(2 pi t_1) <> ... <> R(2 pi t_n)`` for block angles given in turns."""
    return diamond(*(rotation_from_turns(t) for t in turns))


def rotation_angles(M, tol: float = 1e-12):
    """Block angles (in turns) if ``M`` is exactly a diamond of rotations, else None.

    Angles snap to fractions with small denominators when they agree to ``tol``.
    """
    M = np.asarray(M, dtype=float)
    n = half_dim(M)
    turns = []
    mask = np.zeros_like(M, dtype=bool)
    for k in range(n):
        idx = [k, n + k]
        block = M[np.ix_(idx, idx)]
        mask[np.ix_(idx, idx)] = True
        c, s = block[0, 0], block[1, 0]
        if abs(block[1, 1] - c) > tol or abs(block[0, 1] + s) > tol or abs(math.hypot(c, s) - 1) > tol:
            return None
        point = UnitAnglePoint.from_radians(math.atan2(s, c))
        turns.append(point.turn_value)
    if np.max(np.abs(M[~mask]), initial=0.0) > tol:
        return None
    return turns


@dataclass(frozen=True)
class SymmetryDescriptor:
    """Normal form ``R(-theta)^{<>(n - s_minus)} <> R(theta)^{<> s_minus}``, ``theta = 2 pi k / m``."""

    n: int
    m: int
    k: int
    s_minus: int

    def __post_init__(self):
        if self.n < 1:
            raise ValueError("n must be positive")
        if self.m < 2:
            raise ValueError("m must be at least 2")
        if not 1 <= self.k <= self.m // 2:
            raise ValueError(f"k must lie in 1..{self.m // 2}")
        if not 0 <= self.s_minus <= self.n:
            raise ValueError(f"s_minus must lie in 0..{self.n}")

    @property
    def s_plus(self) -> int:
        return self.n - self.s_minus

    @property
    def a(self) -> int:
        """``S^+ - S^-`` at ``omega_k`` (the superscript of the tilde classes)."""
        return self.s_plus - self.s_minus

    @property
    def theta_turns(self) -> Fraction:
        return Fraction(self.k, self.m)

    @property
    def omega(self) -> UnitAnglePoint:
        return UnitAnglePoint.exact(self.k, self.m)

    @property
    def block_turns(self) -> list:
        th = self.theta_turns
        return [(-th) % 1] * self.s_plus + [th] * self.s_minus


def build_symmetry(d: SymmetryDescriptor) -> np.ndarray:
    return rotation_diamond(d.block_turns)


def matrix_power(M, k: int) -> np.ndarray:
    M = np.asarray(M, dtype=float)
    if k >= 0:
        return np.linalg.matrix_power(M, k)
    return np.linalg.matrix_power(symplectic_inverse(M), -k)


def symplectic_inverse(M) -> np.ndarray:
    """``M^{-1} = -J M^T J``, exact for symplectic ``M``."""
    M = np.asarray(M, dtype=float)
    J = standard_J(half_dim(M))
    return -J @ M.T @ J


def random_symmetric(n: int, rng: np.random.Generator, scale: float = 1.0) -> np.ndarray:
    S = rng.uniform(-scale, scale, size=(2 * n, 2 * n))
    return (S + S.T) / 2


def random_symplectic(n: int, rng: np.random.Generator, scale: float = 1.0) -> np.ndarray:
    """``expm(J S)`` for a random symmetric ``S`` with entries in ``[-scale, scale]``."""
    return scipy.linalg.expm(standard_J(n) @ random_symmetric(n, rng, scale))


# -- spectra ---------------------------------------------------------------


def unit_spectrum(
    M,
    tol: float = UNIT_MODULUS_TOL,
    cluster_tol: float = CLUSTER_TOL,
    merge: bool = False,
) -> list[tuple[UnitAnglePoint, int]]:
    """Eigenvalues on the unit circle grouped by angle, with algebraic multiplicity.

    Eigen-angles closer than ``cluster_tol`` are grouped.  A group whose spread
    exceeds the round-off level ``NOISE_TOL`` is ambiguous and raises
    :class:`AmbiguousSpectrumError` unless ``merge`` is set.
    """
    eig = np.linalg.eigvals(np.asarray(M, dtype=float))
    on_circle = eig[np.abs(np.abs(eig) - 1.0) <= tol]
    if on_circle.size == 0:
        return []
    angles = np.sort(np.mod(np.angle(on_circle), TWO_PI))
    # angles just below 2pi belong with 0
    angles = np.where(angles > TWO_PI - cluster_tol, angles - TWO_PI, angles)
    angles = np.sort(angles)
    groups = [[angles[0]]]
    for a in angles[1:]:
        if a - groups[-1][-1] < cluster_tol:
            groups[-1].append(a)
        else:
            groups.append([a])
    out = []
    for g in groups:
        spread = g[-1] - g[0]
        if spread > NOISE_TOL and not merge:
            raise AmbiguousSpectrumError(
                f"{len(g)} unit eigenvalues spread over {spread:.2e} rad near angle {g[0]:.9f}"
            )
        out.append((UnitAnglePoint.from_radians(float(np.mean(g))), len(g)))
    out.sort(key=lambda pair: pair[0].radians)
    return out


def unit_eigen_gap(M, omega: UnitAnglePoint | None = None) -> float:
    """Smallest arc distance between distinct unit eigenvalues of ``M`` (and ``omega``).

    Near-coincident eigenvalues are merged: a defective eigenvalue splits by
    about ``sqrt(eps)`` under round-off and still counts as one point here.
    """
    points = [p for p, _ in unit_spectrum(M, merge=True)]
    if omega is not None and not any(p.close_to(omega) for p in points):
        points.append(omega)
    if len(points) < 2:
        return TWO_PI
    gap = TWO_PI
    for i, p in enumerate(points):
        for q in points[i + 1:]:
            gap = min(gap, p.distance(q))
    return gap


@dataclass
class KernelResult:
    basis: np.ndarray
    singular_values: np.ndarray
    threshold: float
    flagged: bool

    @property
    def dim(self) -> int:
        return self.basis.shape[1]


def kernel(A, rtol: float = RANK_RTOL) -> KernelResult:
    """Orthonormal kernel basis from the SVD.

    Singular values below ``rtol * max(sigma_max, 1)`` count as zero.  The
    result is flagged when any singular value lies within a factor 10 of the
    threshold.
    """
    A = np.asarray(A)
    _, s, vh = np.linalg.svd(A)
    thr = rtol * max(float(s[0]) if s.size else 0.0, 1.0)
    rank = int(np.sum(s > thr))
    flagged = bool(np.any((s > thr / 10) & (s < thr * 10)))
    basis = vh[rank:].conj().T
    return KernelResult(basis, s, thr, flagged)


@dataclass
class Eigenspace:
    omega: UnitAnglePoint
    basis: np.ndarray
    growth: list[int]
    flagged: bool

    @property
    def dim(self) -> int:
        return self.basis.shape[1]


def generalized_eigenspace(M, omega: UnitAnglePoint, rtol: float = RANK_RTOL, strict: bool = False) -> Eigenspace:
    """``ker (M - omega I)^k`` for growing ``k`` until the dimension stabilises."""
    M = np.asarray(M, dtype=float)
    dim = M.shape[0]
    A = M - omega.value * np.eye(dim)
    power = np.eye(dim, dtype=complex)
    growth = []
    flagged = False
    res = None
    for _ in range(dim):
        power = A @ power
        res = kernel(power, rtol)
        flagged |= res.flagged
        if growth and res.dim <= growth[-1]:
            break
        growth.append(res.dim)
        if res.dim == 0 or res.dim == dim:
            break
    if strict and flagged:
        raise RankAmbiguityError(f"rank decision near threshold for omega={omega}")
    # recompute the basis at the stable power
    basis = kernel(np.linalg.matrix_power(A, len(growth)), rtol).basis if growth[-1] else np.zeros((dim, 0), complex)
    return Eigenspace(omega, basis, growth, flagged)


def nullity(M, omega: UnitAnglePoint, rtol: float = RANK_RTOL, strict: bool = False) -> int:
    """Complex dimension of ``ker(M - omega I)``."""
    M = np.asarray(M, dtype=float)
    res = kernel(M - omega.value * np.eye(M.shape[0]), rtol)
    if strict and res.flagged:
        raise RankAmbiguityError(f"rank decision near threshold for omega={omega}")
    return res.dim
