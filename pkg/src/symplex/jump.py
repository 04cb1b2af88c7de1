"""Iterated index profiles, common index jump search and multiplicity bounds."""

from __future__ import annotations

import itertools
import math
import warnings
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from .angles import UnitAnglePoint
from .core import SymmetryDescriptor, build_symmetry, matrix_power, nullity, unit_spectrum
from .errors import UnsupportedInputError
from .index import graph_index, maslov_type_index, mean_index
from .iteration import iterate, iterate_sym
from .krein import SplittingPair, splitting_numbers
from .paths import SymplecticPath

ONE = UnitAnglePoint.one()
VARIANTS = ("general", "tilde0", "tilde+1", "tilde-1", "mEven")


# -- profiles ------------------------------------------------------------------


@dataclass
class IndexProfile:
    path: SymplecticPath
    per_iterate: list  # (m, i^m, nu^m)
    mean_index: float
    endpoint_splitting: SplittingPair

    @property
    def n(self) -> int:
        return self.path.n

    def i(self, m: int) -> int:
        return self.per_iterate[m - 1][1]

    def nu(self, m: int) -> int:
        return self.per_iterate[m - 1][2]

    def gaps_ok(self) -> bool:
        """``i^{m+1} - i^m >= 2`` along the profile."""
        return all(b[1] - a[1] >= 2 for a, b in zip(self.per_iterate, self.per_iterate[1:]))

    def to_json(self) -> dict:
        return {
            "perIterate": [list(r) for r in self.per_iterate],
            "meanIndex": self.mean_index,
            "endpointSplitting": list(self.endpoint_splitting.pair()),
        }


def iterate_index(path: SymplecticPath, m: int, method: str = "auto") -> tuple[int, int]:
    """``(i_1(gamma^m), nu_1(gamma^m))`` computed from scratch."""
    rec = maslov_type_index(iterate(path, m), ONE, method)
    return rec.i_omega, rec.nu_omega


def _endpoint_splitting(path: SymplecticPath) -> SplittingPair:
    try:
        return splitting_numbers(path.end, ONE)
    except UnsupportedInputError:
        return splitting_numbers(path.end, ONE, path, method="path-limit")


def index_profile(path: SymplecticPath, m_max: int, method: str = "auto") -> IndexProfile:
    rows = [(m, *iterate_index(path, m, method)) for m in range(1, m_max + 1)]
    return IndexProfile(path, rows, mean_index(path).value, _endpoint_splitting(path))


# -- common index jump ---------------------------------------------------------


@dataclass
class JumpTuple:
    N: int
    ms: list
    checks: list = field(default_factory=list)

    @property
    def valid(self) -> bool:
        return all(c["ok"] for c in self.checks)

    def key(self) -> tuple:
        return (self.N, *self.ms)

    def to_json(self) -> dict:
        return {"N": self.N, "ms": list(self.ms), "valid": self.valid, "checks": self.checks}


def jump_relations(path: SymplecticPath, N: int, m: int, s_plus: int, lookup=None) -> dict:
    """Evaluate the four jump relations for ``path`` at level ``2N`` and iterate ``2m``.

    ``lookup(j)`` returns ``(i^j, nu^j)``; by default every iterate is
    recomputed.
    """
    get = lookup or (lambda j: iterate_index(path, j))
    n = path.n
    i1, nu1 = get(1)
    i_lo, nu_lo = get(2 * m - 1)
    i_mid, nu_mid = get(2 * m)
    i_hi, nu_hi = get(2 * m + 1)
    rel = {
        "upper": [i_hi, 2 * N + i1],
        "lower": [i_lo + nu_lo, 2 * N - (i1 + 2 * s_plus - nu1)],
        "nullity": [[nu_lo, nu_hi], [nu1, nu1]],
        "middle": [[i_mid, i_mid + nu_mid], [2 * N - n, 2 * N + n]],
    }
    ok = (
        rel["upper"][0] == rel["upper"][1]
        and rel["lower"][0] == rel["lower"][1]
        and nu_lo == nu1 and nu_hi == nu1
        and i_mid >= 2 * N - n and i_mid + nu_mid <= 2 * N + n
    )
    return {"m": m, "ok": bool(ok), **rel}


def cijt_search(paths, n_max: int, window: int = 2, m_budget: int = 512,
                method: str = "auto") -> list[JumpTuple]:
    """All ``(N, m_1, ..., m_q)`` with ``N <= n_max`` inside the candidate window.

    For each path the candidates are ``floor(N / mean_index) +- window``
    (clamped to ``>= 1``).  Emitted tuples are re-verified from scratch.
    """
    paths = [p.path if isinstance(p, IndexProfile) else p for p in paths]
    if not paths:
        return []
    n = paths[0].n
    if any(p.n != n for p in paths):
        raise ValueError("all paths must share the dimension")
    means = [mean_index(p).value for p in paths]
    if any(v <= 0 for v in means):
        raise UnsupportedInputError("every path needs a positive mean index")
    s_plus = [_endpoint_splitting(p).s_plus for p in paths]
    caches = [{} for _ in paths]

    def lookup(k):
        def get(j):
            if j not in caches[k]:
                caches[k][j] = iterate_index(paths[k], j, method)
            return caches[k][j]
        return get

    found = []
    for N in range(max(n, 1), n_max + 1):
        per_path = []
        for k, p in enumerate(paths):
            centre = math.floor(N / means[k])
            good = []
            for m in range(max(1, centre - window), centre + window + 1):
                if 2 * m + 1 > m_budget:
                    warnings.warn(f"iterate {2 * m + 1} exceeds the budget {m_budget}; skipped")
                    continue
                if jump_relations(p, N, m, s_plus[k], lookup(k))["ok"]:
                    good.append(m)
            per_path.append(good)
        for ms in itertools.product(*per_path):
            checks = [jump_relations(p, N, m, s_plus[k]) for k, (p, m) in enumerate(zip(paths, ms))]
            tup = JumpTuple(N, list(ms), checks)
            if tup.valid:
                found.append(tup)
    return found


# -- the n1 inequality ---------------------------------------------------------


@dataclass
class SymmetryClass:
    """Where ``P`` sits among the finite-order classes."""

    m: int
    omega: UnitAnglePoint  # the eigenvalue in the closed upper half circle
    s_plus: int
    s_minus: int

    @property
    def a(self) -> int:
        return self.s_plus - self.s_minus


def classify_symmetry(P, m: int) -> SymmetryClass:
    """Check ``P^m = I`` with unit spectrum ``{omega, conj(omega)}`` and return its splitting data."""
    P = np.asarray(P, dtype=float)
    dim = P.shape[0]
    if np.max(np.abs(matrix_power(P, m) - np.eye(dim))) > 1e-9:
        raise UnsupportedInputError(f"P^{m} is not the identity")
    spec = unit_spectrum(P)
    if sum(mult for _, mult in spec) != dim:
        raise UnsupportedInputError("P has eigenvalues off the unit circle")
    upper = [w for w, _ in spec if w.is_exact and 0 < w.turn_value <= Fraction(1, 2)]
    if len(upper) != 1 or len(spec) > 2:
        raise UnsupportedInputError("P must have spectrum {omega, conj(omega)} for a single omega")
    omega = upper[0]
    s = splitting_numbers(P, omega)
    return SymmetryClass(m, omega, s.s_plus, s.s_minus)


def n1_rhs(n: int, s_minus: int, variant: str) -> int | Fraction:
    if variant == "general":
        return 2 * n - s_minus
    if variant == "mEven":
        return 2 * n
    if variant == "tilde0":
        return Fraction(3 * n, 2)
    if variant == "tilde+1":
        return (3 * n) // 2 + 1
    if variant == "tilde-1":
        return (3 * n) // 2
    raise ValueError(f"unknown variant {variant!r}")


@dataclass
class N1Result:
    variant: str
    lhs: int
    rhs: int | Fraction
    mu: int
    s_plus_end: int
    nu_end: int

    @property
    def margin(self):
        return self.lhs - self.rhs

    def to_json(self) -> dict:
        rhs = self.rhs if isinstance(self.rhs, int) or self.rhs.denominator != 1 else int(self.rhs)
        return {"variant": self.variant, "lhs": self.lhs, "rhs": str(rhs), "margin": str(self.margin),
                "muGraph": self.mu, "sPlusEnd": self.s_plus_end, "nuEnd": self.nu_end}


def n1_inequality(hat_path: SymplecticPath, P, m: int, variant: str = "general",
                  method: str = "auto") -> N1Result:
    """``mu(Gr(I), Gr(gamma)) + 2 S+_{gamma(m tau)}(1) - nu_1(gamma)`` against the variant's bound.

    ``gamma`` is the ``(P, m)``-iterate of ``hat_path``.  ``mEven`` needs
    ``P^{m/2} = -I``; the tilde variants need ``S+_P(omega) - S-_P(omega)``
    to equal ``0``, ``+1`` or ``-1``.
    """
    P = np.asarray(P, dtype=float)
    cls = classify_symmetry(P, m)
    if variant == "mEven":
        if m % 2 or np.max(np.abs(matrix_power(P, m // 2) + np.eye(P.shape[0]))) > 1e-9:
            raise UnsupportedInputError("mEven needs even m with P^{m/2} = -I")
    elif variant.startswith("tilde"):
        if m <= 2:
            raise UnsupportedInputError("the tilde classes need m > 2")
        want = {"tilde0": 0, "tilde+1": 1, "tilde-1": -1}[variant]
        if cls.a != want:
            raise UnsupportedInputError(f"P has S+ - S- = {cls.a}, not {want}")
    elif variant != "general":
        raise ValueError(f"unknown variant {variant!r}")
    gamma = iterate_sym(hat_path, P, m)
    mu = graph_index(gamma, ONE, None, method).mu
    end = gamma.end
    s_plus = _endpoint_splitting(gamma).s_plus
    nu = nullity(end, ONE)
    lhs = mu + 2 * s_plus - nu
    return N1Result(variant, lhs, n1_rhs(P.shape[0] // 2, cls.s_minus, variant), mu, s_plus, nu)


def applicable_variants(P, m: int) -> list[str]:
    cls = classify_symmetry(P, m)
    out = ["general"]
    if m > 2 and cls.a in (-1, 0, 1):
        out.append({0: "tilde0", 1: "tilde+1", -1: "tilde-1"}[cls.a])
    if m % 2 == 0 and np.max(np.abs(matrix_power(P, m // 2) + np.eye(np.asarray(P).shape[0]))) <= 1e-9:
        out.append("mEven")
    return out


# -- multiplicity bounds -------------------------------------------------------


def _s_minus_pair(d: SymmetryDescriptor) -> tuple[int, int]:
    P = build_symmetry(d)
    w = d.omega
    return splitting_numbers(P, w).s_minus, splitting_numbers(P, w.conj()).s_minus


def multiplicity_bound(d: SymmetryDescriptor, unit_shift: bool = False) -> int:
    """Lower bound on the number of geometrically distinct closed characteristics.

    ``n`` for even ``m``, otherwise ``n + floor(-max(S-_P(omega), S-_P(conj omega)) / 2)``.
    With ``unit_shift`` every symmetric orbit is assumed to satisfy
    ``x(t) = P x(t + tau/m)``; then only ``S-_P(omega)`` enters and the bound
    is ``floor((2n - S-_P(omega)) / 2)``.
    """
    if d.m % 2 == 0:
        return d.n
    s_w, s_wbar = _s_minus_pair(d)
    if unit_shift:
        return (2 * d.n - s_w) // 2
    return d.n + math.floor(-max(s_w, s_wbar) / 2)


def bound_consistency(d: SymmetryDescriptor) -> bool:
    """``floor((n1 + n)/2)`` with ``n1 = n - max S-`` agrees with :func:`multiplicity_bound`."""
    n1 = d.n if d.m % 2 == 0 else d.n - max(_s_minus_pair(d))
    return (n1 + d.n) // 2 == multiplicity_bound(d)


def all_descriptors(n_max: int, m_max: int):
    for n in range(1, n_max + 1):
        for m in range(2, m_max + 1):
            for k in range(1, m // 2 + 1):
                for s in range(n + 1):
                    yield SymmetryDescriptor(n, m, k, s)


def second_iterate_margin(path: SymplecticPath, method: str = "auto") -> int:
    """``i_1(gamma^2) + 2 S+_{gamma^2(end)}(1) - nu_1(gamma^2) - n``; nonnegative for convex paths."""
    doubled = iterate(path, 2)
    i2, nu2 = iterate_index(path, 2, method)
    return i2 + 2 * _endpoint_splitting(doubled).s_plus - nu2 - path.n
