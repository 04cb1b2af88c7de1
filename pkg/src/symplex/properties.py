"""Identities satisfied by splitting numbers, Krein numbers and nullities.

Each check takes a :class:`~symplex.corpus.DiagonalizableSample` (or a
pair of them) and returns ``(name, ok, detail)``.
"""

from __future__ import annotations

import numpy as np

from .angles import UnitAnglePoint
from .core import diamond, generalized_eigenspace, nullity, random_symplectic, symplectic_inverse, unit_spectrum
from .corpus import DiagonalizableSample, random_diagonalizable
from .index import i_omega
from .krein import krein_numbers, splitting_numbers

PROPERTY_NAMES = (
    "nonnegativity",
    "off-spectrum-zero",
    "conjugation",
    "krein-balance",
    "dimension-bound",
    "additivity",
    "similarity",
    "nullity-bounds",
    "krein-conjugation",
    "sum-bound",
    "rotation-formula",
)


def _points(M) -> list[UnitAnglePoint]:
    return [w for w, _ in unit_spectrum(M)]


def _split(M, w):
    return splitting_numbers(M, w).pair()


def check_nonnegativity(s: DiagonalizableSample):
    M = s.matrix
    bad = [str(w) for w in _points(M) if min(_split(M, w)) < 0]
    return "nonnegativity", not bad, bad


def check_off_spectrum(s: DiagonalizableSample, rng: np.random.Generator):
    M = s.matrix
    spec = _points(M)
    probes = []
    while len(probes) < 3:
        w = UnitAnglePoint.from_radians(float(rng.uniform(0, 2 * np.pi)), snap=False)
        if all(w.distance(p) > 1e-3 for p in spec):
            probes.append(w)
    bad = [str(w) for w in probes if _split(M, w) != (0, 0) or nullity(M, w) != 0]
    return "off-spectrum-zero", not bad, bad


def check_conjugation(s: DiagonalizableSample):
    M = s.matrix
    bad = []
    for w in _points(M):
        sp, sm = _split(M, w)
        cp, cm = _split(M, w.conj())
        if (sp, sm) != (cm, cp) or nullity(M, w) != nullity(M, w.conj()):
            bad.append(str(w))
    return "conjugation", not bad, bad


def check_krein_balance(s: DiagonalizableSample):
    M = s.matrix
    bad = []
    for w in _points(M):
        k = krein_numbers(M, w)
        sp, sm = _split(M, w)
        if not (k.p_omega - sp == k.q_omega - sm >= 0):
            bad.append(str(w))
    return "krein-balance", not bad, bad


def check_dimension_bound(s: DiagonalizableSample):
    M = s.matrix
    bad = [str(w) for w in _points(M) if sum(_split(M, w)) > generalized_eigenspace(M, w).dim]
    return "dimension-bound", not bad, bad


def check_additivity(a: DiagonalizableSample, b: DiagonalizableSample):
    Ma, Mb = a.matrix, b.matrix
    Mab = diamond(Ma, Mb)
    bad = []
    for w in _points(Mab):
        sa, sb, sab = _split(Ma, w), _split(Mb, w), _split(Mab, w)
        if sab != (sa[0] + sb[0], sa[1] + sb[1]):
            bad.append(str(w))
    return "additivity", not bad, bad


def check_similarity(s: DiagonalizableSample, rng: np.random.Generator):
    M = s.matrix
    G = random_symplectic(s.n, rng, 0.3)
    N = G @ M @ symplectic_inverse(G)
    bad = [str(w) for w in _points(M) if _split(M, w) != _split(N, w)]
    return "similarity", not bad, bad


def check_nullity_bounds(s: DiagonalizableSample):
    M = s.matrix
    bad = []
    for w in _points(M):
        k = krein_numbers(M, w)
        sp, sm = _split(M, w)
        nu = nullity(M, w)
        if not (0 <= nu - sm <= k.p_omega and 0 <= nu - sp <= k.q_omega):
            bad.append(str(w))
    return "nullity-bounds", not bad, bad


def check_krein_conjugation(s: DiagonalizableSample):
    M = s.matrix
    bad = []
    for w in _points(M):
        k, kc = krein_numbers(M, w), krein_numbers(M, w.conj())
        if (k.p_omega, k.q_omega) != (kc.q_omega, kc.p_omega):
            bad.append(str(w))
    return "krein-conjugation", not bad, bad


def check_sum_bound(s: DiagonalizableSample):
    M = s.matrix
    pts = _points(M)
    nu = sum(nullity(M, w) for w in pts)
    ks = [krein_numbers(M, w) for w in pts]
    p = sum(k.p_omega for k in ks)
    q = sum(k.q_omega for k in ks)
    ok = nu <= 2 * p and p == q <= s.n
    return "sum-bound", ok, {"nu": nu, "P": p, "Q": q}


def check_rotation_formula(s: DiagonalizableSample, rng: np.random.Generator):
    """``i_{e^{i a}} = i_1 + sum_{0 <= theta < a} S+ - sum_{0 < theta <= a} S-`` at a generic angle."""
    M = s.matrix
    spec = unit_spectrum(M)
    while True:
        a = float(rng.uniform(0.05, 2 * np.pi - 0.05))
        if all(abs(a - (w.radians % (2 * np.pi))) > 1e-3 for w, _ in spec):
            break
    rhs = i_omega(s.path, UnitAnglePoint.one())
    for w, _ in spec:
        ang = w.radians % (2 * np.pi)
        if w.is_one:
            ang = 0.0
        sp, sm = _split(M, w)
        if ang < a:
            rhs += sp
        if 0 < ang <= a:
            rhs -= sm
    lhs = i_omega(s.path, UnitAnglePoint.from_radians(a, snap=False))
    return "rotation-formula", lhs == rhs, {"angle": a, "lhs": lhs, "rhs": rhs}


def run_all(s: DiagonalizableSample, rng: np.random.Generator) -> list[tuple[str, bool, object]]:
    """All eleven checks on one sample; additivity pairs it with a fresh sample."""
    partner = random_diagonalizable(max(1, 4 - s.n) if s.n < 4 else 1, rng)
    if s.n + partner.n > 4:
        partner = random_diagonalizable(1, rng)
    return [
        check_nonnegativity(s),
        check_off_spectrum(s, rng),
        check_conjugation(s),
        check_krein_balance(s),
        check_dimension_bound(s),
        check_additivity(s, partner),
        check_similarity(s, rng),
        check_nullity_bounds(s),
        check_krein_conjugation(s),
        check_sum_bound(s),
        check_rotation_formula(s, rng),
    ]
