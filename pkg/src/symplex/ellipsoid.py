"""Ellipsoids ``sum_j (x_j^2 + y_j^2) / r_j^2 = 1`` as an exactly solvable test bed.

The planar circle in plane ``j`` has period ``pi r_j^2`` and its linearized
flow rotates plane ``k`` with angular speed ``2 / r_k^2``, so every
linearized path is a :class:`~symplex.paths.RotationProduct` with rational
turns whenever the squared radii are rational.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np
from scipy.integrate import solve_ivp

from .angles import UnitAnglePoint
from .core import SymmetryDescriptor, build_symmetry, matrix_power, rotation_diamond
from .errors import UnsupportedInputError
from .index import IndexRecord, maslov_type_index
from .iteration import check_symmetric_identity, iterate
from .jump import applicable_variants, multiplicity_bound, n1_inequality
from .paths import RotationProduct

COUNT_ASSUMPTION = (
    "for pairwise distinct squared radii the n planar circles are taken as the "
    "geometrically distinct closed characteristics; this is assumed, not derived"
)


def _fraction(x) -> Fraction:
    if isinstance(x, Fraction):
        return x
    if isinstance(x, str):
        return Fraction(x.strip())
    return Fraction(x).limit_denominator(10 ** 9) if isinstance(x, float) else Fraction(x)


@dataclass(frozen=True)
class EllipsoidSpec:
    radii_squared: tuple

    def __post_init__(self):
        vals = tuple(_fraction(r) for r in self.radii_squared)
        if not vals or any(r <= 0 for r in vals):
            raise ValueError("squared radii must be positive")
        object.__setattr__(self, "radii_squared", vals)

    @classmethod
    def parse(cls, text: str) -> "EllipsoidSpec":
        return cls(tuple(Fraction(p.strip()) for p in text.split(",") if p.strip()))

    @property
    def n(self) -> int:
        return len(self.radii_squared)

    @property
    def has_equal_radii(self) -> bool:
        return len(set(self.radii_squared)) < self.n

    def rational_pairs(self) -> list[tuple[int, int]]:
        """Pairs of planes whose period ratio is rational (always, for exact input)."""
        return [(j, k) for j in range(self.n) for k in range(j + 1, self.n)]

    def hamiltonian_gradient(self, z: np.ndarray) -> np.ndarray:
        w = np.array([float(2 / r) for r in self.radii_squared] * 2)
        return w * z


@dataclass
class OrbitDescriptor:
    plane: int
    period: float
    speeds: list  # exact angular speeds 2 / r_k^2
    path: RotationProduct

    def position(self, t: float, radius: float) -> np.ndarray:
        n = len(self.speeds)
        z = np.zeros(2 * n)
        ang = float(self.speeds[self.plane]) * t
        z[self.plane] = radius * math.cos(ang)
        z[n + self.plane] = radius * math.sin(ang)
        return z


def orbits(E: EllipsoidSpec) -> list[OrbitDescriptor]:
    speeds = [Fraction(2) / r for r in E.radii_squared]
    out = []
    for j, rj in enumerate(E.radii_squared):
        turns = [rj / rk for rk in E.radii_squared]
        tau = math.pi * float(rj)
        out.append(OrbitDescriptor(j, tau, speeds, RotationProduct(turns, tau)))
    return out


def flow_residual(E: EllipsoidSpec, j: int) -> float:
    """Max deviation between an integrated orbit and the closed-form circle over one period."""
    orb = orbits(E)[j]
    J = np.block([[np.zeros((E.n, E.n)), -np.eye(E.n)], [np.eye(E.n), np.zeros((E.n, E.n))]])
    radius = math.sqrt(float(E.radii_squared[j]))
    ts = np.linspace(0.0, orb.period, 33)
    sol = solve_ivp(lambda t, z: J @ E.hamiltonian_gradient(z), (0.0, orb.period), orb.position(0.0, radius),
                    t_eval=ts, rtol=1e-12, atol=1e-12, method="DOP853")
    exact = np.array([orb.position(t, radius) for t in ts]).T
    return float(np.max(np.abs(sol.y - exact)))


def orbit_index(E: EllipsoidSpec, j: int, m: int, omega: UnitAnglePoint) -> IndexRecord:
    """``(i_omega, nu_omega)`` of the ``m``-th iterate of orbit ``j`` by exact counting."""
    return maslov_type_index(iterate(orbits(E)[j].path, m), omega, "convex-count")


# -- P-symmetry ----------------------------------------------------------------


def p_symmetry_check(E: EllipsoidSpec, d: SymmetryDescriptor) -> dict:
    """Time shifts with ``P x(t + s) = x(t)`` for every planar orbit.

    Plane ``j`` is rotated by ``phi_j`` under ``P``; the shift solves
    ``2 s / r_j^2 = -phi_j`` mod ``2 pi``, i.e. ``s / tau_j = (-phi_j / 2pi) mod 1``.
    """
    if d.n != E.n:
        raise ValueError("descriptor and ellipsoid dimensions differ")
    P = build_symmetry(d)
    rows = []
    for orb in orbits(E):
        phi = d.block_turns[orb.plane]
        frac = Fraction(-phi) % 1
        if frac == 0:
            raise UnsupportedInputError("P fixes the orbit pointwise")
        l, k = frac.numerator, frac.denominator
        r = pow(l, -1, k)
        shift = float(frac) * orb.period
        radius = math.sqrt(float(E.radii_squared[orb.plane]))
        pointwise = max(
            float(np.max(np.abs(P @ orb.position(t + shift, radius) - orb.position(t, radius))))
            for t in np.linspace(0.0, orb.period, 17)
        )
        Pr = matrix_power(P, r)
        unit = max(
            float(np.max(np.abs(Pr @ orb.position(t + orb.period / k, radius) - orb.position(t, radius))))
            for t in np.linspace(0.0, orb.period, 17)
        )
        ok_id, resid = check_symmetric_identity(iterate(orb.path, l), P, l, k)
        rows.append({
            "plane": orb.plane,
            "shift": shift,
            "l": l,
            "k": k,
            "power": r,
            "unitShift": l == 1,
            "orbitResidual": pointwise,
            "powerResidual": unit,
            "pathIdentity": ok_id,
            "pathResidual": resid,
        })
    return {"orbits": rows, "allUnitShift": all(r["unitShift"] for r in rows)}


def symmetric_decomposition(E: EllipsoidSpec, d: SymmetryDescriptor, j: int):
    """``(hat_path, P^r, k)`` with the orbit's linearized path equal to ``hat_path^{k, P^r}``."""
    orb = orbits(E)[j]
    frac = Fraction(-d.block_turns[j]) % 1
    k = frac.denominator
    r = pow(frac.numerator, -1, k)
    # rebuilt from exact turns rather than by repeated multiplication
    Pr = rotation_diamond([(r * t) % 1 for t in d.block_turns])
    hat = RotationProduct([t / k for t in orb.path.turns], orb.period / k)
    return hat, Pr, k


def end_to_end_verification(E: EllipsoidSpec, d: SymmetryDescriptor) -> dict:
    """Orbit count versus the multiplicity bound, plus every applicable n1 margin."""
    report = {"n": E.n, "radiiSquared": [str(r) for r in E.radii_squared],
              "symmetry": {"m": d.m, "k": d.k, "sMinus": d.s_minus}}
    sym = p_symmetry_check(E, d)
    report["boundGeneral"] = multiplicity_bound(d)
    report["boundUnitShift"] = multiplicity_bound(d, unit_shift=True) if sym["allUnitShift"] else None
    bound = report["boundUnitShift"] if sym["allUnitShift"] else report["boundGeneral"]
    report["bound"] = bound
    if E.has_equal_radii:
        report["count"] = None
        report["countNote"] = f">= {E.n}, continuum possible"
        report["countCheck"] = None
    else:
        report["count"] = E.n
        report["countNote"] = COUNT_ASSUMPTION
        report["countCheck"] = E.n >= bound
    margins = []
    for j in range(E.n):
        hat, Pr, k = symmetric_decomposition(E, d, j)
        for variant in applicable_variants(Pr, k):
            res = n1_inequality(hat, Pr, k, variant)
            margins.append({"plane": j, "order": k, "power": sym["orbits"][j]["power"], **res.to_json()})
    report["shifts"] = sym["orbits"]
    report["margins"] = margins
    report["marginsOk"] = all(Fraction(m["margin"]) >= 0 for m in margins)
    report["ok"] = report["marginsOk"] and report["countCheck"] is not False
    return report
