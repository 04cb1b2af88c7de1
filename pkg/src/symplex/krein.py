"""Krein type numbers, nullities and splitting numbers.

Splitting numbers come from two independent routes:

* ``diagonalizable-shortcut``: when ``omega`` is a semisimple eigenvalue,
  ``(S+, S-)`` equals the Krein pair ``(P_omega, Q_omega)``;
* ``path-limit``: ``S+- = i_{exp(+-i eps) omega}(gamma) - i_omega(gamma)``
  for any path ``gamma`` from the identity ending at ``M``.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .angles import UnitAnglePoint
from .core import generalized_eigenspace, nullity, standard_J, unit_eigen_gap, unit_spectrum
from .errors import DegenerateFormError, SymplexError, UnsupportedInputError

KREIN_RTOL = 1e-8
MIN_EPSILON = 1e-6


@dataclass(frozen=True)
class KreinPair:
    p_omega: int
    q_omega: int

    @property
    def dim(self) -> int:
        return self.p_omega + self.q_omega


@dataclass(frozen=True)
class SplittingPair:
    s_plus: int
    s_minus: int
    method: str

    def pair(self) -> tuple[int, int]:
        return self.s_plus, self.s_minus


def krein_numbers(M, omega: UnitAnglePoint) -> KreinPair:
    """Signature counts of ``u -> u^* (iJ) u`` on the generalized eigenspace ``E_omega``."""
    M = np.asarray(M, dtype=float)
    E = generalized_eigenspace(M, omega)
    if E.dim == 0:
        return KreinPair(0, 0)
    B = E.basis
    G = B.conj().T @ (1j * standard_J(M.shape[0] // 2)) @ B
    ev = np.linalg.eigvalsh((G + G.conj().T) / 2)
    if np.any(np.abs(ev) < KREIN_RTOL * np.max(np.abs(ev))):
        raise DegenerateFormError(f"iJ is numerically degenerate on E_omega for omega={omega}")
    return KreinPair(int(np.sum(ev > 0)), int(np.sum(ev < 0)))


def is_semisimple_at(M, omega: UnitAnglePoint) -> bool:
    """Whether ``ker(M - omega I)`` is the whole generalized eigenspace."""
    return nullity(M, omega) == generalized_eigenspace(M, omega).dim


def limit_epsilon(M, omega: UnitAnglePoint) -> float:
    """Angular step for the one-sided limits: an eighth of the smallest eigen-angle gap."""
    return max(unit_eigen_gap(M, omega) / 8, MIN_EPSILON)


def splitting_by_path(path, omega: UnitAnglePoint, method: str = "auto") -> SplittingPair:
    from .index import i_omega

    M = path.end
    eps = limit_epsilon(M, omega)
    base = i_omega(path, omega, method)
    up = i_omega(path, omega.rotate(eps), method)
    down = i_omega(path, omega.rotate(-eps), method)
    return SplittingPair(up - base, down - base, "path-limit")


def splitting_numbers(M, omega: UnitAnglePoint, path=None, method: str = "auto") -> SplittingPair:
    """``(S+_M(omega), S-_M(omega))``.

    ``method`` is ``"auto"`` (shortcut when ``omega`` is semisimple, else the
    path limit), ``"shortcut"``, ``"path-limit"`` or ``"both"`` (compute both
    and require agreement).
    """
    M = np.asarray(M, dtype=float)
    if path is not None and np.max(np.abs(path.end - M)) > 1e-8 * max(1.0, np.max(np.abs(M))):
        raise ValueError("path does not end at M")
    semisimple = is_semisimple_at(M, omega)
    if method == "auto":
        method = "shortcut" if semisimple else "path-limit"
    if method in ("shortcut", "both") and not semisimple:
        raise UnsupportedInputError(f"omega={omega} is not a semisimple eigenvalue; the shortcut does not apply")
    if method in ("path-limit", "both") and path is None:
        raise UnsupportedInputError("path-limit splitting numbers need a generating path")
    if method == "shortcut":
        k = krein_numbers(M, omega)
        return SplittingPair(k.p_omega, k.q_omega, "diagonalizable-shortcut")
    if method == "path-limit":
        return splitting_by_path(path, omega)
    if method == "both":
        k = krein_numbers(M, omega)
        lim = splitting_by_path(path, omega)
        if (k.p_omega, k.q_omega) != lim.pair():
            raise SymplexError(f"shortcut {(k.p_omega, k.q_omega)} and path limit {lim.pair()} disagree at {omega}")
        return SplittingPair(k.p_omega, k.q_omega, "both")
    raise ValueError(f"unknown method {method!r}")


def spectral_table(M, path=None) -> list[dict]:
    """Every spectral quantity at each unit eigenvalue of ``M``."""
    rows = []
    for omega, mult in unit_spectrum(M):
        k = krein_numbers(M, omega)
        s = splitting_numbers(M, omega, path)
        rows.append({
            "omega": omega.to_json(),
            "multiplicity": mult,
            "sPlus": s.s_plus,
            "sMinus": s.s_minus,
            "pOmega": k.p_omega,
            "qOmega": k.q_omega,
            "nullity": nullity(M, omega),
        })
    return rows
