"""Maslov-type indices of symplectic paths.

The graph index ``mu(Gr(omega I), Gr(P gamma))`` is computed from crossing
forms: every time ``t`` with ``ker(P gamma(t) - omega I) != 0`` contributes
``m+`` at the start, its signature in the interior and ``-m-`` at the end.
For paths with positive definite generator every crossing form is positive,
which gives the counting formula used by :func:`convex_count_index`.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from .angles import TWO_PI, UnitAnglePoint
from .core import kernel, nullity, standard_J, symplectic_inverse, unit_spectrum
from .errors import (
    CrossingResolutionError,
    DegenerateFormError,
    NonRegularCrossingError,
    UnsupportedInputError,
)
from .paths import RotationProduct, SymplecticPath

DEFAULT_GRID = 512
MAX_GRID = 2 ** 16
CROSSING_TOL = 1e-8
FORM_RTOL = 1e-8
OMEGA_PERTURBATION = 1e-9
ENDPOINT_GUARD = 1e-6
MERGE_TOL = 1e-7
SCREEN_FACTOR = 1.5
GOLDEN_WIDTH = 1e-5
V_SYMMETRY = 0.7
SUBDIVISION = 16
MAX_SUBDIVISION = 4


@dataclass
class CrossingRecord:
    t: float
    omega: UnitAnglePoint
    kernel_dim: int
    signature: int
    m_plus: int
    m_minus: int
    position: str  # "start", "interior", "joint" or "end"

    @property
    def contribution(self) -> int:
        if self.position == "start":
            return self.m_plus
        if self.position == "end":
            return -self.m_minus
        if self.position == "joint":
            return self.m_plus - self.m_minus
        return self.signature

    def to_json(self) -> dict:
        return {
            "t": self.t,
            "kernelDim": self.kernel_dim,
            "signature": self.signature,
            "mPlus": self.m_plus,
            "mMinus": self.m_minus,
            "position": self.position,
        }


@dataclass
class IndexRecord:
    omega: UnitAnglePoint
    n: int
    mu: int
    i_omega: int | None
    nu_omega: int
    method: str
    crossings: list[CrossingRecord] = field(default_factory=list)
    perturbed: bool = False

    def to_json(self) -> dict:
        out = {
            "omega": self.omega.to_json(),
            "muGraph": self.mu,
            "iOmega": self.i_omega,
            "nuOmega": self.nu_omega,
            "method": self.method,
            "crossings": [c.to_json() for c in self.crossings],
        }
        if self.perturbed:
            out["perturbed"] = True
        return out


# -- crossing forms ----------------------------------------------------------


def _form_signature(B: np.ndarray, K: np.ndarray) -> tuple[int, int]:
    G = K.conj().T @ B @ K
    ev = np.linalg.eigvalsh((G + G.conj().T) / 2)
    scale = max(np.linalg.norm(B, 2), 1e-300)
    if np.any(np.abs(ev) < FORM_RTOL * scale):
        raise DegenerateFormError(f"crossing form has eigenvalue {np.min(np.abs(ev)):.2e}")
    return int(np.sum(ev > 0)), int(np.sum(ev < 0))


def crossing_form(
    path: SymplecticPath,
    t0: float,
    omega: UnitAnglePoint,
    P=None,
    side: int = 1,
    position: str = "interior",
) -> CrossingRecord:
    """Crossing form of ``t -> P gamma(t)`` against ``Gr(omega I)`` at ``t0``.

    The form is ``u -> u^* B u`` on ``ker(P gamma(t0) - omega I)`` with
    ``B = -J (P gamma)'(t0) (P gamma(t0))^{-1}``.
    """
    M = path.evaluate(t0)
    D = path.derivative(t0, side)
    if P is not None:
        P = np.asarray(P, dtype=float)
        M, D = P @ M, P @ D
    dim = M.shape[0]
    K = kernel(M - omega.value * np.eye(dim)).basis
    if K.shape[1] == 0:
        raise ValueError(f"no crossing at t={t0}: kernel is trivial")
    B = -standard_J(dim // 2) @ D @ symplectic_inverse(M)
    B = (B + B.T) / 2
    mp, mm = _form_signature(B, K)
    return CrossingRecord(float(t0), omega, K.shape[1], mp - mm, mp, mm, position)


# -- crossing detection -------------------------------------------------------


def _sigma_min(seg: SymplecticPath, omega: UnitAnglePoint, ts, fast: bool = False) -> tuple[np.ndarray, np.ndarray]:
    """Smallest singular value of ``seg(t) - omega I`` and the matrices ``seg(t)`` on a grid.

    ``fast`` takes square roots of the smallest eigenvalue of ``C^* C``; that
    loses accuracy below about ``1e-8 |C|``, so small values are redone by SVD.
    """
    mats = seg.evaluate_many(ts)
    shifted = mats.astype(complex)
    idx = np.arange(mats.shape[1])
    shifted[:, idx, idx] -= omega.value
    if not fast:
        return np.linalg.svd(shifted, compute_uv=False)[:, -1], mats
    gram = np.conj(np.swapaxes(shifted, 1, 2)) @ shifted
    vals = np.sqrt(np.maximum(np.linalg.eigvalsh(gram)[:, 0], 0.0))
    scale = 1.0 + np.max(np.abs(mats), axis=(1, 2))
    redo = np.nonzero(vals < 1e-6 * scale)[0]
    if len(redo):
        vals[redo] = np.linalg.svd(shifted[redo], compute_uv=False)[:, -1]
    return vals, mats


def _sigma_min_at(seg: SymplecticPath, omega: UnitAnglePoint, t: float) -> float:
    M = seg.evaluate(t).astype(complex)
    M -= omega.value * np.eye(M.shape[0])
    return float(np.linalg.svd(M, compute_uv=False)[-1])


def _refine_many(seg: SymplecticPath, omega: UnitAnglePoint, a, b, T: float):
    """Minima of ``sigma_min`` on many cells at once.

    Golden-section narrows each cell to ``GOLDEN_WIDTH * T``; near a regular
    crossing ``sigma_min`` is V-shaped, so three fits ``t0 = a + f(a) (b - a) / (f(a) + f(b))``
    then land within rounding of the crossing.  The best evaluated point is
    returned, so the fits can only improve on the bracket.  (Scipy's bounded
    minimizer is not used: its built-in relative tolerance ``sqrt(eps) |x|``
    is too coarse away from ``t = 0``.)
    """
    g = (math.sqrt(5) - 1) / 2
    f = lambda x: _sigma_min(seg, omega, x)[0]  # noqa: E731
    f_fast = lambda x: _sigma_min(seg, omega, x, fast=True)[0]  # noqa: E731
    a, b = np.array(a, dtype=float), np.array(b, dtype=float)
    width = float(np.max(b - a))
    steps = max(0, math.ceil(math.log(max(width, GOLDEN_WIDTH * T) / (GOLDEN_WIDTH * T)) / math.log(1 / g)))
    c, d = b - g * (b - a), a + g * (b - a)
    fc, fd = f_fast(c), f_fast(d)
    for _ in range(steps):
        left = fc <= fd
        # left: keep [a, d] and the old c becomes the new d
        b = np.where(left, d, b)
        a = np.where(left, a, c)
        new_c = np.where(left, b - g * (b - a), d)
        new_d = np.where(left, c, a + g * (b - a))
        fp = f_fast(np.where(left, new_c, new_d))
        fc, fd = np.where(left, fp, fd), np.where(left, fc, fp)
        c, d = new_c, new_d
    pick = fc <= fd
    best_t, best_f = np.where(pick, c, d), np.where(pick, fc, fd)
    fa, fb = f(a), f(b)
    for _ in range(3):
        denom = fa + fb
        t1 = np.where(denom > 0, a + fa * (b - a) / np.where(denom > 0, denom, 1.0), (a + b) / 2)
        t1 = np.clip(t1, a, b)
        slope = np.where(b > a, denom / np.where(b > a, b - a, 1.0), 0.0)
        f1 = f(t1)
        better = f1 < best_f
        best_t, best_f = np.where(better, t1, best_t), np.where(better, f1, best_f)
        half = np.where(slope > 0, 2 * f1 / np.where(slope > 0, slope, 1.0), 0.0) + 1e-15 * T
        a, b = np.maximum(a, t1 - half), np.minimum(b, t1 + half)
        fa, fb = f(a), f(b)
    return best_t, best_f


def _scan(seg: SymplecticPath, omega: UnitAnglePoint, grid: int, coarse=None):
    """Crossings found on a ``grid``-cell scan, plus the sampled data for reuse.

    ``coarse`` is the data of the scan at ``grid // 2``; its points are the
    even points of this grid and are not recomputed.
    """
    T = seg.tau
    ts = np.linspace(0.0, T, grid + 1)
    if coarse is None:
        s, mats = _sigma_min(seg, omega, ts, fast=True)
    else:
        s_odd, m_odd = _sigma_min(seg, omega, ts[1::2], fast=True)
        s = np.empty(grid + 1)
        mats = np.empty((grid + 1,) + m_odd.shape[1:])
        s[0::2], mats[0::2] = coarse
        s[1::2], mats[1::2] = s_odd, m_odd
    # near a singular endpoint sigma_min is small on a whole neighbourhood;
    # anything that close belongs to the endpoint, not to the interior
    scale0 = max(1.0, float(np.max(np.abs(mats[0]))))
    scale1 = max(1.0, float(np.max(np.abs(mats[-1]))))
    lo_cut = ENDPOINT_GUARD * T if s[0] <= CROSSING_TOL * scale0 else 1e-10 * T
    hi_cut = ENDPOINT_GUARD * T if s[-1] <= CROSSING_TOL * scale1 else 1e-10 * T
    hits = _cell_crossings(seg, omega, ts, s, mats, 0)
    found: list[tuple[float, int]] = []
    for t_star, M in sorted(hits, key=lambda h: h[0]):
        if t_star < lo_cut or t_star > T - hi_cut:
            continue
        if found and abs(found[-1][0] - t_star) <= MERGE_TOL * T:
            continue
        found.append((t_star, kernel(M - omega.value * np.eye(M.shape[0])).dim))
    return found, (s, mats)


def _cell_crossings(seg: SymplecticPath, omega: UnitAnglePoint, ts, s, mats, depth: int) -> list:
    """Singular points inside the cells of one sampled grid, as ``(t, seg(t))``."""
    T = seg.tau
    # Weyl: a singular point t* inside a cell gives s_i <= |M(t_i) - M(t*)| and
    # s_{i+1} <= |M(t_{i+1}) - M(t*)|, so s_i + s_{i+1} is at most the cell's
    # variation up to curvature; screening on that cannot miss a crossing
    # (local minima of sigma_min can, when two crossings share a cell).
    # Frobenius bounds the spectral norm from above, so the screen stays safe.
    variation = np.linalg.norm(np.diff(mats, axis=0), axis=(1, 2))
    cells = np.nonzero(s[:-1] + s[1:] <= SCREEN_FACTOR * variation + CROSSING_TOL)[0]
    if len(cells) == 0:
        return []
    t_cells, f_cells = _refine_many(seg, omega, ts[cells], ts[cells + 1], T)
    hits = []
    for i, t_star, f_star in zip(cells, t_cells, f_cells):
        for j in (i, i + 1):
            if s[j] < f_star:
                t_star, f_star = ts[j], s[j]
        t_star = float(t_star)
        M = seg.evaluate(t_star)
        if f_star > CROSSING_TOL * max(1.0, float(np.max(np.abs(M)))):
            continue
        hits.append((t_star, M))
        # a lone regular crossing makes sigma_min a symmetric V on the cell;
        # lopsided slopes mean another singular point may hide in the cell
        left, right = t_star - ts[i], ts[i + 1] - t_star
        width = ts[i + 1] - ts[i]
        if depth >= MAX_SUBDIVISION or min(left, right) <= 1e-3 * width:
            continue
        slope_l, slope_r = (s[i] - f_star) / left, (s[i + 1] - f_star) / right
        if min(slope_l, slope_r) >= V_SYMMETRY * max(slope_l, slope_r):
            continue
        sub_ts = np.linspace(ts[i], ts[i + 1], SUBDIVISION + 1)
        sub_s, sub_m = _sigma_min(seg, omega, sub_ts[1:-1], fast=True)
        sub_s = np.concatenate([[s[i]], sub_s, [s[i + 1]]])
        sub_m = np.concatenate([mats[i:i + 1], sub_m, mats[i + 1:i + 2]])
        hits.extend(_cell_crossings(seg, omega, sub_ts, sub_s, sub_m, depth + 1))
    return hits


def _same_crossings(a, b, tol) -> bool:
    return len(a) == len(b) and all(abs(x[0] - y[0]) <= tol and x[1] == y[1] for x, y in zip(a, b))


def interior_crossings(seg: SymplecticPath, omega: UnitAnglePoint, grid: int = DEFAULT_GRID):
    """Interior crossing times and kernel dimensions of one smooth segment.

    The scan is repeated on a doubled grid until two consecutive grids agree.
    """
    prev, data = _scan(seg, omega, grid)
    while True:
        grid *= 2
        if grid > MAX_GRID:
            raise CrossingResolutionError(f"crossings for omega={omega} unresolved at grid {MAX_GRID}")
        cur, data = _scan(seg, omega, grid, data)
        if _same_crossings(prev, cur, 1e-9 * seg.tau):
            return cur
        prev = cur


def _endpoint_dim(seg: SymplecticPath, omega: UnitAnglePoint, t: float) -> int:
    return nullity(seg.evaluate(t), omega)


def _segments_with_offsets(path: SymplecticPath, P):
    out, offset = [], 0.0
    for seg in path.segments():
        if P is not None:
            seg = seg.left_multiply(P)
        out.append((offset, seg))
        offset += seg.tau
    return out


# -- exact enumeration on rotation products ------------------------------------


def _floor(x):
    return math.floor(x) if isinstance(x, Fraction) else math.floor(x + 1e-12)


def _ceil(x):
    return math.ceil(x) if isinstance(x, Fraction) else math.ceil(x - 1e-12)


def rotation_crossings(rp: RotationProduct, omega: UnitAnglePoint):
    """Crossings of ``rp`` with ``omega`` as ``(s, dim, m_plus, m_minus)``, ``s = t / tau``.

    Block ``k`` has eigenvalues ``exp(+-2 pi i (phase_k + turns_k s))``; each
    solution of ``phase_k + turns_k s = +-theta (mod 1)`` adds one kernel
    dimension whose crossing form has the sign of ``turns_k``.  With exact
    (Fraction) data the enumeration is exact.
    """
    theta = omega.turn_value
    targets = [theta % 1, (-theta) % 1]
    if targets[0] == targets[1] or (not isinstance(theta, Fraction) and abs(targets[0] - targets[1]) < 1e-12):
        targets = [targets[0], targets[0]]
    acc: dict = {}
    for ph, tu in zip(rp.phases, rp.turns):
        for c in targets:
            if tu == 0:
                if (ph - c) % 1 == 0:
                    raise NonRegularCrossingError("a non-rotating block sits on omega")
                continue
            lo, hi = (ph - c, tu + ph - c) if tu > 0 else (tu + ph - c, ph - c)
            for j in range(_ceil(lo), _floor(hi) + 1):
                s = (c - ph + j) / tu
                if not isinstance(s, Fraction):
                    s = 0.0 if abs(s) < 1e-12 else 1.0 if abs(s - 1) < 1e-12 else s
                key = s
                if not isinstance(s, Fraction):
                    for k in acc:
                        if abs(float(k) - s) < 1e-12:
                            key = k
                            break
                d, p, m = acc.get(key, (0, 0, 0))
                acc[key] = (d + 1, p + (tu > 0), m + (tu < 0))
    return sorted(((s,) + v for s, v in acc.items()), key=lambda r: float(r[0]))


def _rotation_index(rp: RotationProduct, omega: UnitAnglePoint, method: str) -> IndexRecord:
    rows = rotation_crossings(rp, omega)
    records = []
    for s, d, p, m in rows:
        pos = "start" if s == 0 else "end" if s == 1 else "interior"
        records.append(CrossingRecord(float(s) * rp.tau, omega, d, p - m, p, m, pos))
    mu = sum(r.contribution for r in records)
    nu_end = sum(r.kernel_dim for r in records if r.position == "end")
    return IndexRecord(omega, rp.n, mu, None, nu_end, method, records)


# -- indices -------------------------------------------------------------------


def _mu_crossing_form(path: SymplecticPath, omega: UnitAnglePoint, P, grid: int) -> IndexRecord:
    segs = _segments_with_offsets(path, P)
    records: list[CrossingRecord] = []
    last = len(segs) - 1
    pending_left = None  # left-side form at a joint, waiting for the right side
    for k, (offset, seg) in enumerate(segs):
        if _endpoint_dim(seg, omega, 0.0):
            right = crossing_form(seg, 0.0, omega, side=1, position="start")
            if k == 0:
                right.t = offset
                records.append(right)
            else:
                left_minus = pending_left.m_minus if pending_left is not None else 0
                records.append(CrossingRecord(
                    offset, omega, right.kernel_dim, right.m_plus - left_minus,
                    right.m_plus, left_minus, "joint"))
        for t, _ in interior_crossings(seg, omega, grid):
            rec = crossing_form(seg, t, omega, side=1)
            rec.t = offset + t
            records.append(rec)
        pending_left = None
        if _endpoint_dim(seg, omega, seg.tau):
            rec = crossing_form(seg, seg.tau, omega, side=-1, position="end")
            rec.t = offset + seg.tau
            if k == last:
                records.append(rec)
            else:
                pending_left = rec
    mu = sum(r.contribution for r in records)
    nu_end = nullity(segs[-1][1].evaluate(segs[-1][1].tau), omega)
    return IndexRecord(omega, path.n, mu, None, nu_end, "crossing-form", records)


def mu_graph_index(path: SymplecticPath, omega: UnitAnglePoint, P=None, grid: int = DEFAULT_GRID) -> IndexRecord:
    """``mu(Gr(omega I), Gr(P gamma))`` from crossing forms.

    Non-regular crossings are handled by recomputing at ``omega`` rotated by
    ``+-1e-9`` rad; both results must agree.
    """
    try:
        return _mu_crossing_form(path, omega, P, grid)
    except DegenerateFormError as exc:
        plus = _mu_crossing_form(path, omega.rotate(OMEGA_PERTURBATION), P, grid)
        minus = _mu_crossing_form(path, omega.rotate(-OMEGA_PERTURBATION), P, grid)
        if plus.mu != minus.mu:
            raise NonRegularCrossingError(
                f"degenerate crossing at omega={omega}; perturbed indices {plus.mu} != {minus.mu}"
            ) from exc
        plus.omega = omega
        plus.perturbed = True
        plus.nu_omega = nullity(path.end if P is None else np.asarray(P) @ path.end, omega)
        return plus


def convex_count_index(path: SymplecticPath, omega: UnitAnglePoint, P=None, grid: int = DEFAULT_GRID) -> IndexRecord:
    """``nu_omega(P) + sum_{0<t<tau} nu_omega(P gamma(t))`` for positive definite generators."""
    if not path.positive:
        raise UnsupportedInputError("convex counting needs a positive definite generator")
    target = path if P is None else path.left_multiply(P)
    if isinstance(target, RotationProduct):
        return _rotation_index(target, omega, "convex-count")
    segs = _segments_with_offsets(path, P)
    records: list[CrossingRecord] = []
    for k, (offset, seg) in enumerate(segs):
        d0 = _endpoint_dim(seg, omega, 0.0)
        if d0:
            pos = "start" if k == 0 else "joint"
            records.append(CrossingRecord(offset, omega, d0, d0, d0, 0, pos))
        for t, d in interior_crossings(seg, omega, grid):
            records.append(CrossingRecord(offset + t, omega, d, d, d, 0, "interior"))
    end_seg = segs[-1][1]
    d1 = _endpoint_dim(end_seg, omega, end_seg.tau)
    if d1:
        records.append(CrossingRecord(segs[-1][0] + end_seg.tau, omega, d1, d1, d1, 0, "end"))
    mu = sum(r.contribution for r in records)
    return IndexRecord(omega, path.n, mu, None, d1, "convex-count", records)


def graph_index(path: SymplecticPath, omega: UnitAnglePoint, P=None, method: str = "auto",
                grid: int = DEFAULT_GRID) -> IndexRecord:
    """Dispatch between counting (positive generators) and crossing forms."""
    if method == "auto":
        method = "convex-count" if path.positive else "crossing-form"
    if method == "convex-count":
        return convex_count_index(path, omega, P, grid)
    if method == "crossing-form":
        return mu_graph_index(path, omega, P, grid)
    raise ValueError(f"unknown method {method!r}")


def maslov_type_index(path: SymplecticPath, omega: UnitAnglePoint, method: str = "auto",
                      grid: int = DEFAULT_GRID) -> IndexRecord:
    """``(i_omega, nu_omega)`` of a path starting at the identity.

    ``i_omega = mu(Gr(omega I), Gr(gamma)) - n`` when ``omega = 1`` and
    ``mu`` itself otherwise.
    """
    if not path.starts_at_identity:
        raise UnsupportedInputError("Maslov-type index needs a path starting at the identity")
    rec = graph_index(path, omega, None, method, grid)
    rec.i_omega = rec.mu - (path.n if omega.is_one else 0)
    return rec


def i_omega(path: SymplecticPath, omega: UnitAnglePoint, method: str = "auto") -> int:
    return maslov_type_index(path, omega, method).i_omega


# -- mean index ----------------------------------------------------------------


@dataclass
class MeanIndex:
    value: float
    exact: Fraction | None
    error_bound: float
    method: str


def mean_index(path: SymplecticPath, method: str = "auto", grid: int = 1024) -> MeanIndex:
    """Average of ``omega -> i_omega(gamma)`` over the unit circle.

    Rotation products give ``sum_k 2 turns_k`` exactly.  Otherwise
    ``method="arcs"`` (the default) evaluates ``i_omega`` once on each arc
    between consecutive unit eigenvalues of ``gamma(tau)``, where it is
    constant, and ``method="grid"`` averages over ``grid`` uniform angles with
    error bound ``2n / grid``.
    """
    if method == "auto":
        if isinstance(path, RotationProduct) and path.starts_at_identity:
            total = sum(2 * x for x in path.turns)
            exact = Fraction(total) if path.exact else None
            return MeanIndex(float(total), exact, 0.0, "rotation")
        method = "arcs"
    cuts = sorted(p.radians for p, _ in unit_spectrum(path.end))
    if method == "arcs":
        if not cuts:
            return MeanIndex(float(i_omega(path, UnitAnglePoint.from_radians(1.0, snap=False))), None, 0.0, "arcs")
        bounds = cuts + [cuts[0] + TWO_PI]
        total = 0.0
        for a, b in zip(bounds, bounds[1:]):
            if b - a <= 0:
                continue
            mid = UnitAnglePoint.from_radians((a + b) / 2, snap=False)
            total += (b - a) * i_omega(path, mid)
        return MeanIndex(total / TWO_PI, None, 0.0, "arcs")
    if method == "grid":
        vals = []
        for j in range(grid):
            theta = TWO_PI * (j + 0.5) / grid
            if any(min(abs(theta - c), TWO_PI - abs(theta - c)) < 1e-9 for c in cuts):
                continue
            vals.append(i_omega(path, UnitAnglePoint.from_radians(theta, snap=False)))
        return MeanIndex(float(np.mean(vals)), None, 2 * path.n / grid, "grid")
    raise ValueError(f"unknown method {method!r}")
