"""Symplectic paths ``gamma: [0, tau] -> Sp(2n)``.

Every path can be evaluated at a time and (except :class:`Sampled`)
differentiated.  Paths built by concatenation expose their smooth pieces
through :meth:`SymplecticPath.segments`; the index engine works piece by
piece so that kinks at the joints are handled exactly.
"""

from __future__ import annotations

import math
from fractions import Fraction

import numpy as np
import scipy.linalg

from .angles import TWO_PI, exact_cos_sin
from .core import half_dim, rotation_angles, standard_J, symplectic_defect, symplectic_inverse
from .errors import UnsupportedInputError

TIME_TOL = 1e-12
JOINT_TOL = 1e-9


def _is_exact(x) -> bool:
    return isinstance(x, (int, Fraction))


def _snap_turns(x, tol: float = 1e-12):
    """Turn a float into a small-denominator Fraction when it is one to ``tol``."""
    if _is_exact(x):
        return Fraction(x)
    frac = Fraction(float(x)).limit_denominator(10_000)
    if abs(float(frac) - float(x)) <= tol * max(1.0, abs(float(x))):
        return frac
    return float(x)


class SymplecticPath:
    """Base class.  Subclasses set ``n`` and ``tau`` and implement evaluation."""

    n: int
    tau: float

    def _check_time(self, t: float) -> float:
        t = float(t)
        if t < -TIME_TOL * max(1.0, self.tau) or t > self.tau * (1 + TIME_TOL) + TIME_TOL:
            raise ValueError(f"t={t} outside [0, {self.tau}]")
        return min(max(t, 0.0), self.tau)

    def evaluate(self, t: float) -> np.ndarray:
        raise NotImplementedError

    __call__ = evaluate

    def evaluate_many(self, ts) -> np.ndarray:
        return np.stack([self.evaluate(t) for t in ts])

    def derivative(self, t: float, side: int = 1) -> np.ndarray:
        """Time derivative; ``side`` picks the one-sided derivative at joints."""
        raise UnsupportedInputError(f"{type(self).__name__} has no derivative")

    def generator(self, t: float, side: int = 1) -> np.ndarray:
        """The symmetric matrix ``B(t) = -J gamma'(t) gamma(t)^{-1}``."""
        J = standard_J(self.n)
        B = -J @ self.derivative(t, side) @ symplectic_inverse(self.evaluate(t))
        return (B + B.T) / 2

    @property
    def positive(self) -> bool:
        """Whether the generator is positive definite at every time."""
        return False

    @property
    def starts_at_identity(self) -> bool:
        return bool(np.allclose(self.evaluate(0.0), np.eye(2 * self.n), atol=1e-12))

    @property
    def end(self) -> np.ndarray:
        return self.evaluate(self.tau)

    def segments(self) -> list["SymplecticPath"]:
        return [self]

    def left_multiply(self, L) -> "SymplecticPath":
        return Transformed(self, left=L)

    def max_defect(self, samples: int = 33) -> float:
        return max(symplectic_defect(self.evaluate(t)) for t in np.linspace(0, self.tau, samples))


class RotationProduct(SymplecticPath):
    """``t -> <>_k R(2 pi (phase_k + turns_k * t / tau))``.

    ``turns`` and ``phases`` are measured in full turns; pass
    :class:`Fraction` values to keep crossing enumeration exact.
    """

    def __init__(self, turns, tau: float, phases=None):
        self.turns = [_snap_turns(x) for x in turns]
        if not self.turns:
            raise ValueError("need at least one block")
        self.n = len(self.turns)
        self.tau = float(tau)
        if self.tau <= 0:
            raise ValueError("tau must be positive")
        if phases is None:
            phases = [Fraction(0)] * self.n
        if len(phases) != self.n:
            raise ValueError("phases and turns differ in length")
        self.phases = [(_snap_turns(p) % 1) for p in phases]

    @classmethod
    def from_speeds(cls, speeds, tau: float, phases=None) -> "RotationProduct":
        """Blocks rotating at ``speeds`` radians per unit time."""
        return cls([s * tau / TWO_PI for s in speeds], tau, phases)

    @property
    def speeds(self) -> np.ndarray:
        return np.array([TWO_PI * float(x) / self.tau for x in self.turns])

    @property
    def exact(self) -> bool:
        return all(_is_exact(x) for x in self.turns + self.phases)

    @property
    def positive(self) -> bool:
        return all(x > 0 for x in self.turns)

    @property
    def starts_at_identity(self) -> bool:
        return all(p == 0 for p in self.phases) if self.exact else super().starts_at_identity

    def block_turns_at(self, t: float) -> list:
        s = t / self.tau
        return [p + x * s for p, x in zip(self.phases, self.turns)]

    def evaluate(self, t: float) -> np.ndarray:
        t = self._check_time(t)
        n = self.n
        out = np.zeros((2 * n, 2 * n))
        if t == self.tau:
            angles = [p + x for p, x in zip(self.phases, self.turns)]
        elif t == 0.0:
            angles = list(self.phases)
        else:
            angles = self.block_turns_at(t)
        for k, a in enumerate(angles):
            c, s = exact_cos_sin(a)
            out[k, k] = out[n + k, n + k] = c
            out[k, n + k] = -s
            out[n + k, k] = s
        return out

    def evaluate_many(self, ts) -> np.ndarray:
        ts = np.asarray(ts, dtype=float)
        n = self.n
        ph = np.array([float(p) for p in self.phases])
        tu = np.array([float(x) for x in self.turns])
        ang = TWO_PI * (ph[None, :] + np.outer(ts / self.tau, tu))
        c, s = np.cos(ang), np.sin(ang)
        out = np.zeros((len(ts), 2 * n, 2 * n))
        idx = np.arange(n)
        out[:, idx, idx] = c
        out[:, n + idx, n + idx] = c
        out[:, idx, n + idx] = -s
        out[:, n + idx, idx] = s
        return out

    def derivative(self, t: float, side: int = 1) -> np.ndarray:
        n = self.n
        sp = np.concatenate([self.speeds, self.speeds])
        return standard_J(n) @ (sp[:, None] * self.evaluate(t))

    def generator(self, t: float, side: int = 1) -> np.ndarray:
        return np.diag(np.concatenate([self.speeds, self.speeds]))

    def left_multiply(self, L) -> SymplecticPath:
        angles = rotation_angles(L)
        if angles is None:
            return Transformed(self, left=L)
        return RotationProduct(self.turns, self.tau, [p + a for p, a in zip(self.phases, angles)])

    def to_json(self) -> dict:
        rep = {
            "rotationSpeeds": self.speeds.tolist(),
            "rotationTurns": [str(x) for x in self.turns],
        }
        if any(p != 0 for p in self.phases):
            rep["rotationPhases"] = [str(p) for p in self.phases]
        return {"n": self.n, "tau": self.tau, "rep": rep}

    def __repr__(self):
        return f"RotationProduct(turns={[str(x) for x in self.turns]}, tau={self.tau:g})"


class ConstantGenerator(SymplecticPath):
    """``gamma(t) = expm(t J A)`` with ``A`` symmetric."""

    def __init__(self, A, tau: float):
        A = np.asarray(A, dtype=float)
        if not np.allclose(A, A.T, atol=1e-12):
            raise ValueError("generator must be symmetric")
        self.A = (A + A.T) / 2
        self.n = half_dim(A)
        self.tau = float(tau)
        self._JA = standard_J(self.n) @ self.A
        self._modes = self._diagonalize()

    def _diagonalize(self):
        """Eigen-decomposition of ``J A`` when it is well conditioned, else ``None``."""
        w, V = np.linalg.eig(self._JA)
        if np.linalg.cond(V) > 1e6:
            return None
        V_inv = np.linalg.inv(V)
        if np.max(np.abs((V * w) @ V_inv - self._JA)) > 1e-12 * max(1.0, np.max(np.abs(self._JA))):
            return None
        return w, V, V_inv

    def evaluate(self, t: float) -> np.ndarray:
        return scipy.linalg.expm(self._check_time(t) * self._JA)

    def evaluate_many(self, ts) -> np.ndarray:
        ts = np.asarray(ts, dtype=float)
        if self._modes is not None and len(ts) > 1:
            w, V, V_inv = self._modes
            phases = np.exp(np.multiply.outer(ts, w))
            return ((V[None, :, :] * phases[:, None, :]) @ V_inv).real
        if len(ts) > 2 and np.allclose(np.diff(ts), ts[1] - ts[0], rtol=1e-12, atol=0):
            # uniform grid: step by a fixed exponential
            step = scipy.linalg.expm((ts[1] - ts[0]) * self._JA)
            out = np.empty((len(ts), 2 * self.n, 2 * self.n))
            out[0] = self.evaluate(ts[0])
            for i in range(1, len(ts)):
                out[i] = step @ out[i - 1]
                if i % 64 == 0:
                    out[i] = self.evaluate(ts[i])
            return out
        return super().evaluate_many(ts)

    def derivative(self, t: float, side: int = 1) -> np.ndarray:
        return self._JA @ self.evaluate(t)

    def generator(self, t: float, side: int = 1) -> np.ndarray:
        return self.A

    @property
    def positive(self) -> bool:
        return bool(np.linalg.eigvalsh(self.A)[0] > 0)

    @property
    def starts_at_identity(self) -> bool:
        return True

    def to_json(self) -> dict:
        return {"n": self.n, "tau": self.tau, "rep": {"constantGenerator": self.A.tolist()}}


class Transformed(SymplecticPath):
    """``t -> left @ base(t) @ right``."""

    def __init__(self, base: SymplecticPath, left=None, right=None):
        self.base = base
        self.n = base.n
        self.tau = base.tau
        eye = np.eye(2 * self.n)
        self.left = eye if left is None else np.asarray(left, dtype=float)
        self.right = eye if right is None else np.asarray(right, dtype=float)

    def evaluate(self, t: float) -> np.ndarray:
        return self.left @ self.base.evaluate(t) @ self.right

    def evaluate_many(self, ts) -> np.ndarray:
        return self.left @ self.base.evaluate_many(ts) @ self.right

    def derivative(self, t: float, side: int = 1) -> np.ndarray:
        return self.left @ self.base.derivative(t, side) @ self.right

    @property
    def positive(self) -> bool:
        # left @ J B @ left^{-1} = J (left^{-T} B left^{-1}) keeps B positive
        return self.base.positive


class Reparametrized(SymplecticPath):
    """``t -> base(speed * t)`` on ``[0, base.tau / speed]``."""

    def __init__(self, base: SymplecticPath, speed: float):
        if speed <= 0:
            raise ValueError("speed must be positive")
        self.base = base
        self.speed = float(speed)
        self.n = base.n
        self.tau = base.tau / self.speed

    def _inner(self, t):
        return min(self._check_time(t) * self.speed, self.base.tau)

    def evaluate(self, t: float) -> np.ndarray:
        return self.base.evaluate(self._inner(t))

    def evaluate_many(self, ts) -> np.ndarray:
        return self.base.evaluate_many(np.minimum(np.asarray(ts, dtype=float) * self.speed, self.base.tau))

    def derivative(self, t: float, side: int = 1) -> np.ndarray:
        return self.speed * self.base.derivative(self._inner(t), side)

    @property
    def positive(self) -> bool:
        return self.base.positive

    def segments(self) -> list[SymplecticPath]:
        parts = self.base.segments()
        if len(parts) == 1:
            return [self]
        return [Reparametrized(p, self.speed) for p in parts]


class MonotoneReparametrized(SymplecticPath):
    """``t -> base(phi(t))`` with ``phi(t) = base.tau * (t/tau + a sin(2 pi t/tau)/(2 pi))``, ``|a| < 1``.

    Used to check that indices do not depend on the parametrisation.
    """

    def __init__(self, base: SymplecticPath, a: float):
        if not abs(a) < 1:
            raise ValueError("need |a| < 1 for a monotone reparametrisation")
        self.base, self.a = base, float(a)
        self.n, self.tau = base.n, base.tau

    def _phi(self, t):
        s = t / self.tau
        return self.base.tau * (s + self.a * np.sin(TWO_PI * s) / TWO_PI)

    def _dphi(self, t):
        return 1 + self.a * np.cos(TWO_PI * t / self.tau)

    def evaluate(self, t: float) -> np.ndarray:
        t = self._check_time(t)
        return self.base.evaluate(min(max(float(self._phi(t)), 0.0), self.base.tau))

    def evaluate_many(self, ts) -> np.ndarray:
        return self.base.evaluate_many(np.clip(self._phi(np.asarray(ts, dtype=float)), 0.0, self.base.tau))

    def derivative(self, t: float, side: int = 1) -> np.ndarray:
        t = self._check_time(t)
        inner = min(max(float(self._phi(t)), 0.0), self.base.tau)
        return float(self._dphi(t)) * self.base.derivative(inner, side)

    @property
    def positive(self) -> bool:
        return self.base.positive


class Segmented(SymplecticPath):
    """Concatenation of paths; consecutive pieces must join continuously."""

    def __init__(self, parts, check: bool = True):
        self.parts = [seg for p in parts for seg in p.segments()]
        if not self.parts:
            raise ValueError("no segments")
        self.n = self.parts[0].n
        if any(p.n != self.n for p in self.parts):
            raise ValueError("segments differ in dimension")
        self.offsets = np.concatenate([[0.0], np.cumsum([p.tau for p in self.parts])])
        self.tau = float(self.offsets[-1])
        if check:
            for a, b in zip(self.parts, self.parts[1:]):
                gap = np.max(np.abs(a.end - b.evaluate(0.0)))
                if gap > JOINT_TOL * max(1.0, np.max(np.abs(a.end))):
                    raise ValueError(f"segments do not join: gap {gap:.2e}")

    def _locate(self, t: float, side: int = 1) -> tuple[int, float]:
        t = self._check_time(t)
        k = int(np.searchsorted(self.offsets, t, side="right" if side >= 0 else "left")) - 1
        k = min(max(k, 0), len(self.parts) - 1)
        return k, min(max(t - self.offsets[k], 0.0), self.parts[k].tau)

    def evaluate(self, t: float) -> np.ndarray:
        k, s = self._locate(t)
        return self.parts[k].evaluate(s)

    def evaluate_many(self, ts) -> np.ndarray:
        return np.stack([self.evaluate(t) for t in ts])

    def derivative(self, t: float, side: int = 1) -> np.ndarray:
        k, s = self._locate(t, side)
        return self.parts[k].derivative(s, side)

    @property
    def positive(self) -> bool:
        return all(p.positive for p in self.parts)

    def segments(self) -> list[SymplecticPath]:
        return list(self.parts)


class PiecewiseGenerator(Segmented):
    """Fundamental solution of ``y' = J B_j y`` with ``B_j`` constant on consecutive pieces."""

    def __init__(self, pieces):
        self.pieces = [(float(dt), np.asarray(B, dtype=float)) for dt, B in pieces]
        parts = []
        start = None
        for dt, B in self.pieces:
            seg = ConstantGenerator(B, dt)
            if start is not None:
                seg = Transformed(seg, right=start)
            parts.append(seg)
            start = seg.end
        super().__init__(parts, check=False)

    @property
    def starts_at_identity(self) -> bool:
        return True

    def to_json(self) -> dict:
        return {
            "n": self.n,
            "tau": self.tau,
            "rep": {"piecewise": [{"dt": dt, "B": B.tolist()} for dt, B in self.pieces]},
        }


class ProductPath(SymplecticPath):
    """Pointwise product ``t -> first(t) @ second(t)`` of two paths on the same interval."""

    def __init__(self, first: SymplecticPath, second: SymplecticPath):
        if first.n != second.n or abs(first.tau - second.tau) > TIME_TOL * max(1.0, first.tau):
            raise ValueError("factors must share dimension and interval")
        self.first, self.second = first, second
        self.n, self.tau = first.n, first.tau

    def evaluate(self, t: float) -> np.ndarray:
        return self.first.evaluate(t) @ self.second.evaluate(t)

    def derivative(self, t: float, side: int = 1) -> np.ndarray:
        return (self.first.derivative(t, side) @ self.second.evaluate(t)
                + self.first.evaluate(t) @ self.second.derivative(t, side))


class Sampled(SymplecticPath):
    """Matrices on a fixed time grid.  Evaluation off the grid is an error."""

    def __init__(self, times, matrices):
        self.times = np.asarray(times, dtype=float)
        self.matrices = np.asarray(matrices, dtype=float)
        if self.times.ndim != 1 or len(self.times) != len(self.matrices):
            raise ValueError("times and matrices differ in length")
        if np.any(np.diff(self.times) <= 0) or self.times[0] != 0.0:
            raise ValueError("times must start at 0 and increase")
        self.n = half_dim(self.matrices[0])
        self.tau = float(self.times[-1])

    def evaluate(self, t: float) -> np.ndarray:
        t = self._check_time(t)
        k = int(np.argmin(np.abs(self.times - t)))
        if abs(self.times[k] - t) > TIME_TOL * max(1.0, self.tau):
            raise UnsupportedInputError(f"sampled path has no sample at t={t}")
        return self.matrices[k]


def concatenate(first: SymplecticPath, second: SymplecticPath) -> Segmented:
    """``second * first``: run ``first`` on ``[0, tau/2]`` then ``second`` on ``[tau/2, tau]``.

    Both paths are sped up by the factor 2, so with equal input intervals the
    result lives on the same interval.  ``second`` must start where ``first`` ends.
    """
    return Segmented([Reparametrized(first, 2.0), Reparametrized(second, 2.0)])


def connecting_path(P, tau: float = 1.0) -> SymplecticPath:
    """A path in Sp(2n) from the identity to ``P``.

    Rotation diamonds get ``<>_k R(s * phi_k)`` with ``phi_k`` in ``(-pi, pi]``.
    Otherwise ``P = O S`` (polar decomposition) and the path is
    ``expm(s L_O) expm(s L_S)`` with real logarithms of both factors.
    """
    P = np.asarray(P, dtype=float)
    angles = rotation_angles(P)
    if angles is not None:
        turns = []
        for a in angles:
            a = a if _is_exact(a) else float(a)
            turns.append(a - 1 if a > Fraction(1, 2) else a)
        return RotationProduct(turns, tau)
    n = half_dim(P)
    J = standard_J(n)
    O, S = scipy.linalg.polar(P)  # P = O @ S
    L_S = scipy.linalg.logm(S).real
    # O is orthogonal symplectic, i.e. a unitary U = X + iY acting on C^n
    U = O[:n, :n] + 1j * O[n:, :n]
    w, V = np.linalg.eig(U)
    V, _ = np.linalg.qr(V)
    log_U = V @ np.diag(1j * np.angle(w)) @ V.conj().T
    L_O = np.block([[log_U.real, -log_U.imag], [log_U.imag, log_U.real]])
    A_O = -J @ L_O
    A_S = -J @ L_S
    return ProductPath(
        ConstantGenerator((A_O + A_O.T) / (2 * tau), tau),
        ConstantGenerator((A_S + A_S.T) / (2 * tau), tau),
    )


def path_from_json(obj: dict) -> SymplecticPath:
    """Build a path from ``{"n", "tau", "rep": {...}}``."""
    rep = obj["rep"]
    tau = float(obj["tau"])
    if "rotationTurns" in rep:
        turns = [Fraction(str(x)) for x in rep["rotationTurns"]]
        phases = [Fraction(str(x)) for x in rep.get("rotationPhases", [0] * len(turns))]
        path = RotationProduct(turns, tau, phases)
    elif "rotationSpeeds" in rep:
        path = RotationProduct.from_speeds([float(s) for s in rep["rotationSpeeds"]], tau)
    elif "constantGenerator" in rep:
        path = ConstantGenerator(np.array(rep["constantGenerator"], dtype=float), tau)
    elif "piecewise" in rep:
        path = PiecewiseGenerator([(p["dt"], p["B"]) for p in rep["piecewise"]])
        if abs(path.tau - tau) > 1e-9 * max(1.0, tau):
            raise ValueError(f"piece durations sum to {path.tau}, not tau={tau}")
    else:
        raise ValueError(f"unknown path representation: {sorted(rep)}")
    if "n" in obj and int(obj["n"]) != path.n:
        raise ValueError(f"declared n={obj['n']} but representation has n={path.n}")
    return path


def is_close_path(a: SymplecticPath, b: SymplecticPath, samples: int = 101) -> float:
    """Max entrywise distance between two paths on a common uniform grid."""
    if abs(a.tau - b.tau) > 1e-9 * max(1.0, a.tau):
        return math.inf
    ts = np.linspace(0.0, a.tau, samples)
    return float(max(np.max(np.abs(a.evaluate(t) - b.evaluate(min(t, b.tau)))) for t in ts))
