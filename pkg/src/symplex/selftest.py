"""A fixed battery of checks whose outcome is a function of the seed alone.

The report lists every check with a label of the form
``family / quantity / parameters`` and never records wall-clock data, so two
runs with the same seed produce identical bytes.
"""

from __future__ import annotations

from fractions import Fraction

import numpy as np

from .angles import UnitAnglePoint
from .core import SymmetryDescriptor, build_symmetry, rotation, unit_spectrum
from .corpus import random_diagonalizable, random_rotation_product
from .ellipsoid import EllipsoidSpec, end_to_end_verification, flow_residual
from .errors import SymplexError
from .index import convex_count_index, maslov_type_index, mu_graph_index
from .iteration import bott_sweep
from .jump import cijt_search, multiplicity_bound, n1_inequality, second_iterate_margin
from .krein import splitting_numbers
from .paths import RotationProduct
from .properties import run_all

ONE = UnitAnglePoint.one()


def _angle(w: UnitAnglePoint) -> str:
    return str(w.turns) if w.is_exact else f"{w.turn_value:.9f}"


class _Battery:
    def __init__(self):
        self.checks = []

    def add(self, label: str, ok: bool, detail="") -> None:
        self.checks.append({"label": label, "ok": bool(ok), "detail": str(detail)})

    def guarded(self, label: str, fn) -> None:
        """Run ``fn() -> (ok, detail)``; a raised library error counts as a failure."""
        try:
            ok, detail = fn()
        except SymplexError as exc:
            ok, detail = False, f"{type(exc).__name__}: {exc}"
        self.add(label, ok, detail)


def _splitting_table(b: _Battery) -> None:
    cases = [("I2", np.eye(2), ONE, (1, 1)), ("-I2", -np.eye(2), UnitAnglePoint.exact(1, 2), (1, 1))]
    for q in (3, 5, 4):
        theta = Fraction(1, q)
        w = UnitAnglePoint(turns=theta)
        cases.append((f"R(+{theta})", rotation(theta), w, (0, 1)))
        cases.append((f"R(-{theta})", rotation(-theta), w, (1, 0)))
    for name, M, w, want in cases:
        b.guarded(f"Splitting / table / {name} / omega={_angle(w)}",
                  lambda M=M, w=w, want=want: (splitting_numbers(M, w).pair() == want,
                                               splitting_numbers(M, w).pair()))


def _circle_oracles(b: _Battery) -> None:
    circle = RotationProduct([1], 2 * np.pi)
    expected = [(ONE, 1, 2), (UnitAnglePoint.exact(1, 2), 2, 0), (UnitAnglePoint.exact(1, 4), 2, 0)]
    for w, i, nu in expected:
        rec = maslov_type_index(circle, w, "crossing-form")
        b.add(f"Index / circle / omega={_angle(w)}", (rec.i_omega, rec.nu_omega) == (i, nu),
              (rec.i_omega, rec.nu_omega))
    two = RotationProduct([1, 2], 2 * np.pi)
    rec = maslov_type_index(two, ONE)
    b.add("Index / speeds 1,2 / omega=0", (rec.i_omega, rec.nu_omega) == (4, 4), (rec.i_omega, rec.nu_omega))


def _method_agreement(b: _Battery, rng, count: int) -> None:
    for s in range(count):
        sample = random_diagonalizable(1 + s % 4, rng)
        M = sample.matrix
        for w, _ in unit_spectrum(M):
            b.guarded(f"Splitting / shortcut vs limit / sample={s} / omega={_angle(w)}",
                      lambda M=M, w=w, p=sample.path: (
                          splitting_numbers(M, w, p, "shortcut").pair() == splitting_numbers(M, w, p, "path-limit").pair(),
                          splitting_numbers(M, w, p, "shortcut").pair()))


def _properties(b: _Battery, rng, count: int) -> None:
    for s in range(count):
        sample = random_diagonalizable(1 + s % 3, rng)
        try:
            results = run_all(sample, rng)
        except SymplexError as exc:
            b.add(f"Property / all / sample={s}", False, exc)
            continue
        for name, ok, detail in results:
            b.add(f"Property / {name} / sample={s}", ok, detail if not ok else "")


def _engines(b: _Battery, rng, count: int) -> None:
    for s in range(count):
        path = random_rotation_product(1 + s % 3, rng)
        w = UnitAnglePoint.exact(int(rng.integers(0, 12)), 12)

        def compare(path=path, w=w):
            exact = convex_count_index(path, w)
            numeric = mu_graph_index(path, w)
            times = len(exact.crossings) == len(numeric.crossings) and all(
                abs(a.t - c.t) <= 1e-9 * max(1.0, path.tau) and a.kernel_dim == c.kernel_dim
                for a, c in zip(exact.crossings, numeric.crossings))
            return exact.mu == numeric.mu and times, (exact.mu, numeric.mu, len(exact.crossings))

        b.guarded(f"Index / counting vs crossing form / sample={s} / omega={_angle(w)}", compare)


def _bott(b: _Battery, seed: int) -> None:
    for res in bott_sweep(2, 4, seed):
        d = res.descriptor
        b.add(f"{res.label()} / n={d.n} k={d.k} sMinus={d.s_minus}", res.equal, (res.lhs, res.rhs))


def _bounds(b: _Battery) -> None:
    for n in range(1, 17):
        d = SymmetryDescriptor(n, 3, 1, n // 2)
        got = multiplicity_bound(d)
        b.add(f"Bound / three-quarters / n={n}", got == (3 * n) // 4, got)
    for m in range(2, 13, 2):
        d = SymmetryDescriptor(3, m, 1, 1)
        b.add(f"Bound / even order / m={m}", multiplicity_bound(d) == 3, multiplicity_bound(d))


def _jump(b: _Battery) -> None:
    circle = RotationProduct([1], 2 * np.pi)
    found = [t.key() for t in cijt_search([circle], 8)]
    b.add("Jump / circle tuples / NMax=8", found == [(2, 1), (4, 2), (6, 3), (8, 4)], found)
    for turns in ([1], [1, 2], [Fraction(1, 3), Fraction(2, 5)]):
        path = RotationProduct(turns, 1.0)
        margin = second_iterate_margin(path)
        b.add(f"Jump / second iterate bound / turns={','.join(map(str, turns))}", margin >= 0, margin)


def _n1(b: _Battery) -> None:
    half = RotationProduct([Fraction(1, 2)], np.pi)
    res = n1_inequality(half, -np.eye(2), 2, "mEven")
    b.add("Inequality / mEven / n=1 m=2", res.margin == 0, res.margin)
    P = build_symmetry(SymmetryDescriptor(2, 3, 1, 1))
    hat = RotationProduct([Fraction(1, 3), Fraction(1, 3)], 2 * np.pi / 3)
    res = n1_inequality(hat, P, 3, "tilde0")
    b.add("Inequality / tilde0 / n=2 m=3", res.margin >= 0, res.margin)


def _ellipsoids(b: _Battery) -> None:
    cases = [("1,8/5,9/4,49/12", (3, 1, 2)), ("1,8/5", (5, 1, 0)), ("1,8/5", (2, 1, 0))]
    for radii, (m, k, s) in cases:
        E = EllipsoidSpec.parse(radii)
        rep = end_to_end_verification(E, SymmetryDescriptor(E.n, m, k, s))
        b.add(f"Ellipsoid / end to end / r2={radii} / m={m} k={k} sMinus={s}", rep["ok"],
              f"count={rep['count']} bound={rep['bound']}")
    E = EllipsoidSpec.parse("1,8/5")
    for j in range(E.n):
        resid = flow_residual(E, j)
        b.add(f"Ellipsoid / integrated orbit / r2=1,8/5 / plane={j}", resid < 1e-9, "below 1e-9" if resid < 1e-9 else resid)


def run_selftest(seed: int = 42) -> dict:
    rng = np.random.default_rng(seed)
    b = _Battery()
    _splitting_table(b)
    _circle_oracles(b)
    _method_agreement(b, rng, 24)
    _properties(b, rng, 12)
    _engines(b, rng, 24)
    _bott(b, seed)
    _bounds(b)
    _jump(b)
    _n1(b)
    _ellipsoids(b)
    failures = sum(not c["ok"] for c in b.checks)
    return {"command": "selftest", "seed": seed, "total": len(b.checks), "failures": failures, "checks": b.checks}
