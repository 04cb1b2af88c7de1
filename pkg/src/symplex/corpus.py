"""Seeded random inputs: diagonalizable symplectic matrices with generating paths and rotation products."""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .angles import TWO_PI
from .core import random_symplectic, symplectic_inverse
from .paths import ConstantGenerator, RotationProduct

# angles in twelfths of a turn keep eigenvalues exact and collisions frequent
_TWELFTHS = list(range(1, 12))


@dataclass
class Block:
    kind: str  # "rotation" or "hyperbolic"
    value: float  # rotation angle over the path, or hyperbolic rate

    def generator(self) -> np.ndarray:
        """2x2 symmetric ``A`` with ``expm(J A)`` the block's end matrix."""
        if self.kind == "rotation":
            return self.value * np.eye(2)
        return np.array([[0.0, -self.value], [-self.value, 0.0]])


@dataclass
class DiagonalizableSample:
    blocks: list
    conjugator: np.ndarray
    path: ConstantGenerator

    @property
    def matrix(self) -> np.ndarray:
        return self.path.end

    @property
    def n(self) -> int:
        return len(self.blocks)


def random_block(rng: np.random.Generator, hyperbolic_rate: float = 0.25) -> Block:
    if rng.random() < hyperbolic_rate:
        return Block("hyperbolic", float(rng.choice([-1, 1]) * rng.uniform(0.3, 1.0)))
    twelfths = int(rng.choice(_TWELFTHS + [12]))
    extra = int(rng.integers(0, 2))
    sign = float(rng.choice([-1, 1]))
    return Block("rotation", sign * TWO_PI * (twelfths / 12 + extra))


def generator_of_blocks(blocks) -> np.ndarray:
    n = len(blocks)
    A = np.zeros((2 * n, 2 * n))
    for k, b in enumerate(blocks):
        idx = [k, n + k]
        A[np.ix_(idx, idx)] = b.generator()
    return A


def random_diagonalizable(n: int, rng: np.random.Generator, conjugate_scale: float = 0.3,
                          blocks=None) -> DiagonalizableSample:
    """``G expm(J A) G^{-1}`` with ``A`` block-structured, plus the path ``t -> G expm(t J A) G^{-1}``.

    Conjugating the generator as ``G^{-T} A G^{-1}`` keeps it symmetric and
    the path stays inside the symplectic group.
    """
    blocks = blocks or [random_block(rng) for _ in range(n)]
    G = random_symplectic(len(blocks), rng, conjugate_scale)
    G_inv = symplectic_inverse(G)
    A = G_inv.T @ generator_of_blocks(blocks) @ G_inv
    return DiagonalizableSample(blocks, G, ConstantGenerator((A + A.T) / 2, 1.0))


def random_turns(rng: np.random.Generator, positive: bool = True, max_den: int = 6,
                 max_turns: int = 3) -> Fraction:
    den = int(rng.integers(1, max_den + 1))
    num = int(rng.integers(1, max_turns * den + 1))
    t = Fraction(num, den)
    if not positive and rng.random() < 0.5:
        t = -t
    return t


def random_rotation_product(n: int, rng: np.random.Generator, positive: bool = True,
                            max_den: int = 6, max_turns: int = 3) -> RotationProduct:
    turns = [random_turns(rng, positive, max_den, max_turns) for _ in range(n)]
    tau = float(rng.uniform(0.5, 2.0 * math.pi))
    return RotationProduct(turns, tau)
