"""Points on the unit circle, kept as exact fractions of a full turn when possible."""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass
from fractions import Fraction

TWO_PI = 2.0 * math.pi

# Denominator cap used when snapping float angles to rational turns.
SNAP_MAX_DENOMINATOR = 720
SNAP_TOL = 1e-10


@dataclass(frozen=True)
class UnitAnglePoint:
    """A point ``exp(2*pi*i*turns)`` on the unit circle.

    Exactly one of ``turns`` (a reduced :class:`Fraction` in ``[0, 1)``) and
    ``radians`` (a float in ``[0, 2*pi)``) carries the value.  Use the
    constructors :meth:`exact` and :meth:`from_radians` rather than the raw
    initializer.
    """

    turns: Fraction | None = None
    radians_value: float | None = None

    def __post_init__(self):
        if (self.turns is None) == (self.radians_value is None):
            raise ValueError("exactly one of turns / radians_value must be set")
        if self.turns is not None and not (0 <= self.turns < 1):
            raise ValueError(f"exact turn fraction {self.turns} not in [0, 1)")
        if self.radians_value is not None and not (0.0 <= self.radians_value < TWO_PI):
            raise ValueError(f"angle {self.radians_value} not in [0, 2pi)")

    @classmethod
    def exact(cls, p: int, q: int = 1) -> "UnitAnglePoint":
        """The point at angle ``2*pi*p/q``."""
        if q == 0:
            raise ZeroDivisionError("q must be nonzero")
        return cls(turns=Fraction(p, q) % 1)

    @classmethod
    def from_turns(cls, turns) -> "UnitAnglePoint":
        if isinstance(turns, (int, Fraction)):
            return cls(turns=Fraction(turns) % 1)
        return cls.from_radians(TWO_PI * float(turns), snap=False)

    @classmethod
    def from_radians(cls, theta: float, snap: bool = True) -> "UnitAnglePoint":
        """Wrap ``theta`` into ``[0, 2*pi)``.

        With ``snap`` the angle is replaced by an exact fraction of a turn when
        one with denominator at most ``SNAP_MAX_DENOMINATOR`` lies within
        ``SNAP_TOL`` radians.
        """
        t = float(theta) / TWO_PI
        if snap:
            frac = Fraction(t).limit_denominator(SNAP_MAX_DENOMINATOR)
            if abs(float(frac) - t) * TWO_PI <= SNAP_TOL:
                return cls(turns=frac % 1)
        theta = math.fmod(float(theta), TWO_PI)
        if theta < 0:
            theta += TWO_PI
        if theta >= TWO_PI:
            theta = 0.0
        return cls(radians_value=theta)

    @classmethod
    def from_complex(cls, z: complex, snap: bool = True) -> "UnitAnglePoint":
        return cls.from_radians(cmath.phase(z), snap=snap)

    @classmethod
    def one(cls) -> "UnitAnglePoint":
        return cls(turns=Fraction(0))

    @property
    def is_exact(self) -> bool:
        return self.turns is not None

    @property
    def radians(self) -> float:
        if self.turns is not None:
            return TWO_PI * float(self.turns)
        return self.radians_value

    @property
    def turn_value(self):
        """Angle in turns, as a Fraction when exact, else a float."""
        if self.turns is not None:
            return self.turns
        return self.radians_value / TWO_PI

    @property
    def value(self) -> complex:
        if self.turns is not None:
            return exact_unit_value(self.turns)
        return cmath.exp(1j * self.radians_value)

    @property
    def is_one(self) -> bool:
        if self.turns is not None:
            return self.turns == 0
        return min(self.radians_value, TWO_PI - self.radians_value) < SNAP_TOL

    @property
    def is_real(self) -> bool:
        """True for the points 1 and -1."""
        if self.turns is not None:
            return self.turns in (0, Fraction(1, 2))
        return self.is_one or abs(self.radians_value - math.pi) < SNAP_TOL

    def conj(self) -> "UnitAnglePoint":
        if self.turns is not None:
            return UnitAnglePoint(turns=(-self.turns) % 1)
        return UnitAnglePoint.from_radians(-self.radians_value, snap=False)

    def rotate(self, delta: float) -> "UnitAnglePoint":
        """The point ``exp(i*delta) * self`` (always stored as a float angle)."""
        return UnitAnglePoint.from_radians(self.radians + delta, snap=False)

    def power(self, m: int) -> "UnitAnglePoint":
        if self.turns is not None:
            return UnitAnglePoint(turns=(self.turns * m) % 1)
        return UnitAnglePoint.from_radians(self.radians_value * m, snap=False)

    def roots(self, m: int) -> list["UnitAnglePoint"]:
        """All ``m`` solutions of ``w**m == self``, in increasing angle."""
        if m < 1:
            raise ValueError("m must be positive")
        if self.turns is not None:
            return sorted(
                (UnitAnglePoint(turns=((self.turns + j) / m) % 1) for j in range(m)),
                key=lambda w: w.turns,
            )
        base = self.radians_value / m
        return [UnitAnglePoint.from_radians(base + TWO_PI * j / m, snap=False) for j in range(m)]

    def distance(self, other: "UnitAnglePoint") -> float:
        """Arc distance in radians."""
        if self.turns is not None and other.turns is not None:
            d = (self.turns - other.turns) % 1
            return TWO_PI * float(min(d, 1 - d))
        d = abs(self.radians - other.radians) % TWO_PI
        return min(d, TWO_PI - d)

    def close_to(self, other: "UnitAnglePoint", tol: float = 1e-9) -> bool:
        if self.turns is not None and other.turns is not None:
            return self.turns == other.turns
        return self.distance(other) <= tol

    def sort_key(self) -> float:
        return self.radians

    def to_json(self) -> dict:
        if self.turns is not None:
            return {"exact": [self.turns.numerator, self.turns.denominator]}
        return {"radians": self.radians_value}

    @classmethod
    def from_json(cls, obj) -> "UnitAnglePoint":
        if "exact" in obj:
            p, q = obj["exact"]
            return cls.exact(int(p), int(q))
        if "radians" in obj:
            return cls.from_radians(float(obj["radians"]), snap=False)
        raise ValueError(f"not a unit angle point: {obj!r}")

    @classmethod
    def parse(cls, text: str) -> "UnitAnglePoint":
        """Parse ``exact:p/q``, ``rad:x`` or a bare fraction of a turn like ``1/3``."""
        text = text.strip()
        if text.startswith("exact:"):
            return cls.from_turns(Fraction(text[len("exact:"):]))
        if text.startswith("rad:"):
            return cls.from_radians(float(text[len("rad:"):]), snap=False)
        return cls.from_turns(Fraction(text))

    def __str__(self) -> str:
        if self.turns is not None:
            return f"exp(2pi i*{self.turns})"
        return f"exp(i*{self.radians_value:.12g})"


_EXACT_COS_TWELFTHS = {
    0: (1.0, 0.0),
    1: (math.sqrt(3) / 2, 0.5),
    2: (0.5, math.sqrt(3) / 2),
    3: (0.0, 1.0),
}


def exact_cos_sin(turns) -> tuple[float, float]:
    """cos and sin of ``2*pi*turns`` with exact values at multiples of 1/12 turn."""
    if isinstance(turns, (int, Fraction)):
        t = Fraction(turns) % 1
        twelfths = t * 12
        if twelfths.denominator == 1:
            j = int(twelfths)
            quadrant, r = divmod(j, 3)
            c, s = _EXACT_COS_TWELFTHS[r]
            for _ in range(quadrant):
                c, s = -s, c
            return c, s
        turns = float(t)
    theta = TWO_PI * float(turns)
    return math.cos(theta), math.sin(theta)


def exact_unit_value(turns) -> complex:
    c, s = exact_cos_sin(turns)
    return complex(c, s)
