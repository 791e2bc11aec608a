"""Exact scalars, infinitesimally perturbed angles and weight sequences.

Every quantity in the package is a :class:`fractions.Fraction`.  Angles that
the theory takes to be irrational are modelled by :class:`Theta`, a rational
base value nudged by a positive infinitesimal in a chosen direction, which is
enough to make every ``floor(k * theta)`` well defined.
"""

from __future__ import annotations

import threading
from dataclasses import dataclass
from fractions import Fraction
from math import ceil, floor
from typing import NamedTuple, Union

__all__ = [
    "ECHError",
    "NonGenericError",
    "Rational",
    "Theta",
    "WeightSequence",
    "ceil_mul",
    "floor_mul",
    "format_rational",
    "parse_rational",
    "parse_theta",
    "sequence_dominates",
    "weight_sequence",
]

Rational = Fraction
RationalLike = Union[Fraction, int, str]


class ECHError(ValueError):
    """Domain error raised for inputs that violate a mathematical precondition."""


class NonGenericError(ECHError):
    """An angle hits an exact integer multiple where the formula needs genericity."""


def parse_rational(value: RationalLike) -> Fraction:
    """Parse ``"p/q"``, an integer, or a decimal string exactly.

    >>> parse_rational("19/10")
    Fraction(19, 10)
    >>> parse_rational("0.125")
    Fraction(1, 8)
    """
    if isinstance(value, Fraction):
        return value
    if isinstance(value, int):
        return Fraction(value)
    if isinstance(value, float):
        raise TypeError("floats are not accepted; pass 'p/q' or a decimal string")
    try:
        return Fraction(str(value).strip())
    except (ValueError, ZeroDivisionError) as exc:
        raise ECHError(f"malformed rational {value!r}") from exc


def format_rational(value: Fraction) -> str:
    """Render as ``"p/q"`` (always with a denominator, so it round-trips)."""
    value = Fraction(value)
    return f"{value.numerator}/{value.denominator}"


_SIDES = ("exact", "plus", "minus")


@dataclass(frozen=True, order=True)
class Theta:
    """A rational angle, optionally displaced by ``+eps`` or ``-eps``.

    ``Theta(Fraction(3, 5), "plus")`` stands for an irrational number slightly
    larger than 3/5; it is a faithful surrogate as long as only finitely many
    integer multiples are floored.
    """

    base: Fraction
    side: str = "exact"

    def __post_init__(self) -> None:
        object.__setattr__(self, "base", Fraction(self.base))
        if self.side not in _SIDES:
            raise ECHError(f"side must be one of {_SIDES}, got {self.side!r}")

    def reflect(self) -> Theta:
        """``-theta``: negate the base and swap plus/minus."""
        swap = {"plus": "minus", "minus": "plus", "exact": "exact"}
        return Theta(-self.base, swap[self.side])

    def invert(self) -> Theta:
        """``1/theta`` for positive theta; ``1/(r+eps) = 1/r - eps'``."""
        if self.base <= 0:
            raise ECHError("can only invert a positive angle")
        swap = {"plus": "minus", "minus": "plus", "exact": "exact"}
        return Theta(1 / self.base, swap[self.side])

    def scaled(self, k: int) -> tuple[Fraction, int]:
        """``k * theta`` as (rational part, sign of the infinitesimal)."""
        sign = {"plus": 1, "minus": -1, "exact": 0}[self.side]
        if k < 0:
            sign = -sign
        return k * self.base, sign if k else 0

    def is_generic_for(self, m: int) -> bool:
        """True when no ``k * theta`` with ``1 <= k <= m`` is an exact integer."""
        if self.side != "exact":
            return True
        return all((k * self.base).denominator != 1 for k in range(1, m + 1))

    def to_json(self) -> dict:
        return {"base": format_rational(self.base), "side": self.side}

    @classmethod
    def from_json(cls, data: dict) -> Theta:
        return cls(parse_rational(data["base"]), data.get("side", "exact"))

    def __str__(self) -> str:
        suffix = {"plus": "+", "minus": "-", "exact": ""}[self.side]
        return f"{self.base}{suffix}"


def parse_theta(text: str) -> Theta:
    """Parse the command-line form ``"3/5+"``, ``"2-"`` or ``"1/3"``."""
    text = text.strip()
    if text.endswith("+"):
        return Theta(parse_rational(text[:-1]), "plus")
    if text.endswith("-") and len(text) > 1:
        return Theta(parse_rational(text[:-1]), "minus")
    return Theta(parse_rational(text), "exact")


def floor_mul(t: Theta, k: int) -> int:
    """``floor(k * t)`` with the infinitesimal resolved exactly."""
    value, sign = t.scaled(k)
    if value.denominator == 1:
        return int(value) - 1 if sign < 0 else int(value)
    return floor(value)


def ceil_mul(t: Theta, k: int) -> int:
    """``ceil(k * t)``, the mirror image of :func:`floor_mul`."""
    value, sign = t.scaled(k)
    if value.denominator == 1:
        return int(value) + 1 if sign > 0 else int(value)
    return ceil(value)


def _count_at_most(A: int, B: int, T: int) -> int:
    # number of (m, n) >= 0 with m*A + n*B <= T
    return sum(((T - n * B) // A) + 1 for n in range(T // B + 1)) if T >= 0 else 0


def _integer_prefix(A: int, B: int, count: int) -> list[int]:
    # smallest threshold T with at least `count` representations, by bisection
    lo, hi = 0, max(A, B)
    while _count_at_most(A, B, hi) < count:
        hi *= 2
    while lo < hi:
        mid = (lo + hi) // 2
        if _count_at_most(A, B, mid) >= count:
            hi = mid
        else:
            lo = mid + 1
    values = [m * A + n * B for n in range(lo // B + 1) for m in range((lo - n * B) // A + 1)]
    values.sort()
    return values[:count]


class WeightSequence:
    """The sorted multiset ``N(a, b) = {m*a + n*b : m, n >= 0}``.

    The prefix is cached and grown on demand; growth recomputes the prefix from
    scratch on an integer rescaling, so results never depend on call history.
    """

    def __init__(self, a: RationalLike, b: RationalLike):
        a, b = parse_rational(a), parse_rational(b)
        if a <= 0 or b <= 0:
            raise ECHError("nonpositive axis")
        self.a, self.b = a, b
        self._scale = a.denominator * b.denominator
        self._A = int(a * self._scale)
        self._B = int(b * self._scale)
        self._prefix: tuple[int, ...] = ()
        self._lock = threading.Lock()

    def _ensure(self, count: int) -> tuple[int, ...]:
        prefix = self._prefix
        if len(prefix) >= count:
            return prefix
        with self._lock:
            if len(self._prefix) < count:
                size = max(count, 2 * len(self._prefix))
                self._prefix = tuple(_integer_prefix(self._A, self._B, size))
            return self._prefix

    def prefix(self, count: int) -> list[Fraction]:
        if count < 1:
            raise ECHError("count must be at least 1")
        raw = self._ensure(count)
        return [Fraction(v, self._scale) for v in raw[:count]]

    def __getitem__(self, k: int) -> Fraction:
        if k < 0:
            raise IndexError(k)
        return Fraction(self._ensure(k + 1)[k], self._scale)

    def __repr__(self) -> str:
        return f"WeightSequence({self.a}, {self.b})"


def weight_sequence(a: RationalLike, b: RationalLike, count: int) -> list[Fraction]:
    """First ``count`` terms of ``N(a, b)``, indexed from zero."""
    return WeightSequence(a, b).prefix(count)


class Domination(NamedTuple):
    dominates: bool
    fails_at: int | None

    def __bool__(self) -> bool:
        return self.dominates


def sequence_dominates(a, b, c, d, k_max: int) -> Domination:
    """Check ``N(a,b)_k <= N(c,d)_k`` for ``0 <= k <= k_max``."""
    left = weight_sequence(a, b, k_max + 1)
    right = weight_sequence(c, d, k_max + 1)
    for k, (x, y) in enumerate(zip(left, right)):
        if x > y:
            return Domination(False, k)
    return Domination(True, None)

