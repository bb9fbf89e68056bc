"""Rotation numbers, certified continued fractions and convergents.

Two kinds of irrational rotation number are supported:

* :class:`QuadraticIrrational` -- ``(P + sqrt(D)) / Q`` held symbolically, so
  ``floor(theta * 2**bits)`` is available exactly for any number of bits;
* :class:`DecimalTheta` -- a decimal string with at least 25 fractional
  digits (>= 80 bits), interpreted as ``value +/- one unit in the last place``.

Exact rationals (``Fraction``, ``int``, ``float`` and short decimal strings)
are rejected with :class:`~spectral_lab.errors.RationalTheta`.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Union

from .errors import InvalidSpec, PrecisionExhausted, RationalTheta

MIN_DECIMAL_DIGITS = 25  # 10**-25 < 2**-80
MAX_BITS = 1 << 14


@dataclass(frozen=True)
class QuadraticIrrational:
    """The number ``(P + sqrt(D)) / Q`` with ``D`` not a perfect square, ``Q > 0``."""

    P: int
    D: int
    Q: int

    def __post_init__(self):
        if self.Q <= 0:
            raise InvalidSpec("QuadraticIrrational needs Q > 0")
        if self.D <= 0 or math.isqrt(self.D) ** 2 == self.D:
            raise RationalTheta(f"sqrt({self.D}) is rational")
        lo, hi = self.interval(64)
        if not (0 < lo and hi < 1):
            raise InvalidSpec(f"theta = {float(self)} is not in (0, 1)")

    def scaled_floor(self, bits: int) -> int:
        """Exact ``floor(theta * 2**bits)``."""
        # sqrt(D) * 2**bits is irrational, so floor((P 2^b + s) / Q) with
        # s = isqrt(D 4^b) is exact.
        s = math.isqrt(self.D << (2 * bits))
        return ((self.P << bits) + s) // self.Q

    def scaled_bounds(self, bits: int) -> tuple[int, int]:
        t = self.scaled_floor(bits)
        return t, t + 1

    def interval(self, bits: int) -> tuple[Fraction, Fraction]:
        lo, hi = self.scaled_bounds(bits)
        return Fraction(lo, 1 << bits), Fraction(hi, 1 << bits)

    @property
    def exact(self) -> bool:
        return True

    def to_json(self):
        return {"P": self.P, "D": self.D, "Q": self.Q}

    def __float__(self):
        return (self.P + math.sqrt(self.D)) / self.Q

    def __str__(self):
        return f"({self.P}+sqrt({self.D}))/{self.Q}"


GOLDEN_MEAN = QuadraticIrrational(-1, 5, 2)
SILVER_MEAN = QuadraticIrrational(-1, 2, 1)

_KEYWORDS = {
    "golden": GOLDEN_MEAN,
    "golden-mean": GOLDEN_MEAN,
    "fibonacci": GOLDEN_MEAN,
    "silver": SILVER_MEAN,
    "sqrt2-1": SILVER_MEAN,
}


@dataclass(frozen=True)
class DecimalTheta:
    """A decimal approximation, trusted to one unit in its last digit."""

    text: str

    def __post_init__(self):
        digits = _fraction_digits(self.text)
        if digits < MIN_DECIMAL_DIGITS:
            raise RationalTheta(
                f"{self.text!r} has {digits} fractional digits; at least "
                f"{MIN_DECIMAL_DIGITS} are needed to stand for an irrational"
            )
        v = self.value
        if not (self.ulp < v < 1 - self.ulp):
            raise InvalidSpec(f"theta {self.text} is not inside (0, 1)")

    @property
    def value(self) -> Fraction:
        return Fraction(self.text)

    @property
    def ulp(self) -> Fraction:
        return Fraction(1, 10 ** _fraction_digits(self.text))

    @property
    def precision_bits(self) -> int:
        return int(_fraction_digits(self.text) * math.log2(10))

    def scaled_bounds(self, bits: int) -> tuple[int, int]:
        lo, hi = self.interval(bits)
        return math.floor(lo * (1 << bits)), math.ceil(hi * (1 << bits))

    def interval(self, bits: int = 0) -> tuple[Fraction, Fraction]:
        return self.value - self.ulp, self.value + self.ulp

    @property
    def exact(self) -> bool:
        return False

    def to_json(self):
        return self.text

    def __float__(self):
        return float(self.value)

    def __str__(self):
        return self.text


Theta = Union[QuadraticIrrational, DecimalTheta]


def _fraction_digits(text: str) -> int:
    t = text.strip().lower()
    if "e" in t:
        raise InvalidSpec("exponent notation is not accepted for theta")
    return len(t.split(".", 1)[1]) if "." in t else 0


def parse_theta(obj) -> Theta:
    """Build a rotation number from a descriptor.

    Accepts a :class:`QuadraticIrrational` or :class:`DecimalTheta`, a
    keyword (``"golden"``, ``"silver"``...), a ``{"P", "D", "Q"}`` mapping,
    or a long decimal string.
    """
    if isinstance(obj, (QuadraticIrrational, DecimalTheta)):
        return obj
    if isinstance(obj, dict):
        try:
            return QuadraticIrrational(int(obj["P"]), int(obj["D"]), int(obj["Q"]))
        except KeyError as exc:
            raise InvalidSpec(f"quadratic theta needs keys P, D, Q: {obj}") from exc
    if isinstance(obj, str):
        key = obj.strip().lower()
        if key in _KEYWORDS:
            return _KEYWORDS[key]
        if "/" in key:
            raise RationalTheta(f"theta {obj!r} is rational")
        return DecimalTheta(obj.strip())
    if isinstance(obj, (int, float, Fraction)):
        raise RationalTheta(f"theta {obj!r} is rational; pass a symbolic or long decimal descriptor")
    raise InvalidSpec(f"cannot interpret theta descriptor {obj!r}")


def rational_expansion(x: Fraction) -> list[int]:
    """Terminating expansion of a rational in (0, 1)."""
    coeffs = []
    while x:
        r = 1 / x
        a = math.floor(r)
        coeffs.append(a)
        x = r - a
    return coeffs


@dataclass(frozen=True)
class ContinuedFraction:
    coefficients: tuple[int, ...]
    source: str
    truncated: bool = True
    bounded_density: bool | None = None

    def __post_init__(self):
        if not self.coefficients:
            raise InvalidSpec("a continued fraction needs at least one coefficient")
        if any(a < 1 for a in self.coefficients):
            raise InvalidSpec("partial quotients must be positive integers")

    def __len__(self):
        return len(self.coefficients)


def _expand_interval(lo: Fraction, hi: Fraction, k: int):
    """Run the Gauss map on ``(lo, hi)``; return the certified prefix."""
    coeffs = []
    for _ in range(k):
        if lo <= 0:
            break
        r_lo, r_hi = 1 / hi, 1 / lo
        a = math.floor(r_lo)
        if r_hi > a + 1:
            break
        coeffs.append(a)
        lo, hi = r_lo - a, r_hi - a
    return coeffs


def continued_fraction(theta, k: int) -> ContinuedFraction:
    """First ``k`` certified partial quotients of ``theta``.

    >>> continued_fraction("golden", 5).coefficients
    (1, 1, 1, 1, 1)
    """
    if k < 1:
        raise ValueError("k must be positive")
    if isinstance(theta, (int, float, Fraction)) and not isinstance(theta, bool):
        x = Fraction(theta)
        raise RationalTheta(f"expansion of {x} terminates: {rational_expansion(x)}")
    th = parse_theta(theta)
    if th.exact:
        bits = 128
        while True:
            coeffs = _expand_interval(*th.interval(bits), k)
            if len(coeffs) == k:
                break
            bits *= 2
            if bits > MAX_BITS:
                raise PrecisionExhausted(f"could not certify {k} quotients of {th}")
    else:
        coeffs = _expand_interval(*th.interval(), k)
        if len(coeffs) < k:
            raise PrecisionExhausted(
                f"{th.text} certifies only {len(coeffs)} of {k} partial quotients"
            )
    # quadratic irrationals have eventually periodic, hence bounded, quotients
    return ContinuedFraction(tuple(coeffs), str(th), True, True if th.exact else None)


def bounded_density_statistic(cf: ContinuedFraction) -> list[float]:
    """Running means ``(1/n) sum_{i<=n} a_i`` for ``n = 1..k``."""
    out, total = [], 0
    for n, a in enumerate(cf.coefficients, start=1):
        total += a
        out.append(total / n)
    return out


def convergents(cf: ContinuedFraction) -> list[tuple[int, int]]:
    """Convergents ``p_k / q_k`` of ``[0; a_1, a_2, ...]``."""
    p_prev, p = 1, 0
    q_prev, q = 0, 1
    out = []
    for a in cf.coefficients:
        p_prev, p = p, a * p + p_prev
        q_prev, q = q, a * q + q_prev
        out.append((p, q))
    return out


def cylinder_interval(cf: ContinuedFraction) -> tuple[Fraction, Fraction]:
    """Closed interval of all numbers whose expansion starts with ``cf``."""
    conv = [(0, 1)] + convergents(cf)
    (p1, q1), (p, q) = conv[-2], conv[-1]
    a, b = Fraction(p, q), Fraction(p + p1, q + q1)
    return min(a, b), max(a, b)
