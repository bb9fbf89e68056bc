"""Pointwise and vectorised evaluation of the potential families.

Every family is an immutable dataclass deriving from :class:`PotentialSpec`.
``spec.value(n)`` evaluates one site, ``spec.array(start, stop)`` a range of
sites as a float64 array. The Sturmian indicator is decided with certified
integer arithmetic, never by rounding ``n*theta``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import ClassVar

import numpy as np

from .errors import (
    AlphaOutOfRange,
    DomainMismatch,
    InvalidSpec,
    PrecisionUndecidable,
)
from .numbertheory import MAX_BITS, Theta, parse_theta

SIGN_PATTERNS = ("plus", "alternating", "seeded-random")

_M64 = 1 << 64
_MASK = np.uint64(_M64 - 1)


# --------------------------------------------------------------------------
# Sturmian
# --------------------------------------------------------------------------

def _sturmian_decide(theta: Theta, rho: Fraction, n: int, bits: int):
    """Return 1/0 if ``frac(n theta + rho) in [1 - theta, 1)`` is certain, else None."""
    M = 1 << bits
    t_lo, t_hi = theta.scaled_bounds(bits)
    r_scaled = rho * M
    r_lo = math.floor(r_scaled)
    r_hi = math.ceil(r_scaled)
    a, b = n * t_lo, n * t_hi
    x_lo, x_hi = min(a, b) + r_lo, max(a, b) + r_hi
    k = x_lo // M
    if x_hi >= (k + 1) * M:
        return None
    f_lo, f_hi = x_lo - k * M, x_hi - k * M
    b_lo, b_hi = M - t_hi, M - t_lo
    if f_lo >= b_hi:
        return 1
    if f_hi < b_lo:
        return 0
    return None


def _as_rho(rho) -> Fraction:
    if isinstance(rho, float):
        # decimal reading of the float, e.g. 0.3 -> 3/10
        rho = repr(rho)
    r = Fraction(rho)
    if not (0 <= r < 1):
        raise InvalidSpec(f"rho must lie in [0, 1), got {rho}")
    return r


def sturmian_value(lam: float, theta, rho, n: int) -> float:
    """``lam * chi_[1-theta, 1)(frac(n theta + rho))`` for any integer ``n``.

    >>> sturmian_value(1.0, "golden", 0, 1), sturmian_value(1.0, "golden", 0, 2)
    (1.0, 0.0)
    """
    th = parse_theta(theta)
    r = _as_rho(rho)
    n = int(n)
    if n == -1 and r == 0:
        # frac(-theta) = 1 - theta exactly: the left endpoint is included
        return float(lam)
    if th.exact:
        bits = 128
        while bits <= MAX_BITS:
            hit = _sturmian_decide(th, r, n, bits)
            if hit is not None:
                return float(lam) if hit else 0.0
            bits *= 2
        raise PrecisionUndecidable(f"site {n}: no decision with {MAX_BITS} bits")
    hit = _sturmian_decide(th, r, n, th.precision_bits + 64)
    if hit is None:
        raise PrecisionUndecidable(
            f"site {n}: frac(n theta + rho) lies within n*ulp of the breakpoint 1 - theta"
        )
    return float(lam) if hit else 0.0


def sturmian_indicator_array(theta: Theta, rho: Fraction, start: int, stop: int) -> np.ndarray:
    """0/1 indicator over ``n = start .. stop-1`` (uint8).

    A 64-bit fixed-point screen decides almost every site; sites within the
    screen's error band are re-decided by :func:`sturmian_value`.
    """
    n = np.arange(start, stop, dtype=np.int64)
    t_lo, t_hi = theta.scaled_bounds(64)
    t_lo &= _M64 - 1
    r64 = math.floor(rho * _M64)
    spread = t_hi - t_lo + 1
    nu = n.astype(np.uint64)
    with np.errstate(over="ignore"):
        t = nu * np.uint64(t_lo) + np.uint64(r64)
    margin = np.abs(n).astype(np.uint64) * np.uint64(spread) + np.uint64(2)
    bp = np.uint64((_M64 - t_lo) & (_M64 - 1))
    ok = (t >= margin) & (t <= _MASK - margin)
    one = ok & (t - margin >= bp)
    zero = ok & (t + margin < bp - np.uint64(spread))
    out = one.astype(np.uint8)
    for i in np.flatnonzero(~(one | zero)):
        out[i] = 1 if sturmian_value(1.0, theta, rho, int(n[i])) else 0
    return out


# --------------------------------------------------------------------------
# Sparse
# --------------------------------------------------------------------------

def _check_alpha(alpha: float) -> float:
    alpha = float(alpha)
    if not 0.0 < alpha < 1.0:
        raise AlphaOutOfRange(f"alpha must lie in (0, 1), got {alpha}")
    return alpha


def sparse_sites(n_max: int) -> list[int]:
    """All ``x_j = 2**(j**j)`` with ``x_j <= n_max``.

    >>> sparse_sites(20)
    [2, 16]
    """
    n_max = int(n_max)
    out = []
    j = 1
    while n_max >= 1 and j**j < n_max.bit_length():
        out.append(1 << j**j)
        j += 1
    return out


def _sparse_exponent(n: int) -> int | None:
    """``j**j`` when ``n = 2**(j**j)``, else None."""
    if n < 2 or n & (n - 1):
        return None
    e = n.bit_length() - 1
    j = 1
    while j**j < e:
        j += 1
    return e if j**j == e else None


def sparse_value(alpha: float, n: int) -> float:
    """Barrier height ``x_j**((1 - alpha) / (2 alpha))`` at ``n = x_j``, else 0."""
    alpha = _check_alpha(alpha)
    e = _sparse_exponent(int(n))
    if e is None:
        return 0.0
    return math.exp((1.0 - alpha) / (2.0 * alpha) * e * math.log(2.0))


# --------------------------------------------------------------------------
# Perturbation
# --------------------------------------------------------------------------

def _splitmix64(x: np.ndarray) -> np.ndarray:
    # counter-based hash so that s(n) is a pure function of (seed, n)
    with np.errstate(over="ignore"):
        z = x + np.uint64(0x9E3779B97F4A7C15)
        z = (z ^ (z >> np.uint64(30))) * np.uint64(0xBF58476D1CE4E5B9)
        z = (z ^ (z >> np.uint64(27))) * np.uint64(0x94D049BB133111EB)
        return z ^ (z >> np.uint64(31))


def sign_array(pattern: str, n: np.ndarray, seed: int | None = None) -> np.ndarray:
    n = np.asarray(n, dtype=np.int64)
    if pattern == "plus":
        return np.ones(n.shape)
    if pattern == "alternating":
        return np.where(n % 2 == 0, 1.0, -1.0)
    if pattern == "seeded-random":
        if seed is None:
            raise InvalidSpec("seeded-random sign pattern needs a seed")
        with np.errstate(over="ignore"):
            key = n.astype(np.uint64) ^ _splitmix64(np.uint64(seed) * np.ones(1, np.uint64))
        bit = _splitmix64(key) >> np.uint64(63)
        return np.where(bit == 0, 1.0, -1.0)
    raise InvalidSpec(f"unknown sign pattern {pattern!r}; choose from {SIGN_PATTERNS}")


def perturbation_value(C: float, p: float, pattern: str, n: int, seed: int | None = None) -> float:
    """``s(n) * C * (1 + |n|)**-p``.

    >>> perturbation_value(1.0, 2.0, "alternating", 1)
    -0.25
    """
    s = float(sign_array(pattern, np.array([n]), seed)[0])
    return s * C * (1.0 + abs(int(n))) ** (-p)


def perturbation_array(C: float, p: float, pattern: str, n: np.ndarray, seed=None) -> np.ndarray:
    n = np.asarray(n, dtype=np.int64)
    mag = C * (1.0 + np.abs(n).astype(np.float64)) ** (-p)
    return sign_array(pattern, n, seed) * mag


# --------------------------------------------------------------------------
# Specs
# --------------------------------------------------------------------------

class PotentialSpec:
    """Common interface of the potential families."""

    family: ClassVar[str]
    whole_line: ClassVar[bool] = True

    def value(self, n: int) -> float:
        raise NotImplementedError

    def array(self, start: int, stop: int) -> np.ndarray:
        """``V(n)`` for ``n = start .. stop-1``."""
        raise NotImplementedError

    def to_dict(self) -> dict:
        raise NotImplementedError

    def _check_domain(self, start: int):
        if start < 0 and not self.whole_line:
            raise DomainMismatch(f"{self.family} potential is defined for n >= 0 only (got {start})")


@dataclass(frozen=True)
class Free(PotentialSpec):
    family: ClassVar[str] = "free"

    def value(self, n):
        return 0.0

    def array(self, start, stop):
        return np.zeros(max(stop - start, 0))

    def to_dict(self):
        return {"family": self.family}


@dataclass(frozen=True)
class Sturmian(PotentialSpec):
    lam: float
    theta: Theta
    rho: Fraction = Fraction(0)

    family: ClassVar[str] = "sturmian"

    def __post_init__(self):
        if self.lam == 0:
            raise InvalidSpec("Sturmian coupling lambda must be nonzero")
        object.__setattr__(self, "lam", float(self.lam))
        object.__setattr__(self, "theta", parse_theta(self.theta))
        object.__setattr__(self, "rho", _as_rho(self.rho))

    def value(self, n):
        return sturmian_value(self.lam, self.theta, self.rho, n)

    def array(self, start, stop):
        return self.lam * sturmian_indicator_array(self.theta, self.rho, start, stop)

    def to_dict(self):
        return {
            "family": self.family,
            "lambda": self.lam,
            "theta": self.theta.to_json(),
            "rho": str(self.rho),
        }


@dataclass(frozen=True)
class Sparse(PotentialSpec):
    alpha: float

    family: ClassVar[str] = "sparse"
    whole_line: ClassVar[bool] = False

    def __post_init__(self):
        object.__setattr__(self, "alpha", _check_alpha(self.alpha))

    def value(self, n):
        self._check_domain(n)
        return sparse_value(self.alpha, n)

    def array(self, start, stop):
        self._check_domain(start)
        out = np.zeros(max(stop - start, 0))
        for x in sparse_sites(max(stop - 1, 0)):
            if start <= x < stop:
                out[x - start] = sparse_value(self.alpha, x)
        return out

    def to_dict(self):
        return {"family": self.family, "alpha": self.alpha}


@dataclass(frozen=True)
class Explicit(PotentialSpec):
    """Finitely supported potential: ``values[i]`` sits at site ``offset + i``."""

    values: tuple[float, ...]
    offset: int = 0

    family: ClassVar[str] = "explicit"

    def __post_init__(self):
        object.__setattr__(self, "values", tuple(float(v) for v in self.values))
        object.__setattr__(self, "offset", int(self.offset))

    def value(self, n):
        i = int(n) - self.offset
        return self.values[i] if 0 <= i < len(self.values) else 0.0

    def array(self, start, stop):
        out = np.zeros(max(stop - start, 0))
        lo = max(start, self.offset)
        hi = min(stop, self.offset + len(self.values))
        if lo < hi:
            out[lo - start:hi - start] = self.values[lo - self.offset:hi - self.offset]
        return out

    @property
    def support_end(self) -> int:
        return self.offset + len(self.values)

    def to_dict(self):
        return {"family": self.family, "values": list(self.values), "offset": self.offset}


@dataclass(frozen=True)
class Perturbed(PotentialSpec):
    """``base(n) + s(n) C (1 + |n|)**-p``."""

    base: PotentialSpec
    C: float
    p: float
    sign_pattern: str = "plus"
    seed: int | None = None

    family: ClassVar[str] = "perturbed"

    def __post_init__(self):
        if isinstance(self.base, Perturbed):
            raise InvalidSpec("nested Perturbed specs are not allowed")
        if not isinstance(self.base, PotentialSpec):
            raise InvalidSpec("Perturbed.base must be a PotentialSpec")
        if not self.C > 0 or not self.p > 0:
            raise InvalidSpec("Perturbed needs C > 0 and p > 0")
        if self.sign_pattern not in SIGN_PATTERNS:
            raise InvalidSpec(f"unknown sign pattern {self.sign_pattern!r}")
        if self.sign_pattern == "seeded-random" and self.seed is None:
            raise InvalidSpec("seeded-random sign pattern needs a seed")
        object.__setattr__(self, "C", float(self.C))
        object.__setattr__(self, "p", float(self.p))

    @property
    def whole_line(self):
        return self.base.whole_line

    def perturbation(self, n):
        return perturbation_value(self.C, self.p, self.sign_pattern, n, self.seed)

    def perturbation_array(self, start, stop):
        return perturbation_array(self.C, self.p, self.sign_pattern, np.arange(start, stop), self.seed)

    def value(self, n):
        self._check_domain(n)
        return self.base.value(n) + self.perturbation(n)

    def array(self, start, stop):
        self._check_domain(start)
        return self.base.array(start, stop) + self.perturbation_array(start, stop)

    def to_dict(self):
        d = {
            "family": self.family,
            "base": self.base.to_dict(),
            "C": self.C,
            "p": self.p,
            "sign_pattern": self.sign_pattern,
        }
        if self.seed is not None:
            d["seed"] = self.seed
        return d


def potential_value(spec: PotentialSpec, n: int) -> float:
    """``V(n)`` (``V(n) + P(n)`` for a perturbed potential)."""
    spec._check_domain(int(n))
    return spec.value(int(n))


def potential_array(spec: PotentialSpec, start: int, stop: int) -> np.ndarray:
    spec._check_domain(int(start))
    return spec.array(int(start), int(stop))


def split_perturbed(spec: PotentialSpec) -> tuple[PotentialSpec, PotentialSpec]:
    """Split ``V0 + P`` into ``(V0, P)``; an unperturbed potential gets ``P = Free``."""
    if isinstance(spec, Perturbed):
        return spec.base, Perturbed(Free(), spec.C, spec.p, spec.sign_pattern, spec.seed)
    return spec, Free()


# --------------------------------------------------------------------------
# JSON documents
# --------------------------------------------------------------------------

_FIELDS = {
    "free": {"family"},
    "sturmian": {"family", "lambda", "theta", "rho"},
    "sparse": {"family", "alpha"},
    "explicit": {"family", "values", "offset"},
    "perturbed": {"family", "base", "C", "p", "sign_pattern", "seed"},
}


def spec_from_dict(doc: dict) -> PotentialSpec:
    """Inverse of ``spec.to_dict()``; unknown fields are rejected."""
    if not isinstance(doc, dict) or "family" not in doc:
        raise InvalidSpec(f"potential document needs a 'family' field: {doc!r}")
    fam = str(doc["family"]).lower()
    if fam not in _FIELDS:
        raise InvalidSpec(f"unknown potential family {fam!r}")
    extra = set(doc) - _FIELDS[fam]
    if extra:
        raise InvalidSpec(f"unknown fields for {fam}: {sorted(extra)}")
    if fam == "free":
        return Free()
    if fam == "sturmian":
        return Sturmian(doc["lambda"], doc.get("theta", "golden"), doc.get("rho", 0))
    if fam == "sparse":
        return Sparse(doc["alpha"])
    if fam == "explicit":
        return Explicit(tuple(doc.get("values", ())), doc.get("offset", 0))
    return Perturbed(
        spec_from_dict(doc["base"]),
        doc["C"],
        doc["p"],
        doc.get("sign_pattern", "plus"),
        doc.get("seed"),
    )
