"""Brute-force reference computations used to check the fast paths.

Nothing here calls into the stability machinery; the direct solver is a
plain three-term recursion (optionally in mpmath arithmetic).
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import mpmath
import numpy as np

from . import _kernels
from .errors import PremiseViolation

ARBITRARY_PRECISION_SITES = 10**4


def cumulative_g(psi1, psi2, n: int) -> float:
    """``g(n) = sum_{j=1}^{n} |psi1(j) psi2(j)|``; element 0 of each sequence is site 1."""
    if n <= 0:
        return 0.0
    a = np.abs(np.asarray(psi1, float)[:n])
    b = np.abs(np.asarray(psi2, float)[:n])
    return math.fsum(a * b)


@dataclass(frozen=True)
class AbelBoundReport:
    a: float
    b: float
    L: int
    lhs: float
    rhs: float
    rhs_printed: float
    satisfied: bool


def _check_premises(xi, psi1, psi2, a, b, L):
    if not a > b > 0:
        raise PremiseViolation(f"need a > b > 0, got a={a}, b={b}")
    if min(len(xi), len(psi1), len(psi2)) < L:
        raise PremiseViolation(f"sequences shorter than L={L}")
    n = np.arange(1, L + 1, dtype=float)
    bad = np.flatnonzero(np.abs(xi[:L]) > (1.0 + n) ** (-a))
    if bad.size:
        raise PremiseViolation(f"|xi(n)| > (1+n)^-a at n={bad[0] + 1}", int(bad[0] + 1))
    nn = np.sqrt(_kernels.cumulative_compensated(psi1[:L] ** 2) * _kernels.cumulative_compensated(psi2[:L] ** 2))
    bad = np.flatnonzero(nn > (1.0 + n) ** b)
    if bad.size:
        raise PremiseViolation(
            f"||psi1||_L ||psi2||_L > (1+L)^b at L={bad[0] + 1}", int(bad[0] + 1)
        )


def abel_sum_bound(xi, psi1, psi2, a: float, b: float, L: int) -> AbelBoundReport:
    """Check ``sum_{n<=L} |xi psi1 psi2| <= (2+L)^-a (1+L)^b + a sum_{n<=L} (1+n)^(b-a-1)``.

    Premises (constants normalized to 1): ``|xi(n)| <= (1+n)^-a`` and
    ``||psi1||_l ||psi2||_l <= (1+l)^b`` for every integer ``l <= L``.
    ``rhs_printed`` carries the variant with ``L^b`` in the boundary term,
    which does not follow from the premises for small ``L``.
    """
    xi = np.asarray(xi, float)
    psi1 = np.asarray(psi1, float)
    psi2 = np.asarray(psi2, float)
    L = int(L)
    _check_premises(xi, psi1, psi2, a, b, L)
    lhs = math.fsum(np.abs(xi[:L] * psi1[:L] * psi2[:L]))
    n = np.arange(1, L + 1, dtype=float)
    tail = a * math.fsum((1.0 + n) ** (b - a - 1.0))
    rhs = (2.0 + L) ** (-a) * (1.0 + L) ** b + tail
    printed = (2.0 + L) ** (-a) * float(L) ** b + tail
    return AbelBoundReport(float(a), float(b), L, lhs, rhs, printed, lhs <= rhs)


def abel_partials(xi, psi1, psi2, a: float, b: float, L: int):
    """Columns ``n, lhs_partial, rhs_partial`` for ``n = 1..L``."""
    xi = np.asarray(xi, float)
    psi1 = np.asarray(psi1, float)
    psi2 = np.asarray(psi2, float)
    _check_premises(xi, psi1, psi2, a, b, int(L))
    n = np.arange(1, L + 1, dtype=float)
    lhs = _kernels.cumulative_compensated(np.abs(xi[:L] * psi1[:L] * psi2[:L]))
    tail = a * _kernels.cumulative_compensated((1.0 + n) ** (b - a - 1.0))
    rhs = (2.0 + n) ** (-a) * (1.0 + n) ** b + tail
    return n.astype(np.int64), lhs, rhs


def direct_perturbed_solve(base, perturbation, E, init, N, precision="auto", dps=50):
    """Forward recursion of ``v(n+1) = (E - V0(n) - P(n)) v(n) - v(n-1)``, ``v[0..N]``.

    ``precision`` is ``"double"``, ``"mp"`` (mpmath with ``dps`` digits) or
    ``"auto"`` (mp when ``N <= 10**4``).
    """
    N = int(N)
    V = base.array(0, N + 1) + perturbation.array(0, N + 1)
    if precision == "auto":
        precision = "mp" if N <= ARBITRARY_PRECISION_SITES else "double"
    if precision == "double":
        v, _ = _kernels.recur_values(np.ascontiguousarray(V), float(E), float(init[0]), float(init[1]), N)
        return v
    if precision != "mp":
        raise ValueError(f"unknown precision {precision!r}")
    with mpmath.workdps(dps):
        Em = mpmath.mpf(float(E))
        prev, cur = mpmath.mpf(float(init[0])), mpmath.mpf(float(init[1]))
        out = [prev, cur]
        for n in range(1, N):
            prev, cur = cur, (Em - mpmath.mpf(float(V[n]))) * cur - prev
            out.append(cur)
        return np.array([float(x) for x in out[: N + 1]])
