"""Closed-form decay thresholds and exponent bounds.

All Fibonacci/sparse exponent values returned here are *bounds* on unknown
true exponents (``gamma1`` from above, ``gamma2`` from below), never
measurements.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

from .errors import AlphaOutOfRange, InvalidSpec, OrderViolation

GOLDEN_RATIO = (1.0 + math.sqrt(5.0)) / 2.0
ROUNDED_FIBONACCI_EXAMPLE = 21.7  # lambda = 1 illustration, quoted rounded


def _check_order(gamma1, gamma2):
    if not 0.0 < gamma1 <= gamma2:
        raise OrderViolation(f"need 0 < gamma1 <= gamma2, got {gamma1}, {gamma2}")


def _check_alpha(alpha, closed_right=False):
    ok = 0.0 < alpha <= 1.0 if closed_right else 0.0 < alpha < 1.0
    if not ok:
        raise AlphaOutOfRange(f"alpha out of range: {alpha}")


def sturmian_threshold(gamma1: float, gamma2: float) -> float:
    """Decay exponent ``3 gamma2 - gamma1`` above which stability holds."""
    _check_order(gamma1, gamma2)
    return 3.0 * gamma2 - gamma1


def alpha_from_exponents(gamma1: float, gamma2: float) -> float:
    _check_order(gamma1, gamma2)
    return 2.0 * gamma1 / (gamma1 + gamma2)


def _cubic(x, lam):
    return x * x * x - (2.0 + lam) * x - 1.0


def cubic_largest_root(lam: float) -> float:
    """Largest real root of ``x**3 - (2 + lam) x - 1``, ``lam >= 0``.

    Newton from the right of the root, kept inside a sign-change bracket
    ``[sqrt((2+lam)/3), sqrt(2+lam) + 1]``; bisection replaces any step that
    leaves the bracket.
    """
    lam = float(lam)
    if lam < 0:
        raise InvalidSpec("cubic_largest_root needs lam >= 0")
    lo = math.sqrt((2.0 + lam) / 3.0)  # local minimum, f(lo) < 0
    hi = math.sqrt(2.0 + lam) + 1.0  # f(hi) > 0
    x = hi
    for _ in range(200):
        fx = _cubic(x, lam)
        if fx > 0:
            hi = x
        else:
            lo = x
        dfx = 3.0 * x * x - (2.0 + lam)
        nxt = x - fx / dfx if dfx > 0 else 0.5 * (lo + hi)
        if not lo < nxt < hi:
            nxt = 0.5 * (lo + hi)
        if abs(nxt - x) <= 4e-16 * x or hi - lo <= 4e-16 * hi:
            x = nxt
            break
        x = nxt
    return x


def fibonacci_gamma_bounds(lam: float) -> tuple[float, float]:
    """``(sup-bound on gamma1, inf-bound on gamma2)`` for the golden-mean model."""
    lam = float(lam)
    if not lam > 0:
        raise InvalidSpec("Fibonacci bounds need lambda > 0")
    ln_phi = math.log(GOLDEN_RATIO)
    g1 = math.log1p(1.0 / (2.0 + 2.0 * lam) ** 2) / (16.0 * ln_phi)
    c = cubic_largest_root(lam)
    g2 = 1.0 + math.log(math.sqrt(5.0 + 2.0 * lam) * (3.0 + lam) * c) / ln_phi
    return g1, g2


def sparse_threshold(alpha: float) -> float:
    alpha = float(alpha)
    _check_alpha(alpha)
    if alpha <= 0.5:
        return (1.0 + 2.0 * alpha) / alpha
    return (3.0 + 2.0 * alpha) / (2.0 * alpha)


def sparse_gamma_bounds(alpha: float) -> tuple[float, float]:
    """``(sup-bound on gamma1, inf-bound on gamma2)`` for the sparse model."""
    alpha = float(alpha)
    _check_alpha(alpha)
    g1 = (1.0 - alpha) / alpha if alpha <= 0.5 else 0.5
    g2 = (1.0 + alpha) / (2.0 * alpha)
    return g1, g2


@dataclass(frozen=True)
class ThresholdReport:
    model: str
    parameters: dict
    gamma1_bound: float
    gamma2_bound: float
    threshold_p: float
    notes: list = field(default_factory=list)

    def to_dict(self):
        return {
            "model": self.model,
            "parameters": dict(self.parameters),
            "gamma1_bound": {"kind": "sup-bound", "value": self.gamma1_bound},
            "gamma2_bound": {"kind": "inf-bound", "value": self.gamma2_bound},
            "threshold_p": self.threshold_p,
            "notes": list(self.notes),
        }


def threshold_report(model: str, lam: float | None = None, alpha: float | None = None) -> ThresholdReport:
    if model == "sturmian-fibonacci":
        if lam is None:
            raise InvalidSpec("sturmian-fibonacci needs lambda")
        g1, g2 = fibonacci_gamma_bounds(lam)
        c = cubic_largest_root(lam)
        p = sturmian_threshold(g1, g2)
        notes = [
            f"c_lambda = {c!r} (largest root of x^3 - (2+lambda) x - 1)",
            "threshold is 3*gamma2_bound - gamma1_bound; perturbations need p strictly above it",
        ]
        if lam == 1:
            notes.append(f"published illustration rounds this to p >= {ROUNDED_FIBONACCI_EXAMPLE}")
        return ThresholdReport(model, {"lambda": float(lam), "c_lambda": c}, g1, g2, p, notes)
    if model == "sparse":
        if alpha is None:
            raise InvalidSpec("sparse needs alpha")
        g1, g2 = sparse_gamma_bounds(alpha)
        branch = "(1+2a)/a" if alpha <= 0.5 else "(3+2a)/(2a)"
        return ThresholdReport(
            model,
            {"alpha": float(alpha)},
            g1,
            g2,
            sparse_threshold(alpha),
            [f"threshold branch {branch}", "sparse threshold is not 3*gamma2 - gamma1"],
        )
    raise InvalidSpec(f"unknown model {model!r}; use 'sturmian-fibonacci' or 'sparse'")
