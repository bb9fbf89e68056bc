"""Power-law growth exponents and (alpha-)subordinacy diagnostics.

The envelope ``C1 L**gamma1 <= ||u||_L <= C2 L**gamma2`` is estimated by
log-log least squares over the tail of each norm profile; ``gamma1`` and
``gamma2`` are the extreme slopes across a grid of normalized initial
conditions. Ratio verdicts are finite-L proxies for a liminf and may come
back ``"inconclusive"``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from . import _kernels
from .errors import AlphaOutOfRange, InsufficientCheckpoints, NonPositiveSlope, ScheduleMismatch
from .propagator import SolutionTrace, basis_gram, potential_window
from .thresholds import alpha_from_exponents

SUBORDINATE = "subordinate-like"
NON_SUBORDINATE = "non-subordinate-like"
INCONCLUSIVE = "inconclusive"


@dataclass(frozen=True, eq=False)
class NormProfile:
    checkpoints: np.ndarray
    log_values: np.ndarray
    provenance: dict = field(default_factory=dict)

    @property
    def values(self) -> np.ndarray:
        return np.exp(self.log_values)

    @classmethod
    def from_values(cls, checkpoints, values, **provenance):
        return cls(np.asarray(checkpoints, float), np.log(np.asarray(values, float)), provenance)

    @classmethod
    def from_trace(cls, trace: SolutionTrace, **provenance):
        prov = {"E": trace.E, "init": trace.init, "direction": trace.direction}
        prov.update(provenance)
        return cls(trace.checkpoints, trace.log_norms, prov)


@dataclass(frozen=True)
class ExponentFit:
    gamma1: float
    gamma2: float
    alpha: float
    slopes: tuple[float, ...]
    intercepts: tuple[float, ...]
    residual: float
    window: tuple[float, float]
    nonpositive: tuple[int, ...] = ()

    def to_dict(self):
        return {
            "gamma1": self.gamma1,
            "gamma2": self.gamma2,
            "alpha": self.alpha,
            "residual": self.residual,
            "window": list(self.window),
            "nonpositive_profiles": list(self.nonpositive),
        }


def _tail_mask(L: np.ndarray, tail_fraction: float) -> np.ndarray:
    x = np.log(L)
    cut = x[-1] - tail_fraction * (x[-1] - x[0])
    return x >= cut - 1e-12


def loglog_slope(L, log_y):
    """Least-squares line through (log L, log y): slope, intercept, max residual."""
    x = np.log(np.asarray(L, float))
    y = np.asarray(log_y, float)
    slope, intercept = np.polyfit(x, y, 1)
    return float(slope), float(intercept), float(np.max(np.abs(y - (slope * x + intercept))))


def fit_growth_exponents(profiles, tail_fraction: float = 0.5, min_checkpoints: int = 8) -> ExponentFit:
    """Fit ``gamma1 = min slope``, ``gamma2 = max slope`` over the profiles.

    Profiles with a nonpositive slope are reported in ``nonpositive`` and
    left out of the min/max.
    """
    if not profiles:
        raise InsufficientCheckpoints("no profiles supplied")
    slopes, intercepts, residuals = [], [], []
    window = None
    for prof in profiles:
        L = np.asarray(prof.checkpoints, float)
        if L.size < min_checkpoints or L[-1] / L[0] < 100.0:
            raise InsufficientCheckpoints(
                f"need >= {min_checkpoints} checkpoints spanning two decades, got {L.size} "
                f"over [{L[0]:g}, {L[-1]:g}]"
            )
        mask = _tail_mask(L, tail_fraction)
        if mask.sum() < 2:
            raise InsufficientCheckpoints("tail window holds fewer than two checkpoints")
        s, c, r = loglog_slope(L[mask], prof.log_values[mask])
        slopes.append(s)
        intercepts.append(c)
        residuals.append(r)
        window = (float(L[mask][0]), float(L[mask][-1]))
    pos = [s for s in slopes if s > 0]
    bad = tuple(i for i, s in enumerate(slopes) if s <= 0)
    if not pos:
        raise NonPositiveSlope(f"all {len(slopes)} fitted slopes are <= 0")
    g1, g2 = min(pos), max(pos)
    return ExponentFit(
        gamma1=g1,
        gamma2=g2,
        alpha=alpha_from_exponents(g1, g2),
        slopes=tuple(slopes),
        intercepts=tuple(intercepts),
        residual=max(residuals),
        window=window,
        nonpositive=bad,
    )


def phase_grid(n_phases: int = 32) -> np.ndarray:
    """Uniform grid of ``(-pi/2, pi/2]`` ending at ``pi/2``."""
    if n_phases < 1:
        raise ValueError("n_phases must be positive")
    return -math.pi / 2 + math.pi * np.arange(1, n_phases + 1) / n_phases


def phase_profiles(spec, E, checkpoints, n_phases=32, direction="right", budget=None):
    """Norm profiles of ``u_{1,phi,E}`` over a phase grid, from one pair propagation."""
    gram = basis_gram(spec, E, checkpoints, direction, budget)
    out = []
    for phi in phase_grid(n_phases):
        init = (-math.sin(phi), math.cos(phi))
        out.append(NormProfile(gram.checkpoints, gram.log_norms(init), {"E": float(E), "phi": float(phi)}))
    return out


def growth_exponents(spec, E, checkpoints, n_phases=32, tail_fraction=0.5, direction="right", budget=None):
    """Exponent fit over ``n_phases >= 8`` normalized initial conditions."""
    if n_phases < 8:
        raise InsufficientCheckpoints("the phase grid needs at least 8 phases")
    profs = phase_profiles(spec, E, checkpoints, n_phases, direction, budget)
    return fit_growth_exponents(profs, tail_fraction)


def alpha_exponent(alpha: float) -> float:
    """Denominator power ``alpha / (2 - alpha)`` of the alpha-subordinacy ratio."""
    if not 0.0 < alpha <= 1.0:
        raise AlphaOutOfRange(f"alpha must lie in (0, 1], got {alpha}")
    return alpha / (2.0 - alpha)


def subordinacy_ratio(profile_num: NormProfile, profile_den: NormProfile, kappa: float) -> np.ndarray:
    """Rows ``(L, ||num||_L / ||den||_L**kappa)``, computed in logs."""
    if not 0.0 <= kappa <= 1.0:
        raise ValueError(f"kappa must lie in [0, 1], got {kappa}")
    L1, L2 = np.asarray(profile_num.checkpoints), np.asarray(profile_den.checkpoints)
    if L1.shape != L2.shape or not np.array_equal(L1, L2):
        raise ScheduleMismatch("numerator and denominator use different checkpoints")
    if not np.all(np.isfinite(profile_den.log_values)):
        raise ValueError("denominator norms must be positive")
    r = np.exp(profile_num.log_values - kappa * profile_den.log_values)
    return np.column_stack([L1, r])


@dataclass(frozen=True)
class SubordinacyVerdict:
    verdict: str
    tail_min: float
    tail_slope: float
    window: tuple[float, float]

    def __str__(self):
        return self.verdict


def classify_subordinate(ratios, tail_fraction: float = 0.5, drop_threshold: float = 0.1) -> SubordinacyVerdict:
    """Finite-L reading of ``liminf ratio = 0``.

    Subordinate-like when the tail minimum falls below ``drop_threshold`` on a
    decreasing trend; non-subordinate-like when it stays above
    ``1/drop_threshold`` on a nondecreasing trend; inconclusive otherwise.
    """
    ratios = np.asarray(ratios, float)
    if ratios.shape[0] < 8:
        raise InsufficientCheckpoints("classification needs at least 8 ratio points")
    L, r = ratios[:, 0], ratios[:, 1]
    mask = _tail_mask(L, tail_fraction)
    tmin = float(np.min(r[mask]))
    slope = loglog_slope(L[mask], np.log(r[mask]))[0] if mask.sum() >= 2 else 0.0
    if tmin < drop_threshold and slope < 0:
        v = SUBORDINATE
    elif tmin > 1.0 / drop_threshold and slope >= 0:
        v = NON_SUBORDINATE
    else:
        v = INCONCLUSIVE
    return SubordinacyVerdict(v, tmin, float(slope), (float(L[mask][0]), float(L[mask][-1])))


def low_growth_energies(spec, energies, n_sites: int) -> np.ndarray:
    """Transfer-matrix growth score ``max_{n<=N} log||T_n(E)||`` per energy."""
    V = potential_window(spec, int(n_sites), "right")
    return _kernels.growth_scores(V, np.asarray(energies, float), int(n_sites))


def locate_spectral_energy(
    spec,
    e_min: float,
    e_max: float,
    n_grid: int = 2001,
    sites=(10**3, 10**4, 10**5),
    keep: int = 8,
):
    """Zoom toward an energy of small transfer-matrix growth.

    Each stage scans a grid, keeps the window around the lowest score and
    rescans it with more sites. Returns ``(E, score)`` from the last stage;
    the score is ``log max_n ||T_n(E)||`` there.
    """
    lo, hi = float(e_min), float(e_max)
    best = None
    for N in sites:
        grid = np.linspace(lo, hi, n_grid)
        scores = low_growth_energies(spec, grid, N)
        i = int(np.argmin(scores))
        best = (float(grid[i]), float(scores[i]))
        h = keep * (hi - lo) / (n_grid - 1)
        lo, hi = best[0] - h, best[0] + h
    return best
