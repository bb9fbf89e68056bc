"""Variation of parameters for decaying perturbations ``V0 -> V0 + P``.

A solution of the perturbed equation is written ``v = w1 u1 + w2 u2`` with
``(u1, u2)`` the canonical pair of ``V0``; the coefficients obey
``w(n+1) - w(n) = A(n) w(n)`` with the nilpotent coupling matrix

    A(n) = -P(n) [[ u1 u2,  u2**2 ],
                  [-u1**2, -u1 u2 ]].

Because ``A(n)**2 = 0`` the step inverts exactly as ``(I + A)^-1 = I - A``, so
the branches ``w^-`` (limit ``(1, 0)``) and ``w^+`` (limit ``(0, 1)``) are
built by backward recursion from a finite cutoff ``N``; a rerun from ``2N``
certifies the cutoff.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import ClassVar

import numpy as np
from scipy.special import zeta

from . import _kernels
from .asymptotics import alpha_exponent, growth_exponents
from .errors import CutoffTooSmall, EmptyWindow, InvalidSpec, OrderViolation, ScheduleMismatch
from .oracle import direct_perturbed_solve
from .potentials import Explicit, Free, Perturbed, PotentialSpec
from .propagator import (
    CanonicalPair,
    SolutionTrace,
    _wronskian_stats,
    canonical_initial,
    log_checkpoints,
    potential_window,
    solution_values,
    trace_from_values,
)
from .thresholds import alpha_from_exponents

DEFAULT_TOLERANCES = {
    "ratio": 1e-2,
    "residual": 1e-9,
    "cutoff": 1e-6,
    "summability": 1e-6,
}


# --------------------------------------------------------------------------
# Algebra
# --------------------------------------------------------------------------

@dataclass(frozen=True, eq=False)
class CouplingMatrix:
    entries: np.ndarray

    @property
    def trace(self) -> float:
        return float(self.entries[0, 0] + self.entries[1, 1])

    @property
    def det(self) -> float:
        a = self.entries
        return float(a[0, 0] * a[1, 1] - a[0, 1] * a[1, 0])

    def square(self) -> np.ndarray:
        return self.entries @ self.entries

    def unit_det(self) -> float:
        """``det(I + A)``."""
        a = self.entries
        return float((1.0 + a[0, 0]) * (1.0 + a[1, 1]) - a[0, 1] * a[1, 0])


def coupling_matrix(P_n: float, u1_n: float, u2_n: float) -> CouplingMatrix:
    x = u1_n * u2_n
    m = np.array([[x, u2_n * u2_n], [-(u1_n * u1_n), -x]])
    return CouplingMatrix(-P_n * m)


def choose_gamma(gamma1: float, gamma2: float, p: float) -> float:
    """Midpoint of the window ``(gamma2 - gamma1, p - 2 gamma2)``."""
    if not 0.0 < gamma1 <= gamma2:
        raise OrderViolation(f"need 0 < gamma1 <= gamma2, got {gamma1}, {gamma2}")
    lo, hi = gamma2 - gamma1, p - 2.0 * gamma2
    if not hi > lo:
        raise EmptyWindow(f"p = {p} <= 3*gamma2 - gamma1 = {3 * gamma2 - gamma1}")
    return 0.5 * (lo + hi)


def g_values(P, u1, u2, gamma, n):
    """``G(n) = max{|P|(|u1 u2| + u2^2), |P|(f(n) u1^2 + |u1 u2|)}``, ``f(n) = (1+n)^gamma``."""
    P, u1, u2, n = (np.asarray(x, float) for x in (P, u1, u2, n))
    f = (1.0 + n) ** gamma
    x = np.abs(u1 * u2)
    out = np.abs(P) * np.maximum(x + u2 * u2, f * u1 * u1 + x)
    return out if out.ndim else float(out)


# --------------------------------------------------------------------------
# Problem set-up
# --------------------------------------------------------------------------

@dataclass(frozen=True, eq=False)
class _SumSpec(PotentialSpec):
    base: PotentialSpec
    perturbation: PotentialSpec

    family: ClassVar[str] = "sum"

    @property
    def whole_line(self):
        return self.base.whole_line and self.perturbation.whole_line

    def value(self, n):
        return self.base.value(n) + self.perturbation.value(n)

    def array(self, start, stop):
        return self.base.array(start, stop) + self.perturbation.array(start, stop)

    def to_dict(self):
        return {"family": "sum", "base": self.base.to_dict(), "perturbation": self.perturbation.to_dict()}


def perturbed_spec(base: PotentialSpec, perturbation: PotentialSpec) -> PotentialSpec:
    """The potential ``V0 + P``."""
    if isinstance(perturbation, Free):
        return base
    if isinstance(perturbation, Perturbed) and isinstance(perturbation.base, Free) and not isinstance(base, Perturbed):
        return Perturbed(base, perturbation.C, perturbation.p, perturbation.sign_pattern, perturbation.seed)
    return _SumSpec(base, perturbation)


def decay_parameters(perturbation: PotentialSpec):
    """``(C, p, support_end)`` describing how the perturbation's tail is bounded."""
    if isinstance(perturbation, Free):
        return 0.0, math.inf, 0
    if isinstance(perturbation, Explicit):
        return 0.0, math.inf, perturbation.support_end
    if isinstance(perturbation, Perturbed) and isinstance(perturbation.base, Free):
        return perturbation.C, perturbation.p, None
    raise InvalidSpec("perturbation tail is unknown; use Free, Explicit or Perturbed(Free, ...)")


class PerturbationProblem:
    """Arrays ``V0, P, u1, u2`` on sites ``0..n_sites`` for one ``(E, phi)``."""

    def __init__(self, base, perturbation, E, phi, n_sites, budget=None):
        self.base = base
        self.perturbation = perturbation
        self.E = float(E)
        self.phi = float(phi)
        self.n_sites = int(n_sites)
        i1, i2 = canonical_initial(phi)
        self.init_u1, self.init_u2 = i1, i2
        self.u1 = solution_values(base, E, i1, self.n_sites, budget=budget)
        self.u2 = solution_values(base, E, i2, self.n_sites, budget=budget)
        self.V0 = potential_window(base, self.n_sites, "right")
        self.P = np.ascontiguousarray(perturbation.array(0, self.n_sites + 1))

    def G(self, gamma, N=None):
        N = self.n_sites if N is None else int(N)
        n = np.arange(1, N + 1)
        return g_values(self.P[1:N + 1], self.u1[1:N + 1], self.u2[1:N + 1], gamma, n)

    def w(self, branch, N):
        end = {"minus": (1.0, 0.0), "plus": (0.0, 1.0)}[branch]
        N = int(N)
        if N > self.n_sites:
            raise InvalidSpec(f"cutoff {N} exceeds the {self.n_sites} prepared sites")
        d1, d2 = _kernels.w_backward(self.P, self.u1, self.u2, N, end[0], end[1])
        return end[0] + d1, end[1] + d2, d1, d2

    def canonical_pair(self, checkpoints, N=None) -> CanonicalPair:
        N = self.n_sites if N is None else int(N)
        t1 = trace_from_values(self.base, self.E, self.u1[: N + 1], checkpoints)
        t2 = trace_from_values(self.base, self.E, self.u2[: N + 1], checkpoints)
        win = np.hstack([t1.windows, t2.windows])
        ws, dev = _wronskian_stats(win, t1.window_exp)
        term = float(self.u1[N] * self.u2[N - 1] - self.u1[N - 1] * self.u2[N])
        return CanonicalPair(self.phi, t1, t2, term, ws, dev)


# --------------------------------------------------------------------------
# Summability
# --------------------------------------------------------------------------

@dataclass(frozen=True, eq=False)
class GSummability:
    gamma: float
    gamma2: float | None
    G: np.ndarray
    partial_sums: np.ndarray
    total: float
    tail_majorant: float
    verdict: str


def g_tail_majorant(C, p, gamma, gamma2, N, support_end=None) -> float:
    """``C a sum_{n>N} (1+n)^(b-a-1)`` with ``a = p - gamma``, ``b = 2 gamma2``."""
    if support_end is not None:
        return 0.0 if support_end <= N + 1 else math.inf
    a, b = p - gamma, 2.0 * gamma2
    s = a - b + 1.0  # series exponent: sum (1+n)^-s
    if a <= 0 or s <= 1.0:
        return math.inf
    return float(C * a * zeta(s, N + 2))


def _estimate_gamma2(problem, N):
    L = log_checkpoints(N - 1, min(10.0, (N - 1) / 200.0), 32)
    fit = growth_exponents(problem.base, problem.E, L, n_phases=8)
    return fit.gamma2


def check_G_summability(base, perturbation, E, phi, gamma, N, gamma2=None, tol=None, budget=None, problem=None):
    """Partial sums of ``G`` up to ``N`` plus an analytic tail majorant."""
    tol = DEFAULT_TOLERANCES["summability"] if tol is None else tol
    problem = problem or PerturbationProblem(base, perturbation, E, phi, N, budget)
    G = problem.G(gamma, N)
    partial = _kernels.cumulative_compensated(np.ascontiguousarray(G))
    C, p, support = decay_parameters(perturbation)
    if support is None and gamma2 is None:
        gamma2 = _estimate_gamma2(problem, N)
    tail = g_tail_majorant(C, p, gamma, gamma2, N, support)
    verdict = "summable-like" if tail < tol else "not-established"
    return GSummability(float(gamma), gamma2, G, partial, float(partial[-1]) if partial.size else 0.0, tail, verdict)


# --------------------------------------------------------------------------
# Branches and reconstruction
# --------------------------------------------------------------------------

@dataclass(frozen=True, eq=False)
class WTrace:
    """Coefficients ``w(n)`` for ``n = 0..N`` (entry 0 repeats entry 1).

    ``dev1``, ``dev2`` hold ``w`` minus the branch limit, computed without
    cancellation, so ``|w1^- - 1|`` stays meaningful below ``ulp(1)``. After a
    doubling check the arrays come from the ``2N`` run and ``site_error``
    holds the per-site gap to the ``N`` run.
    """

    branch: str
    w1: np.ndarray
    w2: np.ndarray
    sites: np.ndarray = field(default_factory=lambda: np.zeros(0, np.int64))
    cutoff_shift: float | None = None
    dev1: np.ndarray | None = None
    dev2: np.ndarray | None = None
    site_error: np.ndarray | None = None

    @property
    def N(self) -> int:
        return self.w1.size - 1

    @classmethod
    def constant(cls, w1, w2, N, branch="custom"):
        return cls(branch, np.full(N + 1, float(w1)), np.full(N + 1, float(w2)))

    def at(self, sites):
        sites = np.asarray(sites, np.int64)
        return self.w1[sites], self.w2[sites]


def solve_w(base, perturbation, E, phi, branch, N, checkpoints=None, tol=None, check_cutoff=True,
            budget=None, problem=None) -> WTrace:
    """Branch ``w^-`` (``branch="minus"``) or ``w^+`` (``"plus"``) on sites ``0..N``.

    With ``check_cutoff`` the recursion is rerun from ``2N``; a shift of
    ``w(1)`` above ``tol`` raises :class:`CutoffTooSmall`, otherwise the
    ``2N`` values are returned.
    """
    if branch not in ("minus", "plus"):
        raise InvalidSpec(f"branch must be 'minus' or 'plus', got {branch!r}")
    tol = DEFAULT_TOLERANCES["cutoff"] if tol is None else tol
    need = 2 * N if check_cutoff else N
    if problem is None or problem.n_sites < need:
        problem = PerturbationProblem(base, perturbation, E, phi, need, budget)
    w1, w2, e1, e2 = problem.w(branch, N)
    shift = None
    err = None
    if check_cutoff:
        # keep the more accurate 2N run on 0..N; the N-vs-2N gap is its error bar
        v1, v2, f1, f2 = (x[: N + 1] for x in problem.w(branch, 2 * N))
        err = np.maximum(np.abs(f1 - e1), np.abs(f2 - e2))
        shift = float(err[1])
        if shift > tol:
            raise CutoffTooSmall(f"doubling the cutoff moved w(1) by {shift:.3e} > {tol:.1e}", shift)
        w1, w2, e1, e2 = v1, v2, f1, f2
    if checkpoints is None:
        checkpoints = log_checkpoints(N, 1.0, 64)
    sites = np.unique(np.floor(np.asarray(checkpoints, float)).astype(np.int64))
    sites = sites[(sites >= 1) & (sites <= N)]
    return WTrace(branch, w1, w2, sites, shift, e1, e2, err)


def reconstruct_solution(w: WTrace, pair: CanonicalPair, checkpoints=None) -> SolutionTrace:
    """``v(n) = w1(n) u1(n) + w2(n) u2(n)`` as a trace with truncated norms."""
    u1, u2 = pair.trace_u1.values, pair.trace_u2.values
    if u1 is None or u2 is None:
        raise ScheduleMismatch("canonical pair was propagated without keep_values")
    if u1.size != w.w1.size:
        raise ScheduleMismatch(f"w covers sites 0..{w.N}, the pair covers 0..{u1.size - 1}")
    v = w.w1 * u1 + w.w2 * u2
    L = pair.trace_u1.checkpoints if checkpoints is None else checkpoints
    return trace_from_values(pair.trace_u1.spec, pair.trace_u1.E, v, L)


@dataclass(frozen=True)
class ReconstructionCheck:
    residual: float
    direct_deviation: float

    def __float__(self):
        return self.residual


def verify_reconstruction(v: SolutionTrace, base, perturbation, E) -> ReconstructionCheck:
    """Scaled residual of ``v`` in the perturbed equation, and its distance to a direct solve."""
    x = v.values
    N = x.size - 1
    V = base.array(0, N + 1) + perturbation.array(0, N + 1)
    scale = float(np.max(np.abs(x)))
    r = x[2:] - (E - V[1:N]) * x[1:N] + x[: N - 1]
    residual = float(np.max(np.abs(r))) / scale
    direct = direct_perturbed_solve(base, perturbation, E, (x[0], x[1]), N, precision="double")
    return ReconstructionCheck(residual, float(np.max(np.abs(direct - x))) / scale)


# --------------------------------------------------------------------------
# Ratio convergence
# --------------------------------------------------------------------------

@dataclass(frozen=True, eq=False)
class RatioConvergence:
    checkpoints: np.ndarray
    ratio_v1_u1: np.ndarray
    ratio_v2_u2: np.ndarray
    kappa: float
    product: np.ndarray
    tail_start: float
    tail_dev_v1: float
    tail_dev_v2: float
    tail_dev_product: float
    converged: bool

    @property
    def product_dev(self) -> np.ndarray:
        return np.abs(self.product - 1.0)


def ratio_convergence(u_pair: CanonicalPair, v_pair, kappa: float, tail_decades: float = 1.0,
                      tol: float | None = None) -> RatioConvergence:
    """Curves ``||v_i||_L / ||u_i||_L`` and the kappa-product deviation over the tail."""
    tol = DEFAULT_TOLERANCES["ratio"] if tol is None else tol
    if not 0.0 <= kappa <= 1.0:
        raise ValueError(f"kappa must lie in [0, 1], got {kappa}")
    v1, v2 = v_pair
    u1, u2 = u_pair.trace_u1, u_pair.trace_u2
    L = u1.checkpoints
    for t in (u2, v1, v2):
        if t.checkpoints.shape != L.shape or not np.array_equal(t.checkpoints, L):
            raise ScheduleMismatch("all four traces must share one checkpoint schedule")
    r1 = np.exp(v1.log_norms - u1.log_norms)
    r2 = np.exp(v2.log_norms - u2.log_norms)
    prod = np.exp((v1.log_norms - kappa * v2.log_norms) - (u1.log_norms - kappa * u2.log_norms))
    start = L[-1] / 10.0**tail_decades
    tail = L >= start
    d1 = float(np.max(np.abs(r1[tail] - 1.0)))
    d2 = float(np.max(np.abs(r2[tail] - 1.0)))
    dp = float(np.max(np.abs(prod[tail] - 1.0)))
    return RatioConvergence(L, r1, r2, float(kappa), prod, float(start), d1, d2, dp,
                            bool(max(d1, d2, dp) < tol))


# --------------------------------------------------------------------------
# Full pipeline
# --------------------------------------------------------------------------

def _nonincreasing(x):
    return bool(np.all(np.diff(x) <= 1e-300 + 1e-12 * np.abs(x[:-1])))


@dataclass(eq=False)
class StabilityReport:
    E: float
    phi: float
    N: int
    gamma: float
    gamma1: float
    gamma2: float
    alpha: float
    kappa: float
    summability: GSummability
    w_minus: WTrace
    w_plus: WTrace
    reconstruction: dict
    ratios: RatioConvergence
    branch_asymptotics: dict
    verdict: str
    notes: list = field(default_factory=list)

    def curves(self):
        r = self.ratios
        return [
            (float(L), float(a), float(b), float(d))
            for L, a, b, d in zip(r.checkpoints, r.ratio_v1_u1, r.ratio_v2_u2, r.product_dev)
        ]

    def to_dict(self):
        s, r = self.summability, self.ratios
        sites = self.w_minus.sites

        def _w(tr):
            return {
                "sites": sites.tolist(),
                "w1": tr.w1[sites].tolist(),
                "w2": tr.w2[sites].tolist(),
                "cutoff_shift": tr.cutoff_shift,
                "site_error": None if tr.site_error is None else tr.site_error[sites].tolist(),
            }

        return {
            "E": self.E,
            "phi": self.phi,
            "N": self.N,
            "gamma": self.gamma,
            "gamma1": self.gamma1,
            "gamma2": self.gamma2,
            "alpha": self.alpha,
            "kappa": self.kappa,
            "G": {
                "total": s.total,
                "tail_majorant": s.tail_majorant,
                "verdict": s.verdict,
                "partial_sums_at_sites": s.partial_sums[sites - 1].tolist(),
            },
            "w_minus": _w(self.w_minus),
            "w_plus": _w(self.w_plus),
            "reconstruction": dict(self.reconstruction),
            "ratios": {
                "tail_start": r.tail_start,
                "tail_dev_v1": r.tail_dev_v1,
                "tail_dev_v2": r.tail_dev_v2,
                "tail_dev_product": r.tail_dev_product,
                "converged": r.converged,
            },
            "branch_asymptotics": dict(self.branch_asymptotics),
            "verdict": self.verdict,
            "notes": list(self.notes),
        }


def stability_analysis(
    base: PotentialSpec,
    perturbation: PotentialSpec,
    E: float,
    phi: float,
    N: int,
    checkpoints=None,
    gamma: float | None = None,
    gamma1: float | None = None,
    gamma2: float | None = None,
    kappa: float | None = None,
    tolerances: dict | None = None,
    check_cutoff: bool = True,
    budget: int | None = None,
) -> StabilityReport:
    """Run the whole construction for one ``(E, phi)`` and collect the evidence.

    Exponents default to a 32-phase fit of ``base`` at ``E``; ``gamma``
    defaults to the midpoint of the admissible window; ``kappa`` to
    ``alpha / (2 - alpha)``.
    """
    tol = dict(DEFAULT_TOLERANCES)
    tol.update(tolerances or {})
    N = int(N)
    if checkpoints is None:
        checkpoints = log_checkpoints(N - 1, min(100.0, (N - 1) / 100.0), 64)
    L = np.asarray(checkpoints, float)
    if np.floor(L[-1]) + 1 > N:
        raise InvalidSpec(f"checkpoint {L[-1]} is beyond the cutoff {N}")
    notes = []
    problem = PerturbationProblem(base, perturbation, E, phi, 2 * N if check_cutoff else N, budget)
    if gamma1 is None or gamma2 is None:
        fit = growth_exponents(base, E, L, n_phases=32)
        gamma1 = fit.gamma1 if gamma1 is None else gamma1
        gamma2 = fit.gamma2 if gamma2 is None else gamma2
        notes.append(f"exponents fitted over L in [{fit.window[0]:.4g}, {fit.window[1]:.4g}], residual {fit.residual:.3g}")
    C, p, support = decay_parameters(perturbation)
    if gamma is None:
        gamma = choose_gamma(gamma1, gamma2, p) if math.isfinite(p) else (gamma2 - gamma1) + 1.0
    alpha = alpha_from_exponents(gamma1, gamma2)
    if kappa is None:
        kappa = alpha_exponent(alpha)

    summ = check_G_summability(base, perturbation, E, phi, gamma, N, gamma2, tol["summability"], problem=problem)
    shifts = {}
    ws = {}
    for branch in ("minus", "plus"):
        try:
            ws[branch] = solve_w(base, perturbation, E, phi, branch, N, L, tol["cutoff"], check_cutoff,
                                 problem=problem)
        except CutoffTooSmall as exc:
            notes.append(f"w^{branch}: {exc}")
            ws[branch] = solve_w(base, perturbation, E, phi, branch, N, L, math.inf, check_cutoff,
                                 problem=problem)
        shifts[branch] = ws[branch].cutoff_shift

    pair = problem.canonical_pair(L, N)
    v1 = reconstruct_solution(ws["minus"], pair)
    v2 = reconstruct_solution(ws["plus"], pair)
    c1 = verify_reconstruction(v1, base, perturbation, E)
    c2 = verify_reconstruction(v2, base, perturbation, E)
    recon = {
        "residual_v1": c1.residual,
        "residual_v2": c2.residual,
        "direct_deviation_v1": c1.direct_deviation,
        "direct_deviation_v2": c2.direct_deviation,
    }
    ratios = ratio_convergence(pair, (v1, v2), kappa, 1.0, tol["ratio"])

    sites = ws["minus"].sites
    tail = sites[sites >= L[-1] / 10.0]
    wm, wp = ws["minus"], ws["plus"]
    asym = {
        "w1_minus_dev": np.abs(wm.dev1[tail]),
        "f_w2_minus": (1.0 + tail) ** gamma * np.abs(wm.dev2[tail]),
        "w1_plus": np.abs(wp.dev1[tail]),
        "w2_plus_dev": np.abs(wp.dev2[tail]),
    }
    branch = {k + "_nonincreasing": _nonincreasing(v) for k, v in asym.items()}
    branch.update({k + "_last": float(v[-1]) for k, v in asym.items() if v.size})

    ok = (
        summ.verdict == "summable-like"
        and all(s is None or s <= tol["cutoff"] for s in shifts.values())
        and max(c1.residual, c2.residual) < tol["residual"]
        and ratios.converged
    )
    return StabilityReport(
        E=float(E), phi=float(phi), N=N, gamma=float(gamma), gamma1=float(gamma1), gamma2=float(gamma2),
        alpha=float(alpha), kappa=float(kappa), summability=summ, w_minus=wm, w_plus=wp,
        reconstruction=recon, ratios=ratios, branch_asymptotics=branch,
        verdict="stable-like" if ok else "not-established", notes=notes,
    )
