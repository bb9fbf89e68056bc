"""Transfer-matrix propagation of generalized eigenfunctions.

Solves ``u(n+1) + u(n-1) + V(n) u(n) = E u(n)`` site by site from an initial
pair ``(u(0), u(1))`` and records truncated norms

    ||u||_L**2 = sum_{n=1}^{[L]} u(n)**2 + (L - [L]) u([L]+1)**2

at an increasing checkpoint schedule. Left traces run toward negative sites
by reflecting the lattice, ``m = 1 - n``, so their norms run over
``n = 0, -1, ..., 1 - [L]`` and the stored initial pair stays ``(u(0), u(1))``.
"""
from __future__ import annotations

import functools
import math
import os
from dataclasses import dataclass, field

import numpy as np

from . import _kernels
from .errors import InvalidSpec, NumericOverflow, SiteBudgetExceeded
from .potentials import PotentialSpec

DEFAULT_SITE_BUDGET = 10**7
BUDGET_ENV = "SPECTRAL_LAB_SITE_BUDGET"
LN2 = math.log(2.0)


def site_budget(requested: int | None = None) -> int:
    """Requested budget (default 10**7), capped by ``$SPECTRAL_LAB_SITE_BUDGET``."""
    budget = DEFAULT_SITE_BUDGET if requested is None else int(requested)
    cap = os.environ.get(BUDGET_ENV)
    if cap:
        budget = min(budget, int(float(cap)))
    return budget


def log_checkpoints(L_max: float, L_min: float = 1e2, count: int = 64) -> np.ndarray:
    """``count`` log-spaced checkpoints from ``L_min`` to ``L_max``."""
    if not 0 < L_min < L_max:
        raise InvalidSpec(f"need 0 < L_min < L_max, got {L_min}, {L_max}")
    return np.geomspace(L_min, L_max, int(count))


def _schedule(checkpoints) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    L = np.asarray(checkpoints, dtype=np.float64).ravel()
    if L.size == 0 or not np.all(L > 0) or np.any(np.diff(L) <= 0):
        raise InvalidSpec("checkpoints must be positive and strictly increasing")
    sites = np.floor(L).astype(np.int64)
    return L, sites, L - sites


@functools.lru_cache(maxsize=16)
def _potential_window(spec: PotentialSpec, N: int, direction: str) -> np.ndarray:
    """Potential on sites 0..N of the (possibly reflected) lattice."""
    if direction == "right":
        V = spec.array(0, N + 1)
    elif direction == "left":
        if not spec.whole_line:
            raise InvalidSpec(f"{spec.family} potential has no left half-line")
        V = np.ascontiguousarray(spec.array(1 - N, 2)[::-1])
    else:
        raise InvalidSpec(f"direction must be 'right' or 'left', got {direction!r}")
    V.setflags(write=False)
    return V


def potential_window(spec, N, direction="right"):
    return _potential_window(spec, int(N), direction)


def step(u_prev: float, u_cur: float, E: float, V_n: float) -> float:
    """One application of the eigenvalue recurrence."""
    return (E - V_n) * u_cur - u_prev


def wronskian(u1_pair, u2_pair) -> float:
    """``u1(n+1) u2(n) - u1(n) u2(n+1)`` from pairs taken at sites (n, n+1)."""
    return u1_pair[1] * u2_pair[0] - u1_pair[0] * u2_pair[1]


@dataclass(frozen=True, eq=False)
class SolutionTrace:
    """A propagated solution with checkpointed truncated norms.

    ``windows[i]`` is ``(u(s), u(s+1))`` at ``s = floor(checkpoints[i])`` and
    ``terminal`` is ``(u(N-1), u(N))``; both are stored divided by
    ``2**exponent`` (see the matching ``*_exp`` arrays).
    """

    spec: PotentialSpec
    E: float
    init: tuple[float, float]
    direction: str
    checkpoints: np.ndarray
    norms: np.ndarray
    log_norms: np.ndarray
    windows: np.ndarray
    window_exp: np.ndarray
    terminal: tuple[float, float]
    terminal_exp: int = 0
    values: np.ndarray | None = field(default=None, repr=False)

    @property
    def N(self) -> int:
        return int(np.floor(self.checkpoints[-1])) + 1

    @property
    def log_rescale(self) -> float:
        return self.terminal_exp * LN2

    def norm_sq(self) -> np.ndarray:
        return self.norms**2


def _check_budget(N: int, budget: int | None):
    b = site_budget(budget)
    if N > b:
        raise SiteBudgetExceeded(f"{N} sites requested, budget is {b}")


def _trace_from_sums(spec, E, init, direction, L, nsq, win, exps, term, e, values=None):
    with np.errstate(divide="ignore", over="ignore"):
        log_norms = 0.5 * np.log(nsq) + exps * LN2
        norms = np.ldexp(np.sqrt(nsq), exps)  # inf past the double range; log_norms stays exact
    return SolutionTrace(
        spec=spec,
        E=float(E),
        init=(float(init[0]), float(init[1])),
        direction=direction,
        checkpoints=L,
        norms=norms,
        log_norms=log_norms,
        windows=np.ascontiguousarray(win),
        window_exp=exps,
        terminal=(float(term[0]), float(term[1])),
        terminal_exp=int(e),
        values=values,
    )


def trace_from_values(spec, E, values, checkpoints, direction="right") -> SolutionTrace:
    """Wrap a solution array ``u[0..N]`` as a trace (norms at ``checkpoints``)."""
    u = np.ascontiguousarray(values, dtype=np.float64)
    L, sites, fracs = _schedule(checkpoints)
    if sites[-1] + 1 >= u.size:
        raise InvalidSpec(f"checkpoint {L[-1]} needs site {sites[-1] + 1}, array ends at {u.size - 1}")
    nsq = _kernels.truncated_norms_sq(u, sites, fracs)
    win = np.stack([u[sites], u[sites + 1]], axis=1)
    exps = np.zeros(L.size, dtype=np.int64)
    init = _oriented((u[0], u[1]), direction)
    N = u.size - 1
    return _trace_from_sums(spec, E, init, direction, L, nsq, win, exps, (u[N - 1], u[N]), 0, u)


def _oriented(init, direction):
    return (init[1], init[0]) if direction == "left" else (init[0], init[1])


def solution_values(spec, E, init, N, direction="right", budget=None) -> np.ndarray:
    """Plain solution array ``u[0..N]`` (no rescaling)."""
    _check_budget(N, budget)
    V = potential_window(spec, N, direction)
    x0, x1 = _oriented(init, direction)
    u, status = _kernels.recur_values(V, float(E), float(x0), float(x1), int(N))
    if status:
        raise NumericOverflow(f"solution overflowed at site {status}; use streaming propagation")
    return u


def propagate(
    spec: PotentialSpec,
    E: float,
    init,
    checkpoints,
    direction: str = "right",
    budget: int | None = None,
    keep_values: bool = False,
) -> SolutionTrace:
    """Propagate one solution and record its truncated norms.

    With ``keep_values`` the whole array ``u[0..N]`` is kept on the trace (no
    rescaling is possible then); otherwise the stream is rescaled by
    ``2**-512`` whenever it exceeds ``2**512``.
    """
    if init[0] == 0 and init[1] == 0:
        raise InvalidSpec("initial pair must be nonzero")
    L, sites, fracs = _schedule(checkpoints)
    N = int(sites[-1]) + 1
    _check_budget(N, budget)
    if keep_values:
        u = solution_values(spec, E, init, N, direction, budget)
        return trace_from_values(spec, E, u, L, direction)
    V = potential_window(spec, N, direction)
    x0, x1 = _oriented(init, direction)
    naa, _, _, win, exps, term, e, status = _kernels.propagate_pair(
        V, float(E), float(x0), float(x1), 0.0, 0.0, sites, fracs
    )
    if status:
        raise NumericOverflow(f"single step at site {status} exceeded the rescaling guard")
    return _trace_from_sums(spec, E, init, direction, L, naa, win[:, :2], exps, term[:2], e)


def canonical_initial(phi: float) -> tuple[tuple[float, float], tuple[float, float]]:
    """Orthogonal initial data ``u1 = (-sin phi, cos phi)``, ``u2 = (cos phi, sin phi)``."""
    phi = float(phi)
    if not (-math.pi / 2 < phi <= math.pi / 2 + 1e-15):
        raise InvalidSpec(f"phi must lie in (-pi/2, pi/2], got {phi}")
    if abs(phi - math.pi / 2) <= 1e-15:
        s, c = 1.0, 0.0
    else:
        s, c = math.sin(phi), math.cos(phi)
    return (-s, c), (c, s)


@dataclass(frozen=True, eq=False)
class CanonicalPair:
    phi: float
    trace_u1: SolutionTrace
    trace_u2: SolutionTrace
    wronskian_check: float
    wronskians: np.ndarray
    wronskian_deviation: np.ndarray


def _wronskian_stats(win, exps):
    """Restored Wronskians and their rescale-adjusted deviation from 1."""
    t1 = win[:, 1] * win[:, 2]
    t2 = win[:, 0] * win[:, 3]
    ws = t1 - t2
    unit = np.ldexp(1.0, -2 * exps)
    dev = np.abs(ws - unit) / np.maximum(unit, np.abs(t1) + np.abs(t2))
    # restoring 4**e amplifies rounding; past the double range it reads inf
    with np.errstate(over="ignore"):
        return np.ldexp(ws, 2 * exps), dev


def canonical_pair(
    spec: PotentialSpec,
    E: float,
    phi: float,
    checkpoints,
    direction: str = "right",
    budget: int | None = None,
    keep_values: bool = False,
) -> CanonicalPair:
    """Propagate ``u_{1,phi,E}`` and ``u_{2,phi,E}`` together."""
    i1, i2 = canonical_initial(phi)
    if keep_values:
        t1 = propagate(spec, E, i1, checkpoints, direction, budget, keep_values=True)
        t2 = propagate(spec, E, i2, checkpoints, direction, budget, keep_values=True)
        win = np.hstack([t1.windows, t2.windows])
        exps = t1.window_exp
        term_w = wronskian(t1.terminal, t2.terminal)
    else:
        L, sites, fracs = _schedule(checkpoints)
        N = int(sites[-1]) + 1
        _check_budget(N, budget)
        V = potential_window(spec, N, direction)
        a = _oriented(i1, direction)
        b = _oriented(i2, direction)
        naa, nbb, _, win, exps, term, e, status = _kernels.propagate_pair(
            V, float(E), a[0], a[1], b[0], b[1], sites, fracs
        )
        if status:
            raise NumericOverflow(f"single step at site {status} exceeded the rescaling guard")
        t1 = _trace_from_sums(spec, E, i1, direction, L, naa, win[:, :2], exps, term[:2], e)
        t2 = _trace_from_sums(spec, E, i2, direction, L, nbb, win[:, 2:], exps, term[2:], e)
        with np.errstate(over="ignore"):
            term_w = float(np.ldexp(wronskian(term[:2], term[2:]), 2 * e))
    ws, dev = _wronskian_stats(win, exps)
    return CanonicalPair(float(phi), t1, t2, float(term_w), ws, dev)


@dataclass(frozen=True, eq=False)
class BasisGram:
    """Truncated Gram matrices of the solutions with data (1, 0) and (0, 1).

    By linearity the squared norm of the solution with initial pair
    ``(x0, x1)`` is ``x0^2 aa + 2 x0 x1 ab + x1^2 bb`` (times ``4**exps``).
    """

    spec: PotentialSpec
    E: float
    direction: str
    checkpoints: np.ndarray
    aa: np.ndarray
    bb: np.ndarray
    ab: np.ndarray
    exps: np.ndarray

    def log_norms(self, init) -> np.ndarray:
        x0, x1 = init
        q = x0 * x0 * self.aa + 2.0 * x0 * x1 * self.ab + x1 * x1 * self.bb
        with np.errstate(divide="ignore"):
            return 0.5 * np.log(np.maximum(q, 0.0)) + self.exps * LN2


def basis_gram(spec, E, checkpoints, direction="right", budget=None) -> BasisGram:
    L, sites, fracs = _schedule(checkpoints)
    N = int(sites[-1]) + 1
    _check_budget(N, budget)
    V = potential_window(spec, N, direction)
    # reflected lattice swaps the roles of u(0) and u(1)
    a = (1.0, 0.0) if direction == "right" else (0.0, 1.0)
    b = (0.0, 1.0) if direction == "right" else (1.0, 0.0)
    naa, nbb, nab, _, exps, _, _, status = _kernels.propagate_pair(
        V, float(E), a[0], a[1], b[0], b[1], sites, fracs
    )
    if status:
        raise NumericOverflow(f"single step at site {status} exceeded the rescaling guard")
    return BasisGram(spec, float(E), direction, L, naa, nbb, nab, exps)
