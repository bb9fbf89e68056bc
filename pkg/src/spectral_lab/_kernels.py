"""Compiled inner loops. Everything here is pure and releases the GIL."""
import math

import numpy as np
from numba import njit

RESCALE_LIMIT = 2.0**512
RESCALE_EXP = 512
_DOWN = 2.0**-512
_DOWN2 = 2.0**-1024


@njit(cache=True, nogil=True, inline="always")
def _neumaier(s, c, x):
    t = s + x
    if abs(s) >= abs(x):
        c += (s - t) + x
    else:
        c += (x - t) + s
    return t, c


@njit(cache=True, nogil=True)
def propagate_pair(V, E, a0, a1, b0, b1, ck_site, ck_frac):
    """Advance two solutions of u(n+1) = (E - V(n)) u(n) - u(n-1).

    ``V[n]`` holds the potential at site ``n``; sites run 0..N with
    N = ck_site[-1] + 1. Returns per-checkpoint squared truncated norms of
    each solution, their truncated inner product, the window
    (a(s), a(s+1), b(s), b(s+1)) at s = floor(L), and the binary exponent
    e with true value = stored * 2**e (norms: 2**(2e)).
    """
    m = ck_site.shape[0]
    N = ck_site[m - 1] + 1
    naa = np.empty(m)
    nbb = np.empty(m)
    nab = np.empty(m)
    win = np.empty((m, 4))
    exps = np.empty(m, dtype=np.int64)
    term = np.empty(4)
    saa = 0.0
    caa = 0.0
    sbb = 0.0
    cbb = 0.0
    sab = 0.0
    cab = 0.0
    ap, ac, bp, bc = a0, a1, b0, b1
    e = 0
    j = 0
    status = 0
    for n in range(1, N + 1):
        while j < m and ck_site[j] + 1 == n:
            f = ck_frac[j]
            naa[j] = (saa + caa) + f * ac * ac
            nbb[j] = (sbb + cbb) + f * bc * bc
            nab[j] = (sab + cab) + f * ac * bc
            win[j, 0] = ap
            win[j, 1] = ac
            win[j, 2] = bp
            win[j, 3] = bc
            exps[j] = e
            j += 1
        if n == N:
            break
        saa, caa = _neumaier(saa, caa, ac * ac)
        sbb, cbb = _neumaier(sbb, cbb, bc * bc)
        sab, cab = _neumaier(sab, cab, ac * bc)
        g = E - V[n]
        an = g * ac - ap
        bn = g * bc - bp
        ap = ac
        ac = an
        bp = bc
        bc = bn
        big = max(max(abs(ac), abs(ap)), max(abs(bc), abs(bp)))
        if big > RESCALE_LIMIT:
            if not math.isfinite(big) or big * _DOWN > RESCALE_LIMIT:
                status = n
                break
            ac *= _DOWN
            ap *= _DOWN
            bc *= _DOWN
            bp *= _DOWN
            saa *= _DOWN2
            caa *= _DOWN2
            sbb *= _DOWN2
            cbb *= _DOWN2
            sab *= _DOWN2
            cab *= _DOWN2
            e += RESCALE_EXP
    term[0] = ap
    term[1] = ac
    term[2] = bp
    term[3] = bc
    return naa, nbb, nab, win, exps, term, e, status


@njit(cache=True, nogil=True)
def recur_values(V, E, x0, x1, N):
    """Full solution array u[0..N]; status = first non-finite site or 0."""
    u = np.empty(N + 1)
    u[0] = x0
    if N >= 1:
        u[1] = x1
    status = 0
    for n in range(1, N):
        u[n + 1] = (E - V[n]) * u[n] - u[n - 1]
        if not math.isfinite(u[n + 1]):
            status = n + 1
            break
    return u, status


@njit(cache=True, nogil=True)
def truncated_norms_sq(u, ck_site, ck_frac):
    """Squared truncated norms sum_{n=1}^{s} u(n)^2 + f u(s+1)^2 (compensated)."""
    m = ck_site.shape[0]
    out = np.empty(m)
    s = 0.0
    c = 0.0
    j = 0
    N = ck_site[m - 1] + 1
    for n in range(1, N + 1):
        while j < m and ck_site[j] + 1 == n:
            out[j] = (s + c) + ck_frac[j] * u[n] * u[n]
            j += 1
        if n == N:
            break
        s, c = _neumaier(s, c, u[n] * u[n])
    return out


@njit(cache=True, nogil=True)
def cumulative_compensated(x):
    out = np.empty(x.shape[0])
    s = 0.0
    c = 0.0
    for i in range(x.shape[0]):
        s, c = _neumaier(s, c, x[i])
        out[i] = s + c
    return out


@njit(cache=True, nogil=True)
def w_backward(P, u1, u2, N, end1, end2):
    """Backward variation-of-parameters recursion w(n) = (I - A(n)) w(n+1).

    With A(n) = -P(n) [[u1 u2, u2^2], [-u1^2, -u1 u2]] the update reads
    s = P(n) (u1(n) w1 + u2(n) w2); w1 += u2(n) s; w2 -= u1(n) s.
    The deviations d = w - (end1, end2) are accumulated directly so that
    small departures from the terminal data keep full relative precision.
    Arrays are indexed by site; entry 0 is a copy of entry 1.
    """
    d1 = np.empty(N + 1)
    d2 = np.empty(N + 1)
    d1[N] = 0.0
    d2[N] = 0.0
    for n in range(N - 1, 0, -1):
        x1 = d1[n + 1]
        x2 = d2[n + 1]
        s = P[n] * (u1[n] * (end1 + x1) + u2[n] * (end2 + x2))
        d1[n] = x1 + u2[n] * s
        d2[n] = x2 - u1[n] * s
    d1[0] = d1[1]
    d2[0] = d2[1]
    return d1, d2


@njit(cache=True, nogil=True)
def growth_scores(V, energies, N):
    """Max over n <= N of log ||T_n(E)|| (Frobenius), one value per energy."""
    out = np.empty(energies.shape[0])
    for k in range(energies.shape[0]):
        E = energies[k]
        ap, ac, bp, bc = 1.0, 0.0, 0.0, 1.0
        logscale = 0.0
        best = 0.0
        for n in range(1, N):
            g = E - V[n]
            an = g * ac - ap
            bn = g * bc - bp
            ap = ac
            ac = an
            bp = bc
            bc = bn
            nrm = ac * ac + ap * ap + bc * bc + bp * bp
            if nrm > 1e100:
                r = 1.0 / math.sqrt(nrm)
                ac *= r
                ap *= r
                bc *= r
                bp *= r
                logscale += 0.5 * math.log(nrm)
                nrm = 1.0
            val = logscale + 0.5 * math.log(nrm)
            if val > best:
                best = val
        out[k] = best
    return out
