"""Acceptance criteria 1-11, each printing one PASS/FAIL line at its stated tolerance."""
import contextlib
import io
import json
import math
import subprocess
import sys
import time

import mpmath
import numpy as np

from conftest import fibonacci_word, record_criterion
from spectral_lab import cli
from spectral_lab.asymptotics import alpha_exponent, growth_exponents, locate_spectral_energy
from spectral_lab.oracle import abel_sum_bound
from spectral_lab.potentials import Free, Perturbed, Sturmian
from spectral_lab.propagator import canonical_pair, log_checkpoints
from spectral_lab.stability import (
    PerturbationProblem,
    choose_gamma,
    coupling_matrix,
    reconstruct_solution,
    solve_w,
    stability_analysis,
    verify_reconstruction,
)
from spectral_lab.thresholds import (
    cubic_largest_root,
    fibonacci_gamma_bounds,
    sparse_gamma_bounds,
    sparse_threshold,
)

FIB = Sturmian(1.0, "golden", 0)
FREE_P4 = Perturbed(Free(), 1.0, 4.0, "plus")
PHASES = (0.0, 0.3, math.pi / 4, 1.0, math.pi / 2)


@contextlib.contextmanager
def criterion(number):
    """Record FAIL with the exception if the body raises before reporting."""
    try:
        yield
    except AssertionError:
        raise
    except Exception as exc:
        record_criterion(number, False, f"raised {type(exc).__name__}: {exc}")
        raise


def check(number, passed, detail):
    record_criterion(number, passed, detail)
    assert passed, detail


def test_criterion_01_fibonacci_threshold():
    with criterion(1):
        t = time.perf_counter()
        r = subprocess.run(
            [sys.executable, "-m", "spectral_lab.cli", "thresholds", "--model", "sturmian-fibonacci", "--lambda", "1"],
            capture_output=True, text=True, check=True,
        )
        dt = time.perf_counter() - t
        doc = json.loads(r.stdout)
        p = doc["threshold_p"]
        c = cubic_largest_root(1.0)
        res = abs(c**3 - 3 * c - 1)
        ok = 21.55 <= p <= 21.70 and res < 1e-10 and dt < 1.0
        check(1, ok, f"3*g2-g1 = {p:.6f} in [21.55, 21.70]; |c^3-3c-1| = {res:.1e}; CLI {dt:.2f} s")


def test_criterion_02_sparse_threshold():
    with criterion(2):
        t = time.perf_counter()
        a = 0.5
        left, right = (1 + 2 * a) / a, (3 + 2 * a) / (2 * a)
        p = sparse_threshold(0.5)
        g = sparse_gamma_bounds(0.5)
        dt = time.perf_counter() - t
        ok = p == 4.0 and left == right == 4.0 and g == (1.0, 1.5) and dt < 1.0
        check(2, ok, f"sparse_threshold(1/2) = {p!r}; branches {left!r}, {right!r}; gamma bounds {g}; {dt * 1e3:.1f} ms")


def test_criterion_03_sturmian_word():
    with criterion(3):
        n = 10**5
        t = time.perf_counter()
        v = FIB.array(1, n + 1)
        dt_v = time.perf_counter() - t
        word = np.array(fibonacci_word(n), dtype=float)
        mismatches = int(np.count_nonzero(v != word))
        ok = mismatches == 0 and dt_v < 5.0
        check(3, ok, f"{mismatches} mismatches over {n} letters vs a->ab, b->a; potential built in {dt_v:.2f} s")


def test_criterion_04_wronskian_conservation():
    with criterion(4):
        rng = np.random.default_rng(20261014)
        L = log_checkpoints(1e6, 1e2, 64)
        t = time.perf_counter()
        worst, worst_at = 0.0, None
        for _ in range(20):
            E = float(rng.uniform(-2.0, 3.0))
            phi = float(rng.uniform(-math.pi / 2, math.pi / 2))
            pair = canonical_pair(FIB, E, phi, L)
            d = float(np.max(pair.wronskian_deviation))
            if d >= worst:
                worst, worst_at = d, (E, phi)
        dt = time.perf_counter() - t
        ok = worst < 1e-9 and dt < 60
        check(4, ok, f"max rescale-adjusted |W-1| = {worst:.2e} (at E={worst_at[0]:.4f}) over 20 pairs to L=1e6; {dt:.1f} s")


def test_criterion_05_free_exponents():
    with criterion(5):
        t = time.perf_counter()
        fit = growth_exponents(Free(), 0.0, log_checkpoints(1e6, 1e3, 64), n_phases=32)
        dt = time.perf_counter() - t
        ok = (0.45 <= fit.gamma1 <= 0.55 and 0.45 <= fit.gamma2 <= 0.55 and 0.9 <= fit.alpha <= 1.0
              and fit.residual < 0.05 and dt < 30)
        check(5, ok, f"gamma1 = {fit.gamma1:.5f}, gamma2 = {fit.gamma2:.5f}, alpha = {fit.alpha:.5f}, "
                     f"residual = {fit.residual:.1e}; {dt:.2f} s")


def test_criterion_06_nilpotency():
    with criterion(6):
        rng = np.random.default_rng(6)
        worst_sq, worst_det = 0.0, 0.0
        for _ in range(10**4):
            scale = 10.0 ** rng.uniform(-6, 6, size=3)
            P, u1, u2 = rng.normal(size=3) * scale
            A = coupling_matrix(P, u1, u2)
            n2 = float(np.sum(A.entries**2))
            if n2 == 0:
                continue
            worst_sq = max(worst_sq, float(np.max(np.abs(A.square()))) / n2)
            worst_det = max(worst_det, abs(A.unit_det() - 1.0) / (1.0 + n2))
        ok = worst_sq < 1e-14 and worst_det < 1e-14
        check(6, ok, f"max |A^2|/||A||^2 = {worst_sq:.1e}; max |det(I+A)-1|/(1+||A||^2) = {worst_det:.1e} over 1e4 draws")


def test_criterion_07_variation_of_parameters():
    with criterion(7):
        N = 10**5
        t = time.perf_counter()
        worst_res, worst_dir = 0.0, 0.0
        for phi in PHASES:
            prob = PerturbationProblem(Free(), FREE_P4, 0.0, phi, 2 * N)
            L = log_checkpoints(N - 1, 100, 64)
            pair = prob.canonical_pair(L, N)
            for branch in ("minus", "plus"):
                w = solve_w(Free(), FREE_P4, 0.0, phi, branch, N, L, problem=prob)
                chk = verify_reconstruction(reconstruct_solution(w, pair), Free(), FREE_P4, 0.0)
                worst_res = max(worst_res, chk.residual)
                worst_dir = max(worst_dir, chk.direct_deviation)
        dt = (time.perf_counter() - t) / len(PHASES)
        ok = worst_res < 1e-9 and worst_dir < 1e-8 and dt < 10
        check(7, ok, f"scaled residual {worst_res:.1e} < 1e-9; direct-solve deviation {worst_dir:.1e} < 1e-8; "
                     f"{dt:.2f} s per phase ({len(PHASES)} phases)")


def test_criterion_08_branch_asymptotics():
    with criterion(8):
        N = 10**5
        gamma = choose_gamma(0.5, 0.5, 4.0)
        L = log_checkpoints(N - 1, 100, 64)
        mono, small, shift = True, 0.0, 0.0
        for phi in PHASES:
            w = solve_w(Free(), FREE_P4, 0.0, phi, "minus", N, L, tol=1e-6)
            tail = w.sites[w.sites >= N // 10]
            d1 = np.abs(w.dev1[tail])
            fd2 = (1.0 + tail) ** gamma * np.abs(w.dev2[tail])
            mono &= bool(np.all(np.diff(d1) < 0) and np.all(np.diff(fd2) < 0))
            after = w.sites[w.sites >= 10**4]
            small = max(small, float(np.max(np.abs(w.dev1[after]))),
                        float(np.max((1.0 + after) ** gamma * np.abs(w.dev2[after]))))
            shift = max(shift, w.cutoff_shift)
        ok = mono and small < 1e-3 and shift < 1e-6
        check(8, ok, f"strictly decreasing on top-decade checkpoints: {mono}; max over n >= 1e4 = {small:.1e}; "
                     f"N->2N shift of w(1) = {shift:.1e} (gamma = {gamma})")


def test_criterion_09_fibonacci_ratio_convergence():
    with criterion(9):
        t = time.perf_counter()
        E, score = locate_spectral_energy(FIB, -2.0, 3.0)
        g1, g2 = fibonacci_gamma_bounds(1.0)
        pert = Perturbed(Free(), 1.0, 25.0, "alternating")
        N = 10**6 + 1
        rep = stability_analysis(FIB, pert, E, 0.0, N, log_checkpoints(1e6, 1e2, 64), gamma1=g1, gamma2=g2)
        dt = time.perf_counter() - t
        r = rep.ratios
        top = r.checkpoints >= 1e5
        lo = min(r.ratio_v1_u1[top].min(), r.ratio_v2_u2[top].min())
        hi = max(r.ratio_v1_u1[top].max(), r.ratio_v2_u2[top].max())
        prod = float(np.max(r.product_dev[top]))
        ok = 0.99 <= lo and hi <= 1.01 and prod < 1e-2 and dt < 300
        check(9, ok, f"E = {E:.8f} (log growth {score:.2f}); ratios in [{lo:.12f}, {hi:.12f}] over L in [1e5, 1e6]; "
                     f"product deviation {prod:.1e} at kappa = {alpha_exponent(rep.alpha):.2e}; {dt:.1f} s")


def _premise_instance(rng):
    b = rng.uniform(0.05, 2.0)
    a = b + rng.uniform(0.1, 3.0)
    L = int(10 ** rng.uniform(0, 4))
    n = np.arange(1, L + 1, dtype=float)
    xi = rng.uniform(-1, 1, L) * (1.0 + n) ** -a
    t = rng.uniform(0, 1)
    b1, b2 = 2 * b * t, 2 * b * (1 - t)
    # squared partial sums stay below (1+l)^b1 and (1+l)^b2
    inc1 = ((1.0 + n) ** b1 - n**b1) * rng.uniform(0, 1, L)
    inc2 = ((1.0 + n) ** b2 - n**b2) * rng.uniform(0, 1, L)
    psi1 = np.sqrt(inc1) * rng.choice([-1, 1], L)
    psi2 = np.sqrt(inc2) * rng.choice([-1, 1], L)
    return xi, psi1, psi2, a, b, L


def test_criterion_10_abel_bound():
    with criterion(10):
        rng = np.random.default_rng(10)
        failures = 0
        for _ in range(1000):
            rep = abel_sum_bound(*_premise_instance(rng))
            failures += not (rep.satisfied and rep.lhs <= rep.rhs)
        L = 100
        n = np.arange(1, L + 1, dtype=float)
        rep = abel_sum_bound((1.0 + n) ** -2.0, np.ones(L), np.ones(L), 2.0, 1.0, L)
        with mpmath.workdps(50):
            exact = float(mpmath.fsum((1 + mpmath.mpf(k)) ** -2 for k in range(1, L + 1)))
        err = abs(rep.lhs - exact)
        ok = failures == 0 and err < 1e-12 and rep.satisfied
        check(10, ok, f"{failures}/1000 random instances violate lhs <= rhs; explicit lhs = {rep.lhs:.13f}, "
                      f"|lhs - mp| = {err:.1e}")


SCENARIOS = [
    ["thresholds", "--model", "sturmian-fibonacci", "--lambda", "1"],
    ["cf", "--theta", "golden", "--k", "30"],
    ["potential", "--potential", "fibonacci", "--p", "2", "--sign-pattern", "seeded-random", "--stop", "500"],
    ["solve", "--potential", "fibonacci", "--energy-grid", "-1", "2", "8", "--phi", "0", "0.5", "--L-max", "1e5"],
    ["exponents", "--potential", "free", "--energy", "0", "0.5", "--L-min", "1e3", "--L-max", "1e5", "--n-phases", "8"],
    ["subordinacy", "--potential", "fibonacci", "--energy", "0.9421532800000001", "--L-max", "1e5"],
    ["stability", "--potential", "free", "--p", "4", "--sign-pattern", "seeded-random", "--energy", "0", "0.5",
     "--N", "20000", "--gamma1", "0.5", "--gamma2", "0.5"],
    ["oracle", "abel", "--a", "2", "--b", "1", "--L", "200"],
]


def test_criterion_11_reproducibility(tmp_path):
    with criterion(11):
        differing = []
        for k, argv in enumerate(SCENARIOS):
            outs = []
            for run in range(2):
                out = tmp_path / f"s{k}_{run}.out"
                flags = ["--seed", "1234", "--jobs", str(1 + 3 * run), "--out", str(out)]
                with contextlib.redirect_stderr(io.StringIO()):
                    code = cli.main(flags + argv)
                assert code == 0, argv
                outs.append(out.read_bytes())
                side = out.with_suffix(".curves.csv")
                if side.exists():
                    outs.append(side.read_bytes())
            half = len(outs) // 2
            if outs[:half] != outs[half:]:
                differing.append(argv[0])
        ok = not differing
        check(11, ok, f"{len(SCENARIOS)} scenarios run twice (seed 1234, jobs 1 vs 4): "
                      f"{'all byte-identical' if ok else 'differ: ' + ', '.join(differing)}")
