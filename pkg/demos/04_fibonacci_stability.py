"""Stability of the Fibonacci chain under a p = 25 alternating perturbation.

The closed-form exponent bounds at lambda = 1 put the decay threshold at
3 gamma2 - gamma1 = 21.63..., so p = 25 lies above it. At an energy of small
transfer-matrix growth the norm ratios ||v_i||_L / ||u_i||_L are followed
up to L = 10**6.
"""
from spectral_lab.asymptotics import locate_spectral_energy
from spectral_lab.potentials import Free, Perturbed, Sturmian
from spectral_lab.propagator import log_checkpoints
from spectral_lab.stability import stability_analysis
from spectral_lab.thresholds import fibonacci_gamma_bounds, threshold_report

print(threshold_report("sturmian-fibonacci", lam=1.0).to_dict())

fib = Sturmian(1.0, "golden", 0)
E, score = locate_spectral_energy(fib, -2.0, 3.0)
g1, g2 = fibonacci_gamma_bounds(1.0)
pert = Perturbed(Free(), 1.0, 25.0, "alternating")
rep = stability_analysis(fib, pert, E, 0.0, 10**6 + 1, log_checkpoints(1e6, 1.0, 64), gamma1=g1, gamma2=g2)

print(f"E = {E:.10f}, gamma = {rep.gamma:.4f}, kappa = {rep.kappa:.3e}")
for L, a, b, d in rep.curves()[1::9]:
    print(f"  L={L:12.1f}  v1/u1-1={a - 1:+.2e}  v2/u2-1={b - 1:+.2e}  product dev={d:.2e}")
print("verdict:", rep.verdict)
