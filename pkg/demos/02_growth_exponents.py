"""Power-law growth of generalized eigenfunctions.

For V = 0 every solution at E = 0 is bounded and oscillating, so its
truncated norm grows like sqrt(L). On the Fibonacci chain the envelope is
still polynomial on the spectrum, with exponents spread over the phase grid.
"""
from spectral_lab.asymptotics import growth_exponents, locate_spectral_energy
from spectral_lab.potentials import Free, Sturmian
from spectral_lab.propagator import log_checkpoints

L = log_checkpoints(1e6, 1e3, 64)

fit = growth_exponents(Free(), 0.0, L)
print(f"free, E=0:      gamma1={fit.gamma1:.4f} gamma2={fit.gamma2:.4f} alpha={fit.alpha:.4f} residual={fit.residual:.1e}")

fib = Sturmian(1.0, "golden", 0)
E, score = locate_spectral_energy(fib, -2.0, 3.0)
print(f"Fibonacci: low-growth energy E={E:.8f}, log max ||T_n|| = {score:.2f}")
fit = growth_exponents(fib, E, L)
print(f"Fibonacci, E:   gamma1={fit.gamma1:.4f} gamma2={fit.gamma2:.4f} alpha={fit.alpha:.4f} residual={fit.residual:.2f}")
print("fit window:", fit.window, " nonpositive profiles:", fit.nonpositive)
