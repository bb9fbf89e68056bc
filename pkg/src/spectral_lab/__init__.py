"""Numerical laboratory for one-dimensional discrete Schrödinger operators.

Sturmian, sparse and polynomially perturbed potentials; generalized
eigenfunction propagation with truncated norms; power-law growth exponents
and subordinacy ratios; a constructive variation-of-parameters check of
spectral stability under decaying perturbations; closed-form decay
thresholds.

Submodules load on first attribute access so that light commands (the
threshold calculators) do not pay for the compiled kernels.
"""
import importlib

__version__ = "0.1.0"

_EXPORTS = {
    "SpectralLabError": "errors",
    "GOLDEN_MEAN": "numbertheory",
    "SILVER_MEAN": "numbertheory",
    "QuadraticIrrational": "numbertheory",
    "continued_fraction": "numbertheory",
    "parse_theta": "numbertheory",
    "Explicit": "potentials",
    "Free": "potentials",
    "Perturbed": "potentials",
    "Sparse": "potentials",
    "Sturmian": "potentials",
    "potential_array": "potentials",
    "potential_value": "potentials",
    "spec_from_dict": "potentials",
    "canonical_pair": "propagator",
    "log_checkpoints": "propagator",
    "propagate": "propagator",
    "growth_exponents": "asymptotics",
    "stability_analysis": "stability",
    "fibonacci_gamma_bounds": "thresholds",
    "sparse_threshold": "thresholds",
    "sturmian_threshold": "thresholds",
    "threshold_report": "thresholds",
}

__all__ = sorted(_EXPORTS)


def __getattr__(name):
    mod = _EXPORTS.get(name)
    if mod is None:
        raise AttributeError(f"module 'spectral_lab' has no attribute {name!r}")
    return getattr(importlib.import_module(f".{mod}", __name__), name)


def __dir__():
    return sorted(set(globals()) | set(_EXPORTS))
