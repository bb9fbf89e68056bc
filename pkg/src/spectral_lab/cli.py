"""``spectral-lab`` command line front end.

A run is described by a :class:`Scenario`, built from an optional JSON
config file with command-line flags layered on top. Grid points (energy by
phase) are evaluated on a thread pool; results are written in grid order,
atomically, with the seed recorded in every output. A failing grid point is
reported in its row and turns the exit status into 2 without aborting the
sweep.

The heavy modules are imported inside the command handlers so that
``spectral-lab thresholds`` starts quickly.
"""
from __future__ import annotations

import argparse
import csv
import io
import json
import math
import os
import sys
import tempfile
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field, fields

COMMANDS = ("potential", "cf", "solve", "exponents", "subordinacy", "stability", "thresholds", "oracle")
DEFAULT_FORMAT = {"potential": "csv", "cf": "csv", "solve": "csv", "exponents": "json",
                  "subordinacy": "csv", "stability": "json", "thresholds": "json", "oracle": "csv"}
EXIT_FAILURES = 2
EXIT_USAGE = 2


class ScenarioError(ValueError):
    """A scenario violates one of its invariants."""


# --------------------------------------------------------------------------
# Scenario
# --------------------------------------------------------------------------

@dataclass
class Scenario:
    command: str
    potential: dict = field(default_factory=lambda: {"family": "free"})
    perturbation: dict | None = None
    energies: list = field(default_factory=list)
    phases: list = field(default_factory=lambda: [0.0])
    checkpoints: list | None = None
    L_min: float = 100.0
    L_max: float | None = None
    count: int = 64
    budget: int | None = None
    tolerances: dict = field(default_factory=dict)
    seed: int = 0
    jobs: int = 1
    out: str | None = None
    curves: str | None = None
    format: str | None = None
    params: dict = field(default_factory=dict)

    def schedule(self):
        from .propagator import log_checkpoints

        if self.checkpoints is not None:
            return [float(x) for x in self.checkpoints]
        if self.L_max is None:
            raise ScenarioError("a checkpoint schedule needs L_max (or an explicit checkpoints list)")
        return [float(x) for x in log_checkpoints(self.L_max, self.L_min, self.count)]

    def record(self):
        """JSON-ready description, echoed into reports."""
        doc = {f.name: getattr(self, f.name) for f in fields(self)}
        for k in ("out", "curves", "jobs"):
            doc.pop(k)
        return doc


_SCENARIO_KEYS = {f.name for f in fields(Scenario)}
_PARAM_KEYS = {
    "start", "stop", "theta", "k", "n_phases", "tail_fraction", "kappa", "alpha_sub", "drop_threshold",
    "N", "gamma", "gamma1", "gamma2", "model", "lambda", "alpha", "oracle", "a", "b", "L", "psi",
    "energy_grid",
}


class _Flags:
    """Attribute view of a namespace where absent flags read as ``None``."""

    def __init__(self, ns):
        self._ns = ns

    def __getattr__(self, name):
        return getattr(self._ns, name, None)


def _potential_from_flags(ns) -> dict | None:
    ns = _Flags(ns)
    if ns.potential_json is not None:
        return json.loads(ns.potential_json)
    fam = ns.potential
    if fam is None:
        return None
    if fam == "free":
        return {"family": "free"}
    if fam in ("sturmian", "fibonacci"):
        doc = {"family": "sturmian", "lambda": 1.0 if ns.lam is None else ns.lam,
               "theta": ns.theta or "golden", "rho": ns.rho or "0"}
        return doc
    if fam == "sparse":
        if ns.alpha is None:
            raise ScenarioError("--potential sparse needs --alpha")
        return {"family": "sparse", "alpha": ns.alpha}
    raise ScenarioError(f"unknown --potential {fam!r}")


def _perturbation_from_flags(ns) -> dict | None:
    ns = _Flags(ns)
    if ns.perturbation_json is not None:
        return json.loads(ns.perturbation_json)
    if ns.p is None:
        return None
    doc = {"family": "perturbed", "base": {"family": "free"}, "C": 1.0 if ns.C is None else ns.C,
           "p": ns.p, "sign_pattern": ns.sign_pattern or "plus"}
    if (ns.sign_pattern or "plus") == "seeded-random":
        doc["seed"] = ns.seed if ns.seed is not None else 0
    return doc


def _load_config(path):
    try:
        with open(path, encoding="utf-8") as fh:
            doc = json.load(fh)
    except OSError as exc:
        raise ScenarioError(f"--config {path}: {exc.strerror}") from exc
    except json.JSONDecodeError as exc:
        raise ScenarioError(f"--config {path}: invalid JSON ({exc})") from exc
    if not isinstance(doc, dict):
        raise ScenarioError("--config must hold a JSON object")
    unknown = set(doc) - _SCENARIO_KEYS - _PARAM_KEYS
    if unknown:
        raise ScenarioError(f"unknown config keys: {sorted(unknown)}")
    return doc


def _energy_grid(g):
    import numpy as np

    if isinstance(g, dict):
        g = [g.get("start"), g.get("stop"), g.get("count")]
    lo, hi, n = float(g[0]), float(g[1]), int(g[2])
    return [float(x) for x in np.linspace(lo, hi, n)]


def parse_scenario(argv=None) -> Scenario:
    """Build a validated :class:`Scenario` from flags and an optional config file."""
    ns = build_parser().parse_args(argv)
    doc = {}
    if ns.config:
        doc = _load_config(ns.config)
        if doc.get("command", ns.command) != ns.command:
            raise ScenarioError(f"config is for {doc['command']!r}, command line asks for {ns.command!r}")
    base = {k: v for k, v in doc.items() if k in _SCENARIO_KEYS}
    params = dict(doc.get("params", {}))
    params.update({k: v for k, v in doc.items() if k in _PARAM_KEYS})
    base["command"] = ns.command
    base.pop("params", None)

    def put(key, value):
        if value is not None:
            base[key] = value

    put("potential", _potential_from_flags(ns))
    put("perturbation", _perturbation_from_flags(ns))
    put("seed", ns.seed)
    put("jobs", ns.jobs)
    put("out", ns.out)
    put("format", ns.format)
    put("budget", getattr(ns, "budget", None))
    put("L_min", getattr(ns, "L_min", None))
    put("L_max", getattr(ns, "L_max", None))
    put("count", getattr(ns, "count", None))
    put("curves", getattr(ns, "curves", None))
    if getattr(ns, "energy", None) is not None:
        base["energies"] = [float(e) for e in ns.energy]
    if getattr(ns, "energy_grid", None) is not None:
        params["energy_grid"] = ns.energy_grid
    if "energy_grid" in params:
        base["energies"] = _energy_grid(params["energy_grid"])
    if getattr(ns, "phi", None) is not None:
        base["phases"] = [float(x) for x in ns.phi]
    tol = dict(base.get("tolerances", {}))
    for name in ("ratio", "residual", "cutoff", "summability"):
        v = getattr(ns, f"tol_{name}", None)
        if v is not None:
            tol[name] = v
    base["tolerances"] = tol
    for key in _PARAM_KEYS - {"energy_grid"}:
        v = getattr(ns, key if key != "lambda" else "lam", None)
        if v is not None:
            params[key] = v
    if ns.command == "oracle":
        params["oracle"] = ns.oracle
    base["params"] = params
    s = Scenario(**base)
    validate(s)
    return s


def validate(s: Scenario):
    if s.command not in COMMANDS:
        raise ScenarioError(f"unknown command {s.command!r}")
    if s.format not in (None, "csv", "json"):
        raise ScenarioError(f"--format must be csv or json, got {s.format!r}")
    if s.jobs < 1:
        raise ScenarioError("--jobs must be at least 1")
    if s.command in ("solve", "exponents", "subordinacy", "stability"):
        if not s.energies:
            raise ScenarioError("energy grid is empty (give --energy or --energy-grid)")
        if not s.phases:
            raise ScenarioError("phase list is empty")
        if s.command == "stability" and s.checkpoints is None and s.L_max is None and "N" not in s.params:
            raise ScenarioError("stability needs --N or --L-max")
        if s.command != "stability":
            L = s.schedule()
            from .propagator import site_budget

            need = math.floor(max(L)) + 1
            if need > site_budget(s.budget):
                raise ScenarioError(f"site budget {site_budget(s.budget)} is below the largest checkpoint ({need} sites)")
    if s.command == "thresholds" and s.params.get("model") is None:
        raise ScenarioError("thresholds needs --model")


# --------------------------------------------------------------------------
# Output
# --------------------------------------------------------------------------

def _cell(x):
    if isinstance(x, float):
        return repr(x)
    if isinstance(x, bool):
        return "true" if x else "false"
    return "" if x is None else str(x)


def csv_text(rows, columns):
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(columns)
    for r in rows:
        w.writerow([_cell(r.get(c)) for c in columns])
    return buf.getvalue()


def _json_default(o):
    import numpy as np

    if isinstance(o, np.ndarray):
        return o.tolist()
    if isinstance(o, np.generic):
        return o.item()
    raise TypeError(f"cannot serialize {type(o).__name__}")


def json_text(doc):
    return json.dumps(doc, indent=2, default=_json_default, allow_nan=True) + "\n"


def write_atomic(path, text):
    """Write ``text`` to ``path`` through a temporary file in the same directory."""
    if path is None or path == "-":
        sys.stdout.write(text)
        sys.stdout.flush()
        return
    d = os.path.dirname(os.path.abspath(path))
    fd, tmp = tempfile.mkstemp(prefix=".tmp-", dir=d)
    try:
        with os.fdopen(fd, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
            fh.flush()
            os.fsync(fh.fileno())
        os.replace(tmp, path)
    except BaseException:
        try:
            os.unlink(tmp)
        except FileNotFoundError:
            pass
        raise


def _summary(msg):
    print(msg, file=sys.stderr)


# --------------------------------------------------------------------------
# Command handlers: each returns (rows or doc, failures)
# --------------------------------------------------------------------------

def _specs(s: Scenario):
    from .potentials import Free, spec_from_dict

    base = spec_from_dict(s.potential)
    pert = spec_from_dict(s.perturbation) if s.perturbation else Free()
    return base, pert


def _grid(s: Scenario, per_energy_only=False):
    phases = [None] if per_energy_only else s.phases
    return [(float(E), None if phi is None else float(phi)) for E in s.energies for phi in phases]


def _map(s: Scenario, fn, points):
    """Run ``fn`` over grid points; failures become ``{"error": ...}`` entries."""

    def safe(pt):
        try:
            return fn(*pt), None
        except Exception as exc:  # recorded, not raised
            return None, f"{type(exc).__name__}: {exc}"

    if s.jobs == 1 or len(points) == 1:
        results = [safe(p) for p in points]
    else:
        with ThreadPoolExecutor(max_workers=s.jobs) as pool:
            results = list(pool.map(safe, points))
    for pt, (_, err) in zip(points, results):
        _summary(f"E={pt[0]!r} phi={pt[1]!r}: " + ("ok" if err is None else f"error {err}"))
    return results


def cmd_potential(s: Scenario):
    import numpy as np

    from .potentials import potential_array, spec_from_dict

    spec = spec_from_dict(s.potential if not s.perturbation else _combined_doc(s))
    start, stop = int(s.params.get("start", 0)), int(s.params.get("stop", 100))
    v = potential_array(spec, start, stop)
    rows = [{"n": int(n), "V": float(x)} for n, x in zip(np.arange(start, stop), v)]
    doc = {"spec": spec.to_dict(), "start": start, "stop": stop, "values": [float(x) for x in v]}
    return rows, ["n", "V"], doc, 0


def _combined_doc(s):
    p = dict(s.perturbation)
    if p.get("family") == "perturbed" and p.get("base", {}).get("family") == "free":
        p["base"] = s.potential
        return p
    raise ScenarioError("the potential command combines only a Perturbed(free) perturbation with the base")


def cmd_cf(s: Scenario):
    from .numbertheory import bounded_density_statistic, continued_fraction

    theta = s.params.get("theta", "golden")
    k = int(s.params.get("k", 20))
    cf = continued_fraction(theta, k)
    means = bounded_density_statistic(cf)
    rows = [{"n": i, "a_n": a, "mean_n": m} for i, (a, m) in enumerate(zip(cf.coefficients, means), start=1)]
    doc = {"theta": str(theta), "requested": k, "coefficients": list(cf.coefficients), "means": means,
           "source": cf.source, "truncated": cf.truncated}
    return rows, ["n", "a_n", "mean_n"], doc, 0 if len(cf) == k else 1


def cmd_solve(s: Scenario):
    from .propagator import canonical_pair

    base, pert = _specs(s)
    from .stability import perturbed_spec

    spec = perturbed_spec(base, pert)
    L = s.schedule()

    def one(E, phi):
        pair = canonical_pair(spec, E, phi, L, budget=s.budget)
        return [
            {"L": float(l), "norm_u1": float(a), "norm_u2": float(b), "wronskian": float(w),
             "wronskian_dev": float(d), "E": E, "phi": phi}
            for l, a, b, w, d in zip(pair.trace_u1.checkpoints, pair.trace_u1.norms, pair.trace_u2.norms,
                                     pair.wronskians, pair.wronskian_deviation)
        ]

    cols = ["L", "norm_u1", "norm_u2", "wronskian", "wronskian_dev", "E", "phi"]
    return _rows_from(s, one, _grid(s), cols)


def _rows_from(s, fn, points, cols):
    rows, failures, docs = [], 0, []
    for (E, phi), (res, err) in zip(points, _map(s, fn, points)):
        if err is not None:
            failures += 1
            rows.append({"E": E, "phi": phi, "error": err})
            docs.append({"E": E, "phi": phi, "error": err})
        else:
            rows.extend(res)
            docs.append({"E": E, "phi": phi, "rows": res})
    if failures:
        cols = cols + ["error"]
    return rows, cols, {"results": docs}, failures


def cmd_exponents(s: Scenario):
    from .asymptotics import growth_exponents

    base, pert = _specs(s)
    from .stability import perturbed_spec

    spec = perturbed_spec(base, pert)
    L = s.schedule()
    n_phases = int(s.params.get("n_phases", 32))
    tail = float(s.params.get("tail_fraction", 0.5))

    def one(E, _phi):
        return growth_exponents(spec, E, L, n_phases, tail, budget=s.budget).to_dict()

    points = _grid(s, per_energy_only=True)
    results, failures = [], 0
    for (E, _), (res, err) in zip(points, _map(s, one, points)):
        if err is None:
            results.append({"E": E, **res})
        else:
            failures += 1
            results.append({"E": E, "error": err})
    doc = results[0] if len(results) == 1 else {"results": results}
    cols = ["E", "gamma1", "gamma2", "alpha", "residual"] + (["error"] if failures else [])
    return results, cols, doc, failures


def cmd_subordinacy(s: Scenario):
    from .asymptotics import NormProfile, alpha_exponent, classify_subordinate, subordinacy_ratio
    from .propagator import canonical_pair

    base, pert = _specs(s)
    from .stability import perturbed_spec

    spec = perturbed_spec(base, pert)
    L = s.schedule()
    if "kappa" in s.params:
        kappa = float(s.params["kappa"])
    elif "alpha_sub" in s.params:
        kappa = alpha_exponent(float(s.params["alpha_sub"]))
    else:
        kappa = 1.0
    drop = float(s.params.get("drop_threshold", 0.1))

    def one(E, phi):
        pair = canonical_pair(spec, E, phi, L, budget=s.budget)
        r = subordinacy_ratio(NormProfile.from_trace(pair.trace_u1), NormProfile.from_trace(pair.trace_u2), kappa)
        v = classify_subordinate(r, drop_threshold=drop)
        return [
            {"L": float(l), "ratio": float(x), "verdict": v.verdict, "tail_min": v.tail_min,
             "tail_slope": v.tail_slope, "kappa": kappa, "E": E, "phi": phi}
            for l, x in r
        ]

    cols = ["L", "ratio", "verdict", "tail_min", "tail_slope", "kappa", "E", "phi"]
    return _rows_from(s, one, _grid(s), cols)


def cmd_stability(s: Scenario):
    from .stability import stability_analysis

    base, pert = _specs(s)
    N = int(s.params.get("N") or math.floor(s.L_max) + 1)
    L = s.schedule() if (s.checkpoints is not None or s.L_max is not None) else None
    kw = {k: s.params.get(k) for k in ("gamma", "gamma1", "gamma2", "kappa")}

    def one(E, phi):
        return stability_analysis(base, pert, E, phi, N, L, tolerances=s.tolerances, budget=s.budget, **kw)

    points = _grid(s)
    reports, rows, failures = [], [], 0
    for (E, phi), (rep, err) in zip(points, _map(s, one, points)):
        if err is not None:
            failures += 1
            reports.append({"E": E, "phi": phi, "error": err})
            rows.append({"E": E, "phi": phi, "error": err})
            continue
        reports.append(rep.to_dict())
        for l, r1, r2, d in rep.curves():
            rows.append({"L": l, "ratio_v1_u1": r1, "ratio_v2_u2": r2, "eqlimites_dev": d, "E": E, "phi": phi})
        if rep.verdict != "stable-like":
            _summary(f"E={E!r} phi={phi!r}: verdict {rep.verdict}")
    doc = reports[0] if len(reports) == 1 else {"results": reports}
    cols = ["L", "ratio_v1_u1", "ratio_v2_u2", "eqlimites_dev", "E", "phi"] + (["error"] if failures else [])
    return rows, cols, doc, failures


def cmd_thresholds(s: Scenario):
    from .thresholds import threshold_report

    rep = threshold_report(s.params["model"], s.params.get("lambda"), s.params.get("alpha"))
    d = rep.to_dict()
    row = {"model": d["model"], "gamma1_bound": rep.gamma1_bound, "gamma2_bound": rep.gamma2_bound,
           "threshold_p": rep.threshold_p}
    return [row], list(row), d, 0


def cmd_oracle(s: Scenario):
    import numpy as np

    from .oracle import abel_partials, abel_sum_bound

    if s.params.get("oracle") != "abel":
        raise ScenarioError("oracle supports only 'abel'")
    a, b, L = float(s.params.get("a", 2.0)), float(s.params.get("b", 1.0)), int(s.params.get("L", 100))
    n = np.arange(1, L + 1, dtype=float)
    xi = (1.0 + n) ** (-a)
    psi = s.params.get("psi", "ones")
    if psi == "ones":
        p1 = p2 = np.ones(L)
    elif psi == "solutions":
        from .propagator import canonical_initial, solution_values

        base, _ = _specs(s)
        E = s.energies[0] if s.energies else 0.0
        i1, i2 = canonical_initial(s.phases[0])
        p1 = solution_values(base, E, i1, L, budget=s.budget)[1:]
        p2 = solution_values(base, E, i2, L, budget=s.budget)[1:]
    else:
        raise ScenarioError(f"--psi must be 'ones' or 'solutions', got {psi!r}")
    nn, lhs, rhs = abel_partials(xi, p1, p2, a, b, L)
    rep = abel_sum_bound(xi, p1, p2, a, b, L)
    rows = [{"n": int(k), "lhs_partial": float(x), "rhs_partial": float(y)} for k, x, y in zip(nn, lhs, rhs)]
    doc = {"a": a, "b": b, "L": L, "psi": psi, "lhs": rep.lhs, "rhs": rep.rhs, "satisfied": rep.satisfied}
    return rows, ["n", "lhs_partial", "rhs_partial"], doc, 0 if rep.satisfied else 1


HANDLERS = {
    "potential": cmd_potential, "cf": cmd_cf, "solve": cmd_solve, "exponents": cmd_exponents,
    "subordinacy": cmd_subordinacy, "stability": cmd_stability, "thresholds": cmd_thresholds,
    "oracle": cmd_oracle,
}


def _side_path(out, suffix):
    if out is None or out == "-":
        return None
    root, _ = os.path.splitext(out)
    return root + suffix


def run_scenario(s: Scenario) -> int:
    """Execute ``s``, write its outputs, return the exit status."""
    rows, cols, doc, failures = HANDLERS[s.command](s)
    fmt = s.format or DEFAULT_FORMAT[s.command]
    if "seed" not in cols:
        cols = cols + ["seed"]
    for r in rows:
        r["seed"] = s.seed
    if isinstance(doc, dict):
        doc = {"seed": s.seed, **doc}
        if s.command in ("solve", "exponents", "subordinacy", "stability"):
            doc["scenario"] = s.record()
    if fmt == "csv":
        write_atomic(s.out, csv_text(rows, cols))
    else:
        write_atomic(s.out, json_text(doc))
    if s.command == "stability":
        curves = s.curves or _side_path(s.out, ".curves.csv" if fmt == "json" else ".report.json")
        if curves:
            write_atomic(curves, csv_text(rows, cols) if fmt == "json" else json_text(doc))
    return EXIT_FAILURES if failures else 0


# --------------------------------------------------------------------------
# Argument parser
# --------------------------------------------------------------------------

def _global_flags(p, suppress):
    d = argparse.SUPPRESS if suppress else None
    p.add_argument("--config", metavar="PATH", default=d, help="JSON scenario; flags override its values")
    p.add_argument("--jobs", type=int, metavar="N", default=d, help="worker threads for grid sweeps")
    p.add_argument("--seed", type=int, metavar="N", default=d, help="seed recorded in outputs and used by seeded-random signs")
    p.add_argument("--out", metavar="PATH", default=d, help="output file (default: standard output)")
    p.add_argument("--format", choices=("csv", "json"), default=d)


def _potential_flags(p):
    g = p.add_argument_group("potential")
    g.add_argument("--potential", choices=("free", "sturmian", "fibonacci", "sparse"))
    g.add_argument("--potential-json", metavar="JSON", help="full potential document")
    g.add_argument("--lambda", dest="lam", type=float)
    g.add_argument("--theta", help="quadratic keyword (golden, silver, ...), P,D,Q triple, or decimal string")
    g.add_argument("--rho", help="phase in [0, 1) (exact decimal or fraction)")
    g.add_argument("--alpha", type=float)
    g.add_argument("--C", type=float, help="perturbation amplitude")
    g.add_argument("--p", type=float, help="perturbation decay exponent")
    g.add_argument("--sign-pattern", choices=("plus", "alternating", "seeded-random"))
    g.add_argument("--perturbation-json", metavar="JSON", help="full perturbation document")


def _grid_flags(p, phases=True):
    g = p.add_argument_group("grid")
    g.add_argument("--energy", type=float, nargs="+")
    g.add_argument("--energy-grid", type=float, nargs=3, metavar=("START", "STOP", "COUNT"))
    if phases:
        g.add_argument("--phi", type=float, nargs="+")
    g.add_argument("--L-max", dest="L_max", type=float)
    g.add_argument("--L-min", dest="L_min", type=float)
    g.add_argument("--count", type=int, help="number of checkpoints (default 64)")
    g.add_argument("--budget", type=int, help="site budget (capped by SPECTRAL_LAB_SITE_BUDGET)")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="spectral-lab", description=__doc__.split("\n\n")[0])
    _global_flags(parser, suppress=False)
    sub = parser.add_subparsers(dest="command", required=True, metavar="COMMAND")

    def add(name, help_):
        p = sub.add_parser(name, help=help_)
        _global_flags(p, suppress=True)
        return p

    p = add("potential", "tabulate V(n)")
    _potential_flags(p)
    p.add_argument("--start", type=int)
    p.add_argument("--stop", type=int)

    p = add("cf", "continued-fraction coefficients and running means")
    p.add_argument("--theta")
    p.add_argument("--k", type=int)

    for name, help_ in (("solve", "truncated norms and Wronskian of the canonical pair"),
                        ("exponents", "power-law growth exponents over a phase grid"),
                        ("subordinacy", "ratio ||u1||_L / ||u2||_L^kappa and its verdict")):
        p = add(name, help_)
        _potential_flags(p)
        _grid_flags(p, phases=name != "exponents")
        if name == "exponents":
            p.add_argument("--n-phases", dest="n_phases", type=int)
            p.add_argument("--tail-fraction", dest="tail_fraction", type=float)
        if name == "subordinacy":
            p.add_argument("--kappa", type=float)
            p.add_argument("--alpha-sub", dest="alpha_sub", type=float, help="use kappa = a / (2 - a)")
            p.add_argument("--drop-threshold", dest="drop_threshold", type=float)

    p = add("stability", "variation-of-parameters stability check")
    _potential_flags(p)
    _grid_flags(p)
    p.add_argument("--N", type=int, help="cutoff site (default floor(L-max) + 1)")
    p.add_argument("--gamma", type=float)
    p.add_argument("--gamma1", type=float)
    p.add_argument("--gamma2", type=float)
    p.add_argument("--kappa", type=float)
    p.add_argument("--curves", metavar="PATH", help="side output (curves CSV, or the report under --format csv)")
    for t in ("ratio", "residual", "cutoff", "summability"):
        p.add_argument(f"--tol-{t}", dest=f"tol_{t}", type=float)

    p = add("thresholds", "closed-form decay thresholds")
    p.add_argument("--model", choices=("sturmian-fibonacci", "sparse"))
    p.add_argument("--lambda", dest="lam", type=float)
    p.add_argument("--alpha", type=float)

    p = add("oracle", "brute-force reference checks")
    p.add_argument("oracle", choices=("abel",))
    _potential_flags(p)
    _grid_flags(p)
    p.add_argument("--a", type=float)
    p.add_argument("--b", type=float)
    p.add_argument("--L", type=int)
    p.add_argument("--psi", choices=("ones", "solutions"))
    return parser


def main(argv=None) -> int:
    try:
        s = parse_scenario(argv)
    except ScenarioError as exc:
        print(f"spectral-lab: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except json.JSONDecodeError as exc:
        print(f"spectral-lab: error: invalid JSON argument ({exc})", file=sys.stderr)
        return EXIT_USAGE
    try:
        return run_scenario(s)
    except Exception as exc:
        from .errors import SpectralLabError

        if isinstance(exc, (SpectralLabError, ScenarioError)):
            print(f"spectral-lab: error: {type(exc).__name__}: {exc}", file=sys.stderr)
            return EXIT_FAILURES
        raise


if __name__ == "__main__":
    sys.exit(main())
