"""Batch command-line front end.

Subcommands (all read one JSON config, all write into ``--out``)::

    gen      truth.json, arcs.csv
    forward  symbols.csv          (needs truth.json, arcs.csv)
    invert   report.json, recovered.json   (needs arcs.csv, symbols.csv)
    check    check.json
    expand   c_alpha.csv, formal_solution.json, residual_orders.csv, eigen_potential.json

Exit codes: 0 success, 2 invalid config or inputs, 3 too few energies,
4 rank-deficient forward matrix, 5 a threshold was exceeded.

Randomness.  Everything derives from ``seed``: arc ``i`` uses
``default_rng([seed, i])``, the truth coordinates at level ``r`` and order
``d`` use ``default_rng([seed, 1, r, d])``, and forward noise uses
``default_rng([seed, 2])`` drawn over the (level, energy, arc) array in C
order, real part first.
"""

from __future__ import annotations

import argparse
import csv
import json
import logging
import math
import os
import sys
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field, fields
from fractions import Fraction

import numpy as np

from . import boundary
from .energy import EnergyGrid, SingularGridError, energies_required
from .invariants import run_checks
from .reconstruction import (
    EmptyBasisError, PerturbationAsymptotics, SymbolDataSet, bases_for, radial_potential,
    recover_all, synthesize,
)
from .sphere import gauss_legendre, sample_arcs
from .tensors import tensor_from_json, tensor_to_json
from .transport import read_symbol_csv, symbol_transform_batch, write_symbol_csv
from .xray import arc_columns, arc_row, parse_arc

log = logging.getLogger("scatxray")

EXIT_OK = 0
EXIT_VALIDATION = 2
EXIT_UNDERDETERMINED = 3
EXIT_RANK = 4
EXIT_THRESHOLD = 5


class CliError(Exception):
    def __init__(self, code, kind, message):
        super().__init__(message)
        self.code = code
        self.kind = kind


def _invalid(message):
    return CliError(EXIT_VALIDATION, "validation", message)


@dataclass
class ExpandConfig:
    n: int = 4
    k: int = 2
    lam: str = "3/2"
    alpha_max: int = 10
    N: int = 6
    j: int = 1
    tau: str = "1"
    eigen_N_max: int = 4


@dataclass
class RunConfig:
    n: int = 3
    k: int = 2
    l: int = 1
    r_levels: list = field(default_factory=lambda: [1, 2])
    d_max: int = 2
    seed: int = 0
    arc_count: int | None = None
    quadrature_order: int = 128
    energies: dict = field(default_factory=dict)
    noise: float = 0.0
    threshold: float = 1e-6
    tikhonov: float = 0.0
    inject_potential: bool = False
    tolerance_scale: float = 1.0
    out: str = "out"
    expand: ExpandConfig = field(default_factory=ExpandConfig)

    def grid(self):
        choice = self.energies or {}
        if "lambdas" in choice:
            return EnergyGrid(choice["lambdas"])
        return EnergyGrid.default(int(choice.get("count", energies_required(self.l))))


def _fraction(text, name):
    try:
        return Fraction(str(text))
    except (ValueError, ZeroDivisionError):
        raise _invalid(f"{name} must be a rational number, got {text!r}") from None


def _int(value, name, low=None):
    if isinstance(value, bool) or not isinstance(value, int):
        raise _invalid(f"{name} must be an integer")
    if low is not None and value < low:
        raise _invalid(f"{name} must be >= {low}")
    return value


def load_config(path=None, out=None):
    """Parse and validate a JSON config; unknown keys are rejected."""
    doc = {}
    if path is not None:
        try:
            with open(path) as fh:
                doc = json.load(fh)
        except OSError as exc:
            raise _invalid(f"cannot read config: {exc}") from None
        except json.JSONDecodeError as exc:
            raise _invalid(f"config is not valid JSON: {exc}") from None
    if not isinstance(doc, dict):
        raise _invalid("config must be a JSON object")
    names = {f.name for f in fields(RunConfig)}
    unknown = sorted(set(doc) - names)
    if unknown:
        raise _invalid(f"unknown config keys: {', '.join(unknown)}")
    exp = doc.pop("expand", {})
    exp_names = {f.name for f in fields(ExpandConfig)}
    if not isinstance(exp, dict) or set(exp) - exp_names:
        raise _invalid("bad expand section")
    cfg = RunConfig(**doc, expand=ExpandConfig(**exp))
    if out is not None:
        cfg.out = out
    validate(cfg)
    return cfg


def validate(cfg):
    _int(cfg.n, "n", 3)
    _int(cfg.k, "k", 1)
    _int(cfg.l, "l", 0)
    if cfg.l > 2 * cfg.k - 1:
        raise _invalid(f"l = {cfg.l} exceeds 2k-1 = {2 * cfg.k - 1}")
    if not isinstance(cfg.r_levels, list) or not cfg.r_levels:
        raise _invalid("r_levels must be a nonempty list")
    for r in cfg.r_levels:
        _int(r, "r_levels entry", 1)
    if len(set(cfg.r_levels)) != len(cfg.r_levels):
        raise _invalid("r_levels must be distinct")
    _int(cfg.d_max, "d_max", 0)
    _int(cfg.seed, "seed", 0)
    if cfg.arc_count is not None:
        _int(cfg.arc_count, "arc_count", 1)
    _int(cfg.quadrature_order, "quadrature_order", 2)
    for name in ("noise", "threshold", "tikhonov", "tolerance_scale"):
        v = getattr(cfg, name)
        if isinstance(v, bool) or not isinstance(v, (int, float)) or not math.isfinite(v) or v < 0:
            raise _invalid(f"{name} must be a nonnegative number")
    if not isinstance(cfg.inject_potential, bool):
        raise _invalid("inject_potential must be true or false")
    if (not isinstance(cfg.energies, dict) or set(cfg.energies) - {"count", "lambdas"}
            or len(cfg.energies) > 1):
        raise _invalid("energies must be {\"count\": m} or {\"lambdas\": [...]}")
    if "count" in cfg.energies:
        _int(cfg.energies["count"], "energies.count", 1)
    try:
        cfg.grid()
    except (SingularGridError, TypeError, ValueError) as exc:
        raise _invalid(f"energy grid: {exc}") from None
    e = cfg.expand
    _int(e.n, "expand.n", 1)
    _int(e.k, "expand.k", 1)
    _int(e.alpha_max, "expand.alpha_max", 0)
    _int(e.N, "expand.N", 1)
    _int(e.j, "expand.j", 1)
    _int(e.eigen_N_max, "expand.eigen_N_max", 1)
    if _fraction(e.lam, "expand.lam") == 0:
        raise _invalid("expand.lam must be nonzero")
    if _fraction(e.tau, "expand.tau") <= 0:
        raise _invalid("expand.tau must be positive")


# -- JSON helpers -----------------------------------------------------------------

def _clean(obj):
    """Replace non-finite floats by strings so the output is strict JSON."""
    if isinstance(obj, dict):
        return {str(k): _clean(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_clean(v) for v in obj]
    if isinstance(obj, (np.floating, float)):
        x = float(obj)
        return x if math.isfinite(x) else ("inf" if x > 0 else "-inf" if x < 0 else "nan")
    if isinstance(obj, np.integer):
        return int(obj)
    return obj


def write_json(path, doc):
    with open(path, "w") as fh:
        json.dump(_clean(doc), fh, indent=2, sort_keys=True, allow_nan=False)
        fh.write("\n")


def _read_json(path):
    try:
        with open(path) as fh:
            return json.load(fh)
    except OSError as exc:
        raise _invalid(f"missing input {path}: {exc.strerror}") from None
    except json.JSONDecodeError as exc:
        raise _invalid(f"{path} is not valid JSON: {exc}") from None


def _complex_list(values):
    return [[float(v.real), float(v.imag)] for v in np.asarray(values, dtype=complex)]


def truth_to_json(truth, cfg):
    levels = []
    for r in truth.r_levels:
        tensors = []
        for d, mu in sorted(truth.levels[r].items()):
            entry = {"d": d, "tensor": tensor_to_json(mu)}
            if r in truth.coefficients:
                entry["coefficients"] = _complex_list(truth.coefficients[r][d])
            tensors.append(entry)
        levels.append({"r": r, "tensors": tensors})
    return {"n": truth.n, "k": truth.k, "l": truth.l, "d_max": truth.d_max,
            "seed": cfg.seed, "levels": levels}


def truth_from_json(doc):
    try:
        levels, coeffs = {}, {}
        for row in doc["levels"]:
            r = row["r"]
            levels[r], coeffs[r] = {}, {}
            for entry in row["tensors"]:
                levels[r][entry["d"]] = tensor_from_json(entry["tensor"])
                if "coefficients" in entry:
                    coeffs[r][entry["d"]] = np.array([complex(a, b) for a, b in entry["coefficients"]])
            if not coeffs[r]:
                del coeffs[r]
        return PerturbationAsymptotics(doc["n"], doc["k"], doc["l"], doc["d_max"], levels, coeffs)
    except (KeyError, TypeError, ValueError) as exc:
        raise _invalid(f"malformed truth file: {exc}") from None


def write_arcs(path, arcs):
    n = arcs[0].n
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(arc_columns(n))
        for a in arcs:
            w.writerow(arc_row(a))


def read_arcs(path):
    try:
        with open(path, newline="") as fh:
            reader = csv.DictReader(fh)
            n = sum(1 for c in reader.fieldnames or [] if c.startswith("omega_"))
            return [parse_arc(row, n) for row in reader]
    except OSError as exc:
        raise _invalid(f"missing input {path}: {exc.strerror}") from None
    except (KeyError, ValueError) as exc:
        raise _invalid(f"malformed arcs file: {exc}") from None


# -- commands --------------------------------------------------------------------

def _bases(cfg):
    try:
        return bases_for(cfg.n, cfg.l, cfg.d_max)
    except EmptyBasisError as exc:
        raise _invalid(str(exc)) from None


def _arc_count(cfg, bases):
    need = max(len(b) for b in bases.values())
    count = 3 * need if cfg.arc_count is None else cfg.arc_count
    if count < need:
        raise _invalid(f"arc_count {count} is below the basis size {need}")
    return count


def cmd_gen(cfg, threads=1):
    bases = _bases(cfg)
    truth = synthesize(cfg.seed, cfg.n, cfg.k, cfg.l, cfg.r_levels, cfg.d_max, bases)
    arcs = sample_arcs(_arc_count(cfg, bases), cfg.n, cfg.seed)
    write_json(os.path.join(cfg.out, "truth.json"), truth_to_json(truth, cfg))
    write_arcs(os.path.join(cfg.out, "arcs.csv"), arcs)
    log.info("wrote %d levels and %d arcs", len(truth.r_levels), len(arcs))
    return EXIT_OK


def cmd_forward(cfg, threads=1):
    truth = truth_from_json(_read_json(os.path.join(cfg.out, "truth.json")))
    arcs = read_arcs(os.path.join(cfg.out, "arcs.csv"))
    if not arcs:
        raise _invalid("arcs file is empty")
    grid = cfg.grid()
    rule = gauss_legendre(cfg.quadrature_order)
    jobs = [(i, e, r, lam) for i, r in enumerate(truth.r_levels) for e, lam in enumerate(grid)]

    def run(job):
        i, e, r, lam = job
        return symbol_transform_batch(truth.forcing(r), arcs, lam, rule)

    vals = np.zeros((len(truth.r_levels), len(grid), len(arcs)), dtype=complex)
    with ThreadPoolExecutor(max_workers=max(1, threads)) as pool:
        for (i, e, _, _), row in zip(jobs, pool.map(run, jobs)):
            vals[i, e] = row
    if cfg.noise:
        rng = np.random.default_rng([cfg.seed, 2])
        vals = vals + cfg.noise * (rng.standard_normal(vals.shape)
                                   + 1j * rng.standard_normal(vals.shape))
    rows = [(arcs[a], lam, r, vals[i, e, a])
            for i, r in enumerate(truth.r_levels)
            for e, lam in enumerate(grid)
            for a in range(len(arcs))]
    write_symbol_csv(os.path.join(cfg.out, "symbols.csv"), rows)
    log.info("wrote %d symbol values", len(rows))
    return EXIT_OK


def load_dataset(cfg):
    arcs = read_arcs(os.path.join(cfg.out, "arcs.csv"))
    path = os.path.join(cfg.out, "symbols.csv")
    try:
        rows = read_symbol_csv(path)
    except OSError as exc:
        raise _invalid(f"missing input {path}: {exc.strerror}") from None
    except (KeyError, ValueError) as exc:
        raise _invalid(f"malformed symbol file: {exc}") from None
    levels = sorted({r for _, _, r, _ in rows})
    lambdas = sorted({lam for _, lam, _, _ in rows})
    index = {(r, lam, tuple(a.omega) + tuple(a.v)): v for a, lam, r, v in rows}
    vals = np.zeros((len(levels), len(lambdas), len(arcs)), dtype=complex)
    for i, r in enumerate(levels):
        for e, lam in enumerate(lambdas):
            for a, arc in enumerate(arcs):
                key = (r, lam, tuple(arc.omega) + tuple(arc.v))
                if key not in index:
                    raise _invalid(f"symbol file lacks level {r}, energy {lam}, arc {a}")
                vals[i, e, a] = index[key]
    try:
        grid = EnergyGrid(lambdas)
    except SingularGridError as exc:
        raise _invalid(str(exc)) from None
    return SymbolDataSet(levels, grid, arcs, vals, cfg.k)


def cmd_invert(cfg, threads=1):
    data = load_dataset(cfg)
    bases = _bases(cfg)
    if cfg.inject_potential:
        bases = {d: b + ([radial_potential(cfg.n, d)] if d >= 1 else []) for d, b in bases.items()}
    truth = None
    truth_path = os.path.join(cfg.out, "truth.json")
    if os.path.exists(truth_path):
        truth = truth_from_json(_read_json(truth_path))
    if len(data.arcs) < max(len(b) for b in bases.values()):
        raise _invalid("fewer arcs than basis elements")
    rule = gauss_legendre(cfg.quadrature_order)
    recovered, report = recover_all(data, cfg.n, cfg.k, cfg.l, cfg.d_max, rule,
                                    truth=None if cfg.inject_potential else truth,
                                    bases=bases, tikhonov=cfg.tikhonov)
    report["threshold"] = cfg.threshold
    report["inject_potential"] = cfg.inject_potential
    statuses = {row["status"] for row in report["levels"]}
    exceeded = []
    for row in report["levels"]:
        if row["status"] != "ok":
            continue
        for x in row["degrees"]:
            err = x["coeff_error"] if x["coeff_error"] is not None else x["residual"]
            if err > cfg.threshold:
                exceeded.append({"r": row["r"], "d": x["d"], "error": err})
    report["exceeded"] = exceeded
    write_json(os.path.join(cfg.out, "report.json"), report)
    if not cfg.inject_potential:
        write_json(os.path.join(cfg.out, "recovered.json"), truth_to_json(recovered, cfg))
    if "underdetermined" in statuses:
        return EXIT_UNDERDETERMINED
    if "rank_deficient" in statuses:
        return EXIT_RANK
    if exceeded:
        return EXIT_THRESHOLD
    return EXIT_OK


def cmd_check(cfg, threads=1):
    results = run_checks(cfg.seed)
    checks = []
    for res in results:
        ok = res.passed(cfg.tolerance_scale)
        log.info("%-30s %s (%.3g s)", res.name, "pass" if ok else "FAIL", res.seconds)
        checks.append({"name": res.name, "module": res.module, "value": res.value,
                       "tolerance": res.tolerance, "exact": res.exact, "passed": ok})
    failures = [c["name"] for c in checks if not c["passed"]]
    write_json(os.path.join(cfg.out, "check.json"),
               {"tolerance_scale": cfg.tolerance_scale, "checks": checks,
                "failures": failures, "passed": not failures})
    return EXIT_THRESHOLD if failures else EXIT_OK


def _gq_fields(c):
    return [str(Fraction(int(c.x.numerator), int(c.x.denominator))),
            str(Fraction(int(c.y.numerator), int(c.y.denominator)))]


def cmd_expand(cfg, threads=1):
    e = cfg.expand
    lam = _fraction(e.lam, "expand.lam")
    tau = _fraction(e.tau, "expand.tau")
    with open(os.path.join(cfg.out, "c_alpha.csv"), "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["alpha", "re", "im"])
        for a in range(e.alpha_max + 1):
            w.writerow([a] + _gq_fields(boundary.c_alpha(e.n, e.k, lam, a)))
    u = boundary.formal_solution(e.n, e.k, lam, 1, e.N)
    write_json(os.path.join(cfg.out, "formal_solution.json"), boundary.series_to_dict(u))
    op = boundary.RadialOperator(e.n, e.k, lam)
    with open(os.path.join(cfg.out, "residual_orders.csv"), "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["N", "residual_order"])
        for N in range(1, e.N + 1):
            order = boundary.residual_order(op, boundary.formal_solution(e.n, e.k, lam, 1, N))
            w.writerow([N, "none" if order is None else str(order)])
    xs = np.geomspace(1e-3, 1e-2, 7)
    rows = []
    for N in range(e.eigen_N_max + 1):
        try:
            ep = boundary.eigen_potential(e.n, e.j, tau, N)
        except boundary.BracketVanishesError as exc:
            rows.append({"N": N, "error": str(exc)})
            continue
        row = {"N": N, "u": boundary.series_to_dict(ep.u),
               "V": [{"beta": b, "re": f[0], "im": f[1]}
                     for b, f in ((b, _gq_fields(c)) for b, c in ep.V.items())],
               "residual_order": None if ep.residual_order is None else str(ep.residual_order)}
        if ep.residual_order is not None:
            raw = [ep.raw_residual(float(x)) for x in xs]
            full = [ep.relative_residual(float(x)) for x in xs]
            row["raw_slope"] = float(np.polyfit(np.log(xs), np.log(raw), 1)[0])
            row["corrected_slope"] = float(np.polyfit(np.log(xs), np.log(full), 1)[0])
        rows.append(row)
    write_json(os.path.join(cfg.out, "eigen_potential.json"),
               {"n": e.n, "j": e.j, "tau": str(tau), "rows": rows})
    return EXIT_OK


COMMANDS = {"gen": cmd_gen, "forward": cmd_forward, "invert": cmd_invert,
            "check": cmd_check, "expand": cmd_expand}


def build_parser():
    p = argparse.ArgumentParser(prog="scatxray", description=__doc__.split("\n")[0])
    p.add_argument("command", choices=sorted(COMMANDS))
    p.add_argument("--config", help="JSON run config")
    p.add_argument("--out", help="output directory (overrides the config)")
    p.add_argument("--threads", type=int, default=1, help="worker threads for forward data")
    p.add_argument("--verbose", action="store_true")
    return p


def main(argv=None):
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(message)s", stream=sys.stderr)
    try:
        if args.threads < 1:
            raise _invalid("--threads must be >= 1")
        cfg = load_config(args.config, args.out)
        try:
            os.makedirs(cfg.out, exist_ok=True)
        except OSError as exc:
            raise _invalid(f"cannot create output directory: {exc.strerror}") from None
        if not os.access(cfg.out, os.W_OK):
            raise _invalid(f"output directory {cfg.out} is not writable")
        return COMMANDS[args.command](cfg, args.threads)
    except CliError as exc:
        print(json.dumps({"error": exc.kind, "message": str(exc)}), file=sys.stderr)
        return exc.code


if __name__ == "__main__":
    sys.exit(main())
