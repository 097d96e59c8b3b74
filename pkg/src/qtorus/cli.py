"""Command-line experiment driver.

Each subcommand resolves a parameter map (defaults, then an optional JSON
config file, then flags), runs a deterministic experiment and writes rows of
``(experiment, module, operation, params, metric, value, ok)`` as JSON or CSV.

Exit codes: 0 all checks pass, 2 a check failed, 3 a search budget was
exhausted, 4 invalid configuration.
"""
from __future__ import annotations

import argparse
import csv
import hashlib
import io
import json
import math
import sys
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Any, Callable

import numpy as np

from . import diophantine as dio
from . import multipliers as mult
from . import transference as tr
from .algebra import ParameterError

EXIT_OK, EXIT_FAIL, EXIT_BUDGET, EXIT_CONFIG = 0, 2, 3, 4


class ConfigError(ValueError):
    pass


@dataclass
class ExperimentConfig:
    experiment: str
    params: dict[str, Any] = field(default_factory=dict)
    out: str | None = None
    format: str = "json"

    def resolved(self) -> dict:
        return {"experiment": self.experiment, "params": self.params}

    def hash(self) -> str:
        blob = json.dumps(self.resolved(), sort_keys=True, separators=(",", ":"))
        return hashlib.sha256(blob.encode()).hexdigest()


DEFAULTS: dict[str, dict[str, Any]] = {
    "disc-check": {
        "pairs": [[1, 4], [2, 8], [4, 32], [8, 128]],
        "p": ["1", "2", "4", "inf"],
        "samples": 10_000,
        "seed": 0,
    },
    "norm-scan": {
        "symbol": "pisier:0:2",
        "periodize": None,
        "theta": "(sqrt(5)-1)/2",
        "p": "4",
        "degree": 2,
        "ladder": 4,
        "grid": None,
        "seed": 0,
        "restarts": 4,
        "iterations": 200,
    },
    "sidon-check": {
        "theta": "sqrt(2)-1",
        "horizon": 10,
        "ladder": 3,
        "span_n": 6,
        "span_size": 8,
        "trials": 100,
        "seed": 0,
        "budget": None,
    },
    "measure-check": {
        "n": [1, 2, 4, 8, 16, 32, 64],
        "N": 256,
        "tol": 1e-10,
    },
    "relation-check": {
        "theta": "sqrt(2)-1",
        "gamma": "(sqrt(5)-1)/2",
        "emb_gamma": "1/3",
        "period": 3,
        "count": 8,
        "budget": dio.DEFAULT_BUDGET,
    },
}

# flag name -> parameter key
FLAG_KEYS = {"theta": "theta", "p": "p", "degree": "degree", "grid": "grid", "seed": "seed",
             "restarts": "restarts", "ladder": "ladder", "budget": "budget"}


def parse_p(value) -> float:
    s = str(value).strip().lower()
    if s in ("inf", "infinity", "oo"):
        return math.inf
    try:
        p = float(Fraction(s))
    except (ValueError, ZeroDivisionError) as exc:
        raise ConfigError(f"p: cannot parse {value!r}") from exc
    if p < 1:
        raise ConfigError(f"p: must be >= 1, got {value!r}")
    return p


def parse_theta_rational(value) -> Fraction:
    try:
        return Fraction(str(value))
    except (ValueError, ZeroDivisionError) as exc:
        raise ConfigError(f"theta: {value!r} is not rational") from exc


def _jsonable(v):
    if isinstance(v, float) and math.isinf(v):
        return "inf"
    if isinstance(v, (np.floating,)):
        return float(v)
    if isinstance(v, (np.integer,)):
        return int(v)
    if isinstance(v, int) and abs(v) >= 2 ** 53:
        return str(v)
    return v


class Report:
    def __init__(self, experiment: str):
        self.experiment = experiment
        self.rows: list[dict] = []
        self.budget_exhausted = False

    def add(self, module: str, operation: str, params: dict, metric: str, value,
            ok: bool | None = None, **extra):
        row = {"experiment": self.experiment, "module": module, "operation": operation,
               "params": {k: _jsonable(v) for k, v in params.items()},
               "metric": metric, "value": _jsonable(value), "ok": ok}
        row.update({k: _jsonable(v) for k, v in extra.items()})
        self.rows.append(row)

    @property
    def passed(self) -> bool:
        return all(r["ok"] is not False for r in self.rows)


# -- experiments --------------------------------------------------------------------

def run_discretization_check(cfg: ExperimentConfig) -> Report:
    P = cfg.params
    rep = Report(cfg.experiment)
    for d, n in P["pairs"]:
        for ps in P["p"]:
            p = parse_p(ps)
            r = tr.empirical_jdn_norms(int(d), int(n), p, int(P["samples"]), int(P["seed"]))
            params = {"d": d, "n": n, "p": ps, "samples": r["samples"]}
            rep.add("transference", "j_dn", params, "forward_max", r["forward_max"],
                    r["forward_max"] <= r["forward_bound"] + 1e-9, bound=r["forward_bound"])
            rep.add("transference", "j_dn_inverse", params, "inverse_max", r["inverse_max"],
                    r["inverse_max"] <= r["inverse_bound"] + 1e-9, bound=r["inverse_bound"])
    return rep


def _scan_symbol(P) -> mult.Symbol:
    phi = mult.load_symbol(P["symbol"], d=1) if not str(P["symbol"]).startswith("{") \
        else mult.load_symbol(P["symbol"])
    if P.get("periodize"):
        if phi.d != 1:
            raise ConfigError("periodize: needs a 1-D symbol")
        phi = tr.periodize(phi, int(P["periodize"]))
    return mult.tensor_one(phi) if phi.d == 1 else phi


def run_norm_growth_scan(cfg: ExperimentConfig) -> Report:
    P = cfg.params
    rep = Report(cfg.experiment)
    phi = _scan_symbol(P)
    p = parse_p(P["p"])
    degree = int(P["degree"])
    opt = mult.OptimizerConfig(restarts=int(P["restarts"]), iterations=int(P["iterations"]),
                               seed=int(P["seed"]),
                               grid=None if P["grid"] is None else int(P["grid"]))
    lattice = mult.box_lattice(degree)
    sup = float(np.max(np.abs(phi.values(lattice))))
    fejer = str(P["symbol"]).startswith("fejer")

    def check(est) -> bool:
        ok = math.isfinite(est.value) and est.value >= sup - 1e-12
        if p == 2:
            ok = ok and abs(est.value - sup) <= 1e-6
        if fejer:
            ok = ok and est.value <= 1 + 1e-6
        return ok

    base = mult.norm_lower_bound(phi, p, Fraction(0), degree, opt)
    common = {"symbol": P["symbol"], "p": P["p"], "degree": degree, "seed": opt.seed}
    rep.add("multipliers", "norm_lower_bound", {**common, "theta": "0"}, "lower", base.value,
            check(base), ratio=1.0, discarded=base.transcript["discarded"])
    rungs = dio.cf_convergents(P["theta"], int(P["ladder"]))
    for c in rungs:
        th = Fraction(c.p, c.q)
        est = mult.norm_lower_bound(phi, p, th, degree, opt)
        rep.add("multipliers", "norm_lower_bound", {**common, "theta": f"{c.p}/{c.q}"},
                "lower", est.value, check(est), ratio=est.value / base.value,
                discarded=est.transcript["discarded"])
    return rep


def run_sidon_check(cfg: ExperimentConfig) -> Report:
    P = cfg.params
    rep = Report(cfg.experiment)
    N = int(P["horizon"])
    n0, size = int(P["span_n"]), int(P["span_size"])
    horizon = max(N, n0 + size)
    pair = dio.sidon_sequences(P["theta"], horizon, P["budget"])
    for i in range(1, horizon + 1):
        k, l = pair.monomial(i)
        rep.add("diophantine", "sidon_sequences", {"theta": P["theta"], "n": i}, "k_l",
                f"{k},{l}", k % 2 == 1)
    sub = dio.SidonPair(pair.theta, pair.k[:N], pair.l[:N], N, pair.dps)
    for adjoint in (False, True):
        res = dio.anticommutator_check(sub, rungs=int(P["ladder"]), adjoint=adjoint)
        for r in res["rows"]:
            rep.add("diophantine", "anticommutator_check",
                    {"theta": P["theta"], "j": r["j"], "n": r["n"], "adjoint": adjoint},
                    "norm", r["formula"], r["ok"], bound=r["bound"],
                    ladder_delta=r["ladder_delta"], matrix_max_err=r["matrix_max_err"])
    span = dio.span_norm_check(pair, n0, size, int(P["trials"]), int(P["seed"]))
    params = {"theta": P["theta"], "n": n0, "Nspan": size, "trials": int(P["trials"])}
    worst_upper = max(r["upper_sq"] / r["formula_sq"] for r in span["rows"])
    worst_moment = max(max(r["moment_lower"]) / r["two_l2"] for r in span["rows"])
    worst_l2 = max(abs(r["l2_sq"] - r["mass"]) for r in span["rows"])
    rep.add("diophantine", "span_norm_check", params, "violations", len(span["violations"]),
            not span["violations"])
    rep.add("diophantine", "span_norm_check", params, "max_upper_over_formula", worst_upper,
            worst_upper <= 1 + 1e-12)
    rep.add("diophantine", "span_norm_check", params, "max_moment_over_2l2", worst_moment,
            worst_moment <= 1)
    rep.add("diophantine", "span_norm_check", params, "max_l2_error", worst_l2, worst_l2 <= 1e-12)
    return rep


def _profiles(N: int) -> dict[str, Callable[[float], float]]:
    return {"one": lambda x: 1.0, "one_plus_x": lambda x: 1.0 + x,
            "inv_sinc": lambda x: 1.0 / float(np.sinc(x / N))}


def run_measure_check(cfg: ExperimentConfig) -> Report:
    P = cfg.params
    rep = Report(cfg.experiment)
    N, tol = int(P["N"]), float(P["tol"])
    for name, f in _profiles(N).items():
        for n in P["n"]:
            n = int(n)
            mu = tr.convex_measure(f, n)
            ks = np.arange(-n, n + 1)
            target = np.array([f(abs(int(k))) for k in ks])
            err = float(np.max(np.abs(tr.measure_fourier(mu, ks) - target)))
            mass = tr.total_variation_bound(mu)
            params = {"f": name, "n": n, "N": N}
            rep.add("transference", "convex_measure", params, "coeff_error", err, err <= tol)
            rep.add("transference", "convex_measure", params, "mass_bound", mass,
                    mass <= f(n) ** 2 * (1 + 1e-12), bound=f(n) ** 2)
            positive = all(c.weight >= 0 for c in mu.components) and mu.atom >= 0
            rep.add("transference", "convex_measure", params, "positive", positive, positive)
    return rep


def run_relation_check(cfg: ExperimentConfig) -> Report:
    P = cfg.params
    rep = Report(cfg.experiment)
    budget = int(P["budget"])
    count = int(P["count"])
    try:
        steps = dio.emb_sequences(P["theta"], P["emb_gamma"], int(P["period"]), count, budget)
        for s in steps:
            params = {"theta": P["theta"], "gamma": P["emb_gamma"], "N": P["period"], "n": s.n}
            rep.add("diophantine", "emb_sequences", params, "k_defect", s.k_defect,
                    s.k_defect < 1 / s.n, k=s.k)
            rep.add("diophantine", "emb_sequences", params, "l_defect", s.l_defect,
                    s.l_defect < 1 / s.n, l=s.l)
    except dio.BudgetError as exc:
        rep.budget_exhausted = True
        rep.add("diophantine", "emb_sequences", {"theta": P["theta"]}, "budget_error",
                str(exc), False)
    for n in range(1, count + 1):
        params = {"theta": P["theta"], "gamma": P["gamma"], "n": n}
        try:
            k = dio.find_pair_equidist(P["theta"], P["gamma"], Fraction(1, n), budget)
        except dio.BudgetError as exc:
            rep.budget_exhausted = True
            rep.add("diophantine", "find_pair_equidist", params, "budget_error", str(exc), False)
            continue
        r1 = dio.residual(P["gamma"], k)
        r2 = dio.residual(P["theta"], k - 1)
        rep.add("diophantine", "find_pair_equidist", params, "gamma_defect", r1, r1 < 1 / n, k=k)
        rep.add("diophantine", "find_pair_equidist", params, "theta_defect", r2, r2 < 1 / n, k=k)
    return rep


EXPERIMENTS: dict[str, Callable[[ExperimentConfig], Report]] = {
    "disc-check": run_discretization_check,
    "norm-scan": run_norm_growth_scan,
    "sidon-check": run_sidon_check,
    "measure-check": run_measure_check,
    "relation-check": run_relation_check,
}


# -- plumbing -------------------------------------------------------------------------

def resolve_config(experiment: str, file_params: dict | None, flags: dict[str, Any],
                   out: str | None = None, fmt: str = "json") -> ExperimentConfig:
    if experiment not in DEFAULTS:
        raise ConfigError(f"experiment: unknown {experiment!r}")
    params = json.loads(json.dumps(DEFAULTS[experiment]))
    for source in (file_params or {}, flags):
        for key, value in source.items():
            if key not in params:
                raise ConfigError(f"{key}: not a parameter of {experiment}")
            params[key] = value
    if fmt not in ("json", "csv"):
        raise ConfigError(f"format: expected json or csv, got {fmt!r}")
    _validate(experiment, params)
    return ExperimentConfig(experiment, params, out, fmt)


def _validate(experiment: str, params: dict):
    ps = params.get("p")
    if ps is not None:
        for v in (ps if isinstance(ps, list) else [ps]):
            parse_p(v)
    for key in ("degree", "ladder", "restarts", "iterations", "samples", "horizon", "count",
                "trials", "span_n", "span_size", "period"):
        if key in params and params[key] is not None:
            try:
                ok = int(params[key]) >= 1
            except (TypeError, ValueError):
                ok = False
            if not ok:
                raise ConfigError(f"{key}: expected a positive integer, got {params[key]!r}")
    if experiment == "disc-check":
        for pair in params["pairs"]:
            if len(pair) != 2 or int(pair[1]) <= 2 * int(pair[0]):
                raise ConfigError(f"pairs: need n > 2d, got {pair!r}")
    for key in ("theta", "gamma", "emb_gamma"):
        if key in params:
            try:
                dio.real_value(params[key], 30)
            except Exception as exc:  # noqa: BLE001 - any parse failure is a config error
                raise ConfigError(f"{key}: cannot parse {params[key]!r}") from exc


def render(cfg: ExperimentConfig, rep: Report) -> str:
    status = "pass" if rep.passed and not rep.budget_exhausted else "fail"
    if cfg.format == "json":
        doc = {"config": cfg.resolved(), "config_hash": cfg.hash(), "status": status,
               "rows": rep.rows}
        return json.dumps(doc, sort_keys=True, indent=1) + "\n"
    buf = io.StringIO()
    cols = ["experiment", "module", "operation", "params", "metric", "value", "ok", "extra",
            "config_hash"]
    w = csv.DictWriter(buf, fieldnames=cols, lineterminator="\n")
    w.writeheader()
    for r in rep.rows:
        extra = {k: v for k, v in r.items() if k not in cols}
        w.writerow({**{k: r.get(k) for k in cols[:7]},
                    "params": json.dumps(r["params"], sort_keys=True),
                    "extra": json.dumps(extra, sort_keys=True), "config_hash": cfg.hash()})
    return buf.getvalue()


def run(cfg: ExperimentConfig) -> tuple[int, str]:
    try:
        rep = EXPERIMENTS[cfg.experiment](cfg)
    except dio.BudgetError as exc:
        rep = Report(cfg.experiment)
        rep.budget_exhausted = True
        rep.add("diophantine", cfg.experiment, {}, "budget_error", str(exc), False)
    text = render(cfg, rep)
    if rep.budget_exhausted:
        return EXIT_BUDGET, text
    return (EXIT_OK if rep.passed else EXIT_FAIL), text


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        print(f"{self.prog}: error: {message}", file=sys.stderr)
        raise SystemExit(EXIT_CONFIG)


def _flag_value(key: str, raw: str):
    if key == "p" and "," in raw:
        return [v.strip() for v in raw.split(",")]
    return raw


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="qtorus", description="Quantum-torus harmonic analysis experiments")
    sub = parser.add_subparsers(dest="experiment", required=True, parser_class=_Parser)
    for name in EXPERIMENTS:
        sp = sub.add_parser(name)
        sp.add_argument("--config", help="JSON file with a 'params' map (or a bare map)")
        sp.add_argument("--theta")
        sp.add_argument("--p", help="exponent, 'inf', or a comma list for disc-check")
        sp.add_argument("--degree", type=int)
        sp.add_argument("--grid", type=int)
        sp.add_argument("--seed", type=int)
        sp.add_argument("--restarts", type=int)
        sp.add_argument("--ladder", type=int)
        sp.add_argument("--budget", type=int)
        sp.add_argument("--set", action="append", default=[], metavar="KEY=JSON",
                        help="override any parameter with a JSON value")
        sp.add_argument("--out")
        sp.add_argument("--format", default="json")
    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        file_params = None
        if args.config:
            try:
                with open(args.config) as fh:
                    doc = json.load(fh)
            except (OSError, json.JSONDecodeError) as exc:
                raise ConfigError(f"config: {exc}") from exc
            if not isinstance(doc, dict):
                raise ConfigError("config: expected a JSON object")
            if "experiment" in doc and doc["experiment"] != args.experiment:
                raise ConfigError(f"experiment: config is for {doc['experiment']!r}")
            file_params = doc.get("params", {k: v for k, v in doc.items() if k != "experiment"})
        flags: dict[str, Any] = {}
        for flag, key in FLAG_KEYS.items():
            raw = getattr(args, flag)
            if raw is not None:
                flags[key] = _flag_value(key, raw) if isinstance(raw, str) else raw
        for item in args.set:
            key, sep, value = item.partition("=")
            if not sep:
                raise ConfigError(f"set: expected KEY=JSON, got {item!r}")
            try:
                flags[key] = json.loads(value)
            except json.JSONDecodeError:
                flags[key] = value
        cfg = resolve_config(args.experiment, file_params, flags, args.out, args.format)
    except (ConfigError, ParameterError) as exc:
        print(f"qtorus: config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    try:
        code, text = run(cfg)
    except (ParameterError, ConfigError) as exc:
        print(f"qtorus: config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    if cfg.out:
        with open(cfg.out, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    return code


if __name__ == "__main__":
    raise SystemExit(main())
