"""Command-line front end.

Every command prints a JSON report ``{config, results, checks, timing}`` and,
with ``--output-dir``, writes it (plus any CSV side products) to disk.

Exit status: 0 when every check passed, 1 when a numeric check failed, 2 on a
configuration, parameter or resource error.
"""
from __future__ import annotations

import argparse
import json
import pathlib
import sys
import time
from typing import Callable

import numpy as np

from . import born, commutant, complexity, concentration, groups, moments
from .config import COMMANDS, PARAM_TYPES, ExperimentConfig, load_config
from .errors import ConfigError, HaarLabError, ResourceError
from .numerics import RngStream
from .reports import rows_to_csv, to_jsonable

EXIT_OK, EXIT_CHECK_FAILED, EXIT_CONFIG = 0, 1, 2


# -- helpers ----------------------------------------------------------------------------------

def _group(kind: str, p: dict, default_qubits: int = 2) -> groups.GroupId:
    if p.get("dim") is not None:
        return groups.GroupId(kind, p["dim"])
    return groups.GroupId.for_qubits(kind, p.get("qubits") or default_qubits)


def _qubits(p: dict, default: int) -> int:
    return p.get("qubits") or default


def _taus(p: dict) -> list[float]:
    raw = p.get("taus")
    if not raw:
        return [round(0.05 * i, 10) for i in range(1, 11)]
    try:
        return [float(s) for s in str(raw).replace(";", ",").split(",") if s.strip()]
    except ValueError:
        raise ConfigError(f"cannot parse tau grid {raw!r}", "params.taus") from None


Handler = Callable[[str, dict, int, RngStream, dict], tuple[dict, dict, dict]]


# -- command handlers: (kind, params, n_samples, stream, tolerances) -> (results, checks, files) ----

def cmd_sample(kind, p, n, stream, tol):
    g = _group(kind, p)
    n = max(n, 1)
    mats = groups.sample_matrices(g, n, stream.child(0), special=True)
    worst: dict[str, float] = {}
    limits: dict[str, float] = {}
    for u in mats:
        for name, err, lim in groups.constraint_errors(g, u):
            worst[name] = max(worst.get(name, 0.0), err)
            limits[name] = lim
    checks = {f"constraint:{k}": worst[k] <= limits[k] for k in worst}
    results = {"group": str(g), "hilbert_dim": g.hilbert_dim, "n_samples": n, "max_constraint_error": worst}
    if p.get("invariance"):
        if n < 1000:
            raise ConfigError("invariance check needs samples >= 1000", "experiment.samples")
        rep = groups.invariance_check(g, n, 2, stream.child(1))
        pmin = min(min(r["p_left"], r["p_right"]) for r in rep)
        results["invariance_min_pvalue"] = pmin
        checks["invariance"] = pmin >= tol["pvalue_min"]
    files = {f"{g.kind}{g.dim}_sample0.csv": rows_to_csv(
        [f"c{j}" for j in range(len(groups.matrix_csv_rows(mats[0])[0]))], groups.matrix_csv_rows(mats[0]))}
    return results, checks, files


def cmd_moment(kind, p, n, stream, tol):
    g = _group(kind, p)
    k = p.get("k", 2)
    rows, checks = [], {}
    funcs = [moments.coordinate_power(g, 0, k)]
    funcs += [moments.random_homogeneous_polynomial(g, k, stream.child(100 + i)) for i in range(p.get("polys", 3))]
    for i, f in enumerate(funcs):
        s = stream.child(i)
        a = moments.haar_expect_gaussian(g, f, n, s)
        b = moments.haar_expect_direct(g, f, n, s)
        z = abs(a.value - b.value) / max(np.hypot(a.std_error, b.std_error), 1e-300)
        rows.append({"functional": f.name, "gaussian": a.to_record(), "direct": b.to_record(), "z": z})
        checks[f"agree:{f.name}#{i}"] = bool(z <= tol["z_max"])
    results = {"group": str(g), "k": k, "normalization": moments.normalization_constant(g, k), "rows": rows}
    return results, checks, {}


def cmd_twirl_check(kind, p, n, stream, tol):
    g = _group(kind, p, default_qubits=1)
    k = p.get("k", 2)
    d = g.hilbert_dim ** k
    gen = stream.child(0).generator()
    rhos = np.array([commutant.random_density_matrix(d, gen) for _ in range(p.get("inputs", 5))])
    basis = commutant.commutant_basis(g, k)
    exact = commutant.twirl(g, rhos, basis)
    est = commutant.mc_twirl(g, k, rhos, n, stream.child(1))
    z = float(est.zscores(exact).max())
    idem = float(np.abs(commutant.twirl(g, exact, basis) - exact).max())
    trace = float(np.abs(np.trace(exact, axis1=1, axis2=2) - np.trace(rhos, axis1=1, axis2=2)).max())
    results = {"group": str(g), "k": k, "commutant_dim": len(basis.elements), "max_z": z,
               "idempotence_err": idem, "trace_err": trace, "n_samples": n}
    checks = {"monte_carlo": z <= tol["z_max"], "idempotent": idem <= tol["idempotence"],
              "trace_preserving": trace <= tol["idempotence"]}
    return results, checks, {}


def cmd_concentration(kind, p, n, stream, tol):
    g = _group(kind, p, default_qubits=4)
    phi = groups.sample_states(g, 1, stream.child(0))[0]
    rep = concentration.empirical_tail(g, concentration.projector_functional(phi), _taus(p), n,
                                       stream.child(1), exact_mean=1 / g.hilbert_dim)
    bad = rep.violations(tol["n_se"])
    results = {"group": str(g), "levy_constant": concentration.levy_constant(g), "lipschitz": 2.0,
               "tau": rep.tau_grid, "empirical": rep.empirical_tail, "bound": rep.analytic_bound,
               "se": rep.std_error, "violations": bad, "n_samples": n}
    return results, {"levy_bound_holds": not bad}, {f"tail_{g.kind}{g.dim}.csv": rep.to_csv()}


def cmd_tv_distance(kind, p, n, stream, tol):
    q = _qubits(p, 10)
    est = born.estimate_expected_tv(kind, q, n, stream, method=p.get("method", "qr"),
                                    workers=p.get("workers", 1))
    band = born.tv_band(kind, q, est, tol["n_se"])
    results = {"group": kind, "qubits": q, "estimate": est.value, "std_error": est.std_error,
               "n_samples": est.n_samples, "band": band}
    return results, {"inside_band": band["inside"]}, {}


def cmd_complexity_bound(kind, p, n, stream, tol):
    params = complexity.ComplexityParams(_qubits(p, 10), p.get("r", 1), p.get("delta", 0.5),
                                         p.get("gate_set_size", 2))
    results = {"measurement_class_bound": complexity.measurement_class_size_bound(params)}
    if p.get("k") is not None:
        rep = complexity.design_low_complexity_prob_bound(
            kind, params, complexity.DesignParams(p["k"], p.get("design_epsilon", 0.0)),
            integer_m=p.get("integer_m", False))
    else:
        rep = complexity.low_complexity_prob_bound(kind, params, simplified=p.get("simplified", True))
    results["bound"] = rep.to_dict()
    return results, {}, {}


def cmd_packing(kind, p, n, stream, tol):
    D = p.get("dim") or 2 ** _qubits(p, 10)
    if p.get("corollary"):
        rep = complexity.corollary_packing(kind, D, p.get("k", 8))
    elif p.get("k") is not None:
        rep = complexity.design_packing_count(kind, D, p.get("Delta", 0.5),
                                              complexity.DesignParams(p["k"], p.get("design_epsilon", 0.0)),
                                              integer_m=p.get("integer_m", False))
    else:
        rep = complexity.packing_count(kind, D, p.get("Delta", 0.5))
    results = {"bound": rep.to_dict()}
    checks = {}
    if p.get("n_states"):
        g = groups.GroupId(kind, D // 2 if kind == "Sp" else D)
        emp = complexity.empirical_pairwise_fidelity(g, p["n_states"], stream)
        results["empirical"] = emp
        checks["trace_distance_relation"] = abs(emp["min_trace_distance"] - np.sqrt(1 - emp["max_fidelity"])) <= 1e-10
    return results, checks, {}


def cmd_sq_bound(kind, p, n, stream, tol):
    params = born.SqParams(_qubits(p, 10), p.get("tau", 0.1), p.get("epsilon", 0.1), p.get("beta", 0.5))
    mode = p.get("mode", "table")
    rep = born.sq_lower_bound(kind, params, mode)
    others = {m: born.sq_lower_bound(kind, params, m).details["q_lower"] for m in born.SQ_MODES if m != mode}
    return {"bound": rep.to_dict(), "q_lower_other_modes": others}, {}, {}


HANDLERS: dict[str, Handler] = {
    "sample": cmd_sample, "moment": cmd_moment, "twirl-check": cmd_twirl_check,
    "concentration": cmd_concentration, "tv-distance": cmd_tv_distance,
    "complexity-bound": cmd_complexity_bound, "packing": cmd_packing, "sq-bound": cmd_sq_bound,
}


# -- orchestration -----------------------------------------------------------------------------------

def _flatten(prefix: str, obj, out: dict) -> None:
    if isinstance(obj, dict):
        for k, v in obj.items():
            _flatten(f"{prefix}.{k}" if prefix else str(k), v, out)
    elif isinstance(obj, (int, float, str, bool, np.integer, np.floating)) or obj is None:
        out[prefix] = obj


def run_experiment(cfg: ExperimentConfig) -> tuple[dict, int]:
    """Run every grid point of ``cfg``; returns the report and the exit status."""
    t0 = time.perf_counter()
    handler = HANDLERS[cfg.command]
    points = cfg.points()
    rows, all_checks, files = [], {}, {}
    for idx, point in enumerate(points):
        stream = RngStream(cfg.seed, 0, (idx,))
        t = time.perf_counter()
        results, checks, side = handler(cfg.group, point, cfg.n_samples, stream, cfg.tolerances)
        rows.append({"index": idx, "params": point, "results": results, "checks": checks,
                     "seconds": time.perf_counter() - t})
        for name, ok in checks.items():
            all_checks[f"{idx}:{name}" if len(points) > 1 else name] = bool(ok)
        for fname, text in side.items():
            files[f"p{idx}_{fname}" if len(points) > 1 else fname] = text
    passed = all(all_checks.values())
    report = {
        "config": cfg.to_dict(),
        "results": rows[0]["results"] if len(points) == 1 and not cfg.grid else rows,
        "checks": {"all_passed": passed, **all_checks},
        "timing": {"total_seconds": time.perf_counter() - t0, "points": len(points)},
    }
    if cfg.grid:
        flat = []
        for r in rows:
            f: dict = {"index": r["index"]}
            _flatten("", r["params"], f)
            _flatten("", r["results"], f)
            flat.append(f)
        header = sorted({k for f in flat for k in f}, key=lambda k: (k != "index", k))
        files["grid.csv"] = rows_to_csv(header, ([f.get(h, "") for h in header] for f in flat))
        report["results"] = rows
    if cfg.output_dir:
        out = pathlib.Path(cfg.output_dir)
        out.mkdir(parents=True, exist_ok=True)
        (out / f"{cfg.command}.json").write_text(json.dumps(to_jsonable(report), indent=2))
        for fname, text in files.items():
            (out / fname).write_text(text)
    return report, EXIT_OK if passed else EXIT_CHECK_FAILED


# -- argument parsing -----------------------------------------------------------------------------------

def _common(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--output-dir", default=None)
    parser.add_argument("--seed", type=int, default=None)
    parser.add_argument("--samples", type=int, default=None)
    parser.add_argument("--group", choices=["so", "su", "sp"], default=None)
    parser.add_argument("--qubits", type=int, default=None)


_FLAG_PARAMS = {
    "sample": ["dim", "invariance"],
    "moment": ["dim", "k", "polys"],
    "twirl-check": ["dim", "k", "inputs"],
    "concentration": ["dim", "taus"],
    "tv-distance": ["method", "workers"],
    "complexity-bound": ["r", "delta", "gate_set_size", "k", "design_epsilon", "integer_m", "simplified"],
    "packing": ["dim", "Delta", "k", "design_epsilon", "integer_m", "corollary", "n_states"],
    "sq-bound": ["tau", "epsilon", "beta", "mode"],
}


_HELP = {
    "sample": "sample Haar group elements and check their defining constraints",
    "moment": "compare Gaussian-integration and direct Haar averages of polynomials",
    "twirl-check": "compare the exact commutant twirl with a Monte Carlo twirl",
    "concentration": "empirical tails of a Lipschitz functional against the Levy bound",
    "tv-distance": "expected TV distance between Born distributions and uniform",
    "complexity-bound": "upper bound on the probability of low state complexity",
    "packing": "size of near-orthogonal packings of Haar or design states",
    "sq-bound": "lower bound on statistical-query cost of learning Born distributions",
}


def _flag(name: str) -> str:
    return "--" + name.replace("_", "-").lower() if name != "Delta" else "--Delta"


def _param_flags(parser: argparse.ArgumentParser, names) -> None:
    for name in names:
        if PARAM_TYPES[name] is bool:
            if name == "simplified":
                parser.add_argument("--unsimplified", dest="simplified", action="store_false", default=None)
            else:
                parser.add_argument(_flag(name), dest=name, action="store_true", default=None)
        else:
            parser.add_argument(_flag(name), dest=name, type=PARAM_TYPES[name], default=None)


_ALL_FLAG_PARAMS = list(dict.fromkeys(n for names in _FLAG_PARAMS.values() for n in names))


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="haarlab", description="Haar-random states and unitaries on SO, SU and Sp.")
    sub = ap.add_subparsers(dest="command", required=True)
    for cmd in COMMANDS:
        sp = sub.add_parser(cmd, help=_HELP[cmd])
        _common(sp)
        _param_flags(sp, _FLAG_PARAMS[cmd])
    rp = sub.add_parser("run", help="run an experiment described by an INI config")
    rp.add_argument("--config", required=True)
    _common(rp)
    _param_flags(rp, _ALL_FLAG_PARAMS)
    vp = sub.add_parser("verify", help="run the acceptance suite")
    vp.add_argument("--scale", choices=["quick", "full"], default="quick")
    vp.add_argument("--only", type=int, nargs="*", default=None)
    vp.add_argument("--seed", type=int, default=1)
    vp.add_argument("--output-dir", default=None)
    return ap


def _apply_overrides(cfg: ExperimentConfig, args: argparse.Namespace) -> ExperimentConfig:
    if args.seed is not None:
        cfg.seed = args.seed
    if args.samples is not None:
        cfg.n_samples = args.samples
    if args.group is not None:
        cfg.group = groups.normalize_kind(args.group)
    if args.output_dir is not None:
        cfg.output_dir = args.output_dir
    if args.qubits is not None:
        cfg.params["qubits"] = args.qubits
        cfg.grid.pop("qubits", None)
    for name in _ALL_FLAG_PARAMS:
        val = getattr(args, name, None)
        if val is None:
            continue
        if name not in _FLAG_PARAMS[cfg.command]:
            raise ConfigError(f"{_flag(name)} does not apply to {cfg.command}", f"params.{name}")
        cfg.params[name] = val
        cfg.grid.pop(name, None)
    cfg.__post_init__()
    return cfg


def _verify(args) -> tuple[dict, int]:
    from .verify import verify_all

    t0 = time.perf_counter()
    res = verify_all(args.seed, args.scale, args.only, echo=lambda s: print(s, file=sys.stderr))
    passed = all(r.passed for r in res)
    report = {
        "config": {"command": "verify", "seed": args.seed, "scale": args.scale, "only": args.only},
        "results": [r.to_dict() for r in res],
        "checks": {"all_passed": passed, **{f"criterion_{r.number}": r.passed for r in res}},
        "timing": {"total_seconds": time.perf_counter() - t0},
    }
    if args.output_dir:
        out = pathlib.Path(args.output_dir)
        out.mkdir(parents=True, exist_ok=True)
        (out / "verify.json").write_text(json.dumps(to_jsonable(report), indent=2))
    return report, EXIT_OK if passed else EXIT_CHECK_FAILED


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        if args.command == "verify":
            report, status = _verify(args)
        else:
            if args.command == "run":
                cfg = load_config(args.config)
            else:
                cfg = ExperimentConfig(command=args.command, group=args.group or "su",
                                       seed=args.seed or 0,
                                       n_samples=args.samples if args.samples is not None else 10_000)
            cfg = _apply_overrides(cfg, args)
            report, status = run_experiment(cfg)
    except ConfigError as exc:
        where = f" [{exc.field}]" if getattr(exc, "field", None) else ""
        print(f"config error{where}: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except (HaarLabError, ResourceError) as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    print(json.dumps(to_jsonable(report), indent=2))
    return status


if __name__ == "__main__":
    sys.exit(main())
