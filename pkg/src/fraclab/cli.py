"""Command line interface: ``run``, ``certify-kernel`` and ``eval``."""

from __future__ import annotations

import argparse
import csv
import json
import math
import sys
from dataclasses import dataclass
from pathlib import Path
from typing import Callable

import numpy as np

from .config import RunConfig, exponent_vector, load_config
from .errors import (ConfigurationError, CostLimitError, InsufficientResolutionError,
                     SingularEvaluationError)
from .grid import CubeFamily, GridDomain, sample
from .kernels import check_size_condition, verify_dini_implies_generalized
from .maximal import frac_maximal_r, hl_maximal_delta, sharp_maximal, sharp_maximal_delta
from .operators import apply_commutator, apply_fractional_integral
from .spaces import ap_constant, bmo_norm, lp_norm, luxemburg_norm, weak_lp_norm
from .verify import (VerificationReport, refine, verify_bmo_cubes, verify_fefferman_stein,
                     verify_kolmogorov, verify_maximal_bounds, verify_sharp_estimate,
                     verify_variable_exponent, verify_weighted_bounds)

__all__ = ["main", "plan_suites", "run_suites", "write_run_outputs", "SuitePlan"]

EXIT_OK, EXIT_FAIL, EXIT_CONFIG = 0, 1, 2


@dataclass
class SuitePlan:
    name: str
    suite_id: str
    build: Callable[[int], VerificationReport]


def _check_arity(tuples, m: int, where: str) -> None:
    for i, tup in enumerate(tuples):
        if len(tup) != m:
            raise ConfigurationError(f"expected {m} entries, got {len(tup)}", path=f"{where}[{i}]")


def _families(cfg: RunConfig, kind: str, shifted: bool) -> Callable[[int], CubeFamily]:
    def family(N: int) -> CubeFamily:
        grid = cfg.grid(N)
        return cfg.family(grid.shifted() if shifted else grid, kind)

    # resolve both resolutions now so grid and level errors surface before any work
    family(cfg.domain.N)
    family(2 * cfg.domain.N)
    return family


def _require(value, path: str):
    if value is None:
        raise ConfigurationError("required for this suite", path=path)
    return value


def plan_suites(cfg: RunConfig) -> list[SuitePlan]:
    """Resolve every suite of ``cfg`` into a builder ``N -> report``.

    All objects a suite needs are constructed here, so configuration errors
    are raised before any quadrature runs.
    """
    if not cfg.suites:
        raise ConfigurationError("at least one suite is required", path="suites")
    plans, used = [], {}
    for i, s in enumerate(cfg.suites):
        at = f"suites[{i}]"
        name = s.name or s.id
        used[name] = used.get(name, 0) + 1
        if used[name] > 1:
            if s.name:
                raise ConfigurationError(f"duplicate suite name {name!r}", path=f"{at}.name")
            name = f"{name}_{used[name]}"
        plans.append(SuitePlan(name, s.id, _plan_one(cfg, s, at)))
    return plans


def _plan_one(cfg: RunConfig, s, at: str) -> Callable[[int], VerificationReport]:
    sid = s.id
    if sid in ("sharp_estimate", "weighted_bounds", "variable_exponent"):
        spec = cfg.kernel_spec()
        corpus = cfg.corpus_tuples()
        if not corpus:
            raise ConfigurationError("corpus is empty", path="corpus")
        _check_arity(corpus, spec.m, "corpus")
        symbols = None
        if s.commutator:
            symbols = cfg.symbol_vectors()
            if not symbols:
                raise ConfigurationError("commutator mode needs symbol vectors", path="symbols")
            _check_arity(symbols, spec.m, "symbols")
        fam = _families(cfg, s.family, shifted=True)
        if sid == "sharp_estimate":
            params = cfg.operator_params()
            if s.commutator and (params.t is None or params.epsilon is None):
                raise ConfigurationError("commutator mode needs t and epsilon", path="params")
            return lambda N: verify_sharp_estimate(spec, params, corpus, fam(N), symbols)
        ex = cfg.exponent_set(s.exponents, f"{at}.exponents")
        if sid == "weighted_bounds":
            P = _require(ex.P, f"exponents.{s.exponents}.P")
            exponent_vector(cfg, P, spec.alpha, f"exponents.{s.exponents}.P")
            weights = cfg.weight_vector(s.weights, f"{at}.weights")
            comm = None
            if symbols is not None:
                t = _require(cfg.params.t, "params.t")
                comm = (symbols, t)
            return lambda N: verify_weighted_bounds(spec, P, weights, corpus, fam(N), s.mode, comm)
        parts = _require(ex.variable, f"exponents.{s.exponents}.variable")
        split = _require(ex.alpha_split, f"exponents.{s.exponents}.alpha_split")
        exps = [_at_exponent(e, f"exponents.{s.exponents}.variable[{j}]")
                for j, e in enumerate(parts)]
        return lambda N: verify_variable_exponent(spec, exps, split, corpus, fam(N), symbols)
    if sid == "maximal_bounds":
        corpus = cfg.corpus_tuples()
        if not corpus:
            raise ConfigurationError("corpus is empty", path="corpus")
        ex = cfg.exponent_set(s.exponents, f"{at}.exponents")
        P = _require(ex.P, f"exponents.{s.exponents}.P")
        alpha = _require(s.alpha, f"{at}.alpha")
        exponent_vector(cfg, P, alpha, f"exponents.{s.exponents}.P")
        _check_arity(corpus, len(P), "corpus")
        weights = cfg.weight_vector(s.weights, f"{at}.weights")
        fam = _families(cfg, s.family, shifted=False)
        return lambda N: verify_maximal_bounds(P, weights, alpha, corpus, fam(N), s.mode)
    functions = cfg.function_list(s.functions, f"{at}.functions")
    fam = _families(cfg, s.family, shifted=False)
    if sid == "fefferman_stein":
        delta = _require(s.delta, f"{at}.delta")
        p = _require(s.p, f"{at}.p")
        w = _require(s.weight, f"{at}.weight").build()
        return lambda N: verify_fefferman_stein(functions, delta, p, w, fam(N))
    if sid == "kolmogorov":
        p, u = _require(s.p, f"{at}.p"), _require(s.u, f"{at}.u")
        if not 0 < p < u:
            raise ConfigurationError("need 0 < p < u", path=f"{at}.p")
        return lambda N: verify_kolmogorov(p, u, functions, fam(N))
    k_max = _require(s.k_max, f"{at}.k_max")
    return lambda N: verify_bmo_cubes(functions, fam(N), k_max)


def _at_exponent(model, path: str):
    try:
        return model.build()
    except ConfigurationError as exc:
        exc.path = exc.path or path
        raise


def run_suites(cfg: RunConfig, plans: list[SuitePlan] | None = None
               ) -> list[tuple[SuitePlan, VerificationReport]]:
    plans = plan_suites(cfg) if plans is None else plans
    return [(p, refine(p.build, cfg.domain.N)) for p in plans]


def _jsonable(obj):
    if isinstance(obj, float):
        return obj if math.isfinite(obj) else repr(obj)
    if isinstance(obj, (np.floating, np.integer, np.bool_)):
        return _jsonable(obj.item())
    if isinstance(obj, dict):
        return {str(k): _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    return obj


def _dump_json(path: Path, payload: dict) -> None:
    path.write_text(json.dumps(_jsonable(payload), sort_keys=True, indent=2) + "\n")


def _fmt(v) -> str:
    if isinstance(v, bool) or v is None:
        return str(v).lower()
    if isinstance(v, float):
        return repr(v)
    return str(v)


def _case_rows(name: str, report: VerificationReport):
    for c in report.cases:
        yield [name, report.suite, c.N, c.label, c.lhs, c.rhs, c.ratio, c.flagged, c.degenerate]
    for key in sorted(report.sub_reports):
        yield from _case_rows(f"{name}/{key}", report.sub_reports[key])


def write_run_outputs(cfg: RunConfig, results, out_dir: Path) -> list[Path]:
    out_dir.mkdir(parents=True, exist_ok=True)
    written = []
    resolved = cfg.to_dict()
    if "json" in cfg.output.formats:
        for plan, report in results:
            path = out_dir / f"{plan.name}.json"
            _dump_json(path, {"name": plan.name, "suite_id": plan.suite_id,
                              "config": resolved, "report": report.to_dict()})
            written.append(path)
    if "csv" in cfg.output.formats:
        path = out_dir / "results.csv"
        with path.open("w", newline="") as fh:
            w = csv.writer(fh, lineterminator="\n")
            w.writerow(["name", "suite", "N", "label", "lhs", "rhs", "ratio", "flagged",
                        "degenerate"])
            for plan, report in results:
                for row in _case_rows(plan.name, report):
                    w.writerow([_fmt(v) for v in row])
        written.append(path)
        path = out_dir / "summary.csv"
        with path.open("w", newline="") as fh:
            w = csv.writer(fh, lineterminator="\n")
            w.writerow(["name", "suite", "passed", "constant", "constant_fine", "relative_change"])
            for plan, report in results:
                ref = report.refinement
                w.writerow([_fmt(v) for v in (plan.name, report.suite, report.passed,
                                              ref["constant"], ref["constant_fine"],
                                              ref["relative_change"])])
        written.append(path)
    return written


def _out_dir(cfg: RunConfig, override: str | None) -> Path:
    return Path(override if override is not None else cfg.output.dir)


def cmd_run(cfg: RunConfig, out: str | None) -> int:
    plans = plan_suites(cfg)
    results = run_suites(cfg, plans)
    write_run_outputs(cfg, results, _out_dir(cfg, out))
    for plan, report in results:
        ref = report.refinement
        status = "PASS" if report.passed else "FAIL"
        print(f"{status} {plan.name}: constant {ref['constant']:.6g} -> "
              f"{ref['constant_fine']:.6g} (change {ref['relative_change']:.2%})")
    return EXIT_OK if all(r.passed for _, r in results) else EXIT_FAIL


def cmd_certify(cfg: RunConfig, out: str | None) -> int:
    spec = cfg.kernel_spec()
    c = cfg.certify
    if c is None:
        raise ConfigurationError("a certify block is required", path="certify")
    if c.K_max < 2:
        raise ConfigurationError("K_max must be at least 2 to fit a decay", path="certify.K_max")
    x, xp = np.asarray(c.x, dtype=float), np.asarray(c.xp, dtype=float)
    if x.shape != (spec.n,) or xp.shape != (spec.n,):
        raise ConfigurationError(f"x and xp need {spec.n} coordinates", path="certify.x")
    size = check_size_condition(spec, c.sample_count, cfg.seed)
    cert = verify_dini_implies_generalized(spec, c.K_max, x, xp, c.nodes)
    seq = cert.sequence
    out_dir = _out_dir(cfg, out)
    out_dir.mkdir(parents=True, exist_ok=True)
    _dump_json(out_dir / "certificate.json", {
        "config": cfg.to_dict(), "size_condition": size._asdict(),
        "certificate": cert.to_dict(), "decay_exponent": seq.decay_exponent,
        "tail_ratio": seq.tail_ratio, "weighted_tail_ratio": seq.weighted_tail_ratio,
        "passed": bool(cert.passed and size.passed)})
    with (out_dir / "certificate.csv").open("w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["k", "C_k", "omega", "ratio", "partial_sum", "partial_weighted_sum"])
        partial = weighted = 0.0
        for i, k in enumerate(seq.ks):
            partial += seq.values[i]
            weighted += k * seq.values[i]
            w.writerow([_fmt(v) for v in (k, seq.values[i], cert.modulus_values[i],
                                          cert.ratios[i], partial, weighted)])
    print(f"decay exponent {seq.decay_exponent:.4f}; resolution change "
          f"{cert.stability:.2%}; size ratio {size.worst_ratio:.4g}")
    return EXIT_OK if cert.passed and size.passed else EXIT_FAIL


def _coordinate_header(grid: GridDomain) -> list[str]:
    return ["x"] if grid.n == 1 else [f"x{i + 1}" for i in range(grid.n)]


def _write_field(path: Path, grid: GridDomain, values: np.ndarray) -> None:
    pts = grid.points().reshape(-1, grid.n)
    vals = np.asarray(values).reshape(-1)
    with path.open("w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(_coordinate_header(grid) + ["value"])
        for p, v in zip(pts, vals):
            w.writerow([repr(float(c)) for c in p] + [repr(float(v))])


def cmd_eval(cfg: RunConfig, what: str, out: str | None) -> int:
    block = getattr(cfg.eval, what, None) if cfg.eval is not None else None
    if block is None:
        raise ConfigurationError(f"an eval.{what} block is required", path=f"eval.{what}")
    grid = cfg.grid()
    out_dir = _out_dir(cfg, out)
    if what == "operator":
        spec = cfg.kernel_spec()
        corpus = cfg.corpus_tuples()
        if not 0 <= block.tuple_index < len(corpus):
            raise ConfigurationError("no such corpus tuple", path="eval.operator.tuple_index")
        _check_arity([corpus[block.tuple_index]], spec.m, "corpus")
        fs = [sample(e, grid) for e in corpus[block.tuple_index]]
        out_grid = grid.shifted()
        if block.commutator:
            symbols = cfg.symbol_vectors()
            if not 0 <= block.symbols_index < len(symbols):
                raise ConfigurationError("no such symbol vector",
                                         path="eval.operator.symbols_index")
            bs = [sample(e, grid) for e in symbols[block.symbols_index]]
            result = apply_commutator(spec, bs, fs, out_grid)
        else:
            result = apply_fractional_integral(spec, fs, out_grid)
        out_dir.mkdir(parents=True, exist_ok=True)
        _write_field(out_dir / "operator.csv", out_grid, result.values)
    elif what == "maximal":
        f = sample(_build(block.function, "eval.maximal.function"), grid)
        F = cfg.family(grid, block.family)
        if block.operator == "hl":
            result = hl_maximal_delta(f, block.delta, F)
        elif block.operator == "sharp":
            result = sharp_maximal(f, F)
        elif block.operator == "sharp_delta":
            result = sharp_maximal_delta(f, block.delta, F)
        else:
            result = frac_maximal_r(f, block.alpha, block.r, F)
        out_dir.mkdir(parents=True, exist_ok=True)
        _write_field(out_dir / "maximal.csv", grid, result.values)
    else:
        f = sample(_build(block.function, "eval.norms.function"), grid)
        rows = []
        for p in block.lp:
            rows.append((f"lp:{p!r}", lp_norm(f, p)))
        for p in block.weak:
            rows.append((f"weak:{p!r}", weak_lp_norm(f, p)))
        if block.bmo:
            rows.append(("bmo", bmo_norm(f, cfg.family(grid))))
        for p in block.ap:
            rows.append((f"ap:{p!r}", ap_constant(f, p, cfg.family(grid))))
        for j, q in enumerate(block.luxemburg):
            rows.append((f"luxemburg:{j}", luxemburg_norm(f, _at_exponent(
                q, f"eval.norms.luxemburg[{j}]"))))
        out_dir.mkdir(parents=True, exist_ok=True)
        with (out_dir / "norms.csv").open("w", newline="") as fh:
            w = csv.writer(fh, lineterminator="\n")
            w.writerow(["quantity", "value"])
            for name, v in rows:
                w.writerow([name, repr(float(v))])
    return EXIT_OK


def _build(model, path: str):
    try:
        return model.build()
    except ConfigurationError as exc:
        exc.path = exc.path or path
        raise


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="fraclab",
                                     description="Numerical checks for multilinear fractional "
                                                 "integrals and their commutators.")
    sub = parser.add_subparsers(dest="command", required=True)
    p = sub.add_parser("run", help="run the configured suites at N and 2N")
    p.add_argument("--config", required=True)
    p.add_argument("--out", default=None, help="output directory (overrides output.dir)")
    p = sub.add_parser("certify-kernel", help="size and smoothness certificate of the kernel")
    p.add_argument("--config", required=True)
    p.add_argument("--out", default=None)
    p = sub.add_parser("eval", help="evaluate one operator, norm set or maximal function")
    p.add_argument("--config", required=True)
    p.add_argument("--what", required=True, choices=["operator", "norms", "maximal"])
    p.add_argument("--out", default=None)
    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        cfg = load_config(args.config)
        if args.command == "run":
            return cmd_run(cfg, args.out)
        if args.command == "certify-kernel":
            return cmd_certify(cfg, args.out)
        return cmd_eval(cfg, args.what, args.out)
    except ConfigurationError as exc:
        print(f"configuration error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except (InsufficientResolutionError, CostLimitError) as exc:
        print(f"numeric refusal: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except SingularEvaluationError as exc:
        print(f"evaluation failed: {exc}", file=sys.stderr)
        return EXIT_FAIL


if __name__ == "__main__":
    sys.exit(main())
