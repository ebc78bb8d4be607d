"""Acceptance criteria, one test per criterion, each printing a PASS/FAIL line."""

import math
import time
from pathlib import Path

import numpy as np
import pytest

import fraclab
from fraclab import cli
from fraclab.config import load_config
from fraclab.corpus import expression
from fraclab.grid import cube_family, lattice_family, make_uniform_grid, sample
from fraclab.kernels import check_size_condition, riesz_gamma, verify_dini_implies_generalized
from fraclab.maximal import hl_maximal_delta
from fraclab.operators import apply_commutator, apply_fractional_integral, apply_riesz_potential
from fraclab.spaces import ap_constant, bmo_norm, constant_exponent, luxemburg_norm
from fraclab.verify import verify_kolmogorov

CONFIGS = Path(fraclab.__file__).parent / "configs"
CHI = expression("indicator", {"a": 0, "b": 1})


@pytest.fixture
def verdict(capsys):
    def report(criterion, ok, detail):
        with capsys.disabled():
            print(f"\n[acceptance] {criterion}: {'PASS' if ok else 'FAIL'} ({detail})")
        assert ok, detail
    return report


def _cfg(name):
    return load_config(CONFIGS / f"{name}.json")


def _run(name):
    cfg = _cfg(name)
    t0 = time.perf_counter()
    results = cli.run_suites(cfg)
    return {plan.name: rep for plan, rep in results}, time.perf_counter() - t0


def _stable(rep):
    ref = rep.refinement
    return (rep.passed and math.isfinite(ref["constant_fine"]) and not rep.infinite_cases
            and ref["relative_change"] < 0.2 and ref["N"] == 128 and ref["N_fine"] == 256)


def _changes(reports):
    return ", ".join(f"{k} {r.refinement['relative_change']:.1%}" for k, r in reports.items())


def test_criterion_1_kernel_certification(verdict):
    t0 = time.perf_counter()
    out = {}
    for name in ("certify_standard", "certify_holder"):
        cfg = _cfg(name)
        spec, c = cfg.kernel_spec(), cfg.certify
        assert c.K_max == 6
        cert = verify_dini_implies_generalized(spec, c.K_max, np.array(c.x), np.array(c.xp), c.nodes)
        size = check_size_condition(spec, c.sample_count, cfg.seed)
        out[name] = (cert.sequence.decay_exponent, cert.stability, size.passed)
    elapsed = time.perf_counter() - t0
    (e1, s1, z1), (e2, s2, z2) = out["certify_standard"], out["certify_holder"]
    ok = (0.8 <= e1 <= 1.2 and 0.4 <= e2 <= 0.6 and max(s1, s2) <= 0.05 and z1 and z2
          and elapsed < 60)
    verdict("1 kernel certification", ok,
            f"exponents {e1:.4f}, {e2:.4f}; stability {s1:.2%}, {s2:.2%}; {elapsed:.1f} s")


def test_criterion_2_commutator_telescoping(verdict):
    cfg = _cfg("sharp_estimate")
    t0 = time.perf_counter()
    spec, grid = cfg.kernel_spec(), cfg.grid()
    out = grid.shifted()
    consts = [expression("constant", {"c": 2.0}), expression("constant", {"c": -0.7})]
    bs = [sample(b, grid) for b in consts]
    worst = 0.0
    for tup in cfg.corpus_tuples():
        fs = [sample(e, grid) for e in tup]
        T = np.max(np.abs(apply_fractional_integral(spec, fs, out).values))
        Tb = np.max(np.abs(apply_commutator(spec, bs, fs, out).values))
        worst = max(worst, Tb / T)
    elapsed = time.perf_counter() - t0
    verdict("2 commutator telescoping", worst <= 1e-10 and elapsed < 30,
            f"max sup|T_b f| / sup|T f| = {worst:.2e}; {elapsed:.1f} s")


def test_criterion_3_sharp_estimate(verdict):
    reps, elapsed = _run("sharp_estimate")
    cfg = _cfg("sharp_estimate")
    assert len(cfg.corpus) >= 5 and cfg.domain.J == 4 and cfg.params.delta == 0.4
    ok = all(_stable(r) for r in reps.values()) and elapsed < 300
    verdict("3 sharp-maximal estimate", ok, f"{_changes(reps)}; {elapsed:.1f} s")


def test_criterion_4_sharp_commutator(verdict):
    reps, elapsed = _run("sharp_commutator")
    cfg = _cfg("sharp_commutator")
    assert cfg.params.t == 3 and cfg.params.epsilon == 0.6
    ok = all(_stable(r) for r in reps.values()) and elapsed < 300
    verdict("4 sharp-maximal commutator estimate", ok, f"{_changes(reps)}; {elapsed:.1f} s")


def test_criterion_5_weighted_bounds(verdict):
    a, t1 = _run("weighted_bounds")
    b, t2 = _run("weighted_commutator")
    reps = {**a, **b}
    weak = {k: r for k, r in reps.items() if r.settings["fine"].get("mode") == "weak"}
    weak_ok = bool(weak) and all(
        v for r in weak.values() for key, v in r.checks.items() if key.endswith("weak_le_strong"))
    per_case = all(c.lhs <= c.extra["strong_lhs"] for r in weak.values() for c in r.cases)
    ok = all(_stable(r) for r in reps.values()) and weak_ok and per_case and t1 + t2 < 600
    verdict("5 weighted bounds", ok, f"{_changes(reps)}; weak <= strong {weak_ok and per_case}; "
                                     f"{t1 + t2:.1f} s")


def test_criterion_6_variable_exponent(verdict):
    reps, elapsed = _run("variable_exponent")
    red, ref = reps["constant_reduction"], reps["constant_reference"]
    dev = max(abs(x.ratio / y.ratio - 1) if y.ratio else abs(x.ratio)
              for x, y in zip(red.cases, ref.cases))
    var = reps["variable_exponent"]
    subs = {k: s.refinement["relative_change"] for k, s in var.sub_reports.items()}
    ok = (len(red.cases) == len(ref.cases) and dev <= 1e-6 and _stable(var)
          and set(subs) == {"holder_product", "fractional_maximal"}
          and all(s.passed for s in var.sub_reports.values()) and elapsed < 600)
    verdict("6 variable exponent", ok, f"reduction deviation {dev:.1e}; variable change "
            f"{var.refinement['relative_change']:.1%}; sub-reports "
            + ", ".join(f"{k} {v:.1%}" for k, v in subs.items()) + f"; {elapsed:.1f} s")


def test_criterion_7_closed_form_anchors(verdict):
    results = {}
    box = make_uniform_grid(1, -2, 4, 128)
    lux = luxemburg_norm(sample(CHI, box), constant_exponent(2.0))
    results["luxemburg"] = (abs(lux - 1) <= 1e-8, f"{lux:.12f}")

    g = make_uniform_grid(1, -2, 4, 512)
    out = g.shifted()
    R = apply_riesz_potential(0.5, sample(CHI, g), out)
    i = int(np.argmin(np.abs(out.axis() + 1.0)))
    exact = 2 * (math.sqrt(2) - 1) / riesz_gamma(0.5, 1)
    results["riesz"] = (abs(R.values[i] / exact - 1) <= 0.01, f"{R.values[i]:.6f} vs {exact:.6f}")

    g = make_uniform_grid(1, -2, 4, 256)
    M = hl_maximal_delta(sample(CHI, g), 1.0, lattice_family(g)).values
    x = g.axis()
    tail = x > 1
    err = np.max(np.abs(M[tail] - 1 / x[tail]) * x[tail] ** 2) / (2 * g.h)
    results["maximal tail"] = (err <= 1.0, f"error {err:.3f} of 2h")

    g = make_uniform_grid(1, -1, 2, 256)
    b = bmo_norm(sample(expression("sign"), g), cube_family(g, 6))
    results["bmo sign"] = (abs(b - 1) <= 2 * g.h, f"{b:.6f}")

    one = sample(expression("constant", {"c": 1.0}), box)
    a2 = ap_constant(one, 2.0, cube_family(box, 4))
    results["A2 unit"] = (a2 == 1.0, repr(a2))

    kol = 0.0
    for N in (128, 256):
        g = make_uniform_grid(1, -2, 4, N)
        rep = verify_kolmogorov(1.0, 2.0, _cfg("lemmas").function_list(
            _cfg("lemmas").suites[1].functions, "suites[1]"), cube_family(g, 5))
        kol = max(kol, rep.empirical_constant)
    results["kolmogorov"] = (kol <= 2.1, f"{kol:.4f}")

    ok = all(v[0] for v in results.values())
    verdict("7 closed-form anchors", ok,
            "; ".join(f"{k} {'ok' if v[0] else 'FAIL'} {v[1]}" for k, v in results.items()))


def _a2_power(a, Ns):
    vals = []
    for N in Ns:
        g = make_uniform_grid(1, -1, 2, N)
        w = sample(expression("power_weight", {"a": a}), g)
        vals.append(ap_constant(w, 2.0, cube_family(g, int(math.log2(N)) - 3)))
    return vals


def test_criterion_8a_interior_power_weight_stable(verdict):
    vals = _a2_power(0.5, (128, 256, 512, 1024))
    changes = [abs(b / a - 1) for a, b in zip(vals, vals[1:])]
    verdict("8a A2 of |x|^(1/2) stable", max(changes) < 0.2,
            "constants " + ", ".join(f"{v:.4f}" for v in vals))


def test_criterion_8b_boundary_power_weight_growth(verdict):
    # Ledgered as unattainable: the constant grows by (1/2) ln 2 per doubling.
    vals = _a2_power(1.0, (128, 256, 512, 1024))
    monotone = all(b > a for a, b in zip(vals, vals[1:]))
    factor = vals[-1] / vals[0]
    verdict("8b A2 of |x|^1 grows >= 2x over three refinements", monotone and factor >= 2.0,
            "constants " + ", ".join(f"{v:.4f}" for v in vals) + f"; factor {factor:.3f}")


def test_criterion_9_determinism(verdict, tmp_path):
    command = {"certify": "certify-kernel", "eval": "eval"}
    differing = []
    for path in sorted(CONFIGS.glob("*.json")):
        outs = []
        for run in ("a", "b"):
            out = tmp_path / path.stem / run
            kind = path.stem.split("_")[0]
            argv = [command.get(kind, "run"), "--config", str(path), "--out", str(out)]
            if kind == "eval":
                argv += ["--what", next(iter(_cfg(path.stem).eval.model_dump(exclude_none=True)))]
            assert cli.main(argv) in (0, 1)
            outs.append(out)
        names = sorted(p.name for p in outs[0].glob("*.csv"))
        assert names
        differing += [f"{path.stem}/{n}" for n in names
                      if (outs[0] / n).read_bytes() != (outs[1] / n).read_bytes()]
    verdict("9 determinism", not differing,
            f"{len(list(CONFIGS.glob('*.json')))} configs; differing: {differing or 'none'}")
