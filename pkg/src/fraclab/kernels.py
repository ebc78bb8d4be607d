"""Kernel corpus and numerical certificates for the size, Dini and
annulus-smoothness conditions."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import NamedTuple, Sequence

import numpy as np
from scipy.special import gamma as gamma_fn

from .errors import ConfigurationError, InsufficientResolutionError, SingularEvaluationError

__all__ = [
    "KernelSpec",
    "riesz_gamma",
    "kernel_from_distances",
    "eval_kernel",
    "SizeCheck",
    "check_size_condition",
    "estimate_Ck",
    "ModulusOfContinuity",
    "dini_integral",
    "SmoothnessSequence",
    "SmoothnessCertificate",
    "verify_dini_implies_generalized",
    "reference_modulus",
]

KINDS = ("standard", "holder_modulated", "riesz")


def riesz_gamma(alpha: float, n: int) -> float:
    """Normalising constant of the Riesz potential in dimension ``n``."""
    return float(np.pi ** (n / 2) * 2.0**alpha * gamma_fn(alpha / 2) / gamma_fn((n - alpha) / 2))


@dataclass(frozen=True)
class KernelSpec:
    """An m-linear kernel of order ``alpha`` acting on functions on R^n.

    ``s`` is the endpoint tuple of the weak-type hypothesis; every entry lies
    in ``[1, p0']``.  It defaults to all ones.
    """

    m: int
    n: int
    alpha: float
    A: float = 1.0
    p0: float = 2.0
    kind: str = "standard"
    gamma: float = 0.5
    modulation_scale: float = 16.0
    s: tuple[float, ...] | None = None

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ConfigurationError(f"kernel kind must be one of {KINDS}, got {self.kind!r}")
        if self.m not in (1, 2, 3):
            raise ConfigurationError(f"arity m must be 1, 2 or 3, got {self.m}")
        if self.m >= 2 and self.n != 1:
            raise ConfigurationError("multilinear kernels (m >= 2) are supported for n = 1 only")
        if self.n not in (1, 2):
            raise ConfigurationError(f"dimension n must be 1 or 2, got {self.n}")
        if not self.p0 > 1:
            raise ConfigurationError(f"p0 must exceed 1, got {self.p0}")
        if not self.A > 0:
            raise ConfigurationError(f"size constant A must be positive, got {self.A}")
        mn = self.m * self.n
        if not 0 < self.alpha * self.p0_conj < mn:
            raise ConfigurationError(
                f"need 0 < alpha*p0' < mn: alpha*p0' = {self.alpha * self.p0_conj:g}, "
                f"mn = {mn} (generalized-kernel order bound)")
        if self.kind == "riesz":
            if self.m != 1:
                raise ConfigurationError("riesz kernel is linear (m = 1)")
            if not 0 < self.alpha < self.n:
                raise ConfigurationError("riesz kernel needs 0 < alpha < n")
        if self.kind == "holder_modulated" and not 0 < self.gamma <= 1:
            raise ConfigurationError(f"holder exponent must lie in (0, 1], got {self.gamma}")
        s = (1.0,) * self.m if self.s is None else tuple(float(v) for v in self.s)
        if len(s) != self.m:
            raise ConfigurationError(f"endpoint tuple s needs {self.m} entries")
        if not all(1.0 <= v <= self.p0_conj for v in s):
            raise ConfigurationError(f"endpoint exponents must lie in [1, p0'={self.p0_conj:g}]")
        object.__setattr__(self, "s", s)

    @property
    def p0_conj(self) -> float:
        return self.p0 / (self.p0 - 1.0)

    @property
    def mn(self) -> int:
        return self.m * self.n

    @property
    def s_harmonic(self) -> float:
        return 1.0 / sum(1.0 / v for v in self.s)

    @property
    def weak_target_exponent(self) -> float:
        """``sn / (n - s alpha)``, infinite when the denominator is not positive."""
        s = self.s_harmonic
        den = self.n - s * self.alpha
        return s * self.n / den if den > 0 else math.inf

    @property
    def size_tolerance(self) -> float:
        return 3.0 if self.kind == "holder_modulated" else 1.0

    def to_dict(self) -> dict:
        return {"kind": self.kind, "m": self.m, "n": self.n, "alpha": self.alpha,
                "A": self.A, "p0": self.p0, "gamma": self.gamma,
                "modulation_scale": self.modulation_scale, "s": list(self.s)}


def kernel_from_distances(spec: KernelSpec, x_norm: float, S: np.ndarray) -> np.ndarray:
    """Kernel value given ``S = sum_j |x - y_j|`` and ``|x|``.

    All corpus kernels depend on the configuration only through these two
    numbers.  ``S = 0`` yields ``inf``.
    """
    with np.errstate(divide="ignore"):
        if spec.kind == "riesz":
            return S ** (spec.alpha - spec.n) / riesz_gamma(spec.alpha, spec.n)
        base = spec.A * S ** (spec.alpha - spec.mn)
        if spec.kind == "standard":
            return base
        with np.errstate(invalid="ignore"):
            u = spec.modulation_scale * x_norm / S
        return base * (2.0 + np.sin(u**spec.gamma))


def eval_kernel(spec: KernelSpec, x, ys: Sequence) -> float:
    x = np.atleast_1d(np.asarray(x, dtype=float))
    ys = [np.atleast_1d(np.asarray(y, dtype=float)) for y in ys]
    if len(ys) != spec.m:
        raise ConfigurationError(f"kernel needs {spec.m} y-points, got {len(ys)}")
    if any(y.shape != (spec.n,) for y in ys) or x.shape != (spec.n,):
        raise ConfigurationError(f"points must lie in R^{spec.n}")
    S = sum(float(np.linalg.norm(x - y)) for y in ys)
    if S == 0.0:
        raise SingularEvaluationError("x = y_1 = ... = y_m lies on the kernel diagonal")
    return float(kernel_from_distances(spec, float(np.linalg.norm(x)), np.float64(S)))


class SizeCheck(NamedTuple):
    worst_ratio: float
    passed: bool


def check_size_condition(spec: KernelSpec, sample_count: int = 1000, seed: int = 0) -> SizeCheck:
    """Largest ``|K| S^(mn-alpha) / A`` over random off-diagonal configurations."""
    if sample_count < 100:
        raise ConfigurationError("size check needs at least 100 samples")
    rng = np.random.default_rng(seed)
    x = rng.uniform(-1.0, 1.0, size=(sample_count, spec.n))
    scale = np.exp(rng.uniform(-6.0, 3.0, size=(sample_count, 1, 1)))
    ys = x[:, None, :] + scale * rng.normal(size=(sample_count, spec.m, spec.n))
    S = np.linalg.norm(x[:, None, :] - ys, axis=-1).sum(axis=1)
    K = kernel_from_distances(spec, np.linalg.norm(x, axis=-1), S)
    ratios = np.abs(K) * S ** (spec.mn - spec.alpha) / spec.A
    worst = float(np.max(ratios))
    return SizeCheck(worst, worst <= spec.size_tolerance * (1.0 + 1e-12))


def estimate_Ck(spec: KernelSpec, x, xp, k: int, nodes: int = 128) -> float:
    """Normalised L^p0 norm of ``K(x, .) - K(x', .)`` over the k-th cube annulus.

    The annulus is the product cube of side ``2^(k+2) sqrt(mn) |x - x'|``
    around ``(x, ..., x)`` minus the concentric cube of half that side.  It is
    integrated by the midpoint rule on a local grid with ``nodes`` cells per
    axis; the inner cube is cell aligned, so ``nodes`` must be a multiple of 4
    with at least 16 cells across the annulus ring.
    """
    x = np.atleast_1d(np.asarray(x, dtype=float))
    xp = np.atleast_1d(np.asarray(xp, dtype=float))
    d = float(np.linalg.norm(x - xp))
    if not d > 0:
        raise ConfigurationError("estimate_Ck needs x != x'")
    if int(k) != k or k < 1:
        raise ConfigurationError(f"annulus index k must be a positive integer, got {k}")
    if nodes % 4 or nodes // 4 < 16:
        required = max(64, -(-nodes // 4) * 4)
        raise InsufficientResolutionError(
            f"annulus grid needs >= 16 cells across the ring: use nodes >= {required} "
            f"(multiple of 4), got {nodes}", required)
    mn, n = spec.mn, spec.n
    side = 2.0 ** (k + 2) * math.sqrt(mn) * d
    h = side / nodes
    lo, hi = nodes // 4, 3 * nodes // 4
    idx = np.arange(nodes)
    offsets = -side / 2 + (idx + 0.5) * h
    inner_axis = (idx >= lo) & (idx < hi)
    xn, xpn = float(np.linalg.norm(x)), float(np.linalg.norm(xp))

    # axis a of the mn-dimensional cube is coordinate (a % n) of slot a // n
    def distances(pt, chunk):
        shape = [1] * mn
        total = 0.0
        if n == 1:
            for a in range(mn):
                coord = x[0] + (offsets[chunk] if a == 0 else offsets)
                sh = list(shape)
                sh[a] = coord.size
                total = total + np.abs(pt[0] - coord).reshape(sh)
            return total
        sq = 0.0
        for a in range(2):
            coord = x[a] + (offsets[chunk] if a == 0 else offsets)
            sh = list(shape)
            sh[a] = coord.size
            sq = sq + ((pt[a] - coord) ** 2).reshape(sh)
        return np.sqrt(sq)

    acc = 0.0
    rows = max(1, (1 << 21) // nodes ** (mn - 1))
    for start in range(0, nodes, rows):
        chunk = slice(start, min(nodes, start + rows))
        inner = inner_axis[chunk].reshape([-1] + [1] * (mn - 1))
        for a in range(1, mn):
            sh = [1] * mn
            sh[a] = nodes
            inner = inner & inner_axis.reshape(sh)
        diff = (kernel_from_distances(spec, xn, distances(x, chunk))
                - kernel_from_distances(spec, xpn, distances(xp, chunk)))
        integrand = np.abs(diff) ** spec.p0
        integrand = np.where(inner, 0.0, integrand)
        if not np.all(np.isfinite(integrand)):
            raise SingularEvaluationError("kernel singularity inside the annulus")
        acc += float(np.sum(integrand))
    norm = (acc * h**mn) ** (1.0 / spec.p0)
    expo = spec.alpha - mn / spec.p0_conj
    return norm / (2.0 ** (k * expo) * d**expo)


@dataclass(frozen=True)
class ModulusOfContinuity:
    """Closed-form moduli: ``power`` t^gamma, ``log_damped`` t^gamma (1+log 1/t)^-m,
    ``holder_linear`` t^gamma + t, ``constant`` c."""

    kind: str
    gamma: float = 1.0
    m: float = 0.0
    c: float = 1.0

    def __post_init__(self):
        if self.kind not in ("power", "log_damped", "holder_linear", "constant"):
            raise ConfigurationError(f"unknown modulus kind {self.kind!r}")
        if self.gamma < 0 or self.m < 0:
            raise ConfigurationError("modulus parameters must be non-negative")
        t = np.logspace(-12, 0, 400)
        w = self(t)
        if not (np.all(w >= 0) and np.all(np.diff(w) >= -1e-15 * w[1:])):
            raise ConfigurationError("modulus must be non-negative and non-decreasing")
        if not 0 < self(np.array([1.0]))[0] < math.inf:
            raise ConfigurationError("modulus needs 0 < omega(1) < inf")

    def __call__(self, t):
        t = np.asarray(t, dtype=float)
        if self.kind == "constant":
            return np.full(t.shape, float(self.c))
        if self.kind == "power":
            return t**self.gamma
        if self.kind == "holder_linear":
            return t**self.gamma + t
        with np.errstate(divide="ignore"):
            return t**self.gamma * (1.0 + np.log(1.0 / t)) ** (-self.m)


def _romberg_panel(f, a: float, b: float, base_step: float = 1.0 / 8) -> float:
    """Trapezoid sums at steps base, base/2, base/4 on [a, b] combined by Richardson."""
    sums = []
    for level in range(3):
        step = base_step / 2**level
        count = max(1, int(round((b - a) / step)))
        u = np.linspace(a, b, count + 1)
        v = f(u)
        sums.append(step * (v.sum() - 0.5 * (v[0] + v[-1])))
    r1 = (4 * sums[1] - sums[0]) / 3
    r2 = (4 * sums[2] - sums[1]) / 3
    return (16 * r2 - r1) / 15


def dini_integral(omega: ModulusOfContinuity, a: float, log_power: int = 0,
                  cap: float = 1e12, max_depth: int = 18) -> float:
    """``int_0^1 omega(t)^a (1 + log 1/t)^m dt/t``, or ``inf`` when divergent.

    Integrated in ``u = -log2 t`` on nodes ``t = 2^(-j/8)`` refined twice,
    over panels ``[0, 1], [1, 2], [2, 4], ...`` (the lower limit is pushed
    toward 0 by doubling).  Divergence: the partial value exceeds ``cap`` or
    the panel contributions stop shrinking geometrically.
    """
    if not a > 0:
        raise ConfigurationError(f"Dini exponent a must be positive, got {a}")
    if int(log_power) != log_power or log_power < 0:
        raise ConfigurationError("log power must be a non-negative integer")
    ln2 = math.log(2.0)

    def integrand(u):
        return ln2 * omega(2.0 ** (-u)) ** a * (1.0 + u * ln2) ** log_power

    total = _romberg_panel(integrand, 0.0, 1.0)
    prev_inc = None
    ratio = math.inf
    lo = 1.0
    for _ in range(max_depth):
        inc = _romberg_panel(integrand, lo, 2 * lo)
        total += inc
        if total > cap:
            return math.inf
        if prev_inc is not None and prev_inc > 0:
            ratio = inc / prev_inc
        if inc <= 1e-14 * total:
            return float(total)
        prev_inc = inc
        lo *= 2
    if ratio < 0.9:
        return float(total + inc * ratio / (1.0 - ratio))
    return math.inf


def reference_modulus(spec: KernelSpec) -> ModulusOfContinuity:
    """Ground-truth modulus of a corpus kernel (up to constants)."""
    if spec.kind == "holder_modulated":
        return ModulusOfContinuity("holder_linear", gamma=spec.gamma)
    return ModulusOfContinuity("power", gamma=1.0)


def _fit_decay(ks: np.ndarray, values: np.ndarray) -> float | None:
    if len(ks) < 2 or np.any(values <= 0):
        return None
    slope = np.polyfit(ks, np.log2(values), 1)[0]
    return float(-slope)


@dataclass
class SmoothnessSequence:
    ks: list[int]
    values: list[float]
    decay_exponent: float | None = None
    partial_sum: float = 0.0
    partial_weighted_sum: float = 0.0
    tail_ratio: float | None = None
    weighted_tail_ratio: float | None = None

    @classmethod
    def from_values(cls, ks, values) -> "SmoothnessSequence":
        ks_arr = np.asarray(ks, dtype=float)
        vals = np.asarray(values, dtype=float)
        if np.any(vals < 0):
            raise ConfigurationError("C_k estimates must be non-negative")
        seq = cls(list(map(int, ks)), vals.tolist(), _fit_decay(ks_arr, vals),
                  float(vals.sum()), float((ks_arr * vals).sum()))
        if len(vals) >= 2 and vals[-2] > 0:
            seq.tail_ratio = float(vals[-1] / vals[-2])
            seq.weighted_tail_ratio = float(ks_arr[-1] * vals[-1] / (ks_arr[-2] * vals[-2]))
        return seq

    def to_dict(self) -> dict:
        return dict(self.__dict__)


@dataclass
class SmoothnessCertificate:
    spec: KernelSpec
    sequence: SmoothnessSequence
    modulus: ModulusOfContinuity
    modulus_values: list[float]
    ratios: list[float]
    spread: float
    stability: float
    passed: bool
    x: list[float] = field(default_factory=list)
    xp: list[float] = field(default_factory=list)
    nodes: int = 128

    def to_dict(self) -> dict:
        return {
            "kernel": self.spec.to_dict(),
            "x": self.x, "xp": self.xp, "nodes": self.nodes,
            "sequence": self.sequence.to_dict(),
            "modulus": {"kind": self.modulus.kind, "gamma": self.modulus.gamma},
            "modulus_values": self.modulus_values,
            "ratios": self.ratios,
            "ratio_spread": self.spread,
            "resolution_change": self.stability,
            "passed": self.passed,
        }


def verify_dini_implies_generalized(spec: KernelSpec, K_max: int, x=0.0, xp=0.01,
                                    nodes: int = 128, max_spread: float = 10.0
                                    ) -> SmoothnessCertificate:
    """Estimate ``C_1..C_Kmax`` and compare them with ``omega(2^-k)``.

    Passes when ``max/min`` of ``C_k / omega(2^-k)`` stays below
    ``max_spread``.  Each estimate is repeated with doubled ``nodes``;
    ``stability`` is the largest relative change.
    """
    if K_max < 0:
        raise ConfigurationError("K_max must be non-negative")
    x = np.atleast_1d(np.asarray(x, dtype=float))
    xp = np.atleast_1d(np.asarray(xp, dtype=float))
    modulus = reference_modulus(spec)
    ks = list(range(1, K_max + 1))
    coarse = [estimate_Ck(spec, x, xp, k, nodes) for k in ks]
    fine = [estimate_Ck(spec, x, xp, k, 2 * nodes) for k in ks]
    seq = SmoothnessSequence.from_values(ks, coarse)
    w = modulus(2.0 ** -np.asarray(ks, dtype=float)).tolist()
    ratios = [c / wk for c, wk in zip(coarse, w)]
    spread = max(ratios) / min(ratios) if ratios and min(ratios) > 0 else (1.0 if not ratios else math.inf)
    stability = max((abs(f / c - 1.0) for c, f in zip(coarse, fine) if c > 0), default=0.0)
    return SmoothnessCertificate(spec, seq, modulus, w, ratios, spread, stability,
                                 spread <= max_spread, x.tolist(), xp.tolist(), nodes)
