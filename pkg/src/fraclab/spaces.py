"""Norms and weight classes: weighted L^p and L^{p,oo}, BMO, A_p and
A_{P,q} constants, variable exponents with their modular, Luxemburg norm and
log-Hoelder constants."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .corpus import Expression
from .errors import ConfigurationError
from .grid import CubeFamily, GridDomain, SampledFunction, sample
from .maximal import cube_means, cube_oscillations

__all__ = [
    "WeightVector",
    "ExponentVector",
    "ExponentFunction",
    "constant_exponent",
    "asymptotic_exponent",
    "smoothstep_exponent",
    "piecewise_exponent",
    "harmonic_exponent",
    "lp_norm",
    "weak_lp_norm",
    "bmo_norm",
    "ap_constant",
    "apq_constant",
    "modular",
    "luxemburg_norm",
    "log_holder_constants",
    "MIN_CUBE_NODES",
]

# BMO and weight constants skip cubes holding fewer nodes than this
MIN_CUBE_NODES = 4


def _weight_values(f: SampledFunction, w) -> np.ndarray:
    if w is None:
        return np.ones(f.grid.shape)
    values = w.values if isinstance(w, SampledFunction) else np.asarray(w, dtype=float)
    if isinstance(w, SampledFunction) and w.grid != f.grid:
        raise ConfigurationError("weight and function live on different grids")
    values = values.reshape(f.grid.shape)
    if np.any(values <= 0):
        raise ConfigurationError("weights must be strictly positive at every node")
    return values


def _positive(w: SampledFunction, label: str = "weight") -> np.ndarray:
    if np.any(w.values <= 0):
        raise ConfigurationError(f"{label} must be strictly positive at every node")
    return w.values


class WeightVector:
    """Weights ``omega_1..omega_m`` on one grid; ``v`` is their product."""

    def __init__(self, weights: Sequence[SampledFunction]):
        weights = tuple(weights)
        if not weights:
            raise ConfigurationError("weight vector needs at least one weight")
        grid = weights[0].grid
        for j, w in enumerate(weights):
            if w.grid != grid:
                raise ConfigurationError("all weights must share one grid")
            _positive(w, f"weight omega_{j + 1}")
        self.weights = weights
        self.grid = grid

    @classmethod
    def from_expressions(cls, exprs: Sequence[Expression], grid: GridDomain) -> "WeightVector":
        return cls([sample(e, grid) for e in exprs])

    @classmethod
    def unit(cls, grid: GridDomain, m: int) -> "WeightVector":
        ones = SampledFunction(grid, np.ones(grid.shape))
        return cls([ones] * m)

    @property
    def m(self) -> int:
        return len(self.weights)

    @property
    def v(self) -> SampledFunction:
        prod = np.ones(self.grid.shape)
        for w in self.weights:
            prod = prod * w.values
        return SampledFunction(self.grid, prod)

    def power_parameters(self) -> list[float | None]:
        """Exponent ``a`` of corpus power weights, ``None`` for other weights."""
        out = []
        for w in self.weights:
            if w.expr is not None and w.expr.id == "power_weight":
                out.append(w.expr.kwargs["a"])
            elif w.expr is not None and w.expr.id == "constant":
                out.append(0.0)
            else:
                out.append(None)
        return out


@dataclass(frozen=True)
class ExponentVector:
    """``P = (p_1..p_m)`` with ``1/p = sum 1/p_j`` and ``1/q = 1/p - alpha/n``."""

    ps: tuple[float, ...]
    alpha: float = 0.0
    n: int = 1

    def __post_init__(self):
        ps = tuple(float(p) for p in self.ps)
        object.__setattr__(self, "ps", ps)
        if not ps or any(p < 1 for p in ps):
            raise ConfigurationError(f"exponents p_j must be >= 1, got {list(ps)}")
        if self.alpha < 0:
            raise ConfigurationError("alpha must be non-negative")
        if not self.q_inverse > 0:
            raise ConfigurationError(
                f"need 1/q = 1/p - alpha/n > 0, got {self.q_inverse:g}")

    @property
    def m(self) -> int:
        return len(self.ps)

    @property
    def p(self) -> float:
        return 1.0 / sum(1.0 / p for p in self.ps)

    @property
    def q_inverse(self) -> float:
        return sum(1.0 / p for p in self.ps) - self.alpha / self.n

    @property
    def q(self) -> float:
        return 1.0 / self.q_inverse

    def to_dict(self) -> dict:
        return {"P": list(self.ps), "alpha": self.alpha, "n": self.n, "p": self.p, "q": self.q}


@dataclass(frozen=True)
class ExponentFunction:
    """Closed-form variable exponent.

    Kinds: ``constant`` (p), ``asymptotic`` (p_inf + amp / ln(e + |x|)),
    ``smoothstep`` (radial cubic step from p1 at r0 to p2 at r0 + width),
    ``piecewise`` (1-D, ``values[k]`` on the k-th interval cut by ``breaks``),
    ``harmonic`` (1/q = sum 1/parts - alpha/n), ``scaled`` (part / factor)
    and ``conjugate`` (part / (part - 1)).  ``q_inf`` is metadata of the
    closed form, never estimated from samples.
    """

    kind: str
    params: tuple[tuple[str, object], ...] = ()
    parts: tuple["ExponentFunction", ...] = ()

    @property
    def kw(self) -> dict:
        return dict(self.params)

    def __call__(self, points: np.ndarray) -> np.ndarray:
        pts = np.asarray(points, dtype=float)
        if pts.ndim == 1:
            pts = pts[:, None]
        k, kw = self.kind, self.kw
        if k == "constant":
            return np.full(pts.shape[0], float(kw["p"]))
        if k == "asymptotic":
            r = np.linalg.norm(pts, axis=-1)
            return kw["p_inf"] + kw["amp"] / np.log(math.e + r)
        if k == "smoothstep":
            r = np.linalg.norm(pts, axis=-1)
            u = np.clip((r - kw["r0"]) / kw["width"], 0.0, 1.0)
            return kw["p1"] + (kw["p2"] - kw["p1"]) * u * u * (3.0 - 2.0 * u)
        if k == "piecewise":
            idx = np.searchsorted(np.asarray(kw["breaks"]), pts[:, 0], side="left")
            return np.asarray(kw["values"], dtype=float)[idx]
        if k == "harmonic":
            inv = sum(1.0 / p(pts) for p in self.parts) - kw["alpha"] / kw["n"]
            return 1.0 / inv
        if k == "scaled":
            return self.parts[0](pts) / kw["factor"]
        if k == "conjugate":
            q = self.parts[0](pts)
            return q / (q - 1.0)
        raise ConfigurationError(f"unknown exponent kind {k!r}")

    @property
    def q_inf(self) -> float | None:
        k, kw = self.kind, self.kw
        if k == "constant":
            return float(kw["p"])
        if k == "asymptotic":
            return float(kw["p_inf"])
        if k == "smoothstep":
            return float(kw["p2"])
        if k == "piecewise":
            return None
        limits = [p.q_inf for p in self.parts]
        if any(v is None for v in limits):
            return None
        if k == "harmonic":
            return 1.0 / (sum(1.0 / v for v in limits) - kw["alpha"] / kw["n"])
        if k == "scaled":
            return limits[0] / kw["factor"]
        return limits[0] / (limits[0] - 1.0)

    @property
    def is_constant(self) -> bool:
        if self.kind == "constant":
            return True
        if self.kind in ("harmonic", "scaled", "conjugate"):
            return all(p.is_constant for p in self.parts)
        return False

    def values(self, grid: GridDomain) -> np.ndarray:
        return self(grid.points()).reshape(grid.shape)

    def bounds(self, grid: GridDomain) -> tuple[float, float]:
        """``(q_-, q_+)`` over the nodes of ``grid``."""
        v = self.values(grid)
        return float(v.min()), float(v.max())

    def check(self, grid: GridDomain, lower: float = 1.0) -> tuple[float, float]:
        """Bounds, after checking ``lower < q_- <= q_+ < inf`` on ``grid``."""
        lo, hi = self.bounds(grid)
        if not (lo > lower and np.isfinite(hi)):
            raise ConfigurationError(
                f"exponent {self.kind} needs {lower:g} < q_- <= q_+ < inf on the grid, "
                f"got [{lo:g}, {hi:g}]")
        return lo, hi

    def scaled(self, factor: float) -> "ExponentFunction":
        return ExponentFunction("scaled", (("factor", float(factor)),), (self,))

    def conjugate(self) -> "ExponentFunction":
        return ExponentFunction("conjugate", (), (self,))

    def to_dict(self) -> dict:
        out = {"kind": self.kind}
        for key, value in self.params:
            out[key] = list(value) if isinstance(value, tuple) else value
        if self.parts:
            out["parts"] = [p.to_dict() for p in self.parts]
        return out


def constant_exponent(p: float) -> ExponentFunction:
    if not p > 0:
        raise ConfigurationError(f"exponent must be positive, got {p}")
    return ExponentFunction("constant", (("p", float(p)),))


def asymptotic_exponent(p_inf: float, amp: float) -> ExponentFunction:
    if not (p_inf > 0 and p_inf + min(amp, 0.0) > 0):
        raise ConfigurationError("asymptotic exponent must stay positive")
    return ExponentFunction("asymptotic", (("p_inf", float(p_inf)), ("amp", float(amp))))


def smoothstep_exponent(p1: float, p2: float, r0: float = 0.0, width: float = 1.0) -> ExponentFunction:
    if not (p1 > 0 and p2 > 0 and width > 0 and r0 >= 0):
        raise ConfigurationError("smoothstep exponent needs p1, p2, width > 0 and r0 >= 0")
    return ExponentFunction("smoothstep", (("p1", float(p1)), ("p2", float(p2)),
                                           ("r0", float(r0)), ("width", float(width))))


def piecewise_exponent(breaks: Sequence[float], values: Sequence[float]) -> ExponentFunction:
    breaks = tuple(float(b) for b in breaks)
    values = tuple(float(v) for v in values)
    if len(values) != len(breaks) + 1:
        raise ConfigurationError("piecewise exponent needs len(values) = len(breaks) + 1")
    if list(breaks) != sorted(breaks) or any(v <= 0 for v in values):
        raise ConfigurationError("piecewise exponent needs sorted breaks and positive values")
    return ExponentFunction("piecewise", (("breaks", breaks), ("values", values)))


def harmonic_exponent(parts: Sequence[ExponentFunction], alpha: float = 0.0, n: int = 1
                      ) -> ExponentFunction:
    """``1/q(x) = sum_i 1/p_i(x) - alpha/n``."""
    if not parts:
        raise ConfigurationError("harmonic exponent needs at least one part")
    return ExponentFunction("harmonic", (("alpha", float(alpha)), ("n", int(n))), tuple(parts))


def lp_norm(f: SampledFunction, p: float, w=None) -> float:
    """``(int |f|^p w)^(1/p)`` by the midpoint rule."""
    if not p > 0:
        raise ConfigurationError(f"p must be positive, got {p}")
    wv = _weight_values(f, w)
    total = float(np.sum(np.abs(f.values) ** p * wv) * f.grid.cell_volume)
    return total ** (1.0 / p)


def weak_lp_norm(f: SampledFunction, p: float, w=None) -> float:
    """``sup_v v * w({|f| >= v})^(1/p)`` over the sampled values ``v`` of ``|f|``.

    This is the supremum of ``lam * w({|f| > lam})^(1/p)`` for the step
    function, approached as ``lam`` increases to a sampled level.
    """
    if not p > 0:
        raise ConfigurationError(f"p must be positive, got {p}")
    wv = _weight_values(f, w).ravel() * f.grid.cell_volume
    a = np.abs(f.flat)
    order = np.argsort(-a, kind="stable")
    a, wv = a[order], wv[order]
    measure = np.cumsum(wv)
    # last position of each distinct level in descending order
    last = np.r_[np.flatnonzero(a[1:] != a[:-1]), len(a) - 1]
    levels = a[last]
    keep = levels > 0
    if not np.any(keep):
        return 0.0
    return float(np.max(levels[keep] * measure[last][keep] ** (1.0 / p)))


def bmo_norm(b: SampledFunction, F: CubeFamily) -> float:
    """``max_Q avg_Q |b - b_Q|`` over family cubes holding at least 4 nodes."""
    if b.grid != F.grid:
        raise ConfigurationError("cube family and function live on different grids")
    Fr = F.restricted(MIN_CUBE_NODES)
    return float(max(cube_oscillations(Fr, b.values, lv).max() for lv in Fr.levels))


def ap_constant(w: SampledFunction, p: float, F: CubeFamily) -> float:
    """``max_Q (avg_Q w) (avg_Q w^(-1/(p-1)))^(p-1)``."""
    if not p > 1:
        raise ConfigurationError(f"A_p needs p > 1, got {p}")
    if w.grid != F.grid:
        raise ConfigurationError("cube family and weight live on different grids")
    wv = _positive(w)
    dual = wv ** (-1.0 / (p - 1.0))
    Fr = F.restricted(MIN_CUBE_NODES)
    return float(max(np.max(cube_means(Fr, wv, lv) * cube_means(Fr, dual, lv) ** (p - 1.0))
                     for lv in Fr.levels))


def apq_constant(W: WeightVector, P: ExponentVector | Sequence[float], q: float,
                 F: CubeFamily) -> float:
    """``max_Q (avg_Q v^q)^(1/q) prod_j (avg_Q omega_j^(-p_j'))^(1/p_j')``.

    A slot with ``p_j = 1`` contributes ``(min_Q omega_j)^-1``.
    """
    ps = P.ps if isinstance(P, ExponentVector) else tuple(float(p) for p in P)
    if len(ps) != W.m:
        raise ConfigurationError(f"{len(ps)} exponents for {W.m} weights")
    if any(p < 1 for p in ps):
        raise ConfigurationError("exponents p_j must be >= 1")
    if not q > 0:
        raise ConfigurationError(f"q must be positive, got {q}")
    if W.grid != F.grid:
        raise ConfigurationError("cube family and weights live on different grids")
    Fr = F.restricted(MIN_CUBE_NODES)
    vq = W.v.values ** q
    axes = tuple(range(F.grid.n, 2 * F.grid.n))
    best = 0.0
    for lv in Fr.levels:
        prod = cube_means(Fr, vq, lv) ** (1.0 / q)
        for wj, pj in zip(W.weights, ps):
            if pj == 1.0:
                prod = prod / Fr.windows(wj.values, lv).min(axis=axes)
            else:
                pc = pj / (pj - 1.0)
                prod = prod * cube_means(Fr, wj.values ** (-pc), lv) ** (1.0 / pc)
        best = max(best, float(np.max(prod)))
    return best


def modular(f: SampledFunction, q: ExponentFunction) -> float:
    """``int |f(x)|^q(x) dx``."""
    return float(np.sum(np.abs(f.values) ** q.values(f.grid)) * f.grid.cell_volume)


def luxemburg_norm(f: SampledFunction, q: ExponentFunction, rtol: float = 1e-10) -> float:
    """``inf {eta > 0 : modular(f / eta) <= 1}``.

    The root is bracketed by doubling or halving from the ``L^{q_+}`` norm and
    then bisected to relative width ``rtol``; the bracket midpoint is returned.
    """
    a = np.abs(f.values)
    if not np.any(a):
        return 0.0
    qv = q.values(f.grid)
    if not np.all(qv > 0):
        raise ConfigurationError("exponent must be positive at every node")
    vol = f.grid.cell_volume

    def rho(eta):
        return float(np.sum((a / eta) ** qv) * vol)

    eta = lp_norm(f, float(qv.max()))
    if rho(eta) > 1.0:
        lo, hi = eta, 2.0 * eta
        while rho(hi) > 1.0:
            lo, hi = hi, 2.0 * hi
    else:
        lo, hi = eta / 2.0, eta
        while rho(lo) <= 1.0:
            lo, hi = lo / 2.0, lo
    while hi - lo > rtol * hi:
        mid = 0.5 * (lo + hi)
        if rho(mid) > 1.0:
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


def log_holder_constants(q: ExponentFunction, grid: GridDomain) -> tuple[float, float]:
    """``(C_local, C_inf)`` as suprema over the nodes of ``grid``.

    ``C_local = sup |q(x) - q(y)| ln(1/|x - y|)`` over node pairs with
    ``|x - y| <= 1/2``; ``C_inf = sup |q(x) - q_inf| ln(e + |x|)``.
    """
    q_inf = q.q_inf
    if q_inf is None:
        raise ConfigurationError(f"exponent {q.kind} declares no limit at infinity")
    v = q.values(grid)
    h, N, n = grid.h, grid.N, grid.n
    reach = min(int(0.5 / h + 1e-9), N - 1)
    c_local = 0.0
    if n == 1:
        for d in range(1, reach + 1):
            diff = np.abs(v[d:] - v[:-d])
            c_local = max(c_local, float(diff.max()) * math.log(1.0 / (d * h)))
    else:
        for di in range(0, reach + 1):
            for dj in range(-reach, reach + 1):
                if (di == 0 and dj <= 0) or math.hypot(di, dj) * h > 0.5:
                    continue
                a = v[di:, max(dj, 0):N + min(dj, 0)]
                b = v[:N - di, max(-dj, 0):N - max(dj, 0)]
                dist = math.hypot(di, dj) * h
                c_local = max(c_local, float(np.abs(a - b).max()) * math.log(1.0 / dist))
    r = np.linalg.norm(grid.points(), axis=-1).reshape(grid.shape)
    c_inf = float(np.max(np.abs(v - q_inf) * np.log(math.e + r)))
    return c_local, c_inf
