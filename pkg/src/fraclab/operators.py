"""Direct quadrature of multilinear fractional integrals, the Riesz potential
and multilinear commutators."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .errors import ConfigurationError, CostLimitError, SingularEvaluationError
from .grid import GridDomain, SampledFunction
from .kernels import KernelSpec, kernel_from_distances
from .parallel import ordered_map

__all__ = [
    "OperatorParams",
    "DEFAULT_MAX_COST",
    "quadrature_cost",
    "apply_fractional_integral",
    "apply_riesz_potential",
    "commutator_terms",
    "apply_commutator",
]

# kernel evaluations allowed per operator call
DEFAULT_MAX_COST = 4 * 10**8
# kernel values held in memory per chunk of output nodes
_CHUNK_ELEMENTS = 1 << 21


@dataclass(frozen=True)
class OperatorParams:
    """Exponents of the pointwise estimates: ``delta`` for the sharp maximal
    side, ``epsilon`` and ``t`` for the commutator version."""

    spec: KernelSpec
    delta: float
    epsilon: float | None = None
    t: float | None = None

    def __post_init__(self):
        bound = min(1.0, self.spec.weak_target_exponent)
        if not 0 < self.delta < bound:
            raise ConfigurationError(
                f"need 0 < delta < min(1, sn/(n - s alpha)) = {bound:g}, got delta = {self.delta}")
        if self.epsilon is not None and not self.delta < self.epsilon:
            raise ConfigurationError(f"need delta < epsilon, got {self.delta} >= {self.epsilon}")
        if self.t is not None:
            if not self.t > self.spec.p0_conj:
                raise ConfigurationError(
                    f"need t > p0' = {self.spec.p0_conj:g}, got t = {self.t}")
            if not self.spec.alpha * self.t < self.spec.mn:
                raise ConfigurationError(f"need alpha*t < mn, got {self.spec.alpha * self.t:g}")

    @property
    def s(self) -> float:
        return self.spec.s_harmonic

    @property
    def s_vector(self) -> tuple[float, ...]:
        return self.spec.s

    def to_dict(self) -> dict:
        return {"delta": self.delta, "epsilon": self.epsilon, "t": self.t}


def _check_inputs(spec: KernelSpec, fs: Sequence[SampledFunction]) -> GridDomain:
    if len(fs) != spec.m:
        raise ConfigurationError(f"kernel has arity {spec.m} but {len(fs)} function(s) given")
    grid = fs[0].grid
    if any(f.grid != grid for f in fs):
        raise ConfigurationError("all input functions must share one grid")
    if grid.n != spec.n:
        raise ConfigurationError(f"kernel acts on R^{spec.n} but the grid has n = {grid.n}")
    return grid


def quadrature_cost(spec: KernelSpec, fs: Sequence[SampledFunction], out_grid: GridDomain) -> int:
    """Kernel evaluations needed: output nodes times the product of support sizes."""
    _check_inputs(spec, fs)
    cost = out_grid.size
    for f in fs:
        cost *= int(np.count_nonzero(f.values))
    return cost


def apply_fractional_integral(spec: KernelSpec, fs: Sequence[SampledFunction],
                              out_grid: GridDomain, max_cost: int = DEFAULT_MAX_COST
                              ) -> SampledFunction:
    """Midpoint quadrature of ``int K(x, y_1..y_m) prod f_j(y_j) dy`` at every
    node of ``out_grid``.

    Only nodes where ``f_j`` is nonzero contribute.  Use an output grid
    offset from the input nodes (``grid.shifted()``) so the diagonal
    ``x = y_1 = ... = y_m`` is never sampled; hitting it raises
    :class:`SingularEvaluationError`.
    """
    grid = _check_inputs(spec, fs)
    if out_grid.n != grid.n:
        raise ConfigurationError("output grid dimension differs from the input grid")
    cost = quadrature_cost(spec, fs, out_grid)
    if cost > max_cost:
        raise CostLimitError(
            f"direct quadrature needs {cost:.3g} kernel evaluations "
            f"(output nodes x prod of support sizes, mn = {spec.mn}); limit is {max_cost:.3g}")
    out = np.zeros(out_grid.size)
    if cost == 0:
        return SampledFunction(out_grid, out.reshape(out_grid.shape))

    pts = grid.points()
    supports, weights = [], []
    for f in fs:
        idx = np.flatnonzero(f.flat)
        supports.append(pts[idx])
        weights.append(f.flat[idx] * grid.cell_volume)
    sizes = [len(w) for w in weights]
    X = out_grid.points()
    xnorm = np.linalg.norm(X, axis=-1)
    m = spec.m
    rows = max(1, _CHUNK_ELEMENTS // math.prod(sizes))
    starts = list(range(0, len(X), rows))

    def run(start):
        xs = X[start:start + rows]
        c = len(xs)
        S = 0.0
        for j, Y in enumerate(supports):
            D = np.linalg.norm(xs[:, None, :] - Y[None, :, :], axis=-1)
            shape = [c] + [1] * m
            shape[j + 1] = sizes[j]
            S = S + D.reshape(shape)
        K = kernel_from_distances(spec, xnorm[start:start + c].reshape([c] + [1] * m), S)
        if not np.all(np.isfinite(K)):
            raise SingularEvaluationError(
                "kernel evaluated on its diagonal; offset the output grid by h/2")
        for w in reversed(weights):
            K = K @ w
        return K

    for start, block in zip(starts, ordered_map(run, starts)):
        out[start:start + len(block)] = block
    return SampledFunction(out_grid, out.reshape(out_grid.shape))


def apply_riesz_potential(alpha: float, f: SampledFunction, out_grid: GridDomain,
                          max_cost: int = DEFAULT_MAX_COST) -> SampledFunction:
    """``I_alpha f(x) = gamma(alpha)^-1 int f(y) |x - y|^(alpha - n) dy``."""
    n = f.grid.n
    if not 0 < alpha < n:
        raise ConfigurationError(f"Riesz potential needs 0 < alpha < n = {n}, got {alpha}")
    # any p0 with alpha p0' < n is admissible; the kernel value does not depend on it
    p0_conj = (n / alpha + 1.0) / 2.0
    spec = KernelSpec(1, n, alpha, kind="riesz", p0=p0_conj / (p0_conj - 1.0))
    return apply_fractional_integral(spec, [f], out_grid, max_cost)


def commutator_terms(spec: KernelSpec, bs: Sequence[SampledFunction],
                     fs: Sequence[SampledFunction], out_grid: GridDomain,
                     max_cost: int = DEFAULT_MAX_COST,
                     base: SampledFunction | None = None) -> list[SampledFunction]:
    """Slot terms ``b_i(x) T(f) - T(f_1, .., b_i f_i, .., f_m)``, one per slot.

    ``base`` may pass a precomputed ``T(f)`` on ``out_grid``.
    """
    grid = _check_inputs(spec, fs)
    if len(bs) != spec.m:
        raise ConfigurationError(f"commutator needs {spec.m} symbols, got {len(bs)}")
    for i, b in enumerate(bs):
        if b.grid != grid:
            raise ConfigurationError(f"symbol b_{i + 1} is not sampled on the input grid")
        if b.expr is None:
            raise ConfigurationError(
                f"symbol b_{i + 1} has no closed form; it must be evaluable at output nodes")
    T0 = base if base is not None else apply_fractional_integral(spec, fs, out_grid, max_cost)
    out_pts = out_grid.points()
    terms = []
    for i, b in enumerate(bs):
        b_out = b.evaluate(out_pts).reshape(out_grid.shape)
        if not np.all(np.isfinite(b_out)):
            raise ConfigurationError(f"symbol b_{i + 1} is singular at an output node")
        swapped = list(fs)
        swapped[i] = fs[i].with_values(b.values * fs[i].values)
        Ti = apply_fractional_integral(spec, swapped, out_grid, max_cost)
        terms.append(SampledFunction(out_grid, b_out * T0.values - Ti.values))
    return terms


def apply_commutator(spec: KernelSpec, bs: Sequence[SampledFunction],
                     fs: Sequence[SampledFunction], out_grid: GridDomain,
                     max_cost: int = DEFAULT_MAX_COST,
                     base: SampledFunction | None = None) -> SampledFunction:
    """``sum_i [b_i(x) T(f)(x) - T(f_1, .., b_i f_i, .., f_m)(x)]``."""
    terms = commutator_terms(spec, bs, fs, out_grid, max_cost, base)
    total = np.zeros(out_grid.shape)
    for t in terms:
        total = total + t.values
    return SampledFunction(out_grid, total)
