"""Maximal operators as suprema over a finite cube family.

At each node the supremum runs over the family cubes that contain the node.
Cube values are computed per level from strided window views, then spread
to the nodes with a separable sliding maximum.
"""

from __future__ import annotations

from typing import Callable, Sequence

import numpy as np
from numpy.lib.stride_tricks import sliding_window_view

from .errors import ConfigurationError
from .grid import CubeFamily, FamilyLevel, SampledFunction

__all__ = [
    "cube_means",
    "cube_oscillations",
    "spread_max",
    "family_sup",
    "hl_maximal_delta",
    "sharp_maximal",
    "sharp_maximal_delta",
    "frac_maximal_r",
    "multilinear_frac_maximal_r",
]


def _window_axes(n: int) -> tuple[int, ...]:
    return tuple(range(n, 2 * n))


def cube_means(F: CubeFamily, values: np.ndarray, level: FamilyLevel) -> np.ndarray:
    """Average of ``values`` over every cube of ``level`` (corner-indexed)."""
    return F.windows(values, level).mean(axis=_window_axes(F.grid.n))


def cube_oscillations(F: CubeFamily, values: np.ndarray, level: FamilyLevel) -> np.ndarray:
    """Mean oscillation ``avg_Q |g - g_Q|`` for every cube of ``level``."""
    n = F.grid.n
    w = F.windows(values, level)
    mean = w.mean(axis=_window_axes(n), keepdims=True)
    return np.abs(w - mean).mean(axis=_window_axes(n))


def spread_max(F: CubeFamily, cube_values: np.ndarray, level: FamilyLevel) -> np.ndarray:
    """Node array whose entry is the max of ``cube_values`` over cubes containing the node.

    Nodes covered by no cube of the level get ``-inf``.
    """
    N, n = F.grid.N, F.grid.n
    c = cube_values.shape[0]
    A = np.full((N,) * n, -np.inf)
    A[(slice(0, level.stride * (c - 1) + 1, level.stride),) * n] = cube_values
    for axis in range(n):
        pad = [(0, 0)] * n
        pad[axis] = (level.side - 1, 0)
        padded = np.pad(A, pad, constant_values=-np.inf)
        A = sliding_window_view(padded, level.side, axis=axis).max(axis=-1)
    return A


def family_sup(F: CubeFamily, cube_value: Callable[[FamilyLevel], np.ndarray]) -> np.ndarray:
    """``sup`` over family cubes containing each node of ``cube_value(level)``."""
    out = np.full(F.grid.shape, -np.inf)
    for lv in F.levels:
        np.maximum(out, spread_max(F, cube_value(lv), lv), out=out)
    return out


def _check_family(F: CubeFamily, fs: Sequence[SampledFunction]) -> None:
    for f in fs:
        if f.grid != F.grid:
            raise ConfigurationError("cube family and function live on different grids")


def hl_maximal_delta(f: SampledFunction, delta: float, F: CubeFamily) -> SampledFunction:
    """``M_delta f = [M(|f|^delta)]^(1/delta)``; ``delta = 1`` is the usual maximal function."""
    if not delta > 0:
        raise ConfigurationError(f"delta must be positive, got {delta}")
    _check_family(F, [f])
    g = np.abs(f.values) ** delta
    sup = family_sup(F, lambda lv: cube_means(F, g, lv))
    return SampledFunction(F.grid, sup ** (1.0 / delta))


def sharp_maximal(f: SampledFunction, F: CubeFamily) -> SampledFunction:
    """``M# f = sup_Q avg_Q |f - f_Q|`` on ``f`` itself (signs kept)."""
    _check_family(F, [f])
    sup = family_sup(F, lambda lv: cube_oscillations(F, f.values, lv))
    return SampledFunction(F.grid, sup)


def sharp_maximal_delta(f: SampledFunction, delta: float, F: CubeFamily) -> SampledFunction:
    """``M#_delta f = [M#(|f|^delta)]^(1/delta)`` with oscillation about the cube mean.

    The oscillation is taken of ``|f|^delta``, so ``delta = 1`` gives ``M#(|f|)``,
    not ``M# f``; see :func:`sharp_maximal`.
    """
    if not delta > 0:
        raise ConfigurationError(f"delta must be positive, got {delta}")
    _check_family(F, [f])
    g = np.abs(f.values) ** delta
    sup = family_sup(F, lambda lv: cube_oscillations(F, g, lv))
    return SampledFunction(F.grid, sup ** (1.0 / delta))


def _side_factor(F: CubeFamily, level: FamilyLevel, alpha: float) -> float:
    # |Q|^(alpha/n) = l(Q)^alpha
    return (level.side * F.grid.h) ** alpha


def frac_maximal_r(f: SampledFunction, alpha: float, r: float, F: CubeFamily) -> SampledFunction:
    """``sup_Q |Q|^(alpha/n) (avg_Q |f|^r)^(1/r)``."""
    n = F.grid.n
    if not 0 <= alpha < n:
        raise ConfigurationError(f"fractional maximal order needs 0 <= alpha < n = {n}, got {alpha}")
    if not r >= 1:
        raise ConfigurationError(f"power r must be >= 1, got {r}")
    _check_family(F, [f])
    g = np.abs(f.values) ** r
    sup = family_sup(F, lambda lv: _side_factor(F, lv, alpha) * cube_means(F, g, lv) ** (1.0 / r))
    return SampledFunction(F.grid, sup)


def multilinear_frac_maximal_r(fs: Sequence[SampledFunction], alpha: float, r: float,
                               F: CubeFamily) -> SampledFunction:
    """``sup_Q |Q|^(alpha/n) prod_j (avg_Q |f_j|^r)^(1/r)``."""
    if not fs:
        raise ConfigurationError("need at least one function")
    n, m = F.grid.n, len(fs)
    if not 0 <= alpha < m * n:
        raise ConfigurationError(f"multilinear order needs 0 <= alpha < mn = {m * n}, got {alpha}")
    if not r >= 1:
        raise ConfigurationError(f"power r must be >= 1, got {r}")
    _check_family(F, fs)
    gs = [np.abs(f.values) ** r for f in fs]

    def value(lv):
        prod = _side_factor(F, lv, alpha)
        for g in gs:
            prod = prod * cube_means(F, g, lv) ** (1.0 / r)
        return prod

    return SampledFunction(F.grid, family_sup(F, value))
