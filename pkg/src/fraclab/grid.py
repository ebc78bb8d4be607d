"""Uniform midpoint grids, sampled functions, cube families and quadrature."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Mapping, Sequence

import numpy as np

from .corpus import Expression, expression
from .errors import ConfigurationError

__all__ = [
    "GridDomain",
    "SampledFunction",
    "Cube",
    "FamilyLevel",
    "CubeFamily",
    "make_uniform_grid",
    "sample",
    "sample_expression",
    "cube_family",
    "lattice_family",
    "integrate_region",
]


def _is_power_of_two(k: int) -> bool:
    return k > 0 and (k & (k - 1)) == 0


@dataclass(frozen=True)
class GridDomain:
    """Box ``corner + [0, L]^n`` cut into ``N^n`` cells, one node per cell center."""

    n: int
    corner: tuple[float, ...]
    L: float
    N: int

    def __post_init__(self):
        if self.n not in (1, 2):
            raise ConfigurationError(f"dimension must be 1 or 2, got {self.n}")
        corner = np.atleast_1d(np.asarray(self.corner, dtype=float))
        if corner.shape == (1,) and self.n == 2:
            corner = np.repeat(corner, 2)
        if corner.shape != (self.n,):
            raise ConfigurationError(f"corner must have {self.n} coordinate(s)")
        object.__setattr__(self, "corner", tuple(float(c) for c in corner))
        if isinstance(self.N, bool) or int(self.N) != self.N:
            raise ConfigurationError(f"N must be an integer, got {self.N!r}")
        object.__setattr__(self, "N", int(self.N))
        if self.N < 8 or not _is_power_of_two(self.N):
            raise ConfigurationError(f"N must be a power of two >= 8, got {self.N}")
        if not (np.isfinite(self.L) and self.L > 0):
            raise ConfigurationError(f"box side L must be positive, got {self.L}")
        object.__setattr__(self, "L", float(self.L))

    @property
    def h(self) -> float:
        return self.L / self.N

    @property
    def shape(self) -> tuple[int, ...]:
        return (self.N,) * self.n

    @property
    def size(self) -> int:
        return self.N**self.n

    @property
    def cell_volume(self) -> float:
        return self.h**self.n

    @property
    def lower(self) -> np.ndarray:
        return np.array(self.corner)

    @property
    def upper(self) -> np.ndarray:
        return np.array(self.corner) + self.L

    def axis(self, k: int = 0) -> np.ndarray:
        return self.corner[k] + (np.arange(self.N) + 0.5) * self.h

    def points(self) -> np.ndarray:
        """Node coordinates, shape ``(N**n, n)``, lexicographic node order."""
        axes = np.meshgrid(*[self.axis(k) for k in range(self.n)], indexing="ij")
        return np.stack([a.ravel() for a in axes], axis=-1)

    def shifted(self, fraction: float = 0.5) -> "GridDomain":
        """Same box size and count, corner moved by ``fraction * h`` per axis.

        With ``fraction = 0.5`` the nodes sit on the cell faces of ``self``.
        """
        return GridDomain(self.n, tuple(c + fraction * self.h for c in self.corner),
                          self.L, self.N)

    def refined(self, factor: int = 2) -> "GridDomain":
        return GridDomain(self.n, self.corner, self.L, self.N * factor)

    def to_dict(self) -> dict:
        return {"n": self.n, "corner": list(self.corner), "L": self.L, "N": self.N}


def make_uniform_grid(n: int, corner: float | Sequence[float], L: float, N: int) -> GridDomain:
    return GridDomain(n, tuple(np.atleast_1d(corner).tolist()), L, N)


class SampledFunction:
    """Real values at the nodes of a grid, zero outside the box.

    ``expr`` keeps the closed form when the samples came from the catalog;
    operators that need values off the grid (commutator symbols, output
    grids) rely on it.
    """

    __slots__ = ("grid", "values", "expr")

    def __init__(self, grid: GridDomain, values, expr: Expression | None = None):
        v = np.array(values, dtype=float).reshape(grid.shape)
        if not np.all(np.isfinite(v)):
            raise ConfigurationError(
                f"sampled values must be finite"
                + (f" ({expr.id} is singular at a grid node)" if expr else ""))
        v.setflags(write=False)
        self.grid = grid
        self.values = v
        self.expr = expr

    def __repr__(self):
        label = self.expr.id if self.expr else "samples"
        return f"SampledFunction({label}, N={self.grid.N}, n={self.grid.n})"

    @property
    def flat(self) -> np.ndarray:
        return self.values.ravel()

    def evaluate(self, points: np.ndarray) -> np.ndarray:
        if self.expr is None:
            raise ConfigurationError(
                "function has no closed form; it cannot be evaluated off its grid")
        return self.expr(points)

    def resample(self, grid: GridDomain) -> "SampledFunction":
        if grid == self.grid:
            return self
        return SampledFunction(grid, self.evaluate(grid.points()), self.expr)

    def with_values(self, values) -> "SampledFunction":
        return SampledFunction(self.grid, values)

    def scaled(self, factor: float) -> "SampledFunction":
        expr = self.expr.scaled(factor) if self.expr is not None else None
        return SampledFunction(self.grid, factor * self.values, expr)

    def is_zero(self) -> bool:
        return not np.any(self.values)


def sample(expr: Expression, grid: GridDomain) -> SampledFunction:
    expr.check_dimension(grid.n)
    return SampledFunction(grid, expr(grid.points()), expr)


def sample_expression(expr_id: str, params: Mapping[str, float] | Sequence[float] | None,
                      grid: GridDomain) -> SampledFunction:
    return sample(expression(expr_id, params), grid)


@dataclass(frozen=True)
class Cube:
    center: tuple[float, ...]
    side: float

    def __post_init__(self):
        if not self.side > 0:
            raise ConfigurationError(f"cube side must be positive, got {self.side}")
        object.__setattr__(self, "center", tuple(float(c) for c in np.atleast_1d(self.center)))

    @property
    def lower(self) -> np.ndarray:
        return np.array(self.center) - self.side / 2

    @property
    def upper(self) -> np.ndarray:
        return np.array(self.center) + self.side / 2

    def contains(self, point) -> bool:
        p = np.atleast_1d(point)
        return bool(np.all((p >= self.lower) & (p <= self.upper)))


@dataclass(frozen=True)
class FamilyLevel:
    """All cubes of ``side`` cells whose lower cell index is a multiple of ``stride``."""

    side: int
    stride: int


@dataclass(frozen=True)
class CubeFamily:
    """Finite, cell-aligned stand-in for "all cubes" inside a grid box."""

    grid: GridDomain
    levels: tuple[FamilyLevel, ...]
    kind: str = "dyadic"
    J: int | None = None

    def corners_per_axis(self, level: FamilyLevel) -> int:
        return (self.grid.N - level.side) // level.stride + 1

    @property
    def count(self) -> int:
        return sum(self.corners_per_axis(lv) ** self.grid.n for lv in self.levels)

    def restricted(self, min_nodes: int) -> "CubeFamily":
        """Drop levels whose cubes hold fewer than ``min_nodes`` grid nodes."""
        keep = tuple(lv for lv in self.levels if lv.side**self.grid.n >= min_nodes)
        if not keep:
            raise ConfigurationError(f"no cube in the family holds {min_nodes} nodes")
        return CubeFamily(self.grid, keep, self.kind, self.J)

    def cubes(self) -> list[Cube]:
        g = self.grid
        out = []
        for lv in self.levels:
            starts = np.arange(self.corners_per_axis(lv)) * lv.stride
            side = lv.side * g.h
            for idx in np.ndindex(*(len(starts),) * g.n):
                center = [g.corner[k] + (starts[i] + lv.side / 2) * g.h
                          for k, i in enumerate(idx)]
                out.append(Cube(tuple(center), side))
        return out

    def windows(self, values: np.ndarray, level: FamilyLevel) -> np.ndarray:
        """Read-only view of ``values`` cut into the cubes of ``level``.

        Shape ``(c,) * n + (side,) * n`` with ``c`` corners per axis.
        """
        view = np.lib.stride_tricks.sliding_window_view(values, (level.side,) * self.grid.n)
        return view[(slice(None, None, level.stride),) * self.grid.n]

    def describe(self) -> dict:
        return {"kind": self.kind, "J": self.J, "count": self.count,
                "sides": [lv.side * self.grid.h for lv in self.levels]}


def cube_family(grid: GridDomain, levels: int) -> CubeFamily:
    """Dyadic sides ``L 2^-j`` (``j = 0..levels``), centers on a half-side lattice."""
    if isinstance(levels, bool) or int(levels) != levels or levels < 1:
        raise ConfigurationError(f"cube family needs levels J >= 1, got {levels}")
    levels = int(levels)
    smallest = grid.N >> levels
    if smallest < 2:
        raise ConfigurationError(
            f"J={levels} too deep: smallest side L*2^-J = {grid.L / 2**levels:g} "
            f"is below 2h = {2 * grid.h:g}")
    lv = tuple(FamilyLevel(grid.N >> j, max((grid.N >> j) // 2, 1))
               for j in range(levels + 1))
    return CubeFamily(grid, lv, "dyadic", levels)


def lattice_family(grid: GridDomain, min_side: int = 1, max_side: int | None = None) -> CubeFamily:
    """Every cell-aligned cube with side between ``min_side`` and ``max_side`` cells."""
    max_side = grid.N if max_side is None else max_side
    if not 1 <= min_side <= max_side <= grid.N:
        raise ConfigurationError("lattice family needs 1 <= min_side <= max_side <= N")
    lv = tuple(FamilyLevel(s, 1) for s in range(min_side, max_side + 1))
    return CubeFamily(grid, lv, "lattice", None)


def _overlap_weights(grid: GridDomain, lo: np.ndarray, hi: np.ndarray) -> np.ndarray:
    weights = None
    h = grid.h
    for k in range(grid.n):
        edges = grid.corner[k] + np.arange(grid.N) * h
        w = np.clip(np.minimum(edges + h, hi[k]) - np.maximum(edges, lo[k]), 0.0, h) / h
        weights = w if weights is None else np.multiply.outer(weights, w)
    return weights


def integrate_region(f: SampledFunction, Q: Cube | None = None) -> float:
    """Composite midpoint rule over ``Q`` (whole box when ``None``).

    Cells cut by the boundary of ``Q`` count with their overlap fraction.
    """
    g = f.grid
    if Q is None:
        return float(np.sum(f.values) * g.cell_volume)
    w = _overlap_weights(g, Q.lower, Q.upper)
    return float(np.sum(f.values * w) * g.cell_volume)
