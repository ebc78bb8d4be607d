"""Closed-form test functions.

Every suite draws its inputs from this catalog so that a config file fully
determines a run.  Scalar ``c`` parameters act as a center ``(c, ..., c)``.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Mapping, Sequence

import numpy as np

from .errors import ConfigurationError

__all__ = ["Expression", "CATALOG", "expression", "catalog_ids"]


def _radius(x, c):
    return np.sqrt(np.sum((x - c) ** 2, axis=-1))


def _bump_profile(x, c, r):
    rho2 = np.sum((x - c) ** 2, axis=-1) / r**2
    out = np.zeros(rho2.shape)
    inside = rho2 < 1.0
    out[inside] = np.exp(1.0 - 1.0 / (1.0 - rho2[inside]))
    return out


def _constant(x, c):
    return np.full(x.shape[0], float(c))


def _indicator(x, a, b):
    return np.all((x > a) & (x < b), axis=-1).astype(float)


def _gaussian(x, mu, sigma, amp):
    return amp * np.exp(-np.sum((x - mu) ** 2, axis=-1) / sigma**2)


def _bump(x, c, r):
    return _bump_profile(x, c, r)


def _oscillatory(x, freq, c, r):
    return np.sin(2.0 * np.pi * freq * (x[:, 0] - c)) * _bump_profile(x, c, r)


def _sign(x, c):
    return np.sign(x[:, 0] - c)


def _log_abs(x, c):
    with np.errstate(divide="ignore"):
        return np.log(_radius(x, c))


def _truncated_power(x, beta, c, r):
    rho = _radius(x, c)
    out = np.zeros(rho.shape)
    inside = rho < r
    with np.errstate(divide="ignore"):
        out[inside] = rho[inside] ** (-beta)
    return out


def _power_weight(x, a, c):
    with np.errstate(divide="ignore"):
        return _radius(x, c) ** a


@dataclass(frozen=True)
class _Entry:
    func: Callable
    defaults: Mapping[str, float]
    check: Callable[[dict], str | None]


def _ok(_):
    return None


CATALOG: dict[str, _Entry] = {
    "constant": _Entry(_constant, {"c": 1.0}, _ok),
    "indicator": _Entry(
        _indicator, {"a": 0.0, "b": 1.0},
        lambda p: None if p["a"] < p["b"] else "indicator needs a < b"),
    "gaussian": _Entry(
        _gaussian, {"mu": 0.0, "sigma": 1.0, "amp": 1.0},
        lambda p: None if p["sigma"] > 0 else "gaussian needs sigma > 0"),
    "bump": _Entry(
        _bump, {"c": 0.0, "r": 1.0},
        lambda p: None if p["r"] > 0 else "bump needs r > 0"),
    "oscillatory": _Entry(
        _oscillatory, {"freq": 2.0, "c": 0.0, "r": 1.0},
        lambda p: None if p["r"] > 0 and p["freq"] > 0
        else "oscillatory needs r > 0 and freq > 0"),
    "sign": _Entry(_sign, {"c": 0.0}, _ok),
    "log_abs": _Entry(_log_abs, {"c": 0.0}, _ok),
    "truncated_power": _Entry(
        _truncated_power, {"beta": 0.5, "c": 0.0, "r": 1.0},
        lambda p: None if p["beta"] >= 0 and p["r"] > 0
        else "truncated_power needs beta >= 0 and r > 0"),
    "power_weight": _Entry(_power_weight, {"a": 0.0, "c": 0.0}, _ok),
}


def catalog_ids() -> list[str]:
    return sorted(CATALOG)


@dataclass(frozen=True)
class Expression:
    """A catalog entry with resolved parameters; callable on ``(K, n)`` points."""

    id: str
    params: tuple[tuple[str, float], ...]
    scale: float = 1.0

    @property
    def kwargs(self) -> dict[str, float]:
        return dict(self.params)

    def __call__(self, points: np.ndarray) -> np.ndarray:
        pts = np.asarray(points, dtype=float)
        if pts.ndim == 1:
            pts = pts[:, None]
        values = CATALOG[self.id].func(pts, **self.kwargs)
        return values if self.scale == 1.0 else self.scale * values

    def scaled(self, factor: float) -> "Expression":
        return Expression(self.id, self.params, self.scale * float(factor))

    def check_dimension(self, n: int) -> None:
        p = self.kwargs
        if self.id == "truncated_power" and not p["beta"] < n:
            raise ConfigurationError(
                f"truncated_power needs beta < n = {n} for local integrability")
        if self.id == "power_weight" and not p["a"] > -n:
            raise ConfigurationError(
                f"power_weight needs a > -n = {-n} for local integrability")

    def to_dict(self) -> dict:
        out = {"id": self.id, "params": self.kwargs}
        if self.scale != 1.0:
            out["scale"] = self.scale
        return out


def expression(expr_id: str, params: Mapping[str, float] | Sequence[float] | None = None
               ) -> Expression:
    """Resolve ``expr_id`` and its parameters against the catalog.

    ``params`` may be a mapping or a positional sequence in catalog order;
    missing entries take their defaults.
    """
    if expr_id not in CATALOG:
        raise ConfigurationError(
            f"unknown expression id {expr_id!r}; known: {', '.join(catalog_ids())}")
    entry = CATALOG[expr_id]
    resolved = dict(entry.defaults)
    if params is None:
        params = {}
    if isinstance(params, Mapping):
        unknown = set(params) - set(entry.defaults)
        if unknown:
            raise ConfigurationError(
                f"{expr_id}: unknown parameter(s) {sorted(unknown)}")
        resolved.update({k: float(v) for k, v in params.items()})
    else:
        params = list(params)
        if len(params) > len(resolved):
            raise ConfigurationError(f"{expr_id}: too many parameters")
        for name, value in zip(entry.defaults, params):
            resolved[name] = float(value)
    if not all(np.isfinite(v) for v in resolved.values()):
        raise ConfigurationError(f"{expr_id}: parameters must be finite")
    problem = entry.check(resolved)
    if problem:
        raise ConfigurationError(problem)
    return Expression(expr_id, tuple(resolved.items()))
