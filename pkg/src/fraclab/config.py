"""JSON run configuration (schema version 1) and its semantic checks."""

from __future__ import annotations

import json
from pathlib import Path
from typing import Literal

from pydantic import BaseModel, ConfigDict, Field, ValidationError, field_validator

from .corpus import Expression, expression
from .errors import ConfigurationError
from .grid import CubeFamily, GridDomain, cube_family, lattice_family
from .kernels import KernelSpec
from .operators import OperatorParams
from .spaces import (ExponentFunction, ExponentVector, asymptotic_exponent, constant_exponent,
                     piecewise_exponent, smoothstep_exponent)

__all__ = [
    "RunConfig",
    "load_config",
    "config_from_dict",
    "SUITE_IDS",
]

SUITE_IDS = ("sharp_estimate", "weighted_bounds", "maximal_bounds", "fefferman_stein",
             "variable_exponent", "kolmogorov", "bmo_cubes")


class _Model(BaseModel):
    model_config = ConfigDict(extra="forbid", frozen=True)


class ExprModel(_Model):
    id: str
    params: dict[str, float] = Field(default_factory=dict)

    def build(self) -> Expression:
        return expression(self.id, self.params)


class DomainModel(_Model):
    n: int = 1
    corner: list[float]
    L: float
    N: int
    J: int = 4

    def grid(self, N: int | None = None) -> GridDomain:
        return GridDomain(self.n, tuple(self.corner), self.L, self.N if N is None else N)


class KernelModel(_Model):
    kind: Literal["standard", "holder_modulated", "riesz"] = "standard"
    m: int
    alpha: float
    A: float = 1.0
    p0: float = 2.0
    gamma: float = 0.5
    modulation_scale: float = 16.0
    s: list[float] | None = None

    def build(self, n: int) -> KernelSpec:
        return KernelSpec(self.m, n, self.alpha, self.A, self.p0, self.kind, self.gamma,
                          self.modulation_scale, None if self.s is None else tuple(self.s))


class ParamsModel(_Model):
    delta: float | None = None
    epsilon: float | None = None
    t: float | None = None


class ExponentModel(_Model):
    kind: Literal["constant", "asymptotic", "smoothstep", "piecewise"]
    p: float | None = None
    p_inf: float | None = None
    amp: float | None = None
    p1: float | None = None
    p2: float | None = None
    r0: float = 0.0
    width: float = 1.0
    breaks: list[float] | None = None
    values: list[float] | None = None

    def build(self) -> ExponentFunction:
        need = {"constant": ("p",), "asymptotic": ("p_inf", "amp"),
                "smoothstep": ("p1", "p2"), "piecewise": ("breaks", "values")}[self.kind]
        missing = [k for k in need if getattr(self, k) is None]
        if missing:
            raise ConfigurationError(f"{self.kind} exponent needs {', '.join(missing)}")
        if self.kind == "constant":
            return constant_exponent(self.p)
        if self.kind == "asymptotic":
            return asymptotic_exponent(self.p_inf, self.amp)
        if self.kind == "smoothstep":
            return smoothstep_exponent(self.p1, self.p2, self.r0, self.width)
        return piecewise_exponent(self.breaks, self.values)


class ExponentSetModel(_Model):
    P: list[float] | None = None
    variable: list[ExponentModel] | None = None
    alpha_split: list[float] | None = None


class SuiteModel(_Model):
    id: Literal[SUITE_IDS]
    name: str | None = None
    mode: Literal["strong", "weak"] = "strong"
    commutator: bool = False
    family: Literal["dyadic", "lattice"] = "dyadic"
    functions: str | None = None
    weights: str | None = None
    exponents: str | None = None
    alpha: float | None = None
    delta: float | None = None
    p: float | None = None
    u: float | None = None
    k_max: int | None = None
    weight: ExprModel | None = None

    @field_validator("name")
    @classmethod
    def _plain_name(cls, v):
        if v is not None and (not v or any(c in v for c in "/\\") or v.startswith(".")):
            raise ValueError("suite name must be a plain file stem")
        return v


class OutputModel(_Model):
    dir: str = "fraclab-out"
    formats: list[Literal["json", "csv"]] = Field(default_factory=lambda: ["json", "csv"])


class CertifyModel(_Model):
    K_max: int = 6
    x: list[float] = Field(default_factory=lambda: [0.0])
    xp: list[float] = Field(default_factory=lambda: [0.01])
    nodes: int = 128
    sample_count: int = 1000


class OperatorEvalModel(_Model):
    tuple_index: int = 0
    commutator: bool = False
    symbols_index: int = 0


class NormsEvalModel(_Model):
    function: ExprModel
    lp: list[float] = Field(default_factory=list)
    weak: list[float] = Field(default_factory=list)
    bmo: bool = False
    ap: list[float] = Field(default_factory=list)
    luxemburg: list[ExponentModel] = Field(default_factory=list)


class MaximalEvalModel(_Model):
    function: ExprModel
    operator: Literal["hl", "sharp", "sharp_delta", "fractional"] = "hl"
    delta: float = 1.0
    alpha: float = 0.0
    r: float = 1.0
    family: Literal["dyadic", "lattice"] = "dyadic"


class EvalModel(_Model):
    operator: OperatorEvalModel | None = None
    norms: NormsEvalModel | None = None
    maximal: MaximalEvalModel | None = None


class RunConfig(_Model):
    """Top-level config.  Unknown keys are rejected at every level."""

    schema_version: Literal[1] = Field(alias="schema")
    seed: int = 0
    domain: DomainModel
    kernel: KernelModel | None = None
    corpus: list[list[ExprModel]] = Field(default_factory=list)
    symbols: list[list[ExprModel]] = Field(default_factory=list)
    functions: dict[str, list[ExprModel]] = Field(default_factory=dict)
    weights: dict[str, list[ExprModel]] = Field(default_factory=dict)
    exponents: dict[str, ExponentSetModel] = Field(default_factory=dict)
    params: ParamsModel = Field(default_factory=ParamsModel)
    suites: list[SuiteModel] = Field(default_factory=list)
    output: OutputModel = Field(default_factory=OutputModel)
    certify: CertifyModel | None = None
    eval: EvalModel | None = None

    model_config = ConfigDict(extra="forbid", frozen=True, populate_by_name=True)

    def to_dict(self) -> dict:
        return self.model_dump(mode="json", by_alias=True)

    # resolved objects; every accessor raises ConfigurationError with a field path

    def grid(self, N: int | None = None) -> GridDomain:
        return _at("domain", lambda: self.domain.grid(N))

    def family(self, grid: GridDomain, kind: str = "dyadic") -> CubeFamily:
        if kind == "lattice":
            return _at("domain", lambda: lattice_family(grid))
        return _at("domain.J", lambda: cube_family(grid, self.domain.J))

    def kernel_spec(self) -> KernelSpec:
        if self.kernel is None:
            raise ConfigurationError("a kernel block is required", path="kernel")
        return _at("kernel", lambda: self.kernel.build(self.domain.n))

    def operator_params(self) -> OperatorParams:
        spec = self.kernel_spec()
        p = self.params
        if p.delta is None:
            raise ConfigurationError("delta is required", path="params.delta")
        return _at("params", lambda: OperatorParams(spec, p.delta, p.epsilon, p.t))

    def corpus_tuples(self) -> list[tuple[Expression, ...]]:
        return [tuple(_at(f"corpus[{i}][{j}]", e.build) for j, e in enumerate(tup))
                for i, tup in enumerate(self.corpus)]

    def symbol_vectors(self) -> list[tuple[Expression, ...]]:
        return [tuple(_at(f"symbols[{i}][{j}]", e.build) for j, e in enumerate(tup))
                for i, tup in enumerate(self.symbols)]

    def function_list(self, key: str | None, where: str) -> list[Expression]:
        if key is None or key not in self.functions:
            raise ConfigurationError(f"unknown or missing function list {key!r}", path=where)
        return [_at(f"functions.{key}[{i}]", e.build) for i, e in enumerate(self.functions[key])]

    def weight_vector(self, key: str | None, where: str) -> list[Expression] | None:
        if key is None:
            return None
        if key not in self.weights:
            raise ConfigurationError(f"unknown weight set {key!r}", path=where)
        return [_at(f"weights.{key}[{j}]", e.build) for j, e in enumerate(self.weights[key])]

    def exponent_set(self, key: str | None, where: str) -> ExponentSetModel:
        if key is None or key not in self.exponents:
            raise ConfigurationError(f"unknown or missing exponent set {key!r}", path=where)
        return self.exponents[key]


def _at(path: str, thunk):
    try:
        return thunk()
    except ConfigurationError as exc:
        if exc.path is None:
            exc.path = path
        raise


def config_from_dict(data: dict) -> RunConfig:
    try:
        return RunConfig.model_validate(data)
    except ValidationError as exc:
        err = exc.errors()[0]
        path = ".".join(str(p) for p in err["loc"])
        raise ConfigurationError(f"{err['msg']} ({len(exc.errors())} schema error(s))",
                                 path=path or "<root>") from None


def load_config(path: str | Path) -> RunConfig:
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise ConfigurationError(f"cannot read config: {exc.strerror}", path=str(path)) from None
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigurationError(f"invalid JSON: {exc.msg} at line {exc.lineno}",
                                 path=str(path)) from None
    if not isinstance(data, dict):
        raise ConfigurationError("config must be a JSON object", path=str(path))
    return config_from_dict(data)


def exponent_vector(cfg: RunConfig, ps, alpha: float, where: str) -> ExponentVector:
    return _at(where, lambda: ExponentVector(tuple(ps), alpha, cfg.domain.n))
