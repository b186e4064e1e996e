"""Heston parameter records, JSON I/O and exact model-equivalence transforms."""
from __future__ import annotations

import json
import math
from dataclasses import dataclass, field, replace
from functools import cached_property
from pathlib import Path

from .errors import DomainError, ParameterError

JSON_FIELDS = ("a", "b", "c", "rho", "s0", "v0", "mu", "t")
_REQUIRED = ("a", "b", "c", "rho", "v0", "t")
_DEFAULTS = {"s0": 1.0, "mu": 0.0}


def _finite(name, value):
    try:
        value = float(value)
    except (TypeError, ValueError):
        raise ParameterError(name, f"expected a real number, got {value!r}") from None
    if not math.isfinite(value):
        raise ParameterError(name, "must be finite")
    return value


@dataclass(frozen=True)
class ModelParams:
    """Heston parameters ``(a, b, c, rho, s0, v0, mu)``.

    ``a`` mean reversion, ``b`` long-run variance, ``c`` vol-of-vol (any
    nonzero sign), ``rho`` spot/variance correlation, ``s0`` initial spot,
    ``v0`` initial variance and ``mu`` drift. ``x0 = log(s0)`` is derived.
    """

    a: float
    b: float
    c: float
    rho: float
    s0: float = 1.0
    v0: float = 0.0
    mu: float = 0.0

    def __post_init__(self):
        for name in ("a", "b", "c", "rho", "s0", "v0", "mu"):
            object.__setattr__(self, name, _finite(name, getattr(self, name)))
        if self.a <= 0:
            raise ParameterError("a", "mean reversion must be > 0")
        if self.b <= 0:
            raise ParameterError("b", "long-term variance must be > 0")
        if self.c == 0:
            raise ParameterError("c", "vol-of-vol must be nonzero")
        if not -1.0 <= self.rho <= 1.0:
            raise ParameterError("rho", "correlation must lie in [-1, 1]")
        if self.s0 <= 0:
            raise ParameterError("s0", "initial spot must be > 0")
        if self.v0 < 0:
            raise ParameterError("v0", "initial variance must be >= 0")

    @property
    def x0(self) -> float:
        return math.log(self.s0)

    @classmethod
    def from_x0(cls, a, b, c, rho, x0=0.0, v0=0.0, mu=0.0):
        return cls(a, b, c, rho, math.exp(x0), v0, mu)

    def as_dict(self) -> dict:
        return {"a": self.a, "b": self.b, "c": self.c, "rho": self.rho,
                "s0": self.s0, "v0": self.v0, "mu": self.mu}


@dataclass(frozen=True)
class SeriesTolerance:
    """Truncation controls for power series evaluation."""

    eps: float = 1e-16
    max_terms: int = 200

    def __post_init__(self):
        if not 0 < self.eps <= 1e-10:
            raise ParameterError("eps", "must lie in (0, 1e-10]")
        if self.max_terms < 64:
            raise ParameterError("max_terms", "must be >= 64")


@dataclass(frozen=True)
class EvalContext:
    """Parameters, horizon and tolerances. Parameters are canonicalized
    (``c > 0``) on construction so downstream code may rely on it."""

    params: ModelParams
    t: float
    tol: SeriesTolerance = field(default_factory=SeriesTolerance)

    def __post_init__(self):
        t = _finite("t", self.t)
        if t <= 0:
            raise ParameterError("t", "horizon must be > 0")
        object.__setattr__(self, "t", t)
        object.__setattr__(self, "params", canonicalize(self.params))

    # shorthands used throughout the numerical code
    @property
    def a(self):
        return self.params.a

    @property
    def b(self):
        return self.params.b

    @property
    def c(self):
        return self.params.c

    @property
    def rho(self):
        return self.params.rho

    @property
    def v0(self):
        return self.params.v0

    @property
    def x0(self):
        return self.params.x0

    @property
    def mu(self):
        return self.params.mu

    @cached_property
    def xi(self) -> float:
        """Common exponent ``2ab/c^2``."""
        return 2.0 * self.a * self.b / (self.c * self.c)

    def with_t(self, t: float) -> "EvalContext":
        return EvalContext(self.params, t, self.tol)


def canonicalize(p: ModelParams) -> ModelParams:
    """Map ``(c, rho) -> (-c, -rho)`` when ``c < 0``; the law of X_t is unchanged."""
    if p.c < 0:
        return replace(p, c=-p.c, rho=-p.rho)
    return p


def invert_model(p: ModelParams) -> ModelParams:
    """Parameters of the inverted spot ``1/S`` under the share measure.

    Requires ``a > c*rho``.
    """
    p = canonicalize(p)
    a_new = p.a - p.c * p.rho
    if a_new <= 0:
        raise DomainError(f"inversion undefined: a - c*rho = {a_new:g} <= 0")
    return ModelParams(a_new, p.a * p.b / a_new, p.c, -p.rho, 1.0 / p.s0, p.v0, -p.mu)


def rescale(p: ModelParams, t: float, lam: float):
    """Time change ``(a,b,c,v0,t) -> (lam a, lam b, lam c, lam v0, t/lam)``.

    Returns ``(params, horizon)``; the law of X_t is invariant.
    """
    lam = _finite("lambda", lam)
    if lam <= 0:
        raise DomainError("scaling factor must be > 0")
    t = _finite("t", t)
    if t <= 0:
        raise ParameterError("t", "horizon must be > 0")
    q = replace(p, a=lam * p.a, b=lam * p.b, c=lam * p.c, v0=lam * p.v0)
    return q, t / lam


def params_from_dict(data: dict):
    """Parse the JSON parameter object. Returns ``(ModelParams, t)``."""
    if not isinstance(data, dict):
        raise ParameterError("params", "expected a JSON object")
    unknown = sorted(set(data) - set(JSON_FIELDS))
    if unknown:
        raise ParameterError(unknown[0], "unknown field")
    for name in _REQUIRED:
        if name not in data:
            raise ParameterError(name, "missing required field")
    values = {**_DEFAULTS, **data}
    p = ModelParams(values["a"], values["b"], values["c"], values["rho"],
                    values["s0"], values["v0"], values["mu"])
    t = _finite("t", values["t"])
    if t <= 0:
        raise ParameterError("t", "horizon must be > 0")
    return canonicalize(p), t


def params_to_dict(p: ModelParams, t: float) -> dict:
    return {**p.as_dict(), "t": t}


def load_params(path) -> EvalContext:
    """Read a JSON parameter file into an :class:`EvalContext`."""
    text = Path(path).read_text()
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParameterError("params", f"invalid JSON ({exc})") from None
    p, t = params_from_dict(data)
    return EvalContext(p, t)
