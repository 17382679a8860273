"""Sampling schemes and the growth-condition diagnostics attached to them.

A scheme is the list of observation times of each component; increments are
taken over the half-open intervals between consecutive times.  Diagnostics
report the finite-sample value of every statistic whose limit must vanish
for the estimators' Gaussian approximation to hold, so a test harness can
verify they shrink along a scheme sequence.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass

import numpy as np

from .models import ContractViolation

__all__ = [
    "EquidistantScheme",
    "IrregularScheme",
    "AsynchronousScheme",
    "SchemeDiagnostics",
    "diagnostics",
    "overlap_pairs",
    "scheme_to_json",
    "scheme_from_json",
]


def _validate_times(times, start=0.0):
    times = np.asarray(times, dtype=float)
    if times.ndim != 1 or times.size == 0:
        raise ContractViolation("times must be a non-empty 1-D array")
    if times[0] <= start or np.any(np.diff(times) <= 0):
        raise ContractViolation("times must be strictly increasing and start after the origin")
    return times


@dataclass(frozen=True)
class EquidistantScheme:
    """n observations at spacing delta; horizon k_n = n * delta."""

    n: int
    delta: float

    def __post_init__(self):
        if self.n < 1 or not self.delta > 0:
            raise ContractViolation("need n >= 1 and delta > 0")

    @property
    def k_n(self) -> float:
        return self.n * self.delta

    @property
    def mesh(self) -> float:
        return self.delta

    @property
    def times(self) -> np.ndarray:
        return np.arange(1, self.n + 1) * self.delta


@dataclass(frozen=True)
class IrregularScheme:
    """Synchronous observations at arbitrary increasing times (origin at 0)."""

    times: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "times", _validate_times(self.times))

    @property
    def n(self) -> int:
        return int(self.times.size)

    @property
    def k_n(self) -> float:
        return float(self.times[-1])

    @property
    def spacings(self) -> np.ndarray:
        return np.diff(self.times, prepend=0.0)

    @property
    def mesh(self) -> float:
        return float(np.max(self.spacings))


@dataclass(frozen=True)
class AsynchronousScheme:
    """Per-component observation times.

    ``start1``/``start2`` are the component clocks' first observation (0 for
    the theoretical setting); intervals run between consecutive boundaries.
    Coinciding endpoints are the theoretical normalization; unequal endpoints
    are tolerated for real data, with ``k_n`` the smaller endpoint.
    """

    times1: np.ndarray
    times2: np.ndarray
    start1: float = 0.0
    start2: float = 0.0

    def __post_init__(self):
        object.__setattr__(self, "times1", _validate_times(self.times1, self.start1))
        object.__setattr__(self, "times2", _validate_times(self.times2, self.start2))

    @property
    def k_n(self) -> float:
        return float(min(self.times1[-1], self.times2[-1]))

    @property
    def shared_endpoint(self) -> bool:
        return self.times1[-1] == self.times2[-1]

    @property
    def m1(self) -> int:
        return int(self.times1.size)

    @property
    def m2(self) -> int:
        return int(self.times2.size)

    def bounds(self, axis: int) -> np.ndarray:
        t, s = (self.times1, self.start1) if axis == 1 else (self.times2, self.start2)
        return np.concatenate(([s], t))

    @property
    def mesh(self) -> tuple:
        return (float(np.max(np.diff(self.bounds(1)))), float(np.max(np.diff(self.bounds(2)))))


def overlap_pairs(scheme: AsynchronousScheme) -> np.ndarray:
    """All index pairs (j, l), 0-based, whose half-open observation intervals
    intersect; lexicographically sorted.  Linear two-pointer sweep; intervals
    touching only at a boundary do not overlap."""
    b1, b2 = scheme.bounds(1), scheme.bounds(2)
    m1, m2 = scheme.m1, scheme.m2
    pairs = []
    j = l = 0
    while j < m1 and l < m2:
        if max(b1[j], b2[l]) < min(b1[j + 1], b2[l + 1]):
            pairs.append((j, l))
        if b1[j + 1] <= b2[l + 1]:
            j += 1
        else:
            l += 1
    return np.array(pairs, dtype=np.intp).reshape(-1, 2)


@dataclass(frozen=True)
class SchemeDiagnostics:
    """Finite-n values of the scheme growth conditions (all must tend to 0
    along a scheme sequence, except k_n which must diverge)."""

    k_n: float
    mesh: object
    n_obs: object
    # sqrt(k_n) * Delta_n, equidistant bias condition
    equidistant_bias: float | None = None
    # sum (t_j - t_{j-1})^2 / sqrt(k_n), irregular-sampling condition
    spacing_sq: object = None
    # sum dt^((beta+2)/(beta+1)) / sqrt(k_n), asynchronous condition for beta > 1
    heavy_jump_activity: object = None
    # sum dt^(3/2-delta) / sqrt(k_n), asynchronous condition for beta <= 1
    light_jump_activity: object = None
    # sqrt(k_n) * Delta_n^(1/2-delta) (equidistant) or the spacing-sum analogue,
    # needed when drift/volatility vary over time
    semimartingale: object = None

    def as_dict(self) -> dict:
        return {k: v for k, v in self.__dict__.items()}


def _power_stat(spacings, k_n, p):
    return float(np.sum(spacings ** p) / math.sqrt(k_n))


def diagnostics(scheme, beta: float | None = None, delta_exp: float | None = None) -> SchemeDiagnostics:
    """Evaluate every applicable growth-condition statistic for ``scheme``.

    ``beta`` (in [0, 2), the small-jump activity index) activates the
    heavy-activity statistic; ``delta_exp`` (in (0, 1/2), a free exponent)
    activates the light-activity and semimartingale statistics.
    """
    if beta is not None and not 0 <= beta < 2:
        raise ValueError("beta must be in [0, 2)")
    if delta_exp is not None and not 0 < delta_exp < 0.5:
        raise ValueError("delta_exp must be in (0, 1/2)")

    if isinstance(scheme, AsynchronousScheme):
        k = scheme.k_n
        sp = (np.diff(scheme.bounds(1)), np.diff(scheme.bounds(2)))
        heavy = None
        if beta is not None:
            if beta <= 1:
                raise ValueError("the heavy-activity statistic applies for beta > 1")
            p = (beta + 2.0) / (beta + 1.0)
            heavy = tuple(_power_stat(s, k, p) for s in sp)
        light = None
        semi = None
        if delta_exp is not None:
            light = tuple(_power_stat(s, k, 1.5 - delta_exp) for s in sp)
            semi = light
        return SchemeDiagnostics(
            k_n=k, mesh=scheme.mesh, n_obs=(scheme.m1, scheme.m2),
            spacing_sq=tuple(_power_stat(s, k, 2.0) for s in sp),
            heavy_jump_activity=heavy, light_jump_activity=light, semimartingale=semi,
        )

    if isinstance(scheme, EquidistantScheme):
        k = scheme.k_n
        spacings = np.full(scheme.n, scheme.delta)
        equi = float(math.sqrt(k) * scheme.delta)
        semi = None
        if delta_exp is not None:
            semi = float(math.sqrt(k) * scheme.delta ** (0.5 - delta_exp))
        return SchemeDiagnostics(
            k_n=k, mesh=scheme.mesh, n_obs=scheme.n,
            equidistant_bias=equi,
            spacing_sq=_power_stat(spacings, k, 2.0),
            light_jump_activity=(_power_stat(spacings, k, 1.5 - delta_exp)
                                 if delta_exp is not None else None),
            semimartingale=semi,
        )

    if isinstance(scheme, IrregularScheme):
        k = scheme.k_n
        spacings = scheme.spacings
        semi = None
        light = None
        if delta_exp is not None:
            light = _power_stat(spacings, k, 1.5 - delta_exp)
            semi = light
        return SchemeDiagnostics(
            k_n=k, mesh=scheme.mesh, n_obs=scheme.n,
            spacing_sq=_power_stat(spacings, k, 2.0),
            light_jump_activity=light, semimartingale=semi,
        )

    raise TypeError(f"unknown scheme type {type(scheme).__name__}")


def scheme_to_json(scheme) -> str:
    if isinstance(scheme, EquidistantScheme):
        doc = {"variant": "equidistant", "n": scheme.n, "delta": scheme.delta}
    elif isinstance(scheme, IrregularScheme):
        doc = {"variant": "irregular", "times": scheme.times.tolist()}
    elif isinstance(scheme, AsynchronousScheme):
        doc = {"variant": "asynchronous",
               "times1": scheme.times1.tolist(), "times2": scheme.times2.tolist(),
               "start1": scheme.start1, "start2": scheme.start2}
    else:
        raise TypeError(f"unknown scheme type {type(scheme).__name__}")
    return json.dumps(doc)


def scheme_from_json(text: str):
    doc = json.loads(text)
    variant = doc.get("variant")
    if variant == "equidistant":
        return EquidistantScheme(n=int(doc["n"]), delta=float(doc["delta"]))
    if variant == "irregular":
        return IrregularScheme(times=np.asarray(doc["times"], dtype=float))
    if variant == "asynchronous":
        return AsynchronousScheme(
            times1=np.asarray(doc["times1"], dtype=float),
            times2=np.asarray(doc["times2"], dtype=float),
            start1=float(doc.get("start1", 0.0)), start2=float(doc.get("start2", 0.0)),
        )
    raise ValueError(f"unknown scheme variant {variant!r}")
