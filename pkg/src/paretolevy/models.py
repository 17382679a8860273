"""Analytic layer: Pareto-Levy copulas, marginal tail integrals and their algebra.

A Pareto-Levy copula ``Gamma`` is a grounded, 2-increasing function on
``[0, inf]^2 \\ {(0, 0)}`` with Pareto margins ``Gamma(u, 0) = Gamma(0, u) = 1/u``.
It couples the marginal tail integrals of a spectrally positive bivariate
Levy process into the joint tail integral via

    U(x1, x2) = Gamma(1 / U1(x1), 1 / U2(x2)).

Everything here works on the extended real line with the conventions
``1/0 = inf`` and ``1/inf = 0``; a coordinate equal to ``-inf`` means
"no constraint" and reduces the joint tail to the corresponding marginal.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

INF = math.inf


class ContractViolation(ValueError):
    """An input breaks a structural precondition (monotonicity, ordering)."""


def reciprocal(x):
    """1/x with the tail-integral conventions 1/0 = inf and 1/inf = 0."""
    x = np.asarray(x, dtype=float)
    if np.any(np.isnan(x)) or np.any(x < 0):
        raise ValueError("reciprocal is defined on [0, inf] only")
    with np.errstate(divide="ignore"):
        out = np.where(x == 0, INF, np.where(np.isinf(x), 0.0, 1.0 / x))
    return float(out) if out.ndim == 0 else out


def _check_copula_point(u1, u2):
    if math.isnan(u1) or math.isnan(u2):
        raise ValueError("copula argument is NaN")
    if u1 < 0 or u2 < 0:
        raise ValueError(f"copula arguments must be >= 0, got ({u1}, {u2})")
    if u1 == 0 and u2 == 0:
        raise ValueError("(0, 0) is outside the copula domain")


class ParetoLevyCopula:
    """Base class: grounded, 2-increasing, Pareto margins 1/u."""

    def __call__(self, u1: float, u2: float) -> float:
        raise NotImplementedError

    def partial(self, u1: float, u2: float, axis: int = 1, boundary: str | None = None) -> float:
        """Partial derivative along ``axis``.

        The interior formula requires both coordinates finite and positive.
        The limits at the boundaries of the off-axis coordinate are obtained
        with ``boundary="zero"`` (giving ``-u_axis**-2``) or ``boundary="inf"``
        (giving ``0``); the coordinate passed for the off axis is then ignored.
        """
        if axis not in (1, 2):
            raise ValueError("axis must be 1 or 2")
        u_axis = u1 if axis == 1 else u2
        if boundary is not None:
            if not (0 < u_axis < INF):
                raise ValueError("boundary derivatives need a finite positive on-axis coordinate")
            if boundary == "zero":
                return -(u_axis ** -2)
            if boundary == "inf":
                return 0.0
            raise ValueError(f"unknown boundary {boundary!r}")
        if not (0 < u1 < INF and 0 < u2 < INF):
            raise ValueError(
                "interior partial derivative needs finite positive coordinates; "
                "pass boundary='zero' or boundary='inf' for the limits"
            )
        return self._partial_interior(u1, u2, axis)

    def _partial_interior(self, u1, u2, axis):
        raise NotImplementedError(f"{type(self).__name__} has no closed-form derivative")

    def conditional_exceedance(self, u_given, u_other, axis: int = 1):
        """P[companion coordinate exceeds ``u_other`` | jump at ``u_given`` on ``axis``].

        Pareto coordinates; equals ``-u_given**2 * dGamma/du_axis``.  Vectorized
        in both arguments.
        """
        raise NotImplementedError(f"{type(self).__name__} has no conditional law")

    def conditional_mark(self, u_given, v, axis: int = 1):
        """Inverse of the conditional exceedance: the companion coordinate whose
        conditional exceedance probability equals ``v``.  Vectorized."""
        raise NotImplementedError(f"{type(self).__name__} has no conditional law")


class ClaytonCopula(ParetoLevyCopula):
    """Clayton Pareto-Levy copula ``Gamma(u) = (u1**theta + u2**theta)**(-1/theta)``.

    ``theta -> 0`` approaches independence, ``theta -> inf`` complete positive
    dependence.  The closed form extends continuously to the boundary values
    required by groundedness and the Pareto margins.
    """

    def __init__(self, theta: float):
        if not theta > 0:
            raise ValueError(f"theta must be > 0, got {theta}")
        self.theta = float(theta)

    def __repr__(self):
        return f"ClaytonCopula(theta={self.theta})"

    def __call__(self, u1, u2):
        _check_copula_point(u1, u2)
        t = self.theta
        # factored form (1/max) * (1 + (min/max)**t)**(-1/t): the ratio lies in
        # [0, 1], so no overflow however large t * log(u) gets
        m, r = max(u1, u2), min(u1, u2)
        if m == INF:
            return 0.0
        return float((1.0 + (r / m) ** t) ** (-1.0 / t) / m)

    def _partial_interior(self, u1, u2, axis):
        # -(u1**t + u2**t)**(-1/t - 1) * u_i**(t-1), factored the same way:
        # dGamma_i = -(Gamma/u_i) * (u_i/max)**t / (1 + (min/max)**t)
        t = self.theta
        u = u1 if axis == 1 else u2
        m, r = max(u1, u2), min(u1, u2)
        g = (1.0 + (r / m) ** t) ** (-1.0 / t) / m
        return float(-(g / u) * (u / m) ** t / (1.0 + (r / m) ** t))

    def conditional_exceedance(self, u_given, u_other, axis=1):
        t = self.theta
        u_given = np.asarray(u_given, dtype=float)
        u_other = np.asarray(u_other, dtype=float)
        with np.errstate(over="ignore", divide="ignore"):
            r = np.where(np.isinf(u_other), INF, (u_other / u_given) ** t)
            out = (1.0 + r) ** (-(t + 1.0) / t)
        return float(out) if out.ndim == 0 else out

    def conditional_mark(self, u_given, v, axis=1):
        t = self.theta
        u_given = np.asarray(u_given, dtype=float)
        v = np.asarray(v, dtype=float)
        if np.any(v <= 0) or np.any(v > 1):
            raise ValueError("v must lie in (0, 1]")
        out = u_given * (v ** (-t / (t + 1.0)) - 1.0) ** (1.0 / t)
        return float(out) if out.ndim == 0 else out


class ComonotoneCopula(ParetoLevyCopula):
    """Upper Frechet bound ``Gamma(u) = 1 / max(u1, u2)``: all jumps are joint."""

    def __repr__(self):
        return "ComonotoneCopula()"

    def __call__(self, u1, u2):
        _check_copula_point(u1, u2)
        return reciprocal(max(u1, u2))

    def _partial_interior(self, u1, u2, axis):
        # kink on the diagonal; defined a.e.
        u_axis, u_off = (u1, u2) if axis == 1 else (u2, u1)
        if u_axis == u_off:
            raise ValueError("derivative undefined on the diagonal")
        return -u_axis ** -2 if u_axis > u_off else 0.0

    def conditional_exceedance(self, u_given, u_other, axis=1):
        u_given = np.asarray(u_given, dtype=float)
        u_other = np.asarray(u_other, dtype=float)
        out = (u_other <= u_given).astype(float)
        return float(out) if out.ndim == 0 else out

    def conditional_mark(self, u_given, v, axis=1):
        u_given = np.asarray(u_given, dtype=float)
        out = u_given + 0.0 * np.asarray(v, dtype=float)
        return float(out) if out.ndim == 0 else out


class IndependenceCopula(ParetoLevyCopula):
    """Lower Frechet bound: mass on the axes only, no joint jumps."""

    def __repr__(self):
        return "IndependenceCopula()"

    def __call__(self, u1, u2):
        _check_copula_point(u1, u2)
        if u2 == 0:
            return reciprocal(u1)
        if u1 == 0:
            return reciprocal(u2)
        return 0.0

    def _partial_interior(self, u1, u2, axis):
        return 0.0

    def conditional_exceedance(self, u_given, u_other, axis=1):
        out = np.zeros_like(np.asarray(u_given, dtype=float) * np.asarray(u_other, dtype=float))
        return float(out) if out.ndim == 0 else out

    def conditional_mark(self, u_given, v, axis=1):
        out = np.zeros_like(np.asarray(u_given, dtype=float) * np.asarray(v, dtype=float))
        return float(out) if out.ndim == 0 else out


class StableTail:
    """Power-law marginal tail integral ``U(x) = scale * x**-alpha``.

    ``alpha = 1/2`` with ``scale = pi**-0.5`` is the tail of the 1/2-stable
    subordinator, ``U(x) = (pi * x)**-0.5``.
    """

    def __init__(self, alpha: float, scale: float = 1.0):
        if not 0 < alpha < 2:
            raise ValueError(f"alpha must be in (0, 2), got {alpha}")
        if not scale > 0:
            raise ValueError(f"scale must be > 0, got {scale}")
        self.alpha = float(alpha)
        self.scale = float(scale)

    @classmethod
    def half_stable(cls) -> "StableTail":
        return cls(alpha=0.5, scale=math.pi ** -0.5)

    def __repr__(self):
        return f"StableTail(alpha={self.alpha}, scale={self.scale})"

    def __call__(self, x):
        x = np.asarray(x, dtype=float)
        if np.any(x <= 0):
            raise ValueError("tail integral defined for x > 0")
        with np.errstate(divide="ignore"):
            out = self.scale * x ** -self.alpha
        out = np.where(np.isinf(x), 0.0, out)
        return float(out) if out.ndim == 0 else out

    def inverse(self, z):
        """Generalized inverse; exact since the tail is continuous and strictly
        decreasing.  ``inverse(0) = inf`` and ``inverse(inf) = 0``."""
        z = np.asarray(z, dtype=float)
        if np.any(z < 0):
            raise ValueError("z must be >= 0")
        with np.errstate(divide="ignore", over="ignore"):
            out = np.where(
                z == 0, INF, np.where(np.isinf(z), 0.0, (self.scale / z) ** (1.0 / self.alpha))
            )
        return float(out) if out.ndim == 0 else out


class StepFunction:
    """Left-continuous nonincreasing step function on (0, inf).

    ``f(x) = values[i]`` on ``(breaks[i-1], breaks[i]]`` (with an implicit
    left edge at 0) and ``f(x) = 0`` beyond the last break.  This is the
    plateau representation of an empirical tail integral.
    """

    def __init__(self, breaks, values):
        breaks = np.asarray(breaks, dtype=float)
        values = np.asarray(values, dtype=float)
        if breaks.ndim != 1 or breaks.shape != values.shape or breaks.size == 0:
            raise ValueError("breaks and values must be 1-D of equal positive length")
        if np.any(np.diff(breaks) <= 0):
            raise ContractViolation("breaks must be strictly increasing")
        if np.any(np.diff(values) > 0) or values[-1] < 0:
            raise ContractViolation("step function must be nonincreasing with value >= 0")
        self.breaks = breaks
        self.values = values

    def __call__(self, x):
        if x == INF or x > self.breaks[-1]:
            return 0.0
        # first plateau whose right edge is >= x (left-continuity: edge included)
        i = int(np.searchsorted(self.breaks, x, side="left"))
        return float(self.values[i])

    def inverse(self, z: float) -> float:
        """inf{x > 0 : f(x) <= z} from the plateau representation; exact."""
        if z < 0:
            raise ValueError("z must be >= 0")
        if z == 0:
            return INF
        if self.values[0] <= z:
            return 0.0
        # last plateau with value > z; the sublevel set starts just past its edge
        i = int(np.searchsorted(-self.values, -z, side="left"))
        return float(self.breaks[i - 1])


def generalized_inverse(f, z: float, hi: float = 1.0) -> float:
    """Generalized inverse ``f^-(z) = inf{x > 0 : f(x) <= z}`` of a
    nonincreasing, left-continuous ``f`` with ``f(inf) = 0``.

    Uses the convention ``f^-(0) = inf``.  Objects carrying an exact
    ``inverse`` method (analytic tails, step functions) are inverted through
    it; arbitrary callables fall back to bracketing bisection.
    """
    if math.isnan(z) or z < 0:
        raise ValueError(f"z must be >= 0, got {z}")
    if z == 0:
        return INF
    if hasattr(f, "inverse"):
        return f.inverse(z)
    if f(hi) > z:
        for _ in range(200):
            hi *= 2.0
            if f(hi) <= z:
                break
        else:
            raise ValueError("could not bracket the inverse")
    lo = 0.0
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        if mid == lo or mid == hi:
            break
        if f(mid) <= z:
            hi = mid
        else:
            lo = mid
    return hi


def check_two_increasing(gamma, grid1, grid2=None, tol: float | None = None):
    """Check the 2-increasing property on a rectangular grid.

    Evaluates the mass ``Gamma(x1,x2) - Gamma(x1,y2) - Gamma(y1,x2) + Gamma(y1,y2)``
    of every adjacent grid rectangle and returns ``(ok, min_mass)``.  The
    tolerance absorbs floating-point cancellation and defaults to ``1e-12``
    relative to the largest copula value on the grid.
    """
    grid1 = np.asarray(grid1, dtype=float)
    grid2 = grid1 if grid2 is None else np.asarray(grid2, dtype=float)
    for g in (grid1, grid2):
        if g.size < 2:
            raise ValueError("grids need at least 2 points per axis")
        if np.any(g <= 0) or np.any(np.diff(g) <= 0):
            raise ValueError("grids must be strictly increasing within (0, inf]")
    vals = np.array([[gamma(a, b) for b in grid2] for a in grid1])
    mass = vals[:-1, :-1] - vals[:-1, 1:] - vals[1:, :-1] + vals[1:, 1:]
    if tol is None:
        tol = 1e-12 * max(1.0, float(np.max(np.abs(vals))))
    min_mass = float(np.min(mass))
    return min_mass >= -tol, min_mass


@dataclass(frozen=True)
class ParetoLevyModel:
    """A jump-dependence model: copula plus marginal tail integrals.

    ``params`` keeps the scalar parameters around for reporting; the copula
    and margins are the operative pieces.
    """

    copula: ParetoLevyCopula
    margin1: StableTail
    margin2: StableTail

    @classmethod
    def clayton_stable(cls, theta: float = 0.5, alpha: float = 0.5,
                       scale: float = math.pi ** -0.5) -> "ParetoLevyModel":
        """Two alpha-stable subordinator margins coupled by a Clayton copula."""
        m = StableTail(alpha, scale)
        return cls(copula=ClaytonCopula(theta), margin1=m, margin2=m)

    @property
    def margins(self):
        return (self.margin1, self.margin2)

    def tail(self, x1: float, x2: float) -> float:
        """Joint tail integral ``U(x1, x2)`` at a point of the extended domain.

        ``-inf`` (or 0, equivalent for spectrally positive jumps) in one slot
        returns the other marginal; both slots unconstrained is infinite mass.
        """
        if math.isnan(x1) or math.isnan(x2):
            raise ValueError("tail argument is NaN")
        free1 = x1 == -INF or x1 == 0
        free2 = x2 == -INF or x2 == 0
        if free1 and free2:
            raise ValueError("tail integral is infinite with both coordinates unconstrained")
        if free1:
            return self.margin2(x2)
        if free2:
            return self.margin1(x1)
        if x1 < 0 or x2 < 0:
            raise ValueError(f"finite coordinates must be positive, got ({x1}, {x2})")
        return self.copula(reciprocal(self.margin1(x1)), reciprocal(self.margin2(x2)))

    def copula_from_tail(self, u1: float, u2: float) -> float:
        """Recover the copula from the tail through the marginal inverses,
        ``U(U1^-(1/u1), U2^-(1/u2))``; the round trip is exact up to rounding."""
        _check_copula_point(u1, u2)
        x1 = generalized_inverse(self.margin1, reciprocal(u1))
        x2 = generalized_inverse(self.margin2, reciprocal(u2))
        # inverse(inf) = 0 encodes "unconstrained", which tail() understands
        return self.tail(x1 if x1 > 0 else -INF, x2 if x2 > 0 else -INF)
