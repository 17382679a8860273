"""Closed-form covariances of the limiting Gaussian fields.

Three centered Gaussian limits arise for the rescaled estimation errors:

* ``tail``      -- limit of the tail-integral estimator; covariance
  ``U(x v y)`` (coordinatewise maximum, ``-inf`` neutral).
* ``oracle``    -- limit of the copula estimator built with known margins;
  covariance ``Gamma(u v v)`` with the stripe convention
  ``Gamma(u, -inf) = Gamma(-inf, u) = 1/u``.
* ``empirical`` -- limit of the fully empirical copula estimator,

      G(u) = Go(u) + u1^2 dG1(u) Go(u1, -inf) + u2^2 dG2(u) Go(-inf, u2),

  whose covariance is computed here symbolically as the 3x3 bilinear
  expansion over oracle covariances (never by simulation); the special-case
  constants of the Clayton model are its regression tests.

A coordinate equal to ``inf`` collapses the empirical-copula limit to zero
almost surely, so covariances involving such points vanish.
"""

from __future__ import annotations

import numpy as np

from .models import INF, ParetoLevyModel

__all__ = [
    "tail_cov",
    "oracle_cov",
    "empirical_cov",
    "relative_efficiency",
    "efficiency_condition",
    "LimitCovariance",
]


def tail_cov(model: ParetoLevyModel, x, y) -> float:
    """Cov of the tail-integral limit at points of the extended domain."""
    return model.tail(max(x[0], y[0]), max(x[1], y[1]))


def _gamma_ext(model: ParetoLevyModel, w1: float, w2: float) -> float:
    # stripe convention: a surviving -inf coordinate reduces to the Pareto margin
    if w1 == -INF and w2 == -INF:
        raise ValueError("both coordinates unconstrained")
    if w1 == -INF:
        return 1.0 / w2 if w2 > 0 else INF
    if w2 == -INF:
        return 1.0 / w1 if w1 > 0 else INF
    return model.copula(w1, w2)


def oracle_cov(model: ParetoLevyModel, u, v) -> float:
    """Cov of the known-margins copula limit: ``Gamma(u v v)``."""
    return _gamma_ext(model, max(u[0], v[0]), max(u[1], v[1]))


def _expansion_terms(model: ParetoLevyModel, u):
    u1, u2 = float(u[0]), float(u[1])
    if not (u1 > 0 and u2 > 0):
        raise ValueError("empirical-copula covariance is defined on (0, inf]^2")
    cop = model.copula
    coefs = [1.0, u1 ** 2 * cop.partial(u1, u2, axis=1), u2 ** 2 * cop.partial(u1, u2, axis=2)]
    points = [(u1, u2), (u1, -INF), (-INF, u2)]
    return coefs, points


def empirical_cov(model: ParetoLevyModel, u, v) -> float:
    """Cov of the fully empirical copula limit via the bilinear expansion."""
    if INF in (u[0], u[1]) or INF in (v[0], v[1]):
        return 0.0
    cu, pu = _expansion_terms(model, u)
    cv, pv = _expansion_terms(model, v)
    total = 0.0
    for ci, pi in zip(cu, pu):
        for cj, pj in zip(cv, pv):
            total += ci * cj * oracle_cov(model, pi, pj)
    return total


def relative_efficiency(model: ParetoLevyModel, u) -> float:
    """Var of the empirical-copula limit over var of the known-margins limit."""
    denom = oracle_cov(model, u, u)
    if denom == 0:
        raise ValueError("known-margins limit is degenerate at this point")
    return empirical_cov(model, u, u) / denom


def efficiency_condition(model: ParetoLevyModel, u) -> bool:
    """Whether ``u_i * dGamma_i(u) + Gamma(u) >= 0`` holds on both axes at
    ``u``; under this growth condition ignoring the margins cannot hurt
    (empirical-copula variance <= known-margins variance).  Points with an
    infinite coordinate pass trivially."""
    u1, u2 = float(u[0]), float(u[1])
    if not (u1 > 0 and u2 > 0):
        raise ValueError("condition is evaluated on (0, inf]^2")
    if u1 == INF or u2 == INF:
        return True
    g = model.copula(u1, u2)
    return (u1 * model.copula.partial(u1, u2, axis=1) + g >= 0
            and u2 * model.copula.partial(u1, u2, axis=2) + g >= 0)


class LimitCovariance:
    """Covariance operator of one limiting field on finite point sets.

    ``kind`` is one of ``"tail"``, ``"oracle"``, ``"empirical"``.  Matrices
    on finite grids are symmetric positive semidefinite (up to roundoff).
    """

    _KINDS = {"tail": tail_cov, "oracle": oracle_cov, "empirical": empirical_cov}

    def __init__(self, model: ParetoLevyModel, kind: str):
        if kind not in self._KINDS:
            raise ValueError(f"kind must be one of {sorted(self._KINDS)}, got {kind!r}")
        self.model = model
        self.kind = kind

    def cov(self, a, b) -> float:
        return self._KINDS[self.kind](self.model, a, b)

    def matrix(self, points) -> np.ndarray:
        pts = [tuple(map(float, p)) for p in points]
        m = len(pts)
        out = np.empty((m, m))
        for i in range(m):
            for j in range(i, m):
                out[i, j] = out[j, i] = self.cov(pts[i], pts[j])
        return out


def efficiency_surface(model: ParetoLevyModel, grid1, grid2=None) -> np.ndarray:
    """Relative-efficiency values on a rectangular grid (rows follow grid1)."""
    grid1 = np.asarray(grid1, dtype=float)
    grid2 = grid1 if grid2 is None else np.asarray(grid2, dtype=float)
    return np.array([[relative_efficiency(model, (a, b)) for b in grid2] for a in grid1])
