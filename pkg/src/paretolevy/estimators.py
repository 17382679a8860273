"""Nonparametric tail-integral and Pareto-Levy copula estimators.

The estimators count joint large increments: the empirical tail integral at
``(x1, x2)`` is ``(1/k_n) * #{j : incr1_j >= x1, incr2_j >= x2}``, with a
``-inf`` coordinate imposing no constraint.  The empirical copula composes
the joint counter with generalized inverses of the marginal counters.  Both
estimator classes follow the scikit-learn protocol (``fit`` returning self,
trailing-underscore fitted attributes, ``get_params``).
"""

from __future__ import annotations

import math

import numpy as np
from sklearn.base import BaseEstimator
from sklearn.utils.validation import check_array, check_is_fitted

from ._counting import JointExceedanceCounter
from .models import INF, reciprocal
from .schemes import AsynchronousScheme, overlap_pairs
from .sim import IncrementSeries

__all__ = [
    "EmpiricalTailIntegral",
    "AsynchronousTailIntegral",
    "quadrant_transform",
    "scaled_deviation",
]

_QUADRANTS = {"++": (1, 1), "+-": (1, -1), "-+": (-1, 1), "--": (-1, -1)}


def _check_point(x1, x2):
    if math.isnan(x1) or math.isnan(x2):
        raise ValueError("evaluation point contains NaN")


def _marginal_count(sorted_vals: np.ndarray, x: float) -> int:
    """#{j : value_j >= x} from an ascending sorted array."""
    if x == INF:
        return 0
    return int(sorted_vals.size - np.searchsorted(sorted_vals, x, side="left"))


def _marginal_inverse(sorted_vals: np.ndarray, k_n: float, z: float) -> float:
    """Generalized inverse inf{x > 0 : count(x)/k_n <= z} of a step tail.

    Exact via order statistics: with c the largest count whose normalized
    value stays <= z (found with the same float division the evaluator
    uses), the sublevel set opens just past the (c+1)-th largest increment.
    Convention: z = 0 maps to inf.
    """
    if math.isnan(z) or z < 0:
        raise ValueError(f"z must be >= 0, got {z}")
    if z == 0:
        return INF
    n = sorted_vals.size
    lo, hi = 0, n
    while lo < hi:
        mid = (lo + hi + 1) // 2
        if mid / k_n <= z:
            lo = mid
        else:
            hi = mid - 1
    if lo >= n:
        return 0.0
    return max(float(sorted_vals[n - 1 - lo]), 0.0)


def _bar(a: float) -> float:
    """a if a > 0 else -inf: lifts a vanished marginal inverse onto the
    unconstrained stripe so the copula estimator falls back to a marginal
    count instead of counting signed increments."""
    return a if a > 0 else -INF


def _check_copula_args(u1, u2):
    if math.isnan(u1) or math.isnan(u2):
        raise ValueError("copula argument is NaN")
    if u1 < 0 or u2 < 0:
        raise ValueError(f"copula arguments must be >= 0, got ({u1}, {u2})")
    if u1 == 0 and u2 == 0:
        raise ValueError("(0, 0) is outside the copula domain")


class _TailEvaluatorMixin:
    """Copula / oracle-copula evaluation shared by both counting estimators;
    requires evaluate(), marginal_inverse() and the fitted normalizer."""

    def copula(self, u1: float, u2: float) -> float:
        """Empirical Pareto-Levy copula at (u1, u2)."""
        check_is_fitted(self)
        _check_copula_args(u1, u2)
        a1 = self.marginal_inverse(1, reciprocal(u1))
        a2 = self.marginal_inverse(2, reciprocal(u2))
        return self.evaluate(_bar(a1), _bar(a2))

    def oracle_copula(self, u1: float, u2: float, margins) -> float:
        """Copula estimate using the true marginal tails (simulation studies):
        the joint counter evaluated at the analytic marginal inverses."""
        check_is_fitted(self)
        _check_copula_args(u1, u2)
        if u1 <= 0 or u2 <= 0:
            raise ValueError("oracle estimator is defined on (0, inf]^2")
        m1, m2 = margins
        return self.evaluate(m1.inverse(reciprocal(u1)), m2.inverse(reciprocal(u2)))

    def predict(self, P) -> np.ndarray:
        """Tail values at an (m, 2) array of query points."""
        P = np.asarray(P, dtype=float)
        if P.ndim != 2 or P.shape[1] != 2:
            raise ValueError("expected an (m, 2) array of query points")
        return np.array([self.evaluate(x1, x2) for x1, x2 in P])


class EmpiricalTailIntegral(BaseEstimator, _TailEvaluatorMixin):
    """Empirical joint tail integral from synchronously observed increments.

    Parameters
    ----------
    k_n : float, optional
        Normalizer (effective time horizon).  If omitted, taken from the
        last entry of ``times`` passed to :meth:`fit`.

    Attributes
    ----------
    n_ : int
        Number of increments.
    k_n_ : float
        Normalizer actually used.
    values_ : ndarray of shape (n, 2)
        The fitted increments.

    Notes
    -----
    Evaluation at ``(-inf, -inf)`` returns ``n/k_n``; a ``+inf`` coordinate
    returns 0 without scanning.  Exceedance is closed (ties count).  Joint
    queries run in O(log^2 n) after an O(n log n) preprocessing; the naive
    O(n) recount is kept as a cross-checking oracle.
    """

    def __init__(self, k_n: float | None = None):
        self.k_n = k_n

    def fit(self, X, times=None, y=None):
        """Fit from an (n, 2) increment array; irregular synchronous schemes
        pass their observation times to derive the normalizer."""
        X = check_array(X, dtype=np.float64)
        if X.shape[1] != 2:
            raise ValueError(f"expected 2 components, got {X.shape[1]}")
        if times is not None:
            times = np.asarray(times, dtype=float)
            if times.shape != (X.shape[0],) or np.any(np.diff(times) <= 0):
                raise ValueError("times must be increasing and match the increments")
        if self.k_n is not None:
            k = float(self.k_n)
        elif times is not None:
            k = float(times[-1])
        else:
            raise ValueError("pass k_n or times to fix the normalizer")
        if not k > 0:
            raise ValueError(f"k_n must be > 0, got {k}")
        self.values_ = X
        self.n_ = X.shape[0]
        self.k_n_ = k
        self._sorted = (np.sort(X[:, 0]), np.sort(X[:, 1]))
        self._counter = JointExceedanceCounter(X[:, 0], X[:, 1])
        return self

    def evaluate(self, x1: float, x2: float) -> float:
        check_is_fitted(self)
        _check_point(x1, x2)
        if x1 == INF or x2 == INF:
            return 0.0
        if x1 == -INF and x2 == -INF:
            return self.n_ / self.k_n_
        if x1 == -INF:
            return self.marginal(2, x2)
        if x2 == -INF:
            return self.marginal(1, x1)
        return self._counter.count(x1, x2) / self.k_n_

    def recount(self, x1: float, x2: float) -> float:
        """Naive O(n) re-count; the correctness oracle for evaluate()."""
        check_is_fitted(self)
        _check_point(x1, x2)
        hits = np.ones(self.n_, dtype=bool)
        if x1 != -INF:
            hits &= self.values_[:, 0] >= x1
        if x2 != -INF:
            hits &= self.values_[:, 1] >= x2
        return int(hits.sum()) / self.k_n_

    def marginal(self, axis: int, x: float) -> float:
        """Marginal empirical tail of one component."""
        check_is_fitted(self)
        if axis not in (1, 2):
            raise ValueError("axis must be 1 or 2")
        if x == -INF:
            return self.n_ / self.k_n_
        return _marginal_count(self._sorted[axis - 1], x) / self.k_n_

    def marginal_inverse(self, axis: int, z: float) -> float:
        """Generalized inverse of the marginal empirical tail."""
        check_is_fitted(self)
        if axis not in (1, 2):
            raise ValueError("axis must be 1 or 2")
        return _marginal_inverse(self._sorted[axis - 1], self.k_n_, z)


class AsynchronousTailIntegral(BaseEstimator, _TailEvaluatorMixin):
    """Joint tail integral from asynchronously observed components.

    Joint exceedances are counted over pairs of increments whose observation
    intervals overlap; marginal evaluation counts each component's own
    increments once (no overlap factor).  At ``(-inf, -inf)`` the evaluator
    returns ``#pairs / k_n``, which collapses to ``n/k_n`` on a shared grid,
    where this estimator coincides with :class:`EmpiricalTailIntegral`
    exactly.
    """

    def fit(self, X1, X2, scheme: AsynchronousScheme, y=None):
        X1 = np.asarray(X1, dtype=float)
        X2 = np.asarray(X2, dtype=float)
        if not isinstance(scheme, AsynchronousScheme):
            raise ValueError("scheme must be an AsynchronousScheme")
        if X1.shape != (scheme.m1,) or X2.shape != (scheme.m2,):
            raise ValueError("increment arrays must match the scheme sizes")
        self.values1_ = X1
        self.values2_ = X2
        self.scheme_ = scheme
        self.k_n_ = scheme.k_n
        self.pairs_ = overlap_pairs(scheme)
        self._sorted = (np.sort(X1), np.sort(X2))
        self._counter = JointExceedanceCounter(
            X1[self.pairs_[:, 0]], X2[self.pairs_[:, 1]])
        return self

    def evaluate(self, x1: float, x2: float) -> float:
        check_is_fitted(self)
        _check_point(x1, x2)
        if x1 == INF or x2 == INF:
            return 0.0
        if x1 == -INF and x2 == -INF:
            return len(self.pairs_) / self.k_n_
        if x1 == -INF:
            return self.marginal(2, x2)
        if x2 == -INF:
            return self.marginal(1, x1)
        return self._counter.count(x1, x2) / self.k_n_

    def recount(self, x1: float, x2: float) -> float:
        """Literal double loop over all interval pairs; O(m1*m2) oracle,
        independent of the overlap sweep."""
        check_is_fitted(self)
        _check_point(x1, x2)
        if x1 == INF or x2 == INF:
            return 0.0
        if x1 == -INF and x2 != -INF:
            return int(np.sum(self.values2_ >= x2)) / self.k_n_
        if x2 == -INF and x1 != -INF:
            return int(np.sum(self.values1_ >= x1)) / self.k_n_
        b1 = self.scheme_.bounds(1)
        b2 = self.scheme_.bounds(2)
        total = 0
        for j in range(self.scheme_.m1):
            for l in range(self.scheme_.m2):
                if max(b1[j], b2[l]) >= min(b1[j + 1], b2[l + 1]):
                    continue
                if x1 == -INF or self.values1_[j] >= x1:
                    if x2 == -INF or self.values2_[l] >= x2:
                        total += 1
        return total / self.k_n_

    def marginal(self, axis: int, x: float) -> float:
        check_is_fitted(self)
        if axis not in (1, 2):
            raise ValueError("axis must be 1 or 2")
        if x == -INF:
            return self._sorted[axis - 1].size / self.k_n_
        return _marginal_count(self._sorted[axis - 1], x) / self.k_n_

    def marginal_inverse(self, axis: int, z: float) -> float:
        check_is_fitted(self)
        if axis not in (1, 2):
            raise ValueError("axis must be 1 or 2")
        return _marginal_inverse(self._sorted[axis - 1], self.k_n_, z)


def quadrant_transform(series: IncrementSeries, quadrant: str) -> IncrementSeries:
    """Flip increment signs so downstream estimators measure the jump
    dependence of the chosen quadrant; applying a transform twice is the
    identity."""
    try:
        s1, s2 = _QUADRANTS[quadrant]
    except KeyError:
        raise ValueError(f"quadrant must be one of {sorted(_QUADRANTS)}, got {quadrant!r}")
    return IncrementSeries(times1=series.times1, values1=s1 * series.values1,
                           times2=series.times2, values2=s2 * series.values2,
                           scheme=series.scheme)


def quadrant_negate(X: np.ndarray, quadrant: str) -> np.ndarray:
    """Array version of :func:`quadrant_transform` for (n, 2) increments."""
    try:
        s1, s2 = _QUADRANTS[quadrant]
    except KeyError:
        raise ValueError(f"quadrant must be one of {sorted(_QUADRANTS)}, got {quadrant!r}")
    X = np.asarray(X, dtype=float)
    return X * np.array([s1, s2], dtype=float)


def scaled_deviation(estimate, target, k_n: float):
    """sqrt(k_n) * (estimate - target): the quantity whose law approaches the
    limiting Gaussian field; the Monte Carlo unit of the verification tables."""
    return math.sqrt(k_n) * (np.asarray(estimate, dtype=float) - np.asarray(target, dtype=float))
