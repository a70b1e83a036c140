"""2pi-periodic weight functions and their calculus.

A weight is either piecewise constant (exact integration, exact bounds)
or a sampled closed form (vectorized evaluator, composite midpoint
quadrature).  All weights are strictly positive and immutable.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

TWO_PI = 2.0 * math.pi

#: weights whose essential infimum falls below this are rejected
POSITIVITY_FLOOR = 1e-12

#: probe-grid size used when essential bounds must be estimated
PROBE_POINTS = 4096

#: midpoint panels per period for closed-form quadrature
DEFAULT_PANELS = 2048


@dataclass(frozen=True)
class ClassMembership:
    """Essential bounds of a weight and its oscillation ratio sup/inf."""

    inf: float
    sup: float
    is_normalized: bool
    L_or_M: float


class PeriodicWeight:
    """A 2pi-periodic, essentially bounded, positive weight function.

    Immutable after construction.  Evaluation is vectorized and total:
    any real angle is reduced modulo 2pi.  Piecewise-constant weights use
    the left-closed / right-open interval convention.
    """

    __slots__ = ("kind", "breakpoints", "values", "evaluator",
                 "declared_bounds", "_cum", "_grid_cum", "_grid_edges")

    def __init__(self, kind, breakpoints=None, values=None, evaluator=None,
                 declared_bounds=None):
        if kind not in ("piecewise_constant", "sampled_closed_form"):
            raise ValueError(f"unknown weight kind {kind!r}")
        self.kind = kind
        self.declared_bounds = None
        if declared_bounds is not None:
            lo, hi = float(declared_bounds[0]), float(declared_bounds[1])
            if not (0.0 < lo <= hi):
                raise ValueError("declared_bounds must satisfy 0 < inf <= sup")
            self.declared_bounds = (lo, hi)

        if kind == "piecewise_constant":
            bp = np.atleast_1d(np.asarray(breakpoints, dtype=float))
            vals = np.atleast_1d(np.asarray(values, dtype=float))
            if bp.size == 0 or vals.size != bp.size:
                raise ValueError("need one value per breakpoint interval")
            if np.any(bp < 0.0) or np.any(bp >= TWO_PI):
                raise ValueError("breakpoints must lie in [0, 2pi)")
            if np.any(np.diff(bp) <= 0.0):
                raise ValueError("breakpoints must be strictly increasing")
            if bp[0] != 0.0:
                # rotate the wrapped leading segment in front so the
                # partition always starts at 0
                bp = np.concatenate(([0.0], bp))
                vals = np.concatenate(([vals[-1]], vals))
            if np.min(vals) < POSITIVITY_FLOOR:
                raise ValueError("weight values must be >= 1e-12")
            self.breakpoints = bp
            self.values = vals
            self.evaluator = None
            edges = np.concatenate((bp, [TWO_PI]))
            self._cum = np.concatenate(([0.0], np.cumsum(vals * np.diff(edges))))
            self._grid_cum = None
            self._grid_edges = None
        else:
            if evaluator is None:
                raise ValueError("sampled_closed_form requires an evaluator")
            self.breakpoints = None
            self.values = None
            self.evaluator = evaluator
            self._cum = None
            self._grid_cum = None
            self._grid_edges = None
            probe = self.eval(np.linspace(0.0, TWO_PI, PROBE_POINTS,
                                          endpoint=False))
            if np.min(probe) < POSITIVITY_FLOOR:
                raise ValueError("weight is not bounded away from zero")

    # -- constructors -------------------------------------------------

    @staticmethod
    def constant(v):
        return PeriodicWeight("piecewise_constant", [0.0], [float(v)])

    @staticmethod
    def piecewise(breakpoints, values):
        return PeriodicWeight("piecewise_constant", breakpoints, values)

    @staticmethod
    def from_callable(fn, declared_bounds=None):
        return PeriodicWeight("sampled_closed_form", evaluator=fn,
                              declared_bounds=declared_bounds)

    # -- evaluation ----------------------------------------------------

    def eval(self, theta):
        """Evaluate at angle(s) theta; periodic extension to all reals."""
        th = np.asarray(theta, dtype=float)
        thm = np.mod(th, TWO_PI)
        if self.kind == "piecewise_constant":
            idx = np.searchsorted(self.breakpoints, thm, side="right") - 1
            out = self.values[idx]
        else:
            out = np.asarray(self.evaluator(thm), dtype=float)
        if np.ndim(theta) == 0:
            return float(out)
        return out

    __call__ = eval

    # -- bounds ----------------------------------------------------------

    def ess_bounds(self):
        """Essential infimum/supremum.

        Exact for piecewise-constant weights.  For closed forms the
        declared bounds win when present, otherwise a dense probe grid
        is used.
        """
        if self.kind == "piecewise_constant":
            lo, hi = float(np.min(self.values)), float(np.max(self.values))
        elif self.declared_bounds is not None:
            lo, hi = self.declared_bounds
        else:
            probe = self.eval(np.linspace(0.0, TWO_PI, PROBE_POINTS,
                                          endpoint=False))
            lo, hi = float(np.min(probe)), float(np.max(probe))
        if lo <= 0.0:
            raise ValueError("essential infimum must be positive")
        return ClassMembership(inf=lo, sup=hi,
                               is_normalized=abs(lo - 1.0) <= 1e-9,
                               L_or_M=hi / lo)

    # -- algebra ---------------------------------------------------------

    def power(self, r):
        """Pointwise power w(theta)**r as a new weight."""
        r = float(r)
        if self.kind == "piecewise_constant":
            return PeriodicWeight.piecewise(self.breakpoints,
                                            self.values ** r)
        base = self.evaluator
        bounds = None
        if self.declared_bounds is not None:
            lo, hi = self.declared_bounds[0] ** r, self.declared_bounds[1] ** r
            bounds = (min(lo, hi), max(lo, hi))
        return PeriodicWeight.from_callable(lambda th: base(th) ** r,
                                            declared_bounds=bounds)

    def scale(self, s):
        """Pointwise multiple s*w."""
        s = float(s)
        if self.kind == "piecewise_constant":
            return PeriodicWeight.piecewise(self.breakpoints, s * self.values)
        base = self.evaluator
        bounds = None
        if self.declared_bounds is not None:
            bounds = (s * self.declared_bounds[0], s * self.declared_bounds[1])
        return PeriodicWeight.from_callable(lambda th: s * base(th),
                                            declared_bounds=bounds)

    # -- quadrature -------------------------------------------------------

    def _ensure_grid(self, panels):
        if self._grid_cum is not None and self._grid_edges.size == panels + 1:
            return
        edges = np.linspace(0.0, TWO_PI, panels + 1)
        mids = 0.5 * (edges[:-1] + edges[1:])
        vals = self.eval(mids)
        cum = np.concatenate(([0.0], np.cumsum(vals * np.diff(edges))))
        self._grid_edges = edges
        self._grid_cum = cum

    def antiderivative(self, theta, panels=DEFAULT_PANELS):
        """Integral of w from 0 to theta, for any real theta.

        Exact for piecewise-constant weights; composite midpoint with
        `panels` panels per period otherwise.
        """
        th = np.asarray(theta, dtype=float)
        n_per = np.floor(th / TWO_PI)
        rem = th - TWO_PI * n_per
        if self.kind == "piecewise_constant":
            total = self._cum[-1]
            idx = np.searchsorted(self.breakpoints, rem, side="right") - 1
            part = self._cum[idx] + self.values[idx] * (rem - self.breakpoints[idx])
        else:
            self._ensure_grid(panels)
            total = self._grid_cum[-1]
            h = TWO_PI / panels
            k = np.minimum((rem / h).astype(int), panels - 1)
            x_k = self._grid_edges[k]
            d = rem - x_k
            part = self._grid_cum[k] + d * self.eval(x_k + 0.5 * d)
        out = n_per * total + part
        if np.ndim(theta) == 0:
            return float(out)
        return out

    def integrate(self, theta0, theta1, panels=DEFAULT_PANELS):
        """Integral of w over [theta0, theta1]; bounds must be ordered."""
        if theta1 < theta0:
            raise ValueError("integrate requires theta0 <= theta1")
        return self.antiderivative(theta1, panels) - self.antiderivative(theta0, panels)

    def mean(self, panels=DEFAULT_PANELS):
        """Average value over one period."""
        return self.integrate(0.0, TWO_PI, panels) / TWO_PI


def combine(w1, w2, fn):
    """Pointwise combination fn(w1, w2) as a weight.

    Stays piecewise-constant (breakpoints merged) when both inputs are;
    falls back to a sampled closed form otherwise.
    """
    if w1.kind == "piecewise_constant" and w2.kind == "piecewise_constant":
        bp = np.union1d(w1.breakpoints, w2.breakpoints)
        v1 = w1.eval(bp)
        v2 = w2.eval(bp)
        return PeriodicWeight.piecewise(bp, fn(v1, v2))
    return PeriodicWeight.from_callable(
        lambda th: fn(np.asarray(w1.eval(th)), np.asarray(w2.eval(th))))


def product(w1, w2):
    """Pointwise product w1*w2."""
    return combine(w1, w2, lambda x, y: x * y)


def sqrt_ratio(a, b):
    """Pointwise sqrt(a/b), the density of the change of variables."""
    return combine(a, b, lambda x, y: np.sqrt(x / y))


def sine_family(M):
    """Smooth weight 1 + (M-1)(1+sin theta)/2, ranging over [1, M]."""
    M = float(M)
    if M < 1.0:
        raise ValueError("sine family requires M >= 1")
    return PeriodicWeight.from_callable(
        lambda th: 1.0 + (M - 1.0) * (1.0 + np.sin(th)) / 2.0,
        declared_bounds=(1.0, M))
