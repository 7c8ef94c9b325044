"""Operator monotone decreasing functions and their integral representations.

A function f that is operator monotone decreasing on (0, inf) has a
representation

    -f(x) = a*x + b + integral_0^inf ( t/(t^2+1) - 1/(t+x) ) w(t) dt

with a >= 0, b real, and w >= 0 the density of the representing measure.
The coefficients come from the Herglotz function G = -f extended to the upper
half plane: a = lim_{y->inf} G(iy)/(iy), b = Re G(i), and
w(t) = lim_{y->0+} Im G(-t + iy) / pi (Stieltjes inversion).

Builtins:
    neg-log       f(x) = -log x     a=0, b=0,               w(t) = 1
    neg-power:a   f(x) = -x^a       a=0, b=cos(a*pi/2),     w(t) = sin(a*pi)/pi * t^a

for a in (0, 1). Note b = Re[i^a] = cos(a*pi/2); the identity fails with any
other constant, which verify_representation will report.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import InvalidInput, NotRegular, NumericalFailure
from .quadrature import integrate_halfline


@dataclass(eq=False)
class MonotoneDecreasingRep:
    """An operator monotone decreasing function with its representation data.

    eval: the function itself, vectorized over numpy arrays and accepting
        complex scalars (needed for coefficient extraction).
    a, b: linear and constant coefficients of -f.
    density: w(t) for t > 0, or None when no closed form is known.
    growth: (C, c) certifying C^f_{T,beta} <= C * T^(2c) for T >= 1, or None.
    f_at_zero: lim_{x->0+} f(x), may be +inf.
    c_closed: optional closed form (T, beta) -> C^f_{T,beta} for the exact
        regularity constant; grid estimation is used otherwise.
    """

    eval: callable
    a: float
    b: float
    density: callable | None
    growth: tuple | None
    name: str
    f_at_zero: float = field(default=np.inf)
    c_closed: callable | None = field(default=None)


def _interval(t: float, beta: float) -> tuple[float, float]:
    """Endpoints [T_L^{-1}, T_R] of the regularity window, enclosing order.

    For T < 1 the nominal endpoints come out reversed; the enclosing interval
    keeps the sup honest there.
    """
    if beta <= 0.5:
        t_l = t
        t_r = t ** (beta / (1.0 - beta))
    else:
        t_l = t ** ((1.0 - beta) / beta)
        t_r = t
    lo, hi = 1.0 / t_l, t_r
    return (min(lo, hi), max(lo, hi))


def builtin_neg_log() -> MonotoneDecreasingRep:
    return MonotoneDecreasingRep(
        eval=lambda x: -np.log(x),
        a=0.0,
        b=0.0,
        density=lambda t: np.ones_like(np.asarray(t, dtype=float)),
        growth=(1.0, 0.0),
        name="neg-log",
        f_at_zero=np.inf,
        c_closed=lambda t, beta: 1.0,
    )


def builtin_neg_power(alpha: float) -> MonotoneDecreasingRep:
    if not 0.0 < alpha < 1.0:
        raise InvalidInput("power exponent must lie in (0, 1)")
    s = math.sin(alpha * math.pi) / math.pi

    def c_closed(t, beta):
        lo, _ = _interval(t, beta)
        return lo ** (-alpha) / s

    return MonotoneDecreasingRep(
        eval=lambda x: -(x ** alpha),
        a=0.0,
        b=math.cos(alpha * math.pi / 2.0),
        density=lambda t: s * np.asarray(t, dtype=float) ** alpha,
        growth=(1.0 / s, alpha / 2.0),
        name=f"neg-power:{alpha:g}",
        f_at_zero=0.0,
        c_closed=c_closed,
    )


def rep_from_name(name: str) -> MonotoneDecreasingRep:
    """Parse "neg-log" or "neg-power:<alpha>"."""
    if name == "neg-log":
        return builtin_neg_log()
    if name.startswith("neg-power:"):
        try:
            alpha = float(name.split(":", 1)[1])
        except ValueError as exc:
            raise InvalidInput(f"bad power exponent in {name!r}") from exc
        return builtin_neg_power(alpha)
    raise InvalidInput(f"unknown monotone function {name!r}")


def pick_coefficients(f) -> tuple[float, float]:
    """Extract (a, b) of an upper-half-plane analytic f with Im f >= 0.

    a = lim Re[f(iy)/(iy)], accelerated with one Aitken delta-squared step
    over y in {1e4, 1e5, 1e6} (a single large-y probe carries O(1/y) error,
    too coarse); b = Re[f(i)]. For a decreasing rep, pass the negated
    function: its data live on -f.
    """
    g = [(f(1j * y) / (1j * y)).real for y in (1e4, 1e5, 1e6)]
    denom = g[2] - 2.0 * g[1] + g[0]
    if abs(denom) < 1e-14 * (abs(g[2]) + 1e-30):
        a = g[2]
    else:
        a = g[2] - (g[2] - g[1]) ** 2 / denom
    b = (f(1j)).real
    if abs(a) < 1e-12:
        a = 0.0
    return float(a), float(b)


def stieltjes_density(f, t: float) -> float:
    """Recover w(t) = lim_{y->0+} Im[f(-t + iy)] / pi by extrapolation.

    f is the upper-half-plane analytic function carrying the measure (for a
    decreasing rep, pass the negated function). Two Richardson passes
    (ratio 10) over y in {1e-4, 1e-5, 1e-6}; raises NumericalFailure when
    the raw sequence is not settling (measure with a singular part, or f
    not analytic there).
    """
    if t <= 0.0:
        raise InvalidInput("density is defined for t > 0")
    ys = (1e-4, 1e-5, 1e-6)
    vals = [(f(-t + 1j * y)).imag / math.pi for y in ys]
    for k in range(2):
        if abs(vals[k + 1] - vals[k]) > 1e-3 * (1.0 + abs(vals[k + 1])):
            raise NumericalFailure(
                f"Stieltjes inversion not converging at t={t}")
    r1 = [(10.0 * vals[k + 1] - vals[k]) / 9.0 for k in range(2)]
    r2 = (100.0 * r1[1] - r1[0]) / 99.0
    return float(r2)


def c_constant(rep: MonotoneDecreasingRep, t: float, beta: float) -> float:
    """Regularity constant C^f_{T,beta} = sup 1/w over the window around 1.

    Uses the rep's closed form when available, otherwise a 1024-point
    log-spaced grid over the enclosing window (an estimate; callers flag it).
    """
    if t <= 0.0:
        raise InvalidInput("T must be positive")
    if not 0.0 < beta < 1.0:
        raise InvalidInput("beta must lie in (0, 1)")
    if rep.c_closed is not None:
        return float(rep.c_closed(t, beta))
    if rep.density is None:
        raise NotRegular(f"{rep.name} has no density to bound")
    lo, hi = _interval(t, beta)
    grid = np.logspace(math.log10(lo), math.log10(hi), 1024)
    w = np.asarray(rep.density(grid), dtype=float)
    if np.any(w <= 0.0) or not np.all(np.isfinite(w)):
        raise NotRegular(f"{rep.name} density vanishes on the window")
    return float(np.max(1.0 / w))


def represent(rep: MonotoneDecreasingRep, x: float,
              panel_tol: float = 1e-9) -> float:
    """Evaluate f(x) from the representation data (not from rep.eval)."""
    if x <= 0.0:
        raise InvalidInput("representation evaluated for x > 0")
    if rep.density is None:
        raise NotRegular(f"{rep.name} has no density")

    def integrand(t):
        # t/(t^2+1) - 1/(t+x) written as one fraction: the two terms agree
        # to O(1/t^2) at large t and subtracting them directly loses all
        # significant digits exactly where power densities amplify the tail.
        return (t * x - 1.0) / ((t * t + 1.0) * (t + x)) * rep.density(t)

    integral = integrate_halfline(integrand, panel_tol=panel_tol)
    return -(rep.a * x + rep.b + float(integral))


def verify_representation(rep: MonotoneDecreasingRep, n_points: int = 21) -> float:
    """Max abs deviation between rep.eval and its representation on
    [1e-2, 1e2] (log-spaced grid)."""
    xs = np.logspace(-2, 2, n_points)
    err = 0.0
    for x in xs:
        direct = float(rep.eval(float(x)))
        err = max(err, abs(represent(rep, float(x)) - direct))
    return err
