"""Semigroup Lipschitz seminorms and the smoothness-class checks built on them.

For beta > 0 let n be the smallest integer strictly above beta.  The
seminorm is the measured supremum of t^(n-beta) ||d^n/dt^n P_t f||_inf over
a time grid, with the sup norm itself taken over a spatial grid (a declared
lower bound on the true supremum).  Two paths produce the time derivative:
the diagonal multiplier (-sqrt(n_k))^n e^(-t sqrt(n_k)) on expansions, and
quadrature of the differentiated Poisson kernel.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import DomainError
from .expansion import (
    LaguerreExpansion,
    MultiIndexParams,
    poisson,
    spectral_apply,
    synthesize_many,
)
from .fractional import forward_difference, smallest_integer_above
from .kernels import DEFAULT_RULE, poisson_dt_apply
from .report import BoundReport, ReportRow

__all__ = [
    "LipschitzEstimate",
    "default_x_grid",
    "default_t_grid",
    "sup_norm",
    "poisson_dt_expansion",
    "lipschitz_seminorm",
    "check_equivalence",
    "check_approximation",
    "check_pminusI_power",
]


def default_x_grid(d: int = 1, points: int = 24):
    """Log-spaced spatial grid in [0.05, 20] per axis."""
    axis = np.geomspace(0.05, 20.0, points)
    if d == 1:
        return [(float(v),) for v in axis]
    grids = np.meshgrid(*([axis] * d), indexing="ij")
    return [tuple(float(v) for v in p) for p in np.stack(grids, axis=-1).reshape(-1, d)]


def default_t_grid(levels: int = 11):
    """Dyadic time grid 5 * 2^-j, ascending, from 5*2^-10 up to 5."""
    return [5.0 * 2.0 ** (-j) for j in range(levels - 1, -1, -1)]


@dataclass(frozen=True)
class LipschitzEstimate:
    """Grid-measured seminorm data for one function and one beta."""

    beta: float
    n: int
    t_grid: tuple
    x_grid: tuple
    sup_table: dict
    A_beta: float
    f_sup: float

    def __post_init__(self):
        if not self.n > self.beta:
            raise DomainError("derivative order must exceed beta")
        if list(self.t_grid) != sorted(self.t_grid):
            raise DomainError("t_grid must be ascending")


def sup_norm(g, x_grid) -> float:
    """max |g| over the grid; g maps a point (tuple) to a real."""
    if len(x_grid) == 0:
        raise DomainError("grid must be nonempty")
    return max(abs(float(g(x))) for x in x_grid)


def poisson_dt_expansion(e: LaguerreExpansion, t: float, n: int) -> LaguerreExpansion:
    """d^n/dt^n P_t e as an expansion: multiplier (-sqrt(m))^n e^(-t sqrt(m))."""
    coeffs = {}
    for k, c in e.coeffs.items():
        m = sum(k)
        coeffs[k] = c * (-math.sqrt(m)) ** n * math.exp(-t * math.sqrt(m))
    return LaguerreExpansion(e.params, e.degree, coeffs)


def _grid_matrix(x_grid):
    return np.asarray([list(x) for x in x_grid], dtype=float)


def _sup_dt(f, params, t, n, x_grid, method, rule):
    if method == "spectral":
        if not isinstance(f, LaguerreExpansion):
            raise DomainError("spectral path needs an expansion input")
        vals = synthesize_many(poisson_dt_expansion(f, t, n), _grid_matrix(x_grid))
        return float(np.max(np.abs(vals)))
    if method == "kernel":
        func = f
        if isinstance(f, LaguerreExpansion):
            def func(y):
                return synthesize_many(f, np.atleast_2d(y))[0] if params.d > 1 else \
                    float(synthesize_many(f, np.asarray([[y]]))[0])
        best = 0.0
        for x in x_grid:
            best = max(best, abs(poisson_dt_apply(func, params, t, x, n, rule)))
        return best
    raise DomainError(f"unknown method {method!r}")


def lipschitz_seminorm(
    f,
    params: MultiIndexParams,
    beta: float,
    t_grid=None,
    x_grid=None,
    method: str = "spectral",
    rule=DEFAULT_RULE,
) -> LipschitzEstimate:
    """Measure A_beta(f) = sup_t t^(n-beta) ||d^n/dt^n P_t f||_inf on grids."""
    if not beta > 0:
        raise DomainError("beta must be positive")
    n = smallest_integer_above(beta)
    t_grid = tuple(default_t_grid() if t_grid is None else t_grid)
    x_grid = tuple(default_x_grid(params.d) if x_grid is None else
                   tuple(tuple(np.atleast_1d(x)) for x in x_grid))
    sup_table = {t: _sup_dt(f, params, t, n, x_grid, method, rule) for t in t_grid}
    a_beta = max(t ** (n - beta) * s for t, s in sup_table.items())
    if isinstance(f, LaguerreExpansion):
        f_sup = float(np.max(np.abs(synthesize_many(f, _grid_matrix(x_grid)))))
    else:
        f_sup = sup_norm(lambda x: f(np.asarray(x) if params.d > 1 else x[0]), x_grid)
    return LipschitzEstimate(beta, n, t_grid, x_grid, sup_table, a_beta, f_sup)


def _seminorm_at_order(f, params, beta, n, t_grid, x_grid, method, rule):
    """sup_t t^(n-beta) ||d^n_t P_t f|| for a caller-chosen order n > beta."""
    sup_table = {t: _sup_dt(f, params, t, n, x_grid, method, rule) for t in t_grid}
    return max(t ** (n - beta) * s for t, s in sup_table.items())


def check_equivalence(
    f,
    params: MultiIndexParams,
    beta: float,
    k: int,
    l: int,
    t_grid=None,
    x_grid=None,
    ratio_window=(1.0 / 50.0, 50.0),
    method: str = "spectral",
) -> BoundReport:
    """Compare the order-k and order-l versions of the seminorm.

    Both are finite for smooth inputs; the measured ratio is recorded, with
    PASS meaning finite values inside the declared comparability window
    (the underlying equivalence provides no explicit constant).
    """
    if k <= beta or l <= beta:
        raise DomainError("both derivative orders must exceed beta")
    t_grid = tuple(default_t_grid() if t_grid is None else t_grid)
    x_grid = tuple(default_x_grid(params.d) if x_grid is None else x_grid)
    a_k = _seminorm_at_order(f, params, beta, k, t_grid, x_grid, method, DEFAULT_RULE)
    a_l = _seminorm_at_order(f, params, beta, l, t_grid, x_grid, method, DEFAULT_RULE)
    if a_k == 0.0 and a_l == 0.0:
        ratio = 1.0
    elif a_l == 0.0:
        ratio = math.inf
    else:
        ratio = a_k / a_l
    ok = math.isfinite(ratio) and ratio_window[0] <= ratio <= ratio_window[1]
    rows = (
        ReportRow(f"order={k}", a_k, math.inf),
        ReportRow(f"order={l}", a_l, math.inf),
        ReportRow("ratio", ratio, ratio_window[1]),
    )
    return BoundReport(
        scenario="prop31",
        claim="seminorms built from any two derivative orders above beta "
        "are equivalent up to a constant",
        config={"beta": beta, "k": k, "l": l},
        rows=rows,
        max_ratio=ratio,
        passed=ok,
    )


def check_approximation(
    f,
    params: MultiIndexParams,
    beta: float,
    t_grid=None,
    x_grid=None,
    tol: float = 0.05,
    method: str = "spectral",
) -> BoundReport:
    """||P_t f - f||_inf against A_beta(f) t^beta on the grids."""
    if not 0 < beta < 1:
        raise DomainError("approximation check needs beta in (0, 1)")
    t_grid = tuple(default_t_grid() if t_grid is None else t_grid)
    x_grid = tuple(default_x_grid(params.d) if x_grid is None else x_grid)
    est = lipschitz_seminorm(f, params, beta, t_grid, x_grid, method=method)
    xs = _grid_matrix(x_grid)
    if not isinstance(f, LaguerreExpansion):
        raise DomainError("approximation check is defined on expansions")
    f_vals = synthesize_many(f, xs)
    rows = []
    worst = 0.0
    for t in t_grid:
        pt = synthesize_many(spectral_apply(poisson(t), f), xs)
        measured = float(np.max(np.abs(pt - f_vals)))
        bound = (1.0 + tol) * est.A_beta * t**beta
        rows.append(ReportRow(f"t={t:.6g}", measured, bound))
        if bound > 0:
            worst = max(worst, measured / bound)
    return BoundReport(
        scenario="prop33",
        claim="the semigroup approximates a Lipschitz function at rate t^beta "
        "with constant A_beta",
        config={"beta": beta, "tol": tol},
        rows=tuple(rows),
        max_ratio=worst,
        passed=all(r.measured <= r.bound for r in rows),
    )


def check_pminusI_power(
    f,
    params: MultiIndexParams,
    n: int,
    beta: float,
    t_grid=None,
    x_grid=None,
) -> BoundReport:
    """Grid sup of |(P_t - I)^n f| against 2^n ||f||_inf and A_beta t^beta."""
    if n != smallest_integer_above(beta):
        raise DomainError("n must be the smallest integer above beta")
    if not isinstance(f, LaguerreExpansion):
        raise DomainError("this check is defined on expansions")
    t_grid = tuple(default_t_grid() if t_grid is None else t_grid)
    x_grid = tuple(default_x_grid(params.d) if x_grid is None else x_grid)
    xs = _grid_matrix(x_grid)
    est = lipschitz_seminorm(f, params, beta, t_grid, x_grid)
    f_sup = est.f_sup
    # n-fold simplex integral of v^(beta-n) over [0,t]^n equals
    # C(n, beta) t^beta with C = Delta_1^n(x^beta, 0) / prod_(i<n) (beta-i)
    denom = 1.0
    for i in range(n):
        denom *= beta - i
    simplex_c = forward_difference(lambda u: u**beta, n, 1.0, 0.0) / denom
    rows = []
    for t in t_grid:
        # (P_t - I)^n acts diagonally with multiplier (e^(-t sqrt(m)) - 1)^n
        coeffs = {
            k: c * math.expm1(-t * math.sqrt(sum(k))) ** n
            for k, c in f.coeffs.items()
        }
        g = LaguerreExpansion(f.params, f.degree, coeffs)
        measured = float(np.max(np.abs(synthesize_many(g, xs))))
        rows.append(ReportRow(f"t={t:.6g},uniform", measured, 2.0**n * f_sup))
        rows.append(
            ReportRow(f"t={t:.6g},holder", measured, simplex_c * est.A_beta * t**beta)
        )
    ratios = [r.measured / r.bound for r in rows if r.bound > 0]
    return BoundReport(
        scenario="pminusI",
        claim="powers of (P_t - I) are uniformly bounded by 2^n ||f|| and "
        "decay like t^beta on Lipschitz inputs",
        config={"beta": beta, "n": n},
        rows=tuple(rows),
        max_ratio=max(ratios) if ratios else 0.0,
        passed=all(r.measured <= r.bound * (1 + 1e-12) for r in rows),
    )
