"""Scalar special functions and quadrature rules.

Everything downstream consumes these: Gamma, the modified Bessel function
I_nu (ascending series and large-argument expansion), Laguerre polynomials,
and Gauss-Laguerre rules normalized against the Laguerre probability
measure mu_alpha (density x^alpha e^-x / Gamma(alpha+1) per axis).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.special import gammaln, logsumexp, roots_genlaguerre

from .errors import DomainError, PoleError, QuadratureError

__all__ = [
    "BesselBranchConfig",
    "QuadratureRule",
    "gamma",
    "log_gamma",
    "bessel_i_series",
    "asymptotic_coefficient",
    "bessel_i_asymptotic",
    "bessel_i",
    "log_bessel_i",
    "log_bessel_i_scaled",
    "laguerre_poly",
    "gauss_laguerre_rule",
]


@dataclass(frozen=True)
class BesselBranchConfig:
    """Truncation orders and branch split for I_nu evaluation.

    The ascending series is used for z <= switch_threshold, the
    large-argument expansion above it.  The default asymptotic order is
    chosen so the two branches agree to 1e-9 relative on the overlap
    window [z*, 2 z*]; three terms are nowhere near enough there.
    """

    series_terms: int = 40
    asymptotic_terms: int = 14
    switch_threshold: float = 15.0

    def __post_init__(self):
        if self.series_terms < 1:
            raise DomainError("series_terms must be >= 1")
        if self.asymptotic_terms < 1:
            raise DomainError("asymptotic_terms must be >= 1")
        if not self.switch_threshold > 0:
            raise DomainError("switch_threshold must be positive")


DEFAULT_BESSEL = BesselBranchConfig()


def gamma(x: float) -> float:
    """Gamma function; raises PoleError at 0, -1, -2, ..."""
    if x <= 0 and x == math.floor(x):
        raise PoleError(f"Gamma pole at x={x}")
    return math.gamma(x)


def log_gamma(x: float) -> float:
    """log Gamma(x) for x > 0 (overflow-safe norm ratios need this)."""
    if x <= 0:
        raise DomainError(f"log_gamma requires x > 0, got {x}")
    return math.lgamma(x)


def _log_series(nu: float, z: np.ndarray, terms: int) -> np.ndarray:
    # All series terms are positive for nu > -1, z > 0: logsumexp is exact
    # in the sense that no cancellation occurs.
    m = np.arange(terms, dtype=float)
    log_fact = gammaln(m + 1.0) + gammaln(m + nu + 1.0)
    with np.errstate(divide="ignore"):
        log_half_z = np.atleast_1d(np.log(z / 2.0))
    exps = (2.0 * m[:, None] + nu) * log_half_z[None, :] - log_fact[:, None]
    return logsumexp(exps, axis=0).reshape(np.shape(z))


def bessel_i_series(nu: float, z, cfg: BesselBranchConfig = DEFAULT_BESSEL):
    """Ascending-series evaluation of I_nu(z) for nu > -1, z >= 0."""
    if nu <= -1:
        raise DomainError(f"bessel_i_series requires nu > -1, got {nu}")
    z_arr = np.asarray(z, dtype=float)
    if np.any(z_arr < 0):
        raise DomainError("bessel_i_series requires z >= 0")
    out = np.exp(_log_series(nu, np.where(z_arr > 0, z_arr, 1.0), cfg.series_terms))
    zero = z_arr == 0
    if np.any(zero):
        at_zero = 1.0 if nu == 0 else (0.0 if nu > 0 else math.inf)
        out = np.where(zero, at_zero, out)
    return out if np.ndim(z) else float(out)


def asymptotic_coefficient(nu: float, r: int) -> float:
    """Coefficient [nu, r] of the large-argument expansion of I_nu.

    [nu, 0] = 1 and
    [nu, r] = (4 nu^2 - 1)(4 nu^2 - 3^2)...(4 nu^2 - (2r-1)^2) / (2^{2r} r!).
    """
    if r < 0:
        raise DomainError("r must be a nonnegative integer")
    num = 1.0
    for i in range(1, r + 1):
        num *= 4.0 * nu * nu - (2 * i - 1) ** 2
    return num / (4.0**r * math.factorial(r))


def _asymptotic_sum(nu: float, z: np.ndarray, terms: int) -> np.ndarray:
    s = np.zeros_like(z)
    for r in range(terms + 1):
        s += (-1.0) ** r * asymptotic_coefficient(nu, r) * (2.0 * z) ** (-float(r))
    return s


def bessel_i_asymptotic(nu: float, z, cfg: BesselBranchConfig = DEFAULT_BESSEL):
    """Large-argument evaluation: e^z / sqrt(2 pi z) * sum of [nu,r] terms."""
    z_arr = np.asarray(z, dtype=float)
    if np.any(z_arr <= 0):
        raise DomainError("bessel_i_asymptotic requires z > 0")
    out = np.exp(_log_asymptotic(nu, z_arr, cfg.asymptotic_terms))
    return out if np.ndim(z) else float(out)


def _log_asymptotic(nu: float, z: np.ndarray, terms: int) -> np.ndarray:
    s = _asymptotic_sum(nu, z, terms)
    if np.any(s <= 0):
        raise QuadratureError(
            "asymptotic correction sum is nonpositive; argument too small "
            "for the asymptotic branch"
        )
    return z - 0.5 * np.log(2.0 * math.pi * z) + np.log(s)


def log_bessel_i(nu: float, z, cfg: BesselBranchConfig = DEFAULT_BESSEL):
    """log I_nu(z), branch-dispatched at cfg.switch_threshold."""
    if nu <= -1:
        raise DomainError(f"log_bessel_i requires nu > -1, got {nu}")
    z_arr = np.atleast_1d(np.asarray(z, dtype=float))
    if np.any(z_arr < 0):
        raise DomainError("log_bessel_i requires z >= 0")
    out = np.empty_like(z_arr)
    small = z_arr <= cfg.switch_threshold
    if np.any(small):
        zs = z_arr[small]
        res = np.full_like(zs, -math.inf if nu > 0 else (0.0 if nu == 0 else math.inf))
        pos = zs > 0
        if np.any(pos):
            res[pos] = _log_series(nu, zs[pos], cfg.series_terms)
        out[small] = res
    if np.any(~small):
        out[~small] = _log_asymptotic(nu, z_arr[~small], cfg.asymptotic_terms)
    out = out.reshape(np.shape(z))
    return out if np.ndim(z) else float(out)


def log_bessel_i_scaled(nu: float, z, cfg: BesselBranchConfig = DEFAULT_BESSEL):
    """log(I_nu(z) e^{-z}); the e^z factor cancels analytically."""
    z_arr = np.atleast_1d(np.asarray(z, dtype=float))
    out = np.empty_like(z_arr)
    small = z_arr <= cfg.switch_threshold
    if np.any(small):
        out[small] = np.asarray(log_bessel_i(nu, z_arr[small], cfg)) - z_arr[small]
    if np.any(~small):
        zl = z_arr[~small]
        s = _asymptotic_sum(nu, zl, cfg.asymptotic_terms)
        if np.any(s <= 0):
            raise QuadratureError("asymptotic correction sum is nonpositive")
        out[~small] = -0.5 * np.log(2.0 * math.pi * zl) + np.log(s)
    out = out.reshape(np.shape(z))
    return out if np.ndim(z) else float(out)


def bessel_i(nu: float, z, cfg: BesselBranchConfig = DEFAULT_BESSEL):
    """I_nu(z), branch-dispatched."""
    out = np.exp(log_bessel_i(nu, z, cfg))
    return out if np.ndim(z) else float(out)


def laguerre_poly(k: int, alpha: float, x):
    """Generalized Laguerre polynomial L_k^alpha(x) by upward recurrence.

    (k+1) L_{k+1} = (2k+1+alpha-x) L_k - (k+alpha) L_{k-1},
    seeded L_0 = 1, L_1 = alpha + 1 - x.
    """
    if alpha <= -1:
        raise DomainError(f"laguerre_poly requires alpha > -1, got {alpha}")
    if k < 0:
        raise DomainError("k must be a nonnegative integer")
    x_arr = np.asarray(x, dtype=float)
    p_prev = np.ones_like(x_arr)
    if k == 0:
        return p_prev if np.ndim(x) else float(p_prev)
    p = alpha + 1.0 - x_arr
    for j in range(1, k):
        p, p_prev = ((2 * j + 1 + alpha - x_arr) * p - (j + alpha) * p_prev) / (j + 1), p
    return p if np.ndim(x) else float(p)


@dataclass(frozen=True)
class QuadratureRule:
    """Nodes and weights of a weighted quadrature rule on (0, inf) or (0, 1)."""

    nodes: np.ndarray
    weights: np.ndarray
    weight_kind: str  # "laguerre-measure" | "lebesgue-halfline" | "unit-interval-log"
    exact_degree: int

    def __post_init__(self):
        if len(self.nodes) != len(self.weights):
            raise DomainError("nodes and weights must have equal length")
        if np.any(np.diff(self.nodes) <= 0):
            raise DomainError("nodes must be strictly increasing")

    def integrate(self, f) -> float:
        return float(np.dot(self.weights, f(self.nodes)))


def gauss_laguerre_rule(alpha: float, n: int) -> QuadratureRule:
    """Gauss rule for the single-factor Laguerre probability measure.

    Nodes are the roots of L_n^alpha; weights are normalized so that they
    sum to 1 (mu_alpha is a probability measure).  Exact for polynomials of
    degree <= 2n - 1.
    """
    if alpha <= -1:
        raise DomainError(f"gauss_laguerre_rule requires alpha > -1, got {alpha}")
    if n < 1:
        raise DomainError("n must be a positive integer")
    try:
        nodes, weights = roots_genlaguerre(n, alpha)
    except Exception as exc:  # pragma: no cover - scipy signals its own failures
        raise QuadratureError(f"Gauss-Laguerre node solve failed: {exc}") from exc
    if not np.all(np.isfinite(nodes)) or not np.all(np.isfinite(weights)):
        raise QuadratureError("Gauss-Laguerre node solve returned non-finite values")
    # roots_genlaguerre weights integrate against x^alpha e^-x dx; divide by
    # Gamma(alpha+1) to target the probability measure.
    weights = weights / math.gamma(alpha + 1.0)
    return QuadratureRule(
        nodes=nodes, weights=weights, weight_kind="laguerre-measure", exact_degree=2 * n - 1
    )
