"""Finite Laguerre expansions and exact spectral operator action.

Coefficients live in the non-normalized basis {L_k^alpha}; every diagonal
operator acts by multiplying coefficient c_k by a scalar depending only on
the total order |k|.  This is the oracle path the kernel/quadrature
implementations are checked against.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field

import numpy as np

from .errors import DomainError, NonzeroMeanError
from .specfun import gauss_laguerre_rule, laguerre_poly, log_gamma

__all__ = [
    "MultiIndexParams",
    "MultiIndex",
    "LaguerreExpansion",
    "SpectralMultiplier",
    "enumerate_indices",
    "basis_norm_sq",
    "analyze",
    "synthesize",
    "spectral_apply",
    "pi0",
    "expansion_to_json",
    "expansion_from_json",
    "random_expansion",
]


@dataclass(frozen=True)
class MultiIndexParams:
    """Dimension and type multi-index alpha of the Laguerre setting."""

    d: int
    alpha: tuple

    def __post_init__(self):
        if self.d < 1:
            raise DomainError("dimension d must be >= 1")
        alpha = tuple(float(a) for a in self.alpha)
        if len(alpha) != self.d:
            raise DomainError("alpha must have length d")
        if any(a <= -1 for a in alpha):
            raise DomainError("every alpha_j must exceed -1")
        object.__setattr__(self, "alpha", alpha)

    @property
    def half_regime(self) -> bool:
        """True iff every alpha_j > -1/2 (hypothesis of the L1 kernel bounds)."""
        return min(self.alpha) > -0.5


@dataclass(frozen=True)
class MultiIndex:
    k: tuple

    def __post_init__(self):
        k = tuple(int(v) for v in self.k)
        if any(v < 0 for v in k):
            raise DomainError("multi-index entries must be nonnegative")
        object.__setattr__(self, "k", k)

    @property
    def order(self) -> int:
        return sum(self.k)


def enumerate_indices(d: int, degree: int) -> list:
    """All multi-indices with |k| <= degree, graded lexicographic order."""
    if degree < 0:
        raise DomainError("degree must be >= 0")

    def _compositions(n, parts):
        if parts == 1:
            yield (n,)
            return
        for first in range(n, -1, -1):
            for rest in _compositions(n - first, parts - 1):
                yield (first,) + rest

    out = []
    for n in range(degree + 1):
        out.extend(MultiIndex(k) for k in sorted(_compositions(n, d)))
    return out


def basis_norm_sq(k, params: MultiIndexParams) -> float:
    """Squared mu_alpha-norm of L_k^alpha: prod binom(k_j + alpha_j, k_j)."""
    kt = k.k if isinstance(k, MultiIndex) else tuple(k)
    log_h = 0.0
    for kj, aj in zip(kt, params.alpha):
        log_h += log_gamma(kj + aj + 1.0) - log_gamma(kj + 1.0) - log_gamma(aj + 1.0)
    return math.exp(log_h)


@dataclass(frozen=True)
class LaguerreExpansion:
    """Finite coefficient table c_k over |k| <= degree, non-normalized basis."""

    params: MultiIndexParams
    degree: int
    coeffs: dict = field(default_factory=dict)

    def __post_init__(self):
        clean = {}
        for k, c in self.coeffs.items():
            kt = k.k if isinstance(k, MultiIndex) else tuple(int(v) for v in k)
            if len(kt) != self.params.d:
                raise DomainError("coefficient index has wrong dimension")
            if sum(kt) > self.degree:
                raise DomainError(f"index {kt} exceeds expansion degree {self.degree}")
            clean[kt] = float(c)
        object.__setattr__(self, "coeffs", clean)

    def coeff(self, k) -> float:
        kt = k.k if isinstance(k, MultiIndex) else tuple(k)
        return self.coeffs.get(kt, 0.0)

    @property
    def mean(self) -> float:
        """Integral against mu_alpha (= coefficient of L_0)."""
        return self.coeffs.get((0,) * self.params.d, 0.0)


@dataclass(frozen=True)
class SpectralMultiplier:
    """Diagonal symbol m(|k|) of the operators in play.

    Kinds and their eigenvalues on L_k^alpha (n = |k|):
      heat(t):                 e^{-t n}
      poisson(t):              e^{-t sqrt(n)}
      bessel_potential(lam):   (1 + sqrt(n))^{-lam}
      fractional_integral(lam): n^{-lam/2},  n > 0 only
      fractional_derivative(lam): n^{lam/2}
      bessel_derivative(lam):  (1 + sqrt(n))^{lam}
    """

    kind: str
    param: float

    _KINDS = (
        "heat",
        "poisson",
        "bessel_potential",
        "fractional_integral",
        "fractional_derivative",
        "bessel_derivative",
    )

    def __post_init__(self):
        if self.kind not in self._KINDS:
            raise DomainError(f"unknown multiplier kind {self.kind!r}")
        if self.param <= 0 and self.kind != "heat":
            raise DomainError("multiplier parameter must be positive")

    def value(self, n: int) -> float:
        if n < 0:
            raise DomainError("order n must be nonnegative")
        if self.kind == "heat":
            return math.exp(-self.param * n)
        if self.kind == "poisson":
            return math.exp(-self.param * math.sqrt(n))
        if self.kind == "bessel_potential":
            return (1.0 + math.sqrt(n)) ** (-self.param)
        if self.kind == "bessel_derivative":
            return (1.0 + math.sqrt(n)) ** self.param
        if self.kind == "fractional_derivative":
            return float(n) ** (self.param / 2.0)
        # fractional_integral
        if n == 0:
            raise NonzeroMeanError(
                "fractional_integral is undefined at |k| = 0; project with pi0 first"
            )
        return float(n) ** (-self.param / 2.0)


def heat(t: float) -> SpectralMultiplier:
    return SpectralMultiplier("heat", t)


def poisson(t: float) -> SpectralMultiplier:
    return SpectralMultiplier("poisson", t)


def bessel_potential(lam: float) -> SpectralMultiplier:
    return SpectralMultiplier("bessel_potential", lam)


def fractional_integral(lam: float) -> SpectralMultiplier:
    return SpectralMultiplier("fractional_integral", lam)


def fractional_derivative(lam: float) -> SpectralMultiplier:
    return SpectralMultiplier("fractional_derivative", lam)


def bessel_derivative(lam: float) -> SpectralMultiplier:
    return SpectralMultiplier("bessel_derivative", lam)


def spectral_apply(m: SpectralMultiplier, e: LaguerreExpansion) -> LaguerreExpansion:
    """Apply the diagonal operator: c_k -> m(|k|) c_k."""
    zero = (0,) * e.params.d
    if m.kind == "fractional_integral" and e.coeffs.get(zero, 0.0) != 0.0:
        raise NonzeroMeanError(
            "fractional_integral requires a zero-mean expansion (apply pi0 first)"
        )
    new = {k: m.value(sum(k)) * c for k, c in e.coeffs.items() if not (
        m.kind == "fractional_integral" and sum(k) == 0)}
    return LaguerreExpansion(e.params, e.degree, new)


def pi0(e: LaguerreExpansion) -> LaguerreExpansion:
    """Remove the mu_alpha-mean: zero the L_0 coefficient."""
    new = dict(e.coeffs)
    new[(0,) * e.params.d] = 0.0
    return LaguerreExpansion(e.params, e.degree, new)


def _axis_tables(params: MultiIndexParams, degree: int, quad_points: int):
    """Per-axis Gauss-Laguerre rules and Laguerre polynomial tables."""
    rules = [gauss_laguerre_rule(a, quad_points) for a in params.alpha]
    tables = []
    for rule, a in zip(rules, params.alpha):
        tables.append(
            np.array([laguerre_poly(k, a, rule.nodes) for k in range(degree + 1)])
        )
    return rules, tables


def analyze(
    f, params: MultiIndexParams, degree: int, quad_points: int = None
) -> LaguerreExpansion:
    """Forward Laguerre transform by tensor Gauss-Laguerre quadrature.

    c_k = (integral of f * L_k^alpha d mu_alpha) / ||L_k^alpha||^2.
    Exact (to rounding) when f is a polynomial of low enough degree.
    """
    if quad_points is None:
        quad_points = max(2 * degree + 8, 24)
    if quad_points < degree + 1:
        raise DomainError("quad_points must be at least degree + 1 per axis")
    rules, tables = _axis_tables(params, degree, quad_points)
    grids = np.meshgrid(*[r.nodes for r in rules], indexing="ij")
    pts = np.stack([g.ravel() for g in grids], axis=-1)  # (M, d)
    if params.d == 1:
        fv = np.asarray(f(pts[:, 0]), dtype=float)
    else:
        fv = np.asarray(f(pts), dtype=float)
    w = rules[0].weights
    for r in rules[1:]:
        w = np.multiply.outer(w, r.weights)
    w = w.ravel()
    coeffs = {}
    for k in enumerate_indices(params.d, degree):
        basis = tables[0][k.k[0]]
        for ax in range(1, params.d):
            basis = np.multiply.outer(basis, tables[ax][k.k[ax]])
        c = float(np.dot(w, fv * basis.ravel())) / basis_norm_sq(k, params)
        coeffs[k.k] = c
    return LaguerreExpansion(params, degree, coeffs)


def synthesize(e: LaguerreExpansion, x) -> float:
    """Evaluate sum_k c_k L_k^alpha(x) at a single point x in (0, inf)^d."""
    xt = np.atleast_1d(np.asarray(x, dtype=float))
    if xt.shape != (e.params.d,):
        raise DomainError(f"point must have {e.params.d} coordinates")
    kmax = [max((k[j] for k in e.coeffs), default=0) for j in range(e.params.d)]
    tables = [
        [laguerre_poly(k, e.params.alpha[j], xt[j]) for k in range(kmax[j] + 1)]
        for j in range(e.params.d)
    ]
    total = 0.0
    for k, c in e.coeffs.items():
        term = c
        for j, kj in enumerate(k):
            term *= tables[j][kj]
        total += term
    return total


def synthesize_many(e: LaguerreExpansion, xs: np.ndarray) -> np.ndarray:
    """Vectorized synthesize over points; xs shape (m,) for d=1 or (m, d)."""
    xs = np.asarray(xs, dtype=float)
    if e.params.d == 1:
        pts = xs.reshape(-1, 1)
    else:
        pts = xs.reshape(-1, e.params.d)
    kmax = [max((k[j] for k in e.coeffs), default=0) for j in range(e.params.d)]
    tables = [
        np.array(
            [laguerre_poly(k, e.params.alpha[j], pts[:, j]) for k in range(kmax[j] + 1)]
        )
        for j in range(e.params.d)
    ]
    total = np.zeros(pts.shape[0])
    for k, c in e.coeffs.items():
        term = np.full(pts.shape[0], c)
        for j, kj in enumerate(k):
            term = term * tables[j][kj]
        total += term
    return total


def random_expansion(
    params: MultiIndexParams, degree: int, seed: int
) -> LaguerreExpansion:
    """Seeded expansion with coefficients uniform in [-1, 1] on |k| <= degree."""
    rng = np.random.default_rng(seed)
    coeffs = {
        k.k: float(rng.uniform(-1.0, 1.0)) for k in enumerate_indices(params.d, degree)
    }
    return LaguerreExpansion(params, degree, coeffs)


def _fmt(x: float) -> str:
    return format(float(x), ".17g")


def expansion_to_json(e: LaguerreExpansion) -> str:
    """Serialize to the documented JSON schema with 17-significant-digit floats."""
    coeff_items = ",".join(
        '{"k":[%s],"c":%s}' % (",".join(str(v) for v in k), _fmt(c))
        for k, c in sorted(e.coeffs.items())
    )
    alpha = ",".join(_fmt(a) for a in e.params.alpha)
    return '{"d":%d,"alpha":[%s],"N":%d,"coeffs":[%s]}' % (
        e.params.d,
        alpha,
        e.degree,
        coeff_items,
    )


def expansion_from_json(text: str) -> LaguerreExpansion:
    obj = json.loads(text)
    params = MultiIndexParams(d=int(obj["d"]), alpha=tuple(obj["alpha"]))
    coeffs = {tuple(item["k"]): float(item["c"]) for item in obj["coeffs"]}
    return LaguerreExpansion(params, int(obj["N"]), coeffs)
