"""Central and noncentral Student-t CDFs and quantiles.

These four functions are the numeric substrate for every power and
sample-size computation in the package.  The central CDF is the usual
incomplete-beta closed form.  The noncentral CDF uses the classic series
over regularized incomplete-beta terms,

    P(T' <= t) = Phi(-ncp) + sum_j [ p_j I_x(j+1/2, df/2) + q_j I_x(j+1, df/2) ],

for t >= 0 with x = t^2/(t^2+df), Poisson-type weights
p_j = (1/2) e^{-L} L^j / j!  and  q_j = (ncp/sqrt(2)) e^{-L} L^j / Gamma(j+3/2),
L = ncp^2/2, and the reflection F(t; ncp) = 1 - F(-t; -ncp) for t < 0.
The series is summed outward from the Poisson mode in log space with an
absolute truncation tolerance of 1e-12; for |ncp| > 40 (or on the rare
failure to converge) the CDF falls back to adaptive quadrature of

    F(t) = E_V[ Phi(t sqrt(V/df) - ncp) ],   V/df ~ Gamma(df/2, rate=df/2).

Quantiles are found by bracketed root-finding on the CDFs: robust over
fast, which is fine since a full experiment design needs only O(100)
quantile evaluations.  Degrees of freedom are accepted as any positive
real, so the large-df normal limit is directly testable.
"""

from __future__ import annotations

import math
from functools import lru_cache

from scipy import integrate, optimize, special

__all__ = ["t_cdf", "t_quantile", "noncentral_t_cdf", "noncentral_t_quantile"]

SERIES_TOL = 1e-12          # absolute truncation tolerance of the beta series
SERIES_NCP_MAX = 40.0       # beyond this, quadrature is used instead
_SERIES_MAX_TERMS = 100_000
QUANTILE_PTOL = 1e-9        # |t_cdf(t_quantile(p)) - p| guarantee
NC_QUANTILE_PTOL = 1e-8     # same for the noncentral quantile
_BRACKET_LIMIT = 1e300


def _check_df(df: float) -> float:
    df = float(df)
    if not math.isfinite(df) or df <= 0.0:
        raise ValueError(f"degrees of freedom must be a positive finite real, got {df!r}")
    return df


def _check_prob(p: float) -> float:
    p = float(p)
    if not (0.0 < p < 1.0):
        raise ValueError(f"probability must lie strictly in (0, 1), got {p!r}")
    return p


def t_cdf(x: float, df: float) -> float:
    """P(T <= x) for the central Student-t distribution."""
    df = _check_df(df)
    x = float(x)
    if not math.isfinite(x):
        raise ValueError(f"x must be finite, got {x!r}")
    if x == 0.0:
        return 0.5
    # one-tail mass via the regularized incomplete beta
    u = df / (df + x * x)
    tail = 0.5 * float(special.betainc(0.5 * df, 0.5, u))
    return 1.0 - tail if x > 0.0 else tail


def t_quantile(p: float, df: float) -> float:
    """Inverse of :func:`t_cdf`; antisymmetric around p = 1/2 by construction."""
    p = _check_prob(p)
    df = _check_df(df)
    if p == 0.5:
        return 0.0
    if p < 0.5:
        return -_t_upper_quantile(1.0 - p, df)
    return _t_upper_quantile(p, df)


@lru_cache(maxsize=4096)
def _t_upper_quantile(p: float, df: float) -> float:
    hi = 1.0
    while t_cdf(hi, df) < p:
        hi *= 2.0
        if hi > _BRACKET_LIMIT:
            raise ValueError(f"quantile bracket overflow for p={p}, df={df}")
    return float(optimize.brentq(lambda x: t_cdf(x, df) - p, 0.0, hi,
                                 xtol=1e-14, rtol=8.9e-16, maxiter=200))


def noncentral_t_cdf(x: float, df: float, ncp: float) -> float:
    """P(T' <= x) for the noncentral t with noncentrality ``ncp``.

    Reduces exactly to :func:`t_cdf` at ncp = 0 and is nonincreasing in
    ncp for fixed x.
    """
    df = _check_df(df)
    x = float(x)
    ncp = float(ncp)
    if not math.isfinite(x) or not math.isfinite(ncp):
        raise ValueError(f"x and ncp must be finite, got x={x!r}, ncp={ncp!r}")
    if ncp == 0.0:
        return t_cdf(x, df)
    if x < 0.0:
        # -T'(ncp) is distributed as T'(-ncp)
        return 1.0 - _nct_cdf_nonneg(-x, df, -ncp)
    return _nct_cdf_nonneg(x, df, ncp)


def _nct_cdf_nonneg(t: float, df: float, delta: float) -> float:
    # t >= 0 here; delta may have either sign
    if abs(delta) > SERIES_NCP_MAX:
        return _nct_cdf_quadrature(t, df, delta)
    val = _nct_cdf_series(t, df, delta)
    if val is None:
        return _nct_cdf_quadrature(t, df, delta)
    return min(1.0, max(0.0, val))


def _nct_cdf_series(t: float, df: float, delta: float) -> float | None:
    """Incomplete-beta series for t >= 0; None if it fails to converge."""
    base = float(special.ndtr(-delta))
    if t == 0.0:
        return base
    lam = 0.5 * delta * delta
    x = t * t / (t * t + df)
    b = 0.5 * df
    sign_q = 1.0 if delta > 0 else -1.0

    # log weights at the Poisson mode, then recur outward in both directions
    j0 = max(int(lam), 0)
    log_lam = math.log(lam)
    lp0 = -lam + j0 * log_lam - float(special.gammaln(j0 + 1))
    lq0 = (math.log(abs(delta)) - 0.5 * math.log(2.0)
           - lam + j0 * log_lam - float(special.gammaln(j0 + 1.5)))
    p0 = math.exp(lp0)
    q0 = math.exp(lq0)

    def term(j: int, p: float, q: float) -> float:
        ib1 = float(special.betainc(j + 0.5, b, x))
        ib2 = float(special.betainc(j + 1.0, b, x))
        return 0.5 * p * ib1 + 0.5 * sign_q * q * ib2

    acc = 0.0
    # upward sweep from the mode
    p, q = p0, q0
    j = j0
    while True:
        acc += term(j, p, q)
        j += 1
        p *= lam / j
        q *= lam / (j + 0.5)
        if j > lam and 0.5 * (p + q) < SERIES_TOL:
            # geometric tail bound: remaining mass <= current/(1 - lam/(j+1))
            ratio = lam / (j + 1.0)
            if 0.5 * (p + q) / max(1.0 - ratio, 0.1) < SERIES_TOL:
                break
        if j - j0 > _SERIES_MAX_TERMS:
            return None
    # downward sweep below the mode
    p, q = p0, q0
    j = j0
    while j > 0:
        p *= j / lam
        q *= (j + 0.5) / lam
        j -= 1
        tj = term(j, p, q)
        acc += tj
        if tj < SERIES_TOL and 0.5 * (p + q) < SERIES_TOL:
            break
    return base + acc


def _nct_cdf_quadrature(t: float, df: float, delta: float) -> float:
    """F(t) = int_0^inf Phi(t sqrt(u) - delta) g(u) du, u = V/df ~ Gamma(df/2, df/2)."""
    half = 0.5 * df
    log_norm = half * math.log(half) - float(special.gammaln(half))

    def integrand(u: float) -> float:
        if u <= 0.0:
            return 0.0
        log_g = log_norm + (half - 1.0) * math.log(u) - half * u
        return float(special.ndtr(t * math.sqrt(u) - delta)) * math.exp(log_g)

    # the Gamma weight has mean 1; split there for the infinite tail
    a, _ = integrate.quad(integrand, 0.0, 1.0, epsabs=1e-13, epsrel=1e-11, limit=400)
    c, _ = integrate.quad(integrand, 1.0, math.inf, epsabs=1e-13, epsrel=1e-11, limit=400)
    return min(1.0, max(0.0, a + c))


def noncentral_t_quantile(p: float, df: float, ncp: float) -> float:
    """Inverse of :func:`noncentral_t_cdf` in its first argument."""
    p = _check_prob(p)
    df = _check_df(df)
    ncp = float(ncp)
    if not math.isfinite(ncp):
        raise ValueError(f"ncp must be finite, got {ncp!r}")
    if ncp == 0.0:
        return t_quantile(p, df)

    def f(x: float) -> float:
        return noncentral_t_cdf(x, df, ncp) - p

    # expand a bracket around the ncp (the distribution's center of mass)
    width = 1.0
    lo, hi = ncp - width, ncp + width
    while f(lo) > 0.0:
        width *= 2.0
        lo = ncp - width
        if width > _BRACKET_LIMIT:
            raise ValueError(f"quantile bracket overflow for p={p}, df={df}, ncp={ncp}")
    width = 1.0
    while f(hi) < 0.0:
        width *= 2.0
        hi = ncp + width
        if width > _BRACKET_LIMIT:
            raise ValueError(f"quantile bracket overflow for p={p}, df={df}, ncp={ncp}")
    root = float(optimize.brentq(f, lo, hi, xtol=1e-13, rtol=8.9e-16, maxiter=200))
    return root
