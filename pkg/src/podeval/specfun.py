"""Scalar special functions and distribution quantiles.

Only what the POD machinery needs: log-gamma, the regularized incomplete
gamma and beta functions, the standard normal CDF, and quantiles of the
normal, F and chi-square distributions. Everything is implemented here on
top of :mod:`math`; no third-party special-function library is used.

All quantiles are computed by a bracketed root search on the CDF: Newton
steps are taken whenever they stay inside the current bracket, bisection
otherwise.
"""

import math

from .errors import DomainError

__all__ = [
    "log_gamma",
    "reg_inc_gamma",
    "reg_inc_gamma_upper",
    "reg_inc_beta",
    "inv_reg_inc_beta",
    "normal_cdf",
    "normal_pdf",
    "normal_quantile",
    "f_cdf",
    "f_quantile",
    "chi2_cdf",
    "chi2_quantile",
]

_EPS = 2.220446049250313e-16
_TINY = 1e-300
_LN_SQRT_2PI = 0.5 * math.log(2.0 * math.pi)
_MAX_CF_ITER = 20000

# Lanczos approximation, g = 7, n = 9.
_LANCZOS_G = 7.0
_LANCZOS = (
    0.99999999999980993,
    676.5203681218851,
    -1259.1392167224028,
    771.32342877765313,
    -176.61502916214059,
    12.507343278686905,
    -0.13857109526572012,
    9.9843695780195716e-6,
    1.5056327351493116e-7,
)
_EULER_GAMMA = 0.57721566490153286061


def _zeta(k):
    # Euler-Maclaurin tail after 20 explicit terms; full double precision for k >= 2.
    n = 20
    s = math.fsum(j ** -k for j in range(1, n))
    s += n ** (1 - k) / (k - 1) + 0.5 * n ** -k
    s += k * n ** (-k - 1) / 12.0
    s -= k * (k + 1) * (k + 2) * n ** (-k - 3) / 720.0
    s += k * (k + 1) * (k + 2) * (k + 3) * (k + 4) * n ** (-k - 5) / 30240.0
    return s


# (-1)^k zeta(k) / k for the Taylor series of ln Gamma(1 + e).
_LGAMMA_TAYLOR = tuple((-1) ** k * _zeta(k) / k for k in range(2, 60))


def _log_gamma_near_one(e):
    # ln Gamma(1 + e) = -gamma*e + sum_{k>=2} (-1)^k zeta(k) e^k / k, |e| <= 0.25
    total = 0.0
    power = e
    for c in _LGAMMA_TAYLOR:
        power *= e
        term = c * power
        total += term
        if abs(term) < 1e-18 * abs(total):
            break
    return total - _EULER_GAMMA * e


def _lanczos_log_gamma(x):
    z = x - 1.0
    acc = _LANCZOS[0]
    for i in range(1, 9):
        acc += _LANCZOS[i] / (z + i)
    t = z + _LANCZOS_G + 0.5
    return _LN_SQRT_2PI + (z + 0.5) * math.log(t) - t + math.log(acc)


def log_gamma(x):
    """Natural logarithm of the gamma function for ``x > 0``.

    Near the zeros of ln Gamma (x = 1 and x = 2) a Taylor series is used so
    that the result keeps its relative accuracy.
    """
    x = float(x)
    if not x > 0.0 or math.isinf(x):
        raise DomainError(f"log_gamma requires finite x > 0, got {x!r}")
    if abs(x - 1.0) <= 0.25:
        return _log_gamma_near_one(x - 1.0)
    if abs(x - 2.0) <= 0.25:
        e = x - 2.0
        return math.log1p(e) + _log_gamma_near_one(e)
    if x < 0.5:
        return math.log(math.pi / math.sin(math.pi * x)) - _lanczos_log_gamma(1.0 - x)
    return _lanczos_log_gamma(x)


# ---------------------------------------------------------------------------
# incomplete gamma


def _gamma_prefactor(a, x):
    return math.exp(a * math.log(x) - x - log_gamma(a))


def _gamma_series(a, x):
    # P(a, x) by the power series, valid for x < a + 1
    ap = a
    term = 1.0 / a
    total = term
    for _ in range(_MAX_CF_ITER):
        ap += 1.0
        term *= x / ap
        total += term
        if abs(term) < abs(total) * _EPS:
            break
    return total * _gamma_prefactor(a, x)


def _gamma_cfrac(a, x):
    # Q(a, x) by modified Lentz continued fraction, valid for x >= a + 1
    b = x + 1.0 - a
    c = 1.0 / _TINY
    d = 1.0 / b
    h = d
    for i in range(1, _MAX_CF_ITER):
        an = -i * (i - a)
        b += 2.0
        d = an * d + b
        if abs(d) < _TINY:
            d = _TINY
        c = b + an / c
        if abs(c) < _TINY:
            c = _TINY
        d = 1.0 / d
        delta = d * c
        h *= delta
        if abs(delta - 1.0) < _EPS:
            break
    return h * _gamma_prefactor(a, x)


def _check_gamma_args(a, x):
    if not a > 0.0 or math.isinf(a):
        raise DomainError(f"shape parameter must be positive, got {a!r}")
    if not x >= 0.0:
        raise DomainError(f"incomplete gamma requires x >= 0, got {x!r}")


def reg_inc_gamma(a, x):
    """Regularized lower incomplete gamma P(a, x)."""
    a, x = float(a), float(x)
    _check_gamma_args(a, x)
    if x == 0.0:
        return 0.0
    if math.isinf(x):
        return 1.0
    if x < a + 1.0:
        return min(1.0, _gamma_series(a, x))
    return max(0.0, 1.0 - _gamma_cfrac(a, x))


def reg_inc_gamma_upper(a, x):
    """Regularized upper incomplete gamma Q(a, x) = 1 - P(a, x)."""
    a, x = float(a), float(x)
    _check_gamma_args(a, x)
    if x == 0.0:
        return 1.0
    if math.isinf(x):
        return 0.0
    if x < a + 1.0:
        return max(0.0, 1.0 - _gamma_series(a, x))
    return min(1.0, _gamma_cfrac(a, x))


# ---------------------------------------------------------------------------
# incomplete beta


def _beta_cfrac(a, b, x):
    qab = a + b
    qap = a + 1.0
    qam = a - 1.0
    c = 1.0
    d = 1.0 - qab * x / qap
    if abs(d) < _TINY:
        d = _TINY
    d = 1.0 / d
    h = d
    for m in range(1, _MAX_CF_ITER):
        m2 = 2 * m
        aa = m * (b - m) * x / ((qam + m2) * (a + m2))
        d = 1.0 + aa * d
        if abs(d) < _TINY:
            d = _TINY
        c = 1.0 + aa / c
        if abs(c) < _TINY:
            c = _TINY
        d = 1.0 / d
        h *= d * c
        aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2))
        d = 1.0 + aa * d
        if abs(d) < _TINY:
            d = _TINY
        c = 1.0 + aa / c
        if abs(c) < _TINY:
            c = _TINY
        d = 1.0 / d
        delta = d * c
        h *= delta
        if abs(delta - 1.0) < _EPS:
            break
    return h


def _log_beta(a, b):
    return log_gamma(a) + log_gamma(b) - log_gamma(a + b)


def _check_beta_shapes(a, b):
    if not (a > 0.0 and b > 0.0) or math.isinf(a) or math.isinf(b):
        raise DomainError(f"beta shape parameters must be positive, got a={a!r}, b={b!r}")


def reg_inc_beta(a, b, x):
    """Regularized incomplete beta function I_x(a, b).

    Evaluated by continued fraction, switching to ``1 - I_{1-x}(b, a)``
    when ``x > (a + 1) / (a + b + 2)``.
    """
    a, b, x = float(a), float(b), float(x)
    _check_beta_shapes(a, b)
    if not 0.0 <= x <= 1.0:
        raise DomainError(f"reg_inc_beta requires 0 <= x <= 1, got {x!r}")
    if x == 0.0:
        return 0.0
    if x == 1.0:
        return 1.0
    log_front = a * math.log(x) + b * math.log1p(-x) - _log_beta(a, b)
    front = math.exp(log_front)
    if x < (a + 1.0) / (a + b + 2.0):
        value = front * _beta_cfrac(a, b, x) / a
    else:
        value = 1.0 - front * _beta_cfrac(b, a, 1.0 - x) / b
    return min(1.0, max(0.0, value))


def _beta_log_pdf(a, b, x):
    return (a - 1.0) * math.log(x) + (b - 1.0) * math.log1p(-x) - _log_beta(a, b)


# ---------------------------------------------------------------------------
# generic safeguarded root search


def _invert_increasing(func, dfunc, target, lo, hi, x0=None, max_iter=300):
    """Solve ``func(x) = target`` for nondecreasing ``func`` on ``[lo, hi]``.

    ``dfunc`` returns the derivative or None when unavailable. The bracket is
    kept throughout; Newton steps that leave it are replaced by bisection.
    """
    x = 0.5 * (lo + hi) if x0 is None or not lo < x0 < hi else x0
    for _ in range(max_iter):
        fx = func(x) - target
        if fx == 0.0:
            return x
        if fx > 0.0:
            hi = x
        else:
            lo = x
        slope = dfunc(x)
        x_new = None
        if slope is not None and slope > 0.0 and math.isfinite(slope):
            candidate = x - fx / slope
            if lo < candidate < hi:
                x_new = candidate
        if x_new is None:
            x_new = 0.5 * (lo + hi)
        if abs(x_new - x) <= 4.0 * _EPS * max(abs(x), 1e-300) or hi - lo <= 4.0 * _EPS * max(abs(lo), abs(hi), 1e-300):
            return x_new
        x = x_new
    return x


def _beta_lower_root(a, b, p):
    """x in (0, 0.5] with I_x(a, b) = p; requires p <= I_0.5(a, b)."""

    def density(x):
        if x <= 0.0 or x >= 1.0:
            return None
        return math.exp(_beta_log_pdf(a, b, x))

    return _invert_increasing(lambda x: reg_inc_beta(a, b, x), density, p, 0.0, 0.5,
                              x0=min(0.25, a / (a + b)))


def _beta_quantile_pair(a, b, p):
    """Return ``(x, 1 - x)`` for the Beta(a, b) quantile, both to full relative precision."""
    if p <= reg_inc_beta(a, b, 0.5):
        x = _beta_lower_root(a, b, p)
        return x, 1.0 - x
    y = _beta_lower_root(b, a, 1.0 - p)
    return 1.0 - y, y


def inv_reg_inc_beta(a, b, p):
    """Inverse of the regularized incomplete beta function in ``x``."""
    a, b, p = float(a), float(b), float(p)
    _check_beta_shapes(a, b)
    if not 0.0 <= p <= 1.0:
        raise DomainError(f"inv_reg_inc_beta requires 0 <= p <= 1, got {p!r}")
    if p == 0.0:
        return 0.0
    if p == 1.0:
        return 1.0
    return _beta_quantile_pair(a, b, p)[0]


# ---------------------------------------------------------------------------
# normal distribution


def normal_pdf(z):
    return math.exp(-0.5 * z * z - _LN_SQRT_2PI)


def normal_cdf(z):
    """Standard normal CDF, via Phi(z) = Q(1/2, z^2/2) / 2 for z < 0."""
    z = float(z)
    if math.isnan(z):
        raise DomainError("normal_cdf of NaN")
    if z == 0.0:
        return 0.5
    tail = 0.5 * reg_inc_gamma_upper(0.5, 0.5 * z * z)
    return tail if z < 0.0 else 1.0 - tail


def _normal_tail_quantile(p):
    # p <= 0.5; returns z <= 0
    if p == 0.5:
        return 0.0
    t = math.sqrt(-2.0 * math.log(p))
    # Abramowitz & Stegun 26.2.23 as the starting point
    z0 = -(t - (2.515517 + 0.802853 * t + 0.010328 * t * t)
           / (1.0 + 1.432788 * t + 0.189269 * t * t + 0.001308 * t ** 3))
    return _invert_increasing(normal_cdf, normal_pdf, p, -40.0, 0.0, x0=z0)


def normal_quantile(p):
    """Inverse of the standard normal CDF for ``0 < p < 1``."""
    p = float(p)
    if not 0.0 < p < 1.0:
        raise DomainError(f"normal_quantile requires 0 < p < 1, got {p!r}")
    if p <= 0.5:
        return _normal_tail_quantile(p)
    return -_normal_tail_quantile(1.0 - p)


# ---------------------------------------------------------------------------
# F and chi-square


def _check_dof(*dofs):
    for d in dofs:
        if not d >= 1 or math.isinf(d):
            raise DomainError(f"degrees of freedom must be >= 1, got {d!r}")


def _check_prob_open(p):
    if not 0.0 < p < 1.0:
        raise DomainError(f"probability must lie in (0, 1), got {p!r}")


def f_cdf(f, d1, d2):
    """CDF of the F(d1, d2) distribution."""
    _check_dof(d1, d2)
    if f <= 0.0:
        return 0.0
    return reg_inc_beta(0.5 * d1, 0.5 * d2, d1 * f / (d1 * f + d2))


def f_quantile(p, d1, d2):
    """Quantile of F(d1, d2), from the incomplete-beta relation.

    With x ~ Beta(d1/2, d2/2), F = (d2 / d1) * x / (1 - x).
    """
    p = float(p)
    _check_prob_open(p)
    _check_dof(d1, d2)
    x, y = _beta_quantile_pair(0.5 * d1, 0.5 * d2, p)
    return (d2 * x) / (d1 * y)


def chi2_cdf(x, k):
    _check_dof(k)
    if x <= 0.0:
        return 0.0
    return reg_inc_gamma(0.5 * k, 0.5 * x)


def chi2_quantile(p, k):
    """Quantile of the chi-square distribution with ``k`` degrees of freedom."""
    p = float(p)
    _check_prob_open(p)
    _check_dof(k)
    half = 0.5 * k
    log_norm = half * math.log(2.0) + log_gamma(half)

    def density(x):
        if x <= 0.0:
            return None
        return math.exp((half - 1.0) * math.log(x) - 0.5 * x - log_norm)

    hi = max(2.0 * k, 4.0)
    if p <= 0.5:
        while chi2_cdf(hi, k) < p:
            hi *= 2.0
        return _invert_increasing(lambda x: chi2_cdf(x, k), density, p, 0.0, hi, x0=float(k))
    # upper tail: solve Q(x) = 1 - p to keep relative precision as p -> 1
    q = 1.0 - p
    while reg_inc_gamma_upper(half, 0.5 * hi) > q:
        hi *= 2.0
    return _invert_increasing(lambda x: -reg_inc_gamma_upper(half, 0.5 * x),
                              density, -q, 0.0, hi, x0=float(k))
