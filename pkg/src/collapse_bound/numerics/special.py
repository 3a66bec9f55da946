"""Bessel functions of order 0 and 1, exponentially scaled modified Bessel
functions, the complementary error function and zeros of J0.

All kernels are scalar and numba-compatible; the public wrappers validate
input and broadcast over arrays.
"""
import math

import numpy as np

from .._jit import njit
from ..errors import DomainError

_SQRT_PI = math.sqrt(math.pi)
_INV_SQRT2 = 1.0 / math.sqrt(2.0)

# Switch-over points between expansions; chosen so every branch stays near
# machine precision (checked against mpmath in the test-suite).
_J_SERIES_MAX = 2.0
_J_MILLER_MAX = 25.0
_I_SERIES_MAX = 30.0
_ERFC_SERIES_MAX = 2.0


@njit
def _j01_series(x):
    q = 0.25 * x * x
    t0 = 1.0
    t1 = 1.0
    s0 = 1.0
    s1 = 1.0
    for k in range(1, 60):
        t0 *= -q / (k * k)
        t1 *= -q / (k * (k + 1))
        s0 += t0
        s1 += t1
        if abs(t0) < 1e-18 and abs(t1) < 1e-18:
            break
    return s0, 0.5 * x * s1


@njit
def _j01_miller(x):
    # Backward recurrence normalised with J0 + 2 sum J_2k = 1.
    n = 2 * (int(0.5 * x) + 30)
    jp1 = 0.0
    jk = 1.0
    norm = 0.0
    j1 = 0.0
    for k in range(n, 0, -1):
        jm1 = (2.0 * k / x) * jk - jp1
        jp1 = jk
        jk = jm1
        if abs(jk) > 1e250:
            jk *= 1e-250
            jp1 *= 1e-250
            norm *= 1e-250
            j1 *= 1e-250
        if k - 1 == 1:
            j1 = jk
        if k - 1 > 0 and (k - 1) % 2 == 0:
            norm += 2.0 * jk
    norm += jk
    return jk / norm, j1 / norm


@njit
def _hankel_pq(mu, x):
    # P and Q of the Hankel expansion, mu = 4 nu^2
    p = 1.0
    q = 0.0
    term = 1.0
    prev = 1e300
    for k in range(1, 200):
        term *= (mu - (2 * k - 1) ** 2) / (8.0 * k * x)
        a = abs(term)
        if a > prev:
            break
        prev = a
        if k % 4 == 1:
            q += term
        elif k % 4 == 2:
            p -= term
        elif k % 4 == 3:
            q -= term
        else:
            p += term
        if a < 1e-17:
            break
    return p, q


@njit
def _j01_asymptotic(x):
    c = math.cos(x)
    s = math.sin(x)
    amp = math.sqrt(2.0 / (math.pi * x))
    p0, q0 = _hankel_pq(0.0, x)
    p1, q1 = _hankel_pq(4.0, x)
    # chi0 = x - pi/4, chi1 = x - 3pi/4, expanded to avoid cancellation in x - const
    cos0 = (c + s) * _INV_SQRT2
    sin0 = (s - c) * _INV_SQRT2
    cos1 = (s - c) * _INV_SQRT2
    sin1 = -(s + c) * _INV_SQRT2
    j0 = amp * (p0 * cos0 - q0 * sin0)
    j1 = amp * (p1 * cos1 - q1 * sin1)
    return j0, j1


@njit
def j01(x):
    """Return ``(J0(x), J1(x))`` for finite real ``x``."""
    ax = abs(x)
    if ax <= _J_SERIES_MAX:
        j0, j1 = _j01_series(ax)
    elif ax <= _J_MILLER_MAX:
        j0, j1 = _j01_miller(ax)
    else:
        j0, j1 = _j01_asymptotic(ax)
    if x < 0.0:
        j1 = -j1
    return j0, j1


@njit
def i01e(x):
    """Return ``(exp(-x) I0(x), exp(-x) I1(x))`` for ``x >= 0``."""
    if x <= _I_SERIES_MAX:
        q = 0.25 * x * x
        t0 = 1.0
        t1 = 1.0
        s0 = 1.0
        s1 = 1.0
        for k in range(1, 200):
            t0 *= q / (k * k)
            t1 *= q / (k * (k + 1))
            s0 += t0
            s1 += t1
            if t0 < 1e-17 * s0 and t1 < 1e-17 * s1:
                break
        e = math.exp(-x)
        return s0 * e, 0.5 * x * s1 * e
    pref = 1.0 / math.sqrt(2.0 * math.pi * x)
    out0 = 0.0
    out1 = 0.0
    for nu in range(2):
        mu = 4.0 * nu * nu
        term = 1.0
        s = 1.0
        prev = 1e300
        for k in range(1, 200):
            term *= -(mu - (2 * k - 1) ** 2) / (8.0 * k * x)
            a = abs(term)
            if a > prev:
                break
            prev = a
            s += term
            if a < 1e-17 * abs(s):
                break
        if nu == 0:
            out0 = pref * s
        else:
            out1 = pref * s
    return out0, out1


@njit
def _erfcx_cf(x):
    # erfcx(x) = 1 / (sqrt(pi) * (x + (1/2)/(x + 1/(x + (3/2)/(x + ...)))))
    tiny = 1e-300
    f = x
    c = x
    d = 0.0
    for n in range(1, 5000):
        a = 0.5 * n
        d = x + a * d
        if d == 0.0:
            d = tiny
        d = 1.0 / d
        c = x + a / c
        if c == 0.0:
            c = tiny
        delta = c * d
        f *= delta
        if abs(delta - 1.0) < 1e-16:
            break
    return 1.0 / (_SQRT_PI * f)


@njit
def _erf_series(x):
    # erf(x) = 2/sqrt(pi) exp(-x^2) sum 2^n x^(2n+1) / (2n+1)!!  (positive terms)
    x2 = x * x
    term = x
    s = x
    for n in range(1, 500):
        term *= 2.0 * x2 / (2 * n + 1)
        s += term
        if term < 1e-17 * s:
            break
    return 2.0 / _SQRT_PI * math.exp(-x2) * s


@njit
def erfcx_kernel(x):
    """Scaled complementary error function ``exp(x^2) erfc(x)`` for ``x >= 0``."""
    if x < _ERFC_SERIES_MAX:
        return math.exp(x * x) * (1.0 - _erf_series(x))
    return _erfcx_cf(x)


@njit
def erfc_kernel(x):
    ax = abs(x)
    if ax < _ERFC_SERIES_MAX:
        r = 1.0 - _erf_series(ax)
    else:
        r = _erfcx_cf(ax) * math.exp(-ax * ax)
    return 2.0 - r if x < 0.0 else r


@njit
def log_erfc_kernel(x):
    if x < _ERFC_SERIES_MAX:
        return math.log(erfc_kernel(x))
    return math.log(_erfcx_cf(x)) - x * x


@njit
def j0_zero_kernel(m):
    # McMahon seed, then Newton with J0' = -J1
    beta = (m + 0.75) * math.pi
    b8 = 8.0 * beta
    z = beta + 1.0 / b8 - 124.0 / (3.0 * b8 ** 3)
    for _ in range(50):
        j0, j1 = j01(z)
        step = j0 / j1
        z += step
        if abs(step) < 1e-15 * z:
            break
    return z


@njit
def _j_array(order, x, out):
    for i in range(x.size):
        j0, j1 = j01(x[i])
        out[i] = j0 if order == 0 else j1


@njit
def _ie_array(order, x, out):
    for i in range(x.size):
        a, b = i01e(x[i])
        out[i] = a if order == 0 else b


@njit
def _erfc_array(x, out):
    for i in range(x.size):
        out[i] = erfc_kernel(x[i])


def _as_array(x):
    arr = np.asarray(x, dtype=float)
    return arr, arr.ndim == 0


def _check_finite(arr, name):
    if not np.all(np.isfinite(arr)):
        raise DomainError(f"{name}: argument must be finite")


def bessel_j(order, x):
    """Bessel function of the first kind, ``order`` in {0, 1}.

    Accepts scalars or arrays; raises :class:`DomainError` for non-finite input.
    """
    if order not in (0, 1):
        raise DomainError(f"bessel_j: order must be 0 or 1, got {order!r}")
    arr, scalar = _as_array(x)
    _check_finite(arr, "bessel_j")
    flat = np.ascontiguousarray(arr.ravel())
    out = np.empty_like(flat)
    _j_array(int(order), flat, out)
    return float(out[0]) if scalar else out.reshape(arr.shape)


def bessel_i_scaled(order, x):
    """``exp(-x) * I_order(x)`` for ``x >= 0``, finite for arbitrarily large x."""
    if order not in (0, 1):
        raise DomainError(f"bessel_i_scaled: order must be 0 or 1, got {order!r}")
    arr, scalar = _as_array(x)
    _check_finite(arr, "bessel_i_scaled")
    if np.any(arr < 0):
        raise DomainError("bessel_i_scaled: x must be non-negative")
    flat = np.ascontiguousarray(arr.ravel())
    out = np.empty_like(flat)
    _ie_array(int(order), flat, out)
    return float(out[0]) if scalar else out.reshape(arr.shape)


def erfc(x):
    """Complementary error function.

    ``erfc(-inf) = 2`` and ``erfc(+inf) = 0``; NaN raises. For x beyond
    about 26.5 the result is below the smallest double; use
    :func:`log_erfc` or :func:`erfcx` there.
    """
    arr, scalar = _as_array(x)
    if np.any(np.isnan(arr)):
        raise DomainError("erfc: NaN argument")
    flat = np.ascontiguousarray(arr.ravel())
    out = np.empty_like(flat)
    finite = np.isfinite(flat)
    if finite.all():
        _erfc_array(flat, out)
    else:
        out[~finite] = np.where(flat[~finite] > 0, 0.0, 2.0)
        sub = np.ascontiguousarray(flat[finite])
        tmp = np.empty_like(sub)
        _erfc_array(sub, tmp)
        out[finite] = tmp
    return float(out[0]) if scalar else out.reshape(arr.shape)


def erfcx(x):
    """Scaled complementary error function ``exp(x**2) erfc(x)``, ``x >= 0``."""
    x = float(x)
    if not math.isfinite(x) or x < 0:
        raise DomainError("erfcx: x must be finite and non-negative")
    return erfcx_kernel(x)


def log_erfc(x):
    """Natural log of erfc, valid far into the tail where erfc underflows."""
    x = float(x)
    if not math.isfinite(x):
        raise DomainError("log_erfc: x must be finite")
    if x < 0:
        return math.log(erfc_kernel(x))
    return log_erfc_kernel(x)


def bessel_j0_zero(m):
    """The (m+1)-th positive zero of J0; ``m = 0`` gives 2.404825557695773."""
    m = int(m)
    if m < 0:
        raise DomainError("bessel_j0_zero: index must be >= 0")
    return j0_zero_kernel(m)
