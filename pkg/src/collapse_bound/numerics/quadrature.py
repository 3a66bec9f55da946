"""Globally adaptive Gauss-Kronrod (7/15) quadrature."""
import heapq
import math
from dataclasses import dataclass

import numpy as np

from .._jit import njit
from ..errors import ConvergenceError, DomainError

# Kronrod abscissae on [0, 1] (symmetric); odd indices are the Gauss-7 nodes.
_XGK = np.array([
    0.991455371120812639206854697526329,
    0.949107912342758524526189684047851,
    0.864864423359769072789712788640926,
    0.741531185599394439863864773280788,
    0.586087235467691130294144845693013,
    0.405845151377397166906606412076961,
    0.207784955007898467600689403773245,
    0.000000000000000000000000000000000,
])
_WGK = np.array([
    0.022935322010529224963732008058970,
    0.063092092629978553290700663189204,
    0.104790010322250183839876322541518,
    0.140653259715525918745189590510238,
    0.169004726639267902826583426598550,
    0.190350578064785409913256402421014,
    0.204432940075298892414161999234649,
    0.209482141084727828012999174891714,
])
_WG = np.array([
    0.129484966168869693270611432679082,
    0.279705391489276667901467771423780,
    0.381830050505118944950369775488975,
    0.417959183673469387755102040816327,
])

# full 15-point node/weight vectors, ordered -x..+x
_NODES15 = np.concatenate([-_XGK[:-1], [0.0], _XGK[:-1][::-1]])
_WK15 = np.concatenate([_WGK[:-1], [_WGK[-1]], _WGK[:-1][::-1]])
_WG15 = np.zeros(15)
for _i, _w in zip((1, 3, 5), _WG[:3]):
    _WG15[_i] = _w
    _WG15[14 - _i] = _w
_WG15[7] = _WG[3]


@dataclass(frozen=True)
class QuadratureSpec:
    relative_tolerance: float = 1e-9
    absolute_tolerance: float = 1e-30
    max_subdivisions: int = 2000

    def __post_init__(self):
        if not (self.relative_tolerance > 0 and self.absolute_tolerance > 0):
            raise DomainError("QuadratureSpec: tolerances must be positive")
        if self.max_subdivisions < 1:
            raise DomainError("QuadratureSpec: max_subdivisions must be >= 1")

    def scaled(self, factor):
        """Copy with both tolerances multiplied by ``factor``."""
        return QuadratureSpec(self.relative_tolerance * factor,
                              self.absolute_tolerance * factor,
                              self.max_subdivisions)


DEFAULT_QUADRATURE = QuadratureSpec()


def _gk15(f, a, b):
    c = 0.5 * (a + b)
    h = 0.5 * (b - a)
    fx = np.asarray(f(c + h * _NODES15), dtype=float)
    if fx.shape != (15,):
        fx = np.broadcast_to(fx, (15,))
    k = h * float(np.dot(_WK15, fx))
    g = h * float(np.dot(_WG15, fx))
    return k, abs(k - g)


def integrate_adaptive(f, a, b, spec=DEFAULT_QUADRATURE, *, full_output=False):
    """Integrate ``f`` over ``[a, b]``.

    ``f`` is called with a 1-D array of 15 abscissae per panel and must
    return an array of the same shape (numpy ufunc style). The worst panel
    is bisected until ``err <= max(atol, rtol * |I|)``.

    Raises
    ------
    ConvergenceError
        When ``spec.max_subdivisions`` panels are exhausted; the exception
        carries ``estimate`` and ``error``.
    """
    a = float(a)
    b = float(b)
    if not (math.isfinite(a) and math.isfinite(b)):
        raise DomainError("integrate_adaptive: limits must be finite")
    if not a < b:
        raise DomainError("integrate_adaptive: require a < b")

    k, e = _gk15(f, a, b)
    heap = [(-e, a, b, k)]
    total, err = k, e
    n = 1
    while err > max(spec.absolute_tolerance, spec.relative_tolerance * abs(total)):
        if n >= spec.max_subdivisions:
            raise ConvergenceError(
                f"integrate_adaptive: tolerance not reached after {n} subdivisions",
                estimate=total, error=err)
        neg_e, lo, hi, kk = heapq.heappop(heap)
        mid = 0.5 * (lo + hi)
        k1, e1 = _gk15(f, lo, mid)
        k2, e2 = _gk15(f, mid, hi)
        heapq.heappush(heap, (-e1, lo, mid, k1))
        heapq.heappush(heap, (-e2, mid, hi, k2))
        n += 1
        total += k1 + k2 - kk
        err += e1 + e2 + neg_e
    total = math.fsum(item[3] for item in heap)
    err = math.fsum(-item[0] for item in heap)
    if full_output:
        return total, err, n
    return total


@njit
def _panel(f, params, lo, hi, nodes, wk, wg):
    c = 0.5 * (lo + hi)
    h = 0.5 * (hi - lo)
    k = 0.0
    g = 0.0
    for i in range(15):
        fx = f(c + h * nodes[i], params)
        k += wk[i] * fx
        g += wg[i] * fx
    return h * k, abs(h * (k - g))


@njit
def gk15_adaptive_kernel(f, params, a, b, rtol, atol, max_sub, nodes, wk, wg):
    """Same algorithm as :func:`integrate_adaptive` for a jitted scalar
    integrand ``f(x, params)``. Returns ``(estimate, error, n_panels)``.
    """
    lo = np.empty(max_sub)
    hi = np.empty(max_sub)
    val = np.empty(max_sub)
    er = np.empty(max_sub)
    v, e = _panel(f, params, a, b, nodes, wk, wg)
    lo[0] = a
    hi[0] = b
    val[0] = v
    er[0] = e
    n = 1
    total = v
    err = e
    while err > max(atol, rtol * abs(total)):
        if n >= max_sub:
            break
        worst = 0
        for i in range(1, n):
            if er[i] > er[worst]:
                worst = i
        l_, h_ = lo[worst], hi[worst]
        m = 0.5 * (l_ + h_)
        v1, e1 = _panel(f, params, l_, m, nodes, wk, wg)
        v2, e2 = _panel(f, params, m, h_, nodes, wk, wg)
        hi[worst] = m
        val[worst] = v1
        er[worst] = e1
        lo[n] = m
        hi[n] = h_
        val[n] = v2
        er[n] = e2
        n += 1
        total = 0.0
        err = 0.0
        for i in range(n):
            total += val[i]
            err += er[i]
    return total, err, n


def gk_tables():
    """Node and weight vectors consumed by :func:`gk15_adaptive_kernel`."""
    return _NODES15, _WK15, _WG15
