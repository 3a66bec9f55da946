"""CSL heating of cylindrical bulk-acoustic-wave breathing modes.

The collapse-induced phonon generation rate of a mode is ``n_dot = lambda_c * D``
with ``D`` the dimensionless cross-section built from

* a transverse factor ``(1 - e^{-x}[I0(x) + I1(x)]) / 2``, ``x = R^2 / 2 r_c^2``,
* a longitudinal integral over the dimensionless wavenumber ``a = k_x lambda / 2 pi``,
* the zero-point motion of the mode.

Lengths are SI metres, frequencies are ordinary (Hz) unless a name says
``omega``.
"""
import math
from dataclasses import dataclass, replace
from typing import NamedTuple, Optional

import numpy as np
from scipy.optimize import minimize_scalar

from ._jit import USE_NUMBA, njit
from .constants import AMU, HBAR
from .errors import ConvergenceError, DomainError, ScanError
from .numerics.quadrature import (DEFAULT_QUADRATURE, QuadratureSpec,
                                  gk15_adaptive_kernel, gk_tables,
                                  integrate_adaptive)
from .numerics.special import bessel_i_scaled

MASS_MODELS = ("cylinder", "slab")

# Gaussian damping exp(-(kappa a)^2) at the cut equals exp(-64) < 1e-27.
_TRUNCATION_SIGMAS = 8.0


@dataclass(frozen=True)
class ResonatorGeometry:
    """Cylindrical BAW cavity hosting ``mode_number`` breathing anti-nodes.

    ``height = mode_number * wavelength / 2`` is enforced to 1e-9 relative.
    """
    radius: float
    height: float
    wavelength: float
    mode_number: int
    density: float
    frequency: float

    def __post_init__(self):
        for name in ("radius", "height", "wavelength", "density", "frequency"):
            v = getattr(self, name)
            if not (math.isfinite(v) and v > 0):
                raise DomainError(f"ResonatorGeometry.{name} must be positive, got {v!r}")
        if int(self.mode_number) != self.mode_number or self.mode_number < 1:
            raise DomainError("ResonatorGeometry.mode_number must be an integer >= 1")
        expected = self.mode_number * self.wavelength / 2
        if abs(self.height - expected) > 1e-9 * expected:
            raise DomainError(
                f"height {self.height!r} inconsistent with l*lambda/2 = {expected!r}")

    @classmethod
    def from_height(cls, radius, height, mode_number, density, frequency):
        if not mode_number >= 1:
            raise DomainError("mode_number must be a positive integer")
        return cls(radius, height, 2.0 * height / mode_number, int(mode_number),
                   density, frequency)

    @classmethod
    def from_wavelength(cls, radius, wavelength, mode_number, density, frequency):
        return cls(radius, mode_number * wavelength / 2.0, wavelength,
                   int(mode_number), density, frequency)

    @property
    def diameter(self):
        return 2.0 * self.radius

    @property
    def omega(self):
        return 2.0 * math.pi * self.frequency

    def with_mode_number(self, mode_number):
        """Same wavelength and frequency, height rescaled to ``l * lambda / 2``."""
        return replace(self, mode_number=int(mode_number),
                       height=mode_number * self.wavelength / 2.0)


@dataclass(frozen=True)
class CollapseParams:
    lambda_c: float
    r_c: float
    omega_cutoff: Optional[float] = None  # Hz; None means white noise

    def __post_init__(self):
        if not self.lambda_c >= 0:
            raise DomainError("lambda_c must be >= 0")
        if not self.r_c > 0:
            raise DomainError("r_c must be > 0")
        if self.omega_cutoff is not None and not self.omega_cutoff > 0:
            raise DomainError("omega_cutoff must be > 0 when given")


class ZeroPointMotion(NamedTuple):
    effective_mass: float  # single anti-node, kg
    x0: float              # single anti-node, m
    x0_modes: float        # l anti-nodes, x0 / sqrt(l)


def transverse_factor(radius, r_c):
    """Bracketed transverse factor, written with scaled Bessel functions so the
    ``exp(R^2 / 2 r_c^2)`` never has to be formed. Lies in ``[0, 1/2)``."""
    if not (radius > 0 and r_c > 0):
        raise DomainError("transverse_factor: radius and r_c must be positive")
    x = radius * radius / (2.0 * r_c * r_c)
    return 0.5 * (1.0 - bessel_i_scaled(0, x) - bessel_i_scaled(1, x))


@njit
def _integrand_scalar(a, params):
    kappa = params[0]
    v = 0.5 * math.pi * a
    if abs(v) < 1.0:
        # Taylor series of N(a)/v^4, N = -8 + (8 + 4 v^2) cos v; avoids the
        # catastrophic cancellation near a = 0 where N ~ a^4.
        v2 = v * v
        m = 0.0
        p = 1.0
        fact = 24.0  # (2n)! for n = 2
        for n in range(2, 16):
            sign = 1.0 if n % 2 == 0 else -1.0
            m += sign * (8.0 - 8.0 * n * (2 * n - 1)) / fact * p
            p *= v2
            fact *= (2 * n + 1) * (2 * n + 2)
        g = m * m * a ** 4 * math.pi ** 6 / 1024.0
    else:
        num = -8.0 + (8.0 + a * a * math.pi * math.pi) * math.cos(v)
        g = num * num / (4.0 * a ** 4 * math.pi * math.pi)
    return math.exp(-(kappa * a) ** 2) * g


def longitudinal_integrand(a, wavelength, r_c):
    """Integrand of the longitudinal integral; even in ``a``, zero at ``a = 0``."""
    kappa = 2.0 * math.pi * r_c / wavelength
    params = np.array([kappa])
    arr = np.asarray(a, dtype=float)
    out = np.array([_integrand_scalar(float(x), params) for x in arr.ravel()])
    return float(out[0]) if arr.ndim == 0 else out.reshape(arr.shape)


def _integrand_numpy(a, kappa):
    a = np.asarray(a, dtype=float)
    v = 0.5 * np.pi * a
    small = np.abs(v) < 1.0
    out = np.empty_like(a)
    if small.any():
        vs = v[small]
        v2 = vs * vs
        m = np.zeros_like(vs)
        p = np.ones_like(vs)
        fact = 24.0
        for n in range(2, 16):
            m += (-1.0) ** n * (8.0 - 8.0 * n * (2 * n - 1)) / fact * p
            p *= v2
            fact *= (2 * n + 1) * (2 * n + 2)
        out[small] = m * m * a[small] ** 4 * np.pi ** 6 / 1024.0
    big = ~small
    if big.any():
        ab = a[big]
        num = -8.0 + (8.0 + ab * ab * np.pi ** 2) * np.cos(0.5 * np.pi * ab)
        out[big] = num * num / (4.0 * ab ** 4 * np.pi ** 2)
    return np.exp(-(kappa * a) ** 2) * out


def truncation_point(wavelength, r_c):
    """Upper limit in ``a`` where the Gaussian damping has fallen below 1e-27."""
    return _TRUNCATION_SIGMAS * wavelength / (2.0 * math.pi * r_c)


def longitudinal_integral(wavelength, r_c, spec: QuadratureSpec = DEFAULT_QUADRATURE):
    """Full-line longitudinal integral (twice the half-line value by parity)."""
    if not (wavelength > 0 and r_c > 0):
        raise DomainError("longitudinal_integral: wavelength and r_c must be positive")
    kappa = 2.0 * math.pi * r_c / wavelength
    upper = truncation_point(wavelength, r_c)
    if USE_NUMBA:
        nodes, wk, wg = gk_tables()
        val, err, _ = gk15_adaptive_kernel(
            _integrand_scalar, np.array([kappa]), 0.0, upper,
            spec.relative_tolerance, spec.absolute_tolerance,
            spec.max_subdivisions, nodes, wk, wg)
        if err > max(spec.absolute_tolerance, spec.relative_tolerance * abs(val)):
            raise ConvergenceError("longitudinal_integral did not converge",
                                   estimate=2 * val, error=2 * err)
    else:
        val = integrate_adaptive(lambda a: _integrand_numpy(a, kappa), 0.0, upper, spec)
    return 2.0 * val


def longitudinal_integral_exact_sine(wavelength, r_c, spec: QuadratureSpec = DEFAULT_QUADRATURE):
    """Longitudinal integral with the exact ``sin`` mode profile in place of the
    piecewise-quadratic one, same normalisation. Used to report the size of
    the quadratic approximation; not used by :func:`eta_new`.
    """
    kappa = 2.0 * math.pi * r_c / wavelength

    def f(a):
        a = np.asarray(a, dtype=float)
        # int_0^{pi/2} sin(a u) sin(u) du, with the a -> 1 limit handled
        am = a - 1.0
        ap = a + 1.0
        with np.errstate(invalid="ignore", divide="ignore"):
            t1 = np.where(np.abs(am) < 1e-8, 0.5 * np.pi, np.sin(am * np.pi / 2) / am)
        t2 = np.sin(ap * np.pi / 2) / ap
        s = 0.5 * (t1 - t2)
        return np.exp(-(kappa * a) ** 2) * (np.pi ** 2 / 4.0) * a * a * s * s

    return 2.0 * integrate_adaptive(f, 0.0, truncation_point(wavelength, r_c), spec)


def sine_approximation_discrepancy(wavelength, r_c, spec: QuadratureSpec = DEFAULT_QUADRATURE):
    """Relative difference (quadratic - exact) / exact of the longitudinal integral."""
    quad = longitudinal_integral(wavelength, r_c, spec)
    exact = longitudinal_integral_exact_sine(wavelength, r_c, spec)
    return (quad - exact) / exact


def eta_new(geom: ResonatorGeometry, r_c, spec: QuadratureSpec = DEFAULT_QUADRATURE):
    """Single anti-node CSL diffusion coefficient (m^-2)."""
    if not r_c > 0:
        raise DomainError("eta_new: r_c must be positive")
    lam = geom.wavelength
    pref = (r_c ** 3 * geom.density ** 2 * geom.radius ** 2 / AMU ** 2) \
        * (64.0 * math.sqrt(math.pi) / lam)
    return pref * transverse_factor(geom.radius, r_c) * longitudinal_integral(lam, r_c, spec)


def effective_mass(geom: ResonatorGeometry, mass_model="cylinder"):
    """Effective mass of one anti-node (a slab of height lambda/2).

    ``"slab"`` uses ``(lambda/4) rho d^2``; ``"cylinder"`` uses the disc area
    ``pi d^2 / 4`` in place of ``d^2``.
    """
    base = geom.wavelength / 4.0 * geom.density * geom.diameter ** 2
    if mass_model == "slab":
        return base
    if mass_model == "cylinder":
        return base * math.pi / 4.0
    raise DomainError(f"unknown mass_model {mass_model!r}; expected one of {MASS_MODELS}")


def zero_point_motion(geom: ResonatorGeometry, omega, mass_model="cylinder"):
    if not omega > 0:
        raise DomainError("zero_point_motion: omega must be positive")
    m = effective_mass(geom, mass_model)
    x0 = math.sqrt(HBAR / (2.0 * m * omega))
    return ZeroPointMotion(m, x0, x0 / math.sqrt(geom.mode_number))


def cross_section(geom: ResonatorGeometry, r_c, mass_model="cylinder",
                  spec: QuadratureSpec = DEFAULT_QUADRATURE):
    """Dimensionless CSL cross-section ``D = 2 l x0^2 eta_new``; linear in ``l``."""
    zpm = zero_point_motion(geom, geom.omega, mass_model)
    return 2.0 * geom.mode_number * zpm.x0 ** 2 * eta_new(geom, r_c, spec)


def diffusion_constant(geom: ResonatorGeometry, r_c, spec: QuadratureSpec = DEFAULT_QUADRATURE):
    """``eta = D / x0'^2 = 2 l^2 eta_new``; independent of the mass model."""
    return 2.0 * geom.mode_number ** 2 * eta_new(geom, r_c, spec)


def colour_factor(omega_cutoff, frequency):
    """Spectral suppression ``Oc^2 / (Oc^2 + O^2)``; both arguments in Hz."""
    if omega_cutoff is None or math.isinf(omega_cutoff):
        return 1.0
    return omega_cutoff ** 2 / (omega_cutoff ** 2 + frequency ** 2)


def heating_rate(params: CollapseParams, D, frequency=None):
    """Phonons per second generated by collapse noise.

    ``frequency`` (Hz) is only needed for the coloured model.
    """
    if D < 0:
        raise DomainError("heating_rate: D must be >= 0")
    rate = params.lambda_c * D
    if params.omega_cutoff is not None:
        if frequency is None:
            raise DomainError("heating_rate: coloured model needs the mode frequency")
        rate *= colour_factor(params.omega_cutoff, frequency)
    return rate


def _fixed_height_cross_section(template, wavelength, r_c, mass_model, spec):
    # l = 2h / lambda is allowed to be non-integer inside a scan; D is linear in l.
    l_real = 2.0 * template.height / wavelength
    one = ResonatorGeometry.from_wavelength(template.radius, wavelength, 1,
                                            template.density, template.frequency)
    return l_real * cross_section(one, r_c, mass_model, spec)


class WavelengthScan(NamedTuple):
    wavelength: float
    grid: np.ndarray
    values: np.ndarray


def scan_wavelength(r_c, template: ResonatorGeometry, n_points=50, ratio_range=(2.0, 20.0),
                    mass_model="cylinder", spec: QuadratureSpec = DEFAULT_QUADRATURE):
    """Locate the wavelength maximising D for a cavity of fixed height, radius
    and mode frequency (the anti-node count follows ``l = 2h / lambda``).

    A log-spaced grid of ``lambda / r_c`` brackets the peak, which is then
    refined by bounded scalar minimisation.
    """
    if not r_c > 0:
        raise DomainError("scan_wavelength: r_c must be positive")
    grid = r_c * np.geomspace(ratio_range[0], ratio_range[1], n_points)
    values = np.array([_fixed_height_cross_section(template, lam, r_c, mass_model, spec)
                       for lam in grid])
    if not np.all(np.isfinite(values)):
        raise ScanError("non-finite cross-section in wavelength scan", grid, values)
    interior = (values[1:-1] > values[:-2]) & (values[1:-1] > values[2:])
    k = int(np.argmax(values))
    if interior.sum() != 1 or k in (0, len(grid) - 1):
        raise ScanError("cross-section is not unimodal over the wavelength grid",
                        grid, values)
    lo, hi = grid[k - 1], grid[k + 1]
    res = minimize_scalar(
        lambda lg: -_fixed_height_cross_section(template, math.exp(lg), r_c, mass_model, spec),
        bounds=(math.log(lo), math.log(hi)), method="bounded",
        options={"xatol": 1e-8})
    return WavelengthScan(math.exp(res.x), grid, values)


def optimal_wavelength(r_c, template: ResonatorGeometry, **kwargs):
    """Wavelength maximising the cross-section at correlation length ``r_c``."""
    return scan_wavelength(r_c, template, **kwargs).wavelength


def cross_section_curve(geom: ResonatorGeometry, r_c_values, mass_model="cylinder",
                        spec: QuadratureSpec = DEFAULT_QUADRATURE):
    return np.array([cross_section(geom, rc, mass_model, spec) for rc in r_c_values])


def optimal_correlation_length(geom: ResonatorGeometry, bounds=(1e-9, 1e-5),
                               spec: QuadratureSpec = DEFAULT_QUADRATURE):
    """``(r_c*, eta_max)``: the correlation length maximising the diffusion
    constant of a fixed resonator, and that maximum. One point of the
    eta-versus-r_c trade-off plot."""
    grid = np.geomspace(bounds[0], bounds[1], 81)
    vals = np.array([diffusion_constant(geom, rc, spec) for rc in grid])
    k = int(np.argmax(vals))
    lo, hi = grid[max(k - 1, 0)], grid[min(k + 1, len(grid) - 1)]
    res = minimize_scalar(lambda lg: -diffusion_constant(geom, math.exp(lg), spec),
                          bounds=(math.log(lo), math.log(hi)), method="bounded",
                          options={"xatol": 1e-8})
    r_star = math.exp(res.x)
    return r_star, diffusion_constant(geom, r_star, spec)


def reference_trend(r_c, anchor_r_c, anchor_eta):
    """``eta ∝ r_c^-4`` line passing through ``(anchor_r_c, anchor_eta)``."""
    return anchor_eta * (np.asarray(r_c, dtype=float) / anchor_r_c) ** -4
