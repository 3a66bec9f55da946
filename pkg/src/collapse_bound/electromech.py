"""BAW mode ladder and piezoelectric qubit-phonon coupling.

Mode ``(l, m)`` has longitudinal index ``l`` (anti-nodes through the cavity
height) and transverse index ``m`` (Bessel profile ``J0(2 j_{0,m} r / d)``
with ``m = 0`` the fundamental). ``omega`` and ``g`` are angular (rad/s).
"""
import math
from dataclasses import dataclass
from typing import List, Tuple

from .constants import HBAR
from .errors import DomainError
from .numerics.special import bessel_j, bessel_j0_zero


@dataclass(frozen=True)
class PiezoQubitParams:
    d33: float = 80e-12                 # m/V
    c33: float = 106e9                  # Pa
    E0: float = 2.8e-2                  # V/m, qubit zero-point field
    electrode_diameter: float = 55e-6   # m
    cavity_diameter: float = 70e-6      # m
    v_l: float = 6320.0                 # m/s
    v_t: float = 3900.0                 # m/s
    qubit_band: Tuple[float, float] = (4e9, 9e9)  # Hz

    def __post_init__(self):
        for name in ("d33", "c33", "E0", "electrode_diameter", "cavity_diameter", "v_l"):
            if not getattr(self, name) > 0:
                raise DomainError(f"PiezoQubitParams.{name} must be positive")
        if self.v_t < 0:
            raise DomainError("PiezoQubitParams.v_t must be >= 0")
        if self.electrode_diameter > self.cavity_diameter:
            raise DomainError("electrode diameter exceeds cavity diameter")
        lo, hi = self.qubit_band
        if not lo < hi:
            raise DomainError("qubit_band must satisfy f_min < f_max")


@dataclass(frozen=True)
class ModeSpec:
    l: int
    m: int
    omega: float
    g: float
    beta: float

    @property
    def frequency(self):
        return self.omega / (2.0 * math.pi)


def _check_mode(l, m):
    if int(l) != l or l < 1:
        raise DomainError(f"longitudinal index must be an integer >= 1, got {l!r}")
    if int(m) != m or m < 0:
        raise DomainError(f"transverse index must be an integer >= 0, got {m!r}")


def mode_frequency(l, m, params: PiezoQubitParams, height):
    """Angular frequency of mode ``(l, m)`` in a cavity of the given height."""
    _check_mode(l, m)
    kz = l * math.pi / height
    kr = 2.0 * bessel_j0_zero(m) / params.cavity_diameter
    return math.hypot(kz * params.v_l, kr * params.v_t)


def radial_norm_integral(m, diameter):
    """``int_0^{d/2} J0(2 j r / d)^2 r dr`` in closed form; ``J0(j) = 0`` at the zero."""
    j = bessel_j0_zero(m)
    rho = diameter / 2.0
    return 0.5 * rho * rho * (bessel_j(0, j) ** 2 + bessel_j(1, j) ** 2)


def transverse_overlap(m, params: PiezoQubitParams):
    """``int_0^{d_e/2} J0(2 j r / d) r dr = (d_e/2) J1(k d_e/2) / k``, ``k = 2 j / d``."""
    k = 2.0 * bessel_j0_zero(m) / params.cavity_diameter
    rho = params.electrode_diameter / 2.0
    return rho * bessel_j(1, k * rho) / k


def longitudinal_overlap(l, height):
    """Longitudinal strain overlap: ``4h/l`` for odd ``l``, zero for even ``l``.

    This is ``2 pi`` times the plain integral of ``sin(l pi z / h)`` over the
    cavity height (``2h / (l pi)`` for odd ``l``).
    """
    _check_mode(l, 0)
    if l % 2 == 0:
        return 0.0
    return 4.0 * height / l


def normalization_beta(l, m, params: PiezoQubitParams, height):
    """Strain amplitude fixing the mode energy to ``hbar omega``."""
    omega = mode_frequency(l, m, params, height)
    denom = math.pi * height * params.c33 * radial_norm_integral(m, params.cavity_diameter)
    return math.sqrt(HBAR * omega / denom)


def coupling_strength(l, m, height, params: PiezoQubitParams):
    """Angular qubit-phonon coupling ``|g_{l,m}|`` (rad/s)."""
    beta = normalization_beta(l, m, params, height)
    hg = (longitudinal_overlap(l, height) * params.c33 * params.d33 * params.E0
          * beta * transverse_overlap(m, params))
    return abs(hg) / HBAR


def make_mode(l, m, height, params: PiezoQubitParams):
    return ModeSpec(int(l), int(m), mode_frequency(l, m, params, height),
                    coupling_strength(l, m, height, params),
                    normalization_beta(l, m, params, height))


def enumerate_modes(params: PiezoQubitParams, height, band=None) -> List[ModeSpec]:
    """All ``m = 0`` modes with ``omega / 2 pi`` inside ``band`` (Hz, inclusive),
    sorted by frequency. Even-``l`` modes are included with ``g = 0``."""
    lo, hi = params.qubit_band if band is None else band
    if not hi > lo:
        return []
    fsr = params.v_l / (2.0 * height)
    f_t = bessel_j0_zero(0) * params.v_t / (math.pi * params.cavity_diameter)
    l_lo = max(1, int(math.floor(math.sqrt(max(lo * lo - f_t * f_t, 0.0)) / fsr)) - 1)
    l_hi = int(math.ceil(math.sqrt(max(hi * hi - f_t * f_t, 0.0)) / fsr)) + 1
    modes = []
    for l in range(l_lo, l_hi + 1):
        f = mode_frequency(l, 0, params, height) / (2.0 * math.pi)
        if lo <= f <= hi:
            modes.append(make_mode(l, 0, height, params))
    modes.sort(key=lambda mode: mode.omega)
    return modes


def register_modes_around(height, params: PiezoQubitParams, l0=503):
    """Target ``(l0, 0)`` first, then ``(l0, 1..3)`` and ``(l0 +- 1, 0)``."""
    labels = [(l0, 0), (l0, 1), (l0, 2), (l0, 3), (l0 - 1, 0), (l0 + 1, 0)]
    return [make_mode(l, m, height, params) for l, m in labels]
