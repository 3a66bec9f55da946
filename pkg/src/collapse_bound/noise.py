"""Readout statistics, spurious-excitation channels and the noise budget.

Rates are ordinary frequencies (Hz) unless stated otherwise; occupations
are excited-state probabilities per detection attempt.
"""
import json
import math
from dataclasses import asdict, dataclass, field
from typing import List, Optional, Sequence

from scipy.optimize import brentq

from .constants import HBAR, K_B
from .errors import ConvergenceError, DomainError
from .numerics.special import erfc, log_erfc


@dataclass(frozen=True)
class ReadoutParams:
    """Dispersive readout.

    ``a`` places the discrimination point at ``|x0 - x1| / a`` from the
    ground-state pointer (``a = 2`` is the symmetric midpoint).
    """
    snr: float = 8.0
    a: float = 2.0
    epsilon_drive: float = 25e6
    g_readout: float = 100e6
    Delta: float = 2e9
    kappa: float = 16.64e6
    n_bar: float = 10.0
    measurement_time_tau: float = 56e-9

    def __post_init__(self):
        if not (math.isfinite(self.snr) and self.snr >= 0):
            raise DomainError("ReadoutParams.snr must be finite and >= 0")
        if not (math.isfinite(self.a) and self.a > 0):
            raise DomainError("ReadoutParams.a must be finite and positive")
        if self.Delta == 0:
            raise DomainError("ReadoutParams.Delta must be non-zero")
        if self.n_bar < 0 or self.kappa < 0:
            raise DomainError("ReadoutParams.n_bar and kappa must be >= 0")
        if self.g_readout != 0 and not self.n_bar < self.n_crit:
            raise DomainError(f"n_bar = {self.n_bar} must stay below n_crit = {self.n_crit:.6g}")

    @property
    def n_crit(self):
        if self.g_readout == 0:
            return math.inf
        return self.Delta ** 2 / (4.0 * self.g_readout ** 2)


def false_positive_prob(readout: ReadoutParams):
    """``erfc(sqrt(SNR) / a) / 2``."""
    return 0.5 * erfc(math.sqrt(readout.snr) / readout.a)


def log_false_positive_prob(readout: ReadoutParams):
    return math.log(0.5) + log_erfc(math.sqrt(readout.snr) / readout.a)


def true_positive_prob(readout: ReadoutParams):
    """``erfc(sqrt(SNR) (1 - a) / a) / 2``."""
    a = readout.a
    return 0.5 * erfc(math.sqrt(readout.snr) * (1.0 - a) / a)


def state_discrimination_error(snr):
    """Symmetric-threshold error ``erfc(sqrt(SNR) / 2) / 2``."""
    if not snr >= 0:
        raise DomainError("state_discrimination_error: snr must be >= 0")
    return 0.5 * erfc(math.sqrt(snr) / 2.0)


def threshold_for_true_positive(snr, target):
    """Divisor ``a`` at which ``true_positive_prob`` equals ``target``.

    ``true_positive_prob`` rises monotonically in ``a`` from 0 towards
    ``erfc(-sqrt(SNR)) / 2``.
    """
    if not snr > 0:
        raise DomainError("threshold_for_true_positive: snr must be positive")
    upper = 0.5 * erfc(-math.sqrt(snr))
    if not 0 < target < upper:
        raise DomainError(f"threshold_for_true_positive: target must lie in (0, {upper:.6g})")

    def f(a):
        return 0.5 * erfc(math.sqrt(snr) * (1.0 - a) / a) - target

    lo, hi = 1e-6, 1e6
    if f(lo) > 0 or f(hi) < 0:
        raise ConvergenceError("threshold_for_true_positive: target not bracketed")
    return brentq(f, lo, hi, xtol=1e-15, rtol=1e-14)


def measurement_heating(readout: ReadoutParams):
    """Dressed-state excitation ``|epsilon g / Delta^2|^2``."""
    return abs(readout.epsilon_drive * readout.g_readout / readout.Delta ** 2) ** 2


def purcell_rate(readout: ReadoutParams, filter_factor=1.0):
    """Readout-photon-induced excitation rate ``kappa g^2/(16 Delta^2) (n/n_crit)^2``,
    divided by ``filter_factor`` (a Purcell filter gives about 50)."""
    if not filter_factor > 0:
        raise DomainError("purcell_rate: filter_factor must be positive")
    if readout.g_readout == 0:
        return 0.0
    ratio = readout.n_bar / readout.n_crit
    return (readout.kappa * readout.g_readout ** 2 / (16.0 * readout.Delta ** 2)
            * ratio * ratio / filter_factor)


def quasiparticle_equilibrium(Gamma_QP, Gamma_P, gamma_q):
    """Detailed-balance excited population ``(Gamma_QP + Gamma_P) / gamma_q``."""
    if not gamma_q > 0:
        raise DomainError("quasiparticle_equilibrium: gamma_q must be positive")
    if Gamma_QP < 0 or Gamma_P < 0:
        raise DomainError("quasiparticle_equilibrium: rates must be >= 0")
    return (Gamma_QP + Gamma_P) / gamma_q


def boltzmann_factor(frequency_hz, temperature):
    """``exp(-hbar omega / k T)`` with ``omega = 2 pi f``."""
    if not temperature > 0:
        raise DomainError("boltzmann_factor: temperature must be positive")
    return math.exp(-HBAR * 2.0 * math.pi * frequency_hz / (K_B * temperature))


def thermal_rates(gamma, frequency_hz, temperature):
    """Thermal excitation rate ``(gamma / 2 pi) exp(-hbar omega / k T)``.

    ``gamma`` is the Hz value; the explicit ``1/2 pi`` is kept as written in
    the low-temperature rate formula.
    """
    return gamma / (2.0 * math.pi) * boltzmann_factor(frequency_hz, temperature)


def thermal_floor(gamma_r, gamma_q, frequency_hz, temperature, D):
    """Collapse rate matched by resonator plus qubit thermal excitation: ``(n_r + n_q) / D``."""
    if not D > 0:
        raise DomainError("thermal_floor: D must be positive")
    return (thermal_rates(gamma_r, frequency_hz, temperature)
            + thermal_rates(gamma_q, frequency_hz, temperature)) / D


def min_testable_rate(occupation_noise, D, gamma_r, eta_swap=1.0):
    """``occupation * gamma_r / (eta_swap * D)``."""
    if not (D > 0 and gamma_r > 0 and eta_swap > 0):
        raise DomainError("min_testable_rate: D, gamma_r and eta_swap must be positive")
    if occupation_noise < 0:
        raise DomainError("min_testable_rate: occupation must be >= 0")
    return occupation_noise * gamma_r / (eta_swap * D)


def csl_occupation(lambda_c, D, gamma_r, eta_swap=1.0):
    """Excited population after a swap from CSL heating alone: ``eta_swap lambda_c D / gamma_r``."""
    if not gamma_r > 0:
        raise DomainError("csl_occupation: gamma_r must be positive")
    return eta_swap * lambda_c * D / gamma_r


def measurement_time(n_dot_c, eta_swap, eta_disp, n_resonators=1):
    """Mean wait for one detected collapse event across ``n_resonators`` modes.

    Returns ``math.inf`` when any factor is zero.
    """
    for name, v in (("n_dot_c", n_dot_c), ("eta_swap", eta_swap), ("eta_disp", eta_disp),
                    ("n_resonators", n_resonators)):
        if v < 0 or not math.isfinite(v):
            raise DomainError(f"measurement_time: {name} must be finite and >= 0")
    denom = n_dot_c * eta_swap * eta_disp * n_resonators
    if denom == 0:
        return math.inf
    return 1.0 / denom


CURRENT = "current"
IMPROVED = "improved"
BOTH = "both"


@dataclass(frozen=True)
class Channel:
    """One budget row.

    ``scenario`` selects which totals include the row; ``lambda_min``
    overrides the shared occupation formula (used by the thermal row,
    whose floor is set by excitation rates rather than an occupation).
    """
    name: str
    scaling: str
    occupation: float
    scenario: str = BOTH
    lambda_min: Optional[float] = None

    def __post_init__(self):
        if self.scenario not in (CURRENT, IMPROVED, BOTH):
            raise DomainError(f"unknown scenario {self.scenario!r}")
        if not (math.isfinite(self.occupation) and self.occupation >= 0):
            raise DomainError(f"channel {self.name!r}: occupation must be finite and >= 0")


@dataclass
class BudgetRow:
    noise_type: str
    scaling: str
    occupation: float
    lambda_min: Optional[float]
    lambda_min_no_swap: Optional[float]


@dataclass
class NoiseBudget:
    signal: BudgetRow
    rows: List[BudgetRow]
    totals: List[BudgetRow]
    D: float
    gamma_r: float
    eta_swap: float
    details: dict = field(default_factory=dict)

    def total(self, scenario):
        for row in self.totals:
            if row.noise_type == f"All noise ({scenario})":
                return row
        raise KeyError(scenario)

    def to_dict(self):
        return asdict(self)

    def to_json(self):
        return json.dumps(self.to_dict(), indent=2, sort_keys=True) + "\n"

    def table_rows(self):
        def fmt(v):
            return "-" if v is None else f"{v:.3g}"
        out = [[self.signal.noise_type, self.signal.scaling, fmt(self.signal.occupation), "-"]]
        for r in self.rows + self.totals:
            out.append([r.noise_type, r.scaling, fmt(r.occupation), fmt(r.lambda_min)])
        return out

    def to_table(self):
        header = ["Noise type", "Scaling", "Occupation", "lambda_c,min (1/s)"]
        body = self.table_rows()
        widths = [max(len(row[i]) for row in [header] + body) for i in range(4)]

        def line(cells):
            return "  ".join(c.ljust(w) for c, w in zip(cells, widths)).rstrip()
        return "\n".join([line(header), line(["-" * w for w in widths])]
                         + [line(r) for r in body]) + "\n"


def build_budget(channels: Sequence[Channel], D, gamma_r, eta_swap, signal_occupation=0.0,
                 details=None) -> NoiseBudget:
    """Rows and scenario totals from a channel list (order-independent totals)."""
    rows = []
    for ch in channels:
        if ch.lambda_min is not None:
            lm = lm0 = ch.lambda_min
        else:
            lm = min_testable_rate(ch.occupation, D, gamma_r, eta_swap)
            lm0 = min_testable_rate(ch.occupation, D, gamma_r, 1.0)
        rows.append(BudgetRow(ch.name, ch.scaling, ch.occupation, lm, lm0))
    totals = []
    for scenario in (CURRENT, IMPROVED):
        occ = math.fsum(ch.occupation for ch in channels if ch.scenario in (BOTH, scenario))
        totals.append(BudgetRow(f"All noise ({scenario})", "-", occ,
                                min_testable_rate(occ, D, gamma_r, eta_swap),
                                min_testable_rate(occ, D, gamma_r, 1.0)))
    signal = BudgetRow("CSL collapse (signal)", "eta_swap lambda_c D / gamma_r",
                       signal_occupation, None, None)
    return NoiseBudget(signal, rows, totals, D, gamma_r, eta_swap, dict(details or {}))


@dataclass(frozen=True)
class BudgetInputs:
    """Everything :func:`assemble_budget` needs. QP occupations come from the
    swap-cooling simulation (post-cooling floor)."""
    D: float
    readout: ReadoutParams = ReadoutParams()
    gamma_r: float = 300.0
    gamma_q: float = 27e3
    frequency: float = 6.65e9
    temperature: float = 10e-3
    eta_swap: float = 0.8
    eta_disp: float = 0.1
    lambda_c_signal: float = 1e-12
    qp_current: float = 6e-6
    qp_improved: float = 6e-7


def assemble_budget(inp: BudgetInputs) -> NoiseBudget:
    """Noise budget: thermal, SDE, measurement heating, and quasiparticle
    rows for the current and improved scenarios, with totals."""
    ro = inp.readout
    thermal_occ = boltzmann_factor(inp.frequency, inp.temperature) if inp.temperature > 0 else 0.0
    thermal_lm = (thermal_floor(inp.gamma_r, inp.gamma_q, inp.frequency, inp.temperature, inp.D)
                  if inp.temperature > 0 else 0.0)
    channels = [
        Channel("Thermal", "exp(-hbar omega / k_B T)", thermal_occ, BOTH, thermal_lm),
        Channel("SDE", "erfc(sqrt(SNR) / a) / 2", false_positive_prob(ro)),
        Channel("Measurement", "|eps g / Delta^2|^2", measurement_heating(ro)),
        Channel("Current QP", "cooled (Gamma_QP + Gamma_P) floor", inp.qp_current, CURRENT),
        Channel("Reduced QP", "cooled (Gamma_QP + Gamma_P) floor", inp.qp_improved, IMPROVED),
    ]
    signal = csl_occupation(inp.lambda_c_signal, inp.D, inp.gamma_r, inp.eta_swap)
    details = {
        "readout_a": ro.a,
        "readout_snr": ro.snr,
        "true_positive_prob": true_positive_prob(ro),
        "purcell_rate_hz": purcell_rate(ro),
        "thermal_rate_resonator_hz": thermal_rates(inp.gamma_r, inp.frequency, inp.temperature)
        if inp.temperature > 0 else 0.0,
        "thermal_rate_qubit_hz": thermal_rates(inp.gamma_q, inp.frequency, inp.temperature)
        if inp.temperature > 0 else 0.0,
        "measurement_time_s": measurement_time(inp.lambda_c_signal * inp.D, inp.eta_swap,
                                               inp.eta_disp, 1),
    }
    return build_budget(channels, inp.D, inp.gamma_r, inp.eta_swap, signal, details)
