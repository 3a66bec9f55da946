"""Master-equation time evolution and the swap / cooling / detection protocols."""
import math
from dataclasses import dataclass
from typing import List, Sequence

import numpy as np

from ..errors import DomainError, IntegrationError
from .integrator import IntegratorSpec, Trajectory, integrate
from .lindblad import LindbladGenerator
from .register import (ModeRegister, NoiseRates, Operators, build_hamiltonian,
                       collapse_operators, qubit_reduced, single_phonon_state,
                       with_mode_vacuum)

TRACE_TOL = 1e-10
HERMITICITY_TOL = 1e-10
POSITIVITY_TOL = 1e-8
POSITIVITY_MAX_DIM = 512


class System:
    """Register, rates, operators and Lindblad generator bundled together."""

    def __init__(self, register: ModeRegister, rates: NoiseRates, backend=None, angular=True):
        self.register = register
        self.rates = rates
        self.ops = Operators(register)
        self.hamiltonian = build_hamiltonian(register, self.ops)
        self.jumps = collapse_operators(register, rates, self.ops, angular=angular)
        self.generator = LindbladGenerator(self.hamiltonian, self.jumps, backend)

    def excited(self, rho):
        return float(np.real(np.dot(self.ops.excited_diag, np.diagonal(rho))))

    def occupations(self, rho):
        d = np.diagonal(rho)
        return np.array([float(np.real(np.dot(n, d))) for n in self.ops.number_diag])


def evolve(system: System, rho0, times, spec: IntegratorSpec = IntegratorSpec(),
           store_states=False, check_invariants=True, check_positivity=None) -> Trajectory:
    """Integrate the master equation from ``rho0`` and sample at ``times``.

    With ``check_invariants`` the trace, Hermiticity and (for dimensions up
    to 512, unless overridden) positivity are verified at every sample; a
    violation raises :class:`IntegrationError`.
    """
    dim = system.register.dimension
    rho0 = np.asarray(rho0, dtype=complex)
    if rho0.shape != (dim, dim):
        raise DomainError(f"initial state must be {dim}x{dim}")
    if check_positivity is None:
        check_positivity = dim <= POSITIVITY_MAX_DIM
    gen = system.generator

    def rhs(t, y):
        return gen(y.reshape(dim, dim)).ravel()

    def sample(t, y):
        rho = y.reshape(dim, dim)
        tr_err = abs(np.trace(rho) - 1.0)
        herm = float(np.max(np.abs(rho - rho.conj().T)))
        min_eig = math.nan
        if check_positivity:
            min_eig = float(np.linalg.eigvalsh(0.5 * (rho + rho.conj().T))[0])
        if check_invariants:
            if tr_err > TRACE_TOL:
                raise IntegrationError(f"trace drift {tr_err:.3g} at t={t:.6g}", t=t)
            if herm > HERMITICITY_TOL:
                raise IntegrationError(f"Hermiticity defect {herm:.3g} at t={t:.6g}", t=t)
            if check_positivity and min_eig < -POSITIVITY_TOL:
                raise IntegrationError(f"negative eigenvalue {min_eig:.3g} at t={t:.6g}", t=t)
        return (system.excited(rho), system.occupations(rho), tr_err, herm, min_eig,
                rho.copy() if store_states else None)

    samples, stats = integrate(rhs, rho0.ravel(), times, spec, callback=sample)
    final = samples[-1][5] if store_states else None
    return Trajectory(
        times=np.asarray(times, dtype=float),
        excited=np.array([s[0] for s in samples]),
        occupations=np.array([s[1] for s in samples]),
        trace_error=np.array([s[2] for s in samples]),
        hermiticity=np.array([s[3] for s in samples]),
        min_eigenvalue=np.array([s[4] for s in samples]),
        final_state=final,
        states=[s[5] for s in samples] if store_states else [],
        stats=stats,
    )


def _evolve_final(system, rho0, t, spec):
    dim = system.register.dimension
    gen = system.generator
    out, _ = integrate(lambda _t, y: gen(y.reshape(dim, dim)).ravel(),
                       np.asarray(rho0, dtype=complex).ravel(), [0.0, t], spec)
    return out[-1].reshape(dim, dim)


@dataclass
class SwapResult:
    efficiency: float
    time: float
    trajectory: Trajectory


def swap_window(register: ModeRegister):
    g = abs(register.couplings[0])
    if g == 0:
        raise DomainError("target mode has zero coupling; no swap possible")
    return math.pi / g


def swap_efficiency(system: System, n_samples=401, refine=64,
                    spec: IntegratorSpec = IntegratorSpec()) -> SwapResult:
    """Largest qubit excited population over ``t in [0, pi/g]`` starting from
    one phonon in the target mode, with the time at which it occurs."""
    if n_samples < 3:
        raise DomainError("n_samples must be >= 3")
    t_end = swap_window(system.register)
    times = np.linspace(0.0, t_end, n_samples)
    rho0 = single_phonon_state(system.register)
    traj = evolve(system, rho0, times, spec)
    i = int(np.argmax(traj.excited))
    best_p, best_t = float(traj.excited[i]), float(times[i])
    if refine and 0 < i < n_samples - 1:
        start = _evolve_final(system, rho0, times[i - 1], spec)
        fine = np.linspace(times[i - 1], times[i + 1], 2 * refine + 1)
        sub = evolve(system, start, fine - fine[0], spec)
        j = int(np.argmax(sub.excited))
        if sub.excited[j] > best_p:
            best_p, best_t = float(sub.excited[j]), float(fine[j])
    return SwapResult(best_p, best_t, traj)


@dataclass
class CoolingResult:
    occupations: np.ndarray   # qubit excited population: initial, then after each swap
    swap_time: float
    saturation: float         # (Gamma_QP + Gamma_P) / (g / 2 pi)

    @property
    def floor(self):
        return float(self.occupations[-1])


def cooling_protocol(system: System, n_swaps, swap_time=None, initial_excited=None,
                     spec: IntegratorSpec = IntegratorSpec()) -> CoolingResult:
    """Repeated swaps with freshly reset (vacuum) modes.

    The qubit starts diagonal with excited population ``initial_excited``
    (default: detailed balance ``(Gamma_QP + Gamma_P) / gamma_q``). After
    each swap the modes are traced out and replaced by vacuum while the
    qubit state is carried over.
    """
    if int(n_swaps) != n_swaps or n_swaps < 1:
        raise DomainError("n_swaps must be a positive integer")
    reg, rates = system.register, system.rates
    if swap_time is None:
        swap_time = swap_efficiency(system).time
    if not swap_time > 0:
        raise DomainError("swap_time must be positive")
    if initial_excited is None:
        initial_excited = rates.equilibrium_excitation if rates.gamma_q > 0 else 0.0
    if not 0.0 <= initial_excited <= 1.0:
        raise DomainError("initial_excited must lie in [0, 1]")
    rho_q = np.diag([1.0 - initial_excited, initial_excited]).astype(complex)
    occ = [float(initial_excited)]
    for _ in range(int(n_swaps)):
        rho = _evolve_final(system, with_mode_vacuum(rho_q, reg), swap_time, spec)
        rho_q = qubit_reduced(rho, reg)
        occ.append(float(np.real(rho_q[1, 1])))
    g_hz = abs(reg.couplings[0]) / (2.0 * math.pi)
    sat = rates.qubit_excitation / g_hz if g_hz > 0 else math.inf
    return CoolingResult(np.array(occ), float(swap_time), sat)


def steady_state_occupancy(n_dot_c, gamma_r):
    """Phonon number balancing CSL heating ``n_dot_c`` against decay ``gamma_r`` (Hz)."""
    if not gamma_r > 0:
        raise DomainError("steady_state_occupancy: gamma_r must be positive")
    if n_dot_c < 0:
        raise DomainError("steady_state_occupancy: n_dot_c must be >= 0")
    return n_dot_c / gamma_r


@dataclass(frozen=True)
class Event:
    kind: str          # tune | swap | measure | discard-initialization | decouple
    mode: int          # index into the mode list, -1 for array-wide events
    start: float
    duration: float


@dataclass(frozen=True)
class CycleConfig:
    swap_time: float
    measure_time: float = 56e-9
    tune_time: float = 0.0
    decouple_time: float = 0.0      # 0 selects 1 / gamma_r
    n_cycles: int = 1
    init_swaps: int = 0             # swaps per cycle whose readout is discarded


@dataclass
class Schedule:
    events: List[Event]
    cycle_duration: float
    expected_true_positives_per_cycle: float

    @property
    def detection_rate(self):
        return self.expected_true_positives_per_cycle / self.cycle_duration

    def counts(self):
        out = {}
        for e in self.events:
            out[e.kind] = out.get(e.kind, 0) + 1
        return out


def protocol_schedule(n_modes, rates: NoiseRates, cycle: CycleConfig, eta_swap, eta_disp) -> Schedule:
    """Event list for ``cycle.n_cycles`` detection cycles over ``n_modes`` modes.

    Per cycle: for each mode a tune, ``init_swaps`` discarded swap+readout
    pairs, then a swap and a measurement; the array is then left decoupled
    long enough for the modes to reach their steady state. The expected
    true-positive count uses the steady-state phonon number
    ``n_dot_c / gamma_r`` per mode.
    """
    if n_modes < 1:
        raise DomainError("protocol_schedule: need at least one mode")
    if cycle.n_cycles < 1:
        raise DomainError("protocol_schedule: n_cycles must be >= 1")
    decouple = cycle.decouple_time
    if decouple == 0 and rates.gamma_r > 0:
        decouple = 1.0 / rates.gamma_r
    if not decouple > 0:
        raise DomainError("protocol_schedule: decouple time undefined (gamma_r = 0)")
    events: List[Event] = []
    t = 0.0
    for _ in range(cycle.n_cycles):
        for k in range(n_modes):
            if cycle.tune_time > 0:
                events.append(Event("tune", k, t, cycle.tune_time))
                t += cycle.tune_time
            for _ in range(cycle.init_swaps):
                events.append(Event("swap", k, t, cycle.swap_time))
                t += cycle.swap_time
                events.append(Event("discard-initialization", k, t, cycle.measure_time))
                t += cycle.measure_time
            events.append(Event("swap", k, t, cycle.swap_time))
            t += cycle.swap_time
            events.append(Event("measure", k, t, cycle.measure_time))
            t += cycle.measure_time
        events.append(Event("decouple", -1, t, decouple))
        t += decouple
    per_mode = steady_state_occupancy(rates.n_dot_c, rates.gamma_r)
    expected = n_modes * per_mode * eta_swap * eta_disp
    return Schedule(events, t / cycle.n_cycles, expected)


def trajectory_rows(traj: Trajectory, labels: Sequence = ()):
    """Header and rows for CSV export of a trajectory."""
    n = traj.occupations.shape[1] if traj.occupations.ndim == 2 else 0
    names = [f"n_{l}_{m}" for l, m in labels] if labels else [f"n_mode{k}" for k in range(n)]
    header = ["time_s", "qubit_excited"] + names + ["trace_error", "hermiticity", "min_eigenvalue"]
    rows = []
    for i, t in enumerate(traj.times):
        rows.append([t, traj.excited[i], *traj.occupations[i], traj.trace_error[i],
                     traj.hermiticity[i], traj.min_eigenvalue[i]])
    return header, rows
