import math

import numpy as np
import pytest
import scipy.sparse as sp

from collapse_bound import ConfigError, DomainError, IntegrationError
from collapse_bound.dynamics import (CycleConfig, IntegratorSpec, LindbladGenerator, ModeRegister,
                                     NoiseRates, Operators, System, build_hamiltonian,
                                     collapse_operators, cooling_protocol, evolve, ground_state,
                                     integrate, protocol_schedule, qubit_reduced,
                                     single_phonon_state, steady_state_occupancy,
                                     swap_efficiency, trajectory_rows, with_mode_vacuum)
from collapse_bound.dynamics.register import basis_index, bose_occupation
from collapse_bound.noise import measurement_time

from conftest import single_mode_register

TWO_PI = 2 * math.pi
rng = np.random.default_rng(7)


def random_density(dim):
    a = rng.normal(size=(dim, dim)) + 1j * rng.normal(size=(dim, dim))
    rho = a @ a.conj().T
    return rho / np.trace(rho)


def excited_state(register):
    rho = np.zeros((register.dimension,) * 2, dtype=complex)
    i = basis_index(register, 1, [0] * register.n_modes)
    rho[i, i] = 1.0
    return rho


def trace_distance(a, b):
    return 0.5 * np.sum(np.abs(np.linalg.eigvalsh(a - b)))


# register --------------------------------------------------------------------

def test_dimension_and_cap(design_register):
    assert design_register.dimension == 128
    assert design_register.with_cutoff(2).dimension == 2 * 3 ** 6
    with pytest.raises(ConfigError):
        design_register.with_cutoff(3)      # 2 * 4^6 = 8192 > 4096
    with pytest.raises(ConfigError):
        ModeRegister((1.0,), (1.0,), fock_cutoff=0)
    with pytest.raises(ConfigError):
        ModeRegister((1.0, 2.0), (1.0,))


def test_detunings_from_dispersion(design_register):
    d = design_register.detunings
    assert d[0] == 0.0
    assert all(x > 0 for x in d[1:4])     # transverse overtones sit above the target
    assert d[4] < 0 < d[5]                # l - 1 below, l + 1 above


def test_bose_occupation():
    assert bose_occupation(6.65e9, 0.0) == 0.0
    assert bose_occupation(6.65e9, 10e-3) == pytest.approx(1.3788156190322932e-14, rel=1e-9)
    assert bose_occupation(1e3, 1.0) == pytest.approx(1.380649e-23 / (6.62607015e-34 * 1e3), rel=1e-6)


def test_noise_rates_validation():
    with pytest.raises(ConfigError):
        NoiseRates(gamma_q=-1.0)
    r = NoiseRates()
    assert r.qubit_excitation == pytest.approx(30.5)
    assert r.equilibrium_excitation == pytest.approx(30.5 / 27e3)
    assert NoiseRates.noiseless().qubit_excitation == 0.0


def test_partial_trace_roundtrip(design_register):
    rho_q = np.array([[0.7, 0.1 - 0.2j], [0.1 + 0.2j, 0.3]])
    full = with_mode_vacuum(rho_q, design_register)
    assert np.trace(full) == pytest.approx(1.0)
    np.testing.assert_allclose(qubit_reduced(full, design_register), rho_q, atol=1e-15)


# Hamiltonian -----------------------------------------------------------------

def test_zero_hamiltonian():
    reg = ModeRegister((1e10, 1e10), (0.0, 0.0))
    assert build_hamiltonian(reg).nnz == 0


def test_jaynes_cummings_doublet():
    g = TWO_PI * 3e6
    reg = ModeRegister((TWO_PI * 6.65e9,), (g,))
    h = build_hamiltonian(reg).toarray()
    i_e0 = basis_index(reg, 1, [0])
    i_g1 = basis_index(reg, 0, [1])
    block = h[np.ix_([i_e0, i_g1], [i_e0, i_g1])]
    np.testing.assert_allclose(np.linalg.eigvalsh(block), [-g, g], rtol=1e-15)


def test_design_hamiltonian_hermitian(design_system):
    h = design_system.hamiltonian
    assert abs(h - h.conj().T).max() == 0.0


# generator -------------------------------------------------------------------

def test_zero_generator():
    reg = ModeRegister((1e10,), (0.0,))
    gen = System(reg, NoiseRates.noiseless()).generator
    assert np.all(gen(random_density(reg.dimension)) == 0)


def test_qubit_decay_rate_at_origin():
    reg = ModeRegister((1e10,), (0.0,))
    rates = NoiseRates(gamma_q=1e4, gamma_phi=0, gamma_r=0, Gamma_QP=0, Gamma_P=0)
    for angular, scale in ((False, 1.0), (True, TWO_PI)):
        s = System(reg, rates, angular=angular)
        rho = excited_state(reg)
        assert s.excited(s.generator(rho)) == pytest.approx(-scale * 1e4, rel=1e-14)


def test_heating_rate_at_origin():
    reg = ModeRegister((1e10,), (0.0,))
    rates = NoiseRates(gamma_q=0, gamma_phi=0, gamma_r=0, Gamma_QP=0, Gamma_P=0, n_dot_c=3.8e-4)
    s = System(reg, rates)
    d = s.generator(ground_state(reg))
    assert s.occupations(d)[0] == pytest.approx(3.8e-4, rel=1e-14)


@pytest.mark.parametrize("backend", ["numba", "numpy"])
def test_backends_match_superoperator(design_register, backend):
    rates = NoiseRates(n_th=0.1, n_dot_c=5.0)
    ops = Operators(design_register)
    h = build_hamiltonian(design_register, ops)
    jumps = collapse_operators(design_register, rates, ops)
    gen = LindbladGenerator(h, jumps, backend)
    ref_super = LindbladGenerator(h, jumps, "numpy").dense_superoperator()
    rho = random_density(design_register.dimension)
    got = gen(rho)
    ref = (ref_super @ rho.ravel(order="F")).reshape(rho.shape, order="F")
    scale = np.max(np.abs(ref))
    assert np.max(np.abs(got - ref)) <= 1e-13 * scale


def test_generator_is_trace_preserving_and_hermitian(design_system):
    rho = random_density(design_system.register.dimension)
    d = design_system.generator(rho)
    scale = np.max(np.abs(d))
    assert abs(np.trace(d)) <= 1e-13 * scale
    assert np.max(np.abs(d - d.conj().T)) <= 1e-13 * scale


def test_unknown_backend():
    with pytest.raises(ValueError):
        LindbladGenerator(sp.identity(2), [], "fortran")


# integrator ------------------------------------------------------------------

def test_integrator_exponential_and_exact_times():
    times = np.array([0.0, 0.1, 0.37, 1.0, 2.0])
    out, stats = integrate(lambda t, y: -3.0 * y, np.array([1.0 + 0j]), times)
    np.testing.assert_allclose([o[0].real for o in out], np.exp(-3.0 * times), rtol=1e-8)
    assert stats.accepted > 0


def test_integrator_errors():
    with pytest.raises(IntegrationError):
        integrate(lambda t, y: y, np.ones(1), [1.0, 0.0])
    with pytest.raises(IntegrationError), np.errstate(invalid="ignore"):
        integrate(lambda t, y: y * np.nan, np.ones(1, dtype=complex), [0.0, 1.0])
    with pytest.raises(IntegrationError):
        integrate(lambda t, y: -1e3 * y, np.ones(1, dtype=complex), [0.0, 100.0],
                  IntegratorSpec(max_steps=5))


def test_exponential_qubit_decay_over_five_lifetimes():
    reg = ModeRegister((1e10,), (0.0,))
    gamma = 1e4
    rates = NoiseRates(gamma_q=gamma, gamma_phi=0, gamma_r=0, Gamma_QP=0, Gamma_P=0)
    s = System(reg, rates, angular=False)
    times = np.linspace(0.0, 5.0 / gamma, 41)
    traj = evolve(s, excited_state(reg), times)
    assert np.max(np.abs(traj.excited - np.exp(-gamma * times))) < 1e-6


def test_lossless_swap_unit_fidelity():
    reg = single_mode_register()
    s = System(reg, NoiseRates.noiseless())
    g = reg.couplings[0]
    traj = evolve(s, single_phonon_state(reg), [0.0, math.pi / (2 * g)])
    assert abs(traj.excited[-1] - 1.0) < 1e-6
    res = swap_efficiency(s, n_samples=101)
    assert abs(res.efficiency - 1.0) < 1e-6
    assert res.time == pytest.approx(math.pi / (2 * g), rel=1e-2)


def test_excitation_number_conservation(design_register):
    s = System(design_register, NoiseRates.noiseless())
    times = np.linspace(0.0, math.pi / design_register.couplings[0], 25)
    traj = evolve(s, single_phonon_state(design_register), times)
    total = traj.excited + traj.occupations.sum(axis=1)
    assert np.max(np.abs(total - 1.0)) < 1e-9


def test_energy_conservation_without_dissipation(design_register):
    s = System(design_register, NoiseRates.noiseless())
    # start in a detuned mode so <H> is nonzero
    rho0 = single_phonon_state(design_register, mode=5)
    h = s.hamiltonian.toarray()
    period = TWO_PI / design_register.couplings[0]
    traj = evolve(s, rho0, np.linspace(0.0, period, 21), store_states=True)
    e = np.array([np.real(np.trace(h @ r)) for r in traj.states])
    assert np.max(np.abs(e - e[0])) <= 1e-8 * abs(e[0])


def test_invariants_along_lossy_trajectory(design_system):
    times = np.linspace(0.0, 1e-7, 21)
    traj = evolve(design_system, single_phonon_state(design_system.register), times,
                  store_states=True)
    assert np.all(traj.trace_error < 1e-9)
    assert np.all(traj.hermiticity <= 1e-10)
    assert np.all(traj.min_eigenvalue >= -1e-8)
    purity = np.array([np.real(np.trace(r @ r)) for r in traj.states])
    assert np.all(purity <= 1 + 1e-9)
    assert purity[-1] < 1.0


def test_half_tolerance_convergence(design_system):
    t = [0.0, 80e-9]
    rho0 = single_phonon_state(design_system.register)
    spec = IntegratorSpec(rtol=1e-8, atol=1e-11)
    half = IntegratorSpec(rtol=0.5e-8, atol=0.5e-11)
    a = evolve(design_system, rho0, t, spec, store_states=True).final_state
    b = evolve(design_system, rho0, t, half, store_states=True).final_state
    assert trace_distance(a, b) < 1e-7
    assert trace_distance(a, b) < 10 * spec.rtol


def test_invariant_violation_raises():
    reg = ModeRegister((1e10,), (0.0,))
    s = System(reg, NoiseRates.noiseless())
    bad = ground_state(reg) * 2.0
    with pytest.raises(IntegrationError):
        evolve(s, bad, [0.0, 1e-9])
    with pytest.raises(DomainError):
        evolve(s, np.eye(3), [0.0, 1e-9])


def test_trajectory_rows(design_register):
    s = System(design_register, NoiseRates.noiseless())
    traj = evolve(s, single_phonon_state(design_register), [0.0, 1e-9, 2e-9])
    header, rows = trajectory_rows(traj, design_register.labels)
    assert header[:3] == ["time_s", "qubit_excited", "n_503_0"]
    assert len(rows) == 3 and all(len(r) == len(header) for r in rows)


# protocols -------------------------------------------------------------------

def test_dephasing_degrades_swap():
    reg = single_mode_register()
    base = NoiseRates(gamma_r=0.0, Gamma_QP=0.0, Gamma_P=0.0)
    worse = NoiseRates(gamma_r=0.0, Gamma_QP=0.0, Gamma_P=0.0, gamma_phi=2 * base.gamma_phi)
    e1 = swap_efficiency(System(reg, base), n_samples=101).efficiency
    e2 = swap_efficiency(System(reg, worse), n_samples=101).efficiency
    assert e2 < e1 < 1.0


def test_swap_efficiency_design(design_swap):
    assert 0.7 <= design_swap.efficiency <= 0.9
    assert 60e-9 <= design_swap.time <= 100e-9


def test_swap_requires_coupling():
    reg = ModeRegister((1e10,), (0.0,))
    with pytest.raises(DomainError):
        swap_efficiency(System(reg, NoiseRates()))


def test_cooling_without_excitation_decays(design_system, design_swap):
    rates = NoiseRates(Gamma_QP=0.0, Gamma_P=0.0)
    s = System(design_system.register, rates)
    res = cooling_protocol(s, 8, swap_time=design_swap.time, initial_excited=1e-3)
    occ = res.occupations
    floor = 1e-10  # integrator atol 1e-12 accumulated over a swap
    for a, b in zip(occ, occ[1:]):
        assert b <= a or abs(b) < floor
    assert abs(occ[-1]) < floor


def test_cooling_design(design_system, design_swap):
    res = cooling_protocol(design_system, 5, swap_time=design_swap.time)
    occ = res.occupations
    assert np.all(np.diff(occ) <= 1e-15)
    assert 1e-5 < occ[1] < 1e-3
    assert 2e-6 <= res.floor <= 18e-6
    assert res.saturation == pytest.approx(30.5 / (design_system.register.couplings[0] / TWO_PI))


def test_cooling_validation(design_system):
    with pytest.raises(DomainError):
        cooling_protocol(design_system, 0, swap_time=1e-8)
    with pytest.raises(DomainError):
        cooling_protocol(design_system, 1, swap_time=1e-8, initial_excited=2.0)


def test_steady_state_occupancy():
    assert steady_state_occupancy(3.8e-4, 300.0) == pytest.approx(1.2666666666666666e-6)
    assert steady_state_occupancy(0.0, 300.0) == 0.0
    assert steady_state_occupancy(7.6e-4, 300.0) == pytest.approx(2 * steady_state_occupancy(3.8e-4, 300.0))
    with pytest.raises(DomainError):
        steady_state_occupancy(1.0, 0.0)


def test_schedule_single_mode():
    sched = protocol_schedule(1, NoiseRates(), CycleConfig(swap_time=80e-9), 0.8, 0.1)
    assert [e.kind for e in sched.events] == ["swap", "measure", "decouple"]
    starts = [e.start for e in sched.events]
    assert starts == sorted(starts)
    assert sched.events[-1].duration == pytest.approx(1 / 300.0)


def test_schedule_many_modes():
    cyc = CycleConfig(swap_time=80e-9, tune_time=5e-9, n_cycles=2, init_swaps=1)
    sched = protocol_schedule(4, NoiseRates(), cyc, 0.8, 0.1)
    c = sched.counts()
    assert c["swap"] == 2 * 4 * 2 and c["measure"] == 8 and c["decouple"] == 2
    assert c["tune"] == 8 and c["discard-initialization"] == 8
    assert all(e.duration >= 1 / 300.0 for e in sched.events if e.kind == "decouple")


@pytest.mark.parametrize("n_modes", [1, 189])
def test_detection_rate_matches_measurement_time(n_modes):
    rates = NoiseRates(n_dot_c=3.8e-4)
    sched = protocol_schedule(n_modes, rates, CycleConfig(swap_time=83e-9), 0.8, 0.1)
    t_meas = measurement_time(3.8e-4, 0.8, 0.1, n_modes)
    assert (1.0 / sched.detection_rate) == pytest.approx(t_meas, rel=1e-2)


def test_cutoff_sensitivity():
    # two-mode register with a detuned neighbour. Cutoffs 1 and 2 differ only through
    # two-excitation states, reachable via a qubit excitation during the swap.
    g = TWO_PI * 3e6
    reg = ModeRegister((TWO_PI * 6.65e9, TWO_PI * 6.6634e9), (g, 0.5 * g))
    rates = NoiseRates()
    r1 = swap_efficiency(System(reg, rates), n_samples=101)
    r2 = swap_efficiency(System(reg.with_cutoff(2), rates), n_samples=101)
    bound = TWO_PI * rates.qubit_excitation * math.pi / g
    assert 0 < abs(r1.efficiency - r2.efficiency) < bound
