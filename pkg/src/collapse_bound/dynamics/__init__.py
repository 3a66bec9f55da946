from .evolve import (CoolingResult, CycleConfig, Event, Schedule, SwapResult, System,
                     cooling_protocol, evolve, protocol_schedule, steady_state_occupancy,
                     swap_efficiency, swap_window, trajectory_rows)
from .integrator import IntegratorSpec, Trajectory, integrate
from .lindblad import LindbladGenerator, lindblad_rhs
from .register import (MAX_DIMENSION, ModeRegister, NoiseRates, Operators, bose_occupation,
                       build_hamiltonian, collapse_operators, density_matrix_diagnostics,
                       ground_state, qubit_reduced, single_phonon_state, with_mode_vacuum)

__all__ = [
    "CoolingResult", "CycleConfig", "Event", "IntegratorSpec", "LindbladGenerator",
    "MAX_DIMENSION", "ModeRegister", "NoiseRates", "Operators", "Schedule", "SwapResult",
    "System", "Trajectory", "bose_occupation", "build_hamiltonian", "collapse_operators",
    "cooling_protocol", "density_matrix_diagnostics", "evolve", "ground_state", "integrate",
    "lindblad_rhs", "protocol_schedule", "qubit_reduced", "single_phonon_state",
    "steady_state_occupancy", "swap_efficiency", "swap_window", "trajectory_rows",
    "with_mode_vacuum",
]
