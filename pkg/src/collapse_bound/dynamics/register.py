"""Hilbert space, operators and dissipation rates for a qubit coupled to a
few phonon modes.

Tensor ordering is ``qubit (x) mode_0 (x) ... (x) mode_{K-1}``; qubit index
0 is the ground state. Rates in :class:`NoiseRates` are stored in Hz (as
usually quoted) and converted to angular units when the master equation
is assembled, except ``n_dot_c`` which is already a number rate (1/s).
"""
import math
from dataclasses import dataclass, field, replace
from typing import Sequence, Tuple

import numpy as np
import scipy.sparse as sp

from ..constants import HBAR, K_B
from ..errors import ConfigError, DomainError

MAX_DIMENSION = 4096


@dataclass(frozen=True)
class ModeRegister:
    """Phonon modes kept in the simulation.

    ``frequencies`` and ``couplings`` are angular (rad/s). The first mode is
    the swap target; the rotating frame sits at its frequency.
    """
    frequencies: Tuple[float, ...]
    couplings: Tuple[float, ...]
    fock_cutoff: int = 1
    labels: Tuple[Tuple[int, int], ...] = field(default=())
    qubit_detuning: float = 0.0
    max_dimension: int = MAX_DIMENSION

    def __post_init__(self):
        object.__setattr__(self, "frequencies", tuple(float(w) for w in self.frequencies))
        object.__setattr__(self, "couplings", tuple(float(g) for g in self.couplings))
        if not self.frequencies:
            raise ConfigError("ModeRegister needs at least one mode")
        if len(self.frequencies) != len(self.couplings):
            raise ConfigError("frequencies and couplings differ in length")
        if int(self.fock_cutoff) != self.fock_cutoff or self.fock_cutoff < 1:
            raise ConfigError("fock_cutoff must be an integer >= 1")
        if self.labels and len(self.labels) != len(self.frequencies):
            raise ConfigError("labels and frequencies differ in length")
        if not all(math.isfinite(w) and w > 0 for w in self.frequencies):
            raise ConfigError("mode frequencies must be finite and positive")
        if not all(math.isfinite(g) for g in self.couplings):
            raise ConfigError("couplings must be finite")
        if self.dimension > self.max_dimension:
            raise ConfigError(
                f"Hilbert-space dimension {self.dimension} exceeds cap {self.max_dimension}; "
                "lower fock_cutoff or drop modes")

    @classmethod
    def from_modes(cls, modes, fock_cutoff=1, **kw):
        """Build from :class:`~collapse_bound.electromech.ModeSpec` objects."""
        modes = list(modes)
        return cls(tuple(m.omega for m in modes), tuple(m.g for m in modes), fock_cutoff,
                   labels=tuple((m.l, m.m) for m in modes), **kw)

    @property
    def n_modes(self):
        return len(self.frequencies)

    @property
    def mode_dim(self):
        return self.fock_cutoff + 1

    @property
    def dimension(self):
        return 2 * self.mode_dim ** self.n_modes

    @property
    def detunings(self):
        """Mode detunings from the target mode (rad/s)."""
        w0 = self.frequencies[0]
        return tuple(w - w0 for w in self.frequencies)

    def with_cutoff(self, fock_cutoff):
        return replace(self, fock_cutoff=fock_cutoff)


def bose_occupation(frequency_hz, temperature):
    """Thermal occupation ``1 / (exp(h f / k T) - 1)``; zero at ``T = 0``."""
    if frequency_hz <= 0:
        raise DomainError("bose_occupation: frequency must be positive")
    if temperature < 0:
        raise DomainError("bose_occupation: temperature must be >= 0")
    if temperature == 0:
        return 0.0
    x = HBAR * 2.0 * math.pi * frequency_hz / (K_B * temperature)
    return 1.0 / math.expm1(x)


@dataclass(frozen=True)
class NoiseRates:
    """Dissipation rates. All in Hz except ``n_dot_c`` (phonons per second)."""
    gamma_q: float = 27e3
    gamma_phi: float = 0.3e6
    gamma_r: float = 300.0
    Gamma_QP: float = 30.0
    Gamma_P: float = 0.5
    n_th: float = 0.0
    n_dot_c: float = 0.0

    def __post_init__(self):
        for name in ("gamma_q", "gamma_phi", "gamma_r", "Gamma_QP", "Gamma_P",
                     "n_th", "n_dot_c"):
            v = getattr(self, name)
            if not (math.isfinite(v) and v >= 0):
                raise ConfigError(f"NoiseRates.{name} must be finite and >= 0, got {v!r}")

    @property
    def qubit_excitation(self):
        """``Gamma_QP + Gamma_P`` (Hz)."""
        return self.Gamma_QP + self.Gamma_P

    @property
    def equilibrium_excitation(self):
        """Detailed-balance excited population ``(Gamma_QP + Gamma_P) / gamma_q``."""
        if self.gamma_q == 0:
            raise DomainError("equilibrium excitation undefined for gamma_q = 0")
        return self.qubit_excitation / self.gamma_q

    @classmethod
    def noiseless(cls):
        return cls(0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0)


def _destroy(n):
    return sp.diags(np.sqrt(np.arange(1, n, dtype=float)), 1, shape=(n, n), format="csr")


def _embed(op, slot, dims):
    mats = [sp.identity(d, format="csr") for d in dims]
    mats[slot] = op
    out = mats[0]
    for m in mats[1:]:
        out = sp.kron(out, m, format="csr")
    return out.astype(complex)


class Operators:
    """Sparse CSR operators on the full register space."""

    def __init__(self, register: ModeRegister):
        self.register = register
        dims = [2] + [register.mode_dim] * register.n_modes
        self.dims = dims
        sm = sp.csr_matrix(np.array([[0.0, 1.0], [0.0, 0.0]]))
        sz = sp.csr_matrix(np.diag([-1.0, 1.0]))
        self.sigma_minus = _embed(sm, 0, dims)
        self.sigma_plus = self.sigma_minus.conj().T.tocsr()
        self.sigma_z = _embed(sz, 0, dims)
        a = _destroy(register.mode_dim)
        self.b = [_embed(a, k + 1, dims) for k in range(register.n_modes)]
        # diagonal number operators as dense vectors for fast expectations
        self.excited_diag = np.real((self.sigma_plus @ self.sigma_minus).diagonal())
        self.number_diag = [np.real((bk.conj().T @ bk).diagonal()) for bk in self.b]


def build_hamiltonian(register: ModeRegister, ops: Operators = None):
    """Rotating-frame Jaynes-Cummings Hamiltonian (rad/s, hbar = 1).

    ``H = delta_q sigma+ sigma- + sum_k [delta_k b_k^+ b_k + g_k (sigma+ b_k + sigma- b_k^+)]``
    """
    ops = ops or Operators(register)
    dim = register.dimension
    h = sp.csr_matrix((dim, dim), dtype=complex)
    if register.qubit_detuning:
        h = h + register.qubit_detuning * (ops.sigma_plus @ ops.sigma_minus)
    for delta, g, bk in zip(register.detunings, register.couplings, ops.b):
        bd = bk.conj().T
        if delta:
            h = h + delta * (bd @ bk)
        if g:
            h = h + g * (ops.sigma_plus @ bk + ops.sigma_minus @ bd)
    return h.tocsr()


def collapse_operators(register: ModeRegister, rates: NoiseRates, ops: Operators = None,
                       angular=True):
    """Jump operators ``sqrt(rate) L`` with rates in 1/s.

    ``angular=True`` multiplies the Hz rates by ``2 pi``; ``n_dot_c`` is
    used as given in either case.
    """
    ops = ops or Operators(register)
    c = 2.0 * math.pi if angular else 1.0
    terms = [
        (c * rates.gamma_q, ops.sigma_minus),
        (c * rates.qubit_excitation, ops.sigma_plus),
        (c * rates.gamma_phi / 2.0, ops.sigma_z),
    ]
    for bk in ops.b:
        terms.append((c * rates.gamma_r * (1.0 + rates.n_th), bk))
        terms.append((c * rates.gamma_r * rates.n_th + rates.n_dot_c, bk.conj().T.tocsr()))
    return [math.sqrt(r) * op for r, op in terms if r > 0]


def ground_state(register: ModeRegister):
    rho = np.zeros((register.dimension, register.dimension), dtype=complex)
    rho[0, 0] = 1.0
    return rho


def basis_index(register: ModeRegister, qubit, fock: Sequence[int]):
    """Flat index of ``|qubit, n_0, ..., n_{K-1}>``."""
    if len(fock) != register.n_modes:
        raise DomainError("one Fock number per mode required")
    idx = int(qubit)
    for n in fock:
        if not 0 <= n <= register.fock_cutoff:
            raise DomainError("Fock number outside cutoff")
        idx = idx * register.mode_dim + int(n)
    return idx


def single_phonon_state(register: ModeRegister, mode=0):
    """``|g> (x) |1>_mode (x) |0>_rest`` as a density matrix."""
    fock = [0] * register.n_modes
    fock[mode] = 1
    i = basis_index(register, 0, fock)
    rho = np.zeros((register.dimension, register.dimension), dtype=complex)
    rho[i, i] = 1.0
    return rho


def qubit_reduced(rho, register: ModeRegister):
    """Partial trace over all modes; returns the 2x2 qubit state."""
    n = register.mode_dim ** register.n_modes
    r = rho.reshape(2, n, 2, n)
    return np.einsum("ajbj->ab", r)


def with_mode_vacuum(rho_q, register: ModeRegister):
    """``rho_q (x) |0...0><0...0|``."""
    n = register.mode_dim ** register.n_modes
    out = np.zeros((2, n, 2, n), dtype=complex)
    out[:, 0, :, 0] = rho_q
    return out.reshape(register.dimension, register.dimension)


def density_matrix_diagnostics(rho, check_positivity=True):
    """Trace error, Hermiticity defect and smallest eigenvalue of ``rho``."""
    tr = np.trace(rho)
    herm = float(np.max(np.abs(rho - rho.conj().T))) if rho.size else 0.0
    min_eig = float(np.linalg.eigvalsh(0.5 * (rho + rho.conj().T))[0]) if check_positivity else math.nan
    return {"trace_error": float(abs(tr - 1.0)), "hermiticity": herm, "min_eigenvalue": min_eig}
