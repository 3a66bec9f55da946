"""Lindblad generator on a dense density matrix with sparse operators.

With ``H_eff = H - (i/2) sum_k L_k^+ L_k`` the generator reads

    d rho / dt = -i (H_eff rho - rho H_eff^+) + sum_k L_k rho L_k^+

Two interchangeable back-ends evaluate it: hand-written CSR loops under
numba, and scipy.sparse products otherwise.
"""
import numpy as np
import scipy.sparse as sp

from .._jit import USE_NUMBA, njit


@njit
def _csr_left(indptr, indices, data, b, out, scale):
    # out += scale * (A @ b)
    n = b.shape[1]
    for i in range(indptr.size - 1):
        for p in range(indptr[i], indptr[i + 1]):
            v = scale * data[p]
            j = indices[p]
            for c in range(n):
                out[i, c] += v * b[j, c]


@njit
def _csr_right_adj(indptr, indices, data, b, out, scale):
    # out += scale * (b @ A^+),  (b A^+)[r, k] = sum_j b[r, j] conj(A[k, j])
    m = b.shape[0]
    for k in range(indptr.size - 1):
        for p in range(indptr[k], indptr[k + 1]):
            v = scale * np.conj(data[p])
            j = indices[p]
            for r in range(m):
                out[r, k] += v * b[r, j]


@njit
def _rhs_kernel(h_ptr, h_idx, h_dat, l_ptr, l_idx, l_dat, l_rowoff, l_nzoff, n_jump, rho, out, tmp):
    out[:, :] = 0.0
    _csr_left(h_ptr, h_idx, h_dat, rho, out, -1j)
    _csr_right_adj(h_ptr, h_idx, h_dat, rho, out, 1j)
    dim = rho.shape[0]
    for k in range(n_jump):
        ptr = l_ptr[l_rowoff[k]:l_rowoff[k] + dim + 1] - l_nzoff[k]
        idx = l_idx[l_nzoff[k]:l_nzoff[k + 1]]
        dat = l_dat[l_nzoff[k]:l_nzoff[k + 1]]
        tmp[:, :] = 0.0
        _csr_left(ptr, idx, dat, rho, tmp, 1.0 + 0j)
        _csr_right_adj(ptr, idx, dat, tmp, out, 1.0 + 0j)


class LindbladGenerator:
    """Callable ``rho -> d rho / dt`` for a fixed Hamiltonian and jump set.

    ``backend`` is ``"numba"``, ``"numpy"`` or ``None`` (follow the
    ``COLLAPSE_BOUND_NUMBA`` switch).
    """

    def __init__(self, hamiltonian, jump_ops, backend=None):
        h = sp.csr_matrix(hamiltonian, dtype=complex)
        dim = h.shape[0]
        jumps = [sp.csr_matrix(L, dtype=complex) for L in jump_ops]
        heff = h.copy()
        for L in jumps:
            heff = heff - 0.5j * (L.conj().T @ L)
        self.heff = heff.tocsr()
        self.heff.sort_indices()
        self.heff_adj = self.heff.conj().T.tocsr()
        self.jumps = jumps
        self.jumps_adj = [L.conj().T.tocsr() for L in jumps]
        self.dim = dim
        if backend is None:
            backend = "numba" if USE_NUMBA else "numpy"
        if backend not in ("numba", "numpy"):
            raise ValueError(f"unknown backend {backend!r}")
        self.backend = backend
        if backend == "numba":
            self._pack()

    def _pack(self):
        h = self.heff
        self._h = (h.indptr.astype(np.int64), h.indices.astype(np.int64), h.data)
        ptrs, idxs, dats, rowoff, nzoff = [], [], [], [0], [0]
        for L in self.jumps:
            ptrs.append(L.indptr.astype(np.int64) + nzoff[-1])
            idxs.append(L.indices.astype(np.int64))
            dats.append(L.data)
            rowoff.append(rowoff[-1] + self.dim + 1)
            nzoff.append(nzoff[-1] + L.nnz)
        empty_i = np.zeros(0, dtype=np.int64)
        self._l = (
            np.concatenate(ptrs) if ptrs else empty_i,
            np.concatenate(idxs) if idxs else empty_i,
            np.concatenate(dats) if dats else np.zeros(0, dtype=complex),
            np.array(rowoff, dtype=np.int64),
            np.array(nzoff, dtype=np.int64),
            len(self.jumps),
        )
        self._tmp = np.zeros((self.dim, self.dim), dtype=complex)

    def __call__(self, rho):
        if self.backend == "numba":
            out = np.empty((self.dim, self.dim), dtype=complex)
            rho = np.ascontiguousarray(rho, dtype=complex)
            _rhs_kernel(*self._h, *self._l, rho, out, self._tmp)
            return out
        # rho A^+ = (A rho^+)^+ holds for any rho
        a = self.heff @ rho
        out = -1j * a + 1j * (self.heff @ rho.conj().T).conj().T
        for L in self.jumps:
            t = L @ rho
            out += (L @ t.conj().T).conj().T
        return out

    def dense_superoperator(self):
        """Column-stacked superoperator matrix (for tests and steady states)."""
        n = self.dim
        eye = sp.identity(n, format="csr", dtype=complex)
        heff = self.heff
        s = -1j * sp.kron(eye, heff) + 1j * sp.kron(heff.conj(), eye)
        for L in self.jumps:
            s = s + sp.kron(L.conj(), L)
        return s.toarray()


def lindblad_rhs(rho, hamiltonian, jump_ops, backend=None):
    """One-shot evaluation of the Lindblad generator."""
    return LindbladGenerator(hamiltonian, jump_ops, backend)(rho)
