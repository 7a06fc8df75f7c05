"""Dense reference implementations.

Everything in this module is deliberately *slow and obvious*: matrices are
assembled with explicit Kronecker products, states with elementwise formulas.
The fast bitmask paths elsewhere in the package are tested against these
routines, so nothing here may share code with them.
"""

from __future__ import annotations

from itertools import combinations

import numpy as np
from scipy.linalg import eigh, eigvalsh

from .pauli import DENSE_QUBIT_LIMIT, PauliString, PauliSum

__all__ = [
    "dense_string_matrix",
    "dense_sum_matrix",
    "ground_energy",
    "ground_state",
    "spectrum",
    "sector_basis",
    "restricted_matrix",
    "sector_ground_energy",
    "exponential_jastrow_diagonal",
    "exponential_jastrow_state",
    "rayleigh_quotient",
    "power_iteration_ground_energy",
    "embed_gate",
]

_P1 = {
    "I": np.eye(2, dtype=np.complex128),
    "X": np.array([[0, 1], [1, 0]], dtype=np.complex128),
    "Y": np.array([[0, -1j], [1j, 0]], dtype=np.complex128),
    "Z": np.array([[1, 0], [0, -1]], dtype=np.complex128),
}


def _check_dense(n_qubits: int) -> None:
    if n_qubits > DENSE_QUBIT_LIMIT:
        raise ValueError(f"refusing dense work on {n_qubits} qubits "
                         f"(limit {DENSE_QUBIT_LIMIT})")


def dense_string_matrix(string: PauliString) -> np.ndarray:
    """Kron of 2x2 letter matrices times the string's phase.

    Qubit 0 is the least significant bit of the row/column index, so it is the
    rightmost factor of the Kronecker product.
    """
    _check_dense(string.n_qubits)
    mat = np.array([[1.0]], dtype=np.complex128)
    for letter in string.label():          # qubit 0 first ...
        mat = np.kron(_P1[letter], mat)    # ... therefore innermost factor
    return string.phase * mat


def dense_sum_matrix(op: PauliSum) -> np.ndarray:
    _check_dense(op.n_qubits)
    dim = 1 << op.n_qubits
    mat = np.zeros((dim, dim), dtype=np.complex128)
    for string, coeff in op.terms():
        mat += coeff * dense_string_matrix(string)
    return mat


def ground_energy(op: PauliSum) -> float:
    """Lowest eigenvalue by dense Hermitian diagonalization."""
    return float(spectrum(op)[0])


def ground_state(op: PauliSum) -> tuple[float, np.ndarray]:
    mat = dense_sum_matrix(op)
    _assert_hermitian(mat)
    vals, vecs = eigh(mat)
    return float(vals[0]), vecs[:, 0]


def spectrum(op: PauliSum) -> np.ndarray:
    """All eigenvalues, ascending."""
    mat = dense_sum_matrix(op)
    _assert_hermitian(mat)
    return eigvalsh(mat)


def _assert_hermitian(mat: np.ndarray, tol: float = 1e-9) -> None:
    if np.max(np.abs(mat - mat.conj().T)) > tol:
        raise ValueError("operator is not Hermitian")


# -- occupation-sector tools -------------------------------------------------
#
# These work directly on occupation bitstrings (bit q of a basis index = the
# occupation of spin orbital q, spin-up orbitals on even bits), so they apply
# to Jordan-Wigner-encoded operators of any size without a 2^N matrix.

def sector_basis(n_modes: int, n_alpha: int, n_beta: int) -> list[int]:
    """Occupation bitstrings with the given spin-resolved electron counts."""
    n_spatial = n_modes // 2
    if n_modes % 2:
        raise ValueError("expected an even number of spin orbitals")
    alphas = [sum(1 << (2 * p) for p in occ)
              for occ in combinations(range(n_spatial), n_alpha)]
    betas = [sum(1 << (2 * p + 1) for p in occ)
             for occ in combinations(range(n_spatial), n_beta)]
    return sorted(a | b for a in alphas for b in betas)


def restricted_matrix(op: PauliSum, basis: list[int]) -> np.ndarray:
    """Matrix of `op` restricted to the span of the given basis states.

    Raises if `op` leaks outside the subspace (it then would not be block
    diagonal and the restriction would be meaningless).
    """
    pos = {state: k for k, state in enumerate(basis)}
    dim = len(basis)
    mat = np.zeros((dim, dim), dtype=np.complex128)
    for string, coeff in op.terms():
        x, z = string.x_mask, string.z_mask
        front = coeff * (1j ** ((x & z).bit_count() & 3))
        for state, col in pos.items():
            target = state ^ x
            row = pos.get(target)
            if row is None:
                raise ValueError("operator maps sector basis outside itself")
            sign = -1.0 if ((state & z).bit_count() & 1) else 1.0
            mat[row, col] += front * sign
    return mat


def sector_ground_energy(op: PauliSum, n_alpha: int, n_beta: int) -> float:
    """Ground energy of an occupation-encoded operator in one (N, S_z) sector."""
    basis = sector_basis(op.n_qubits, n_alpha, n_beta)
    mat = restricted_matrix(op, basis)
    _assert_hermitian(mat)
    return float(eigvalsh(mat)[0])


# -- Jastrow reference -------------------------------------------------------

def exponential_jastrow_diagonal(n_qubits: int, alpha: np.ndarray,
                                 lam: np.ndarray) -> np.ndarray:
    """Diagonal of exp(-sum_i a_i Z_i - sum_{i<j} l_ij Z_i Z_j).

    `lam` is an (n, n) array of which only the strict upper triangle is read.
    """
    _check_dense(n_qubits)
    alpha = np.asarray(alpha, dtype=float)
    lam = np.asarray(lam, dtype=float)
    dim = 1 << n_qubits
    out = np.empty(dim, dtype=float)
    for j in range(dim):
        s = [1.0 - 2.0 * ((j >> q) & 1) for q in range(n_qubits)]
        expo = -sum(alpha[q] * s[q] for q in range(n_qubits))
        expo -= sum(lam[i, k] * s[i] * s[k]
                    for i in range(n_qubits) for k in range(i + 1, n_qubits))
        out[j] = np.exp(expo)
    return out


def exponential_jastrow_state(state: np.ndarray, params) -> np.ndarray:
    """Apply the exponential correlator exp(-sum a Z - sum b ZZ) to a state.

    Takes a `jastrow.JastrowParams`; the result is unnormalized (the
    operator is positive-definite diagonal, not unitary).  This is the
    reference form the truncated linear correlator approximates, kept here
    with the dense-matrix oracles because nothing in the production path
    should need it.
    """
    state = np.asarray(state)
    n = params.n_qubits
    if state.shape != (1 << n,):
        raise ValueError("state length does not match the parameter set")
    diag = exponential_jastrow_diagonal(n, params.alpha, params.pair_matrix())
    return diag * state


def rayleigh_quotient(mat: np.ndarray, vec: np.ndarray) -> float:
    num = np.vdot(vec, mat @ vec)
    den = np.vdot(vec, vec)
    return float((num / den).real)


def power_iteration_ground_energy(op: PauliSum, tol: float = 1e-8,
                                  max_iter: int = 200_000,
                                  seed: int = 7) -> float:
    """Ground energy via power iteration on (sigma*I - H).

    Independent of the eigensolver route; sigma is the L1 coefficient bound,
    which dominates the spectral radius.
    """
    mat = dense_sum_matrix(op)
    _assert_hermitian(mat)
    sigma = sum(abs(c) for _, c in op.terms()) + 1.0
    shifted = sigma * np.eye(mat.shape[0]) - mat
    rng = np.random.default_rng(seed)
    v = rng.standard_normal(mat.shape[0]) + 1j * rng.standard_normal(mat.shape[0])
    v /= np.linalg.norm(v)
    last = np.inf
    for _ in range(max_iter):
        w = shifted @ v
        lam = np.vdot(v, w).real
        v = w / np.linalg.norm(w)
        if abs(lam - last) < tol:
            break
        last = lam
    return float(sigma - lam)


# -- dense circuit assembly --------------------------------------------------

def embed_gate(n_qubits: int, gate: np.ndarray, qubits: tuple[int, ...]) -> np.ndarray:
    """Expand a small gate matrix to the full 2^N space.

    `qubits[0]` is the least significant bit of the gate's own index space.
    """
    _check_dense(n_qubits)
    k = len(qubits)
    if gate.shape != (1 << k, 1 << k):
        raise ValueError("gate shape does not match qubit tuple")
    dim = 1 << n_qubits
    full = np.zeros((dim, dim), dtype=np.complex128)
    rest = [q for q in range(n_qubits) if q not in qubits]
    for j in range(dim):
        gcol = sum(((j >> q) & 1) << b for b, q in enumerate(qubits))
        base = sum(((j >> q) & 1) << q for q in rest)
        for grow in range(1 << k):
            amp = gate[grow, gcol]
            if amp == 0.0:
                continue
            row = base | sum(((grow >> b) & 1) << q for b, q in enumerate(qubits))
            full[row, j] += amp
    return full
