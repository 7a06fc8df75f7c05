"""Hardware-efficient ansatz and statevector simulation.

The ansatz is the standard Ry/CNOT-ladder circuit: one Ry rotation per qubit,
then `n_blocks` repetitions of [CNOT ladder q0->q1->...->q(N-1), Ry layer].
All of its gates are real, so states are propagated in float64; anything that
needs complex amplitudes (measurement basis changes, generic operators) lives
in the sampling and oracle modules.

Index conventions: qubit q is bit q of the amplitude index (qubit 0 = least
significant bit); parameters are layer-major, ``theta[layer * n + q]``.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .pauli import PauliSum

__all__ = [
    "AnsatzSpec",
    "prepare_state",
    "prepare_states",
    "exact_expectation",
    "apply_diagonal_operator",
    "ExpectationKernel",
    "ry_matrix",
    "CNOT_MATRIX",
]

CNOT_MATRIX = np.array([[1, 0, 0, 0],
                        [0, 1, 0, 0],
                        [0, 0, 0, 1],
                        [0, 0, 1, 0]], dtype=np.complex128)


def ry_matrix(angle: float) -> np.ndarray:
    """Ry(t) = exp(-i t Y / 2), a real rotation."""
    c, s = np.cos(angle / 2.0), np.sin(angle / 2.0)
    return np.array([[c, -s], [s, c]])


@dataclass(frozen=True)
class AnsatzSpec:
    """Shape of the variational circuit.

    reference: computational basis state prepared before the first layer,
        as an integer bitstring (bit q = qubit q).
    """
    n_qubits: int
    n_blocks: int
    reference: int = 0

    def __post_init__(self):
        if self.n_qubits < 1:
            raise ValueError("need at least one qubit")
        if self.n_blocks < 0:
            raise ValueError("n_blocks must be >= 0")
        if not 0 <= self.reference < (1 << self.n_qubits):
            raise ValueError("reference state out of range")

    @property
    def n_parameters(self) -> int:
        return self.n_qubits * (self.n_blocks + 1)

    def gate_sequence(self, theta: np.ndarray) -> list[tuple[str, tuple[int, ...], float | None]]:
        """Flat gate list, earliest gate first: ('ry', (q,), angle) / ('cnot', (c, t), None)."""
        theta = np.asarray(theta, dtype=float)
        if theta.shape != (self.n_parameters,):
            raise ValueError(f"expected {self.n_parameters} parameters, "
                             f"got shape {theta.shape}")
        n = self.n_qubits
        gates: list[tuple[str, tuple[int, ...], float | None]] = []
        gates.extend(("ry", (q,), float(theta[q])) for q in range(n))
        for b in range(1, self.n_blocks + 1):
            gates.extend(("cnot", (q, q + 1), None) for q in range(n - 1))
            gates.extend(("ry", (q,), float(theta[b * n + q])) for q in range(n))
        return gates


@lru_cache(maxsize=None)
def _cnot_indices(n_qubits: int, control: int, target: int) -> tuple[np.ndarray, np.ndarray]:
    j = np.arange(1 << n_qubits, dtype=np.int64)
    sel = ((j >> control) & 1).astype(bool) & ~((j >> target) & 1).astype(bool)
    low = j[sel]
    return low, low | (1 << target)


def _apply_ry(psi: np.ndarray, n_qubits: int, q: int, angle) -> None:
    """In-place Ry on qubit q; works on (dim,) or (batch, dim) arrays.

    For batched states `angle` may be an array of per-row angles.
    """
    c = np.cos(np.asarray(angle) / 2.0)
    s = np.sin(np.asarray(angle) / 2.0)
    lead = psi.shape[:-1]
    view = psi.reshape(*lead, -1, 2, 1 << q)
    if lead:
        c = c.reshape(-1, 1, 1)
        s = s.reshape(-1, 1, 1)
    v0 = view[..., 0, :].copy()
    v1 = view[..., 1, :]
    view[..., 0, :] = c * v0 - s * v1
    view[..., 1, :] = s * v0 + c * v1


def _apply_cnot(psi: np.ndarray, n_qubits: int, control: int, target: int) -> None:
    low, high = _cnot_indices(n_qubits, control, target)
    tmp = psi[..., low].copy()
    psi[..., low] = psi[..., high]
    psi[..., high] = tmp


def prepare_state(spec: AnsatzSpec, theta: np.ndarray) -> np.ndarray:
    """Run the ansatz on the reference state; returns a real float64 vector."""
    return prepare_states(spec, np.asarray(theta, dtype=float)[None, :])[0]


def prepare_states(spec: AnsatzSpec, thetas: np.ndarray) -> np.ndarray:
    """Batched ansatz evaluation: thetas (B, P) -> states (B, 2^N)."""
    thetas = np.asarray(thetas, dtype=float)
    if thetas.ndim != 2 or thetas.shape[1] != spec.n_parameters:
        raise ValueError(f"expected (batch, {spec.n_parameters}) parameters")
    n = spec.n_qubits
    batch = thetas.shape[0]
    psi = np.zeros((batch, 1 << n), dtype=np.float64)
    psi[:, spec.reference] = 1.0
    for q in range(n):
        _apply_ry(psi, n, q, thetas[:, q])
    for b in range(1, spec.n_blocks + 1):
        for q in range(n - 1):
            _apply_cnot(psi, n, q, q + 1)
        for q in range(n):
            _apply_ry(psi, n, q, thetas[:, b * n + q])
    return psi


# -- expectation values ------------------------------------------------------

def exact_expectation(state: np.ndarray, op: PauliSum) -> float:
    """<state|op|state> by per-term XOR/parity arithmetic.

    `op` must be Hermitian (real coefficients in canonical storage); the
    state need not be normalized -- callers divide where appropriate.
    """
    if not op.is_hermitian():
        raise ValueError("expectation of a non-Hermitian sum is not real")
    dim = state.shape[-1]
    if dim != 1 << op.n_qubits:
        raise ValueError("state dimension does not match operator")
    j = np.arange(dim, dtype=np.int64)
    conj = np.conj(state) if np.iscomplexobj(state) else state
    total = 0.0 + 0.0j
    for (x, z), coeff in op._terms.items():
        signs = 1.0 - 2.0 * (np.bitwise_count(j & z) & 1)
        total += coeff * (1j ** ((x & z).bit_count() & 3)) * np.dot(conj[j ^ x] * signs, state)
    return float(total.real)


def apply_diagonal_operator(state: np.ndarray, op: PauliSum) -> np.ndarray:
    """Apply a purely diagonal PauliSum (I/Z strings only) elementwise."""
    if not op.is_diagonal():
        raise ValueError("operator has off-diagonal terms")
    dim = state.shape[-1]
    if dim != 1 << op.n_qubits:
        raise ValueError("state dimension does not match operator")
    j = np.arange(dim, dtype=np.int64)
    diag = np.zeros(dim, dtype=np.complex128)
    for (_, z), coeff in op._terms.items():
        diag += coeff * (1.0 - 2.0 * (np.bitwise_count(j & z) & 1))
    if not np.iscomplexobj(state) and np.max(np.abs(diag.imag)) < 1e-14:
        return diag.real * state
    return diag * state


class ExpectationKernel:
    """Cached expectation evaluator for one PauliSum on many states.

    Terms are grouped by x-mask; per group the z-dependence collapses into a
    fixed weight vector, so an evaluation is one gather and one contraction
    per group.  For real states of a Hermitian sum only the real part of the
    weights contributes (each Pauli string has a real expectation), which
    keeps the whole evaluation in float64.
    """

    def __init__(self, op: PauliSum):
        if not op.is_hermitian():
            raise ValueError("kernel requires a Hermitian sum")
        self.n_qubits = op.n_qubits
        dim = 1 << op.n_qubits
        j = np.arange(dim, dtype=np.int64)
        by_x: dict[int, np.ndarray] = {}
        for (x, z), coeff in op._terms.items():
            w = by_x.setdefault(x, np.zeros(dim, dtype=np.complex128))
            signs = 1.0 - 2.0 * (np.bitwise_count(j & z) & 1)
            w += coeff * (1j ** ((x & z).bit_count() & 3)) * signs
        xs = sorted(by_x)
        self._xidx = np.empty((len(xs), dim), dtype=np.int64)
        self._weights = np.empty((len(xs), dim), dtype=np.complex128)
        for g, x in enumerate(xs):
            self._xidx[g] = j ^ x
            self._weights[g] = by_x[x]
        self._weights_real = np.ascontiguousarray(self._weights.real)

    def __call__(self, state: np.ndarray) -> float:
        if np.iscomplexobj(state):
            gathered = np.conj(state)[self._xidx]
            return float(np.einsum("gd,d,gd->", gathered, state, self._weights).real)
        gathered = state[self._xidx]
        return float(np.einsum("gd,d,gd->", gathered, state, self._weights_real))

    def batch(self, states: np.ndarray) -> np.ndarray:
        """Expectations for a (B, 2^N) block of real states."""
        if np.iscomplexobj(states):
            raise ValueError("batch path is for real states")
        out = np.zeros(states.shape[0], dtype=np.float64)
        for g in range(self._xidx.shape[0]):
            out += np.einsum("bd,bd,d->b", states[:, self._xidx[g]], states,
                             self._weights_real[g])
        return out
