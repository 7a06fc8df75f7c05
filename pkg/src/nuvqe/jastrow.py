"""Linear Jastrow-style correlator and the ratio-of-expectations energy.

The correlator is the diagonal operator

    J = I - sum_i a_i Z_i - sum_{i<j} b_ij Z_i Z_j,

applied to an ansatz state |psi>.  Because J is not unitary the energy is a
ratio of two expectation values on the *same* prepared state,

    E = <psi| J H J |psi> / <psi| J J |psi>,

which a sampling backend measures term by term after expanding both products
into Pauli sums (`transform`), and an exact backend evaluates directly from
the statevector using J's diagonal (`ExactNuEnergy`).  Both routes are
algebraically identical; tests pin them against each other and against dense
linear algebra.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np

from .pauli import PauliString, PauliSum, sum_mul
from .circuits import AnsatzSpec, ExpectationKernel, prepare_state, prepare_states

__all__ = [
    "JastrowParams",
    "DenominatorUnstable",
    "NuEnergyResult",
    "build_linear_jastrow",
    "pair_index",
    "transform",
    "linear_jastrow_diagonal",
    "ExactNuEnergy",
    "nu_energy",
]

#: Exact-arithmetic floor under which <psi|JJ|psi> is treated as a collapse
#: of the correlated state rather than a usable normalization.
DENOMINATOR_FLOOR = 1e-6

#: Sampled route: the denominator estimate must exceed this many standard
#: errors to be considered resolved away from zero.
DENOMINATOR_SIGMA = 5.0


def pair_index(i: int, j: int, n: int) -> int:
    """Position of the (i, j) pair coefficient, i < j, in packed order."""
    if not 0 <= i < j < n:
        raise ValueError(f"need 0 <= i < j < {n}, got ({i}, {j})")
    return i * n - i * (i + 1) // 2 + (j - i - 1)


@dataclass
class JastrowParams:
    """Coefficients of the linear correlator on `n_qubits` qubits.

    `alpha[i]` multiplies Z_i and `pair[k]` multiplies Z_i Z_j with k =
    `pair_index(i, j, n)` (strict upper triangle, row-major).
    """

    n_qubits: int
    alpha: np.ndarray = field(default=None)  # type: ignore[assignment]
    pair: np.ndarray = field(default=None)   # type: ignore[assignment]

    def __post_init__(self):
        n = self.n_qubits
        if n < 1:
            raise ValueError("need at least one qubit")
        self.alpha = (np.zeros(n) if self.alpha is None
                      else np.asarray(self.alpha, dtype=float).copy())
        self.pair = (np.zeros(n * (n - 1) // 2) if self.pair is None
                     else np.asarray(self.pair, dtype=float).copy())
        if self.alpha.shape != (n,):
            raise ValueError(f"alpha must have shape ({n},)")
        if self.pair.shape != (n * (n - 1) // 2,):
            raise ValueError(f"pair must have shape ({n * (n - 1) // 2},)")

    @property
    def n_parameters(self) -> int:
        return self.alpha.size + self.pair.size

    def pair_matrix(self) -> np.ndarray:
        """Pair coefficients unpacked into a symmetric (n, n) matrix."""
        n = self.n_qubits
        mat = np.zeros((n, n))
        for i in range(n):
            for j in range(i + 1, n):
                mat[i, j] = mat[j, i] = self.pair[pair_index(i, j, n)]
        return mat

    def as_vector(self) -> np.ndarray:
        return np.concatenate([self.alpha, self.pair])

    @classmethod
    def from_vector(cls, n_qubits: int, vec: np.ndarray) -> "JastrowParams":
        vec = np.asarray(vec, dtype=float)
        n_pair = n_qubits * (n_qubits - 1) // 2
        if vec.shape != (n_qubits + n_pair,):
            raise ValueError(f"expected {n_qubits + n_pair} entries")
        return cls(n_qubits, vec[:n_qubits], vec[n_qubits:])

    @classmethod
    def zero(cls, n_qubits: int) -> "JastrowParams":
        return cls(n_qubits)


class DenominatorUnstable(RuntimeError):
    """The correlated norm <psi|JJ|psi> is too small (or too noisy) to divide by."""

    def __init__(self, denominator: float, threshold: float, detail: str = ""):
        self.denominator = denominator
        self.threshold = threshold
        msg = (f"correlated norm {denominator:.3e} is below the usable "
               f"threshold {threshold:.3e}")
        if detail:
            msg += f" ({detail})"
        super().__init__(msg)


def build_linear_jastrow(params: JastrowParams) -> PauliSum:
    """The correlator as an explicit Pauli sum: I - sum a Z - sum b ZZ."""
    n = params.n_qubits
    out = PauliSum(n)
    out.add_string(PauliString.identity(n), 1.0)
    for i in range(n):
        out.add_string(PauliString(n, 0, 1 << i), -params.alpha[i])
    for i in range(n):
        for j in range(i + 1, n):
            out.add_string(PauliString(n, 0, (1 << i) | (1 << j)),
                           -params.pair[pair_index(i, j, n)])
    return out


def transform(hamiltonian: PauliSum, correlator: PauliSum
              ) -> tuple[PauliSum, PauliSum]:
    """Expand the measurable numerator J H J and denominator J J.

    ``correlator`` must be diagonal (Z/I letters only) and Hermitian.  Both
    outputs come back simplified with real coefficients; the denominator is
    purely diagonal.  This is the symbolic route a sampling backend needs --
    the exact backend short-circuits it via the correlator diagonal.
    """
    if hamiltonian.n_qubits != correlator.n_qubits:
        raise ValueError("qubit counts differ")
    if not correlator.is_diagonal():
        raise ValueError("correlator must be diagonal")
    if not correlator.is_hermitian():
        raise ValueError("correlator must be Hermitian")
    numerator = sum_mul(sum_mul(correlator, hamiltonian), correlator)
    denominator = sum_mul(correlator, correlator)
    return numerator, denominator


def _correlator_masks(n_qubits: int) -> list[int]:
    """Z-masks of the linear correlator's terms, in coefficient order.

    Position 0 is the identity, then single-Z terms, then the strict
    upper-triangle pairs in the same order as ``JastrowParams.pair``.
    """
    masks = [0]
    masks.extend(1 << i for i in range(n_qubits))
    for i in range(n_qubits):
        for j in range(i + 1, n_qubits):
            masks.append((1 << i) | (1 << j))
    return masks


def correlator_coefficients(params: JastrowParams) -> np.ndarray:
    """Coefficient vector of the correlator in `_correlator_masks` order."""
    return np.concatenate(([1.0], -params.alpha, -params.pair))


class TransformTemplate:
    """Precomputed index maps for fast re-expansion of J H J and J J.

    The Pauli keys appearing in the transformed operators depend only on
    the Hamiltonian's terms and the correlator's Z-masks, never on its
    coefficients; each output coefficient is bilinear in the correlator
    coefficient vector.  Building the maps costs one symbolic pass; after
    that, `expand` refills coefficients with a handful of vectorized
    gathers, which keeps repeated evaluations (an optimizer loop) cheap.
    Results match `transform` up to ordering of floating-point additions.
    """

    def __init__(self, hamiltonian: PauliSum):
        if not hamiltonian.is_hermitian():
            raise ValueError("hamiltonian must be Hermitian")
        n = hamiltonian.n_qubits
        self.n_qubits = n
        masks = _correlator_masks(n)
        self._n_corr = len(masks)

        units = []
        for m in masks:
            u = PauliSum(n)
            u.add_string(PauliString(n, 0, m), 1.0)
            units.append(u)

        # numerator: collect (a, b, fold) per output key, where fold carries
        # the Hamiltonian coefficient and any product phases
        entries: dict[tuple[int, int], list[tuple[int, int, complex]]] = {}
        for a, ua in enumerate(units):
            left = sum_mul(ua, hamiltonian)
            for b, ub in enumerate(units):
                prod = sum_mul(left, ub)
                for (x, z), c in prod._terms.items():
                    entries.setdefault((x, z), []).append((a, b, c))
        self._num_keys = sorted(entries, key=lambda k: (k[1], k[0]))
        pos = {k: i for i, k in enumerate(self._num_keys)}
        a_idx, b_idx, out_idx, folds = [], [], [], []
        for key, rows in entries.items():
            for a, b, c in rows:
                a_idx.append(a)
                b_idx.append(b)
                out_idx.append(pos[key])
                folds.append(c)
        self._num_a = np.array(a_idx, dtype=np.intp)
        self._num_b = np.array(b_idx, dtype=np.intp)
        self._num_out = np.array(out_idx, dtype=np.intp)
        self._num_fold = np.array(folds, dtype=np.complex128)

        # denominator: products of diagonal strings pick up no phase, so the
        # fold is always 1 and the key is the XOR of the two masks
        den_entries: dict[int, list[tuple[int, int]]] = {}
        for a, ma in enumerate(masks):
            for b, mb in enumerate(masks):
                den_entries.setdefault(ma ^ mb, []).append((a, b))
        self._den_keys = sorted(den_entries)
        dpos = {m: i for i, m in enumerate(self._den_keys)}
        da, db, dout = [], [], []
        for m, rows in den_entries.items():
            for a, b in rows:
                da.append(a)
                db.append(b)
                dout.append(dpos[m])
        self._den_a = np.array(da, dtype=np.intp)
        self._den_b = np.array(db, dtype=np.intp)
        self._den_out = np.array(dout, dtype=np.intp)

    def expand(self, params: JastrowParams) -> tuple[PauliSum, PauliSum]:
        """Numerator and denominator sums for one correlator setting."""
        if params.n_qubits != self.n_qubits:
            raise ValueError("qubit counts differ")
        w = correlator_coefficients(params)
        if w.shape != (self._n_corr,):
            raise ValueError("parameter count mismatch")

        nvals = np.zeros(len(self._num_keys), dtype=np.complex128)
        np.add.at(nvals, self._num_out,
                  self._num_fold * w[self._num_a] * w[self._num_b])
        num = PauliSum(self.n_qubits)
        num._terms = {k: complex(v) for k, v in zip(self._num_keys, nvals)}
        num.simplify()

        dvals = np.zeros(len(self._den_keys), dtype=np.float64)
        np.add.at(dvals, self._den_out, w[self._den_a] * w[self._den_b])
        den = PauliSum(self.n_qubits)
        den._terms = {(0, m): complex(v)
                      for m, v in zip(self._den_keys, dvals)}
        den.simplify()
        return num, den


@lru_cache(maxsize=8)
def _z_sign_matrix(n_qubits: int) -> np.ndarray:
    """(n, 2^n) matrix of Z_i eigenvalues (+1 for bit clear, -1 for bit set)."""
    if n_qubits > 20:
        raise ValueError("sign matrix limited to 20 qubits")
    idx = np.arange(1 << n_qubits, dtype=np.int64)
    bits = (idx[None, :] >> np.arange(n_qubits, dtype=np.int64)[:, None]) & 1
    return 1.0 - 2.0 * bits.astype(np.float64)


@lru_cache(maxsize=8)
def _pair_sign_matrix(n_qubits: int) -> np.ndarray:
    """(n(n-1)/2, 2^n) matrix of Z_i Z_j eigenvalue products, packed order."""
    s = _z_sign_matrix(n_qubits)
    rows = [s[i] * s[j]
            for i in range(n_qubits) for j in range(i + 1, n_qubits)]
    if not rows:
        return np.zeros((0, 1 << n_qubits))
    return np.asarray(rows)


def linear_jastrow_diagonal(params: JastrowParams) -> np.ndarray:
    """Diagonal of the correlator in the computational basis, length 2^n."""
    s = _z_sign_matrix(params.n_qubits)
    p = _pair_sign_matrix(params.n_qubits)
    return 1.0 - params.alpha @ s - params.pair @ p


@dataclass(frozen=True)
class NuEnergyResult:
    """One energy evaluation, with enough context to audit the division."""

    energy: float
    numerator: float
    denominator: float
    hf_overlap: float
    numerator_stderr: float = 0.0
    denominator_stderr: float = 0.0
    energy_stderr: float = 0.0


class ExactNuEnergy:
    """Statevector evaluator for the correlated energy ratio.

    Builds the measurement kernel for H once, then evaluates E(theta, J) by
    forming phi = diag(J) * psi directly -- no Pauli expansion of J H J.
    `evaluate_many` is the batched flavor the finite-difference optimizer
    leans on; it returns NaN energies (instead of raising) for points whose
    denominator falls under the floor so a whole batch never dies on one
    bad sample point.
    """

    def __init__(self, ansatz: AnsatzSpec, hamiltonian: PauliSum,
                 denominator_floor: float = DENOMINATOR_FLOOR):
        if hamiltonian.n_qubits != ansatz.n_qubits:
            raise ValueError("ansatz and hamiltonian qubit counts differ")
        self.ansatz = ansatz
        self.hamiltonian = hamiltonian
        self.denominator_floor = denominator_floor
        self._kernel = ExpectationKernel(hamiltonian)
        self._smat = _z_sign_matrix(ansatz.n_qubits)
        self._pmat = _pair_sign_matrix(ansatz.n_qubits)

    # -- single point --------------------------------------------------------

    def evaluate(self, theta: np.ndarray, params: JastrowParams) -> NuEnergyResult:
        psi = prepare_state(self.ansatz, theta)
        phi = linear_jastrow_diagonal(params) * psi
        den = float(phi @ phi)
        if den < self.denominator_floor:
            raise DenominatorUnstable(den, self.denominator_floor)
        num = self._kernel(phi)
        overlap = float(phi[self.ansatz.reference] ** 2) / den
        return NuEnergyResult(energy=num / den, numerator=num, denominator=den,
                              hf_overlap=overlap)

    # -- batched -------------------------------------------------------------

    def evaluate_many(self, thetas: np.ndarray, jastrow_mat: np.ndarray
                      ) -> tuple[np.ndarray, np.ndarray]:
        """Energies and denominators for stacked (theta, jastrow) rows.

        thetas: (B, n_circuit_parameters); jastrow_mat: (B, n_jastrow)
        packed as alpha then pairs.  Rows with identical circuit parameters
        share one state preparation.  Unstable rows come back as NaN energy.
        """
        thetas = np.asarray(thetas, dtype=float)
        jastrow_mat = np.asarray(jastrow_mat, dtype=float)
        if thetas.shape[0] != jastrow_mat.shape[0]:
            raise ValueError("batch sizes differ")
        n = self.ansatz.n_qubits
        uniq, inverse = np.unique(thetas, axis=0, return_inverse=True)
        states = prepare_states(self.ansatz, uniq)[inverse]
        alphas = jastrow_mat[:, :n]
        pairs = jastrow_mat[:, n:]
        diag = 1.0 - alphas @ self._smat - pairs @ self._pmat
        phi = diag * states
        dens = np.einsum("bk,bk->b", phi, phi)
        energies = np.full(dens.shape, np.nan)
        ok = dens >= self.denominator_floor
        if np.any(ok):
            energies[ok] = self._kernel.batch(phi[ok]) / dens[ok]
        return energies, dens


def nu_energy(ansatz: AnsatzSpec, theta: np.ndarray, params: JastrowParams,
              hamiltonian: PauliSum, estimator=None) -> NuEnergyResult:
    """Convenience wrapper: exact ratio by default, sampled when an
    estimator (see `sampling.SamplingEstimator`) is supplied."""
    if estimator is not None:
        return estimator.nu_energy(ansatz, theta, params, hamiltonian)
    return ExactNuEnergy(ansatz, hamiltonian).evaluate(theta, params)
