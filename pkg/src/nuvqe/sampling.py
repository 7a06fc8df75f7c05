"""Shot-based estimation of Pauli expectations, with an optional fault model.

Each Hermitian term is measured on its own batch of shots: the circuit runs,
the term's support is rotated into the computational basis, every support
qubit is read out, and the shot contributes the parity (+1/-1) of the read
bits.  This module reproduces that process distribution-exactly without ever
looping over individual clean shots:

* noiseless: a shot's parity is a Bernoulli draw with mean <P>, so the whole
  batch collapses to one binomial draw.  A `NoiseModel` that is all zeros
  takes this exact code path, which makes "zero noise == no noise" an
  identity at the RNG level, not an approximation.

* noisy: each gate location independently suffers a depolarizing fault with
  the model's probability (uniform Pauli on the gate's qubits), including
  the basis-change gates, and readout flips each measured bit independently.
  Shots are grouped by their sampled fault configuration; per configuration
  the faulty state is propagated once and the readout flips are folded into
  a diagonal observable, so the parity outcomes are again exact Bernoulli
  draws.  No density matrices and no approximation beyond float arithmetic.

Estimates use per-term RNG streams seeded as (master, call, term-position),
so a report is reproducible from the estimator's seed alone regardless of
how many terms other calls measured.
"""

from __future__ import annotations

import configparser
import math
from dataclasses import dataclass
from functools import lru_cache
from importlib import resources

import numpy as np

from .pauli import PauliSum
from .circuits import AnsatzSpec, prepare_state, ry_matrix
from .jastrow import (DENOMINATOR_SIGMA, DenominatorUnstable, JastrowParams,
                      NuEnergyResult, TransformTemplate, build_linear_jastrow,
                      linear_jastrow_diagonal, transform)

__all__ = [
    "NoiseModel",
    "available_presets",
    "EstimatorReport",
    "SamplingEstimator",
    "std_error_scaling_probe",
]

_NOISY_QUBIT_LIMIT = 12

_SQRT_HALF = np.sqrt(0.5)
_H_GATE = np.array([[_SQRT_HALF, _SQRT_HALF],
                    [_SQRT_HALF, -_SQRT_HALF]], dtype=np.complex128)
# maps the Y eigenbasis onto the computational basis: V Y V^dag = Z
_Y_BASIS_GATE = np.array([[_SQRT_HALF, -1j * _SQRT_HALF],
                          [_SQRT_HALF, 1j * _SQRT_HALF]], dtype=np.complex128)


@dataclass(frozen=True)
class NoiseModel:
    """Depolarizing gate faults plus asymmetric readout flips."""

    p1: float = 0.0
    p2: float = 0.0
    readout_01: float = 0.0
    readout_10: float = 0.0

    def __post_init__(self):
        for name in ("p1", "p2", "readout_01", "readout_10"):
            v = getattr(self, name)
            if not 0.0 <= v <= 1.0:
                raise ValueError(f"{name}={v} is not a probability")

    @property
    def is_trivial(self) -> bool:
        return self.p1 == self.p2 == self.readout_01 == self.readout_10 == 0.0

    @classmethod
    def noiseless(cls) -> "NoiseModel":
        return cls()

    @classmethod
    def from_preset(cls, name: str) -> "NoiseModel":
        presets = _load_presets()
        if name not in presets:
            raise KeyError(f"unknown noise preset {name!r}; "
                           f"have {sorted(presets)}")
        return presets[name]


@lru_cache(maxsize=1)
def _load_presets() -> dict[str, NoiseModel]:
    parser = configparser.ConfigParser()
    text = (resources.files("nuvqe") / "data" / "noise_presets.cfg").read_text()
    parser.read_string(text)
    out = {}
    for section in parser.sections():
        s = parser[section]
        out[section] = NoiseModel(p1=s.getfloat("p1"), p2=s.getfloat("p2"),
                                  readout_01=s.getfloat("readout_01"),
                                  readout_10=s.getfloat("readout_10"))
    return out


def available_presets() -> list[str]:
    return sorted(_load_presets())


@dataclass(frozen=True)
class EstimatorReport:
    """Sampled value of one Pauli sum plus per-term diagnostics."""

    value: float
    stderr: float
    shots_per_term: int
    labels: tuple[str, ...]
    coefficients: np.ndarray
    term_estimates: np.ndarray
    term_stderrs: np.ndarray

    @property
    def n_terms_measured(self) -> int:
        return len(self.labels)


@lru_cache(maxsize=64)
def _arange_for(size: int) -> np.ndarray:
    return np.arange(size, dtype=np.int64)


@lru_cache(maxsize=2048)
def _z_signs(size: int, z: int) -> np.ndarray:
    j = _arange_for(size)
    return 1.0 - 2.0 * (np.bitwise_count(j & z) & 1).astype(np.float64)


@lru_cache(maxsize=512)
def _cnot_index_pairs(n_qubits: int, control: int, target: int
                      ) -> tuple[np.ndarray, np.ndarray]:
    j = _arange_for(1 << n_qubits)
    low = j[((j >> control) & 1 == 1) & ((j >> target) & 1 == 0)]
    return low, low | (1 << target)


def _term_mean_real(state: np.ndarray, x: int, z: int) -> float:
    """<state|P|state> for one Hermitian letter string on a real state."""
    j = _arange_for(state.size)
    signs = _z_signs(state.size, z)
    val = (1j ** ((x & z).bit_count() & 3)) * np.dot(state[j ^ x] * signs, state)
    return float(val.real)


def _apply_gate_1q(state: np.ndarray, n_qubits: int, q: int,
                   mat: np.ndarray) -> np.ndarray:
    work = state.reshape(state.size >> (q + 1), 2, 1 << q)
    a = work[:, 0, :].copy()
    b = work[:, 1, :]
    work[:, 0, :] = mat[0, 0] * a + mat[0, 1] * b
    work[:, 1, :] = mat[1, 0] * a + mat[1, 1] * b
    return state


def _apply_cnot_inplace(state: np.ndarray, control: int, target: int) -> np.ndarray:
    n_qubits = state.size.bit_length() - 1
    low, high = _cnot_index_pairs(n_qubits, control, target)
    state[low], state[high] = state[high], state[low].copy()
    return state


def _apply_pauli_inplace(state: np.ndarray, x: int, z: int) -> np.ndarray:
    """Multiply by the letter string with masks (x, z), phase i^{|x&z|}."""
    j = _arange_for(state.size)
    signs = _z_signs(state.size, z)
    phase = 1j ** ((x & z).bit_count() & 3)
    out = np.empty_like(state)
    out[j ^ x] = phase * signs * state
    state[:] = out
    return state


_LETTER_MASKS = {0: (0, 0), 1: (1, 0), 2: (1, 1), 3: (0, 1)}  # I X Y Z


def _two_qubit_pauli_masks(code: int, qa: int, qb: int) -> tuple[int, int]:
    """Masks for a nonzero pauli code 1..15 = 4*letter(qa) + letter(qb)."""
    la, lb = divmod(code, 4)
    xa, za = _LETTER_MASKS[la]
    xb, zb = _LETTER_MASKS[lb]
    return xa << qa | xb << qb, za << qa | zb << qb


def _gate_matrix(kind: str, angle) -> np.ndarray:
    if kind == "ry":
        return ry_matrix(angle).astype(np.complex128)
    if kind == "h":
        return _H_GATE
    if kind == "ybasis":
        return _Y_BASIS_GATE
    raise ValueError(f"unknown gate {kind!r}")


def _apply_gate_1q_rows(mat: np.ndarray, n_qubits: int, q: int,
                        gate: np.ndarray) -> np.ndarray:
    """Apply one single-qubit gate to every row of an (R, 2^n) matrix."""
    work = mat.reshape(mat.shape[0], -1, 2, 1 << q)
    a = work[:, :, 0, :].copy()
    b = work[:, :, 1, :]
    work[:, :, 0, :] = gate[0, 0] * a + gate[0, 1] * b
    work[:, :, 1, :] = gate[1, 0] * a + gate[1, 1] * b
    return mat


def _cnot_permutation(n_qubits: int, control: int, target: int) -> np.ndarray:
    j = np.arange(1 << n_qubits, dtype=np.int64)
    return j ^ (((j >> control) & 1) << target)


def _binom_pmf_vector(n_trials: int, p: float) -> np.ndarray:
    """Binomial(n, p) pmf over k = 0..n, exact combinatorics in float."""
    k = np.arange(n_trials + 1)
    combs = np.array([math.comb(n_trials, int(i)) for i in k], dtype=float)
    return combs * np.power(p, k) * np.power(1.0 - p, n_trials - k)


def _uniform_subset(rng: np.random.Generator, n: int, k: int) -> list[int]:
    """Uniform k-subset of range(n) by Floyd's algorithm (k scalar draws)."""
    out: list[int] = []
    for j in range(n - k, n):
        t = int(rng.integers(0, j + 1))
        out.append(j if t in out else t)
    return out


class _PatternData:
    """Per measurement pattern: fault-row probabilities through basis gates.

    A pattern is the pair (x_mask, y_mask) fixing which qubits get an H or
    a Y-basis rotation before readout.  Rows are ordered: every elementary
    ansatz fault in birth order, then the clean circuit, then one row per
    basis-gate fault (location-major, pauli-minor).
    """

    __slots__ = ("probs", "basis_gates", "r")

    def __init__(self, ctx: "_ThetaContext", x_mask: int, y_mask: int):
        n = ctx.n_qubits
        basis_gates = []
        for q in range(n):
            if (x_mask >> q) & 1:
                basis_gates.append(
                    (q, _Y_BASIS_GATE if (y_mask >> q) & 1 else _H_GATE))
        self.basis_gates = basis_gates
        self.r = len(basis_gates)

        r0 = ctx.fault_rows.shape[0]
        dim = 1 << n
        mat = np.empty((r0 + 1 + 3 * self.r, dim), dtype=np.complex128)
        mat[:r0] = ctx.fault_rows
        mat[r0] = ctx.clean
        filled = r0 + 1
        for q, gate in basis_gates:
            _apply_gate_1q_rows(mat[:filled], n, q, gate)
            snap = mat[r0]
            for code in (1, 2, 3):
                x, z = _LETTER_MASKS[code]
                row = snap.copy()
                _apply_pauli_inplace(row, x << q, z << q)
                mat[filled] = row
                filled += 1
        self.probs = np.abs(mat) ** 2


class _ThetaContext:
    """Shared fault-model precomputation for one (ansatz, theta) pair.

    Holds prefix snapshots of the ansatz, one suffix-propagated end state
    per elementary fault (each location x each nonidentity pauli), and
    caches keyed by measurement pattern, readout support, and multi-fault
    configuration, so per-term work shrinks to diagonal reweighting plus
    counter draws.
    """

    def __init__(self, ansatz: AnsatzSpec, theta: np.ndarray):
        n = ansatz.n_qubits
        self.n_qubits = n
        self.gates = ansatz.gate_sequence(np.asarray(theta, dtype=float))
        self.prefix = SamplingEstimator._prefix_states(self.gates, ansatz)
        self.clean = self.prefix[-1]
        self.loc1 = [i for i, g in enumerate(self.gates) if g[0] != "cnot"]
        self.loc2 = [i for i, g in enumerate(self.gates) if g[0] == "cnot"]

        dim = 1 << n
        total = 3 * len(self.loc1) + 15 * len(self.loc2)
        mat = np.empty((total, dim), dtype=np.complex128)
        births: list[tuple[int, int]] = []
        count = 0
        for g, (kind, qubits, angle) in enumerate(self.gates):
            if count:
                sub = mat[:count]
                if kind == "cnot":
                    sub[:, :] = sub[:, _cnot_permutation(n, qubits[0], qubits[1])]
                else:
                    _apply_gate_1q_rows(sub, n, qubits[0],
                                        _gate_matrix(kind, angle))
            base = self.prefix[g + 1]
            codes = range(1, 16) if kind == "cnot" else (1, 2, 3)
            for code in codes:
                row = base.copy()
                if kind == "cnot":
                    x, z = _two_qubit_pauli_masks(code, qubits[0], qubits[1])
                else:
                    x, z = _LETTER_MASKS[code]
                    x, z = x << qubits[0], z << qubits[0]
                _apply_pauli_inplace(row, x, z)
                mat[count] = row
                births.append((g, code))
                count += 1
        self.fault_rows = mat

        row_of = {b: i for i, b in enumerate(births)}
        self.rows_1q = np.array([row_of[(g, c)] for g in self.loc1
                                 for c in (1, 2, 3)], dtype=np.intp)
        self.rows_2q = np.array([row_of[(g, c)] for g in self.loc2
                                 for c in range(1, 16)], dtype=np.intp)
        # gate list predigested for fast replay: (matrix, qubit, None) for
        # single-qubit gates, (None, low, high) index pairs for CNOTs
        self.ops: list[tuple] = []
        for kind, qubits, angle in self.gates:
            if kind == "cnot":
                low, high = _cnot_index_pairs(n, qubits[0], qubits[1])
                self.ops.append((None, low, high))
            else:
                self.ops.append((_gate_matrix(kind, angle), qubits[0], None))
        self.pattern_cache: dict[tuple[int, int], _PatternData] = {}
        self.weight_cache: dict[int, np.ndarray] = {}
        self.config_cache: dict[tuple, np.ndarray] = {}

    def pattern(self, x_mask: int, y_mask: int) -> _PatternData:
        data = self.pattern_cache.get((x_mask, y_mask))
        if data is None:
            data = _PatternData(self, x_mask, y_mask)
            self.pattern_cache[(x_mask, y_mask)] = data
        return data

    def _apply_op(self, state: np.ndarray, op: tuple) -> None:
        mat, a, b = op
        if mat is None:
            state[a], state[b] = state[b], state[a].copy()
        else:
            _apply_gate_1q(state, self.n_qubits, a, mat)

    def propagate_faults(self, faults: tuple) -> np.ndarray:
        """End state with paulis injected after given gates; resumes from
        the snapshot just past the first fault location."""
        first = faults[0][0]
        state = self.prefix[first + 1].copy()
        resume = first + 1
        for loc, code in faults:
            for g in range(resume, loc + 1):
                self._apply_op(state, self.ops[g])
            resume = loc + 1
            kind, qubits, _ = self.gates[loc]
            if kind == "cnot":
                x, z = _two_qubit_pauli_masks(code, qubits[0], qubits[1])
            else:
                x, z = _LETTER_MASKS[code]
                x, z = x << qubits[0], z << qubits[0]
            _apply_pauli_inplace(state, x, z)
        for g in range(resume, len(self.ops)):
            self._apply_op(state, self.ops[g])
        return state

    def multi_state(self, faults: tuple) -> np.ndarray:
        """End-of-ansatz state for a sorted ansatz fault configuration."""
        if not faults:
            return self.clean
        state = self.config_cache.get(faults)
        if state is None:
            state = self.propagate_faults(faults)
            self.config_cache[faults] = state
        return state


def _replay_basis_with_faults(state: np.ndarray, data: _PatternData,
                              basis_faults: list[tuple[int, int]],
                              n_qubits: int) -> np.ndarray:
    """Basis-change section with pauli faults injected after given gates."""
    out = state.copy()
    fi = 0
    for t, (q, gate) in enumerate(data.basis_gates):
        _apply_gate_1q(out, n_qubits, q, gate)
        while fi < len(basis_faults) and basis_faults[fi][0] == t:
            x, z = _LETTER_MASKS[basis_faults[fi][1]]
            _apply_pauli_inplace(out, x << q, z << q)
            fi += 1
    return out


class SamplingEstimator:
    """Measures Hermitian Pauli sums with a fixed shot budget per term.

    Stateful only through a call counter that keeps RNG streams of distinct
    calls separate; `reset_streams()` rewinds it so a measurement sequence
    can be replayed bit-for-bit.
    """

    def __init__(self, shots: int = 8192, noise: NoiseModel | None = None,
                 seed: int = 0):
        if shots < 2:
            raise ValueError("need at least two shots for an error bar")
        self.shots = int(shots)
        self.noise = NoiseModel.noiseless() if noise is None else noise
        self.seed = int(seed)
        self._call = 0
        self._contexts: dict[tuple, _ThetaContext] = {}

    def reset_streams(self) -> None:
        self._call = 0

    # -- public API -----------------------------------------------------------

    def expectation(self, op: PauliSum, ansatz: AnsatzSpec,
                    theta: np.ndarray) -> EstimatorReport:
        """Measure every non-identity term of `op` on the prepared state."""
        if op.n_qubits != ansatz.n_qubits:
            raise ValueError("operator and ansatz qubit counts differ")
        if not op.is_hermitian():
            raise ValueError("can only sample Hermitian sums")
        call_index = self._call
        self._call += 1

        noisy = not self.noise.is_trivial
        if noisy and ansatz.n_qubits > _NOISY_QUBIT_LIMIT:
            raise ValueError("fault-model sampling limited to "
                             f"{_NOISY_QUBIT_LIMIT} qubits")
        psi = None if noisy else prepare_state(ansatz, theta)
        ctx = self._theta_context(ansatz, theta) if noisy else None

        value = 0.0
        var = 0.0
        labels, coeffs, ests, errs = [], [], [], []
        for position, (string, coeff) in enumerate(op.terms()):
            c = coeff.real
            if string.is_identity():
                value += c
                continue
            rng = np.random.default_rng([self.seed, call_index, position])
            if noisy:
                est, err = self._measure_term_noisy(
                    rng, ctx, string.x_mask, string.z_mask)
            else:
                mean = _term_mean_real(psi, string.x_mask, string.z_mask)
                est, err = self._binomial_outcome(rng, mean, self.shots)
            value += c * est
            var += (c * err) ** 2
            labels.append(string.label())
            coeffs.append(c)
            ests.append(est)
            errs.append(err)
        return EstimatorReport(value=value, stderr=float(np.sqrt(var)),
                               shots_per_term=self.shots,
                               labels=tuple(labels),
                               coefficients=np.asarray(coeffs),
                               term_estimates=np.asarray(ests),
                               term_stderrs=np.asarray(errs))

    def nu_energy(self, ansatz: AnsatzSpec, theta: np.ndarray,
                  params: JastrowParams, hamiltonian: PauliSum,
                  template: TransformTemplate | None = None) -> NuEnergyResult:
        """Sampled correlated-energy ratio via the expanded Pauli sums.

        The division is refused unless the denominator estimate clears zero
        by `DENOMINATOR_SIGMA` standard errors.  The reported hf_overlap is a
        simulator-side diagnostic computed from the exact statevector; it is
        not a sampled quantity.  Passing a prebuilt `template` for the same
        Hamiltonian skips the symbolic product on every call.
        """
        if template is None:
            numerator_sum, denominator_sum = transform(
                hamiltonian, build_linear_jastrow(params))
        else:
            if template.n_qubits != hamiltonian.n_qubits:
                raise ValueError("template qubit count mismatch")
            numerator_sum, denominator_sum = template.expand(params)
        num = self.expectation(numerator_sum, ansatz, theta)
        den = self.expectation(denominator_sum, ansatz, theta)
        threshold = DENOMINATOR_SIGMA * den.stderr
        if den.value <= threshold:
            raise DenominatorUnstable(den.value, threshold, detail="sampled")
        energy = num.value / den.value
        energy_err = np.hypot(num.stderr, energy * den.stderr) / abs(den.value)
        phi = linear_jastrow_diagonal(params) * prepare_state(ansatz, theta)
        norm = float(phi @ phi)
        overlap = float(phi[ansatz.reference] ** 2) / norm if norm > 0 else np.nan
        return NuEnergyResult(energy=energy, numerator=num.value,
                              denominator=den.value, hf_overlap=overlap,
                              numerator_stderr=num.stderr,
                              denominator_stderr=den.stderr,
                              energy_stderr=float(energy_err))

    # -- internals -------------------------------------------------------------

    @staticmethod
    def _binomial_outcome(rng: np.random.Generator, mean: float,
                          shots: int) -> tuple[float, float]:
        """Sum of `shots` iid +-1 outcomes with the given mean, as one draw."""
        p = min(1.0, max(0.0, 0.5 * (1.0 + mean)))
        plus = int(rng.binomial(shots, p))
        est = (2 * plus - shots) / shots
        spread = max(0.0, 1.0 - est * est)
        return est, float(np.sqrt(spread / (shots - 1)))

    @staticmethod
    def _prefix_states(gates, ansatz: AnsatzSpec) -> list[np.ndarray]:
        """State snapshots after 0, 1, ..., len(gates) gates of the ansatz."""
        n_qubits = ansatz.n_qubits
        state = np.zeros(1 << n_qubits, dtype=np.complex128)
        state[ansatz.reference] = 1.0
        out = [state.copy()]
        for kind, qubits, angle in gates:
            if kind == "ry":
                _apply_gate_1q(state, n_qubits, qubits[0],
                               ry_matrix(angle).astype(np.complex128))
            elif kind == "cnot":
                _apply_cnot_inplace(state, qubits[0], qubits[1])
            else:  # pragma: no cover - ansatz emits only ry/cnot
                raise ValueError(f"unknown gate {kind!r}")
            out.append(state.copy())
        return out

    def _readout_weights(self, support: int, n_qubits: int) -> np.ndarray:
        """Diagonal observable: Z-parity over `support` with readout folded in.

        A flip-prone readout turns each measured Z into
        diag(1 - 2*readout_01, -(1 - 2*readout_10)).
        """
        j = np.arange(1 << n_qubits, dtype=np.int64)
        w = np.ones(1 << n_qubits)
        up = 1.0 - 2.0 * self.noise.readout_01
        down = -(1.0 - 2.0 * self.noise.readout_10)
        for q in range(n_qubits):
            if (support >> q) & 1:
                bit = (j >> q) & 1
                w *= np.where(bit == 0, up, down)
        return w

    def _theta_context(self, ansatz: AnsatzSpec, theta: np.ndarray
                       ) -> _ThetaContext:
        """Fault-model precomputation, cached across expectation calls."""
        theta = np.asarray(theta, dtype=float)
        key = (ansatz.n_qubits, ansatz.n_blocks, ansatz.reference,
               theta.tobytes())
        ctx = self._contexts.get(key)
        if ctx is None:
            ctx = _ThetaContext(ansatz, theta)
            if len(self._contexts) >= 4:
                self._contexts.pop(next(iter(self._contexts)))
            self._contexts[key] = ctx
        return ctx

    def _measure_term_noisy(self, rng, ctx: _ThetaContext,
                            x_mask: int, z_mask: int) -> tuple[float, float]:
        """One term's shot batch under the gate/readout fault model.

        The shots are split exactly, never per shot for the common cases:
        first one multinomial draw over (k1, k2) fault-count cells with the
        exact joint binomial pmf; the (0,0) cell is a clean binomial, the
        (1,0) and (0,1) cells are uniform multinomials over precomputed
        single-fault configurations followed by vectorized binomials; only
        cells with two or more faults (a per-mil fraction at realistic
        rates) sample explicit configurations.  Within such a cell the
        draws are batched in a fixed order: one-qubit fault locations (a
        single vector draw when the cell has one such fault, otherwise a
        Floyd k-subset per shot), one-qubit pauli codes, two-qubit
        locations and codes likewise, then one uniform vector for the
        Bernoulli outcomes.  The RNG draw order is fixed by this sequence,
        making every estimate reproducible from (seed, call, position)
        alone.
        """
        n = ctx.n_qubits
        shots = self.shots
        support = x_mask | z_mask
        data = ctx.pattern(x_mask, x_mask & z_mask)
        w = ctx.weight_cache.get(support)
        if w is None:
            w = self._readout_weights(support, n)
            ctx.weight_cache[support] = w
        means = data.probs @ w
        r0 = ctx.fault_rows.shape[0]
        n_loc1 = len(ctx.loc1)
        L1 = n_loc1 + data.r
        L2 = len(ctx.loc2)

        pv = np.outer(_binom_pmf_vector(L1, self.noise.p1),
                      _binom_pmf_vector(L2, self.noise.p2)).ravel()
        pv /= pv.sum()
        counts = rng.multinomial(shots, pv).reshape(L1 + 1, L2 + 1)

        plus = 0
        if counts[0, 0]:
            p = min(1.0, max(0.0, 0.5 * (1.0 + float(means[r0]))))
            plus += int(rng.binomial(int(counts[0, 0]), p))
        if L1 and counts[1, 0]:
            cfg_means = np.concatenate([means[ctx.rows_1q], means[r0 + 1:]])
            cfg_counts = rng.multinomial(int(counts[1, 0]),
                                         np.full(3 * L1, 1.0 / (3 * L1)))
            ps = np.clip(0.5 * (1.0 + cfg_means), 0.0, 1.0)
            plus += int(rng.binomial(cfg_counts, ps).sum())
        if L2 and counts[0, 1]:
            cfg_counts = rng.multinomial(int(counts[0, 1]),
                                         np.full(15 * L2, 1.0 / (15 * L2)))
            ps = np.clip(0.5 * (1.0 + means[ctx.rows_2q]), 0.0, 1.0)
            plus += int(rng.binomial(cfg_counts, ps).sum())

        for k1 in range(L1 + 1):
            for k2 in range(L2 + 1):
                if k1 + k2 < 2 or not counts[k1, k2]:
                    continue
                cnt = int(counts[k1, k2])
                if k1 == 1:
                    locs1 = rng.integers(0, L1, size=(cnt, 1))
                elif k1:
                    locs1 = [_uniform_subset(rng, L1, k1) for _ in range(cnt)]
                codes1 = rng.integers(1, 4, size=(cnt, k1)) if k1 else None
                if k2 == 1:
                    locs2 = rng.integers(0, L2, size=(cnt, 1))
                elif k2:
                    locs2 = [_uniform_subset(rng, L2, k2) for _ in range(cnt)]
                codes2 = rng.integers(1, 16, size=(cnt, k2)) if k2 else None
                states = np.empty((cnt, 1 << n), dtype=np.complex128)
                plain = []
                for s in range(cnt):
                    ansatz_faults = []
                    basis_faults = []
                    if k1:
                        for loc, code in zip(locs1[s], codes1[s]):
                            loc, code = int(loc), int(code)
                            if loc < n_loc1:
                                ansatz_faults.append((ctx.loc1[loc], code))
                            else:
                                basis_faults.append((loc - n_loc1, code))
                    if k2:
                        ansatz_faults.extend(
                            (ctx.loc2[int(l)], int(c))
                            for l, c in zip(locs2[s], codes2[s]))
                    end = ctx.multi_state(tuple(sorted(ansatz_faults)))
                    if basis_faults:
                        states[s] = _replay_basis_with_faults(
                            end, data, sorted(basis_faults), n)
                    else:
                        states[s] = end
                        plain.append(s)
                if plain:
                    sub = states[plain]
                    for q, gate in data.basis_gates:
                        _apply_gate_1q_rows(sub, n, q, gate)
                    states[plain] = sub
                ps = np.clip(0.5 * (1.0 + (np.abs(states) ** 2) @ w), 0.0, 1.0)
                plus += int((rng.random(cnt) < ps).sum())

        est = (2 * plus - shots) / shots
        spread = max(0.0, 1.0 - est * est)
        return est, float(np.sqrt(spread / (shots - 1)))


def std_error_scaling_probe(ansatz: AnsatzSpec, theta: np.ndarray,
                            op: PauliSum, shots_list: list[int],
                            n_seeds: int, noise: NoiseModel | None = None,
                            base_seed: int = 0) -> np.ndarray:
    """Estimates of <op> over independent seeds at several shot budgets.

    Returns an (n_seeds, len(shots_list)) array; column spreads give the
    empirical standard error at each budget.  Seeds are spawned from one
    SeedSequence so every cell is statistically independent.
    """
    children = np.random.SeedSequence(base_seed).spawn(n_seeds * len(shots_list))
    out = np.empty((n_seeds, len(shots_list)))
    k = 0
    for i in range(n_seeds):
        for j, shots in enumerate(shots_list):
            master = int(children[k].generate_state(1, dtype=np.uint64)[0])
            k += 1
            est = SamplingEstimator(shots=shots, noise=noise, seed=master)
            out[i, j] = est.expectation(op, ansatz, theta).value
    return out
