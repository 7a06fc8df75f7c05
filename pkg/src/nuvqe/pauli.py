"""Pauli-string algebra on integer bitmasks.

An N-qubit Pauli string is stored in symplectic form: two integer masks
``x_mask`` and ``z_mask`` (bit q set means X / Z acts on qubit q) plus a
power of ``i``.  Internally every string is kept in the canonical ordered
form ``i**phase_power * X^x * Z^z`` (X before Z on every qubit), which turns
multiplication into two XORs and one popcount.

Conventions used across the package:

* qubit 0 is the *leftmost* character of a text label ("XI" = X on qubit 0),
* qubit 0 is the *least significant bit* of a statevector index,
* a sum of strings (:class:`PauliSum`) folds phases into coefficients at
  insertion, so stored strings always carry phase +1.
"""

from __future__ import annotations

from typing import Iterable, Iterator

import numpy as np

__all__ = [
    "PauliString",
    "PauliSum",
    "pauli_mul",
    "sum_mul",
    "to_dense_matrix",
    "DROP_TOLERANCE",
    "DENSE_QUBIT_LIMIT",
]

# Coefficients at or below this magnitude are removed at simplify points.
DROP_TOLERANCE = 1e-12

# Hard ceiling for dense 2^N x 2^N materialization.
DENSE_QUBIT_LIMIT = 12

_LETTERS = "IXZY"  # index = x + 2*z


def _letter_code(c: str) -> tuple[int, int]:
    try:
        i = "IXZY".index(c)
    except ValueError:
        raise ValueError(f"invalid Pauli letter {c!r}") from None
    return i & 1, i >> 1


class PauliString:
    """A single Pauli string with an attached phase in {1, i, -1, -i}."""

    __slots__ = ("n_qubits", "x_mask", "z_mask", "phase_power")

    def __init__(self, n_qubits: int, x_mask: int = 0, z_mask: int = 0,
                 phase_power: int = 0):
        if n_qubits < 1:
            raise ValueError("need at least one qubit")
        full = (1 << n_qubits) - 1
        if x_mask & ~full or z_mask & ~full:
            raise ValueError("mask exceeds qubit count")
        self.n_qubits = n_qubits
        self.x_mask = x_mask
        self.z_mask = z_mask
        # power of i multiplying the ordered form X^x Z^z
        self.phase_power = phase_power & 3

    @classmethod
    def from_label(cls, label: str, phase: complex = 1.0) -> "PauliString":
        """Build from a text label; qubit 0 is the leftmost character."""
        x = z = 0
        for q, c in enumerate(label):
            xb, zb = _letter_code(c)
            x |= xb << q
            z |= zb << q
        power = _phase_to_power(phase) + (x & z).bit_count()
        return cls(len(label), x, z, power)

    @classmethod
    def identity(cls, n_qubits: int) -> "PauliString":
        return cls(n_qubits)

    @property
    def phase(self) -> complex:
        """Phase relative to the plain tensor of letters, in {1, i, -1, -i}."""
        return 1j ** ((self.phase_power - (self.x_mask & self.z_mask).bit_count()) & 3)

    def label(self) -> str:
        x, z = self.x_mask, self.z_mask
        return "".join(_LETTERS[((x >> q) & 1) + 2 * ((z >> q) & 1)]
                       for q in range(self.n_qubits))

    def weight(self) -> int:
        """Number of qubits acted on non-trivially."""
        return (self.x_mask | self.z_mask).bit_count()

    def is_identity(self) -> bool:
        return self.x_mask == 0 and self.z_mask == 0

    def is_diagonal(self) -> bool:
        return self.x_mask == 0

    def is_hermitian(self) -> bool:
        # (i^q X^x Z^z)^dag = i^{-q} (-1)^{|x&z|} X^x Z^z
        return ((2 * self.phase_power + 2 * (self.x_mask & self.z_mask).bit_count()) & 3) == 0

    def commutes_with(self, other: "PauliString") -> bool:
        a = (self.x_mask & other.z_mask).bit_count()
        b = (self.z_mask & other.x_mask).bit_count()
        return ((a + b) & 1) == 0

    def __mul__(self, other: "PauliString") -> "PauliString":
        if self.n_qubits != other.n_qubits:
            raise ValueError("qubit counts differ")
        # Commuting Z^z1 past X^x2 costs (-1)^{|z1 & x2|}.
        power = (self.phase_power + other.phase_power
                 + 2 * (self.z_mask & other.x_mask).bit_count())
        return PauliString(self.n_qubits, self.x_mask ^ other.x_mask,
                           self.z_mask ^ other.z_mask, power)

    def __eq__(self, other: object) -> bool:
        return (isinstance(other, PauliString)
                and self.n_qubits == other.n_qubits
                and self.x_mask == other.x_mask
                and self.z_mask == other.z_mask
                and self.phase_power == other.phase_power)

    def __hash__(self) -> int:
        return hash((self.n_qubits, self.x_mask, self.z_mask, self.phase_power))

    def __repr__(self) -> str:
        p = {0: "", 1: "1j*", 2: "-", 3: "-1j*"}[_phase_to_power(self.phase)]
        return f"PauliString({p}{self.label()})"


def _phase_to_power(phase: complex) -> int:
    for k in range(4):
        if abs(phase - 1j ** k) < 1e-9:
            return k
    raise ValueError(f"phase {phase!r} is not a power of i")


def pauli_mul(a: PauliString, b: PauliString) -> PauliString:
    """Product of two strings; the result carries the accumulated phase."""
    return a * b


class PauliSum:
    """Linear combination of Pauli strings with complex coefficients.

    Terms are held in a dict keyed by (x_mask, z_mask); the stored operator
    for a key is the plain letter tensor (phase +1), so any phase carried by
    an inserted string is folded into its coefficient.  Term order, wherever
    terms are exposed, is lexicographic on (z_mask, x_mask) — diagonal terms
    first — which makes serialization and per-term seeding deterministic.
    """

    __slots__ = ("n_qubits", "_terms")

    def __init__(self, n_qubits: int):
        if n_qubits < 1:
            raise ValueError("need at least one qubit")
        self.n_qubits = n_qubits
        self._terms: dict[tuple[int, int], complex] = {}

    # -- construction ------------------------------------------------------

    @classmethod
    def from_terms(cls, n_qubits: int,
                   terms: Iterable[tuple[PauliString, complex]]) -> "PauliSum":
        s = cls(n_qubits)
        for string, coeff in terms:
            s.add_string(string, coeff)
        return s

    @classmethod
    def from_label_dict(cls, labels: dict[str, complex]) -> "PauliSum":
        lengths = {len(k) for k in labels}
        if len(lengths) != 1:
            raise ValueError("labels must share one length")
        n = lengths.pop()
        s = cls(n)
        for lab, coeff in labels.items():
            s.add_string(PauliString.from_label(lab), coeff)
        return s

    def add_string(self, string: PauliString, coeff: complex = 1.0) -> None:
        if string.n_qubits != self.n_qubits:
            raise ValueError("qubit counts differ")
        key = (string.x_mask, string.z_mask)
        self._terms[key] = self._terms.get(key, 0.0) + coeff * string.phase

    def copy(self) -> "PauliSum":
        s = PauliSum(self.n_qubits)
        s._terms = dict(self._terms)
        return s

    # -- inspection --------------------------------------------------------

    def __len__(self) -> int:
        return len(self._terms)

    def terms(self) -> Iterator[tuple[PauliString, complex]]:
        """Yield (string, coeff) pairs in canonical order, phases +1."""
        for x, z in sorted(self._terms, key=lambda k: (k[1], k[0])):
            yield (PauliString(self.n_qubits, x, z, (x & z).bit_count()),
                   self._terms[(x, z)])

    def coefficient(self, label: str) -> complex:
        p = PauliString.from_label(label)
        if p.n_qubits != self.n_qubits:
            raise ValueError("label length mismatch")
        return self._terms.get((p.x_mask, p.z_mask), 0.0) * p.phase.conjugate()

    def mask_arrays(self) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
        """Canonically ordered (x_masks, z_masks, coeffs) as numpy arrays."""
        keys = sorted(self._terms, key=lambda k: (k[1], k[0]))
        xs = np.array([k[0] for k in keys], dtype=np.int64)
        zs = np.array([k[1] for k in keys], dtype=np.int64)
        cs = np.array([self._terms[k] for k in keys], dtype=np.complex128)
        return xs, zs, cs

    def max_weight(self) -> int:
        return max(((x | z).bit_count() for x, z in self._terms), default=0)

    def is_hermitian(self, tol: float = 1e-10) -> bool:
        return all(abs(c.imag) <= tol for c in self._terms.values())

    def is_diagonal(self) -> bool:
        return all(x == 0 for x, _ in self._terms)

    # -- algebra -----------------------------------------------------------

    def __add__(self, other: "PauliSum") -> "PauliSum":
        if self.n_qubits != other.n_qubits:
            raise ValueError("qubit counts differ")
        s = self.copy()
        for key, coeff in other._terms.items():
            s._terms[key] = s._terms.get(key, 0.0) + coeff
        return s

    def __sub__(self, other: "PauliSum") -> "PauliSum":
        return self + (other * -1.0)

    def __mul__(self, scalar: complex) -> "PauliSum":
        s = PauliSum(self.n_qubits)
        s._terms = {k: c * scalar for k, c in self._terms.items()}
        return s

    __rmul__ = __mul__

    def adjoint(self) -> "PauliSum":
        s = PauliSum(self.n_qubits)
        s._terms = {k: c.conjugate() for k, c in self._terms.items()}
        return s

    def simplify(self, tol: float = DROP_TOLERANCE) -> "PauliSum":
        """Drop terms with |coeff| <= tol (in place); returns self."""
        self._terms = {k: c for k, c in self._terms.items() if abs(c) > tol}
        return self


def sum_mul(a: PauliSum, b: PauliSum) -> PauliSum:
    """Operator product of two sums, simplified at the drop tolerance."""
    if a.n_qubits != b.n_qubits:
        raise ValueError("qubit counts differ")
    out = PauliSum(a.n_qubits)
    acc = out._terms
    b_items = [(x, z, (x & z).bit_count(), c) for (x, z), c in b._terms.items()]
    for (xa, za), ca in a._terms.items():
        qa = (xa & za).bit_count()
        for xb, zb, qb, cb in b_items:
            x = xa ^ xb
            z = za ^ zb
            # phase of the ordered product relative to the result's letter form
            power = (qa + qb + 2 * (za & xb).bit_count() - (x & z).bit_count()) & 3
            key = (x, z)
            acc[key] = acc.get(key, 0.0) + ca * cb * (1j ** power)
    return out.simplify()


def to_dense_matrix(op: PauliSum | PauliString) -> np.ndarray:
    """Dense 2^N x 2^N complex matrix; guarded at N <= DENSE_QUBIT_LIMIT.

    Built by vectorized index arithmetic: the letter tensor P = i^{|x&z|} X^x Z^z
    maps basis state |j> to i^{|x&z|} (-1)^{|j&z|} |j^x>.
    """
    n = op.n_qubits
    if n > DENSE_QUBIT_LIMIT:
        raise ValueError(f"dense matrix requested for {n} qubits "
                         f"(limit {DENSE_QUBIT_LIMIT})")
    if isinstance(op, PauliString):
        as_sum = PauliSum(n)
        as_sum.add_string(op)
        op = as_sum
    dim = 1 << n
    j = np.arange(dim, dtype=np.int64)
    mat = np.zeros((dim, dim), dtype=np.complex128)
    for (x, z), coeff in op._terms.items():
        signs = 1.0 - 2.0 * (np.bitwise_count(j & z) & 1).astype(np.float64)
        mat[j ^ x, j] += coeff * (1j ** ((x & z).bit_count() & 3)) * signs
    return mat


# -- plain-text serialization ----------------------------------------------

def pauli_sum_to_text(op: PauliSum) -> str:
    """One term per line: `<coeff_real> <coeff_imag> <label>`.

    Coefficients are written with 17 significant digits, which round-trips
    float64 exactly.  Terms appear in canonical order.
    """
    lines = []
    for string, coeff in op.terms():
        lines.append(f"{coeff.real:.17g} {coeff.imag:.17g} {string.label()}")
    return "\n".join(lines) + "\n"


def pauli_sum_from_text(text: str) -> PauliSum:
    rows = []
    for ln, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        parts = line.split()
        if len(parts) != 3:
            raise ValueError(f"line {ln}: expected `re im label`, got {raw!r}")
        re_s, im_s, label = parts
        rows.append((float(re_s), float(im_s), label))
    if not rows:
        raise ValueError("no terms found")
    n = len(rows[0][2])
    out = PauliSum(n)
    for re_v, im_v, label in rows:
        if len(label) != n:
            raise ValueError("inconsistent label lengths")
        out.add_string(PauliString.from_label(label), complex(re_v, im_v))
    return out
