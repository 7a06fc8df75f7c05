"""Fermion-to-qubit encodings: Jordan-Wigner, parity, Bravyi-Kitaev.

All three are instances of one GF(2) linear scheme.  Qubit bits store
t = A.n (mod 2) for an invertible binary matrix A over the occupation
vector n.  Everything an encoding needs follows from A:

* update set  U(j) = {k : A[k, j] = 1}          (qubits flipped by n_j -> n_j+1)
* flip set    F(j) = {k : Ainv[j, k] = 1}        (qubits whose parity is n_j)
* parity set  P(j) = {k : (R.Ainv)[j, k] = 1}    (qubits whose parity is
                                                  sum_{i<j} n_i; R = strict
                                                  lower-triangular ones)

and the ladder operators are

    adag_j = X_U . (I + Z_F)/2 . Z_P        a_j = X_U . (I - Z_F)/2 . Z_P

with occupied = |1>, so the Jordan-Wigner number operator is (I - Z_j)/2.

Mode order is interleaved (mode 2p = spatial p spin-up).  The parity encoder
runs its prefix sum in block order (all spin-up modes first), which is what
places the spin-up-count parity on qubit M/2-1 and the total-number parity on
qubit M-1 and makes the standard two-qubit reduction a plain substitution.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .integrals import FermionHamiltonian, hartree_fock_occupations
from .pauli import PauliString, PauliSum

__all__ = [
    "MAPPING_NAMES",
    "MappingSpec",
    "map_to_qubits",
    "hartree_fock_bitstring",
    "n_qubits_for",
    "encoder_matrix",
    "ladder_images",
]

MAPPING_NAMES = ("jordan_wigner", "parity", "bravyi_kitaev")


@dataclass(frozen=True)
class MappingSpec:
    """Which encoding to use, and whether to drop the two parity qubits.

    Two-qubit reduction is only defined for the parity encoding; it removes
    qubits M/2-1 and M-1, substituting the (-1)^{N_alpha} and (-1)^{N}
    eigenvalues of the target particle-number sector.
    """
    name: str
    two_qubit_reduction: bool = False

    def __post_init__(self):
        if self.name not in MAPPING_NAMES:
            raise ValueError(f"unknown mapping {self.name!r}; "
                             f"choose from {MAPPING_NAMES}")
        if self.two_qubit_reduction and self.name != "parity":
            raise ValueError("two-qubit reduction requires the parity mapping")


def _as_spec(mapping: "MappingSpec | str") -> MappingSpec:
    return mapping if isinstance(mapping, MappingSpec) else MappingSpec(mapping)


def n_qubits_for(fh: FermionHamiltonian, mapping: "MappingSpec | str") -> int:
    spec = _as_spec(mapping)
    return fh.n_modes - 2 if spec.two_qubit_reduction else fh.n_modes


# -- encoder matrices --------------------------------------------------------

def _bravyi_kitaev_matrix(m: int) -> np.ndarray:
    size = 1
    mat = np.ones((1, 1), dtype=np.uint8)
    while size < m:
        top = np.hstack([mat, np.zeros((size, size), dtype=np.uint8)])
        corner = np.zeros((size, size), dtype=np.uint8)
        corner[-1, :] = 1
        bottom = np.hstack([corner, mat])
        mat = np.vstack([top, bottom])
        size *= 2
    return mat[:m, :m]


def encoder_matrix(name: str, m: int) -> np.ndarray:
    """The binary matrix A with t = A.n (mod 2)."""
    if name == "jordan_wigner":
        return np.eye(m, dtype=np.uint8)
    if name == "bravyi_kitaev":
        return _bravyi_kitaev_matrix(m)
    if name == "parity":
        if m % 2:
            raise ValueError("parity encoding expects an even mode count")
        block_pos = np.empty(m, dtype=np.int64)
        block_pos[0::2] = np.arange(m // 2)
        block_pos[1::2] = m // 2 + np.arange(m // 2)
        a = np.zeros((m, m), dtype=np.uint8)
        for j in range(m):
            a[block_pos[j]:, j] = 1
        return a
    raise ValueError(f"unknown mapping {name!r}")


def _gf2_inverse(a: np.ndarray) -> np.ndarray:
    m = a.shape[0]
    work = np.concatenate([a.astype(np.uint8) % 2, np.eye(m, dtype=np.uint8)], axis=1)
    for col in range(m):
        pivot = next((r for r in range(col, m) if work[r, col]), None)
        if pivot is None:
            raise ValueError("encoder matrix is singular over GF(2)")
        if pivot != col:
            work[[col, pivot]] = work[[pivot, col]]
        for r in range(m):
            if r != col and work[r, col]:
                work[r] ^= work[col]
    return work[:, m:]


def _rows_to_masks(mat: np.ndarray) -> list[int]:
    return [int(sum(1 << k for k in np.flatnonzero(row))) for row in mat]


def ladder_images(name: str, m: int) -> list[tuple[PauliSum, PauliSum]]:
    """(creation, annihilation) operator images per mode, each a 2-term sum."""
    a = encoder_matrix(name, m)
    ainv = _gf2_inverse(a)
    r = np.tril(np.ones((m, m), dtype=np.uint8), k=-1)
    update = _rows_to_masks(a.T)             # U(j) from column j of A
    flip = _rows_to_masks(ainv)
    parity = _rows_to_masks((r @ ainv) % 2)
    out = []
    for j in range(m):
        x_u = PauliString(m, x_mask=update[j])
        z_p = PauliString(m, z_mask=parity[j])
        z_f = PauliString(m, z_mask=flip[j])
        plain = x_u * z_p
        flipped = x_u * z_f * z_p
        cdag = PauliSum(m)
        cdag.add_string(plain, 0.5)
        cdag.add_string(flipped, 0.5)
        c = PauliSum(m)
        c.add_string(plain, 0.5)
        c.add_string(flipped, -0.5)
        out.append((cdag, c))
    return out


# -- Hamiltonian assembly ----------------------------------------------------

def _triples(op: PauliSum) -> list[tuple[int, int, complex]]:
    return [(x, z, c) for (x, z), c in op._terms.items()]


def _mul_triple(t1: tuple[int, int, complex],
                t2: tuple[int, int, complex]) -> tuple[int, int, complex]:
    x1, z1, c1 = t1
    x2, z2, c2 = t2
    x = x1 ^ x2
    z = z1 ^ z2
    power = ((x1 & z1).bit_count() + (x2 & z2).bit_count()
             + 2 * (z1 & x2).bit_count() - (x & z).bit_count()) & 3
    return x, z, c1 * c2 * (1j ** power)


def _pair_products(images: list[list[tuple[int, int, complex]]]) -> dict:
    m = len(images)
    out = {}
    for p in range(m):
        for q in range(m):
            if p == q:
                continue
            out[(p, q)] = [_mul_triple(t1, t2)
                           for t1 in images[p] for t2 in images[q]]
    return out


def map_to_qubits(fh: FermionHamiltonian,
                  mapping: "MappingSpec | str") -> PauliSum:
    """Encode the second-quantized Hamiltonian as a PauliSum."""
    spec = _as_spec(mapping)
    m = fh.n_modes
    imgs = ladder_images(spec.name, m)
    dag = [_triples(cd) for cd, _ in imgs]
    ann = [_triples(c) for _, c in imgs]

    acc: dict[tuple[int, int], complex] = {(0, 0): complex(fh.core)}

    def bump(x: int, z: int, c: complex) -> None:
        key = (x, z)
        acc[key] = acc.get(key, 0.0) + c

    for p in range(m):
        for q in range(m):
            w = fh.h1[p, q]
            if abs(w) < 1e-14:
                continue
            for t1 in dag[p]:
                for t2 in ann[q]:
                    x, z, c = _mul_triple(t1, t2)
                    bump(x, z, w * c)

    dag_pairs = _pair_products(dag)
    ann_pairs = _pair_products(ann)
    for p in range(m):
        for q in range(m):
            if p == q:
                continue
            left = dag_pairs[(p, q)]
            block = fh.h2[p, q]
            for s in range(m):
                for r in range(m):
                    if s == r:
                        continue
                    w = block[r, s]  # <pq|rs> multiplies adag_p adag_q a_s a_r
                    if abs(w) < 1e-14:
                        continue
                    for t1 in left:
                        for t2 in ann_pairs[(s, r)]:
                            x, z, c = _mul_triple(t1, t2)
                            bump(x, z, 0.5 * w * c)

    out = PauliSum(m)
    out._terms = acc
    out.simplify()
    if spec.two_qubit_reduction:
        out = _reduce_two_qubits(out, fh.n_alpha, fh.n_electrons)
    return out


# -- parity two-qubit reduction ----------------------------------------------

def _drop_bit(mask: int, pos: int) -> int:
    low = mask & ((1 << pos) - 1)
    return ((mask >> (pos + 1)) << pos) | low


def _reduce_two_qubits(op: PauliSum, n_alpha: int, n_total: int) -> PauliSum:
    m = op.n_qubits
    pos_alpha = m // 2 - 1
    pos_total = m - 1
    val_alpha = -1.0 if n_alpha % 2 else 1.0
    val_total = -1.0 if n_total % 2 else 1.0
    reduced = PauliSum(m - 2)
    for (x, z), coeff in op._terms.items():
        if (x >> pos_alpha) & 1 or (x >> pos_total) & 1:
            raise ValueError("operator does not conserve the removed parities")
        if (z >> pos_alpha) & 1:
            coeff = coeff * val_alpha
        if (z >> pos_total) & 1:
            coeff = coeff * val_total
        xr = _drop_bit(_drop_bit(x, pos_total), pos_alpha)
        zr = _drop_bit(_drop_bit(z, pos_total), pos_alpha)
        key = (xr, zr)
        reduced._terms[key] = reduced._terms.get(key, 0.0) + coeff
    return reduced.simplify()


def hartree_fock_bitstring(fh: FermionHamiltonian,
                           mapping: "MappingSpec | str") -> int:
    """Mean-field reference in the encoded register (circuit-ready)."""
    spec = _as_spec(mapping)
    occ = hartree_fock_occupations(fh.n_modes, fh.n_electrons, fh.ms2)
    n_vec = np.array([(occ >> j) & 1 for j in range(fh.n_modes)], dtype=np.uint8)
    t_vec = encoder_matrix(spec.name, fh.n_modes) @ n_vec % 2
    if spec.two_qubit_reduction:
        keep = [k for k in range(fh.n_modes)
                if k not in (fh.n_modes // 2 - 1, fh.n_modes - 1)]
        t_vec = t_vec[keep]
    return int(sum(1 << k for k, bit in enumerate(t_vec) if bit))
