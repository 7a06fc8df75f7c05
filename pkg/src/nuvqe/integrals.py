"""FCIDUMP ingestion and the second-quantized Hamiltonian container.

A parsed problem is held in spin-orbital form::

    H = core
      + sum_{pq}   h1[p, q]    adag_p a_q
      + 1/2 sum_{pqrs} h2[p, q, r, s] adag_p adag_q a_s a_r

with `h2` in physicist bra-ket notation, h2[p,q,r,s] = <pq|rs>, derived from
the chemist (ij|kl) integrals of the file by <pq|rs> = (pr|qs).  Spin
orbitals are interleaved: mode 2p is spatial orbital p with spin up, mode
2p+1 the same orbital with spin down.  All values are in Hartree.

Fixture files come with a plain-text sidecar (`<name>.meta`) of `key=value`
reference data (RHF/UHF/FCI energies, geometry).
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

__all__ = [
    "FermionHamiltonian",
    "parse_fcidump",
    "load_metadata",
    "hartree_fock_occupations",
]


@dataclass
class FermionHamiltonian:
    n_modes: int
    n_electrons: int
    ms2: int
    core: float
    h1: np.ndarray = field(repr=False)   # (M, M)
    h2: np.ndarray = field(repr=False)   # (M, M, M, M), <pq|rs>

    def __post_init__(self):
        m = self.n_modes
        if m % 2 or m < 2:
            raise ValueError("n_modes must be a positive even number")
        if self.h1.shape != (m, m) or self.h2.shape != (m, m, m, m):
            raise ValueError("integral tensor shapes do not match n_modes")
        if not 0 <= self.n_electrons <= m:
            raise ValueError("bad electron count")

    @property
    def n_alpha(self) -> int:
        return (self.n_electrons + self.ms2) // 2

    @property
    def n_beta(self) -> int:
        return self.n_electrons - self.n_alpha


def parse_fcidump(path: str | Path) -> FermionHamiltonian:
    """Read an FCIDUMP file into spin-orbital form."""
    text = Path(path).read_text()
    header_match = re.search(r"&FCI(.*?)(?:&END|/)", text, re.DOTALL | re.IGNORECASE)
    if not header_match:
        raise ValueError(f"{path}: no &FCI header")
    header = header_match.group(1)

    def header_int(key: str) -> int:
        m = re.search(rf"{key}\s*=\s*(-?\d+)", header, re.IGNORECASE)
        if not m:
            raise ValueError(f"{path}: header lacks {key}")
        return int(m.group(1))

    norb = header_int("NORB")
    nelec = header_int("NELEC")
    ms2 = header_int("MS2")

    h1 = np.zeros((norb, norb))
    eri = np.zeros((norb, norb, norb, norb))  # chemist (ij|kl)
    core = 0.0
    body = text[header_match.end():]
    for raw in body.splitlines():
        line = raw.split()
        if not line:
            continue
        if len(line) != 5:
            raise ValueError(f"{path}: malformed record {raw!r}")
        value = float(line[0])
        i, j, k, l = (int(f) for f in line[1:])
        if i == j == k == l == 0:
            core = value
        elif k == l == 0 and i and j:
            h1[i - 1, j - 1] = value
            h1[j - 1, i - 1] = value
        elif k == l == 0 and i and not j:
            continue  # orbital energy record; not part of the Hamiltonian
        elif i and j and k and l:
            a, b, c, d = i - 1, j - 1, k - 1, l - 1
            for p, q, r, s in ((a, b, c, d), (b, a, c, d), (a, b, d, c),
                               (b, a, d, c), (c, d, a, b), (d, c, a, b),
                               (c, d, b, a), (d, c, b, a)):
                eri[p, q, r, s] = value
        else:
            raise ValueError(f"{path}: unclassifiable record {raw!r}")

    return _to_spin_orbitals(norb, nelec, ms2, core, h1, eri)


def _to_spin_orbitals(norb: int, nelec: int, ms2: int, core: float,
                      h1: np.ndarray, eri: np.ndarray) -> FermionHamiltonian:
    m = 2 * norb
    h1so = np.zeros((m, m))
    h1so[0::2, 0::2] = h1
    h1so[1::2, 1::2] = h1
    # <PQ|RS> = (PR|QS) delta(sP,sR) delta(sQ,sS), spins interleaved
    h2so = np.zeros((m, m, m, m))
    chem = eri.transpose(0, 2, 1, 3)  # chem[p,r,q,s] -> physicist spatial block
    for sp in (0, 1):
        for sq in (0, 1):
            h2so[sp::2, sq::2, sp::2, sq::2] = chem
    return FermionHamiltonian(n_modes=m, n_electrons=nelec, ms2=ms2,
                              core=core, h1=h1so, h2=h2so)


def load_metadata(path: str | Path) -> dict[str, float | str]:
    """Parse a `key=value` sidecar; numeric values become floats."""
    out: dict[str, float | str] = {}
    for raw in Path(path).read_text().splitlines():
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        if "=" not in line:
            raise ValueError(f"{path}: bad metadata line {raw!r}")
        key, _, value = line.partition("=")
        value = value.strip()
        try:
            out[key.strip()] = float(value)
        except ValueError:
            out[key.strip()] = value
    return out


def hartree_fock_occupations(n_modes: int, n_electrons: int, ms2: int = 0) -> int:
    """Occupation bitstring of the mean-field reference.

    Occupied spin orbitals are the lowest-index ones within each spin species
    (orbitals are assumed energy-ordered); occupied means bit set (|1>).
    """
    n_alpha = (n_electrons + ms2) // 2
    n_beta = n_electrons - n_alpha
    if n_alpha < 0 or n_beta < 0 or max(n_alpha, n_beta) > n_modes // 2:
        raise ValueError("electron counts incompatible with mode count")
    bits = 0
    for p in range(n_alpha):
        bits |= 1 << (2 * p)
    for p in range(n_beta):
        bits |= 1 << (2 * p + 1)
    return bits
