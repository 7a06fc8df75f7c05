#!/usr/bin/env python3
"""Diagnostic: cross-check the Slater-Condon FCI against brute-force
second quantization on occupation bitstrings, plus a basis-invariance test.
"""
import numpy as np
from scipy.linalg import eigh
import sys
sys.path.insert(0, "tools")
from gen_fixtures import (build_basis, compute_integrals, nuclear_repulsion,
                          rhf, mo_integrals, _spin_orbital_integrals,
                          fci_ground_energy, _orthogonalizer,
                          BOHR_PER_ANGSTROM)


def apply_ops(state_bits, ops):
    """Apply a list of (create?, orbital) right-to-left to |state_bits>."""
    sign = 1.0
    bits = state_bits
    for create, p in reversed(ops):
        occ = (bits >> p) & 1
        if create == occ:
            return None, 0.0
        if (bits & ((1 << p) - 1)).bit_count() % 2:
            sign = -sign
        bits ^= 1 << p
    return bits, sign


def brute_force_fci(hso, gso, n_alpha, n_beta, e_nuc):
    m = hso.shape[0]
    states = [s for s in range(1 << m)
              if sum((s >> k) & 1 for k in range(0, m, 2)) == n_alpha
              and sum((s >> k) & 1 for k in range(1, m, 2)) == n_beta]
    idx = {s: i for i, s in enumerate(states)}
    H = np.zeros((len(states), len(states)))
    for s in states:
        col = idx[s]
        for p in range(m):
            for q in range(m):
                if abs(hso[p, q]) < 1e-14:
                    continue
                out, sg = apply_ops(s, [(True, p), (False, q)])
                if out is not None:
                    H[idx[out], col] += sg * hso[p, q]
        for p in range(m):
            for q in range(m):
                for r in range(m):
                    for t in range(m):
                        v = gso[p, q, r, t]
                        if abs(v) < 1e-14:
                            continue
                        out, sg = apply_ops(
                            s, [(True, p), (True, q), (False, t), (False, r)])
                        if out is not None:
                            H[idx[out], col] += 0.5 * sg * v
    return float(eigh(H, eigvals_only=True)[0]) + e_nuc


r = 2.50
atoms = [("H", np.array([0.0, 0.0, 0.0])),
         ("H", np.array([0.0, 0.0, r * BOHR_PER_ANGSTROM]))]
funcs = build_basis(atoms, "6-31g")
S, T, V, eri = compute_integrals(atoms, funcs)
Hcore = T + V
e_nuc = nuclear_repulsion(atoms)
e_rhf, C, eps = rhf(S, Hcore, eri, 1, e_nuc)

h_mo, g_mo = mo_integrals(Hcore, eri, C)
hso, gso = _spin_orbital_integrals(h_mo, g_mo)
e_sc, _ = fci_ground_energy(hso, gso, 1, 1, e_nuc)
e_bf = brute_force_fci(hso, gso, 1, 1, e_nuc)
print(f"RHF                {e_rhf:+.10f}")
print(f"SC  FCI (RHF MOs)  {e_sc:+.10f}")
print(f"BF  FCI (RHF MOs)  {e_bf:+.10f}   diff {e_sc - e_bf:+.3e}")

# basis invariance: redo in symmetrically orthogonalized AO basis
X = _orthogonalizer(S)
h2_mo, g2_mo = mo_integrals(Hcore, eri, X)
h2so, g2so = _spin_orbital_integrals(h2_mo, g2_mo)
e_sc2, _ = fci_ground_energy(h2so, g2so, 1, 1, e_nuc)
print(f"SC  FCI (sym AOs)  {e_sc2:+.10f}   diff {e_sc2 - e_sc:+.3e}")
