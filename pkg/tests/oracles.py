"""Dense Fock-space reference operators for validating the fast code paths.

Everything here is deliberately slow and literal: ladder matrices built
entry by entry in the occupation basis (bit p of the basis index is the
occupation of spin-orbital p = 2*i + sigma), Hamiltonians assembled by
explicit loops.  Usable up to ~12 modes.
"""

import numpy as np

from lcunorm.tensors import SpatialTensors, SpinTensor2e


def annihilator(p, n_modes):
    dim = 1 << n_modes
    mask = 1 << p
    low = mask - 1
    a = np.zeros((dim, dim))
    for b in range(dim):
        if b & mask:
            sign = -1.0 if (b & low).bit_count() % 2 else 1.0
            a[b ^ mask, b] = sign
    return a


def excitation_table(n_modes):
    """E[p][q] = a^dag_p a_q as dense matrices."""
    a = [annihilator(p, n_modes) for p in range(n_modes)]
    return [[a[p].T @ a[q] for q in range(n_modes)] for p in range(n_modes)]


def dense_hamiltonian(t):
    """Fock-space matrix of chemist-form tensors or a spin-resolved 2e tensor."""
    if isinstance(t, SpinTensor2e):
        n = t.n_orb
        e0 = 0.0
        obt = np.zeros((n, n))
        blocks = (("same", t.same), ("opposite", t.opposite))
    else:
        n = t.n_orb
        e0 = t.e0
        obt = t.obt
        blocks = (("same", t.tbt), ("opposite", t.tbt))
    m = 2 * n
    dim = 1 << m
    E = excitation_table(m)
    h = e0 * np.eye(dim)
    for s in (0, 1):
        for i in range(n):
            for j in range(n):
                if obt[i, j] != 0.0:
                    h += obt[i, j] * E[2 * i + s][2 * j + s]
    for name, g in blocks:
        for s in (0, 1):
            sp = s if name == "same" else 1 - s
            for i in range(n):
                for j in range(n):
                    eij = E[2 * i + s][2 * j + s]
                    for k in range(n):
                        for l in range(n):
                            v = g[i, j, k, l]
                            if v != 0.0:
                                h += v * (eij @ E[2 * k + sp][2 * l + sp])
    return h


def dense_from_record(rec):
    """Fock-space matrix straight from FCIDUMP integrals (physicist ordering)."""
    n = rec.n_orb
    m = 2 * n
    dim = 1 << m
    a = [annihilator(p, m) for p in range(m)]
    h = rec.core_energy * np.eye(dim)
    for s in (0, 1):
        for i in range(n):
            for j in range(n):
                if rec.core_h[i, j] != 0.0:
                    h += rec.core_h[i, j] * (a[2 * i + s].T @ a[2 * j + s])
    for s in (0, 1):
        for sp in (0, 1):
            for i in range(n):
                for j in range(n):
                    for k in range(n):
                        for l in range(n):
                            v = rec.eri[i, j, k, l]
                            if v != 0.0:
                                h += (
                                    0.5
                                    * v
                                    * (
                                        a[2 * i + s].T
                                        @ a[2 * k + sp].T
                                        @ a[2 * l + sp]
                                        @ a[2 * j + s]
                                    )
                                )
    return h


def number_total(n_modes):
    dim = 1 << n_modes
    return np.diag([float(b.bit_count()) for b in range(dim)])


def symmetrize_eightfold(raw):
    g = np.zeros_like(raw)
    for perm in (
        (0, 1, 2, 3),
        (1, 0, 2, 3),
        (0, 1, 3, 2),
        (1, 0, 3, 2),
        (2, 3, 0, 1),
        (3, 2, 0, 1),
        (2, 3, 1, 0),
        (3, 2, 1, 0),
    ):
        g += raw.transpose(perm)
    return g / 8.0


def random_spatial(n, rng, scale=1.0):
    """Random chemist tensors with full 8-fold / symmetric structure."""
    obt = rng.normal(scale=scale, size=(n, n))
    obt = 0.5 * (obt + obt.T)
    tbt = symmetrize_eightfold(rng.normal(scale=scale, size=(n, n, n, n)))
    return SpatialTensors(float(rng.normal(scale=scale)), obt, tbt)


def random_spin2e(n, rng, scale=1.0):
    """Random Hermitian spin-resolved two-electron tensor.

    Blocks are symmetrized over ij<->kl and the simultaneous transposes
    (needed for a Hermitian operator) but not over i<->j alone, so they
    exercise less symmetry than a chemist tensor.
    """

    def block():
        raw = rng.normal(scale=scale, size=(n, n, n, n))
        g = np.zeros_like(raw)
        for perm in ((0, 1, 2, 3), (2, 3, 0, 1), (1, 0, 3, 2), (3, 2, 1, 0)):
            g += raw.transpose(perm)
        return g / 4.0

    return SpinTensor2e(block(), block())
