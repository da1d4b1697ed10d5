"""Exact Fock-space spectral computations.

States are organized by (n_alpha, n_beta) particle sectors.  Inside a
sector, a state is a pair of spatial-orbital occupation bitmasks and the
sector vector space is the tensor product (beta-major), so same-spin
excitations act on one factor with no cross-spin signs.  The interleaved
spin-orbital ordering p = 2i + sigma used elsewhere maps onto this blocked
ordering through a signed permutation handled at the Fock-operator
boundary.
"""

from dataclasses import dataclass
from itertools import combinations

import numpy as np

from .errors import NumericalError

__all__ = [
    "SpectralRange",
    "FockOperator",
    "spectral_range",
    "sector_spectrum",
    "minimal_lcu",
]

_DENSE_LIMIT_QUBITS = 14  # full-Fock size threshold for the all-dense path
_DENSE_BLOCK_DIM = 400  # iterative path still diagonalizes small blocks densely
_LANCZOS_CAP = 300
_LANCZOS_TOL = 1e-7


def _sector_basis(n, k):
    masks = []
    for pos in combinations(range(n), k):
        m = 0
        for p in pos:
            m |= 1 << p
        masks.append(m)
    return masks


def _excitation_stack(n, masks):
    """Dense D[(p,q)] = E_pq on the span of `masks` (single spin species)."""
    d = len(masks)
    index = {m: i for i, m in enumerate(masks)}
    stack = np.zeros((n * n, d, d))
    for col, m in enumerate(masks):
        for q in range(n):
            if not (m >> q) & 1:
                continue
            m2 = m ^ (1 << q)
            s1 = -1.0 if ((m & ((1 << q) - 1)).bit_count() & 1) else 1.0
            for p in range(n):
                if (m2 >> p) & 1:
                    continue
                m3 = m2 | (1 << p)
                s2 = -1.0 if ((m2 & ((1 << p) - 1)).bit_count() & 1) else 1.0
                stack[p * n + q, index[m3], col] += s1 * s2
    return stack


class _Sector:
    """All operator data for one (n_alpha, n_beta) block."""

    def __init__(self, t, n_alpha, n_beta):
        n = t.n_orb
        self.masks_a = _sector_basis(n, n_alpha)
        self.masks_b = _sector_basis(n, n_beta)
        self.da = len(self.masks_a)
        self.db = len(self.masks_b)
        self.dim = self.da * self.db
        g = t.tbt.reshape(n * n, n * n)
        self.d_a = _excitation_stack(n, self.masks_a)
        self.d_b = _excitation_stack(n, self.masks_b) if n_beta != n_alpha else self.d_a
        obt_flat = t.obt.reshape(n * n)
        self.m_a = np.einsum("x,xab->ab", obt_flat, self.d_a)
        self.m_b = np.einsum("x,xab->ab", obt_flat, self.d_b)
        self.a_a = np.einsum("yx,yab->xab", g, self.d_a)
        self.a_b = np.einsum("yx,yab->xab", g, self.d_b) if n_beta != n_alpha else self.a_a
        self.e0 = t.e0

    def dense(self):
        ha = self.m_a + np.einsum("xab,xbc->ac", self.a_a, self.d_a)
        hb = self.m_b + np.einsum("xab,xbc->ac", self.a_b, self.d_b)
        h = np.kron(np.eye(self.db), ha) + np.kron(hb, np.eye(self.da))
        cross = np.einsum("xAB,xab->AaBb", self.d_b, self.a_a) + np.einsum(
            "xAB,xab->AaBb", self.a_b, self.d_a
        )
        h += cross.reshape(self.dim, self.dim)
        h += self.e0 * np.eye(self.dim)
        return h

    def matvec(self, vec):
        v = vec.reshape(self.db, self.da)
        w = self.m_b @ v + v @ self.m_a.T + self.e0 * v
        tt = np.matmul(self.d_b, v) + np.matmul(v, np.transpose(self.d_a, (0, 2, 1)))
        w += np.einsum("xab,xbc->ac", self.a_b, tt)
        w += np.einsum("xab,xcb->ac", tt, self.a_a)
        return w.ravel()


def _lanczos_extremes(matvec, dim, tol=_LANCZOS_TOL, cap=_LANCZOS_CAP):
    """Both extremal eigenvalues from one Krylov run, full reorthogonalization.

    Returns (e_min, e_max, residual bound).  Deterministic start vector.
    """
    rng = np.random.default_rng(1905)
    q = rng.standard_normal(dim)
    q /= np.linalg.norm(q)
    basis = [q]
    alphas, betas = [], []
    steps = min(dim, cap)
    for j in range(steps):
        w = matvec(basis[-1])
        a = float(basis[-1] @ w)
        alphas.append(a)
        w = w - a * basis[-1]
        if j > 0:
            w = w - betas[-1] * basis[-2]
        qmat = np.asarray(basis).T
        w = w - qmat @ (qmat.T @ w)
        w = w - qmat @ (qmat.T @ w)
        b = float(np.linalg.norm(w))
        tmat_vals, tmat_vecs = _tridiag_eig(alphas, betas)
        res = b * max(abs(tmat_vecs[-1, 0]), abs(tmat_vecs[-1, -1]))
        if res <= tol or b < 1e-13 or j == dim - 1:
            return float(tmat_vals[0]), float(tmat_vals[-1]), res
        betas.append(b)
        basis.append(w / b)
    raise NumericalError(
        f"Lanczos failed to converge in {steps} steps (residual {res:.3e})",
        payload={"residual": res},
    )


def _tridiag_eig(alphas, betas):
    from scipy.linalg import eigh_tridiagonal

    if len(alphas) == 1:
        return np.array(alphas), np.ones((1, 1))
    return eigh_tridiagonal(np.asarray(alphas), np.asarray(betas))


@dataclass
class SpectralRange:
    e_min: float
    e_max: float
    method: str
    residual: float

    def __post_init__(self):
        if self.e_min > self.e_max:
            raise ValueError("e_min exceeds e_max")

    @property
    def half_range(self):
        return 0.5 * (self.e_max - self.e_min)


def spectral_range(t, method=None):
    """Extremes of the Hamiltonian over the whole Fock space.

    Dense per-sector diagonalization up to 14 spin-orbitals; above that,
    Lanczos on the large sectors (small ones stay dense).  `method` forces
    a path ("dense"/"iterative") for cross-checks.
    """
    n = t.n_orb
    if method is None:
        method = "dense" if 2 * n <= _DENSE_LIMIT_QUBITS else "iterative"
    if method not in ("dense", "iterative"):
        raise ValueError(f"unknown method {method!r}")
    e_min, e_max = np.inf, -np.inf
    worst = 0.0
    for na in range(n + 1):
        for nb in range(n + 1):
            sec = _Sector(t, na, nb)
            if method == "dense" or sec.dim <= _DENSE_BLOCK_DIM:
                vals = np.linalg.eigvalsh(sec.dense())
                lo, hi = float(vals[0]), float(vals[-1])
            else:
                lo, hi, res = _lanczos_extremes(sec.matvec, sec.dim)
                worst = max(worst, res)
            e_min = min(e_min, lo)
            e_max = max(e_max, hi)
    return SpectralRange(e_min, e_max, method, worst)


def sector_spectrum(t, n_elec):
    """Eigenvalues on the fixed total-electron-number subspace, ascending."""
    n = t.n_orb
    if not 0 <= n_elec <= 2 * n:
        raise ValueError(f"electron count {n_elec} outside [0, {2 * n}]")
    out = []
    for na in range(n + 1):
        nb = n_elec - na
        if 0 <= nb <= n:
            sec = _Sector(t, na, nb)
            out.append(np.linalg.eigvalsh(sec.dense()))
    return np.sort(np.concatenate(out))


class FockOperator:
    """Hamiltonian action on the full 2^(2N) Fock space, interleaved ordering.

    Bit p of a basis index is the occupation of spin-orbital p = 2i + sigma.
    Internally blocked by particle sectors; the reordering between the
    interleaved creation-operator string and the blocked
    (alpha-then-beta) string contributes the per-state sign below.
    """

    def __init__(self, t):
        self.n_spin_orb = 2 * t.n_orb
        n = t.n_orb
        self._sectors = []
        for na in range(n + 1):
            for nb in range(n + 1):
                sec = _Sector(t, na, nb)
                idx = np.empty(sec.dim, dtype=np.int64)
                sgn = np.empty(sec.dim)
                for rb, mb in enumerate(sec.masks_b):
                    for ra, ma in enumerate(sec.masks_a):
                        s = 0
                        for i in range(n):
                            if (ma >> i) & 1:
                                s |= 1 << (2 * i)
                            if (mb >> i) & 1:
                                s |= 1 << (2 * i + 1)
                        crossings = 0
                        for i in range(n):
                            if (mb >> i) & 1:
                                crossings += (ma >> (i + 1)).bit_count()
                        idx[rb * sec.da + ra] = s
                        sgn[rb * sec.da + ra] = -1.0 if crossings & 1 else 1.0
                self._sectors.append((sec, idx, sgn))

    @property
    def dim(self):
        return 1 << self.n_spin_orb

    def apply(self, vec):
        vec = np.asarray(vec)
        out = np.zeros(self.dim, dtype=vec.dtype)
        for sec, idx, sgn in self._sectors:
            block_in = sgn * vec[idx]
            out[idx] = sgn * sec.matvec(block_in)
        return out

    def dense(self):
        if self.n_spin_orb > 10:
            raise NumericalError("dense Fock assembly limited to 10 spin-orbitals")
        h = np.zeros((self.dim, self.dim))
        for sec, idx, sgn in self._sectors:
            h[np.ix_(idx, idx)] = np.outer(sgn, sgn) * sec.dense()
        return h


def minimal_lcu(t):
    """Two-reflection LCU achieving the 1-norm lower bound.

    Returns (gamma, coeff, u_plus, u_minus) with
    H = gamma*1 + coeff*(u_plus + u_minus), gamma = e_min + (e_max-e_min)/2
    and coeff = (e_max-e_min)/4; the achieved 1-norm 2*coeff is exactly the
    spectral half-range.  Dense diagnostic construction.
    """
    if 2 * t.n_orb > 8:
        raise NumericalError("minimal_lcu limited to 8 spin-orbitals")
    h = FockOperator(t).dense()
    vals, vecs = np.linalg.eigh(h)
    e_min, e_max = float(vals[0]), float(vals[-1])
    delta = e_max - e_min
    gamma = e_min + 0.5 * delta
    if delta < 1e-14:
        dim = h.shape[0]
        return gamma, 0.0, np.eye(dim, dtype=complex), np.eye(dim, dtype=complex)
    scaled = (2.0 * vals - (e_max + e_min)) / delta
    scaled = np.clip(scaled, -1.0, 1.0)
    phases = scaled + 1j * np.sqrt(1.0 - scaled * scaled)
    u_plus = (vecs * phases) @ vecs.conj().T
    u_minus = (vecs * phases.conj()) @ vecs.conj().T
    return gamma, 0.25 * delta, u_plus, u_minus
