"""Low-rank fragment decompositions of the two-electron tensor.

A fragment is an orbital-rotated polynomial of occupation-number operators:
its two-body tensor is sum_ab u_ia u_ja u_kb u_lb lam_ab.  Double
factorization produces rank-1 lam = sign * (eps outer eps) fragments from an
eigendecomposition; greedy CSA fits unrestricted lam matrices one at a time.
Fragment-level 1-norm costings (fermionic reflections, square-root
unitarization, complete-square) live here too.
"""

import json
from dataclasses import dataclass

import numpy as np
import scipy.linalg

from .errors import NumericalError
from .tensors import SpatialTensors

__all__ = [
    "OrbitalRotation",
    "DfFragment",
    "CsaFragment",
    "make_rotation",
    "rotate_tensors",
    "double_factorize",
    "csa_greedy",
    "fragment_lambda_matrix",
    "fragment_tensor",
    "lambda_fermionic",
    "lambda_sqrt_fragment",
    "lambda_complete_square",
    "reflection_term_count",
    "fragments_to_json",
    "fragments_from_json",
]


def theta_dim(n):
    return n * (n - 1) // 2


def _n_from_theta(k):
    n = int(round((1 + np.sqrt(1 + 8 * k)) / 2))
    if theta_dim(n) != k:
        raise ValueError(f"theta length {k} is not N(N-1)/2 for any integer N")
    return n


def _antisymmetric(theta, n):
    a = np.zeros((n, n))
    rows, cols = np.tril_indices(n, -1)
    a[rows, cols] = theta
    a[cols, rows] = -np.asarray(theta)
    return a


def _expm_antisym(a):
    # exact exponential through the Hermitian eigendecomposition of i*a
    w, v = np.linalg.eigh(1j * a)
    u = (v * np.exp(-1j * w)) @ v.conj().T
    return np.ascontiguousarray(u.real)


@dataclass
class OrbitalRotation:
    """Orbital-rotation generator amplitudes theta_(i>j) and the cached exponential."""

    theta: np.ndarray
    u: np.ndarray

    def __post_init__(self):
        self.theta = np.asarray(self.theta, dtype=float)
        self.u = np.asarray(self.u, dtype=float)
        n = self.u.shape[0]
        if np.abs(self.u.T @ self.u - np.eye(n)).max() > 1e-10:
            raise ValueError("rotation matrix is not orthogonal to 1e-10")
        if abs(np.linalg.det(self.u) - 1.0) > 1e-8:
            raise ValueError("rotation matrix must have determinant +1")

    @property
    def n_orb(self):
        return self.u.shape[0]

    @classmethod
    def from_matrix(cls, u):
        """Recover generator amplitudes from a special orthogonal matrix.

        Uses the real Schur form, whose blocks are planar rotations (plus
        paired -1 entries for angle-pi planes), so the antisymmetric
        logarithm is real even when logm would branch.
        """
        u = np.asarray(u, dtype=float)
        n = u.shape[0]
        t, q = scipy.linalg.schur(u, output="real")
        a_t = np.zeros((n, n))
        minus_ones = []
        p = 0
        while p < n:
            if p + 1 < n and abs(t[p + 1, p]) > 1e-12:
                phi = np.arctan2(t[p + 1, p], t[p, p])
                a_t[p, p + 1] = -phi
                a_t[p + 1, p] = phi
                p += 2
            else:
                if t[p, p] < 0:
                    minus_ones.append(p)
                p += 1
        if len(minus_ones) % 2:
            raise NumericalError("orthogonal matrix has determinant -1")
        for p1, p2 in zip(minus_ones[::2], minus_ones[1::2]):
            a_t[p1, p2] = -np.pi
            a_t[p2, p1] = np.pi
        a = q @ a_t @ q.T
        a = 0.5 * (a - a.T)
        if np.abs(_expm_antisym(a) - u).max() > 1e-8:
            raise NumericalError("rotation log/exp round trip failed")
        rows, cols = np.tril_indices(n, -1)
        return cls(a[rows, cols], u)


def make_rotation(theta):
    theta = np.asarray(theta, dtype=float)
    n = _n_from_theta(theta.size)
    return OrbitalRotation(theta, _expm_antisym(_antisymmetric(theta, n)))


def rotate_tensors(r, t):
    """Conjugate the Hamiltonian by the orbital rotation: u h u^T on one body,
    u on every index of the two-body tensor.  Fock spectrum is preserved."""
    u = r.u
    if u.shape[0] != t.n_orb:
        raise ValueError("rotation dimension does not match tensors")
    obt = u @ t.obt @ u.T
    tbt = np.einsum("ip,jq,kr,ls,pqrs->ijkl", u, u, u, u, t.tbt, optimize=True)
    return SpatialTensors(t.e0, obt, tbt)


@dataclass
class DfFragment:
    """Rank-1 fragment: lam = sign * (eps outer eps) in the rotated basis."""

    rotation: OrbitalRotation
    eps: np.ndarray
    sign: float

    def __post_init__(self):
        self.eps = np.asarray(self.eps, dtype=float)
        if self.sign not in (-1.0, 1.0):
            raise ValueError("sign must be +1 or -1")


@dataclass
class CsaFragment:
    """Unrestricted-rank fragment lam_ij; mu present only for one-body/H0 use."""

    rotation: OrbitalRotation
    lam: np.ndarray
    mu: np.ndarray | None = None

    def __post_init__(self):
        self.lam = np.asarray(self.lam, dtype=float)
        if np.abs(self.lam - self.lam.T).max() > 1e-12 * max(1.0, np.abs(self.lam).max()):
            raise ValueError("lam must be symmetric")
        self.lam = 0.5 * (self.lam + self.lam.T)
        if self.mu is not None:
            self.mu = np.asarray(self.mu, dtype=float)


def fragment_lambda_matrix(f):
    if isinstance(f, DfFragment):
        return f.sign * np.outer(f.eps, f.eps)
    return f.lam


def fragment_tensor(f):
    """Two-body tensor sum_ab u_ia u_ja u_kb u_lb lam_ab of one fragment."""
    u = f.rotation.u
    lam = fragment_lambda_matrix(f)
    w = np.einsum("ia,ja->ija", u, u)
    return np.einsum("ija,klb,ab->ijkl", w, w, lam, optimize=True)


def double_factorize(t, tol=1e-12):
    """Eigendecomposition of the N^2 x N^2 two-electron matrix into rank-1 fragments.

    Fragments are emitted in order of decreasing eigenvalue magnitude; each
    carries eps_i = sqrt(|w|) d_i with L = u diag(d) u^T the reshaped
    eigenvector and sign = sign(w).  Negative eigenvalues appear after
    symmetry shifts.
    """
    if tol <= 0:
        raise ValueError("tol must be positive")
    n = t.n_orb
    g = t.tbt.reshape(n * n, n * n)
    if np.abs(g - g.T).max() > 1e-10 * max(1.0, np.abs(g).max()):
        raise ValueError("two-electron matrix not symmetric")
    w, v = np.linalg.eigh(g)
    order = np.argsort(-np.abs(w), kind="stable")
    frags = []
    for k in order:
        if abs(w[k]) <= tol:
            continue
        ell = v[:, k].reshape(n, n)
        ell = 0.5 * (ell + ell.T)
        d, u = np.linalg.eigh(ell)
        if np.linalg.det(u) < 0:
            u = u.copy()
            u[:, -1] = -u[:, -1]
            d = d.copy()  # eps sign flip is immaterial: eps enters quadratically
        frags.append(
            DfFragment(
                OrbitalRotation.from_matrix(u),
                np.sqrt(abs(w[k])) * d,
                float(np.sign(w[k])),
            )
        )
    return frags


def _pack_dim(n):
    return n * (n + 1) // 2


def _unpack_sym(p, n):
    lam = np.zeros((n, n))
    rows, cols = np.tril_indices(n)
    lam[rows, cols] = p
    lam[cols, rows] = p
    return lam


def _csa_cost_grad(x, target, n, want_grad=True):
    """Squared Frobenius distance between target tensor and one CSA fragment."""
    nt = theta_dim(n)
    theta, lam_p = x[:nt], x[nt:]
    a = _antisymmetric(theta, n)
    u = _expm_antisym(a)
    lam = _unpack_sym(lam_p, n)
    w = np.einsum("ia,ja->ija", u, u).reshape(n * n, n)
    f = w @ lam @ w.T
    diff = f - target.reshape(n * n, n * n)
    cost = float((diff * diff).sum())
    if not want_grad:
        return cost
    d = 2.0 * diff
    # lam gradient: W^T D W, folded onto the packed symmetric storage
    dlam = w.T @ d @ w
    rows, cols = np.tril_indices(n)
    glam = np.where(rows == cols, 1.0, 2.0) * dlam[rows, cols]
    # u gradient: 4 einsum('ija,ja->ia') of (D W lam) against u
    m = (d @ w @ lam).reshape(n, n, n)
    gu = 4.0 * np.einsum("ija,ja->ia", m, u)
    # theta chain rule through the exponential (Frechet adjoint)
    z = scipy.linalg.expm_frechet(a.T, gu, compute_expm=False)
    r2, c2 = np.tril_indices(n, -1)
    gtheta = z[r2, c2] - z[c2, r2]
    return cost, np.concatenate([gtheta, glam])


def csa_greedy(t, stop_tol=1e-6, max_frags=None, seed=0, restarts=3):
    """Greedy CSA: repeatedly fit one fragment to the two-electron residual.

    Each fit minimizes the squared Frobenius norm of (residual - fragment)
    starting from small random (theta, lam); up to `restarts` fresh starts
    are tried before declaring stagnation.  Stops when the residual
    Frobenius norm falls to stop_tol or max_frags is reached.
    """
    from .optimize import OptimizerConfig, minimize

    if stop_tol <= 0:
        raise ValueError("stop_tol must be positive")
    n = t.n_orb
    nt = theta_dim(n)
    rng = np.random.default_rng(seed)
    target = t.tbt.copy()
    dim = nt + _pack_dim(n)
    cfg = OptimizerConfig(tol_grad=1e-9, max_iters=2000)
    cap = max_frags if max_frags is not None else 50 * n
    frags = []
    while True:
        rnorm = float(np.sqrt((target * target).sum()))
        if rnorm <= stop_tol or len(frags) >= cap:
            break
        # fit the unit-normalized residual so the cost stays O(1); lam is
        # linear in the fragment tensor, so scaling back afterwards is exact
        scaled = target / rnorm
        best_x, best_f = None, 1.0
        for _ in range(restarts):
            x0 = rng.uniform(-0.01, 0.01, size=dim)
            fg = lambda x: _csa_cost_grad(x, scaled, n)
            x, fval, _ = minimize(fg, x0, cfg, jac=True)
            if fval < best_f:
                best_x, best_f = x, fval
            if best_f < 0.5:
                break
        if best_x is None or best_f > 1.0 - 1e-9:
            raise NumericalError(
                f"CSA stagnated at fragment {len(frags)}: residual {rnorm:.3e}",
                payload={"residual": rnorm, "n_fragments": len(frags)},
            )
        frag = CsaFragment(make_rotation(best_x[:nt]), rnorm * _unpack_sym(best_x[nt:], n))
        target -= fragment_tensor(frag)
        frags.append(frag)
    if max_frags is None and len(frags) >= cap:
        rnorm = float(np.sqrt((target * target).sum()))
        raise NumericalError(
            f"CSA exceeded {cap} fragments without reaching {stop_tol:g} "
            f"(residual {rnorm:.3e})",
            payload={"residual": rnorm, "n_fragments": len(frags)},
        )
    return frags


def lambda_fermionic(mu, frags):
    """Reflection-LCU 1-norms: (sum_i |mu_i|, sum_m [sum|lam| - half sum|diag|])."""
    l1 = float(np.abs(np.asarray(mu, dtype=float)).sum())
    l2 = 0.0
    for f in frags:
        lam = fragment_lambda_matrix(f)
        l2 += float(np.abs(lam).sum() - 0.5 * np.abs(np.diag(lam)).sum())
    return l1, l2


def _range_over_grid(lam, values, offset):
    """(max - min)/2 of R^T lam R + offset over R in values^N, batched."""
    n = lam.shape[0]
    if n > 16:
        raise NumericalError(f"configuration enumeration infeasible for N = {n}")
    vals = np.asarray(values, dtype=float)
    total = len(vals) ** n
    lo, hi = np.inf, -np.inf
    chunk = 1 << 18
    for start in range(0, total, chunk):
        idx = np.arange(start, min(start + chunk, total))
        grid = np.empty((idx.size, n))
        rem = idx
        for p in range(n):
            rem, digit = np.divmod(rem, len(vals))
            grid[:, p] = vals[digit]
        q = np.einsum("bi,ij,bj->b", grid, lam, grid)
        lo = min(lo, q.min())
        hi = max(hi, q.max())
    return 0.5 * ((hi + offset) - (lo + offset))


def lambda_sqrt_fragment(f, literal=False):
    """Spectral half-range cost of one fragment under square-root unitarization.

    Default: half-range of the pure two-body reflection polynomial
    (1/4)(sum_ij lam_ij R_i R_j - 2 sum_i lam_ii) over R in {-2,0,2}^N,
    which is rotation invariant.  With literal=True, the half-range of the
    full occupation polynomial sum_ij lam_ij n_i n_j over n in {0,1,2}^N is
    returned instead (diagnostic; includes one-body content).
    """
    lam = fragment_lambda_matrix(f)
    if literal:
        return float(_range_over_grid(lam, (0.0, 1.0, 2.0), 0.0))
    return float(0.25 * _range_over_grid(lam, (-2.0, 0.0, 2.0), -2.0 * np.trace(lam)))


def lambda_complete_square(f):
    """Chebyshev complete-square cost (sum_i |eps_i|)^2 / 2 of a rank-1 fragment."""
    return float(0.5 * np.abs(f.eps).sum() ** 2)


def reflection_term_count(lam, cutoff):
    """Number of distinct reflection-pair products with |coefficient| > cutoff."""
    n = lam.shape[0]
    count = 0
    for i in range(n):
        if abs(lam[i, i] / 2.0) > cutoff:
            count += 1
        for j in range(i):
            if abs(lam[i, j] / 2.0) > cutoff:
                count += 4
    return count


def fragments_to_json(frags):
    docs = []
    for f in frags:
        if isinstance(f, DfFragment):
            docs.append(
                {
                    "kind": "df",
                    "theta": f.rotation.theta.tolist(),
                    "eps": f.eps.tolist(),
                    "sign": f.sign,
                }
            )
        else:
            doc = {
                "kind": "csa",
                "theta": f.rotation.theta.tolist(),
                "lam": f.lam.tolist(),
            }
            if f.mu is not None:
                doc["mu"] = f.mu.tolist()
            docs.append(doc)
    return json.dumps(docs)


def fragments_from_json(text):
    frags = []
    for doc in json.loads(text):
        rot = make_rotation(np.asarray(doc["theta"]))
        if doc["kind"] == "df":
            frags.append(DfFragment(rot, np.asarray(doc["eps"]), float(doc["sign"])))
        elif doc["kind"] == "csa":
            mu = np.asarray(doc["mu"]) if "mu" in doc else None
            frags.append(CsaFragment(rot, np.asarray(doc["lam"]), mu))
        else:
            raise ValueError(f"unknown fragment kind {doc['kind']!r}")
    return frags
