"""Interaction-picture split: peel off a mean-field piece before costing.

H0 is one orbital frame (theta) holding occupation-number content only: a
one-body part with eigenvalues mu and a symmetric pair-coefficient matrix
lam.  Fitting (theta, mu, lam) jointly to the input tensors and
subtracting leaves a residual Hamiltonian whose 1-norms are what a
propagator in the rotating frame of H0 actually pays for.
"""

from dataclasses import dataclass

import numpy as np
import scipy.linalg

from .fragments import (
    CsaFragment,
    _antisymmetric,
    _expm_antisym,
    _pack_dim,
    _unpack_sym,
    fragment_tensor,
    make_rotation,
    theta_dim,
)
from .tensors import SpatialTensors, one_body_adjust

__all__ = ["PictureSplit", "split_interaction", "residual_report"]


@dataclass
class PictureSplit:
    h0: CsaFragment
    residual: SpatialTensors
    fit_residual_norm: float

    def h0_tensors(self):
        """(obt, tbt) of the mean-field part in the original orbital frame."""
        u = self.h0.rotation.u
        obt = (u * self.h0.mu) @ u.T
        return obt, fragment_tensor(self.h0)


def _split_cost_grad(x, t, n, want_grad=True):
    """Joint squared Frobenius misfit of both tensors against one H0 frame."""
    nt = theta_dim(n)
    theta, mu, lam_p = x[:nt], x[nt : nt + n], x[nt + n :]
    a = _antisymmetric(theta, n)
    u = _expm_antisym(a)
    lam = _unpack_sym(lam_p, n)
    da = (u * mu) @ u.T - t.obt
    w = np.einsum("ia,ja->ija", u, u).reshape(n * n, n)
    diff = w @ lam @ w.T - t.tbt.reshape(n * n, n * n)
    cost = float((da * da).sum() + (diff * diff).sum())
    if not want_grad:
        return cost
    d = 2.0 * diff
    rows, cols = np.tril_indices(n)
    glam = np.where(rows == cols, 1.0, 2.0) * (w.T @ d @ w)[rows, cols]
    gmu = 2.0 * np.einsum("ia,ij,ja->a", u, da, u)
    m = (d @ w @ lam).reshape(n, n, n)
    gu = 4.0 * np.einsum("ija,ja->ia", m, u) + 4.0 * da @ (u * mu)
    z = scipy.linalg.expm_frechet(a.T, gu, compute_expm=False)
    r2, c2 = np.tril_indices(n, -1)
    gtheta = z[r2, c2] - z[c2, r2]
    return cost, np.concatenate([gtheta, gmu, glam])


def split_interaction(t, cfg=None):
    """Best-fit mean-field split of the tensors.

    Starts from theta = 0, mu = eigenvalues of the adjusted one-body
    matrix, lam = 0 (the one-body content is exactly representable), plus
    cfg.restarts random perturbations; keeps the best fit.
    """
    from .optimize import OptimizerConfig, minimize

    if cfg is None:
        cfg = OptimizerConfig(tol_grad=1e-8, max_iters=2000)
    n = t.n_orb
    nt = theta_dim(n)
    x_base = np.concatenate(
        [np.zeros(nt), np.linalg.eigvalsh(one_body_adjust(t)), np.zeros(_pack_dim(n))]
    )
    rng = np.random.default_rng(cfg.seed)
    starts = [x_base]
    for _ in range(cfg.restarts):
        starts.append(x_base + rng.uniform(-0.05, 0.05, size=x_base.size))
    best_x, best_f = None, np.inf
    for x0 in starts:
        x, fval, _ = minimize(lambda y: _split_cost_grad(y, t, n), x0, cfg, jac=True)
        if fval < best_f:
            best_x, best_f = x, fval
    theta, mu, lam_p = best_x[:nt], best_x[nt : nt + n], best_x[nt + n :]
    h0 = CsaFragment(make_rotation(theta), _unpack_sym(lam_p, n), mu=mu)
    split = PictureSplit(h0, t, 0.0)
    obt0, tbt0 = split.h0_tensors()
    residual = t.replace(obt=t.obt - obt0, tbt=t.tbt - tbt0)
    misfit = float(np.linalg.norm(t.obt - obt0) + np.linalg.norm(t.tbt - tbt0))
    return PictureSplit(h0, residual, misfit)


def residual_report(split, methods=None, cfg=None, seed=0):
    """Norm report for the residual Hamiltonian (no symmetry shift)."""
    from .pipeline import report_for_tensors

    return report_for_tensors(
        split.residual,
        molecule="residual",
        picture="interaction",
        methods=methods,
        cfg=cfg,
        seed=seed,
    )
