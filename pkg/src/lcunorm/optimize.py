"""BFGS minimization wrapper and orbital-rotation 1-norm optimization."""

from dataclasses import dataclass

import numpy as np
import scipy.optimize

from .errors import NumericalError
from .fragments import make_rotation, rotate_tensors, theta_dim
from .grouping import sorted_insertion
from .pauli import jordan_wigner, lambda_pauli_closed_form
from .tensors import one_body_adjust

__all__ = ["OptimizerConfig", "minimize", "oo_pauli", "oo_ac"]


@dataclass
class OptimizerConfig:
    grad_mode: str = "auto"  # analytic when a jacobian is supplied, else central differences
    tol_grad: float = 1e-8
    max_iters: int = 500
    restarts: int = 2
    seed: int = 0
    fd_step: float | None = None

    def __post_init__(self):
        if self.tol_grad <= 0:
            raise ValueError("tol_grad must be positive")
        if self.max_iters < 1:
            raise ValueError("max_iters must be at least 1")
        if self.restarts < 0:
            raise ValueError("restarts must be non-negative")
        if self.fd_step is not None and self.fd_step <= 0:
            raise ValueError("fd_step must be positive")


class _NonFinite(Exception):
    def __init__(self, x):
        self.x = x


def minimize(f, x0, cfg=None, jac=False):
    """Quasi-Newton descent; stops at ||grad||_inf <= tol_grad or max_iters.

    `f` returns the cost, or (cost, gradient) when jac=True.  Guarantees
    f(x*) <= f(x0).  A non-finite cost or gradient during the search raises
    NumericalError carrying the offending iterate.
    """
    cfg = cfg or OptimizerConfig()
    x0 = np.asarray(x0, dtype=float)

    def checked(x):
        out = f(x)
        if jac:
            c, g = out
            if not np.isfinite(c) or not np.all(np.isfinite(g)):
                raise _NonFinite(np.array(x))
            return c, np.asarray(g, dtype=float)
        if not np.isfinite(out):
            raise _NonFinite(np.array(x))
        return out

    f0 = checked(x0)[0] if jac else checked(x0)
    options = {"gtol": cfg.tol_grad, "maxiter": cfg.max_iters}
    if cfg.fd_step is not None:
        options["finite_diff_rel_step"] = cfg.fd_step
    try:
        res = scipy.optimize.minimize(
            checked,
            x0,
            jac=True if jac else "3-point",
            method="BFGS",
            options=options,
        )
    except _NonFinite as bad:
        raise NumericalError(
            "non-finite cost encountered during minimization",
            payload={"last_x": bad.x},
        ) from None
    if res.fun > f0:
        return x0, float(f0), int(res.nit)
    return np.asarray(res.x, dtype=float), float(res.fun), int(res.nit)


def _smoothed_closed_form(t, delta):
    """Pauli 1-norm closed form with |x| -> sqrt(x^2 + delta^2) - delta."""

    def habs(x):
        return np.sqrt(x * x + delta * delta) - delta

    g = t.tbt
    n = t.n_orb
    term1 = habs(one_body_adjust(t)).sum()
    diff = g - g.transpose(0, 3, 2, 1)
    gt = np.greater.outer(np.arange(n), np.arange(n))
    term2 = (habs(diff) * (gt[:, None, :, None] & gt[None, :, None, :])).sum()
    return float(term1 + term2 + 0.5 * habs(g).sum())


def oo_pauli(t, cfg=None, smooth=0.0):
    """Minimize the closed-form Pauli 1-norm over orbital rotations.

    Starts from theta = 0 plus cfg.restarts seeded perturbations (scale
    0.05); the best result is kept.  Returns (theta*, lambda at theta*).
    `smooth` > 0 replaces |x| by a pseudo-Huber surrogate of that width
    during the search (the reported lambda is always the exact one).
    """
    cfg = cfg or OptimizerConfig()
    n = t.n_orb
    k = theta_dim(n)

    def rotated(theta):
        return rotate_tensors(make_rotation(theta), t)

    def cost(theta):
        rt = rotated(theta)
        if smooth > 0.0:
            return _smoothed_closed_form(rt, smooth)
        return lambda_pauli_closed_form(rt)

    rng = np.random.default_rng(cfg.seed)
    starts = [np.zeros(k)]
    starts += [rng.uniform(-0.05, 0.05, size=k) for _ in range(cfg.restarts)]
    best_x, best_f = None, np.inf
    for x0 in starts:
        x, _, _ = minimize(cost, x0, cfg)
        exact = lambda_pauli_closed_form(rotated(x))
        if exact < best_f:
            best_x, best_f = x, exact
    base = lambda_pauli_closed_form(t)
    if base <= best_f:
        return np.zeros(k), float(base)
    return best_x, float(best_f)


def oo_ac(t, cfg=None, smooth=0.0, theta=None):
    """Anticommuting-group 1-norm at the oo_pauli optimum.

    The rotation is optimized against the closed-form Pauli cost (grouping
    is not differentiable); the rotated polynomial is then grouped.  Pass
    `theta` to reuse a precomputed rotation.  Returns (theta, lambda_ac).
    """
    if theta is None:
        theta, _ = oo_pauli(t, cfg, smooth)
    rt = rotate_tensors(make_rotation(theta), t)
    part = sorted_insertion(jordan_wigner(rt))
    return theta, part.one_norm()
