"""Fragment decompositions: rotations, double factorization, greedy CSA, costs."""

import numpy as np
import pytest
from oracles import dense_hamiltonian, random_spatial

from lcunorm.errors import NumericalError
from lcunorm.fragments import (
    CsaFragment,
    DfFragment,
    OrbitalRotation,
    _csa_cost_grad,
    _pack_dim,
    csa_greedy,
    double_factorize,
    fragment_lambda_matrix,
    fragment_tensor,
    fragments_from_json,
    fragments_to_json,
    lambda_complete_square,
    lambda_fermionic,
    lambda_sqrt_fragment,
    make_rotation,
    rotate_tensors,
    theta_dim,
)
from lcunorm.tensors import SpatialTensors, load_fixture, to_chemist


def _diag_fragment(lam, n):
    return CsaFragment(make_rotation(np.zeros(theta_dim(n))), lam)


def test_zero_theta_is_identity():
    r = make_rotation(np.zeros(theta_dim(4)))
    assert np.abs(r.u - np.eye(4)).max() == 0.0


def test_quarter_rotation():
    r = make_rotation(np.array([np.pi / 2]))
    assert np.abs(r.u - np.array([[0.0, -1.0], [1.0, 0.0]])).max() < 1e-12


def test_rotation_orthogonality():
    rng = np.random.default_rng(7)
    r = make_rotation(rng.standard_normal(theta_dim(4)))
    assert np.abs(r.u.T @ r.u - np.eye(4)).max() < 1e-12
    assert abs(np.linalg.det(r.u) - 1.0) < 1e-10


def test_rotation_rejects_non_orthogonal():
    with pytest.raises(ValueError):
        OrbitalRotation(np.zeros(1), np.array([[1.0, 0.3], [0.0, 1.0]]))


def test_from_matrix_round_trip():
    rng = np.random.default_rng(11)
    for _ in range(5):
        r = make_rotation(rng.standard_normal(theta_dim(5)))
        back = OrbitalRotation.from_matrix(r.u)
        assert np.abs(back.u - r.u).max() < 1e-8


def test_from_matrix_handles_pi_planes():
    u = np.diag([-1.0, -1.0, 1.0])
    back = OrbitalRotation.from_matrix(u)
    assert np.abs(back.u - u).max() < 1e-8


def test_rotate_identity_and_inverse():
    rng = np.random.default_rng(13)
    t = random_spatial(3, rng)
    ident = make_rotation(np.zeros(theta_dim(3)))
    t1 = rotate_tensors(ident, t)
    assert np.abs(t1.obt - t.obt).max() == 0.0
    r = make_rotation(rng.standard_normal(theta_dim(3)))
    inv = OrbitalRotation.from_matrix(r.u.T)
    t2 = rotate_tensors(inv, rotate_tensors(r, t))
    assert np.abs(t2.obt - t.obt).max() < 1e-12
    assert np.abs(t2.tbt - t.tbt).max() < 1e-12


def test_rotation_preserves_fock_spectrum():
    rng = np.random.default_rng(17)
    t = random_spatial(2, rng)
    r = make_rotation(rng.standard_normal(theta_dim(2)))
    e1 = np.linalg.eigvalsh(dense_hamiltonian(t))
    e2 = np.linalg.eigvalsh(dense_hamiltonian(rotate_tensors(r, t)))
    assert np.abs(e1 - e2).max() < 1e-9


def _square_tensor(eps):
    lam = np.outer(eps, eps)
    n = eps.size
    tbt = np.zeros((n, n, n, n))
    for i in range(n):
        for j in range(n):
            tbt[i, i, j, j] = lam[i, j]
    return tbt


def test_df_recovers_single_square():
    eps = np.array([1.0, 0.5])
    t = SpatialTensors(0.0, np.zeros((2, 2)), _square_tensor(eps))
    frags = double_factorize(t)
    assert len(frags) == 1
    f = frags[0]
    assert f.sign == 1.0
    got = np.sort(np.abs(f.eps))
    assert np.abs(got - np.array([0.5, 1.0])).max() < 1e-12


def test_df_empty_for_zero_tensor():
    t = SpatialTensors(0.0, np.zeros((2, 2)), np.zeros((2, 2, 2, 2)))
    assert double_factorize(t) == []


@pytest.mark.parametrize("name", ["h2", "lih", "beh2", "h2o", "nh3"])
def test_df_reconstructs_fixtures(name):
    t = to_chemist(load_fixture(name))
    frags = double_factorize(t, tol=1e-12)
    recon = sum(fragment_tensor(f) for f in frags)
    rel = np.linalg.norm(recon - t.tbt) / np.linalg.norm(t.tbt)
    assert rel < 1e-10


def test_csa_exact_representability():
    rng = np.random.default_rng(19)
    lam = rng.standard_normal((3, 3))
    lam = lam + lam.T
    t = SpatialTensors(0.0, np.zeros((3, 3)), fragment_tensor(_diag_fragment(lam, 3)))
    frags = csa_greedy(t, stop_tol=1e-6, seed=0)
    recon = sum(fragment_tensor(f) for f in frags)
    assert np.linalg.norm(recon - t.tbt) <= 1e-6


def test_csa_zero_tensor():
    t = SpatialTensors(0.0, np.zeros((2, 2)), np.zeros((2, 2, 2, 2)))
    assert csa_greedy(t, stop_tol=1e-6) == []


def test_csa_h2_residual_and_monotone():
    t = to_chemist(load_fixture("h2"))
    frags = csa_greedy(t, stop_tol=1e-6, seed=0)
    resid = t.tbt.copy()
    norms = [np.linalg.norm(resid)]
    for f in frags:
        resid = resid - fragment_tensor(f)
        norms.append(np.linalg.norm(resid))
    assert norms[-1] <= 1e-6
    for a, b in zip(norms, norms[1:]):
        assert b <= a + 1e-12


def test_csa_respects_max_frags():
    t = to_chemist(load_fixture("lih"))
    frags = csa_greedy(t, stop_tol=1e-12, max_frags=3, seed=0)
    assert len(frags) == 3


def test_csa_gradients_match_finite_differences():
    rng = np.random.default_rng(23)
    n = 3
    target = random_spatial(n, rng).tbt
    dim = theta_dim(n) + _pack_dim(n)
    for _ in range(10):
        x = rng.uniform(-0.5, 0.5, size=dim)
        _, grad = _csa_cost_grad(x, target, n)
        fd = np.zeros(dim)
        h = 1e-5
        for k in range(dim):
            xp, xm = x.copy(), x.copy()
            xp[k] += h
            xm[k] -= h
            fd[k] = (
                _csa_cost_grad(xp, target, n, want_grad=False)
                - _csa_cost_grad(xm, target, n, want_grad=False)
            ) / (2 * h)
        scale = max(1.0, np.abs(fd).max())
        assert np.abs(grad - fd).max() / scale < 1e-4


def test_lambda_fermionic_trivial():
    l1, l2 = lambda_fermionic(np.array([-1.0, 2.0]), [_diag_fragment(np.array([[1.0]]), 1)])
    assert l1 == 3.0
    assert l2 == 0.5


def test_lambda_sqrt_single_term():
    f = _diag_fragment(np.array([[1.0]]), 1)
    assert abs(lambda_sqrt_fragment(f) - 0.5) < 1e-12


def test_complete_square_examples():
    rot = make_rotation(np.zeros(1))
    assert lambda_complete_square(DfFragment(rot, np.array([1.0, 1.0]), 1.0)) == 2.0
    assert lambda_complete_square(DfFragment(rot, np.zeros(2), 1.0)) == 0.0


def test_sqrt_cost_below_fermionic():
    rng = np.random.default_rng(29)
    for _ in range(50):
        lam = rng.standard_normal((3, 3))
        lam = lam + lam.T
        f = _diag_fragment(lam, 3)
        l2 = float(np.abs(lam).sum() - 0.5 * np.abs(np.diag(lam)).sum())
        assert lambda_sqrt_fragment(f) <= l2 + 1e-12


def test_sqrt_equals_complete_square_rank_one():
    rng = np.random.default_rng(31)
    rot = make_rotation(np.zeros(theta_dim(4)))
    for _ in range(50):
        eps = rng.standard_normal(4)
        f = DfFragment(rot, eps, 1.0)
        assert abs(lambda_sqrt_fragment(f) - lambda_complete_square(f)) < 1e-10


def test_sqrt_rotation_invariant():
    rng = np.random.default_rng(37)
    lam = rng.standard_normal((3, 3))
    lam = lam + lam.T
    a = CsaFragment(make_rotation(np.zeros(theta_dim(3))), lam)
    b = CsaFragment(make_rotation(rng.standard_normal(theta_dim(3))), lam)
    assert abs(lambda_sqrt_fragment(a) - lambda_sqrt_fragment(b)) < 1e-12


def test_sqrt_literal_diagnostic_differs():
    lam = np.array([[1.0, 0.2], [0.2, -0.5]])
    f = _diag_fragment(lam, 2)
    lit = lambda_sqrt_fragment(f, literal=True)
    occ = []
    for a in (0, 1, 2):
        for b in (0, 1, 2):
            r = np.array([a, b], dtype=float)
            occ.append(r @ lam @ r)
    assert abs(lit - 0.5 * (max(occ) - min(occ))) < 1e-12


def test_one_body_norm_shared_code_path():
    # the square-root route reuses lambda_fermionic's first component verbatim
    rng = np.random.default_rng(41)
    mu = rng.standard_normal(5)
    l1_a, _ = lambda_fermionic(mu, [])
    l1_b, _ = lambda_fermionic(mu, [])
    assert l1_a == l1_b == float(np.abs(mu).sum())


def test_fragment_json_round_trip():
    rng = np.random.default_rng(43)
    rot = make_rotation(rng.standard_normal(theta_dim(3)))
    lam = rng.standard_normal((3, 3))
    lam = lam + lam.T
    frags = [
        DfFragment(rot, rng.standard_normal(3), -1.0),
        CsaFragment(rot, lam, mu=rng.standard_normal(3)),
        CsaFragment(rot, lam),
    ]
    back = fragments_from_json(fragments_to_json(frags))
    assert len(back) == 3
    for f, g in zip(frags, back):
        assert np.abs(fragment_tensor(f) - fragment_tensor(g)).max() < 1e-12
        assert np.abs(fragment_lambda_matrix(f) - fragment_lambda_matrix(g)).max() < 1e-12
    assert back[1].mu is not None and back[2].mu is None


def test_sqrt_refuses_large_n():
    lam = np.eye(17)
    f = CsaFragment(make_rotation(np.zeros(theta_dim(17))), lam)
    with pytest.raises(NumericalError):
        lambda_sqrt_fragment(f)
