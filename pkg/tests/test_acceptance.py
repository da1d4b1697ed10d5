"""Acceptance sweep: reference-table reproduction plus bound, identity,
inequality, and solver checks at their stated tolerances.

Reference 1-norms are the bundled desk-scale values for the five fixture
molecules (STO-3G).  Cells tied to non-convex optimization outcomes (the
orbital-optimized and greedy-CSA columns) get a looser tolerance than the
closed-form columns.  Known deviations and their analyses are tracked in
the project notes; failing cells here are reported, not masked.
"""

import numpy as np
import pytest

from lcunorm.fragments import (
    CsaFragment,
    DfFragment,
    _csa_cost_grad,
    _pack_dim,
    csa_greedy,
    double_factorize,
    fragment_tensor,
    lambda_complete_square,
    lambda_fermionic,
    lambda_sqrt_fragment,
    make_rotation,
    theta_dim,
)
from lcunorm.grouping import sorted_insertion
from lcunorm.optimize import minimize
from lcunorm.pauli import (
    MajoranaPolynomial,
    jordan_wigner,
    lambda_pauli,
    lambda_pauli_closed_form,
    majorana_separate,
    majorana_to_pauli,
)
from lcunorm.picture import _split_cost_grad
from lcunorm.pipeline import _engine_for
from lcunorm.spectra import minimal_lcu, spectral_range
from lcunorm.symshift import L1Problem, SymmetryShift, apply_shift, solve_l1
from lcunorm.tensors import (
    SpatialTensors,
    absorb_one_body,
    load_fixture,
    one_body_adjust,
    to_chemist,
)

from conftest import CACHE_DIR
from oracles import dense_hamiltonian, number_total, random_spatial

MOLECULES = ["h2", "lih", "beh2", "h2o", "nh3"]
METHODS = ["de2", "pauli", "oo-pauli", "ac", "oo-ac", "df", "gcsa-f", "gcsa-sr"]

REF_RAW = {
    "h2": [0.82, 1.58, 1.58, 1.49, 1.49, 1.37, 1.77, 1.37],
    "lih": [4.93, 13.0, 12.4, 10.2, 10.2, 9.34, 11.0, 8.25],
    "beh2": [9.99, 22.8, 21.9, 18.0, 17.9, 16.4, 20.1, 14.6],
    "h2o": [41.9, 71.9, 60.1, 57.2, 55.7, 53.7, 59.2, 50.6],
    "nh3": [33.8, 68.6, 54.5, 48.8, 46.8, 44.7, 50.6, 40.6],
}
REF_SHIFTED = {
    "h2": [0.66, 0.84, 0.84, 0.79, 0.79, 0.75, 0.84, 0.74],
    "lih": [3.57, 7.62, 7.02, 5.13, 5.03, 4.76, 5.48, 4.61],
    "beh2": [7.31, 14.2, 13.0, 10.2, 9.83, 9.77, 11.5, 9.58],
    "h2o": [28.9, 46.0, 37.7, 34.4, 32.9, 32.7, 36.1, 31.9],
    "nh3": [23.1, 46.3, 34.6, 29.8, 27.8, 28.1, 31.8, 26.5],
}
REF_RESIDUAL = {
    "h2": [0.20, 0.30, 0.30, 0.30, 0.30, 0.20, 0.30, 0.20],
    "lih": [0.80, 3.13, 2.88, 1.50, 1.49, 1.40, 2.12, 1.53],
    "beh2": [1.00, 5.78, 4.41, 2.60, 2.33, 2.89, 3.95, 2.44],
    "h2o": [2.38, 9.18, 7.77, 4.32, 3.91, 4.47, 7.94, 5.34],
    "nh3": [3.01, 14.3, 11.2, 5.86, 5.23, 6.09, 10.2, 6.42],
}

# closed-form columns; the rest depend on local optimization outcomes
TIGHT = {"de2", "pauli", "ac", "df"}

CELLS = [(mol, meth) for mol in MOLECULES for meth in METHODS]
CELL_IDS = [f"{mol}-{meth}" for mol, meth in CELLS]


def chemist(name):
    return to_chemist(load_fixture(name))


def _ref(table, molecule, method):
    return table[molecule][METHODS.index(method)]


def _check_cell(value, ref, method, loose=False):
    if loose or method not in TIGHT:
        tol = 0.05 * abs(ref)
    else:
        tol = max(0.02 * abs(ref), 0.02)
    assert abs(value - ref) <= tol, (
        f"got {value:.4f}, reference {ref} (allowed deviation {tol:.4f})"
    )


# ---- criterion 1: unshifted table ----------------------------------------


@pytest.mark.parametrize(("molecule", "method"), CELLS, ids=CELL_IDS)
def test_c1_raw_table(runner, molecule, method):
    value = runner.entry(molecule, "raw", method)["lambda"]
    _check_cell(value, _ref(REF_RAW, molecule, method), method)


def test_c1_runtime_budget(runner):
    for mol in MOLECULES:
        budget = 1800.0 if mol == "nh3" else 300.0
        spent = sum(
            runner.elapsed.get((mol, v), 0.0) for v in ("raw", "shifted")
        )
        assert spent <= budget, f"{mol}: {spent:.0f}s over {budget:.0f}s budget"


# ---- criterion 2: shifted table and shift monotonicity --------------------


@pytest.mark.parametrize(("molecule", "method"), CELLS, ids=CELL_IDS)
def test_c2_shifted_table(runner, molecule, method):
    value = runner.entry(molecule, "shifted", method)["lambda"]
    _check_cell(value, _ref(REF_SHIFTED, molecule, method), method)


@pytest.mark.parametrize(("molecule", "method"), CELLS, ids=CELL_IDS)
def test_c2_shift_never_raises_norm(runner, molecule, method):
    raw = runner.entry(molecule, "raw", method)["lambda"]
    shifted = runner.entry(molecule, "shifted", method)["lambda"]
    assert shifted <= raw + 1e-9


# ---- criterion 3: residual (interaction-picture) table --------------------


@pytest.mark.parametrize(("molecule", "method"), CELLS, ids=CELL_IDS)
def test_c3_residual_table(runner, molecule, method):
    value = runner.entry(molecule, "residual", method)["lambda"]
    _check_cell(value, _ref(REF_RESIDUAL, molecule, method), method, loose=True)


# ---- criterion 4: 1-norm lower bound and the minimal LCU ------------------


def _fast_lambdas(t):
    yield lambda_pauli_closed_form(t)
    yield sorted_insertion(jordan_wigner(t)).one_norm()
    mu = np.linalg.eigvalsh(one_body_adjust(t))
    frags = double_factorize(t)
    yield float(np.abs(mu).sum()) + sum(lambda_complete_square(f) for f in frags)


def test_c4_bound_on_random_tensors():
    rng = np.random.default_rng(2026)
    for i in range(200):
        t = random_spatial(1 + i % 3, rng)
        floor = spectral_range(t).half_range - 1e-9
        for lam in _fast_lambdas(t):
            assert lam >= floor
        if i % 8 == 0:
            mu = np.linalg.eigvalsh(one_body_adjust(t))
            frags = csa_greedy(t)
            l1, l2 = lambda_fermionic(mu, frags)
            assert l1 + l2 >= floor
            sr = l1 + sum(lambda_sqrt_fragment(f) for f in frags)
            assert sr >= floor


@pytest.mark.parametrize("variant", ["raw", "shifted", "residual"])
@pytest.mark.parametrize("molecule", MOLECULES)
def test_c4_bound_on_fixtures(runner, molecule, variant):
    report = runner.report(molecule, variant)
    floor = report.methods["de2"]["lambda"] - 1e-9
    for entry in report.methods.values():
        assert entry["lambda"] >= floor


def test_c4_minimal_lcu_on_random_tensors():
    rng = np.random.default_rng(7)
    for i in range(200):
        t = random_spatial(1 + i % 3, rng)
        gamma, coeff, up, um = minimal_lcu(t)
        h = dense_hamiltonian(t)
        dim = h.shape[0]
        assert np.max(np.abs(gamma * np.eye(dim) + coeff * (up + um) - h)) < 1e-9
        assert abs(2 * coeff - spectral_range(t).half_range) < 1e-12


def test_c4_minimal_lcu_on_smallest_fixture():
    # larger fixtures exceed the dense-unitary size cap
    t = chemist("h2")
    gamma, coeff, up, um = minimal_lcu(t)
    h = dense_hamiltonian(t)
    assert np.max(np.abs(gamma * np.eye(16) + coeff * (up + um) - h)) < 1e-9
    assert abs(2 * coeff - spectral_range(t).half_range) < 1e-12


# ---- criterion 5: oracle equivalences -------------------------------------


def test_c5_closed_form_matches_term_expansion():
    rng = np.random.default_rng(11)
    for i in range(100):
        t = random_spatial(1 + i % 3, rng)
        diff = lambda_pauli_closed_form(t) - lambda_pauli(jordan_wigner(t))
        assert abs(diff) < 1e-10


def test_c5_jw_matches_dense():
    rng = np.random.default_rng(12)
    for n in (1, 2):
        for _ in range(5):
            t = random_spatial(n, rng)
            h = jordan_wigner(t).to_matrix()
            assert np.max(np.abs(h - dense_hamiltonian(t))) < 1e-10


def test_c5_majorana_separation_matches_dense():
    rng = np.random.default_rng(13)
    for _ in range(5):
        t = random_spatial(2, rng)
        const, w, mp = majorana_separate(t)
        terms = {(): const}
        for s in (0, 1):
            for i in range(2):
                for j in range(2):
                    sign, key = MajoranaPolynomial.canonicalize(
                        ((2 * i + s, 0), (2 * j + s, 1))
                    )
                    terms[key] = terms.get(key, 0.0) + sign * w[i, j]
        for key, c in mp.terms.items():
            terms[key] = terms.get(key, 0.0) + c
        back = majorana_to_pauli(MajoranaPolynomial(4, terms)).to_matrix()
        assert np.max(np.abs(back - dense_hamiltonian(t))) < 1e-10


def test_c5_absorb_one_body_matches_dense():
    rng = np.random.default_rng(14)
    for _ in range(5):
        mu = rng.normal(size=2)
        u = np.linalg.qr(rng.normal(size=(2, 2)))[0]
        st = absorb_one_body(mu, u)
        # same operator written as a pure one-body tensor
        t = SpatialTensors(0.0, u @ np.diag(mu) @ u.T, np.zeros((2, 2, 2, 2)))
        assert np.max(np.abs(dense_hamiltonian(st) - dense_hamiltonian(t))) < 1e-10


def test_c5_apply_shift_matches_dense():
    rng = np.random.default_rng(15)
    ne = number_total(4)
    for _ in range(5):
        t = random_spatial(2, rng)
        shift = SymmetryShift(rng.normal(), rng.normal())
        ts = apply_shift(t, shift)
        expect = shift.s1 * ne + shift.s2 * (ne @ ne)
        assert np.max(np.abs(dense_hamiltonian(t) - dense_hamiltonian(ts) - expect)) < 1e-10


@pytest.mark.parametrize("molecule", MOLECULES)
def test_c5_df_reconstruction_on_fixtures(molecule):
    t = chemist(molecule)
    frags = double_factorize(t)
    back = sum(fragment_tensor(f) for f in frags)
    rel = np.linalg.norm((back - t.tbt).ravel()) / np.linalg.norm(t.tbt.ravel())
    assert rel < 1e-8


@pytest.mark.parametrize("molecule", MOLECULES)
def test_c5_csa_residual_on_fixtures(runner, molecule):
    runner.report(molecule, "raw")  # ensure the greedy run is on disk
    t = chemist(molecule)
    engine, _ = _engine_for(t, cache_dir=CACHE_DIR)
    frags = engine._gcsa()
    resid = t.tbt - sum(fragment_tensor(f) for f in frags)
    assert float(np.sqrt((resid * resid).sum())) <= 1e-6


# ---- criterion 6: inequalities and identities -----------------------------


def test_c6_grouping_never_exceeds_pauli():
    rng = np.random.default_rng(21)
    for i in range(100):
        t = random_spatial(2 + i % 2, rng)
        poly = jordan_wigner(t)
        assert sorted_insertion(poly).one_norm() <= lambda_pauli(poly) + 1e-9


def _random_fragment(rng, n):
    lam = rng.normal(size=(n, n))
    rot = make_rotation(rng.uniform(-0.5, 0.5, size=theta_dim(n)))
    return CsaFragment(rot, 0.5 * (lam + lam.T))


def test_c6_sqrt_cost_below_fermionic_cost():
    rng = np.random.default_rng(22)
    for _ in range(50):
        f = _random_fragment(rng, int(rng.integers(2, 5)))
        _, l2 = lambda_fermionic(np.zeros(1), [f])
        assert lambda_sqrt_fragment(f) <= l2 + 1e-9


def test_c6_complete_square_equals_sqrt_on_rank_one():
    rng = np.random.default_rng(23)
    for _ in range(50):
        n = int(rng.integers(2, 5))
        eps = rng.normal(size=n)
        sign = float(rng.choice([-1.0, 1.0]))
        rot = make_rotation(rng.uniform(-0.5, 0.5, size=theta_dim(n)))
        df = DfFragment(rot, eps, sign)
        csa = CsaFragment(rot, sign * np.outer(eps, eps))
        assert abs(lambda_complete_square(df) - lambda_sqrt_fragment(csa)) < 1e-10


def test_c6_one_body_norm_identical_under_both_costings():
    # with no two-body content both reflection costings reduce to sum |mu|
    rng = np.random.default_rng(24)
    obt = rng.normal(size=(3, 3))
    t = SpatialTensors(0.0, 0.5 * (obt + obt.T), np.zeros((3, 3, 3, 3)))
    engine, _ = _engine_for(t)
    f = engine.compute("gcsa-f")["lambda"]
    sr = engine.compute("gcsa-sr")["lambda"]
    mu = np.linalg.eigvalsh(one_body_adjust(t))
    assert f == sr == float(np.abs(mu).sum())


# ---- criterion 7: LP versus median ----------------------------------------


def test_c7_lp_matches_median_on_100_instances():
    rng = np.random.default_rng(31)
    for _ in range(100):
        m = int(rng.integers(2, 15))
        prob = L1Problem(
            rng.normal(size=m),
            np.full((1, m), rng.uniform(0.5, 2.0)),
            rng.uniform(0.2, 4.0, size=m),
        )
        _, f_med = solve_l1(prob, method="median")
        _, f_lp = solve_l1(prob, method="lp")
        assert abs(f_med - f_lp) < 1e-9


# ---- criterion 8: optimizer checks ----------------------------------------


def _fd_check(fun, x, grad, step=1e-6):
    fd = np.empty_like(x)
    for k in range(x.size):
        e = np.zeros_like(x)
        e[k] = step
        fd[k] = (fun(x + e) - fun(x - e)) / (2 * step)
    denom = max(1.0, float(np.linalg.norm(fd)))
    return float(np.linalg.norm(grad - fd)) / denom


def test_c8_csa_gradient_matches_finite_differences():
    rng = np.random.default_rng(41)
    n = 3
    target = random_spatial(n, rng).tbt
    dim = theta_dim(n) + _pack_dim(n)
    for _ in range(5):
        x = rng.uniform(-0.3, 0.3, size=dim)
        _, grad = _csa_cost_grad(x, target, n)
        fun = lambda y: _csa_cost_grad(y, target, n)[0]
        assert _fd_check(fun, x, grad) < 1e-4


def test_c8_split_gradient_matches_finite_differences():
    rng = np.random.default_rng(42)
    n = 3
    t = random_spatial(n, rng)
    dim = theta_dim(n) + n + _pack_dim(n)
    for _ in range(5):
        x = rng.uniform(-0.3, 0.3, size=dim)
        _, grad = _split_cost_grad(x, t, n)
        fun = lambda y: _split_cost_grad(y, t, n, want_grad=False)
        assert _fd_check(fun, x, grad) < 1e-4


def test_c8_bfgs_solves_quadratic():
    x, f, _ = minimize(lambda v: float((v[0] - 3.0) ** 2), np.array([10.0]))
    assert abs(x[0] - 3.0) < 1e-6 and f < 1e-10


def test_c8_bfgs_solves_rosenbrock():
    from lcunorm.optimize import OptimizerConfig

    def rosen(v):
        return float(100.0 * (v[1] - v[0] ** 2) ** 2 + (1.0 - v[0]) ** 2)

    cfg = OptimizerConfig(tol_grad=1e-10, max_iters=2000)
    x, f, _ = minimize(rosen, np.array([-1.2, 1.0]), cfg)
    assert np.max(np.abs(x - 1.0)) < 1e-6


# ---- count sanity (not value-gated): term and group tallies ----------------

PAULI_LOG2 = {
    "h2": (4, 4),
    "lih": (10, 10),
    "beh2": (10, 10),
    "h2o": (11, 11),
    "nh3": (12, 12),
}
AC_LOG2 = {
    "h2": (4, 5),
    "lih": (7, 7),
    "beh2": (8, 8),
    "h2o": (8, 8),
    "nh3": (9, 9),
}


@pytest.mark.parametrize("molecule", MOLECULES)
def test_counts_within_one_in_the_log(runner, molecule):
    for method, refs in (("pauli", PAULI_LOG2), ("ac", AC_LOG2)):
        for variant, ref in zip(("raw", "shifted"), refs[molecule]):
            got = runner.entry(molecule, variant, method)["log2_ceil"]
            assert abs(got - ref) <= 1, f"{method}/{variant}: {got} vs {ref}"
