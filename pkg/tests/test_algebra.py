import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from twinblob.algebra import (boundary_charge, boundary_element, charge_constant, check_blob,
                              check_centralizer_local, check_factorization, check_qgroup_relations,
                              make_params, perturbed_rep, qgroup_rep, theta_closed_form,
                              theta_product, tower, twin_rep, u_matrix, xxz_rep)
from twinblob.tensor import comm_residual, eq_residual, kron, leg_permute

from conftest import MUS, QS, TWIN_BOUNDARIES

SP = np.array([[0, 1], [0, 0]], dtype=complex)


def test_params_pi_over_3():
    p = make_params(np.pi / 3)
    assert p.q + 1 / p.q == pytest.approx(1.0)
    assert p.delta == pytest.approx(-1.0)
    assert p.r == pytest.approx(np.exp(11j * np.pi / 12))
    assert p.r_hat == pytest.approx(np.exp(5j * np.pi / 12))
    assert abs(p.r * p.r_hat + p.q) < 1e-12


def test_params_pi_over_2():
    p = make_params(np.pi / 2)
    assert p.q == pytest.approx(1j)
    assert abs(p.delta) < 1e-15


@pytest.mark.parametrize("mu", [0.0, np.pi, -2 * np.pi])
def test_degenerate_mu_rejected(mu):
    with pytest.raises(ValueError, match="mu"):
        make_params(mu)


@pytest.mark.parametrize("Q", [1j, -1j])
def test_degenerate_Q_rejected(Q):
    with pytest.raises(ValueError, match="Q"):
        make_params(0.7, Q)


@settings(max_examples=40, deadline=None)
@given(st.floats(0.05, 3.09), st.floats(-3.0, 3.0))
def test_r_rhat_product(mu, logQ):
    p = make_params(mu, np.exp(logQ))
    assert abs(p.r * p.r_hat + p.q) < 1e-12
    assert p.delta == -(p.q + 1 / p.q)


def test_kappa_table():
    p_i = make_params(0.7, 2.0, model="twin", boundary="i")
    p_ii = make_params(0.7, 2.0, model="twin", boundary="ii")
    p_plus = make_params(0.7, 2.0, model="twin", boundary="plus")
    assert p_plus.kappa == pytest.approx(p_i.kappa + p_ii.kappa)


def test_xxz_local_relations():
    p = make_params(0.7, 2.0)
    U = u_matrix(p.q)
    assert np.abs(U @ U - p.delta * U).max() < 1e-14
    assert np.trace(U) == pytest.approx(p.delta)
    M = boundary_element(p, "xxz-m")
    assert eq_residual(M @ M, p.delta_e * M) < 1e-14


def test_theta_constructions_agree():
    for mu in MUS:
        p = make_params(mu)
        A = theta_closed_form(p.r, p.r_hat)
        assert np.abs(theta_product(p.r, p.r_hat) - A).max() < 1e-14
        # U(1/r) on (1-, 2-) is U(r) on (2-, 1-)
        alt = leg_permute(kron(u_matrix(1 / p.r), u_matrix(p.r_hat)), [1, 3, 2, 4], 2)
        assert np.abs(alt - A).max() < 1e-14
        assert eq_residual(A @ A, p.delta * A) < 1e-14
        s = (p.r + 1 / p.r) * (p.r_hat + 1 / p.r_hat)
        assert s == pytest.approx(p.delta)


def test_closed_form_diagonal_entries():
    p = make_params(0.7)
    A = theta_closed_form(p.r, p.r_hat)
    assert A[3, 3] == -1j and A[12, 12] == 1j


@pytest.mark.parametrize("boundary", TWIN_BOUNDARIES)
def test_twin_boundary_elements(boundary):
    p = make_params(0.7, 2.0, model="twin", boundary=boundary)
    e = boundary_element(p)
    assert eq_residual(e @ e, p.delta_e * e) < 1e-13
    assert np.allclose(e, e.T)


@pytest.mark.parametrize("mu", MUS)
@pytest.mark.parametrize("Q", QS)
def test_check_blob_grid(mu, Q):
    p = make_params(mu, Q)
    reps = check_blob(xxz_rep(p, 4), tol=1e-10)
    for b in TWIN_BOUNDARIES:
        pt = make_params(mu, Q, model="twin", boundary=b)
        reps += check_blob(twin_rep(pt, 3, b), tol=1e-10)
    bad = [(r.check_id, r.residual) for r in reps if not r.passed]
    assert not bad


def test_check_blob_lists_every_relation():
    p = make_params(0.7, 2.0, model="twin", boundary="i")
    ids = {r.check_id for r in check_blob(twin_rep(p, 3, "i"))}
    assert ids == {f"algebra.{n}" for n in ("U_squared", "hecke_braid", "tl_UUU",
                                            "distant_commute", "e_squared", "blob_quadratic",
                                            "e_commutes_far", "U1_e_U1")} - {"algebra.distant_commute"}
    ids4 = {r.check_id for r in check_blob(twin_rep(p, 4, "i"))}
    assert "algebra.distant_commute" in ids4


def test_check_blob_wrong_kappa_detected():
    p = make_params(0.7, 2.0, model="twin", boundary="i")
    reps = check_blob(twin_rep(p, 3, "i"), kappa=p.kappa + 0.1)
    r = next(r for r in reps if r.check_id.endswith("U1_e_U1"))
    assert r.residual > 1e-3


def test_trivial_boundary_has_no_blob_generator():
    p = make_params(0.7, 2.0, model="twin", boundary="trivial")
    rep = twin_rep(p, 2, "trivial")
    assert rep.e_gen is None
    assert all(r.passed for r in check_blob(rep))


def test_rep_validation():
    p = make_params(0.7)
    with pytest.raises(ValueError):
        xxz_rep(p, 1)
    with pytest.raises(ValueError):
        xxz_rep(p, 2, "iii")
    with pytest.raises(ValueError):
        twin_rep(p, 2, "xxz-m")


def test_perturbed_rep_changes_one_entry():
    p = make_params(0.7, model="twin", boundary="i")
    rep = twin_rep(p, 2, "i")
    bad = perturbed_rep(rep, 1e-2)
    diff = bad.U_local - rep.U_local
    assert np.count_nonzero(diff) == 1 and diff[3, 6] == pytest.approx(1e-2)


def test_sigma1_H():
    p = make_params(0.7)
    H = qgroup_rep("sigma1", p).H
    assert np.allclose(H, np.diag([np.exp(1j * np.pi / 4), 1, 1, np.exp(-1j * np.pi / 4)]))


@pytest.mark.parametrize("name", ["rho", "sigma1", "sigma2", "rho1", "rho2"])
def test_local_qgroup_relations(name):
    rep = qgroup_rep(name, make_params(1.1))
    assert all(r.residual < 1e-12 for r in check_qgroup_relations(rep))


@pytest.mark.parametrize("name", ["rho", "sigma1", "sigma2", "rho1", "rho2"])
@pytest.mark.parametrize("N", [1, 2, 3])
def test_tower_relations(name, N):
    rep = qgroup_rep(name, make_params(0.7))
    if rep.d == 4 and N > 2:
        N = 2
    tw = tower(rep, N)
    assert all(r.residual < 1e-10 for r in check_qgroup_relations(tw))
    assert np.allclose(tw.H_N, kron(*([rep.H] * N)))


def test_tower_small_cases():
    p = make_params(0.7)
    rho = qgroup_rep("rho", p)
    t1 = tower(rho, 1)
    assert np.array_equal(t1.E_N, rho.E) and np.array_equal(t1.H_N, rho.H)
    qh = np.diag([p.q ** 0.5, p.q ** -0.5])
    expected = kron(np.linalg.inv(qh), SP) + kron(SP, qh)
    assert np.allclose(tower(rho, 2).E_N, expected)
    with pytest.raises(ValueError):
        tower(rho, 0)


def test_unknown_qgroup_rep():
    with pytest.raises(ValueError):
        qgroup_rep("tau", make_params(0.7))


def test_factorization_and_phase():
    reps, phase, misfit = check_factorization(make_params(0.7))
    gated = [r for r in reps if not r.notes.startswith("diagnostic")]
    assert all(r.passed for r in gated)
    # sigma1(H) sigma2(H) is not a scalar multiple of rho1(H) rho2(H) on any branch
    assert misfit > 0.1


def test_factorization_ratio_is_sign_pattern():
    p = make_params(0.7)
    s = qgroup_rep("sigma1", p).H @ qgroup_rep("sigma2", p).H
    r = qgroup_rep("rho1", p).H @ qgroup_rep("rho2", p).H
    ratio = np.diag(s) / np.diag(r)
    assert np.allclose(ratio, [1j, 1j, -1j, -1j])


def test_charge_constants():
    p = make_params(0.7, Q_rep=np.exp(0.7j))
    assert charge_constant("q", p) == pytest.approx(1.0)
    assert charge_constant("i", make_params(0.7, 1.0)) == 0
    with pytest.raises(ValueError):
        charge_constant("z", p)


def test_rho_charge_closed_form():
    p = make_params(0.7, 2.0)
    bc = boundary_charge(qgroup_rep("rho", p), p, 1)
    x = bc.x_const
    assert np.allclose(bc.Q_local, [[x * (p.q - 1), 1], [1, x * (1 / p.q - 1)]])


def test_rho_charge_commutes_with_M_only_at_x_q():
    # [Q(x), M] is affine in x; solve it and compare with the closed form
    p = make_params(0.7, 1.3 * np.exp(0.4j))
    rho = qgroup_rep("rho", p)
    M = boundary_element(p, "xxz-m")
    c0 = boundary_charge(rho, p, 1, x=0.0).Q_local
    c1 = boundary_charge(rho, p, 1, x=1.0).Q_local
    A = (c1 - c0) @ M - M @ (c1 - c0)
    b = c0 @ M - M @ c0
    x = -np.vdot(A.ravel(), b.ravel()) / np.vdot(A.ravel(), A.ravel())
    assert x == pytest.approx(charge_constant("q", p))
    assert comm_residual(boundary_charge(rho, p, 1).Q_local, M) < 1e-14


def test_mismatched_constant_rejected():
    p = make_params(0.7)
    with pytest.raises(ValueError):
        boundary_charge(qgroup_rep("sigma1", p), p, 2, kind="q")


def test_boundary_charge_coproduct():
    p = make_params(0.7, 2.0)
    rho = qgroup_rep("rho", p)
    b1 = boundary_charge(rho, p, 1)
    b3 = boundary_charge(rho, p, 3)
    H2 = rho.H @ rho.H
    I2 = np.eye(2)
    expected = kron(b1.Q_local, H2, H2) + kron(I2, b1.Q_local, H2) + kron(I2, I2, b1.Q_local)
    assert np.allclose(b3.Q_N, expected)


def test_centralizer_xxz_and_twin():
    p = make_params(0.7, 2.0)
    rep = xxz_rep(p, 3)
    assert all(r.residual < 1e-10 for r in check_centralizer_local(rep, [tower(qgroup_rep("rho", p), 3)]))
    pt = make_params(0.7, 2.0, model="twin", boundary="i")
    rt = twin_rep(pt, 2, "i")
    towers = [tower(qgroup_rep(n, pt), 2) for n in ("sigma1", "sigma2", "rho1", "rho2")]
    assert all(r.residual < 1e-10 for r in check_centralizer_local(rt, towers))


def test_centralizer_dimension_mismatch():
    p = make_params(0.7)
    with pytest.raises(ValueError):
        check_centralizer_local(xxz_rep(p, 3), [tower(qgroup_rep("rho", p), 2)])
