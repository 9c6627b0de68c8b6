import numpy as np
import pytest
from hypothesis import given, settings as hsettings, strategies as st

import oracles
from covent import correlation as C
from covent import entangle as E
from covent import qmat as Q
from covent import states as S
from covent.exceptions import DimensionError, InvalidStateError

FAST = E.OptimizerSettings(restarts=4, seed=0)
seeds = st.integers(0, 2**31 - 1)


def test_pair_discrimination_operator():
    assert np.allclose(E.pair_discrimination_operator(2), Q.SIGMA_Z)
    assert np.allclose(np.diag(E.pair_discrimination_operator(4)), [1, -1, 0, 0])
    for d in range(2, 6):
        op = E.pair_discrimination_operator(d, (d - 1, 0))
        assert abs(np.trace(op)) == 0
        assert set(np.diag(op).real) <= {1.0, -1.0, 0.0}
    with pytest.raises(ValueError):
        E.pair_discrimination_operator(3, (1, 1))
    with pytest.raises(ValueError):
        E.pair_discrimination_operator(1)


def test_equal_weight_operator():
    assert np.allclose(E.equal_weight_operator(2), np.diag([-1, 1]))
    w = np.exp(2j * np.pi / 3)
    assert np.allclose(np.diag(E.equal_weight_operator(3)), [w, w * w, 1])
    for d in range(2, 8):
        op = E.equal_weight_operator(d)
        assert abs(np.trace(op)) < 1e-12
        assert Q.is_unitary(op)


def test_named_operator_errors():
    with pytest.raises(DimensionError):
        E.named_operator("sigma3", 3)
    with pytest.raises(ValueError):
        E.named_operator("bogus", 2)


def test_local_operator_embedding():
    a = E.LocalOperator(1, Q.SIGMA_X, 3)
    b = E.LocalOperator(2, Q.SIGMA_Z, 2)
    assert a.dims == (2, 3) and b.dims == (2, 2)
    assert np.allclose(a.embedded, np.kron(Q.SIGMA_X, np.eye(3)))
    with pytest.raises(ValueError):
        E.local_pair(b, a, (2, 2))
    with pytest.raises(DimensionError):
        E.local_pair(Q.SIGMA_X, np.eye(3), (2, 2))


def test_local_unitary_identity(rng):
    rho = S.DensityMatrix(Q.random_density(rng, 6), (2, 3))
    assert np.allclose(E.LocalUnitary.identity((2, 3)).apply(rho).mat, rho.mat)


@pytest.mark.parametrize("measure", E.MEASURES)
@pytest.mark.parametrize("dims", [(2, 2), (2, 3), (3, 2), (3, 3)])
def test_kernel_matches_direct_evaluation(rng, measure, dims):
    d1, d2 = dims
    rho = S.DensityMatrix(Q.random_density(rng, d1 * d2), dims)
    a = rng.normal(size=(d1, d1)) + 1j * rng.normal(size=(d1, d1))
    b = rng.normal(size=(d2, d2)) + 1j * rng.normal(size=(d2, d2))
    u = E.random_local_unitary(rng, dims)
    direct = E.local_covariance(rho, a, b, u, measure)
    kernel = E.covariance_kernel(rho, measure)
    via = E._kernel_value(kernel, Q.adjoint(u.u1) @ a @ u.u1, Q.adjoint(u.u2) @ b @ u.u2)
    assert abs(direct - via) < 1e-12
    fn = oracles.cov if measure == "cov" else oracles.alt_cov
    ae, be = np.kron(a, np.eye(d2)), np.kron(np.eye(d1), b)
    assert abs(direct - fn(u.apply(rho).mat, ae, be)) < 1e-12


def test_kernel_rejects_unknown_measure():
    with pytest.raises(ValueError):
        E.covariance_kernel(S.bell().projector(), "variance")


def test_state_without_bipartition():
    with pytest.raises(DimensionError):
        E.covariance_entanglement(np.eye(4) / 4, Q.SIGMA_Z, Q.SIGMA_Z)
    res = E.covariance_entanglement(np.eye(4) / 4, Q.SIGMA_Z, Q.SIGMA_Z, dims=(2, 2), settings=FAST)
    assert res.max_value < 1e-12


def test_optimizer_is_deterministic():
    rho = S.named_mixtures()["rho2"]
    r1 = E.covariance_entanglement(rho, Q.SIGMA_Z, Q.SIGMA_Z, settings=FAST)
    r2 = E.covariance_entanglement(rho, Q.SIGMA_Z, Q.SIGMA_Z, settings=FAST)
    assert r1.max_value == r2.max_value and r1.history == r2.history
    assert len(r1.history) == FAST.restarts
    assert r1.max_value == max(r1.history)


def test_optimization_result_dict():
    res = E.covariance_entanglement(S.bell().projector(), Q.SIGMA_Z, Q.SIGMA_Z, settings=FAST)
    d = res.as_dict()
    assert d["max_value_sq"] == pytest.approx(d["max_value"] ** 2)
    assert Q.is_unitary(res.optimizer.u1) and Q.is_unitary(res.optimizer.u2)
    # the returned orientation reproduces the value
    direct = E.local_covariance(S.bell().projector(), Q.SIGMA_Z, Q.SIGMA_Z, res.optimizer)
    assert abs(abs(direct) - res.max_value) < 1e-9


def test_settings_validation():
    with pytest.raises(ValueError):
        E.OptimizerSettings(restarts=0)
    with pytest.raises(ValueError):
        E.OptimizerSettings(tol=0)


def test_max_matches_two_qubit_oracle(rng):
    for _ in range(3):
        rho = S.DensityMatrix(Q.random_density(rng, 4), (2, 2))
        res = E.covariance_entanglement(rho, Q.SIGMA_Z, Q.SIGMA_Z, settings=FAST)
        assert abs(res.max_value - oracles.max_sigma_cov(rho.mat)) < 1e-6


@hsettings(max_examples=5)
@given(seeds)
def test_pure_states_cov_and_altcov_maxima_agree(seed):
    rng = np.random.default_rng(seed)
    rho = S.PureState(Q.random_ket(rng, 4), (2, 2)).projector()
    a = E.covariance_entanglement(rho, Q.SIGMA_Z, Q.SIGMA_Z, "cov", FAST).max_value
    b = E.covariance_entanglement(rho, Q.SIGMA_Z, Q.SIGMA_Z, "altcov", FAST).max_value
    assert abs(a - b) < 2e-6


@hsettings(max_examples=5)
@given(seeds)
def test_altcov_maximum_bounded_by_purity(seed):
    rng = np.random.default_rng(seed)
    rho = S.DensityMatrix(Q.random_density(rng, 4), (2, 2))
    op = E.equal_weight_operator(2)
    res = E.covariance_entanglement(rho, op, op, "altcov", FAST)
    assert res.max_value <= rho.purity + 1e-10


@hsettings(max_examples=5)
@given(seeds)
def test_local_unitary_invariance(seed):
    rng = np.random.default_rng(seed)
    rho = S.DensityMatrix(Q.random_density(rng, 4), (2, 2))
    moved = E.random_local_unitary(rng, (2, 2)).apply(rho)
    a = E.covariance_entanglement(rho, Q.SIGMA_Z, Q.SIGMA_Z, settings=FAST).max_value
    b = E.covariance_entanglement(moved, Q.SIGMA_Z, Q.SIGMA_Z, settings=FAST).max_value
    assert abs(a - b) < 2 * 1e-6


def test_product_state_zero_variance_orientation(rng):
    psi = np.kron(Q.random_ket(rng, 2), Q.random_ket(rng, 3))
    rho = S.PureState(psi, (2, 3)).projector()
    assert E.minimize_local_variance(rho, Q.SIGMA_X, side=1) < 1e-6
    assert E.minimize_local_variance(rho, E.equal_weight_operator(3).real, side=2) < 1e-6
    with pytest.raises(DimensionError):
        E.minimize_local_variance(rho, np.eye(3), side=1)


def test_unequal_dims_product_state_is_zero():
    b = np.diag(np.exp(2j * np.pi * np.arange(3) / 3))
    prod = S.PureState(np.kron([1, 0], [0, 1, 0]), (2, 3)).projector()
    assert abs(C.cov(prod, np.kron(np.diag([1, -1]), np.eye(3)), np.kron(np.eye(2), b))) < 1e-15


def test_unequal_dims_small_run():
    res = E.max_cov_unequal_dims(2, 3, E.OptimizerSettings(restarts=8, seed=0))
    assert res.max_value < 1 - 1e-3
    assert res.extras["gap"] == pytest.approx(1 - res.max_value)
    assert res.state.dims == (2, 3)
    with pytest.raises(ValueError):
        E.max_cov_unequal_dims(3, 2)


def test_lgm_channel_structure():
    ch = E.lgm_channel()
    assert len(ch.ops) == 8
    s = sum(Q.adjoint(v) @ v for v in ch.ops)
    gamma = s[0, 0].real
    assert np.allclose(s, gamma * np.eye(4), atol=1e-10)
    assert ch.completeness == pytest.approx(gamma)
    assert gamma == pytest.approx(1)


def test_identity_and_projector_channels(rng):
    rho = S.DensityMatrix(Q.random_density(rng, 3))
    assert np.allclose(E.apply_channel(rho, E.KrausChannel((np.eye(3),))).mat, rho.mat)
    projectors = tuple(np.diag(np.eye(3)[k]) for k in range(3))
    out = E.apply_channel(S.maximally_mixed(3), E.KrausChannel(projectors))
    assert np.allclose(out.mat, np.eye(3) / 3)


def test_channel_errors():
    with pytest.raises(ValueError):
        E.KrausChannel((np.array([[1, 0], [0, 0]]),))
    with pytest.raises(ValueError):
        E.KrausChannel(())
    half = E.KrausChannel((np.eye(2) / 2,))
    with pytest.raises(InvalidStateError):
        E.apply_channel(np.eye(2) / 2, half)
    assert np.allclose(E.apply_channel(np.eye(2) / 2, half, renormalize=True).mat, np.eye(2) / 2)
    with pytest.raises(DimensionError):
        E.apply_channel(np.eye(3) / 3, half)


def test_separable_audit_examples():
    up, down = np.diag([1.0, 0.0]), np.diag([0.0, 1.0])
    assert E.separable_mixture_altcov_audit([(0.5, up, up), (0.5, down, down)], Q.SIGMA_Z, Q.SIGMA_Z) < 1e-15
    out = S.named_mixtures()["lgm_output"]
    val = C.alt_cov(out, np.kron(Q.SIGMA_Y, np.eye(2)), np.kron(np.eye(2), Q.SIGMA_Y))
    assert abs(val - oracles.alt_cov(out.mat, np.kron(Q.SIGMA_Y, np.eye(2)), np.kron(np.eye(2), Q.SIGMA_Y))) < 1e-14
    assert abs(val) > 1e-3
    plus = np.full((2, 2), 0.5)
    terms = [(0.5, up, up), (0.5, plus, plus)]
    assert not E.has_orthogonal_local_projectors(terms)
    assert E.separable_mixture_altcov_audit(terms, Q.SIGMA_Y, Q.SIGMA_Y) > 1e-3


def test_scans_shapes_and_endpoints():
    pf = E.pure_family_scan(11)
    assert set(pf) == {"x", "abs_cov", "abs_alt_cov", "var_a"}
    assert np.allclose(pf["abs_cov"], pf["abs_alt_cov"], atol=1e-12)
    rot = E.bell_rotation_scan(5)
    assert set(rot) == {"theta", "abs_cov_x", "abs_alt_cov_x", "abs_cov_y", "abs_alt_cov_y"}
    assert rot["abs_cov_x"][0] == pytest.approx(1)
    for k in rot:
        assert len(rot[k]) == 5 and np.all(np.isfinite(rot[k]))
