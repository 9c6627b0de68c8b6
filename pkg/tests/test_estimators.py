import numpy as np
import pytest
from sklearn.base import clone
from sklearn.exceptions import NotFittedError
from sklearn.pipeline import Pipeline

from covent import qmat as Q
from covent import states as S
from covent.estimators import (
    CovarianceEntanglement,
    LocalInvariants,
    SpinDispersion,
    check_density_batch,
)
from covent.exceptions import DimensionError, InvalidStateError


def _batch():
    return np.stack([S.bell().projector().mat, S.named_mixtures()["rho3"].mat])


def test_check_density_batch_forms(rng):
    single = check_density_batch(np.eye(4) / 4, (2, 2))
    assert len(single) == 1 and single[0].dims == (2, 2)
    listed = check_density_batch([S.bell().projector()])
    assert listed[0].dims == (2, 2)
    with pytest.raises(ValueError):
        check_density_batch([])
    with pytest.raises(InvalidStateError, match=r"X\[1\]"):
        check_density_batch([np.eye(2) / 2, np.eye(2)])
    with pytest.raises(DimensionError):
        check_density_batch([np.eye(2) / 2, np.eye(3) / 3])


def test_covariance_entanglement_transformer():
    est = CovarianceEntanglement(restarts=4)
    out = est.fit_transform(_batch())
    assert out.shape == (2, 1)
    assert out[0, 0] == pytest.approx(1, abs=1e-6)
    assert out[1, 0] == pytest.approx(0, abs=1e-6)


def test_params_round_trip():
    est = CovarianceEntanglement(dims=(3, 3), operators="equal-weight", measure="altcov")
    params = est.get_params()
    assert params["operators"] == "equal-weight" and params["measure"] == "altcov"
    twin = clone(est)
    assert twin.get_params() == params
    est.set_params(restarts=2)
    assert est.restarts == 2


def test_not_fitted_and_bad_params():
    with pytest.raises(NotFittedError):
        CovarianceEntanglement().transform(_batch())
    with pytest.raises(ValueError):
        CovarianceEntanglement(measure="var").fit(_batch())
    with pytest.raises(DimensionError):
        CovarianceEntanglement(dims=(2,)).fit(_batch())
    est = CovarianceEntanglement(restarts=1).fit(_batch())
    with pytest.raises(DimensionError):
        est.set_params(dims=(3, 3)).transform(np.eye(9)[None] / 9)


def test_local_invariants_in_pipeline(rng):
    X = np.stack([Q.random_density(rng, 4) for _ in range(5)])
    pipe = Pipeline([("inv", LocalInvariants())])
    out = pipe.fit_transform(X)
    assert out.shape == (5, 4)
    assert np.allclose(out[:, 3], 1 - out[:, 0] - out[:, 1] + out[:, 2], atol=1e-10)
    assert list(pipe.named_steps["inv"].get_feature_names_out()) == ["chi1", "chi2", "purity", "eps"]
    wide = LocalInvariants(dims=(2, 3)).fit_transform(Q.random_density(rng, 6)[None])
    assert np.isnan(wide[0, 3])


def test_spin_dispersion():
    X = np.array([[1, 0, 1], [1, 0, 0]]) / np.array([[np.sqrt(2)], [1]])
    out = SpinDispersion().fit_transform(X)
    assert out[:, 0] == pytest.approx([2, 1])
    with pytest.raises(DimensionError):
        SpinDispersion().fit(X).transform(np.array([[1, 0]]))
