import json

import numpy as np
import pytest
from hypothesis import given, strategies as st

from covent import qmat as Q
from covent import states as S
from covent.exceptions import DimensionError, InvalidStateError


def test_density_matrix_validation():
    with pytest.raises(InvalidStateError):
        S.DensityMatrix(np.array([[1, 1], [0, 0]]))
    with pytest.raises(InvalidStateError):
        S.DensityMatrix(np.eye(2))
    with pytest.raises(InvalidStateError):
        S.DensityMatrix(np.diag([1.5, -0.5]))
    with pytest.raises(DimensionError):
        S.DensityMatrix(np.eye(4) / 4, (2, 3))


def test_density_matrix_is_read_only():
    rho = S.maximally_mixed(2)
    with pytest.raises(ValueError):
        rho.mat[0, 0] = 1


def test_pure_state_norm():
    with pytest.raises(InvalidStateError):
        S.PureState([1, 1])
    with pytest.raises(InvalidStateError):
        S.PureState.normalized([0, 0])
    p = S.PureState.normalized([3, 4])
    assert abs(np.linalg.norm(p.amplitudes) - 1) < 1e-15


def test_bell_states_are_orthonormal():
    kets = [S.bell(k).amplitudes for k in ("phi+", "phi-", "psi+", "psi-")]
    gram = np.array([[np.vdot(a, b) for b in kets] for a in kets])
    assert np.allclose(gram, np.eye(4))
    assert np.allclose(S.bell("00").amplitudes, S.bell("psi-").amplitudes)
    with pytest.raises(ValueError):
        S.bell("nope")


def test_bell_reductions_are_maximally_mixed():
    rho = S.bell("phi+").projector()
    assert np.allclose(rho.reduced(1).mat, np.eye(2) / 2)
    assert np.allclose(rho.reduced(2).mat, np.eye(2) / 2)


def test_named_mixtures_literal_prefactors():
    cat = S.named_mixtures()
    assert np.allclose(cat["rho2"].mat[[0, 0, 3, 3], [0, 3, 0, 3]], [0.75, 0.25, 0.25, 0.25])
    assert np.allclose(np.diag(cat["counterexample"].mat), [0.25, 0.25, 0.25, 0.25])
    assert abs(cat["lgm_output"].mat[0, 0] - 0.625) < 1e-15
    for rho in cat.values():
        assert rho.dims == (2, 2)


def test_named_state_lookup():
    assert S.named_state("maxcorr3").dims == (3, 3)
    assert S.named_state("twoterm4").purity == pytest.approx(1)
    with pytest.raises(ValueError, match="unknown state"):
        S.named_state("rho9")


def test_from_kets_requires_unit_trace():
    with pytest.raises(InvalidStateError):
        S.from_kets([(1.0, [1, 1])])


def test_mix_rejects_bad_weights():
    a = S.maximally_mixed(2)
    with pytest.raises(InvalidStateError):
        S.mix([(0.5, a), (0.6, a)])
    with pytest.raises(InvalidStateError):
        S.mix([(-0.5, a), (1.5, a)])
    with pytest.raises(DimensionError):
        S.mix([(0.5, a), (0.5, S.maximally_mixed(3))])


def test_json_round_trip(rng):
    rho = S.DensityMatrix(Q.random_density(rng, 6), (2, 3))
    back = S.loads(json.dumps(S.to_json_dict(rho)))
    assert back.dims == (2, 3)
    assert np.array_equal(back.mat, rho.mat)


def test_json_errors_name_location():
    with pytest.raises(InvalidStateError, match=r"line 2, column"):
        S.loads('{"matrix":\n [[1, 0], [0, 0]')
    with pytest.raises(InvalidStateError, match=r"matrix\[1\]\[0\]"):
        S.loads('{"matrix": [[1, 0], ["x", 0]]}')
    with pytest.raises(InvalidStateError, match="dims"):
        S.loads('{"dims": [2], "matrix": [[1, 0], [0, 0]]}')
    with pytest.raises(InvalidStateError, match="missing"):
        S.loads("{}")


def test_load_reports_path(tmp_path):
    p = tmp_path / "bad.json"
    p.write_text('{"matrix": [[2]]}')
    with pytest.raises(InvalidStateError, match="bad.json"):
        S.load(p)


@given(st.integers(1, 6), st.integers(0, 2**31 - 1))
def test_purity_bounds(d, seed):
    rho = S.DensityMatrix(Q.random_density(np.random.default_rng(seed), d))
    assert 1 / d - 1e-12 <= rho.purity <= 1 + 1e-12


@given(st.floats(0, np.pi), st.integers(0, 2**31 - 1))
def test_conjugation_preserves_spectrum(x, seed):
    rng = np.random.default_rng(seed)
    rho = S.pure_family(x).projector()
    moved = rho.conjugate_by(Q.random_unitary(rng, 4))
    assert np.allclose(moved.eigvals(), rho.eigvals(), atol=1e-10)
    assert moved.dims == (2, 2)
