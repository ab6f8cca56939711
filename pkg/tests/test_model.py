import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from povmopt import (
    InvalidStateError,
    ResourceError,
    StateModel,
    dephasing_model,
    model_from_json,
    qubit_bloch_model,
    tensor_power,
    validate,
)


def test_bloch_state_matrix():
    m = qubit_bloch_model((0.3, -0.2, 0.1))
    expected = 0.5 * np.array([[1.1, 0.3 + 0.2j], [0.3 - 0.2j, 0.9]])
    np.testing.assert_allclose(m.rho, expected, atol=1e-15)
    assert m.n_params == 3 and m.dim == 2


def test_bloch_derivatives_are_half_paulis():
    m = qubit_bloch_model((0.1, 0.0, 0.0), active=(1, 2))
    np.testing.assert_allclose(m.drho[0], [[0, 0.5], [0.5, 0]], atol=1e-15)
    np.testing.assert_allclose(m.drho[1], [[0, -0.5j], [0.5j, 0]], atol=1e-15)
    assert m.n_params == 2


def test_dephasing_is_diagonal():
    m = dephasing_model(0.3)
    np.testing.assert_allclose(m.rho, np.diag([0.3, 0.7]), atol=1e-15)
    assert m.n_params == 2


def test_bloch_vector_outside_ball_rejected():
    with pytest.raises(InvalidStateError):
        qubit_bloch_model((0.8, 0.8, 0.8))


def test_tensor_power_dimensions_and_leibniz():
    base = qubit_bloch_model((0.4, 0.0, 0.0), active=(1, 2))
    m2 = tensor_power(base, 2)
    assert m2.dim == 4 and m2.n_params == 2
    np.testing.assert_allclose(m2.rho, np.kron(base.rho, base.rho), atol=1e-15)
    for i in range(2):
        leibniz = np.kron(base.drho[i], base.rho) + np.kron(base.rho, base.drho[i])
        np.testing.assert_allclose(m2.drho[i], leibniz, atol=1e-15)


def test_tensor_power_respects_dim_cap(monkeypatch):
    monkeypatch.setenv("QEST_DIM_CAP", "8")
    base = qubit_bloch_model((0.0, 0.0, 0.0), active=(1, 2))
    tensor_power(base, 3)  # dim 8: allowed
    with pytest.raises(ResourceError):
        tensor_power(base, 4)


def test_validate_reports_broken_state():
    good = qubit_bloch_model((0.2, 0.1, 0.0))
    assert validate(good).ok
    bad = StateModel(
        dim=2,
        n_params=1,
        rho=np.array([[1.5, 0.0], [0.0, -0.5]]),
        drho=np.array([[[0.0, 0.5], [0.5, 0.0]]]),
        theta=np.array([0.0]),
        label="broken",
    )
    report = validate(bad)
    assert not report.ok and report.violations


def test_model_from_json_roundtrip():
    m = model_from_json({"family": "bloch", "theta": [0.25, 0, 0], "active": [1, 2], "copies": 2})
    assert m.dim == 4 and m.n_params == 2
    d = model_from_json('{"family": "dephasing", "theta": [0.3]}')
    np.testing.assert_allclose(d.rho, np.diag([0.3, 0.7]), atol=1e-15)
    with pytest.raises(InvalidStateError):
        model_from_json({"family": "nonsense"})


@settings(max_examples=50, deadline=None)
@given(st.lists(st.floats(-0.57, 0.57), min_size=3, max_size=3))
def test_random_bloch_models_validate(theta):
    assert validate(qubit_bloch_model(theta)).ok
