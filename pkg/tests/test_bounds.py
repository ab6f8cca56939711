import numpy as np
import pytest

from povmopt import (
    NotApplicableError,
    StateModel,
    bound_report,
    check_optimality,
    dephasing_model,
    holevo_dinv,
    multi_restart,
    nh_bound,
    OptConfig,
    optimal_cfim_target,
    qubit_bloch_model,
    qubit_optimal_value,
    sld_bound,
    tensor_power,
)
from povmopt.analytic import trine_povm


def _origin2():
    return qubit_bloch_model((0, 0, 0), active=(1, 2))


def test_sld_bound_reference_values():
    assert sld_bound(_origin2()) == pytest.approx(2.0, abs=1e-12)
    assert sld_bound(qubit_bloch_model((0, 0, 0))) == pytest.approx(3.0, abs=1e-12)
    # additivity: M copies scale the bound by 1/M
    assert sld_bound(tensor_power(_origin2(), 2)) == pytest.approx(1.0, abs=1e-12)


def test_holevo_dephasing_closed_form():
    for eps in (0.1, 0.25, 0.5, 0.8):
        expected = 2.0 + 2.0 * abs(2.0 * eps - 1.0)
        assert holevo_dinv(dephasing_model(eps)) == pytest.approx(expected, abs=1e-10)
        assert holevo_dinv(tensor_power(dephasing_model(eps), 2)) == pytest.approx(expected / 2, abs=1e-10)


def test_holevo_symmetry_in_epsilon():
    for eps in (0.1, 0.3):
        assert holevo_dinv(dephasing_model(eps)) == pytest.approx(holevo_dinv(dephasing_model(1 - eps)), abs=1e-10)


def test_nh_frozen_reference_values():
    value, gap = nh_bound(_origin2())
    assert value == pytest.approx(4.0, abs=1e-5) and gap < 1e-7
    value, gap = nh_bound(qubit_bloch_model((0, 0, 0)))
    assert value == pytest.approx(9.0, abs=1e-5) and gap < 1e-7
    value, gap = nh_bound(tensor_power(_origin2(), 2))
    assert value == pytest.approx(1.5, abs=1e-5) and gap < 1e-7


def test_nh_three_copies_frozen_value():
    value, gap = nh_bound(tensor_power(_origin2(), 3))
    assert value == pytest.approx(0.9451682368, abs=1e-6)
    assert gap < 1e-7


def test_nh_matches_qubit_closed_form_off_origin():
    for r in (0.2, 0.5, 0.8):
        model = qubit_bloch_model((r, 0.0, 0.0), active=(1, 2))
        value, _ = nh_bound(model)
        assert value == pytest.approx(qubit_optimal_value(model), abs=1e-8)


def test_bound_ordering_chain():
    for model in (
        _origin2(),
        qubit_bloch_model((0.4, 0.2, 0.0)),
        dephasing_model(0.3),
        tensor_power(_origin2(), 2),
    ):
        s, h = sld_bound(model), holevo_dinv(model)
        n, _ = nh_bound(model)
        assert s <= h + 1e-9
        assert h <= n + 1e-7


def test_optimizer_dominates_nh():
    model = qubit_bloch_model((0.3, 0.0, 0.0), active=(1, 2))
    value, _ = nh_bound(model)
    result = multi_restart(model, OptConfig(K=3, restarts=3, seed=1, max_iters=1000, eps_stop=1e-12))
    assert result.final_objective >= value - 1e-8


def test_unitary_invariance_of_bounds():
    rng = np.random.default_rng(7)
    a = rng.standard_normal((2, 2)) + 1j * rng.standard_normal((2, 2))
    u, _ = np.linalg.qr(a)
    base = qubit_bloch_model((0.35, -0.1, 0.2))
    rotated = StateModel(
        dim=2,
        n_params=3,
        rho=u @ base.rho @ u.conj().T,
        drho=np.einsum("ab,ibc,dc->iad", u, base.drho, u.conj()),
        theta=base.theta,
        label="rotated",
    )
    assert sld_bound(rotated) == pytest.approx(sld_bound(base), abs=1e-10)
    assert holevo_dinv(rotated) == pytest.approx(holevo_dinv(base), abs=1e-10)
    nh_r, _ = nh_bound(rotated)
    nh_b, _ = nh_bound(base)
    assert nh_r == pytest.approx(nh_b, abs=1e-7)


def test_weighted_sld_bound():
    w = np.diag([3.0, 1.0])
    assert sld_bound(_origin2(), w) == pytest.approx(4.0, abs=1e-12)


def test_qubit_optimal_value_and_target():
    model = _origin2()
    assert qubit_optimal_value(model) == pytest.approx(4.0, abs=1e-12)
    target = optimal_cfim_target(model)
    np.testing.assert_allclose(target, np.eye(2) / 2, atol=1e-12)
    with pytest.raises(NotApplicableError):
        qubit_optimal_value(tensor_power(model, 2))


def test_check_optimality_trine():
    assert check_optimality(_origin2(), trine_povm(1.3)) < 1e-12


def test_bound_report_fields():
    report = bound_report(dephasing_model(0.4), which=("sld", "holevo"))
    assert report.sld_value == pytest.approx(2.0, abs=1e-10)
    assert report.holevo_value == pytest.approx(2.4, abs=1e-10)
    assert report.nh_value is None
    assert "sld" in report.to_json()
