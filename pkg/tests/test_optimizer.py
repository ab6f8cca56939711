import numpy as np
import pytest

from povmopt import (
    InitFailureError,
    KrausEnsemble,
    OptConfig,
    find_min_outcomes,
    gradient_terms,
    kraus_from_povm,
    lagrange_multiplier,
    line_search,
    max_useful_k,
    multi_restart,
    objective,
    povm_from_kraus,
    qubit_bloch_model,
    random_kraus_init,
    run,
    step,
    tensor_power,
)
from povmopt.analytic import trine_povm


def _origin2():
    return qubit_bloch_model((0, 0, 0), active=(1, 2))


def test_max_useful_k_caratheodory_counts():
    assert max_useful_k(2, 2) == 9
    assert max_useful_k(2, 3) == 15
    assert max_useful_k(4, 2) == 16


def _directional_derivative_check(model, seed):
    ke = random_kraus_init(model.dim, 4, seed=seed)
    xs = gradient_terms(model, ke)
    lam = lagrange_multiplier(ke, xs)
    h = ke.factors @ (xs - lam)
    norm = np.sqrt(np.einsum("kab,kab->", h.conj(), h).real)
    analytic = -2.0 * norm**2
    # step scaled so the quadratic term stays below the linear one
    delta = 1e-6 / max(norm, 1.0)
    f_p = objective(model, povm_from_kraus(KrausEnsemble(ke.factors + delta * h)))
    f_m = objective(model, povm_from_kraus(KrausEnsemble(ke.factors - delta * h)))
    return abs(analytic - (f_p - f_m) / (2 * delta)) / abs(analytic)


def test_gradient_matches_finite_differences():
    models = {2: _origin2(), 4: tensor_power(_origin2(), 2)}
    for trial in range(50):
        model = models[2 if trial % 2 == 0 else 4]
        assert _directional_derivative_check(model, 1000 + trial) < 1e-5


def test_step_with_zero_alpha_is_identity():
    ke = random_kraus_init(2, 3, seed=0)
    xs = gradient_terms(_origin2(), ke)
    lam = lagrange_multiplier(ke, xs)
    moved = step(ke, xs, lam, 0.0)
    np.testing.assert_allclose(moved.factors, ke.factors, atol=1e-12)


def test_line_search_never_degrades():
    model = _origin2()
    ke = random_kraus_init(2, 3, seed=2)
    f0 = objective(model, povm_from_kraus(ke))
    xs = gradient_terms(model, ke)
    lam = lagrange_multiplier(ke, xs)
    alpha, f_new, new_ke = line_search(model, ke, xs, lam, OptConfig(K=3).alpha_candidates)
    assert f_new <= f0 + 1e-12


def test_trine_is_stationary():
    model = _origin2()
    ke = kraus_from_povm(trine_povm(0.2))
    xs = gradient_terms(model, ke)
    lam = lagrange_multiplier(ke, xs)
    h = ke.factors @ (xs - lam)
    # the rank-deficient matrix square root in kraus_from_povm injects
    # ~sqrt(eps) noise into the factors; the descent rate -2 sum ||H_k||^2
    # is the meaningful stationarity measure and sits at machine precision
    assert 2.0 * np.einsum("kab,kab->", h.conj(), h).real < 1e-13


def test_monotone_descent_and_completeness():
    model = _origin2()
    for seed in range(25):
        result = run(model, OptConfig(K=3, max_iters=60, seed=seed))
        trace = np.asarray(result.objective_trace)
        assert (np.diff(trace) <= 1e-9).all()
        s = result.final_povm.elements.sum(axis=0)
        assert np.abs(s - np.eye(2)).max() < 1e-10


def test_run_is_deterministic():
    model = _origin2()
    a = run(model, OptConfig(K=3, max_iters=80, seed=11))
    b = run(model, OptConfig(K=3, max_iters=80, seed=11))
    assert a.objective_trace == b.objective_trace
    np.testing.assert_array_equal(a.final_povm.elements, b.final_povm.elements)


def test_multi_restart_converges_to_reference_value():
    result = multi_restart(_origin2(), OptConfig(K=3, restarts=5, seed=7, max_iters=2000, eps_stop=1e-12))
    assert result.final_objective == pytest.approx(4.0, abs=1e-6)


def test_too_few_outcomes_fails():
    with pytest.raises(InitFailureError):
        multi_restart(_origin2(), OptConfig(K=2, restarts=3, seed=0, max_iters=50))


def test_find_min_outcomes_two_param_origin():
    k_star, povm = find_min_outcomes(_origin2(), OptConfig(K=6, restarts=5, seed=7, max_iters=2000, eps_stop=1e-12))
    assert k_star == 3
    assert povm.n_outcomes == 3


def test_config_json_roundtrip():
    cfg = OptConfig(K=5, max_iters=300, eps_stop=1e-9, restarts=4, seed=42, prune_tau=1e-5)
    back = OptConfig.from_json(cfg.to_json())
    assert back == cfg


def test_config_validation():
    with pytest.raises(ValueError):
        OptConfig(K=0)
    with pytest.raises(ValueError):
        OptConfig(K=3, eps_stop=-1.0)


def test_run_report_fields():
    result = run(_origin2(), OptConfig(K=3, max_iters=40, seed=1))
    assert result.stop_reason in {"converged", "max_iters"}
    assert result.iterations_used <= 40
    assert len(result.objective_trace) == result.iterations_used + 1
    assert result.final_objective == pytest.approx(result.objective_trace[-1])
