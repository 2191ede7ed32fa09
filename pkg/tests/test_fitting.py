import numpy as np
import pytest
from hypothesis import given, strategies as st

from qdcavity import fitting
from qdcavity.fitting import nlls_fit


def test_exact_line():
    x = np.arange(10.0)
    res = nlls_fit("linear", x, 2 * x + 1, [0.5, 0.0])
    assert res.converged
    assert res["slope"] == pytest.approx(2, abs=1e-10)
    assert res["intercept"] == pytest.approx(1, abs=1e-10)


def test_single_exponential_round_trip():
    t = np.linspace(0, 2, 200)
    res = nlls_fit("exponential", t, 1.3 * np.exp(-t / 0.27), [1.0, 0.5])
    assert res.converged
    assert res["tau"] == pytest.approx(0.27, rel=1e-3)


def test_biexponential_round_trip():
    t = np.linspace(0, 12, 1200)
    y = 4 * np.exp(-t / 0.27) + np.exp(-t / 2.5)
    res = nlls_fit("biexponential", t, y, [3.0, 0.4, 1.5, 2.0])
    assert res.converged
    assert res["tau1"] == pytest.approx(0.27, rel=0.02)
    assert res["tau2"] == pytest.approx(2.5, rel=0.02)


CASES = {
    "exponential": (np.linspace(0, 3, 150), [2.0, 0.7], [1.5, 1.0]),
    "biexponential": (np.linspace(0, 10, 500), [3.0, 0.3, 1.0, 3.0], [2.0, 0.5, 1.5, 2.0]),
    "lorentzian": (np.linspace(-1, 1, 301), [5.0, 0.1, 0.2, 0.3], [4.0, 0.05, 0.25, 0.0]),
    "gaussian": (np.linspace(0, 4, 200), [1.0, 2.0, 0.4], [0.8, 1.8, 0.6]),
}


@pytest.mark.parametrize("name", sorted(CASES))
def test_noiseless_recovery_all_models(name):
    x, truth, guess = CASES[name]
    model = fitting.get_model(name)
    res = nlls_fit(name, x, model(x, truth), guess)
    assert res.converged
    for k, v in zip(model.param_names, truth):
        assert res[k] == pytest.approx(v, rel=1e-4)


@given(st.floats(0.05, 5.0), st.floats(0.2, 5.0))
def test_exponential_recovery_property(tau, amp):
    x = np.linspace(0, 5 * tau, 100)
    res = nlls_fit("exponential", x, amp * np.exp(-x / tau), [1.0, 1.0 * tau * 1.5])
    assert res["tau"] == pytest.approx(tau, rel=1e-4)
    assert res["amplitude"] == pytest.approx(amp, rel=1e-4)


def test_cost_decreases_monotonically(rng):
    x = np.linspace(0, 4, 200)
    y = fitting.get_model("gaussian")(x, [1.0, 2.0, 0.4]) + 0.01 * rng.normal(size=x.size)
    res = nlls_fit("gaussian", x, y, [0.5, 1.5, 1.0])
    assert res.converged
    hist = np.asarray(res.cost_history)
    assert np.all(np.diff(hist) <= 0)


def test_nonconvergence_is_reported_not_raised():
    x = np.linspace(0, 4, 200)
    y = fitting.get_model("gaussian")(x, [1.0, 2.0, 0.4])
    res = nlls_fit("gaussian", x, y, [0.5, 1.0, 1.0], max_iter=2)
    assert not res.converged
    assert res.iterations == 2
    assert "converged = false" in res.report()


def test_rank_deficiency():
    x = np.linspace(0, 1, 20)
    # b never enters the model, so its Jacobian column vanishes
    model = fitting.Model("dead", ("a", "b"), lambda x, a, b: a * x)
    with pytest.raises(fitting.RankDeficiencyError):
        nlls_fit(model, x, 2 * x, [1.0, 1.0])


def test_preconditions():
    x = np.linspace(0, 1, 4)
    with pytest.raises(ValueError):
        nlls_fit("linear", x, x, [1.0, 0.0])
    x = np.linspace(0, 1, 10)
    with pytest.raises(ValueError):
        nlls_fit("linear", x, x, [np.nan, 0.0])
    with pytest.raises(ValueError):
        nlls_fit("linear", x, x, [1.0])
    with pytest.raises(ValueError):
        fitting.get_model("nope")


def test_bounds_are_respected():
    x = np.linspace(0, 3, 100)
    res = nlls_fit("exponential", x, 2 * np.exp(-x / 0.5), [1.0, 1.0], bounds=([0, 0.8], [10, 10]))
    assert res["tau"] >= 0.8


def test_dict_initial_and_report():
    x = np.arange(10.0)
    res = nlls_fit("linear", x, 3 * x - 1, {"slope": 1.0, "intercept": 0.0})
    text = res.report()
    lines = dict(line.split(" = ", 1) for line in text.strip().splitlines())
    assert lines["model"] == "linear"
    assert float(lines["slope"]) == pytest.approx(3.0)
    assert lines["converged"] == "true"


def test_deterministic():
    x = np.linspace(0, 10, 400)
    y = 3 * np.exp(-x / 0.3) + np.exp(-x / 3.0)
    a = nlls_fit("biexponential", x, y, [2.0, 0.5, 1.0, 2.0])
    b = nlls_fit("biexponential", x, y, [2.0, 0.5, 1.0, 2.0])
    assert a.params == b.params and a.iterations == b.iterations
