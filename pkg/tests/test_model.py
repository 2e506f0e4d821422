import random

import numpy as np
import pytest
from hypothesis import given, strategies as st

from zkai.data import Dataset, synthetic_dataset
from zkai.errors import (DimensionError, InsufficientData, QuantizationOverflow,
                         SingularDesign)
from zkai.field import P, FieldElement
from zkai.model import (LinearModel, dequantize_value, evaluate_mse, fit,
                        load_model, predict, quantize, quantize_inputs,
                        quantize_value, quantized_predict, save_model)


def normal_equations_oracle(x, y):
    X = np.hstack([np.ones((x.shape[0], 1)), x])
    return np.linalg.inv(X.T @ X) @ X.T @ y


def test_exact_line():
    x = np.linspace(0, 1, 11).reshape(-1, 1)
    m = fit(Dataset(("x",), x, 2 * x[:, 0] + 1, "y"))
    assert m.weights[0] == pytest.approx(2.0, abs=1e-9)
    assert m.intercept == pytest.approx(1.0, abs=1e-9)


def test_duplicated_columns_singular():
    x = np.random.default_rng(0).random((10, 1))
    with pytest.raises(SingularDesign):
        fit(Dataset(("a", "b"), np.hstack([x, x]), x[:, 0], "y"))


def test_too_few_rows():
    with pytest.raises(InsufficientData):
        fit(Dataset(("a", "b"), [[0.0, 1.0], [1.0, 0.0]], [1.0, 2.0], "y"))


def test_random_system_matches_oracle():
    rng = np.random.default_rng(11)
    x = rng.random((20, 3))
    y = rng.random(20)
    m = fit(Dataset(("a", "b", "c"), x, y, "y"))
    beta = normal_equations_oracle(x, y)
    assert m.intercept == pytest.approx(beta[0], abs=1e-8)
    assert np.allclose(m.weights, beta[1:], atol=1e-8, rtol=0)
    # residual gradient
    X = np.hstack([np.ones((20, 1)), x])
    grad = X.T @ (X @ np.array([m.intercept, *m.weights]) - y)
    assert np.linalg.norm(grad) <= 1e-8 * np.linalg.norm(X.T @ y)


@pytest.mark.parametrize("n", [1, 3, 10, 39])
def test_noiseless_recovery(n):
    d, w, b = synthetic_dataset(n, 4 * n + 10, seed=n)
    m = fit(d)
    assert np.max(np.abs(np.array(m.weights) - w)) <= 1e-6
    assert abs(m.intercept - b) <= 1e-6


def test_predict_constant_model():
    m = LinearModel(("a", "b"), (0.0, 0.0), 7.0)
    assert predict(m, [123.0, -4.0]) == 7.0


def test_predict_sum():
    assert predict(LinearModel(("a", "b"), (1.0, 1.0), 0.0), [2, 3]) == 5.0


def test_predict_loop_oracle(rng):
    for _ in range(20):
        n = rng.randint(1, 10)
        w = [rng.uniform(-5, 5) for _ in range(n)]
        x = [rng.uniform(-5, 5) for _ in range(n)]
        m = LinearModel(tuple(map(str, range(n))), tuple(w), 0.25)
        acc = 0.25
        for wi, xi in zip(w, x):
            acc += wi * xi
        assert predict(m, x) == pytest.approx(acc, abs=1e-12)


def test_predict_dimension():
    with pytest.raises(DimensionError):
        predict(LinearModel(("a",), (1.0,), 0.0), [1.0, 2.0])


def test_mse_exact_fit_is_zero():
    x = np.array([[0.0], [0.5], [1.0]])
    m = LinearModel(("x",), (2.0,), 1.0)
    assert evaluate_mse(m, Dataset(("x",), x, 2 * x[:, 0] + 1, "y")).mse == 0.0


def test_mse_constant_zero_model():
    m = LinearModel(("x",), (0.0,), 0.0)
    assert evaluate_mse(m, Dataset(("x",), [[3.0], [4.0]], [1.0, 1.0], "y")).mse == 1.0


def test_mse_loop_oracle_and_digest(rng):
    x = np.array([[rng.random(), rng.random()] for _ in range(15)])
    y = np.array([rng.random() for _ in range(15)])
    m = LinearModel(("a", "b"), (0.3, -1.2), 0.7)
    d = Dataset(("a", "b"), x, y, "y")
    expected = sum((0.7 + 0.3 * a - 1.2 * b - t) ** 2 for (a, b), t in zip(x, y)) / 15
    claim = evaluate_mse(m, d)
    assert claim.mse == pytest.approx(expected, abs=1e-10)
    assert len(claim.dataset_digest) == 32
    d2 = Dataset(("a", "b"), x, y + np.eye(1, 15).ravel() * 1e-9, "y")
    assert evaluate_mse(m, d2).dataset_digest != claim.dataset_digest


def test_mse_empty():
    m = LinearModel(("x",), (1.0,), 0.0)
    with pytest.raises(InsufficientData):
        evaluate_mse(m, Dataset(("x",), np.zeros((0, 1)), [], "y"))


def test_quantize_one():
    assert quantize_value(1.0, 16) == FieldElement(65536)


def test_quantize_negative_half():
    assert quantize_value(-0.5, 16) == FieldElement(P - 32768)


def test_quantize_half_even():
    assert quantize_value(0.5 / 2 ** 16, 16).value == 0
    assert quantize_value(1.5 / 2 ** 16, 16).value == 2


def test_quantize_roundtrip_random():
    r = random.Random(5)
    for _ in range(1000):
        v = r.uniform(-2 ** 29, 2 ** 29) if r.random() < 0.5 else r.uniform(-4, 4)
        assert abs(dequantize_value(quantize_value(v, 16), 16) - v) <= 2 ** -16


def test_quantize_overflow_and_bits():
    with pytest.raises(QuantizationOverflow):
        quantize_value(2.0 ** 30, 16)
    with pytest.raises(ValueError):
        quantize(LinearModel(("a",), (1.0,), 0.0), 40)


def test_model_file_roundtrip(tmp_path):
    from zkai.data import ScalerParams
    m = LinearModel(("a", "b"), (0.5, -2.0), 3.0, ScalerParams(("a", "b"), (0.0, 1.0), (2.0, 5.0)))
    save_model(m, tmp_path / "m.json", 16)
    back, bits = load_model(tmp_path / "m.json")
    assert back == m and bits == 16


@given(st.lists(st.floats(-10, 10), min_size=1, max_size=6), st.data())
def test_predict_linear_zero_intercept(w, data):
    m = LinearModel(tuple(map(str, range(len(w)))), tuple(w), 0.0)
    x1 = data.draw(st.lists(st.floats(-10, 10), min_size=len(w), max_size=len(w)))
    x2 = data.draw(st.lists(st.floats(-10, 10), min_size=len(w), max_size=len(w)))
    lhs = predict(m, np.add(x1, x2)) + m.intercept
    assert lhs == pytest.approx(predict(m, x1) + predict(m, x2), abs=1e-9)


@pytest.mark.parametrize("n", [1, 5, 20, 39])
def test_quantized_inference_error_bound(n):
    # descaled field prediction vs real prediction on the same real inputs
    rng = np.random.default_rng(100 + n)
    bits = 16
    for _ in range(50):
        m = LinearModel(tuple(map(str, range(n))), tuple(rng.uniform(-1, 1, n)), float(rng.uniform(-1, 1)))
        x = rng.uniform(0, 1, n)
        yq = quantized_predict(quantize(m, bits), quantize_inputs(x, bits))
        err = abs(dequantize_value(yq, 2 * bits) - predict(m, x))
        assert err <= 2 ** -(bits - 2) * (n + 1)
