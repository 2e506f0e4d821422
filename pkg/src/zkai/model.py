"""
Linear regression: least-squares fit, prediction, MSE claims and the
fixed-point encoding that turns real weights into field elements.

The model is ``y = b + sum_i w_i * x_i`` where the constant term and the
intercept of the usual textbook form are merged into one ``b``; they cannot
be told apart from data.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from pathlib import Path
from typing import Sequence

import numpy as np

from .data import Dataset, ScalerParams
from .errors import (DimensionError, InsufficientData, QuantizationOverflow,
                     SchemaError, SingularDesign)
from .field import P, FieldElement

DEFAULT_SCALE_BITS = 16
MAX_MAGNITUDE = 2.0 ** 30


@dataclass(frozen=True)
class LinearModel:
    feature_names: tuple[str, ...]
    weights: tuple[float, ...]
    intercept: float
    scaler: ScalerParams | None = None

    def __post_init__(self):
        if len(self.weights) != len(self.feature_names) or not self.weights:
            raise DimensionError("need one weight per feature and at least one feature")
        if not all(math.isfinite(v) for v in (*self.weights, self.intercept)):
            raise ValueError("model parameters must be finite")

    @property
    def n_features(self) -> int:
        return len(self.weights)


def fit(d: Dataset, scaler: ScalerParams | None = None) -> LinearModel:
    """Ordinary least squares through the normal equations."""
    n, k = d.features.shape
    if k < 1:
        raise SingularDesign("dataset has no features")
    if n < k + 1:
        raise InsufficientData(f"{n} rows cannot determine {k + 1} parameters")
    X = np.hstack([np.ones((n, 1)), d.features])
    if np.linalg.matrix_rank(X) < k + 1:
        raise SingularDesign("design matrix is rank deficient")
    gram = X.T @ X
    rhs = X.T @ d.target
    # LAPACK gesv: LU with partial pivoting
    beta = np.linalg.solve(gram, rhs)
    return LinearModel(d.feature_names, tuple(float(v) for v in beta[1:]),
                       float(beta[0]), scaler)


def predict(m: LinearModel, x: Sequence[float]) -> float:
    x = np.asarray(x, dtype=float).reshape(-1)
    if x.size != m.n_features:
        raise DimensionError(f"expected {m.n_features} inputs, got {x.size}")
    return m.intercept + float(np.dot(m.weights, x))


def predict_all(m: LinearModel, d: Dataset) -> np.ndarray:
    _check_columns(m, d)
    return m.intercept + d.features @ np.asarray(m.weights)


def _check_columns(m: LinearModel, d: Dataset):
    if tuple(d.feature_names) != tuple(m.feature_names):
        raise SchemaError(f"dataset columns {d.feature_names} do not match model "
                          f"features {m.feature_names}")


@dataclass(frozen=True)
class EvaluationClaim:
    dataset_digest: bytes
    mse: float
    quantized_mse: FieldElement

    def to_dict(self) -> dict:
        return {"dataset_digest": self.dataset_digest.hex(), "mse": self.mse,
                "quantized_mse": self.quantized_mse.to_hex()}


def evaluate_mse(m: LinearModel, d: Dataset,
                 scale_bits: int = DEFAULT_SCALE_BITS) -> EvaluationClaim:
    if d.n_rows == 0:
        raise InsufficientData("cannot evaluate on an empty dataset")
    resid = predict_all(m, d) - d.target
    mse = float(np.mean(resid ** 2))
    return EvaluationClaim(d.digest(), mse, quantize_value(mse, scale_bits))


# fixed-point encoding

def _check_bits(scale_bits: int):
    if not 8 <= scale_bits <= 32:
        raise ValueError(f"scale_bits must be in [8, 32], got {scale_bits}")


def quantize_value(v: float, scale_bits: int = DEFAULT_SCALE_BITS) -> FieldElement:
    """round-half-even(v * 2^bits), negatives as p - |scaled|."""
    if not math.isfinite(v) or abs(v) >= MAX_MAGNITUDE:
        raise QuantizationOverflow(f"|{v}| is not below 2^30")
    return FieldElement(round(v * 2 ** scale_bits) % P)


def dequantize_value(f: FieldElement | int, scale_bits: int = DEFAULT_SCALE_BITS) -> float:
    v = int(f) % P
    if v > P // 2:
        v -= P
    return v / 2 ** scale_bits


@dataclass(frozen=True)
class QuantizedModel:
    feature_names: tuple[str, ...]
    scale_bits: int
    weights: tuple[FieldElement, ...]
    intercept: FieldElement

    @property
    def n_features(self) -> int:
        return len(self.weights)


def quantize(m: LinearModel, scale_bits: int = DEFAULT_SCALE_BITS) -> QuantizedModel:
    _check_bits(scale_bits)
    return QuantizedModel(m.feature_names, scale_bits,
                          tuple(quantize_value(w, scale_bits) for w in m.weights),
                          quantize_value(m.intercept, scale_bits))


def dequantize(q: QuantizedModel, scaler: ScalerParams | None = None) -> LinearModel:
    return LinearModel(q.feature_names,
                       tuple(dequantize_value(w, q.scale_bits) for w in q.weights),
                       dequantize_value(q.intercept, q.scale_bits), scaler)


def quantize_inputs(x: Sequence[float], scale_bits: int = DEFAULT_SCALE_BITS) -> list[FieldElement]:
    _check_bits(scale_bits)
    return [quantize_value(float(v), scale_bits) for v in x]


def quantized_predict(q: QuantizedModel, xq: Sequence[FieldElement | int]) -> FieldElement:
    """Field-side inference; the result carries scale 2^(2 * scale_bits)."""
    if len(xq) != q.n_features:
        raise DimensionError(f"expected {q.n_features} inputs, got {len(xq)}")
    acc = q.intercept.value << q.scale_bits
    for w, x in zip(q.weights, xq):
        acc += w.value * (int(x) % P)
    return FieldElement(acc % P)


# artifact file

def save_model(m: LinearModel, path: str | Path, scale_bits: int = DEFAULT_SCALE_BITS):
    doc = {
        "feature_names": list(m.feature_names),
        "weights": list(m.weights),
        "intercept": m.intercept,
        "scaler": None if m.scaler is None else {
            "mins": list(m.scaler.mins), "maxs": list(m.scaler.maxs)},
        "scale_bits": scale_bits,
    }
    Path(path).write_text(json.dumps(doc, indent=2) + "\n")


def load_model(path: str | Path) -> tuple[LinearModel, int]:
    doc = json.loads(Path(path).read_text())
    names = tuple(doc["feature_names"])
    scaler = None
    if doc.get("scaler"):
        scaler = ScalerParams(names, tuple(doc["scaler"]["mins"]), tuple(doc["scaler"]["maxs"]))
    m = LinearModel(names, tuple(doc["weights"]), doc["intercept"], scaler)
    return m, int(doc.get("scale_bits", DEFAULT_SCALE_BITS))
