"""Weighted L2-regularized logistic regression on a from-scratch L-BFGS optimizer.

Objective (labels original=0 / translated=1 mapped to -1/+1):

    F(beta, b) = 0.5 * ||beta||^2 + C * sum_i w_i * log(1 + exp(-y_i * (x_i.beta + b)))

with the intercept unpenalized and w_i the product of the per-class weight and
the caller's sample weight. C multiplies the data term (inverse regularization).
"""

from __future__ import annotations

import json
from dataclasses import dataclass, asdict
from typing import Optional, Union

import numpy as np
from scipy import sparse
from scipy.special import expit

Matrix = Union[np.ndarray, sparse.spmatrix]

_LBFGS_HISTORY = 10
_ARMIJO_C1 = 1e-4
_BACKTRACK = 0.5
_MAX_BACKTRACKS = 60


@dataclass(frozen=True)
class TrainConfig:
    C: float = 10.0
    max_iter: int = 2000
    tol: float = 1e-6
    class_weight: str = "balanced"
    seed: int = 0

    def __post_init__(self):
        if self.C <= 0:
            raise ValueError("C must be positive")
        if self.max_iter < 1:
            raise ValueError("max_iter must be >= 1")
        if self.tol <= 0:
            raise ValueError("tol must be positive")
        if self.class_weight not in ("balanced", "none"):
            raise ValueError("class_weight must be 'balanced' or 'none'")


@dataclass
class TrainedModel:
    coefficients: np.ndarray
    intercept: float
    config: TrainConfig
    converged: bool
    final_objective: float
    n_iter: int = 0


def class_weight_per_sample(y: np.ndarray, mode: str) -> np.ndarray:
    """'balanced' gives each sample n_total / (2 * n_of_its_class); 'none' gives 1."""
    if mode not in ("balanced", "none"):
        raise ValueError(f"class_weight must be 'balanced' or 'none', got {mode!r}")
    if mode == "none":
        return np.ones(len(y), dtype=np.float64)
    n = len(y)
    n_pos = int(np.sum(y == 1))
    n_neg = n - n_pos
    if n_pos == 0 or n_neg == 0:
        raise ValueError("balanced class weights need both classes present")
    w = np.where(y == 1, n / (2.0 * n_pos), n / (2.0 * n_neg))
    return w.astype(np.float64)


def objective_and_grad(
    theta: np.ndarray, X: Matrix, y_signed: np.ndarray, w: np.ndarray, C: float
) -> tuple[float, np.ndarray]:
    """F and its exact gradient at theta = [beta, intercept]."""
    beta = theta[:-1]
    b = theta[-1]
    z = X @ beta + b
    margins = y_signed * z
    loss = float(np.dot(w, np.logaddexp(0.0, -margins)))
    f = 0.5 * float(np.dot(beta, beta)) + C * loss
    # d/dz log(1+exp(-y z)) = -y * sigma(-y z)
    dz = w * (-y_signed * expit(-margins))
    grad_beta = beta + C * (X.T @ dz)
    grad_b = C * float(np.sum(dz))
    return f, np.concatenate([np.asarray(grad_beta).ravel(), [grad_b]])


def _two_loop(g, s_list, y_list, rho_list):
    q = g.copy()
    alphas = []
    for s, yv, rho in zip(reversed(s_list), reversed(y_list), reversed(rho_list)):
        a = rho * np.dot(s, q)
        alphas.append(a)
        q -= a * yv
    if s_list:
        s, yv = s_list[-1], y_list[-1]
        q *= np.dot(s, yv) / np.dot(yv, yv)
    for (s, yv, rho), a in zip(zip(s_list, y_list, rho_list), reversed(alphas)):
        b = rho * np.dot(yv, q)
        q += (a - b) * s
    return -q


def train(
    X: Matrix,
    y: np.ndarray,
    sample_weights: np.ndarray,
    config: TrainConfig = TrainConfig(),
) -> TrainedModel:
    """Minimize the weighted objective from a zero start; deterministic by construction."""
    y = np.asarray(y)
    sample_weights = np.asarray(sample_weights, dtype=np.float64)
    n, d = X.shape
    if len(y) != n or len(sample_weights) != n:
        raise ValueError("X, y, and sample_weights must agree in length")
    if not set(np.unique(y)) <= {0, 1}:
        raise ValueError("labels must be 0 (original) or 1 (translated)")
    if len(np.unique(y)) < 2:
        raise ValueError("training needs both classes present")
    if not np.all(np.isfinite(sample_weights)) or np.any(sample_weights <= 0):
        raise ValueError("sample weights must be finite and positive")
    data = X.data if sparse.issparse(X) else X
    if not np.all(np.isfinite(data)):
        raise ValueError("features must be finite")

    y_signed = np.where(y == 1, 1.0, -1.0)
    w = sample_weights * class_weight_per_sample(y, config.class_weight)
    C = float(config.C)

    theta = np.zeros(d + 1, dtype=np.float64)
    f, g = objective_and_grad(theta, X, y_signed, w, C)

    s_hist: list[np.ndarray] = []
    y_hist: list[np.ndarray] = []
    rho_hist: list[float] = []

    converged = False
    it = 0
    while it < config.max_iter:
        gnorm = float(np.max(np.abs(g)))
        if gnorm < config.tol:
            converged = True
            break
        direction = _two_loop(g, s_hist, y_hist, rho_hist)
        slope = float(np.dot(g, direction))
        if slope >= 0:  # numerical breakdown: fall back to steepest descent
            direction = -g
            slope = -float(np.dot(g, g))
        step = 1.0 if s_hist else min(1.0, 1.0 / gnorm)
        f_new = g_new = theta_new = None
        for _ in range(_MAX_BACKTRACKS):
            cand = theta + step * direction
            f_c, g_c = objective_and_grad(cand, X, y_signed, w, C)
            if f_c <= f + _ARMIJO_C1 * step * slope:
                theta_new, f_new, g_new = cand, f_c, g_c
                break
            step *= _BACKTRACK
        it += 1
        if theta_new is None:  # step underflow; cannot make progress
            break
        s = theta_new - theta
        yv = g_new - g
        sy = float(np.dot(s, yv))
        if sy > 1e-10 * float(np.linalg.norm(s)) * float(np.linalg.norm(yv)):
            s_hist.append(s)
            y_hist.append(yv)
            rho_hist.append(1.0 / sy)
            if len(s_hist) > _LBFGS_HISTORY:
                s_hist.pop(0)
                y_hist.pop(0)
                rho_hist.pop(0)
        theta, f, g = theta_new, f_new, g_new
    if not converged and float(np.max(np.abs(g))) < config.tol:
        converged = True

    return TrainedModel(
        coefficients=theta[:-1].copy(),
        intercept=float(theta[-1]),
        config=config,
        converged=converged,
        final_objective=float(f),
        n_iter=it,
    )


def predict_proba(model: TrainedModel, x: Matrix) -> float:
    """P(translated | x) = sigmoid(x.beta + intercept) for a single row."""
    beta = model.coefficients
    if sparse.issparse(x):
        if x.shape[1] != beta.shape[0]:
            raise ValueError(f"feature dimension {x.shape[1]} != model dimension {beta.shape[0]}")
        z = float((x @ beta)[0])
    else:
        x = np.asarray(x).ravel()
        if x.shape[0] != beta.shape[0]:
            raise ValueError(f"feature dimension {x.shape[0]} != model dimension {beta.shape[0]}")
        z = float(np.dot(x, beta))
    return float(expit(z + model.intercept))


def predict_proba_matrix(model: TrainedModel, X: Matrix) -> np.ndarray:
    if X.shape[1] != model.coefficients.shape[0]:
        raise ValueError(f"feature dimension {X.shape[1]} != model dimension {model.coefficients.shape[0]}")
    z = np.asarray(X @ model.coefficients).ravel() + model.intercept
    return expit(z)


def fluency(p: float) -> float:
    """Original-likeness: 1 - P(translated | x)."""
    if not 0.0 <= p <= 1.0:
        raise ValueError(f"probability out of range: {p}")
    return 1.0 - p


MODEL_FORMAT = "transfluency-model"
MODEL_FORMAT_VERSION = 1


def model_to_dict(model: TrainedModel, vocab_sha256: str) -> dict:
    return {
        "format": MODEL_FORMAT,
        "format_version": MODEL_FORMAT_VERSION,
        "vocab_sha256": vocab_sha256,
        "coefficients": [float(c) for c in model.coefficients],
        "intercept": float(model.intercept),
        "converged": bool(model.converged),
        "final_objective": float(model.final_objective),
        "n_iter": int(model.n_iter),
        "config": asdict(model.config),
    }


def model_from_dict(payload: dict) -> tuple[TrainedModel, str]:
    if payload.get("format") != MODEL_FORMAT or payload.get("format_version") != MODEL_FORMAT_VERSION:
        raise ValueError("unrecognized model artifact format")
    model = TrainedModel(
        coefficients=np.array(payload["coefficients"], dtype=np.float64),
        intercept=float(payload["intercept"]),
        config=TrainConfig(**payload["config"]),
        converged=bool(payload["converged"]),
        final_objective=float(payload["final_objective"]),
        n_iter=int(payload["n_iter"]),
    )
    return model, payload["vocab_sha256"]


def save_model(model: TrainedModel, vocab_sha256: str, path) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        json.dump(model_to_dict(model, vocab_sha256), fh, ensure_ascii=False, indent=None)
        fh.write("\n")


def load_model(path) -> tuple[TrainedModel, str]:
    with open(path, "r", encoding="utf-8") as fh:
        return model_from_dict(json.load(fh))
