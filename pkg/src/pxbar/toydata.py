"""Seeded Gaussian-blob dataset and a plain float MLP trainer for weight fixtures."""

from __future__ import annotations

import numpy as np

from .ann import activation_apply, float_forward

BLOB_CENTERS = np.array([[0.0, 2.0], [-1.8, -1.0], [1.8, -1.0]])


def make_blobs(n: int, seed: int, std: float = 0.8, centers=BLOB_CENTERS) -> tuple[np.ndarray, np.ndarray]:
    """``n`` points split round-robin over the classes; returns (X, labels)."""
    rng = np.random.default_rng(seed)
    centers = np.asarray(centers, dtype=float)
    labels = np.arange(n) % len(centers)
    x = centers[labels] + std * rng.standard_normal((n, centers.shape[1]))
    return x, labels


def with_bias(x: np.ndarray) -> np.ndarray:
    """Append a constant-1 feature so the first layer can learn an offset."""
    x = np.atleast_2d(x)
    return np.hstack([x, np.ones((x.shape[0], 1))])


def train_mlp(
    x: np.ndarray,
    labels: np.ndarray,
    hidden: int = 8,
    seed: int = 0,
    epochs: int = 500,
    lr: float = 0.1,
) -> list[np.ndarray]:
    """Full-batch gradient descent on a 2-layer relu network with softmax loss.

    Returns ``[W1, W2]`` with ``W1`` of shape (features, hidden) and ``W2`` of
    shape (hidden, classes); inference is ``relu(x @ W1) @ W2``.
    """
    rng = np.random.default_rng(seed)
    n, d = x.shape
    k = int(labels.max()) + 1
    w1 = rng.standard_normal((d, hidden)) * np.sqrt(2.0 / d)
    w2 = rng.standard_normal((hidden, k)) * np.sqrt(1.0 / hidden)
    onehot = np.eye(k)[labels]
    for _ in range(epochs):
        z1 = x @ w1
        h = activation_apply("relu", z1)
        logits = h @ w2
        logits -= logits.max(axis=1, keepdims=True)
        prob = np.exp(logits)
        prob /= prob.sum(axis=1, keepdims=True)
        d_logits = (prob - onehot) / n
        g2 = h.T @ d_logits
        d_h = d_logits @ w2.T
        g1 = x.T @ (d_h * (z1 > 0))
        w1 -= lr * g1
        w2 -= lr * g2
    return [w1, w2]


MLP_ACTIVATIONS = ("relu", "none")


def accuracy(outputs: np.ndarray, labels: np.ndarray) -> float:
    return float(np.mean(np.argmax(outputs, axis=1) == labels))


def float_accuracy(weights, x, labels, activations=MLP_ACTIVATIONS) -> float:
    return accuracy(float_forward(weights, activations, x), labels)
