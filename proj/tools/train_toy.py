#!/usr/bin/env python3
"""Train the small two-blob classifier used by the end-to-end checks.

Writes a 2-8-2 tanh network and a 200-point labelled dataset in the JSON
formats read by the dualverify CLI. Deterministic for a given --seed.
"""

import argparse
import json
import pathlib

import numpy as np


def make_blobs(rng, n):
    half = n // 2
    centers = np.array([[-1.0, -0.5], [1.0, 0.5]])
    x = np.concatenate([rng.normal(centers[0], 0.6, size=(half, 2)),
                        rng.normal(centers[1], 0.6, size=(n - half, 2))])
    y = np.concatenate([np.zeros(half, dtype=int), np.ones(n - half, dtype=int)])
    order = rng.permutation(n)
    return x[order], y[order]


def train(x, y, hidden, steps, lr, rng):
    w0 = rng.normal(0, 1.0 / np.sqrt(x.shape[1]), size=(hidden, x.shape[1]))
    b0 = np.zeros(hidden)
    w1 = rng.normal(0, 1.0 / np.sqrt(hidden), size=(2, hidden))
    b1 = np.zeros(2)
    onehot = np.eye(2)[y]
    for _ in range(steps):
        a = np.tanh(x @ w0.T + b0)
        logits = a @ w1.T + b1
        p = np.exp(logits - logits.max(axis=1, keepdims=True))
        p /= p.sum(axis=1, keepdims=True)
        d_logits = (p - onehot) / len(x)
        d_a = d_logits @ w1
        d_z = d_a * (1 - a ** 2)
        w1 -= lr * d_logits.T @ a
        b1 -= lr * d_logits.sum(axis=0)
        w0 -= lr * d_z.T @ x
        b0 -= lr * d_z.sum(axis=0)
    return w0, b0, w1, b1


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--out", default="tests/data", type=pathlib.Path)
    parser.add_argument("--seed", default=7, type=int)
    parser.add_argument("--points", default=200, type=int)
    parser.add_argument("--hidden", default=8, type=int)
    parser.add_argument("--steps", default=3000, type=int)
    parser.add_argument("--lr", default=0.5, type=float)
    args = parser.parse_args()

    rng = np.random.default_rng(args.seed)
    x, y = make_blobs(rng, args.points)
    w0, b0, w1, b1 = train(x, y, args.hidden, args.steps, args.lr, rng)

    pred = np.argmax(np.tanh(x @ w0.T + b0) @ w1.T + b1, axis=1)
    print(f"train error {np.mean(pred != y):.3f}")

    args.out.mkdir(parents=True, exist_ok=True)
    net = {"layers": [
        {"weights": w0.tolist(), "bias": b0.tolist(), "activation": "tanh"},
        {"weights": w1.tolist(), "bias": b1.tolist(), "activation": "identity"},
    ]}
    data = {"examples": [{"x": xi.tolist(), "label": int(yi)} for xi, yi in zip(x, y)]}
    (args.out / "toy_net.json").write_text(json.dumps(net, indent=1) + "\n")
    (args.out / "toy_dataset.json").write_text(json.dumps(data, indent=1) + "\n")


if __name__ == "__main__":
    main()
