#!/usr/bin/env python3
"""Regenerate the bundled evaluation suite.

Twelve small classification tables drawn from classic simulated families
(moons, circles, spirals, checkerboards, Gaussian mixtures, ...). Fixed
seeds; rerunning reproduces the committed CSVs byte for byte.
"""

import json
import numpy as np

N = 360


def moons(rng):
    n = N // 2
    t = rng.uniform(0, np.pi, n)
    a = np.c_[np.cos(t), np.sin(t)]
    b = np.c_[1 - np.cos(t), 0.5 - np.sin(t)]
    x = np.vstack([a, b]) + rng.normal(0, 0.08, (2 * n, 2))
    y = np.r_[np.zeros(n), np.ones(n)]
    return x, y


def circles(rng):
    n = N // 2
    t = rng.uniform(0, 2 * np.pi, 2 * n)
    r = np.r_[np.full(n, 1.0), np.full(n, 2.0)] + rng.normal(0, 0.12, 2 * n)
    x = np.c_[r * np.cos(t), r * np.sin(t)]
    y = np.r_[np.zeros(n), np.ones(n)]
    return x, y


def spiral(rng):
    n = N // 2
    t = rng.uniform(0.4, 3.0, 2 * n) * np.pi
    y = np.r_[np.zeros(n), np.ones(n)]
    phase = y * np.pi
    x = np.c_[t * np.cos(t + phase), t * np.sin(t + phase)] / np.pi
    return x + rng.normal(0, 0.08, (2 * n, 2)), y


def checkerboard(rng):
    x = rng.uniform(-2, 2, (N, 2))
    y = ((np.floor(x[:, 0]) + np.floor(x[:, 1])) % 2).astype(float)
    return x, y


def sin_checker(rng):
    x = rng.uniform(-2, 2, (N, 2))
    y = (x[:, 1] > np.sin(2.5 * x[:, 0])).astype(float)
    flip = (np.floor(x[:, 0] + 2) % 2).astype(bool)
    y[flip] = 1 - y[flip]
    return x, y


def gmm(rng):
    centers = np.array([[-1.5, -1.0], [1.5, -0.5], [0.0, 1.8], [-0.5, 0.2]])
    labels = np.array([0, 1, 2, 0])
    idx = rng.integers(0, len(centers), N)
    x = centers[idx] + rng.normal(0, 0.45, (N, 2))
    return x, labels[idx].astype(float)


def linear(rng):
    x = rng.normal(0, 1.2, (N, 2))
    y = (0.8 * x[:, 0] - 1.1 * x[:, 1] + rng.normal(0, 0.25, N) > 0.2).astype(float)
    return x, y


def sine(rng):
    x = rng.uniform(-3, 3, (N, 2))
    y = (x[:, 1] > 1.2 * np.sin(1.7 * x[:, 0])).astype(float)
    return x, y


def star(rng):
    t = rng.uniform(0, 2 * np.pi, N)
    r = rng.uniform(0.1, 2.0, N)
    x = np.c_[r * np.cos(t), r * np.sin(t)]
    y = (np.floor(t / (2 * np.pi / 5)) % 2).astype(float)
    return x, y


def swiss_roll(rng):
    t = 1.5 * np.pi * (1 + 2 * rng.uniform(0, 1, N))
    x = np.c_[t * np.cos(t), t * np.sin(t)] / (3 * np.pi)
    x += rng.normal(0, 0.05, (N, 2))
    y = (t > 2.8 * np.pi).astype(float)
    return x, y


def xor_blobs(rng):
    sign = rng.integers(0, 2, (N, 2)) * 2 - 1
    x = sign * 1.2 + rng.normal(0, 0.5, (N, 2))
    y = ((sign[:, 0] * sign[:, 1]) > 0).astype(float)
    return x, y


def bands(rng):
    x = rng.uniform(-2.5, 2.5, (N, 2))
    y = (np.floor((x[:, 0] + x[:, 1]) / 1.4) % 3).astype(float)
    return x, y


def noisy_cubic(rng):
    x = rng.uniform(-2, 2, (N, 4))
    score = 0.5 * x[:, 0] ** 3 - x[:, 1] + 0.6 * x[:, 2] * x[:, 0]
    y = (score + rng.normal(0, 0.4, N) > 0).astype(float)
    return x, y


FAMILIES = [
    ("moons", moons, 11),
    ("circles", circles, 12),
    ("spiral", spiral, 13),
    ("checkerboard", checkerboard, 14),
    ("sin_checkerboard", sin_checker, 15),
    ("gmm", gmm, 16),
    ("linear", linear, 17),
    ("sine", sine, 18),
    ("star", star, 19),
    ("swiss_roll", swiss_roll, 20),
    ("xor_blobs", xor_blobs, 21),
    ("noisy_cubic", noisy_cubic, 22),
]


def main():
    entries = []
    for name, fn, seed in FAMILIES:
        rng = np.random.default_rng(seed)
        x, y = fn(rng)
        d = x.shape[1]
        path = f"{name}.csv"
        with open(path, "w") as f:
            f.write(",".join(f"f{j}" for j in range(d)) + ",label\n")
            for row, label in zip(x, y):
                cells = ",".join(f"{v:.6f}" for v in row)
                f.write(f"{cells},{int(label)}\n")
        entries.append({"name": name, "file": path, "task": "classification"})
    with open("suite.json", "w") as f:
        json.dump(entries, f, indent=2)
        f.write("\n")


if __name__ == "__main__":
    main()
