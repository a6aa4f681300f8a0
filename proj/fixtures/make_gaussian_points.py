#!/usr/bin/env python3
"""Regenerates gaussian-points.csv.

100 points in the box [-1,1]^2 drawn from a three-component Gaussian
mixture with variance 0.1*I and means (0.4, 0.3), (-0.3, -0.5),
(-0.5, 0.4), components chosen with equal probability. Draws falling
outside the box are redrawn. The seed is pinned; rerunning this script
must reproduce the committed file byte for byte.
"""

import numpy as np

SEED = 20240817
N = 100
MEANS = np.array([[0.4, 0.3], [-0.3, -0.5], [-0.5, 0.4]])
STD = np.sqrt(0.1)


def main() -> None:
    rng = np.random.default_rng(SEED)
    rows = []
    while len(rows) < N:
        mean = MEANS[rng.integers(0, 3)]
        x = mean + STD * rng.standard_normal(2)
        if np.all(np.abs(x) <= 1.0):
            rows.append(x)
    with open("gaussian-points.csv", "w") as f:
        f.write("x1,x2\n")
        for x in rows:
            f.write(f"{x[0]:.17g},{x[1]:.17g}\n")


if __name__ == "__main__":
    main()
