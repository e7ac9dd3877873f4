"""Sensitivity of a triple root: unstructured roots vs the regularized factorization.

Perturbs (x-1)^3 (x+1) by noise of size eps and compares the error of the
root near 1 as computed by the companion matrix (~eps^(1/3)) and by
Gauss-Newton on the multiplicity structure (3, 1) (~eps).
"""

from __future__ import annotations

import argparse

import numpy as np

from georeg import poly as P
from georeg import roots as R


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args()
    rng = np.random.default_rng(args.seed)
    exact = R.expand(1.0, [1.0, -1.0], [3, 1])
    print(f"{'noise':>8} {'companion':>11} {'structured':>11} {'condition':>10}")
    for eps in (1e-4, 1e-6, 1e-8, 1e-10, 1e-12):
        e = rng.standard_normal(exact.coeffs.shape)
        p = P.Polynomial(exact.coeffs + eps * exact.norm() * e / np.linalg.norm(e))
        naive = np.max(np.abs(R.companion_roots(p)[np.argsort(np.abs(R.companion_roots(p) - 1))[:3]] - 1))
        f = R.roots_refine(p, R.RootStructure((3, 1)), np.array([1.0, 1.05, -0.95], dtype=complex))
        print(f"{eps:8.0e} {naive:11.2e} {abs(f.roots[0] - 1):11.2e} {f.condition:10.3g}")


if __name__ == "__main__":
    main()
