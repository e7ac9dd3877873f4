"""Jordan structure J3(r) + J2(s) + J1(t) from a 6x6 matrix rounded to 5 digits."""

from __future__ import annotations

import argparse

import numpy as np

from georeg import examples as E
from georeg.jcf import regularized_jcf


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--tol", type=float, default=1e-4)
    args = ap.parse_args()
    A = E.nested_radical_matrix()
    r = regularized_jcf(A, args.tol)
    exact = E.nested_radicals()
    print(f"tol = {args.tol:g}")
    for (lam, sizes), ref in zip(r.blocks, exact):
        print(f"  blocks {list(sizes)}  eigenvalue {lam.real:.8f}  exact {ref:.8f}  error {abs(lam - ref):.1e}")
    print(f"  backward error  {r.backward_error:.3e}")
    print(f"  condition       {r.condition:.4g}")
    print("eig() for comparison:", np.round(np.sort(np.linalg.eigvals(A).real), 6))


if __name__ == "__main__":
    main()
