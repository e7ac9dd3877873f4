"""Approximate GCD of the noisy degree-13/11 pair at tolerance 1e-3."""

from __future__ import annotations

import argparse

from georeg import examples as E
from georeg import gcd as G
from georeg import poly as P


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--tol", type=float, default=1e-3)
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args()
    p, q = E.gcd_pair()
    res = G.pgcd(p, q, args.tol, args.seed)
    print(f"p = {E.GCD_P}\nq = {E.GCD_Q}\ntol = {args.tol:g}\n")
    print(f"gcd degree      {res.k}")
    print(f"u               {P.format_poly(res.u)}")
    print(f"u (normalized)  {P.format_poly(res.u_normalized)}")
    print(f"v               {P.format_poly(res.v)}")
    print(f"w               {P.format_poly(res.w)}")
    print(f"backward error  {res.backward_error:.3e}")
    print(f"condition       {res.condition:.3e}")
    if res.trace:
        print(f"iterations      {res.trace.iterations} ({res.trace.stop_reason})")


if __name__ == "__main__":
    main()
