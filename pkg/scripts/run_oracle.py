#!/usr/bin/env python3
"""Bistable front: generic solvers against the exact rational expansions."""

import sys

from resbundle.oracle_bistable import run_oracle

for N in (10, 20, 30):
    rep = run_oracle(N)
    print(f"N = {N}: {'ok' if rep.ok else 'FAILED'} in {rep.runtime:.2f}s")
    for name, (cz, w, mx) in rep.deviations.items():
        print(f"  {name:16s} contains 0: {cz}  max width {w:.1e}  max |dev| {mx:.1e}")
    print(f"  a12_2 = {rep.a12}")
    for f in rep.failures:
        print("  ", f)
    if not rep.ok:
        sys.exit(1)
