#!/usr/bin/env python3
"""Full Swift-Hohenberg validation with the default parameters; writes out/certificate.json."""

import argparse
import sys

from resbundle.pipeline import LPlusInputs, RunConfig, run_validate
from resbundle.report import dumps


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--order", type=int, default=35)
    ap.add_argument("--out", default="out")
    ap.add_argument("--gamma-norm", type=float, default=1.0, help="|gamma~| for the L+ sweep (0 skips it)")
    args = ap.parse_args()
    cfg = RunConfig(order=args.order, out=args.out, lplus_sweep=(30.0, 80.0, 1.0))
    lp = LPlusInputs.from_norms((0.0, 0.0), (args.gamma_norm,) * 2) if args.gamma_norm > 0 else None
    cert, code = run_validate(cfg, lp)
    for c in cert["claims"]:
        print(f"{'ok  ' if c['holds'] else 'FAIL'} {c['name']}")
    cw = cert.get("conjugate_window", {})
    if "L_minus" in cw:
        print(f"L- = {cw['L_minus']}")
    if "Lplus_verdict" in cw:
        print(f"L+ = {cw['Lplus_verdict']['L_plus']}")
    print("timings:", cert["timings"])
    import os

    os.makedirs(args.out, exist_ok=True)
    with open(os.path.join(args.out, "certificate.json"), "w") as fh:
        fh.write(dumps(cert))
    sys.exit(code)


if __name__ == "__main__":
    main()
