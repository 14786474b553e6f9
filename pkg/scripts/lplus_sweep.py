#!/usr/bin/env python3
"""Where does the L+ condition start to hold, as a function of |gamma~| (with beta~ = 0 and 1)?"""

import numpy as np

from resbundle import conjwindow as cw
from resbundle import manifold as mf
from resbundle.interval import Interval
from resbundle.spectrum import SHParams, compute_spectrum, dichotomy_K

sp = compute_spectrum(SHParams(0.2, 1.6))
K = dichotomy_K(sp)
KB, CB = cw.decay_constants(mf.sh_manifold(sp, "stable", 35, 0.5), sp)
mats = cw.lplus_matrices(sp)
print(f"sigma_min {mats.sigma_min}  |M1| {mats.M1_norm}  |M2| {mats.M2_norm}")
Ls = list(np.arange(20.0, 120.0, 1.0))
print(f"{'|beta~|':>8} {'|gamma~|':>9} {'L+':>6}")
for b in (0.0, 1.0):
    for g in (1e-12, 1e-9, 1e-6, 1e-3, 1.0):
        best, _ = cw.sweep_L_plus(Ls, K, KB, CB, sp, Interval(b), Interval(g))
        print(f"{b:8.1f} {g:9.0e} {best if best is not None else '-':>6}")
