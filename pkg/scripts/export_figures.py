#!/usr/bin/env python3
"""Point clouds of both manifolds in eigen-coordinates (PNG if matplotlib is present, CSV always)."""

import os

import numpy as np

from resbundle import manifold as mf
from resbundle.pipeline import pointcloud
from resbundle.spectrum import SHParams, compute_spectrum

out = "out"
os.makedirs(out, exist_ok=True)
sp = compute_spectrum(SHParams(0.2, 1.6))
clouds = {}
for side in ("stable", "unstable"):
    mp = mf.sh_manifold(sp, side, 35, 0.5, validate=False)
    clouds[side] = pointcloud(mp, sp, 60, 60)
    np.savetxt(os.path.join(out, f"pointcloud_{side}.csv"), clouds[side], delimiter=",",
               header="s,t,u1,u2,u3,u4,e_s_re,e_s_im,e_u_re", comments="", fmt="%.17g")
try:
    import matplotlib

    matplotlib.use("Agg")
    import matplotlib.pyplot as plt
except ImportError:
    print("matplotlib not installed; wrote CSV only")
else:
    fig = plt.figure(figsize=(6, 5))
    ax = fig.add_subplot(projection="3d")
    for side, c in (("stable", "tab:blue"), ("unstable", "tab:red")):
        r = clouds[side]
        ax.scatter(r[:, 6], r[:, 7], r[:, 8], s=1, c=c, label=side)
    ax.set_xlabel("Re c_s1")
    ax.set_ylabel("Im c_s1")
    ax.set_zlabel("Re c_u1")
    ax.legend()
    fig.savefig(os.path.join(out, "manifolds.png"), dpi=150)
    print("wrote", os.path.join(out, "manifolds.png"))
