"""Stage-by-stage run of the Swift-Hohenberg validation and certificate assembly."""

from __future__ import annotations

import json
import logging
import time
from dataclasses import asdict, dataclass, field

import numpy as np

from . import bundle as bd
from . import conjwindow as cw
from . import manifold as mf
from .interval import ComplexInterval, Interval
from .report import SCHEMA_VERSION, claim, iv_json
from .spectrum import SHParams, compute_spectrum, dichotomy_K

log = logging.getLogger(__name__)

EXIT_OK, EXIT_FAILED, EXIT_ERROR = 0, 1, 2


@dataclass
class RunConfig:
    muhat: float = 0.2
    nuhat: float = 1.6
    order: int = 35
    scale: float = 0.5
    r0_grid: tuple = (1e-18, 1e-2, 40)
    lplus_file: str | None = None
    lplus_sweep: tuple = (10.0, 100.0, 1.0)
    beta_norm: tuple | None = None
    gamma_norm: tuple | None = None
    out: str = "out"

    def __post_init__(self):
        if self.order < 3:
            raise ValueError("order N >= 3 required")
        if not self.scale > 0:
            raise ValueError("scale must be positive")
        if not (self.muhat > 0 and self.nuhat > 0):
            raise ValueError("muhat, nuhat must be positive")
        lo, hi, st = self.lplus_sweep
        if not (st > 0 and hi >= lo):
            raise ValueError("bad L+ sweep LO:HI:STEP")

    @property
    def grid(self) -> np.ndarray:
        lo, hi, n = self.r0_grid
        return np.geomspace(lo, hi, int(n))

    def echo(self) -> dict:
        d = asdict(self)
        d.pop("out")
        return d


@dataclass
class LPlusInputs:
    beta: object      # complex pair or Interval norm
    gamma: object

    @classmethod
    def from_file(cls, path: str) -> "LPlusInputs":
        with open(path) as fh:
            d = json.load(fh)
        try:
            beta = [complex(float(re), float(im)) for re, im in d["beta"]]
            gamma = [complex(float(re), float(im)) for re, im in d["gamma"]]
        except (KeyError, TypeError, ValueError) as e:
            raise ValueError(f"malformed L+ input file: {e}") from None
        if len(beta) != 2 or len(gamma) != 2:
            raise ValueError("beta and gamma must be pairs")
        if all(g == 0 for g in gamma):
            raise ValueError("gamma~ must be nonzero")
        return cls(beta, gamma)

    @classmethod
    def from_norms(cls, beta_norm, gamma_norm) -> "LPlusInputs":
        b = Interval(*map(float, beta_norm))
        g = Interval(*map(float, gamma_norm))
        if not float(g.lo) > 0:
            raise ValueError("gamma~ must be nonzero")
        return cls(b, g)

    def to_json(self):
        def enc(v):
            if isinstance(v, Interval):
                return {"norm": iv_json(v)}
            return [[complex(z).real, complex(z).imag] for z in v]
        return {"beta": enc(self.beta), "gamma": enc(self.gamma)}


def _sweep_values(sweep) -> list:
    lo, hi, st = map(float, sweep)
    n = int(np.floor((hi - lo) / st + 1e-9)) + 1
    return [float(round(lo + k * st, 10)) for k in range(n)]


def lplus_report(sp, K, KB, CB, inputs: LPlusInputs, sweep) -> dict:
    Ls = _sweep_values(sweep)
    best, verdicts = cw.sweep_L_plus(Ls, K, KB, CB, sp, inputs.beta, inputs.gamma)
    mats = cw.lplus_matrices(sp)
    out = {"inputs": inputs.to_json(), "grid": [Ls[0], Ls[-1], float(sweep[2])],
           "L_plus": best, "result": "certified" if best is not None else "none on grid",
           "sigma_min": iv_json(mats.sigma_min), "M1_norm": iv_json(mats.M1_norm),
           "M2_norm": iv_json(mats.M2_norm),
           "verdicts": [{"L": v.L, "holds": v.holds} for v in verdicts]}
    chosen = next((v for v in verdicts if v.L == best), None) if best is not None else None
    out["claims"] = [] if chosen is None else [
        claim("L+: eps0*|Vs14^-1| < 1", chosen.eps0_cond[0], chosen.eps0_cond[1]),
        claim("L+: rhs < sigma_min", chosen.sigma_cond[1], chosen.sigma_cond[0])]
    if chosen is not None:
        out["margins"] = chosen.margins
    return out


def run_validate(cfg: RunConfig, lplus: LPlusInputs | None = None) -> tuple[dict, int]:
    """Full pipeline; returns (certificate, exit code)."""
    cert = {"schema_version": SCHEMA_VERSION, "config": cfg.echo(), "claims": [],
            "failed_stage": None, "error": None, "timings": {}}
    timings = cert["timings"]
    stage = "spectrum"
    code = EXIT_OK

    def tick(name, t0):
        timings[name] = round(time.perf_counter() - t0, 3)

    try:
        t0 = time.perf_counter()
        params = SHParams(cfg.muhat, cfg.nuhat)
        sp = compute_spectrum(params)
        K = dichotomy_K(sp)
        cert["spectrum"] = {**sp.to_json(), "K": iv_json(K)}
        tick(stage, t0)

        mans = {}
        cert["manifolds"] = {}
        for side in ("stable", "unstable"):
            stage = f"manifold_{side}"
            t0 = time.perf_counter()
            mp = mf.sh_manifold(sp, side, cfg.order, cfg.scale, validate=False)
            b = mf.manifold_radii_bounds(mp, sp, params.nuhat_iv)
            mp.bounds = b
            cert["manifolds"][side] = mp.to_json()
            mf.find_radius(b, cfg.grid)
            mp.r0 = b.r0
            res = mf.invariance_residual(mp)
            cert["manifolds"][side] = {**mp.to_json(),
                                       "invariance_residual_contains_zero": bool(np.all(res.coeffs.contains_zero()))}
            cert["claims"] += [claim(f"{side} manifold: Z1 < 1", b.Z1, 1.0),
                               claim(f"{side} manifold: p(r0) < 0", b.p_r0, 0.0)]
            mans[side] = mp
            tick(stage, t0)

        stage = "bundle"
        t0 = time.perf_counter()
        B = bd.solve_bundle_coeffs(mans["stable"])
        try:
            bb = bd.bundle_validate(B, bd.field_tail_bound(B.P, B.P.r0), cfg.grid)
        finally:
            cert["bundle"] = B.to_json()
        cr = bd.conjugacy_residual(B)
        cert["bundle"]["conjugacy_residual_contains_zero"] = bool(np.all(cr.coeffs.contains_zero()))
        cert["bundle"]["resonant_a_norms"] = iv_json(B.resonant_a_norms())
        cert["claims"] += [claim("bundle: Z < 1", bb.Z, 1.0), claim("bundle: p(r0) < 0", bb.p_r0, 0.0)]
        tick(stage, t0)

        stage = "l_minus"
        t0 = time.perf_counter()
        KB, CB = cw.decay_constants(mans["unstable"], sp)
        lm = cw.find_L_minus(K, KB, CB, sp)
        cwc = cw.ConjugateWindowCertificate(K, KB, CB, lm)
        cert["conjugate_window"] = cwc.to_json()
        cert["conjugate_window"]["sigma_min"] = iv_json(cw.lplus_matrices(sp).sigma_min)
        cert["claims"] += [claim("L-: tau < 1", lm.tau, 1.0),
                           claim("L-: eps < 1/(8 rho^1.5)", lm.eps, lm.threshold)]
        tick(stage, t0)

        if lplus is not None:
            stage = "l_plus"
            t0 = time.perf_counter()
            # for x -> +infinity the decay of B(x) is governed by the stable manifold
            KBp, CBp = cw.decay_constants(mans["stable"], sp)
            rep = lplus_report(sp, K, KBp, CBp, lplus, cfg.lplus_sweep)
            cert["conjugate_window"]["Lplus_verdict"] = rep
            if rep["L_plus"] is None:
                cert["failed_stage"] = stage
                cert["error"] = "no L+ certified on grid"
            cert["claims"] += rep["claims"]
            tick(stage, t0)
    except (mf.ContractionError, mf.ResonanceUndecidable, ArithmeticError, np.linalg.LinAlgError) as e:
        cert["failed_stage"] = stage
        cert["error"] = f"{stage}: {e}"
        code = EXIT_FAILED
    except Exception as e:  # noqa: BLE001 - reported with the stage, exit code 2
        cert["failed_stage"] = stage
        cert["error"] = f"{stage}: {type(e).__name__}: {e}"
        code = EXIT_ERROR
    ok = cert["failed_stage"] is None and all(c["holds"] for c in cert["claims"])
    cert["verdict"] = bool(ok)
    if code == EXIT_OK and not ok:
        code = EXIT_FAILED
    return cert, code


def run_lplus(cfg: RunConfig, inputs: LPlusInputs) -> tuple[dict, int]:
    params = SHParams(cfg.muhat, cfg.nuhat)
    sp = compute_spectrum(params)
    K = dichotomy_K(sp)
    mp = mf.sh_manifold(sp, "stable", cfg.order, cfg.scale)
    KB, CB = cw.decay_constants(mp, sp)
    rep = lplus_report(sp, K, KB, CB, inputs, cfg.lplus_sweep)
    rep.update({"schema_version": SCHEMA_VERSION, "config": cfg.echo(), "K": iv_json(K),
                "K_B": iv_json(KB), "C_B": iv_json(CB)})
    return rep, (EXIT_OK if rep["L_plus"] is not None else EXIT_FAILED)


# ---------------------------------------------------------------------------
# exports

def eigen_coordinates(sp, X: np.ndarray) -> np.ndarray:
    """(Re c_s1, Im c_s1, Re c_u1) with X = Vhat c, for rows of X."""
    Vi = np.linalg.inv(sp.Vhat.mid())
    c = X @ Vi.T
    return np.stack([c[..., 0].real, c[..., 0].imag, c[..., 2].real], axis=-1)


def polar_grid(n_r: int, n_th: int) -> tuple[np.ndarray, np.ndarray]:
    r = np.linspace(0.0, 1.0, n_r)
    th = np.linspace(0.0, 2 * np.pi, n_th, endpoint=False)
    R, T = np.meshgrid(r, th, indexing="ij")
    s, t = (R * np.cos(T)).ravel(), (R * np.sin(T)).ravel()
    # keep rows inside the closed disc after rounding (s^2 + t^2 <= 1 in floats)
    over = s * s + t * t > 1.0
    while np.any(over):
        s[over] *= 1.0 - 2.0 ** -52
        t[over] *= 1.0 - 2.0 ** -52
        over = s * s + t * t > 1.0
    return s, t


def pointcloud(mp, sp, n_r: int = 100, n_th: int = 100) -> np.ndarray:
    """Rows (s, t, u1..u4, e_s_re, e_s_im, e_u_re) on a polar grid of the unit disc."""
    s, t = polar_grid(n_r, n_th)
    sig = np.stack([s + 1j * t, s - 1j * t], axis=-1)
    X = mp.P.eval_mid(sig).real
    return np.column_stack([s, t, X, eigen_coordinates(sp, X)])


def bundlecloud(mp, sp, n_r: int = 20, n_th: int = 24) -> np.ndarray:
    """Rows (s, t, u1..u4, Re v1..v4, Im v1..v4) with v = d/dsigma_1 P on the unstable manifold."""
    d1, _ = bd.unstable_bundle_over_unstable(mp)
    s, t = polar_grid(n_r, n_th)
    sig = np.stack([s + 1j * t, s - 1j * t], axis=-1)
    X = mp.P.eval_mid(sig).real
    V = d1.eval_mid(sig)
    return np.column_stack([s, t, X, V.real, V.imag])
