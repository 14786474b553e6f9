"""Windows outside of which no conjugate points can occur.

On x <= -L^- the unstable subspace stays close to span{Vcheck_u1, Vcheck_u2},
which misses the sandwich plane; the distance is controlled by

    tau(L) = (K K_B / C_B) e^{-C_B L},   eps = tau / (1 - tau) < 1 / (8 rho^{3/2}).

On x >= L^+ the argument compares two planes built from the 2x2 blocks of
Vcheck and needs the eigen-coordinates (beta~, gamma~) of a second solution,
which are inputs here.
"""

from __future__ import annotations

from dataclasses import asdict, dataclass, field

import numpy as np

from .interval import (ComplexInterval, Interval, det2, eig2_hermitian_min,
                       iexp, mat_norm_spec, verified_inverse)
from .manifold import ManifoldParam
from .spectrum import Spectrum, dichotomy_K, evec_norm_bound

L_STEP = 0.1
L_MAX = 2000.0


def _iv(x) -> Interval:
    return x if isinstance(x, Interval) else Interval(float(x))


def _grid_value(k: int, step: float) -> float:
    # decimal grid values (43.6, not 43.60000000000001)
    return float(round(k * step, 10))


def decay_constants(P_unstable: ManifoldParam, sp: Spectrum) -> tuple[Interval, Interval]:
    """(K_B, C_B) with |B(x) - B_inf| <= K_B e^{-C_B |x + L|} on the far left.

    K_B = |P| (2 |nuhat| + 6 |P|) with |P| the coefficient l1 norm plus the
    validated tail radius, C_B = Re mu_u1.
    """
    nrm = P_unstable.norm()
    nu = sp.params.nuhat_iv.abs()
    KB = nrm * (nu * 2.0 + nrm * 6.0)
    return KB, sp.re_mu_u


def tau_minus(L: float, K, K_B, C_B) -> Interval:
    """(K K_B / C_B) e^{-C_B L} (upper enclosure in .hi)."""
    if not L >= 0:
        raise ValueError("L >= 0 required")
    K, K_B, C_B = _iv(K), _iv(K_B), _iv(C_B)
    return K * K_B / C_B * iexp(-(C_B * Interval(float(L))))


tau_plus = tau_minus


def lminus_threshold(sp: Spectrum) -> Interval:
    """1 / (8 rho^{3/2})."""
    return Interval(1.0) / (sp.rho * sp.sqrt_rho * 8.0)


@dataclass
class LMinusResult:
    L: float
    tau: Interval
    eps: Interval
    threshold: Interval
    sigma_radius: Interval

    @property
    def margins(self) -> dict:
        return {"tau": 1.0 - float(self.tau.hi), "eps": float(self.threshold.lo) - float(self.eps.hi)}

    @property
    def certified(self) -> bool:
        return float(self.tau.hi) < 1.0 and float(self.eps.hi) < float(self.threshold.lo)


def _lminus_ok(L, K, K_B, C_B, thr):
    t = tau_minus(L, K, K_B, C_B)
    if not float(t.hi) < 1.0:
        return False, t, None
    e = t / (Interval(1.0) - t)
    return float(e.hi) < float(thr.lo), t, e


def find_L_minus(K, K_B, C_B, sp: Spectrum, step: float = L_STEP, L_max: float = L_MAX) -> LMinusResult:
    """Smallest grid L with tau(L) < 1 and tau/(1-tau) < 1/(8 rho^{3/2}), both strict."""
    thr = lminus_threshold(sp)
    # the conditions are monotone in L, so bisect over grid indices
    lo, hi = 0, int(round(L_max / step))
    ok, _, _ = _lminus_ok(_grid_value(hi, step), K, K_B, C_B, thr)
    if not ok:
        raise ArithmeticError("no L_minus on grid")
    if _lminus_ok(0.0, K, K_B, C_B, thr)[0]:
        hi = 0
    while hi - lo > 1:
        mid = (lo + hi) // 2
        if _lminus_ok(_grid_value(mid, step), K, K_B, C_B, thr)[0]:
            hi = mid
        else:
            lo = mid
    L = _grid_value(hi, step)
    _, t, e = _lminus_ok(L, K, K_B, C_B, thr)
    rad = iexp(-(_iv(C_B) * Interval(L)))
    return LMinusResult(L, t, e, thr, rad)


def eps0(L: float, K, K_B, C_B, sp: Spectrum) -> Interval:
    """(tau+/(1 - tau+)) max_j |Vcheck_j|."""
    t = tau_plus(L, K, K_B, C_B)
    if not float(t.hi) < 1.0:
        raise ArithmeticError("L too small")
    vnorm, _ = evec_norm_bound(sp)
    return t / (Interval(1.0) - t) * vnorm


# ---------------------------------------------------------------------------

@dataclass
class LPlusMatrices:
    M1: ComplexInterval
    M2: ComplexInterval
    sigma_min: Interval
    M1_norm: Interval
    M2_norm: Interval
    Vs14_inv_norm: Interval
    Vu14_inv_norm: Interval
    Vs34_norm: Interval
    Vs12_norm: Interval
    det_u14: ComplexInterval


def _rows(A: ComplexInterval, rows) -> ComplexInterval:
    return ComplexInterval._raw(A.re[list(rows)], A.im[list(rows)])


def m1_collapsed(sp: Spectrum) -> ComplexInterval:
    """(Vs34)* Vu12 - (Vu12)* Vs34, which vanishes because the unstable plane is Lagrangian."""
    V = sp.Vcheck
    Vs34 = ComplexInterval._raw(V.re[2:, :2], V.im[2:, :2])
    Vu12 = ComplexInterval._raw(V.re[:2, 2:], V.im[:2, 2:])
    return Vs34.H @ Vu12 - Vu12.H @ Vs34


def lplus_matrices(sp: Spectrum) -> LPlusMatrices:
    V = sp.Vcheck
    Vs = ComplexInterval._raw(V.re[:, :2], V.im[:, :2])
    Vu = ComplexInterval._raw(V.re[:, 2:], V.im[:, 2:])
    Vs12, Vs34, Vs14 = _rows(Vs, (0, 1)), _rows(Vs, (2, 3)), _rows(Vs, (0, 3))
    Vu12, Vu14 = _rows(Vu, (0, 1)), _rows(Vu, (0, 3))
    for blk, nm in ((Vs14, "stable"), (Vu14, "unstable")):
        if bool(det2(blk).contains_zero()):
            raise np.linalg.LinAlgError(f"singular {nm} 1;4 slice")
    Vs14_inv = verified_inverse(Vs14)
    Vu14_inv = verified_inverse(Vu14)
    Vu34 = _rows(Vu, (2, 3))
    # the Lagrangian pairing before the slices are identified; rewriting it with
    # Vs12 = Vu12, Vs34 = -Vu34 as a difference of Vs34 terms gives the zero matrix
    M1 = Vs34.H @ Vu12 - Vs12.H @ Vu34
    M2 = Vs14_inv @ Vu14
    X = M2.H @ M1
    H = X.H @ X
    lam = eig2_hermitian_min(H)
    smin = Interval(max(0.0, float(lam.lo)), max(0.0, float(lam.hi))).sqrt()
    return LPlusMatrices(M1, M2, smin, mat_norm_spec(M1), mat_norm_spec(M2), mat_norm_spec(Vs14_inv),
                         mat_norm_spec(Vu14_inv), mat_norm_spec(Vs34), mat_norm_spec(Vs12), det2(Vu14))


@dataclass
class LPlusConstants:
    eps0: Interval
    C_M3: Interval
    C_M4: Interval
    eps_beta: Interval
    eps_gamma: Interval


def _pair_norm(z) -> Interval:
    z = z if isinstance(z, ComplexInterval) else ComplexInterval.point(np.asarray(z, dtype=complex))
    return (z.re.square() + z.im.square()).sum().sqrt()


def lplus_constants(e0: Interval, mats: LPlusMatrices, sp: Spectrum, beta_t, gamma_t, L: float) -> LPlusConstants:
    """C_M3 (in the form the proof establishes, with the 2 sqrt 2 factor), C_M4,
    eps_beta = e^{-Re mu_u L} |beta~|, eps_gamma = e^{-Re mu_u L} / |gamma~|."""
    a = e0 * mats.Vs14_inv_norm
    if not float(a.hi) < 1.0:
        raise ArithmeticError("increase L")
    gnorm = gamma_t if isinstance(gamma_t, Interval) else _pair_norm(gamma_t)
    bnorm = beta_t if isinstance(beta_t, Interval) else _pair_norm(beta_t)
    if not float(gnorm.lo) > 0:
        raise ValueError("gamma~ must be nonzero")
    C3 = (mats.Vs34_norm + mats.Vs12_norm * (2.0 * Interval(2.0).sqrt()) + e0) * 2.0
    C4 = mats.M2_norm * (mats.Vu14_inv_norm +
                         mats.Vs14_inv_norm * (e0 * mats.Vu14_inv_norm + 1.0) / (Interval(1.0) - a))
    ex = iexp(-(sp.re_mu_u * Interval(float(L))))
    return LPlusConstants(e0, C3, C4, ex * bnorm, ex / gnorm)


@dataclass
class LPlusVerdict:
    L: float
    holds: bool
    eps0_cond: tuple   # (lhs, 1)
    sigma_cond: tuple  # (sigma_min, rhs)

    @property
    def margins(self) -> dict:
        return {"eps0": 1.0 - float(self.eps0_cond[0].hi),
                "sigma": float(self.sigma_cond[0].lo) - float(self.sigma_cond[1].hi)}


def check_L_plus(L: float, mats: LPlusMatrices, c: LPlusConstants) -> LPlusVerdict:
    lhs0 = c.eps0 * mats.Vs14_inv_norm
    ok0 = float(lhs0.hi) < 1.0
    e3 = c.eps0 * c.C_M3
    rhs = e3 * mats.M2_norm + (e3 + mats.M1_norm) * (c.eps0 * c.C_M4 + c.eps_beta * c.eps_gamma)
    ok1 = float(mats.sigma_min.lo) > float(rhs.hi)
    return LPlusVerdict(float(L), bool(ok0 and ok1), (lhs0, Interval(1.0)), (mats.sigma_min, rhs))


def lplus_at(L: float, K, K_B, C_B, sp: Spectrum, beta_t, gamma_t, mats: LPlusMatrices | None = None) -> LPlusVerdict:
    mats = lplus_matrices(sp) if mats is None else mats
    try:
        e0 = eps0(L, K, K_B, C_B, sp)
        c = lplus_constants(e0, mats, sp, beta_t, gamma_t, L)
    except ArithmeticError:
        inf = Interval(np.inf)
        return LPlusVerdict(float(L), False, (inf, Interval(1.0)), (mats.sigma_min, inf))
    return check_L_plus(L, mats, c)


def sweep_L_plus(Ls, K, K_B, C_B, sp: Spectrum, beta_t, gamma_t) -> tuple[float | None, list]:
    """Verdicts over the L values; returns (smallest L from which every later one holds, verdicts)."""
    mats = lplus_matrices(sp)
    out = [lplus_at(L, K, K_B, C_B, sp, beta_t, gamma_t, mats) for L in Ls]
    best = None
    for v in reversed(out):
        if not v.holds:
            break
        best = v.L
    return best, out


# ---------------------------------------------------------------------------

@dataclass
class ConjugateWindowCertificate:
    K: Interval
    K_B: Interval
    C_B: Interval
    lminus: LMinusResult
    lplus: LPlusVerdict | None = None
    lplus_inputs: dict | None = None

    @property
    def l_minus_certified(self) -> bool:
        return self.lminus.certified

    @property
    def l_plus_condition_holds(self) -> bool:
        return bool(self.lplus is not None and self.lplus.holds)

    def claims(self) -> list:
        """Inequalities (name, lhs, rhs) meaning lhs.hi < rhs.lo."""
        out = [("tau_minus<1", self.lminus.tau, Interval(1.0)),
               ("eps_minus<1/(8rho^1.5)", self.lminus.eps, self.lminus.threshold)]
        if self.lplus is not None:
            out.append(("eps0*|Vs14^-1|<1", self.lplus.eps0_cond[0], self.lplus.eps0_cond[1]))
            out.append(("rhs<sigma_min", self.lplus.sigma_cond[1], self.lplus.sigma_cond[0]))
        return out

    def to_json(self) -> dict:
        from .report import iv_json

        d = {"K": iv_json(self.K), "K_B": iv_json(self.K_B), "C_B": iv_json(self.C_B),
             "L_minus": self.lminus.L, "tau": iv_json(self.lminus.tau), "epsilon": iv_json(self.lminus.eps),
             "threshold": iv_json(self.lminus.threshold), "sigma_radius": iv_json(self.lminus.sigma_radius),
             "margins": self.lminus.margins, "l_minus_certified": self.l_minus_certified}
        if self.lplus is not None:
            d["Lplus_verdict"] = {"L": self.lplus.L, "holds": self.lplus.holds, "margins": self.lplus.margins,
                                  "sigma_min": iv_json(self.lplus.sigma_cond[0]),
                                  "rhs": iv_json(self.lplus.sigma_cond[1])}
            d["Lplus_inputs"] = self.lplus_inputs
        return d


def conjugate_window(P_unstable: ManifoldParam, sp: Spectrum, beta_t=None, gamma_t=None,
                     L_plus: float | None = None) -> ConjugateWindowCertificate:
    K = dichotomy_K(sp)
    KB, CB = decay_constants(P_unstable, sp)
    lm = find_L_minus(K, KB, CB, sp)
    cert = ConjugateWindowCertificate(K, KB, CB, lm)
    if gamma_t is not None and L_plus is not None:
        cert.lplus = lplus_at(L_plus, K, KB, CB, sp, beta_t if beta_t is not None else (0, 0), gamma_t)
        cert.lplus_inputs = {"L": L_plus, "beta": [[complex(b).real, complex(b).imag] for b in (beta_t or (0, 0))],
                             "gamma": [[complex(g).real, complex(g).imag] for g in gamma_t]}
    return cert
