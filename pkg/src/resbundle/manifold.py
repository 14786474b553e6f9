"""Parameterisation method for (un)stable manifolds of polynomial fields.

The fields handled here have the form

    G(U) = L U + e_n q(u_1),   q(u) = c0 + c1 u + c2 u^2 + c3 u^3,

which covers the Swift-Hohenberg spatial system (n = 4) and the bistable
travelling-front system (n = 2).  With P(sigma) = sum P_alpha sigma^alpha the
invariance equation G(P) = DP Omega sigma gives, for |alpha| >= 2,

    (DG(P_0) - (alpha . mu) I) P_alpha = -e_n [c2 (p1*p1)'_alpha + c3 (p1*p1*p1)'_alpha]

where the prime drops the terms linear in P_alpha.  The linear solve goes
through the eigenbasis, P_alpha = V diag(1/(mu_i - alpha.mu)) V^{-1} e_n q.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from itertools import product as iproduct

import numpy as np

from .interval import ComplexInterval, Interval, mat_norm_col1, verified_inverse
from .series import (MultiSeries, cauchy, cauchy_degree, degrees, index_of,
                     multi_indices, n_coeffs)
from .spectrum import SHParams, Spectrum

RADIUS_GRID = np.geomspace(1e-18, 1e-2, 40)
DEGENERATE_TOL = 1e-12


class ResonanceUndecidable(ArithmeticError):
    pass


class ContractionError(ArithmeticError):
    pass


# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class FieldSpec:
    n: int
    linear: np.ndarray
    poly: tuple  # Intervals (c0, c1, c2, c3)
    equilibrium: tuple
    name: str = ""

    def dg(self, u1: ComplexInterval) -> ComplexInterval:
        c0, c1, c2, c3 = self.poly
        A = ComplexInterval.point(self.linear.astype(complex))
        A[self.n - 1, 0] = A[self.n - 1, 0] + (c1 + u1 * c2 * 2.0 + u1 * u1 * c3 * 3.0)
        return A

    def dg_eq(self) -> ComplexInterval:
        return self.dg(ComplexInterval.point(self.equilibrium[0]))

    def rhs(self, U: np.ndarray) -> np.ndarray:
        """Plain floating point vector field (for numerical integration)."""
        c = [float(ci.mid()) for ci in self.poly]
        out = self.linear @ U
        u = U[0]
        out = out.astype(np.result_type(out, u))
        out[self.n - 1] = out[self.n - 1] + c[0] + c[1] * u + c[2] * u ** 2 + c[3] * u ** 3
        return out

    def jac(self, U: np.ndarray) -> np.ndarray:
        c = [float(ci.mid()) for ci in self.poly]
        A = self.linear.astype(complex if np.iscomplexobj(U) else float).copy()
        A[self.n - 1, 0] += c[1] + 2 * c[2] * U[0] + 3 * c[3] * U[0] ** 2
        return A


def _is_companion(L: np.ndarray) -> bool:
    """Shift structure u_k' = u_{k+1} in all rows but the last."""
    n = L.shape[0]
    return bool(np.array_equal(L[:-1], np.eye(n, k=1)[:-1]))


def sh_field(params: SHParams) -> FieldSpec:
    L = np.array([[0, 1, 0, 0], [0, 0, 1, 0], [0, 0, 0, 1], [-1, 0, -2, 0]], dtype=float)
    poly = (Interval(0.0), -params.muhat_iv, params.nuhat_iv, Interval(-1.0))
    return FieldSpec(4, L, poly, (0.0, 0.0, 0.0, 0.0), "swift-hohenberg")


@dataclass
class EigenData:
    """Eigenvalues/eigenvectors of DG at the equilibrium.

    ``lattice`` optionally gives each eigenvalue as an integer combination of
    the stable eigenvalues, which lets resonances be decided exactly.
    """
    values: ComplexInterval
    vectors: ComplexInterval
    lattice: np.ndarray | None = None
    inverse: ComplexInterval | None = None

    def __post_init__(self):
        if self.inverse is None:
            self.inverse = verified_inverse(self.vectors)

    @property
    def n(self) -> int:
        return self.values.shape[0]

    def side_indices(self, side: str) -> list[int]:
        re = self.values.re
        if side == "stable":
            return [i for i in range(self.n) if re.hi[i] < 0]
        if side == "unstable":
            return [i for i in range(self.n) if re.lo[i] > 0]
        raise ValueError("side must be 'stable' or 'unstable'")


def sh_eigendata(sp: Spectrum) -> EigenData:
    return EigenData(sp.eigenvalues, sp.Vhat, sp.lattice)


def eigvec_scale(eig: EigenData, idx: int, target: float = 0.5) -> float:
    """Real factor c with |c V_idx|_2 = target (computed at the midpoint)."""
    v = eig.vectors.mid()[:, idx]
    return float(target / np.linalg.norm(v))


# ---------------------------------------------------------------------------
# resonance decisions

def decide_zero(expr: ComplexInterval, lattice_vec=None, what: str = "") -> bool:
    """Is the exact value of ``expr`` zero?

    With an integer lattice vector the answer is exact (the stable eigenvalues
    are linearly independent over the integers); the enclosure must agree.
    Without one, an enclosure excluding 0 means nonzero, the point 0 means zero,
    and anything else is undecidable.
    """
    if lattice_vec is not None:
        exact = not np.any(np.asarray(lattice_vec) != 0)
        if exact and not bool(expr.contains_zero()):
            raise ResonanceUndecidable(f"lattice and enclosure disagree at {what}")
        if not exact and float(expr.mig()) < DEGENERATE_TOL:
            raise ResonanceUndecidable(f"resonance undecidable, tighten intervals: {what}")
        return exact
    if not bool(expr.contains_zero()):
        if float(expr.mig()) < DEGENERATE_TOL:
            raise ResonanceUndecidable(f"resonance undecidable, tighten intervals: {what}")
        return False
    if float(np.max(expr.width())) == 0.0:
        return True
    raise ResonanceUndecidable(f"resonance undecidable, tighten intervals: {what}")


def check_manifold_resonance(values: ComplexInterval, stable: list[int], N: int,
                             lattice: np.ndarray | None = None) -> list:
    """All (alpha, j) with alpha . mu_s - mu_j = 0 for 2 <= |alpha| <= max(N, cutoff).

    Same decision rule as decide_zero, applied to all candidates at once.
    """
    mus = values[np.array(stable)]
    m = len(stable)
    re_abs = values.re.mag()
    min_re = float(np.min(values.re.mig()[np.array(stable)]))
    cutoff = int(np.ceil((float(np.max(re_abs)) + min_re) / min_re))
    alphas = multi_indices(m, max(N, cutoff))[n_coeffs(m, 1):]
    lam = ComplexInterval.zeros((len(alphas),))
    for k in range(m):
        lam = lam + mus[k] * Interval(alphas[:, k].astype(float))
    hits = np.zeros((len(alphas), values.shape[0]), dtype=bool)
    for j in range(values.shape[0]):
        expr = lam - values[j]
        c0 = expr.contains_zero()
        tiny = expr.mig() < DEGENERATE_TOL
        if lattice is not None:
            lat = alphas @ lattice[np.array(stable)] - lattice[j]
            exact = np.all(lat == 0, axis=1)
            if np.any(exact & ~c0):
                a = alphas[np.argmax(exact & ~c0)]
                raise ResonanceUndecidable(f"lattice and enclosure disagree at alpha={tuple(a)}, j={j + 1}")
            bad = ~exact & tiny
        else:
            point = np.maximum(expr.re.width(), expr.im.width()) == 0.0
            exact = c0 & point
            bad = (~c0 & tiny) | (c0 & ~point)
        if np.any(bad):
            a = alphas[np.argmax(bad)]
            raise ResonanceUndecidable(f"resonance undecidable, tighten intervals: alpha={tuple(int(x) for x in a)}, j={j + 1}")
        hits[:, j] = exact
    return [(tuple(int(x) for x in alphas[i]), j + 1) for i, j in zip(*np.nonzero(hits))]


# ---------------------------------------------------------------------------

@dataclass
class RadiiBounds:
    KN: Interval
    Y0: Interval
    Z1: Interval
    Z2_const: Interval
    Z2_lin: Interval
    r0: Interval | None = None
    p_r0: Interval | None = None

    def poly(self, r: float) -> Interval:
        ri = Interval(r)
        z2 = self.Z2_const + self.Z2_lin * ri
        return z2 * ri * ri + (self.Z1 - 1.0) * ri + self.Y0

    def to_json(self) -> dict:
        from .report import iv_json

        d = {k: iv_json(getattr(self, k)) for k in ("KN", "Y0", "Z1", "Z2_const", "Z2_lin")}
        d["r0"] = None if self.r0 is None else iv_json(self.r0)
        d["p_r0"] = None if self.p_r0 is None else iv_json(self.p_r0)
        return d


@dataclass
class ManifoldParam:
    side: str
    m: int
    P: MultiSeries
    scaling: tuple
    Omega: ComplexInterval
    field: FieldSpec
    eig: EigenData
    idx: tuple
    r0: Interval | None = None
    bounds: RadiiBounds | None = None

    @property
    def N(self) -> int:
        return self.P.order

    def p1(self) -> MultiSeries:
        return self.P.component(0)

    def norm(self) -> Interval:
        """|P^N| in (l1)^n (sum over components), plus r0 when known."""
        nrm = self.P.norm_l1()
        if self.r0 is not None:
            nrm = nrm + self.r0
        return nrm

    def flow_sigma(self, sigma0, x: float) -> np.ndarray:
        return np.exp(self.Omega.mid() * x) * np.asarray(sigma0, dtype=complex)

    def real_trace(self, s: float, t: float) -> np.ndarray:
        return real_trace(self, s, t)

    def to_json(self) -> dict:
        from .report import iv_json

        return {"side": self.side, "N": self.N, "scaling": [float(c) for c in self.scaling],
                "bounds": None if self.bounds is None else self.bounds.to_json(),
                "r0": None if self.r0 is None else iv_json(self.r0)}


def solve_manifold_coeffs(fld: FieldSpec, eig: EigenData, side: str, N: int, scaling) -> ManifoldParam:
    """Order-by-order solution of the invariance equation through |alpha| = N."""
    idx = eig.side_indices(side)
    m = len(idx)
    if m not in (1, 2):
        raise ValueError("need a one- or two-dimensional manifold")
    scaling = tuple(scaling) if np.ndim(scaling) else (scaling,) * m
    if any(float(np.abs(c)) == 0 for c in scaling):
        raise ValueError("scaling must be nonzero")
    res = check_manifold_resonance(eig.values, idx, N, eig.lattice)
    if res:
        raise ResonanceUndecidable(f"manifold resonance at {res[0]}")
    n = fld.n
    mus = eig.values[np.array(idx)]
    V = eig.vectors
    w_last = eig.inverse[:, n - 1]
    c0, c1, c2, c3 = fld.poly
    P = MultiSeries.zeros(m, N, (n,))
    P.coeffs[0] = ComplexInterval.point(np.array(fld.equilibrium, dtype=complex))
    for k in range(m):
        e = [0] * m
        e[k] = 1
        P.coeffs[index_of(e)] = V[:, idx[k]] * scaling[k]
    p1 = P.component(0)
    pp = MultiSeries.zeros(m, N)
    pp.coeffs[: n_coeffs(m, 1)] = cauchy(p1.resized(1), p1.resized(1), 1).coeffs
    companion = _is_companion(fld.linear)
    Vrow = ComplexInterval._raw(V.re[None, :, :], V.im[None, :, :])
    mu_row = ComplexInterval._raw(eig.values.re[None, :], eig.values.im[None, :])
    sign = -1.0 if n % 2 == 0 else 1.0
    for d in range(2, N + 1):
        sl = slice(n_coeffs(m, d - 1), n_coeffs(m, d))
        alphas = multi_indices(m, d)[sl]
        pp.coeffs[sl] = cauchy_degree(p1, p1, d)
        ppp = cauchy_degree(pp, p1, d)
        q = -(pp.coeffs[sl] * c2 + ppp * c3)
        lam = ComplexInterval.zeros((len(alphas),))
        for k in range(m):
            lam = lam + mus[k] * Interval(alphas[:, k].astype(float))
        lam_col = ComplexInterval._raw(lam.re[:, None], lam.im[:, None])
        div = mu_row - lam_col
        bad = div.contains_zero()
        if np.any(bad):
            a, j = np.argwhere(bad)[0]
            raise ArithmeticError(f"singular linear solve at alpha={tuple(alphas[a])}, j={j + 1}")
        if companion:
            # V is Vandermonde, so V diag(1/(mu_i - lam)) V^{-1} e_n collapses by
            # divided differences to (1, lam, .., lam^{n-1}) (-1)^{n-1} / prod_k (mu_k - lam)
            den = div[:, 0]
            for k in range(1, n):
                den = den * div[:, k]
            p = q * sign / den
            rows = [p]
            for _ in range(n - 1):
                rows.append(rows[-1] * lam)
            coef = ComplexInterval.stack(rows, axis=1)
        else:
            w = (ComplexInterval._raw(w_last.re[None, :], w_last.im[None, :]) *
                 ComplexInterval._raw(q.re[:, None], q.im[:, None])) / div
            coef = (Vrow * ComplexInterval._raw(w.re[:, None, :], w.im[:, None, :])).sum(axis=-1)
        P.coeffs[sl] = coef
        p1 = P.component(0)
        pp.coeffs[sl] = cauchy_degree(p1, p1, d)
    return ManifoldParam(side, m, P, scaling, mus, fld, eig, tuple(idx))


def invariance_residual(mp: ManifoldParam) -> MultiSeries:
    """Coefficients of G(P^N) - DP^N Omega sigma through order N."""
    P = mp.P
    N = P.order
    n = mp.field.n
    c0, c1, c2, c3 = mp.field.poly
    L = ComplexInterval.point(mp.field.linear.astype(complex))
    LP = (ComplexInterval._raw(L.re[None], L.im[None]) @
          ComplexInterval._raw(P.coeffs.re[..., None], P.coeffs.im[..., None]))[..., 0]
    p1 = P.component(0)
    pp = cauchy(p1, p1, N)
    ppp = cauchy(pp, p1, N)
    q = p1.coeffs * c1 + pp.coeffs * c2 + ppp.coeffs * c3
    q[0] = q[0] + c0
    G = LP.copy()
    G[:, n - 1] = G[:, n - 1] + q
    alphas = multi_indices(mp.m, N)
    lam = ComplexInterval.zeros((len(alphas),))
    for k in range(mp.m):
        lam = lam + mp.Omega[k] * Interval(alphas[:, k].astype(float))
    DPO = P.coeffs * ComplexInterval._raw(lam.re[:, None], lam.im[:, None])
    return MultiSeries(mp.m, N, G - DPO, P.delta)


# ---------------------------------------------------------------------------
# validation (Swift-Hohenberg)

def compute_KN(sp: Spectrum, N: int) -> Interval:
    """K_N = |Vhat|_1 max_i |(Vhat^{-1})_{i,4}| / (N sqrt(rho) cos(theta/2))."""
    if N < 1:
        raise ValueError("N >= 1 required")
    Vi = verified_inverse(sp.Vhat)
    nv = mat_norm_col1(sp.Vhat)
    mx = Vi[:, 3].abs().max()
    den = sp.sqrt_rho * sp.cos_half * float(N)
    return nv * mx / den


def manifold_radii_bounds(mp: ManifoldParam, sp: Spectrum, nuhat: Interval | float) -> RadiiBounds:
    nu = nuhat if isinstance(nuhat, Interval) else Interval.exact(float(nuhat))
    N = mp.N
    KN = compute_KN(sp, N)
    p1 = mp.p1()
    pp = cauchy(p1, p1, 2 * N)
    ppp = cauchy(pp, p1, 3 * N)
    s_pp_tail = pp.norm_l1("tail", N)
    s_ppp_tail = ppp.norm_l1("tail", N)
    p1_norm = p1.project("tail", 0).norm_l1()
    pp_norm = pp.project("tail", 0).norm_l1()
    Y0 = KN * (nu * s_pp_tail + s_ppp_tail)
    Z1 = KN * (nu * 2.0 * p1_norm + pp_norm * 3.0)
    Z2c = KN * (nu * 2.0 + p1_norm * 6.0)
    Z2l = KN * 3.0
    return RadiiBounds(KN, Y0, Z1, Z2c, Z2l)


def find_radius(b: RadiiBounds, grid=RADIUS_GRID) -> RadiiBounds:
    """Smallest grid radius with p(r) = Z2(r) r^2 + (Z1 - 1) r + Y0 < 0."""
    if not float(b.Z1.hi) < 1.0:
        raise ContractionError("contraction not verified; increase N")
    for r in grid:
        p = b.poly(float(r))
        if float(p.hi) < 0:
            b.r0 = Interval(float(r))
            b.p_r0 = p
            return b
    raise ContractionError("contraction not verified; increase N")


def validate_manifold(mp: ManifoldParam, sp: Spectrum) -> ManifoldParam:
    b = manifold_radii_bounds(mp, sp, sp.params.nuhat_iv)
    find_radius(b)
    mp.bounds = b
    mp.r0 = b.r0
    return mp


def sh_manifold(sp: Spectrum, side: str = "stable", N: int = 35, scale: float = 0.5,
                validate: bool = True) -> ManifoldParam:
    eig = sh_eigendata(sp)
    idx = eig.side_indices(side)
    c = eigvec_scale(eig, idx[0], scale)
    mp = solve_manifold_coeffs(sh_field(sp.params), eig, side, N, (c, c))
    if validate:
        validate_manifold(mp, sp)
    return mp


def real_trace(mp: ManifoldParam, s: float, t: float, check: bool = True) -> np.ndarray:
    """Real point P(s + it, s - it) of a conjugate-symmetric parameterisation."""
    if s * s + t * t > 1.0:
        raise ValueError("(s, t) outside the unit disc")
    sig = (complex(s, t), complex(s, -t))
    if check:
        val = mp.P.eval([ComplexInterval.point(sig[0]), ComplexInterval.point(sig[1])])
        if not bool(np.all(val.im.contains_zero())):
            raise ArithmeticError("conjugate symmetry violated")
    return mp.P.eval_mid(np.array(sig)).real


def conjugate_symmetric(P: MultiSeries) -> bool:
    """p_{mn} and conj(p_{nm}) have overlapping enclosures for all stored indices."""
    idx = P.indices()
    swap = np.array([index_of((b, a)) for a, b in idx])
    Q = P.coeffs[swap].conj()
    c = P.coeffs
    ok = (np.maximum(c.re.lo, Q.re.lo) <= np.minimum(c.re.hi, Q.re.hi)) & \
         (np.maximum(c.im.lo, Q.im.lo) <= np.minimum(c.im.hi, Q.im.hi))
    return bool(np.all(ok))
