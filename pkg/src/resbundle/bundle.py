"""Resonant normal-form frames for the linearisation along a stable manifold.

We look for a matrix series W(sigma) = W0 Wt(sigma) and a polynomial A(sigma)
solving the bundle conjugacy equation

    DG(P(sigma)) W(sigma) - DW(sigma) Omega_s sigma - W(sigma) A(sigma) = 0,

with W0 the eigenvector matrix of DG(P_0) and A = diag(mu) plus entries only at
resonant slots.  Writing DG(P) = DG(P_0) + e_n g(sigma) e_1^T, each order alpha
gives the homological equation

    (alpha . mu_s + mu_j - mu_i) wt^{ij}_alpha + a^{ij}_alpha = st^{ij}_alpha,
    st_alpha = (W0^{-1} e_n) (g * r)_alpha - sum_{beta != 0, alpha} Wt_{alpha-beta} A_beta,

where r = e_1^T W is the first row of the frame.  Off resonance a = 0; on a
resonance the free coefficient wt is set to 0 and a absorbs st.
"""

from __future__ import annotations

import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .interval import (ComplexInterval, Interval, cexp, mat_norm_col1, sum_up,
                       verified_inverse)
from .manifold import (RADIUS_GRID, ContractionError, EigenData, FieldSpec,
                       ManifoldParam, ResonanceUndecidable, _is_companion,
                       decide_zero)
from .series import (MultiSeries, cauchy, cauchy_degree, column_norms,
                     derivative, index_of, multi_indices, n_coeffs)


# ---------------------------------------------------------------------------
# resonances

@dataclass
class ResonanceTable:
    """Res_{i,j} for 1-based (i, j); absent keys are empty sets."""
    entries: dict = field(default_factory=dict)
    n: int = 4

    def __getitem__(self, ij) -> list:
        return self.entries.get(tuple(ij), [])

    def contains(self, i: int, j: int, alpha) -> bool:
        return tuple(alpha) in self[(i, j)]

    def slots(self) -> list:
        """Flat list of (i, j, beta)."""
        return [(i, j, b) for (i, j), bs in sorted(self.entries.items()) for b in bs]

    def max_order(self) -> int:
        return max((sum(b) for _, _, b in self.slots()), default=0)

    def as_dict(self) -> dict:
        return {f"{i},{j}": [list(b) for b in bs] for (i, j), bs in sorted(self.entries.items()) if bs}


def _lattice_of(eig: EigenData):
    return eig.lattice


def resonance_sets(eig: EigenData, stable: list[int] | None = None,
                   i_range=None, j_range=None) -> ResonanceTable:
    """All alpha (|alpha| >= 1) with alpha . mu_s + mu_j - mu_i = 0.

    Candidates are scanned up to |alpha| <= ceil(|Re(mu_i - mu_j)| / min|Re mu_s|);
    beyond that the real part alone cannot vanish.
    """
    if stable is None:
        stable = eig.side_indices("stable")
    n = eig.n
    mu = eig.values
    mus = mu[np.array(stable)]
    m = len(stable)
    lat = eig.lattice
    min_re = float(np.min(mu.re.mig()[np.array(stable)]))
    if min_re <= 0:
        raise ResonanceUndecidable("stable eigenvalues must have negative real part")
    i_range = range(1, n + 1) if i_range is None else i_range
    j_range = range(1, n + 1) if j_range is None else j_range
    table = {}
    for i in i_range:
        for j in j_range:
            d = mu[j - 1] - mu[i - 1]
            cut = int(np.ceil(float(d.re.mag()) / min_re)) if float(d.re.mag()) > 0 else 0
            found = []
            for deg in range(1, cut + 1):
                for a in multi_indices(m, deg)[n_coeffs(m, deg - 1):]:
                    alpha = tuple(int(x) for x in a)
                    expr = d + sum((mus[k] * float(alpha[k]) for k in range(m)), ComplexInterval.point(0.0))
                    lv = None
                    if lat is not None:
                        lv = sum(alpha[k] * lat[stable[k]] for k in range(m)) + lat[j - 1] - lat[i - 1]
                    if decide_zero(expr, lv, f"alpha={alpha}, i={i}, j={j}"):
                        found.append(alpha)
            if found:
                table[(i, j)] = found
    return ResonanceTable(table, n)


# ---------------------------------------------------------------------------
# series pieces

def g_series(P: ManifoldParam, order: int | None = None) -> MultiSeries:
    """g = q'(p1) - q'(p1_0) with p1 the first component of P; quadratic in P, so
    the truncation at 2N is exact for P^N."""
    c0, c1, c2, c3 = P.field.poly
    p0 = P.field.equilibrium[0]
    pt = P.p1().copy()
    pt.coeffs[0] = ComplexInterval.zeros(())
    order = 2 * P.N if order is None else order
    sq = cauchy(pt, pt, order)
    lin = pt.resized(order)
    g = lin.scale(c2 * 2.0 + c3 * (6.0 * p0)) + sq.scale(c3 * 3.0)
    g.coeffs[0] = ComplexInterval.zeros(())
    return g


def dG_series(P: ManifoldParam, order: int | None = None) -> MultiSeries:
    """Matrix series DG(P(sigma)) truncated at 2N (exact for the polynomial P^N)."""
    fld = P.field
    n = fld.n
    g = g_series(P, order)
    out = MultiSeries.zeros(P.m, g.order, (n, n))
    out.coeffs[0] = fld.dg_eq()
    out.coeffs[:, n - 1, 0] = out.coeffs[:, n - 1, 0] + g.coeffs
    return out


def _is_vandermonde(eig: EigenData) -> bool:
    """Row k of the eigenvector enclosure overlaps mu^k for every k (first row exactly 1)."""
    V, mu = eig.vectors, eig.values
    if not (np.all(V.re.lo[0] == 1.0) and np.all(V.re.hi[0] == 1.0) and np.all(V.im.mag()[0] == 0.0)):
        return False
    pw = ComplexInterval.point(np.ones(eig.n))
    for k in range(1, eig.n):
        pw = pw * mu
        d = V[k] - pw
        if not bool(np.all(d.contains_zero())):
            return False
    return True


def w0_inverse_last(eig: EigenData) -> ComplexInterval:
    """Last column of W0^{-1}.  For a Vandermonde W0 this is 1/prod_{k!=i}(mu_i - mu_k),
    intersected with the verified interval inverse."""
    n = eig.n
    col = eig.inverse[:, n - 1]
    v = eig.values
    if _is_vandermonde(eig):
        vals = []
        for i in range(n):
            den = ComplexInterval.point(1.0)
            for k in range(n):
                if k != i:
                    den = den * (v[i] - v[k])
            vals.append(ComplexInterval.point(1.0) / den)
        vd = ComplexInterval.stack(vals)
        re = Interval._raw(np.maximum(vd.re.lo, col.re.lo), np.minimum(vd.re.hi, col.re.hi))
        im = Interval._raw(np.maximum(vd.im.lo, col.im.lo), np.minimum(vd.im.hi, col.im.hi))
        if np.all(re.lo <= re.hi) and np.all(im.lo <= im.hi):
            return ComplexInterval._raw(re, im)
    return col


def _intersect_where(a: ComplexInterval, b: ComplexInterval, mask) -> ComplexInterval:
    """Entrywise intersection of two enclosures of the same quantity where ``mask``."""
    def cut(x, y):
        lo = np.where(mask, np.maximum(x.lo, y.lo), x.lo)
        hi = np.where(mask, np.minimum(x.hi, y.hi), x.hi)
        if np.any(lo > hi):
            raise ArithmeticError("disjoint enclosures of the same quantity")
        return Interval._raw(lo, hi)
    return ComplexInterval._raw(cut(a.re, b.re), cut(a.im, b.im))


def _lam(mus: ComplexInterval, alphas: np.ndarray) -> ComplexInterval:
    lam = ComplexInterval.zeros((len(alphas),))
    for k in range(alphas.shape[1]):
        lam = lam + mus[k] * Interval(alphas[:, k].astype(float))
    return lam


def _divisors(mus: ComplexInterval, mu: ComplexInterval, alphas: np.ndarray) -> ComplexInterval:
    """D[a, i, j] = alpha_a . mu_s + mu_j - mu_i."""
    lam = _lam(mus, alphas)
    L = ComplexInterval._raw(lam.re[:, None, None], lam.im[:, None, None])
    mj = ComplexInterval._raw(mu.re[None, None, :], mu.im[None, None, :])
    mi = ComplexInterval._raw(mu.re[None, :, None], mu.im[None, :, None])
    return L + mj - mi


# ---------------------------------------------------------------------------

@dataclass
class BundleBounds:
    K: Interval            # K_N^j per column
    Ya: Interval
    Yb: Interval
    Yc: Interval
    Za: Interval
    Zb: Interval
    Zc: Interval
    Y0: Interval
    Z: Interval
    r0: Interval | None = None
    p_r0: Interval | None = None

    def column(self, j: int) -> dict:
        return {k: getattr(self, k)[j] for k in ("K", "Ya", "Yb", "Yc", "Za", "Zb", "Zc")}

    def to_json(self) -> dict:
        from .report import iv_json

        cols = [{k: iv_json(v) for k, v in self.column(j).items()} for j in range(len(self.K))]
        return {"per_column_bounds": cols, "Y0": iv_json(self.Y0), "Z": iv_json(self.Z),
                "r0": None if self.r0 is None else iv_json(self.r0),
                "p_r0": None if self.p_r0 is None else iv_json(self.p_r0)}


@dataclass
class BundleFrame:
    P: ManifoldParam
    res: ResonanceTable
    W0: ComplexInterval
    Wt: MultiSeries
    W: MultiSeries
    A: dict                  # (i, j, beta) -> ComplexInterval, 1-based i, j
    g: MultiSeries
    mu: ComplexInterval      # all eigenvalues, column order
    r0: Interval | None = None
    bounds: BundleBounds | None = None

    @property
    def N(self) -> int:
        return self.Wt.order

    @property
    def m(self) -> int:
        return self.P.m

    @property
    def Omega_s(self) -> ComplexInterval:
        return self.P.Omega

    def a(self, i: int, j: int, beta) -> ComplexInterval:
        return self.A.get((i, j, tuple(beta)), ComplexInterval.point(0.0))

    def A_series(self) -> MultiSeries:
        n = self.W0.shape[0]
        order = max([sum(b) for (_, _, b) in self.A] + [0])
        S = MultiSeries.zeros(self.m, order, (n, n))
        D = ComplexInterval.zeros((n, n))
        for k in range(n):
            D[k, k] = self.mu[k]
        S.coeffs[0] = D
        for (i, j, b), v in self.A.items():
            k = index_of(b)
            S.coeffs[k, i - 1, j - 1] = S.coeffs[k, i - 1, j - 1] + v
        return S

    def A_at(self, sigma) -> np.ndarray:
        """Midpoint value of A(sigma)."""
        n = self.W0.shape[0]
        M = np.diag(self.mu.mid())
        for (i, j, b), v in self.A.items():
            M[i - 1, j - 1] += complex(v.mid()) * np.prod(np.asarray(sigma, complex) ** np.array(b))
        return M

    def W_at(self, sigma, rigorous: bool = False):
        """W(sigma); with ``rigorous`` an enclosure including the validated tail."""
        if not rigorous:
            return self.W.eval_mid(np.asarray(sigma, dtype=complex))
        sig = [s if isinstance(s, ComplexInterval) else ComplexInterval.point(s) for s in np.atleast_1d(sigma)] \
            if not isinstance(sigma, list) else sigma
        val = self.W.eval(sig)
        if self.r0 is not None:
            rad = (mat_norm_col1(self.W0) * self.r0).hi
            val = val + ComplexInterval.from_midrad(np.zeros(val.shape), float(rad))
        return val

    def resonant_a_norms(self) -> Interval:
        """sum_{i, beta in Res_ij} |a^{ij}_beta| per column j."""
        n = self.W0.shape[0]
        out = Interval.zeros((n,))
        for (i, j, b), v in self.A.items():
            out[j - 1] = out[j - 1] + v.abs()
        return out

    def to_json(self) -> dict:
        from .report import iv_json

        return {"resonance_table": self.res.as_dict(),
                "A_polynomial": [{"i": i, "j": j, "beta": list(b), "value": iv_json(v)}
                                 for (i, j, b), v in sorted(self.A.items())],
                "N": self.N,
                **(self.bounds.to_json() if self.bounds is not None else {})}


def solve_bundle_coeffs(P: ManifoldParam, res: ResonanceTable | None = None, N: int | None = None) -> BundleFrame:
    """Order-by-order fixed point of the homological equations through |alpha| = N."""
    fld = P.field
    eig = P.eig
    n = fld.n
    m = P.m
    N = P.N if N is None else N
    if res is None:
        res = resonance_sets(eig, list(P.idx))
    if N <= max(2, res.max_order()):
        raise ValueError("N must exceed every resonance order (N > 2)")
    mu = eig.values
    mus = P.Omega
    W0 = eig.vectors
    u = w0_inverse_last(eig)
    g = g_series(P, 2 * N)
    if g.order < N:
        g = g.resized(N)
    Wt = MultiSeries.zeros(m, N, (n, n))
    Wt.coeffs[0] = ComplexInterval.eye(n)
    row1 = W0[0]
    r = MultiSeries.zeros(m, N, (n,))
    r.coeffs[0] = row1
    A: dict = {}
    res_slots = res.slots()
    ucol = ComplexInterval._raw(u.re[None, :, None], u.im[None, :, None])
    vandermonde = bool(np.all(row1.re.lo == 1.0) and np.all(row1.re.hi == 1.0) and
                       np.all(row1.im.lo == 0.0) and np.all(row1.im.hi == 0.0))
    mu_row = ComplexInterval._raw(mu.re[None, None, :], mu.im[None, None, :])
    for d in range(1, N + 1):
        sl = slice(n_coeffs(m, d - 1), n_coeffs(m, d))
        alphas = multi_indices(m, d)[sl]
        gr = cauchy_degree(g, r, d)
        T = ComplexInterval.zeros((len(alphas), n, n))
        for (i, j, b) in res_slots:
            if sum(b) >= d or (i, j, b) not in A:
                continue
            a = A[(i, j, b)]
            for t, al in enumerate(alphas):
                diff = tuple(int(x) for x in al - np.array(b))
                if min(diff) < 0:
                    continue
                T[t, :, j - 1] = T[t, :, j - 1] + Wt.coeffs[index_of(diff), :, i - 1] * a
        S = ucol * ComplexInterval._raw(gr.re[:, None, :], gr.im[:, None, :]) - T
        D = _divisors(mus, mu, alphas)
        resmask = np.zeros(S.shape, dtype=bool)
        for (i, j, b) in res_slots:
            if sum(b) != d:
                continue
            t = int(np.nonzero((alphas == np.array(b)).all(axis=1))[0][0])
            resmask[t, i - 1, j - 1] = True
            A[(i, j, b)] = S[t, i - 1, j - 1]
        bad = D.contains_zero() & ~resmask
        if np.any(bad):
            t, i, j = np.argwhere(bad)[0]
            raise ResonanceUndecidable(f"unclassified resonance at ({tuple(alphas[t])},{i + 1},{j + 1})")
        Dsafe = ComplexInterval._raw(Interval._raw(np.where(resmask, 1.0, D.re.lo), np.where(resmask, 1.0, D.re.hi)),
                                     Interval._raw(np.where(resmask, 0.0, D.im.lo), np.where(resmask, 0.0, D.im.hi)))
        out = S / Dsafe
        zero = ComplexInterval.zeros(())
        for t, i, j in np.argwhere(resmask):
            out[t, i, j] = zero
        Wt.coeffs[sl] = out
        R1 = ComplexInterval._raw(row1.re[None, None, :], row1.im[None, None, :])
        rd = (R1 @ out)[:, 0, :]
        if vandermonde:
            # sum_i u_i / (z - mu_i) = 1 / prod_k (z - mu_k) with z = alpha.mu_s + mu_j;
            # summing the terms one by one loses this cancellation and the widths
            # then grow geometrically with the order
            lam = _lam(mus, alphas)
            z = ComplexInterval._raw(lam.re[:, None, None], lam.im[:, None, None]) + \
                ComplexInterval._raw(mu.re[None, :, None], mu.im[None, :, None])
            zk = z - mu_row
            prod = zk[:, :, 0]
            for k in range(1, n):
                prod = prod * zk[:, :, k]
            fine = ~np.any(resmask, axis=1)
            prod = ComplexInterval._raw(
                Interval._raw(np.where(fine, prod.re.lo, 1.0), np.where(fine, prod.re.hi, 1.0)),
                Interval._raw(np.where(fine, prod.im.lo, 0.0), np.where(fine, prod.im.hi, 0.0)))
            rt = gr / prod - (T / Dsafe).sum(axis=1)
            rd = _intersect_where(rd, rt, fine)
        r.coeffs[sl] = rd
    W0b = ComplexInterval._raw(W0.re[None], W0.im[None])
    W = MultiSeries(m, N, W0b @ Wt.coeffs, 1.0)
    return BundleFrame(P, res, W0, Wt, W, A, g, mu)


def conjugacy_residual(B: BundleFrame) -> MultiSeries:
    """Coefficients of DG(P) W - DW Omega_s sigma - W A through order N."""
    N = B.N
    G = dG_series(B.P, N)
    GW = cauchy(G, B.W, N)
    WA = cauchy(B.W, B.A_series(), N)
    lam = _lam(B.Omega_s, multi_indices(B.m, N))
    L = ComplexInterval._raw(lam.re[:, None, None], lam.im[:, None, None])
    DWO = B.W.coeffs * L
    return MultiSeries(B.m, N, GW.coeffs - DWO - WA.coeffs)


def kappa_apply(b: MultiSeries, i: int, j: int, res: ResonanceTable, eig: EigenData,
                stable: list[int] | None = None) -> MultiSeries:
    """Entrywise kappa^{ij}: identity on Res_{ij}, division by the divisor elsewhere (|alpha| >= 1)."""
    stable = eig.side_indices("stable") if stable is None else stable
    mus = eig.values[np.array(stable)]
    alphas = b.indices()
    out = b.copy()
    lam = _lam(mus, alphas)
    D = lam + eig.values[j - 1] - eig.values[i - 1]
    for t, al in enumerate(alphas):
        if t == 0:
            continue
        if res.contains(i, j, tuple(int(x) for x in al)):
            continue
        if bool(D[t].contains_zero()):
            raise ResonanceUndecidable(f"divisor contains zero at ({tuple(al)},{i},{j})")
        out.coeffs[t] = b.coeffs[t] / D[t]
    return out


# ---------------------------------------------------------------------------
# validation

def ghat_tail_bound(eps, p1_head_norm, nuhat) -> Interval:
    """eps_inf = 2 nuhat eps + 3 (2 |p1| eps + eps^2) for the Swift-Hohenberg nonlinearity."""
    e = eps if isinstance(eps, Interval) else Interval(float(eps))
    p = p1_head_norm if isinstance(p1_head_norm, Interval) else Interval(float(p1_head_norm))
    nu = nuhat if isinstance(nuhat, Interval) else Interval.exact(float(nuhat))
    return nu * e * 2.0 + (p * e * 2.0 + e * e) * 3.0


def field_tail_bound(P: ManifoldParam, eps) -> Interval:
    """eps_inf for a general cubic field: |g(p + h) - g(p)| <= eps (|2c2 + 6c3 p0| + 3|c3|(2|pt| + eps))."""
    c0, c1, c2, c3 = P.field.poly
    p0 = P.field.equilibrium[0]
    e = eps if isinstance(eps, Interval) else Interval(float(eps))
    pt = P.p1().project("tail", 0).norm_l1()
    lin = (c2 * 2.0 + c3 * (6.0 * p0)).abs()
    return e * lin + c3.abs() * 3.0 * (pt * e * 2.0 + e * e)


def min_real_part(eig: EigenData) -> Interval:
    """Lower enclosure of min_k |Re mu_k| (equals sqrt(rho) cos(theta/2) for SH)."""
    mg = eig.values.re.mig()
    return Interval(float(np.min(mg)))


def bundle_KN(c: Interval, N: int, j: int, stable_cols: int = 2) -> Interval:
    """K_N^j = 1/((N+1) c) for stable columns, 1/(N c) otherwise (c = min |Re mu|)."""
    if N <= 2:
        raise ValueError("N > 2 required")
    k = N + 1 if j <= stable_cols else N
    return Interval(1.0) / (c * float(k))


def bundle_KN_sharp(eig: EigenData, N: int, j: int, stable: list[int] | None = None) -> Interval:
    """sup_{|alpha| >= N+1, i} 1/|alpha.mu_s + mu_j - mu_i| bounded through real parts:
    |Re| >= (N+1) c - max_i Re(mu_j - mu_i)^+ with c = min |Re mu_s|.

    For SH this is 1/((N+1) c) on stable columns and 1/((N-1) c) on unstable ones;
    the latter is attained (alpha with alpha_1 - alpha_2 = 2 when N is odd), so the
    printed 1/(N c) is not an upper bound there.
    """
    if N <= 2:
        raise ValueError("N > 2 required")
    stable = eig.side_indices("stable") if stable is None else stable
    mu = eig.values
    c = Interval(float(np.min(mu.re.mig()[np.array(stable)])))
    gap = (mu.re[j - 1] - mu.re).hi
    shift = Interval(float(max(0.0, np.max(gap))))
    den = c * float(N + 1) - shift
    if not float(den.lo) > 0:
        raise ContractionError("tail divisors not bounded away from zero; increase N")
    return Interval(1.0) / den


def _threads() -> int:
    try:
        return max(1, int(os.environ.get("RB_THREADS", "1")))
    except ValueError:
        return 1


def bundle_validate(B: BundleFrame, eps_inf: Interval, grid=RADIUS_GRID) -> BundleBounds:
    P = B.P
    eig = P.eig
    n = B.W0.shape[0]
    m = B.m
    N = B.N
    ms = len(P.idx)
    c = min_real_part(eig)
    if isinstance(eps_inf, (int, float)):
        eps_inf = Interval(float(eps_inf))
    W0 = B.W0
    W0_norm = mat_norm_col1(W0)
    W0inv_norm = mat_norm_col1(eig.inverse)
    u = w0_inverse_last(eig)
    u_norm = u.abs().sum()
    rowmax = W0[0].abs().max()
    g = B.g.resized(2 * N)
    g_norm = g.norm_l1()
    r = MultiSeries(m, N, B.W.coeffs[:, 0, :])
    gr = cauchy(g, r, 3 * N)
    k0 = n_coeffs(m, N)
    alphas = multi_indices(m, 3 * N)[k0:]
    D = _divisors(P.Omega, B.mu, alphas)
    Wcol = column_norms(B.W)
    Wt = B.Wt

    stable = list(P.idx)

    def column(j):
        K = bundle_KN_sharp(eig, N, j + 1, stable)
        # Y^a: exact tail of (W0^{-1} e_n)(g^N * r^N) with its divisors
        term = ComplexInterval._raw(u.re[None, :], u.im[None, :]) * \
            ComplexInterval._raw(gr.coeffs.re[k0:, j][:, None], gr.coeffs.im[k0:, j][:, None])
        Ya = (term / D[:, :, j]).abs().sum()
        Yb = K * W0inv_norm * eps_inf * Wcol[j]
        Yc = Interval(0.0)
        Zc = Interval(0.0)
        for (i, jj, b), a in B.A.items():
            if jj != j + 1:
                continue
            s = Interval(0.0)
            lo, hi = N + 1, N + sum(b)
            for al in multi_indices(m, hi)[n_coeffs(m, lo - 1):]:
                diff = al - np.array(b)
                if diff.min() < 0:
                    continue
                w = Wt.coeffs[index_of(tuple(diff)), :, i - 1]
                lam = sum((P.Omega[k] * float(al[k]) for k in range(m)), ComplexInterval.point(0.0))
                den = lam + B.mu[j] - B.mu
                s = s + (w / den).abs().sum()
            Yc = Yc + a.abs() * s
            # W^inf_{alpha-beta} a_beta lives at |alpha| >= N + 1 + |beta|
            Zc = Zc + a.abs() * bundle_KN_sharp(eig, N + sum(b), j + 1, stable)
        Za = K * g_norm * u_norm * rowmax
        Zb = K * eps_inf * W0inv_norm * W0_norm
        return K, Ya, Yb, Yc, Za, Zb, Zc

    nt = _threads()
    if nt > 1:
        with ThreadPoolExecutor(nt) as ex:
            cols = list(ex.map(column, range(n)))
    else:
        cols = [column(j) for j in range(n)]
    fields = list(zip(*cols))

    def stack(vals):
        return Interval(np.array([float(v.lo) for v in vals]), np.array([float(v.hi) for v in vals]))

    K, Ya, Yb, Yc, Za, Zb, Zc = (stack(f) for f in fields)
    Ycol = Ya + Yb + Yc
    Zcol = Za + Zb + Zc
    Y0 = Interval(float(np.max(Ycol.lo)), float(np.max(Ycol.hi)))
    Z = Interval(float(np.max(Zcol.lo)), float(np.max(Zcol.hi)))
    bb = BundleBounds(K, Ya, Yb, Yc, Za, Zb, Zc, Y0, Z)
    if not float(Z.hi) < 1.0:
        B.bounds = bb
        raise ContractionError("bundle contraction not verified")
    for rr in grid:
        p = Y0 + (Z - 1.0) * Interval(float(rr))
        if float(p.hi) < 0:
            bb.r0 = Interval(float(rr))
            bb.p_r0 = p
            break
    B.bounds = bb
    if bb.r0 is None:
        raise ContractionError("bundle contraction not verified")
    B.r0 = bb.r0
    return bb


def validate_bundle(B: BundleFrame) -> BundleBounds:
    if B.P.r0 is None:
        raise ValueError("manifold must be validated first")
    return bundle_validate(B, field_tail_bound(B.P, B.P.r0))


# ---------------------------------------------------------------------------
# normal form flow, eigen-coordinates, unstable side

def normal_form_fundamental(B: BundleFrame, sigma0, x0: float, x: float) -> ComplexInterval:
    """Fundamental matrix of V' = A(e^{Omega_s x} sigma0) V with value I at x0.

    A is upper triangular with resonant entries a^{ij}_beta sigma^beta where
    beta . mu_s + mu_j = mu_i, so each off-diagonal forcing is itself resonant and
    integrates to a^{ij}_beta sigma(x0)^beta (x - x0) e^{mu_i (x - x0)}.
    """
    if x < x0:
        raise ValueError("x >= x0 required")
    n = B.W0.shape[0]
    m = B.m
    sig0 = [s if isinstance(s, ComplexInterval) else ComplexInterval.point(s) for s in sigma0]
    for s in sig0:
        if float(s.mag()) > 1.0:
            raise ValueError("sigma0 outside the unit polydisc")
    dx = Interval(x) - Interval(x0)
    sig_x0 = [sig0[k] * cexp(B.Omega_s[k] * Interval(x0)) for k in range(m)]
    E = [cexp(B.mu[k] * dx) for k in range(n)]
    M = ComplexInterval.zeros((n, n))
    for k in range(n):
        M[k, k] = E[k]
    for (i, j, b), a in B.A.items():
        if any(jj == i for (_, jj, _) in B.A):
            raise NotImplementedError("chained resonances")
        mono = ComplexInterval.point(1.0)
        for k in range(m):
            for _ in range(b[k]):
                mono = mono * sig_x0[k]
        M[i - 1, j - 1] = M[i - 1, j - 1] + a * mono * dx * E[i - 1]
    return M


def normal_form_fundamental_mid(B: BundleFrame, sigma0, x0: float, x: float) -> np.ndarray:
    n = B.W0.shape[0]
    mu = B.mu.mid()
    sig_x0 = np.asarray(sigma0, complex) * np.exp(B.Omega_s.mid() * x0)
    M = np.diag(np.exp(mu * (x - x0)))
    for (i, j, b), a in B.A.items():
        M[i - 1, j - 1] += complex(a.mid()) * np.prod(sig_x0 ** np.array(b)) * (x - x0) * np.exp(mu[i - 1] * (x - x0))
    return M


def eigen_coordinates_extract(B: BundleFrame, S: ComplexInterval, sigma0, U1_val: ComplexInterval):
    """Solve S W(sigma0) c = U1 for c = (beta_1, beta_2, gamma_1, gamma_2) (verified)."""
    Wv = B.W_at(list(ComplexInterval.point(s) if not isinstance(s, ComplexInterval) else s for s in sigma0),
                rigorous=True)
    M = S @ Wv
    Minv = verified_inverse(M)
    c = Minv @ U1_val
    ns = len(B.P.idx)
    return c[:ns], c[ns:]


def unstable_bundle_over_unstable(Pu: ManifoldParam) -> tuple[MultiSeries, MultiSeries]:
    """(d/dsigma_1 P, d/dsigma_2 P) along the unstable manifold."""
    return derivative(Pu.P, 0), derivative(Pu.P, 1)


def symplectic_form(u: ComplexInterval, v: ComplexInterval, J: ComplexInterval) -> ComplexInterval:
    return (u * (J @ v)).sum()
