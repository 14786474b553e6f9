"""Taylor series in one or two variables with interval coefficients.

Coefficients live in a dense graded layout: for arity 2 the multi-index
(m, n) of degree d = m + n sits at position d(d+1)/2 + n, so all indices of a
given degree are contiguous.  Coefficient entries may be scalars, vectors or
square matrices (the "kind" is read off the trailing shape).

Products are computed in midpoint-radius form: midpoints are convolved in
floating point and the radius collects the propagated input radii plus an
a-priori bound on the rounding error of the midpoint sums.  The result is
converted back to rectangles.  This is the same strategy as Rump's
interval matrix product and keeps the N = 35 computations fast.
"""

from __future__ import annotations

import csv
from functools import lru_cache

import numpy as np

from .interval import (ComplexInterval, Interval, U, add_up, gamma, mul_up,
                       sum_dn, sum_up)

_CHUNK = 1 << 18


# ---------------------------------------------------------------------------
# multi-index bookkeeping

def n_coeffs(arity: int, order: int) -> int:
    if order < 0:
        return 0
    if arity == 1:
        return order + 1
    if arity == 2:
        return (order + 1) * (order + 2) // 2
    raise ValueError("arity must be 1 or 2")


@lru_cache(maxsize=None)
def multi_indices(arity: int, order: int) -> np.ndarray:
    if arity == 1:
        return np.arange(order + 1).reshape(-1, 1)
    out = [(d - n, n) for d in range(order + 1) for n in range(d + 1)]
    return np.array(out, dtype=np.int64).reshape(-1, 2)


@lru_cache(maxsize=None)
def degrees(arity: int, order: int) -> np.ndarray:
    return multi_indices(arity, order).sum(axis=1)


def index_of(alpha) -> int:
    alpha = tuple(int(a) for a in np.atleast_1d(alpha))
    if len(alpha) == 1:
        return alpha[0]
    m, n = alpha
    d = m + n
    return d * (d + 1) // 2 + n


def _index_array(alphas: np.ndarray) -> np.ndarray:
    if alphas.shape[1] == 1:
        return alphas[:, 0]
    d = alphas.sum(axis=1)
    return d * (d + 1) // 2 + alphas[:, 1]


@lru_cache(maxsize=1024)
def _pairs(arity: int, na: int, nb: int, nout: int, hat: bool, degree: int):
    """Index triples (ia, ib, iout) for a Cauchy product, grouped by iout.

    ``degree`` < 0 means every output degree up to nout, otherwise only the
    given output degree.
    """
    A = multi_indices(arity, na)
    B = multi_indices(arity, nb)
    da = A.sum(1)
    db = B.sum(1)
    ia, ib = [], []
    for i in range(len(A)):
        tot = da[i] + db
        sel = tot <= nout if degree < 0 else tot == degree
        if hat:
            sel = sel & (np.arange(len(B)) != 0)
            if i == 0:
                continue
        js = np.nonzero(sel)[0]
        ia.append(np.full(len(js), i, dtype=np.int64))
        ib.append(js)
    ia = np.concatenate(ia) if ia else np.zeros(0, np.int64)
    ib = np.concatenate(ib) if ib else np.zeros(0, np.int64)
    io = _index_array(A[ia] + B[ib]) if len(ia) else np.zeros(0, np.int64)
    order = np.argsort(io, kind="stable")
    ia, ib, io = ia[order], ib[order], io[order]
    outs, starts, counts = np.unique(io, return_index=True, return_counts=True)
    maxlen = int(counts.max()) if len(counts) else 0
    return ia, ib, outs, starts, counts, maxlen


# ---------------------------------------------------------------------------
# midpoint-radius contraction kernel

def _kind_of(tail) -> str:
    return {0: "scalar", 1: "vector", 2: "matrix"}[len(tail)]


def _op(ka: str, kb: str):
    """Return (binary op on stacked coefficient arrays, inner dimension flag)."""
    if ka == "scalar" or kb == "scalar":
        def f(x, y):
            if ka == "scalar" and kb != "scalar":
                x = x.reshape(x.shape + (1,) * (y.ndim - 1))
            elif kb == "scalar" and ka != "scalar":
                y = y.reshape(y.shape + (1,) * (x.ndim - 1))
            return x * y
        return f, False
    if ka == "matrix" and kb == "matrix":
        return (lambda x, y: np.matmul(x, y)), True
    if ka == "matrix" and kb == "vector":
        return (lambda x, y: np.matmul(x, y[..., None])[..., 0]), True
    if ka == "vector" and kb == "matrix":  # row vector times matrix
        return (lambda x, y: np.matmul(x[..., None, :], y)[..., 0, :]), True
    raise TypeError(f"incompatible coefficient kinds {ka} * {kb}")


def _result_tail(ta, tb, ka, kb):
    if ka == "scalar":
        return tb
    if kb == "scalar":
        return ta
    if ka == "matrix" and kb == "matrix":
        return (ta[0], tb[1])
    if ka == "matrix" and kb == "vector":
        return (ta[0],)
    return (tb[1],)


def _integer_exact(am, ar, bm, br, S) -> bool:
    """Point inputs with integer parts and every partial sum below 2**52 are
    multiplied and summed without rounding, so no error term is needed."""
    if np.any(ar) or np.any(br):
        return False
    for x in (am, bm):
        if not (np.all(x.real == np.round(x.real)) and np.all(x.imag == np.round(x.imag))):
            return False
    return bool(np.all(np.isfinite(S))) and float(np.max(S, initial=0.0)) * 2.0 < 2.0 ** 52


def _contract(am, ar, bm, br, ia, ib, outs, starts, maxlen, f, inner, nout_total, tail):
    """Rigorous sum over grouped index pairs of f(a[ia], b[ib])."""
    mid = np.zeros((nout_total,) + tail, dtype=complex)
    S = np.zeros((nout_total,) + tail)
    R = np.zeros((nout_total,) + tail)
    if len(ia) == 0:
        return mid, R
    aa, ba = np.abs(am), np.abs(bm)
    width = int(np.prod(tail)) if tail else 1
    step = max(1, _CHUNK // max(width, 1))
    seg_end = np.append(starts[1:], len(ia))
    k = 0
    nseg = len(starts)
    while k < nseg:
        # take whole segments until the chunk budget is used
        lo = starts[k]
        k2 = np.searchsorted(seg_end, lo + step, side="right")
        k2 = max(k2, k + 1)
        hi = seg_end[k2 - 1]
        sa, sb = ia[lo:hi], ib[lo:hi]
        st = starts[k:k2] - lo
        o = outs[k:k2]
        mid[o] = np.add.reduceat(f(am[sa], bm[sb]), st, axis=0)
        S[o] = np.add.reduceat(f(aa[sa], ba[sb]), st, axis=0)
        rt = f(aa[sa], br[sb]) + f(ar[sa], ba[sb]) + f(ar[sa], br[sb])
        R[o] = np.add.reduceat(rt, st, axis=0)
        k = k2
    if _integer_exact(am, ar, bm, br, S):
        return mid, R
    d = (am.shape[-1] if inner else 1)
    T = maxlen * d + 4
    g = gamma(T)
    rad = (R + 2.0 * g * S) * (1.0 + 3.0 * g) + T * 2.0 ** -1060
    rad = np.nextafter(rad, np.inf)
    return mid, rad


def _midrad(c: ComplexInterval):
    return c.mid(), c.rad()


# ---------------------------------------------------------------------------

class MultiSeries:
    """Truncated Taylor series sum_{|alpha| <= order} c_alpha sigma^alpha."""

    __slots__ = ("arity", "order", "delta", "coeffs")

    def __init__(self, arity: int, order: int, coeffs: ComplexInterval, delta: float = 1.0):
        if arity not in (1, 2):
            raise ValueError("arity must be 1 or 2")
        if delta <= 0:
            raise ValueError("delta must be positive")
        K = n_coeffs(arity, order)
        if not isinstance(coeffs, ComplexInterval):
            coeffs = ComplexInterval.point(coeffs)
        if coeffs.shape[0] != K:
            raise ValueError(f"expected {K} coefficients, got {coeffs.shape[0]}")
        if coeffs.ndim > 3:
            raise ValueError("coefficients must be scalar, vector or matrix")
        self.arity = arity
        self.order = order
        self.delta = float(delta)
        self.coeffs = coeffs

    # construction
    @classmethod
    def zeros(cls, arity, order, tail=(), delta=1.0):
        return cls(arity, order, ComplexInterval.zeros((n_coeffs(arity, order),) + tuple(tail)), delta)

    @classmethod
    def from_array(cls, arity, order, arr, delta=1.0):
        return cls(arity, order, ComplexInterval.point(np.asarray(arr, dtype=complex)), delta)

    @classmethod
    def from_dict(cls, arity, order, entries: dict, tail=(), delta=1.0):
        s = cls.zeros(arity, order, tail, delta)
        for alpha, v in entries.items():
            s.coeffs[index_of(alpha)] = v
        return s

    @classmethod
    def identity(cls, arity, order, n=None, delta=1.0):
        tail = () if n is None else (n, n)
        s = cls.zeros(arity, order, tail, delta)
        s.coeffs[0] = ComplexInterval.point(1.0 if n is None else np.eye(n))
        return s

    # properties
    @property
    def tail_shape(self):
        return self.coeffs.shape[1:]

    @property
    def kind(self) -> str:
        return _kind_of(self.tail_shape)

    def __len__(self):
        return self.coeffs.shape[0]

    def indices(self) -> np.ndarray:
        return multi_indices(self.arity, self.order)

    def degrees(self) -> np.ndarray:
        return degrees(self.arity, self.order)

    def coeff(self, alpha) -> ComplexInterval:
        i = index_of(alpha)
        if i >= len(self):
            return ComplexInterval.zeros(self.tail_shape)
        return self.coeffs[i]

    def mid(self) -> np.ndarray:
        return self.coeffs.mid()

    def copy(self):
        return MultiSeries(self.arity, self.order, self.coeffs.copy(), self.delta)

    def _check(self, other: "MultiSeries"):
        if self.arity != other.arity:
            raise ValueError("arity mismatch")
        if self.delta != other.delta:
            raise ValueError("weight mismatch")

    def resized(self, order: int) -> "MultiSeries":
        K = n_coeffs(self.arity, order)
        out = MultiSeries.zeros(self.arity, order, self.tail_shape, self.delta)
        k = min(K, len(self))
        out.coeffs[:k] = self.coeffs[:k]
        return out

    def component(self, key) -> "MultiSeries":
        """Series of a single entry (or row/column slice) of the coefficients."""
        if not isinstance(key, tuple):
            key = (key,)
        return MultiSeries(self.arity, self.order, self.coeffs[(slice(None),) + key], self.delta)

    def map(self, fn) -> "MultiSeries":
        return MultiSeries(self.arity, self.order, fn(self.coeffs), self.delta)

    # linear structure
    def __add__(self, other):
        self._check(other)
        n = max(self.order, other.order)
        a, b = self.resized(n), other.resized(n)
        return MultiSeries(self.arity, n, a.coeffs + b.coeffs, self.delta)

    def __sub__(self, other):
        self._check(other)
        n = max(self.order, other.order)
        a, b = self.resized(n), other.resized(n)
        return MultiSeries(self.arity, n, a.coeffs - b.coeffs, self.delta)

    def __neg__(self):
        return MultiSeries(self.arity, self.order, -self.coeffs, self.delta)

    def scale(self, c) -> "MultiSeries":
        return MultiSeries(self.arity, self.order, self.coeffs * c, self.delta)

    def __mul__(self, other):
        if isinstance(other, MultiSeries):
            return cauchy(self, other, self.order + other.order)
        return self.scale(other)

    # norms and projections
    def project(self, mode: str, N: int) -> "MultiSeries":
        return project(self, mode, N)

    def norm_l1(self, rng: str = "all", N: int | None = None) -> Interval:
        return norm_l1(self, rng, N)

    def eval(self, sigma) -> ComplexInterval:
        return evaluate(self, sigma)

    def eval_mid(self, sigma) -> np.ndarray:
        """Plain floating point evaluation at points sigma (shape (..., arity))."""
        sigma = np.asarray(sigma, dtype=complex)
        idx = self.indices()
        mono = np.prod(sigma[..., None, :] ** idx, axis=-1)
        c = self.mid()
        return np.tensordot(mono, c, axes=([-1], [0]))

    def derivative(self, var: int) -> "MultiSeries":
        return derivative(self, var)

    def to_csv(self, path, name: str = "") -> None:
        write_csv(self, path)

    def __repr__(self):
        return f"MultiSeries(arity={self.arity}, order={self.order}, kind={self.kind}, tail={self.tail_shape})"


# ---------------------------------------------------------------------------
# operations

def _product(a: MultiSeries, b: MultiSeries, out_order: int, hat: bool, degree: int = -1) -> MultiSeries:
    a._check(b)
    ka, kb = a.kind, b.kind
    f, inner = _op(ka, kb)
    tail = _result_tail(a.tail_shape, b.tail_shape, ka, kb)
    ia, ib, outs, starts, counts, maxlen = _pairs(a.arity, a.order, b.order, out_order, hat, degree)
    am, ar = _midrad(a.coeffs)
    bm, br = _midrad(b.coeffs)
    # broadcast scalar radii to entry shapes so f() can combine them
    K = n_coeffs(a.arity, out_order)
    mid, rad = _contract(am, ar, bm, br, ia, ib, outs, starts, maxlen, f, inner, K, tail)
    coeffs = ComplexInterval.from_midrad(mid, rad)
    return MultiSeries(a.arity, out_order, coeffs, a.delta)


def cauchy(a: MultiSeries, b: MultiSeries, out_order: int | None = None) -> MultiSeries:
    """Cauchy product (a*b)_alpha = sum_{beta <= alpha} a_{alpha-beta} b_beta.

    Matrix coefficients multiply in the written order (a's coefficient on the left).
    """
    if out_order is None:
        out_order = a.order + b.order
    return _product(a, b, out_order, hat=False)


def cauchy_hat(a: MultiSeries, b: MultiSeries, out_order: int | None = None) -> MultiSeries:
    """Cauchy product with the beta = 0 and beta = alpha terms left out."""
    if out_order is None:
        out_order = a.order + b.order
    return _product(a, b, out_order, hat=True)


def cauchy_degree(a: MultiSeries, b: MultiSeries, degree: int, hat: bool = False) -> ComplexInterval:
    """Coefficients of a*b of total degree ``degree`` only (for recursions)."""
    s = _product(a, b, degree, hat, degree)
    d0 = n_coeffs(a.arity, degree - 1)
    return s.coeffs[d0:]


def project(b: MultiSeries, mode: str, N: int) -> MultiSeries:
    """Pi_N (mode 'head') keeps |alpha| <= N; Pi_inf ('tail') keeps |alpha| >= N+1."""
    out = b.copy()
    K = n_coeffs(b.arity, N)
    if mode in ("head", "head_N"):
        if K < len(b):
            out.coeffs[K:] = ComplexInterval.zeros(out.coeffs[K:].shape)
    elif mode in ("tail", "tail_N"):
        k = min(K, len(b))
        out.coeffs[:k] = ComplexInterval.zeros(out.coeffs[:k].shape)
    else:
        raise ValueError(f"unknown projection mode {mode!r}")
    return out


def weights(b: MultiSeries) -> Interval:
    """Enclosures of delta^|alpha|."""
    d = Interval.point(b.delta)
    deg = b.degrees()
    if b.delta == 1.0:
        return Interval.point(np.ones(len(deg)))
    pw = [Interval.point(1.0)]
    for _ in range(int(deg.max()) if len(deg) else 0):
        pw.append(pw[-1] * d)
    lo = np.array([float(p.lo) for p in pw])
    hi = np.array([float(p.hi) for p in pw])
    return Interval(lo[deg], hi[deg])


def abs_coeffs(b: MultiSeries, rng: str = "all", N: int | None = None) -> Interval:
    """Enclosure of |b_alpha| delta^|alpha| entrywise, masked to a degree range."""
    a = b.coeffs.abs()
    w = weights(b)
    shape = (len(b),) + (1,) * len(b.tail_shape)
    wl = w.lo.reshape(shape)
    wh = w.hi.reshape(shape)
    lo = np.where(wl == 1.0, a.lo, a.lo * wl * (1 - 4 * U))
    hi = np.where(wh == 1.0, a.hi, mul_up(a.hi, np.broadcast_to(wh, a.hi.shape)))
    lo = np.maximum(lo, 0.0)
    deg = b.degrees().reshape(shape)
    if rng in ("head", "head_N"):
        mask = deg <= N
    elif rng in ("tail", "tail_from_N"):
        mask = deg >= N + 1
    elif rng == "all":
        mask = np.ones_like(deg, dtype=bool)
    else:
        raise ValueError(f"unknown range {rng!r}")
    return Interval(np.where(mask, lo, 0.0), np.where(mask, hi, 0.0))


def norm_l1(b: MultiSeries, rng: str = "all", N: int | None = None) -> Interval:
    """Weighted l1 norm sum |b_alpha| delta^|alpha|.

    Vector coefficients use the sum over components; matrix coefficients use
    the "p = 1" operator norm max_j sum_i |b^{ij}|.
    """
    a = abs_coeffs(b, rng, N)
    if b.kind == "scalar":
        return Interval(sum_dn(a.lo), sum_up(a.hi))
    if b.kind == "vector":
        return Interval(sum_dn(a.lo), sum_up(a.hi))
    lo = sum_dn(a.lo.reshape(-1, a.shape[2]), axis=0)
    hi = sum_up(a.hi.reshape(-1, a.shape[2]), axis=0)
    return Interval(np.max(lo), np.max(hi))


def column_norms(b: MultiSeries, rng: str = "all", N: int | None = None) -> Interval:
    """For matrix series: sum_i ||b^{ij}|| for each column j."""
    if b.kind != "matrix":
        raise TypeError("matrix series expected")
    a = abs_coeffs(b, rng, N)
    lo = sum_dn(a.lo.reshape(-1, a.shape[2]), axis=0)
    hi = sum_up(a.hi.reshape(-1, a.shape[2]), axis=0)
    return Interval(lo, hi)


def component_norms(b: MultiSeries, rng: str = "all", N: int | None = None) -> Interval:
    a = abs_coeffs(b, rng, N)
    return Interval(sum_dn(a.lo, axis=0), sum_up(a.hi, axis=0))


def _monomials(sigma, arity: int, order: int) -> ComplexInterval:
    pw = []
    for s in sigma:
        p = [ComplexInterval.point(1.0)]
        for _ in range(order):
            p.append(p[-1] * s)
        pw.append(ComplexInterval.stack(p))
    idx = multi_indices(arity, order)
    if arity == 1:
        return pw[0][idx[:, 0]]
    return pw[0][idx[:, 0]] * pw[1][idx[:, 1]]


def evaluate(b: MultiSeries, sigma) -> ComplexInterval:
    """Enclosure of sum_alpha b_alpha sigma^alpha over the stored orders."""
    sig = []
    for s in (sigma if isinstance(sigma, (list, tuple)) else [sigma]):
        sig.append(s if isinstance(s, ComplexInterval) else ComplexInterval.point(s))
    if len(sig) != b.arity:
        raise ValueError("wrong number of evaluation variables")
    for s in sig:
        if float(s.mag()) > b.delta:
            raise ValueError("outside domain of parameterization")
    mono = _monomials(sig, b.arity, b.order)
    K = len(b)
    ia = np.arange(K)
    starts = np.array([0])
    outs = np.array([0])
    f, _ = _op("scalar", b.kind)
    mm, mr = _midrad(mono)
    bm, br = _midrad(b.coeffs)
    mid, rad = _contract(mm, mr, bm, br, ia, ia, outs, starts, K, f, False, 1, b.tail_shape)
    return ComplexInterval.from_midrad(mid[0], rad[0])


def derivative(b: MultiSeries, var: int) -> MultiSeries:
    """Partial derivative in variable ``var`` (0-based)."""
    if not 0 <= var < b.arity:
        raise ValueError("invalid variable index")
    n = max(b.order - 1, 0)
    out = MultiSeries.zeros(b.arity, n, b.tail_shape, b.delta)
    idx = b.indices()
    sel = np.nonzero(idx[:, var] >= 1)[0]
    if b.order == 0 or len(sel) == 0:
        return out
    shifted = idx[sel].copy()
    shifted[:, var] -= 1
    tgt = _index_array(shifted)
    fac = idx[sel, var].astype(float).reshape((-1,) + (1,) * len(b.tail_shape))
    out.coeffs[tgt] = b.coeffs[sel] * Interval.point(np.broadcast_to(fac, b.coeffs[sel].shape).copy())
    return out


def write_csv(b: MultiSeries, path) -> None:
    """Columns (m, n, component, re_lo, re_hi, im_lo, im_hi); hex-free decimal repr."""
    idx = b.indices()
    c = b.coeffs
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["m", "n", "component", "re_lo", "re_hi", "im_lo", "im_hi"])
        tail = b.tail_shape
        comps = list(np.ndindex(*tail)) if tail else [()]
        for k in range(len(b)):
            m = int(idx[k, 0])
            n = int(idx[k, 1]) if b.arity == 2 else 0
            for comp in comps:
                e = c[(k,) + comp]
                name = "-".join(str(i + 1) for i in comp) if comp else "0"
                w.writerow([m, n, name, repr(float(e.re.lo)), repr(float(e.re.hi)),
                            repr(float(e.im.lo)), repr(float(e.im.hi))])
