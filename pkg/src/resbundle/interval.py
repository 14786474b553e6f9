"""Outward-rounded interval arithmetic on numpy arrays.

Real intervals carry ``lo``/``hi`` arrays; complex intervals are axis-aligned
rectangles.  Directed rounding is emulated with error-free transformations
(TwoSum, Dekker's TwoProduct): every elementary operation first computes the
round-to-nearest result, recovers the exact rounding error, and steps one ulp
outward only when the result was actually inexact.  This gives the same
endpoints as hardware directed rounding, so exact operations stay exact.

Assumptions: IEEE binary64, round-to-nearest.  Where the error-free
transforms are unreliable (underflow zone, or magnitudes where Dekker's
splitting overflows) the code falls back to an unconditional one-ulp widening,
clamped at 0 when the sign of the exact result is known.
"""

from __future__ import annotations

from fractions import Fraction

import numpy as np

U = 2.0 ** -53
_SPLIT = 134217729.0  # 2**27 + 1
_TINY = 2.0 ** -969  # below this Dekker's error term may be inexact
_HUGE = 2.0 ** 995   # above this the splitting constant overflows
_INF = np.inf


def _next(x, d):
    # stepping past the largest float to inf is intended here
    with np.errstate(over="ignore"):
        return np.nextafter(x, d)


class SingularDivisor(ZeroDivisionError):
    pass


def gamma(n: int) -> float:
    """Upper bound for n*u/(1-n*u), the classic summation error constant."""
    nu = n * U
    return float(_next(nu / (1.0 - nu) * (1.0 + 4 * U), _INF))


# ---------------------------------------------------------------------------
# error-free transformations

def _two_sum(a, b):
    s = a + b
    bb = s - a
    e = (a - (s - bb)) + (b - bb)
    return s, e


def _split(a):
    c = _SPLIT * a
    hi = c - (c - a)
    return hi, a - hi


def _two_prod(a, b):
    p = a * b
    ah, al = _split(a)
    bh, bl = _split(b)
    e = ((ah * bh - p) + ah * bl + al * bh) + al * bl
    return p, e


def _round_pair(p, e, tiny=None):
    """Return (down, up) roundings of the exact value p + e."""
    dn = np.where(e < 0, _next(p, -_INF), p)
    up = np.where(e > 0, _next(p, _INF), p)
    if tiny is not None and np.any(tiny):
        dn = np.where(tiny, _next(p, -_INF), dn)
        up = np.where(tiny, _next(p, _INF), up)
    return dn, up


def _clamp_sign(dn, up, sgn):
    """Keep the fallback widening on the known side of 0."""
    return np.where(sgn > 0, np.maximum(dn, 0.0), dn), np.where(sgn < 0, np.minimum(up, 0.0), up)


def add_dn(a, b):
    with np.errstate(invalid="ignore", over="ignore"):
        s, e = _two_sum(a, b)
    bad = ~np.isfinite(e) & np.isfinite(a) & np.isfinite(b)
    return np.where((e < 0) | bad, _next(s, -_INF), s)


def add_up(a, b):
    with np.errstate(invalid="ignore", over="ignore"):
        s, e = _two_sum(a, b)
    bad = ~np.isfinite(e) & np.isfinite(a) & np.isfinite(b)
    return np.where((e > 0) | bad, _next(s, _INF), s)


def _mul_pair(a, b):
    with np.errstate(invalid="ignore", over="ignore"):
        p, e = _two_prod(a, b)
    nz = (a != 0) & (b != 0)
    rough = nz & ((np.abs(p) < _TINY) | (np.abs(a) > _HUGE) | (np.abs(b) > _HUGE) | ~np.isfinite(e))
    dn, up = _round_pair(p, np.where(np.isfinite(e), e, 0.0), rough)
    return _clamp_sign(dn, up, np.sign(a) * np.sign(b))


def mul_dn(a, b):
    return _mul_pair(a, b)[0]


def mul_up(a, b):
    return _mul_pair(a, b)[1]


def _div_pair(a, b):
    with np.errstate(invalid="ignore", over="ignore", divide="ignore"):
        q = a / b
        p, e = _two_prod(q, b)
        r = (a - p) - e  # sign of the exact remainder a - q*b
    sgn = np.sign(r) * np.sign(b)
    dn = np.where(sgn < 0, _next(q, -_INF), q)
    up = np.where(sgn > 0, _next(q, _INF), q)
    rough = (a != 0) & ((np.abs(q) < _TINY * 4) | (np.abs(p) < _TINY) | (np.abs(q) > _HUGE) |
                        (np.abs(b) > _HUGE) | ~np.isfinite(r))
    if np.any(rough):
        dn = np.where(rough, _next(q, -_INF), dn)
        up = np.where(rough, _next(q, _INF), up)
    return _clamp_sign(dn, up, np.sign(a) * np.sign(b))


def _sqrt_pair(x):
    s = np.sqrt(x)
    p, e = _two_prod(s, s)
    r = (x - p) - e
    tiny = (s < 2.0 ** -480) & (x > 0)
    dn = np.where(r < 0, _next(s, -_INF), s)
    up = np.where(r > 0, _next(s, _INF), s)
    if np.any(tiny):
        dn = np.where(tiny, _next(s, -_INF), dn)
        up = np.where(tiny, _next(s, _INF), up)
    return np.maximum(dn, 0.0), up


def sum_up(x, axis=None):
    """Upper bound of the exact sum of a nonnegative float array."""
    x = np.asarray(x, dtype=float)
    n = x.size if axis is None else x.shape[axis]
    s = np.sum(x, axis=axis)
    # a float sum of nonnegative terms is 0 only if every term is 0
    return np.where(s == 0.0, 0.0, _next(s * (1.0 + gamma(max(n, 1) + 2)), _INF))


def sum_dn(x, axis=None):
    """Lower bound of the exact sum of a nonnegative float array."""
    x = np.asarray(x, dtype=float)
    n = x.size if axis is None else x.shape[axis]
    s = np.sum(x, axis=axis)
    return np.maximum(_next(s * (1.0 - gamma(max(n, 1) + 2)), -_INF), 0.0)


def _as_float(x):
    return np.asarray(x, dtype=float)


def fraction_enclosure(q: Fraction) -> tuple[float, float]:
    """Tight float endpoints around an exact rational."""
    f = float(q)
    lo = f if Fraction(f) <= q else float(_next(f, -_INF))
    hi = f if Fraction(f) >= q else float(_next(f, _INF))
    return lo, hi


# ---------------------------------------------------------------------------

class Interval:
    """Vectorised real interval [lo, hi]."""

    __slots__ = ("lo", "hi")
    __array_priority__ = 100

    def __init__(self, lo, hi=None):
        lo = _as_float(lo)
        hi = lo if hi is None else _as_float(hi)
        lo, hi = np.broadcast_arrays(lo, hi)
        if np.any(np.isnan(lo)) or np.any(np.isnan(hi)):
            raise ValueError("nan endpoint")
        if np.any(lo > hi):
            raise ValueError("interval with lo > hi")
        self.lo = lo.copy()
        self.hi = hi.copy()

    @classmethod
    def _raw(cls, lo, hi):
        obj = object.__new__(cls)
        obj.lo = lo
        obj.hi = hi
        return obj

    @classmethod
    def point(cls, x):
        return cls(x, x)

    @classmethod
    def exact(cls, value) -> "Interval":
        """Enclosure of a decimal string, int or Fraction (scalar)."""
        q = Fraction(value) if not isinstance(value, float) else Fraction(repr(value))
        lo, hi = fraction_enclosure(q)
        return cls(lo, hi)

    @classmethod
    def hull_of(cls, a: "Interval", b: "Interval") -> "Interval":
        return cls._raw(np.minimum(a.lo, b.lo), np.maximum(a.hi, b.hi))

    @classmethod
    def zeros(cls, shape=()):
        z = np.zeros(shape)
        return cls._raw(z, z.copy())

    # basic properties
    @property
    def shape(self):
        return self.lo.shape

    @property
    def ndim(self):
        return self.lo.ndim

    def __len__(self):
        return len(self.lo)

    def __getitem__(self, key):
        return Interval._raw(self.lo[key], self.hi[key])

    def __setitem__(self, key, val):
        val = _iv(val)
        self.lo[key] = val.lo
        self.hi[key] = val.hi

    def copy(self):
        return Interval._raw(self.lo.copy(), self.hi.copy())

    def reshape(self, *shape):
        return Interval._raw(self.lo.reshape(*shape), self.hi.reshape(*shape))

    @property
    def T(self):
        return Interval._raw(self.lo.T, self.hi.T)

    def mid(self):
        m = 0.5 * self.lo + 0.5 * self.hi
        return np.where(np.isfinite(m), m, 0.0)

    def rad(self):
        m = self.mid()
        return np.maximum(add_up(self.hi, -m), add_up(m, -self.lo))

    def width(self):
        return add_up(self.hi, -self.lo)

    def mag(self):
        """Upper bound of |x| over the interval."""
        return np.maximum(np.abs(self.lo), np.abs(self.hi))

    def mig(self):
        """Lower bound of |x| over the interval."""
        return np.where((self.lo <= 0) & (self.hi >= 0), 0.0,
                        np.minimum(np.abs(self.lo), np.abs(self.hi)))

    def abs(self):
        return Interval._raw(self.mig(), self.mag())

    def contains(self, x) -> np.ndarray:
        if isinstance(x, Interval):
            return (self.lo <= x.lo) & (x.hi <= self.hi)
        if isinstance(x, Fraction):
            return (Fraction(float(self.lo)) <= x) & (x <= Fraction(float(self.hi)))
        x = _as_float(x)
        return (self.lo <= x) & (x <= self.hi)

    def contains_zero(self) -> np.ndarray:
        return (self.lo <= 0) & (self.hi >= 0)

    def subset(self, other: "Interval") -> np.ndarray:
        return (other.lo <= self.lo) & (self.hi <= other.hi)

    def __float__(self):
        return float(self.mid())

    @property
    def sup(self) -> float:
        return float(np.max(self.hi))

    @property
    def inf(self) -> float:
        return float(np.min(self.lo))

    # arithmetic
    def __neg__(self):
        return Interval._raw(-self.hi, -self.lo)

    def __pos__(self):
        return self

    def __add__(self, other):
        if isinstance(other, ComplexInterval):
            return NotImplemented
        o = _iv(other)
        return Interval._raw(add_dn(self.lo, o.lo), add_up(self.hi, o.hi))

    __radd__ = __add__

    def __sub__(self, other):
        if isinstance(other, ComplexInterval):
            return NotImplemented
        o = _iv(other)
        return Interval._raw(add_dn(self.lo, -o.hi), add_up(self.hi, -o.lo))

    def __rsub__(self, other):
        return _iv(other) - self

    def __mul__(self, other):
        if isinstance(other, ComplexInterval):
            return NotImplemented
        o = _iv(other)
        a, b, c, d = np.broadcast_arrays(self.lo, self.hi, o.lo, o.hi)
        pairs = [_mul_pair(a, c), _mul_pair(a, d), _mul_pair(b, c), _mul_pair(b, d)]
        lo = np.minimum(np.minimum(pairs[0][0], pairs[1][0]), np.minimum(pairs[2][0], pairs[3][0]))
        hi = np.maximum(np.maximum(pairs[0][1], pairs[1][1]), np.maximum(pairs[2][1], pairs[3][1]))
        return Interval._raw(lo, hi)

    __rmul__ = __mul__

    def __truediv__(self, other):
        if isinstance(other, ComplexInterval):
            return NotImplemented
        o = _iv(other)
        if np.any((o.lo <= 0) & (o.hi >= 0)):
            raise SingularDivisor("singular divisor")
        a, b, c, d = np.broadcast_arrays(self.lo, self.hi, o.lo, o.hi)
        pairs = [_div_pair(a, c), _div_pair(a, d), _div_pair(b, c), _div_pair(b, d)]
        lo = np.minimum(np.minimum(pairs[0][0], pairs[1][0]), np.minimum(pairs[2][0], pairs[3][0]))
        hi = np.maximum(np.maximum(pairs[0][1], pairs[1][1]), np.maximum(pairs[2][1], pairs[3][1]))
        return Interval._raw(lo, hi)

    def __rtruediv__(self, other):
        return _iv(other) / self

    def square(self):
        m = self.mig()
        M = self.mag()
        return Interval._raw(np.maximum(mul_dn(m, m), 0.0), mul_up(M, M))

    def sqrt(self):
        if np.any(self.lo < 0):
            raise ValueError("sqrt of negative interval")
        return Interval._raw(_sqrt_pair(self.lo)[0], _sqrt_pair(self.hi)[1])

    def __pow__(self, k: int):
        if not isinstance(k, (int, np.integer)) or k < 0:
            raise ValueError("integer power >= 0 expected")
        if k == 0:
            return Interval.point(np.ones(self.shape))
        if k % 2 == 0:
            return self.square() ** (k // 2) if k > 2 else self.square()
        return self * (self ** (k - 1))

    def exp(self):
        # libm exp is within 1 ulp; widen by 2 ulps on each side
        lo = _next(_next(np.exp(self.lo), -_INF), -_INF)
        hi = _next(_next(np.exp(self.hi), _INF), _INF)
        return Interval._raw(np.maximum(lo, 0.0), hi)

    def sum(self, axis=None):
        """Interval sum, reducing sequentially with directed rounding."""
        lo, hi = self.lo, self.hi
        if axis is None:
            lo, hi, axis = lo.reshape(-1), hi.reshape(-1), 0
        lo = np.moveaxis(lo, axis, 0)
        hi = np.moveaxis(hi, axis, 0)
        if lo.shape[0] == 0:
            z = np.zeros(lo.shape[1:])
            return Interval._raw(z, z.copy())
        slo, shi = lo[0].copy(), hi[0].copy()
        for k in range(1, lo.shape[0]):
            slo = add_dn(slo, lo[k])
            shi = add_up(shi, hi[k])
        return Interval._raw(slo, shi)

    def max(self, axis=None):
        return Interval._raw(np.max(self.lo, axis=axis), np.max(self.hi, axis=axis))

    def min(self, axis=None):
        return Interval._raw(np.min(self.lo, axis=axis), np.min(self.hi, axis=axis))

    def __lt__(self, other):
        return self.hi < _iv(other).lo

    def __gt__(self, other):
        return self.lo > _iv(other).hi

    def __repr__(self):
        if self.ndim == 0:
            return f"Interval([{float(self.lo)!r}, {float(self.hi)!r}])"
        return f"Interval(shape={self.shape})"


def _iv(x) -> Interval:
    if isinstance(x, Interval):
        return x
    if isinstance(x, ComplexInterval):
        raise TypeError("complex interval where real expected")
    if isinstance(x, Fraction):
        return Interval.exact(x)
    return Interval.point(x)


# ---------------------------------------------------------------------------

class ComplexInterval:
    """Rectangle re + i*im, vectorised.  2-D instances act as interval matrices."""

    __slots__ = ("re", "im")
    __array_priority__ = 100

    def __init__(self, re, im=None):
        self.re = _iv(re)
        self.im = _iv(np.zeros(self.re.shape)) if im is None else _iv(im)
        if self.re.shape != self.im.shape:
            r = Interval._raw(*np.broadcast_arrays(self.re.lo, self.im.lo))
            shp = r.shape
            self.re = Interval._raw(np.broadcast_to(self.re.lo, shp).copy(), np.broadcast_to(self.re.hi, shp).copy())
            self.im = Interval._raw(np.broadcast_to(self.im.lo, shp).copy(), np.broadcast_to(self.im.hi, shp).copy())

    @classmethod
    def _raw(cls, re: Interval, im: Interval):
        obj = object.__new__(cls)
        obj.re = re
        obj.im = im
        return obj

    @classmethod
    def point(cls, z):
        z = np.asarray(z, dtype=complex)
        return cls._raw(Interval.point(z.real.copy()), Interval.point(z.imag.copy()))

    @classmethod
    def zeros(cls, shape=()):
        return cls._raw(Interval.zeros(shape), Interval.zeros(shape))

    @classmethod
    def eye(cls, n):
        return cls.point(np.eye(n))

    @classmethod
    def from_midrad(cls, mid, rad_re, rad_im=None):
        """Rectangle enclosing mid +- rad (componentwise), outward rounded."""
        mid = np.asarray(mid, dtype=complex)
        rad_im = rad_re if rad_im is None else rad_im
        mr, mi = mid.real, mid.imag
        return cls._raw(Interval._raw(add_dn(mr, -rad_re), add_up(mr, rad_re)),
                        Interval._raw(add_dn(mi, -rad_im), add_up(mi, rad_im)))

    @classmethod
    def stack(cls, items, axis=0):
        return cls._raw(Interval._raw(np.stack([c.re.lo for c in items], axis), np.stack([c.re.hi for c in items], axis)),
                        Interval._raw(np.stack([c.im.lo for c in items], axis), np.stack([c.im.hi for c in items], axis)))

    @property
    def shape(self):
        return self.re.shape

    @property
    def ndim(self):
        return self.re.ndim

    def __len__(self):
        return len(self.re)

    def __getitem__(self, key):
        return ComplexInterval._raw(self.re[key], self.im[key])

    def __setitem__(self, key, val):
        val = _civ(val)
        self.re[key] = val.re
        self.im[key] = val.im

    def copy(self):
        return ComplexInterval._raw(self.re.copy(), self.im.copy())

    def reshape(self, *shape):
        return ComplexInterval._raw(self.re.reshape(*shape), self.im.reshape(*shape))

    @property
    def T(self):
        return ComplexInterval._raw(self.re.T, self.im.T)

    @property
    def H(self):
        return self.T.conj()

    def swapaxes(self, a, b):
        return ComplexInterval._raw(Interval._raw(np.swapaxes(self.re.lo, a, b), np.swapaxes(self.re.hi, a, b)),
                                    Interval._raw(np.swapaxes(self.im.lo, a, b), np.swapaxes(self.im.hi, a, b)))

    def mid(self) -> np.ndarray:
        return self.re.mid() + 1j * self.im.mid()

    def rad(self) -> np.ndarray:
        """Upper bound of the radius of the disc around mid() covering the rectangle."""
        rr, ri = self.re.rad(), self.im.rad()
        return _sqrt_pair(add_up(mul_up(rr, rr), mul_up(ri, ri)))[1]

    def width(self) -> np.ndarray:
        return np.maximum(self.re.width(), self.im.width())

    def mag(self) -> np.ndarray:
        a, b = self.re.mag(), self.im.mag()
        return _sqrt_pair(add_up(mul_up(a, a), mul_up(b, b)))[1]

    def mig(self) -> np.ndarray:
        a, b = self.re.mig(), self.im.mig()
        # directed rounding in the underflow range can dip below zero
        return _sqrt_pair(np.maximum(add_dn(mul_dn(a, a), mul_dn(b, b)), 0.0))[0]

    def abs(self) -> Interval:
        return Interval._raw(self.mig(), self.mag())

    def conj(self):
        return ComplexInterval._raw(self.re, -self.im)

    def contains(self, z) -> np.ndarray:
        if isinstance(z, ComplexInterval):
            return self.re.contains(z.re) & self.im.contains(z.im)
        z = np.asarray(z, dtype=complex)
        return self.re.contains(z.real) & self.im.contains(z.imag)

    def contains_zero(self) -> np.ndarray:
        return self.re.contains_zero() & self.im.contains_zero()

    def subset(self, other: "ComplexInterval") -> np.ndarray:
        return self.re.subset(other.re) & self.im.subset(other.im)

    def __neg__(self):
        return ComplexInterval._raw(-self.re, -self.im)

    def __add__(self, other):
        o = _civ(other)
        return ComplexInterval._raw(self.re + o.re, self.im + o.im)

    __radd__ = __add__

    def __sub__(self, other):
        o = _civ(other)
        return ComplexInterval._raw(self.re - o.re, self.im - o.im)

    def __rsub__(self, other):
        return _civ(other) - self

    def __mul__(self, other):
        if isinstance(other, Interval) or np.isrealobj(other) and not isinstance(other, ComplexInterval):
            o = _iv(other)
            return ComplexInterval._raw(self.re * o, self.im * o)
        o = _civ(other)
        return ComplexInterval._raw(self.re * o.re - self.im * o.im,
                                    self.re * o.im + self.im * o.re)

    __rmul__ = __mul__

    def __truediv__(self, other):
        if isinstance(other, Interval) or np.isrealobj(other) and not isinstance(other, ComplexInterval):
            o = _iv(other)
            return ComplexInterval._raw(self.re / o, self.im / o)
        o = _civ(other)
        den = o.re.square() + o.im.square()
        if np.any(den.lo <= 0):
            raise SingularDivisor("singular divisor")
        num = self * o.conj()
        return ComplexInterval._raw(num.re / den, num.im / den)

    def __rtruediv__(self, other):
        return _civ(other) / self

    def __pow__(self, k: int):
        if k == 0:
            return ComplexInterval.point(np.ones(self.shape))
        out = self
        for _ in range(k - 1):
            out = out * self
        return out

    def sum(self, axis=None):
        return ComplexInterval._raw(self.re.sum(axis), self.im.sum(axis))

    def __matmul__(self, other):
        o = _civ(other)
        if self.ndim < 2:
            raise ValueError("matmul needs a matrix on the left")
        vec = o.ndim == 1
        if vec:
            o = o.reshape(o.shape[0], 1)
        a = self[..., :, :, None] if self.ndim > 2 else ComplexInterval._raw(
            Interval._raw(self.re.lo[:, :, None], self.re.hi[:, :, None]),
            Interval._raw(self.im.lo[:, :, None], self.im.hi[:, :, None]))
        b = ComplexInterval._raw(Interval._raw(o.re.lo[..., None, :, :], o.re.hi[..., None, :, :]),
                                 Interval._raw(o.im.lo[..., None, :, :], o.im.hi[..., None, :, :]))
        out = (a * b).sum(axis=-2)
        if vec:
            out = out[..., 0]
        return out

    def __rmatmul__(self, other):
        return _civ(other) @ self

    def __repr__(self):
        if self.ndim == 0:
            return (f"ComplexInterval([{float(self.re.lo)!r}, {float(self.re.hi)!r}] + "
                    f"i[{float(self.im.lo)!r}, {float(self.im.hi)!r}])")
        return f"ComplexInterval(shape={self.shape})"


IntervalMatrix = ComplexInterval


def _civ(x) -> ComplexInterval:
    if isinstance(x, ComplexInterval):
        return x
    if isinstance(x, Interval):
        return ComplexInterval._raw(x, Interval.zeros(x.shape))
    return ComplexInterval.point(x)


def as_complex(x) -> ComplexInterval:
    return _civ(x)


def iv_arith(a: Interval, b: Interval, op: str) -> Interval:
    ops = {"add": Interval.__add__, "sub": Interval.__sub__,
           "mul": Interval.__mul__, "div": Interval.__truediv__}
    if op not in ops:
        raise ValueError(f"unknown op {op!r}")
    return ops[op](_iv(a), _iv(b))


# ---------------------------------------------------------------------------
# small matrices

def _abs_hull(A: ComplexInterval) -> Interval:
    return A.abs()


def mat_norm_col1(A) -> Interval:
    """Enclosure of max_j sum_i |A_ij| (the l1 operator norm)."""
    A = _civ(A)
    s = A.abs().sum(axis=-2)
    return Interval._raw(np.max(s.lo, axis=-1), np.max(s.hi, axis=-1))


def mat_norm_inf(A) -> Interval:
    A = _civ(A)
    s = A.abs().sum(axis=-1)
    return Interval._raw(np.max(s.lo, axis=-1), np.max(s.hi, axis=-1))


def vec_norm2(v) -> Interval:
    """Euclidean norm of a complex interval vector (last axis)."""
    v = _civ(v)
    return (v.re.square() + v.im.square()).sum(axis=-1).sqrt()


def mat_norm_spec(A, power_steps: int = 5) -> Interval:
    """Enclosure of the spectral norm sqrt(mu_max(A* A)).

    The upper end is the smaller of two rigorous bounds: sqrt(|A|_1 |A|_inf)
    and the power bound mu_max(H) <= |H^k|_1^(1/k) with H = A*A and
    k = 2**power_steps.  The lower end is the largest column 2-norm.
    """
    A = _civ(A)
    n1 = mat_norm_col1(A)
    ninf = mat_norm_inf(A)
    upper = _sqrt_pair(mul_up(n1.hi, ninf.hi))[1]
    if power_steps > 0 and float(np.max(upper)) > 0:
        H = A.H @ A
        t = mat_norm_col1(H).hi
        if float(t) > 0:
            Hs = H / Interval.point(t)
            for _ in range(power_steps):
                Hs = Hs @ Hs
            b = mat_norm_col1(Hs).hi
            for _ in range(power_steps):
                b = _sqrt_pair(b)[1]
            lam = mul_up(b, t)
            upper = np.minimum(upper, _sqrt_pair(lam)[1])
    cols = vec_norm2(A.swapaxes(-1, -2))
    lower = np.max(cols.lo, axis=-1)
    return Interval._raw(np.minimum(lower, upper), upper)


def eig2_hermitian_min(A, tol: float = 1e-10) -> Interval:
    """Enclosure of the smaller eigenvalue of a 2x2 Hermitian interval matrix.

    Uses lambda_min = (a+d)/2 - sqrt(((a-d)/2)^2 + |b|^2), the closed form
    of tr/2 - sqrt((tr/2)^2 - det) written so the radicand is a sum of squares.
    """
    A = _civ(A)
    if A.shape != (2, 2):
        raise ValueError("2x2 matrix expected")
    a, d = A[0, 0], A[1, 1]
    b, c = A[0, 1], A[1, 0].conj()
    herm = (a.im.mig() <= tol) & (d.im.mig() <= tol) & \
        (np.maximum(b.re.lo, c.re.lo) <= np.minimum(b.re.hi, c.re.hi) + tol) & \
        (np.maximum(b.im.lo, c.im.lo) <= np.minimum(b.im.hi, c.im.hi) + tol)
    if not bool(herm):
        raise ValueError("not Hermitian-enclosable")
    # intersect the two enclosures of the off-diagonal entry when they overlap
    lo_r, hi_r = np.maximum(b.re.lo, c.re.lo), np.minimum(b.re.hi, c.re.hi)
    lo_i, hi_i = np.maximum(b.im.lo, c.im.lo), np.minimum(b.im.hi, c.im.hi)
    if lo_r <= hi_r and lo_i <= hi_i:
        b = ComplexInterval._raw(Interval._raw(lo_r, hi_r), Interval._raw(lo_i, hi_i))
    half = Interval.point(0.5)
    disc = ((a.re - d.re) * half).square() + b.re.square() + b.im.square()
    lam = (a.re + d.re) * half - disc.sqrt()
    return lam


def verified_inverse(A) -> ComplexInterval:
    """Enclosure of A^{-1} for every matrix in the interval matrix A.

    With R ~ inv(mid A) and C = I - R A, if |C|_inf = beta < 1 then
    A^{-1} = (I - C)^{-1} R and |A^{-1} - R|_max <= |C|_inf |R|_inf / (1 - beta).
    """
    A = _civ(A)
    n = A.shape[-1]
    R = np.linalg.inv(A.mid())
    Ri = ComplexInterval.point(R)
    C = ComplexInterval.eye(n) - Ri @ A
    beta = float(mat_norm_inf(C).hi)
    if not beta < 1.0:
        raise np.linalg.LinAlgError("matrix enclosure not verifiably invertible")
    nR = float(mat_norm_inf(Ri).hi)
    num = mul_up(beta, nR)
    den = add_dn(1.0, -beta)
    delta = float(_div_pair(np.asarray(num), np.asarray(den))[1])
    return ComplexInterval.from_midrad(R, np.full(R.shape, delta))


def det2(A) -> ComplexInterval:
    A = _civ(A)
    return A[0, 0] * A[1, 1] - A[0, 1] * A[1, 0]


# ---------------------------------------------------------------------------
# scalar transcendental enclosures via mpmath's interval context

class iv_prec:
    """Context manager setting mpmath's interval precision (bits)."""

    def __init__(self, prec: int = 113):
        self.prec = prec

    def __enter__(self):
        import mpmath

        self._old = mpmath.iv.prec
        mpmath.iv.prec = self.prec
        return mpmath.iv

    def __exit__(self, *exc):
        import mpmath

        mpmath.iv.prec = self._old
        return False


def from_mpi(x) -> Interval:
    """Outward float enclosure of an mpmath.iv interval."""
    from mpmath import mp

    a, b = mp.make_mpf(x._mpi_[0]), mp.make_mpf(x._mpi_[1])
    lo, hi = float(a), float(b)
    if mp.mpf(lo) > a:
        lo = float(_next(lo, -_INF))
    if mp.mpf(hi) < b:
        hi = float(_next(hi, _INF))
    return Interval(lo, hi)


def to_mpi(x: Interval):
    import mpmath

    return mpmath.iv.mpf([float(x.lo), float(x.hi)])


def iexp(x: Interval, prec: int = 113) -> Interval:
    """Rigorous exp of a scalar interval (mpmath interval context)."""
    with iv_prec(prec) as iv:
        return from_mpi(iv.exp(to_mpi(x)))


def cexp(z: ComplexInterval) -> ComplexInterval:
    """exp of complex interval arrays: e^re (cos im + i sin im).

    Vectorised with libm and a 4-ulp outward margin on each factor (glibc's
    exp/sin/cos are accurate to well under one ulp).
    """
    def widen(v, k=4):
        lo, hi = v.copy(), v.copy()
        for _ in range(k):
            lo, hi = _next(lo, -_INF), _next(hi, _INF)
        return lo, hi

    elo, _ = widen(np.exp(z.re.lo))
    _, ehi = widen(np.exp(z.re.hi))
    mag = Interval._raw(np.maximum(elo, 0.0), ehi)
    # cos/sin over [im.lo, im.hi]: use midpoint value plus Lipschitz radius
    m = z.im.mid()
    r = z.im.rad()
    clo, chi = widen(np.cos(m))
    slo, shi = widen(np.sin(m))
    c = Interval._raw(add_dn(clo, -r), add_up(chi, r))
    s = Interval._raw(add_dn(slo, -r), add_up(shi, r))
    return ComplexInterval._raw(mag * c, mag * s)
