from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from resbundle.interval import (ComplexInterval, Interval, SingularDivisor, det2, eig2_hermitian_min,
                                fraction_enclosure, iexp, mat_norm_col1, mat_norm_inf, mat_norm_spec,
                                vec_norm2, verified_inverse)

finite = st.floats(min_value=-1e6, max_value=1e6, allow_nan=False, allow_infinity=False)
anyfloat = st.floats(allow_nan=False, allow_infinity=False)


def iv(a, b):
    return Interval(min(a, b), max(a, b))


def inside(x: Interval, q: Fraction) -> bool:
    lo, hi = float(x.lo), float(x.hi)
    return (lo == -np.inf or Fraction(lo) <= q) and (hi == np.inf or q <= Fraction(hi))


def test_add_endpoints():
    s = Interval(1.0, 2.0) + Interval(3.0, 4.0)
    assert (float(s.lo), float(s.hi)) == (4.0, 6.0)


def test_zero_times_anything_is_zero():
    p = Interval(0.0) * Interval(-5.0, 7.0)
    assert (float(p.lo), float(p.hi)) == (0.0, 0.0)


def test_third_is_tight():
    t = Interval(1.0) / Interval(3.0)
    assert inside(t, Fraction(1, 3))
    assert float(t.hi) - float(t.lo) <= 2 * np.spacing(1 / 3)


def test_division_by_interval_with_zero():
    with pytest.raises(SingularDivisor):
        Interval(1.0) / Interval(-1.0, 1.0)


def test_decimal_parameter_enclosure():
    x = Interval.exact(0.2)
    assert inside(x, Fraction(1, 5))
    lo, hi = fraction_enclosure(Fraction(1, 5))
    assert lo < hi


def test_exp_and_sqrt():
    assert bool(iexp(Interval(1.0)).contains(np.e))
    r = Interval(2.0).sqrt()
    assert Fraction(float(r.lo)) ** 2 <= 2 <= Fraction(float(r.hi)) ** 2


def test_column_norm():
    A = ComplexInterval.point(np.array([[1, -2], [3, 4]], complex))
    assert float(mat_norm_col1(A).lo) == 6.0 == float(mat_norm_col1(A).hi)
    assert float(mat_norm_inf(A).hi) == 7.0


@pytest.mark.parametrize("M, val", [(np.eye(2), 1.0), (np.diag([3.0, -4.0]), 4.0),
                                    (np.array([[0.0, 1.0], [0.0, 0.0]]), 1.0)])
def test_spectral_norm(M, val):
    n = mat_norm_spec(ComplexInterval.point(M.astype(complex)))
    assert bool(n.contains(val))


def test_spectral_norm_encloses_svd():
    rng = np.random.default_rng(3)
    for _ in range(20):
        M = rng.normal(size=(4, 4)) + 1j * rng.normal(size=(4, 4))
        n = mat_norm_spec(ComplexInterval.point(M))
        assert bool(n.contains(np.linalg.norm(M, 2)))


@pytest.mark.parametrize("M, val", [(np.diag([2.0, 5.0]), 2.0), (np.array([[2.0, 1.0], [1.0, 2.0]]), 1.0),
                                    (np.zeros((2, 2)), 0.0)])
def test_smallest_hermitian_eigenvalue(M, val):
    assert bool(eig2_hermitian_min(ComplexInterval.point(M.astype(complex))).contains(val))


def test_vec_norm2():
    assert bool(vec_norm2(ComplexInterval.point(np.array([3.0, 4j]))).contains(5.0))


def test_verified_inverse_and_det():
    rng = np.random.default_rng(0)
    M = rng.normal(size=(4, 4)) + 1j * rng.normal(size=(4, 4))
    Mi = verified_inverse(ComplexInterval.point(M))
    assert bool(np.all(Mi.contains(np.linalg.inv(M))))
    D = np.array([[1 + 1j, 2], [3, 4 - 1j]])
    assert bool(det2(ComplexInterval.point(D)).contains(-1 + 3j))  # exact


def test_verified_inverse_rejects_singular():
    with pytest.raises((SingularDivisor, np.linalg.LinAlgError, ArithmeticError)):
        verified_inverse(ComplexInterval.point(np.ones((2, 2), complex)))


@given(finite, finite, finite, finite)
def test_real_ops_contain_exact(a, b, c, d):
    x, y = iv(a, b), iv(c, d)
    for p in (a, b):
        for q in (c, d):
            P, Q = Fraction(p), Fraction(q)
            assert inside(x + y, P + Q)
            assert inside(x - y, P - Q)
            assert inside(x * y, P * Q)
            if not bool(y.contains_zero()):
                assert inside(x / y, P / Q)


@given(finite, finite, finite, finite, st.floats(0, 1), st.floats(0, 1))
def test_inclusion_monotone(a, b, c, d, s, t):
    x, y = iv(a, b), iv(c, d)
    xs = Interval(float(np.clip(float(x.lo) + s * (float(x.hi) - float(x.lo)), x.lo, x.hi)))
    ys = Interval(float(np.clip(float(y.lo) + t * (float(y.hi) - float(y.lo)), y.lo, y.hi)))
    assert bool((xs * ys).subset(x * y))
    assert bool((xs + ys).subset(x + y))
    assert bool((xs - ys).subset(x - y))


@given(finite, finite, finite, finite)
def test_complex_product_contains_exact(a, b, c, d):
    z = ComplexInterval.point(complex(a, b)) * ComplexInterval.point(complex(c, d))
    re = Fraction(a) * Fraction(c) - Fraction(b) * Fraction(d)
    im = Fraction(a) * Fraction(d) + Fraction(b) * Fraction(c)
    assert inside(z.re, re) and inside(z.im, im)


@given(anyfloat, anyfloat)
def test_full_range_point_ops(p, q):
    x, y = Interval(p), Interval(q)
    P, Q = Fraction(p), Fraction(q)
    assert inside(x + y, P + Q)
    assert inside(x - y, P - Q)
    assert inside(x * y, P * Q)
    if q != 0:
        assert inside(x / y, P / Q)


def test_edge_cases():
    big = Interval(1.0) / Interval(8.076809065547331e-302)
    assert inside(big, 1 / Fraction(8.076809065547331e-302))
    sub = Interval(2.225073858507e-311)
    assert float((sub * sub).lo) == 0.0 and float((sub * sub).hi) > 0.0
    m = np.finfo(float).max
    s = Interval(m) + Interval(m)
    assert float(s.lo) == m and float(s.hi) == np.inf
