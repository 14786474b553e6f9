import numpy as np
import pytest

from resbundle import manifold as mf
from resbundle.interval import ComplexInterval, Interval
from resbundle.numcheck import semiconjugacy_errors
from resbundle.oracle_bistable import bistable_eigendata, bistable_field
from resbundle.series import index_of


def test_no_resonance_bistable():
    eig = bistable_eigendata()
    assert mf.check_manifold_resonance(eig.values, [0], 10, eig.lattice) == []


def test_no_resonance_swift_hohenberg(sp):
    eig = mf.sh_eigendata(sp)
    assert mf.check_manifold_resonance(eig.values, [0, 1], 35, eig.lattice) == []


def test_constructed_resonance():
    vals = ComplexInterval.point(np.array([-1.0, -2.0, -3.0], complex))
    res = mf.check_manifold_resonance(vals, [0, 1], 4)
    assert ((1, 1), 3) in res


def test_undecidable_resonance():
    vals = ComplexInterval(Interval(np.array([-1.0, -2.0, -3.0 - 1e-14]), np.array([-1.0, -2.0, -3.0 + 1e-14])))
    with pytest.raises(mf.ResonanceUndecidable, match="tighten intervals"):
        mf.check_manifold_resonance(vals, [0, 1], 4)


def test_bistable_coefficients():
    mp = mf.solve_manifold_coeffs(bistable_field(), bistable_eigendata(), "stable", 6, 1.0)
    assert bool(np.all(mp.P.coeff((2,)).contains(np.array([1.0, -2.0]))))
    assert bool(mp.P.coeff((3,))[0].contains(-1.0))


def test_equilibrium_and_first_order(mps, sp):
    assert bool(np.all(mps.P.coeff((0, 0)).contains_zero()))
    for k in range(2):
        e = [0, 0]
        e[k] = 1
        v = mps.P.coeff(tuple(e)).mid()
        assert np.isclose(np.linalg.norm(v), 0.5)


def test_zero_scaling_rejected(sp):
    with pytest.raises(ValueError):
        mf.solve_manifold_coeffs(mf.sh_field(sp.params), mf.sh_eigendata(sp), "stable", 5, 0.0)


def test_KN(sp):
    K = mf.compute_KN(sp, 35)
    assert float(K.lo) > 0
    assert round(float(K.lo), 3) == round(float(K.hi), 3) == 0.300
    K2 = mf.compute_KN(sp, 70)
    assert float(K2.hi) <= float(K.hi) / 2 * (1 + 1e-12)


@pytest.mark.parametrize("side", ["stable", "unstable"])
def test_invariance_residual_contains_zero(side, mps, mpu):
    mp = mps if side == "stable" else mpu
    assert bool(np.all(mf.invariance_residual(mp).coeffs.contains_zero()))


def test_conjugate_symmetry(mps, mpu):
    assert mf.conjugate_symmetric(mps.P)
    assert mf.conjugate_symmetric(mpu.P)


def test_table_bounds(mps):
    b = mps.bounds
    assert float(b.Z1.hi) < 1
    assert round(float(b.Z1.hi), 3) == 0.983
    assert 4.90e-18 / 100 <= float(b.Y0.hi) <= 4.90e-18 * 100
    assert float(b.r0.hi) <= 1e-14
    assert float(b.p_r0.hi) < 0
    z2 = b.Z2_const
    assert abs(float(z2.hi) - 2.16) < 0.05
    assert abs(float(b.Z2_lin.hi) - 0.899) < 0.01


def test_zero_nonlinearity(sp):
    fld = mf.sh_field(sp.params)
    lin = mf.FieldSpec(4, fld.linear, (Interval(0.0), fld.poly[1], Interval(0.0), Interval(0.0)), fld.equilibrium)
    eig = mf.sh_eigendata(sp)
    c = mf.eigvec_scale(eig, 0)
    mp = mf.solve_manifold_coeffs(lin, eig, "stable", 10, (c, c))
    assert float(mp.P.norm_l1("tail", 1).hi) < 1e-150
    b = mf.manifold_radii_bounds(mp, sp, 0.0)
    # only the product kernel's underflow guard remains
    assert float(b.Y0.hi) < 1e-150
    mf.find_radius(b)
    assert float(b.r0.hi) == float(mf.RADIUS_GRID[0])


def test_no_contraction_raises():
    b = mf.RadiiBounds(Interval(1.0), Interval(0.0), Interval(1.0), Interval(0.0), Interval(0.0))
    with pytest.raises(mf.ContractionError, match="increase N"):
        mf.find_radius(b)


def test_low_order_fails(sp):
    with pytest.raises(mf.ContractionError):
        mf.sh_manifold(sp, "stable", 3, 0.5)


def test_real_trace(mps):
    assert np.allclose(mps.real_trace(0.0, 0.0), 0.0)
    a, b = mps.real_trace(0.3, 0.4), mps.real_trace(0.3, -0.4)
    assert np.all(np.isfinite(a)) and np.all(np.isfinite(b))
    with pytest.raises(ValueError):
        mps.real_trace(0.9, 0.9)


def test_doubled_order_head_agrees(sp, mps):
    big = mf.sh_manifold(sp, "stable", 70, 0.5, validate=False)
    assert bool(np.all((big.P.resized(35).coeffs - mps.P.coeffs).contains_zero()))
    # the N = 70 tail is the best available proxy for the true truncation error
    assert float(big.P.norm_l1("tail", 35).hi) <= float(mps.r0.hi)


@pytest.mark.parametrize("x_max", [3.0, 5.0])
def test_numeric_semiconjugacy(mps, x_max):
    errs = semiconjugacy_errors(mps, count=20, x_max=x_max, seed=1)
    assert max(errs) <= 1e-6
