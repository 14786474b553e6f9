import dataclasses
from fractions import Fraction
from types import SimpleNamespace

import numpy as np
import pytest

from resbundle import bundle as bd
from resbundle import manifold as mf
from resbundle.interval import ComplexInterval, Interval
from resbundle.numcheck import semiconjugacy_errors
from resbundle.oracle_bistable import _inv_pow, _mul, bistable_eigendata, bistable_field, exact_unstable_bundle
from resbundle.series import MultiSeries, derivative, index_of

SH_TABLE = {"1,3": [[2, 0]], "1,4": [[1, 1]], "2,3": [[1, 1]], "2,4": [[0, 2]]}


@pytest.fixture(scope="module")
def bistable():
    mp = mf.solve_manifold_coeffs(bistable_field(), bistable_eigendata(), "stable", 10, 1.0)
    return bd.solve_bundle_coeffs(mp)


def test_sh_resonance_table(sp):
    res = bd.resonance_sets(mf.sh_eigendata(sp))
    assert res.as_dict() == SH_TABLE
    for (i, j), _ in res.entries.items():
        assert i < j


def test_bistable_resonance_table():
    assert bd.resonance_sets(bistable_eigendata()).as_dict() == {"1,2": [[2]]}


def test_dG_constant_and_linear_terms(mps, sp):
    G = bd.dG_series(mps)
    assert bool(np.all((G.coeffs[0] - sp.dg0()).contains_zero()))
    p1 = mps.P.coeff((1, 0))[0]
    expect = p1 * (sp.params.nuhat_iv * 2.0)
    assert bool((G.coeffs[index_of((1, 0)), 3, 0] - expect).contains_zero())


def test_dG_bistable_matches_expansion(bistable):
    # -h'(u) = 1 - 6u + 6u^2 along u = 1/(1+s)
    G = bd.dG_series(bistable.P, 4)
    p = _inv_pow(1, 4)
    pp = _mul(p, p, 4)
    q = [Fraction(int(n == 0)) - 6 * a + 6 * b for n, (a, b) in enumerate(zip(p, pp))]
    for n in range(5):
        assert bool(G.coeffs[n, 1, 0].contains(float(q[n])))


def test_bistable_unstable_column(bistable):
    # free choice of the s^2 coefficients gives (1, 6, 6) and (1, 0, 6)
    W = bistable.W.coeffs[:, :, 1]
    assert bool(np.all(W[:3, 0].contains(np.array([1.0, 6.0, 6.0]))))
    assert bool(np.all(W[:3, 1].contains(np.array([1.0, 0.0, 6.0]))))
    ex = exact_unstable_bundle(2)
    assert [int(x) for x in ex[0]] == [1, 6, 6] and [int(x) for x in ex[1]] == [1, 0, 6]
    assert bool(bistable.a(1, 2, (2,)).contains(-12.0))


def test_normal_form_sparsity(frame):
    assert set(frame.A) == {(1, 3, (2, 0)), (1, 4, (1, 1)), (2, 3, (1, 1)), (2, 4, (0, 2))}
    for (i, j, _b) in frame.A:
        assert i < j and j >= 3


def test_stable_column_is_manifold_derivative(frame, mps):
    d = derivative(mps.P, 0)
    c = mps.scaling[0]
    W1 = frame.W.coeffs[: len(d), :, 0]
    diff = W1 * c - d.coeffs
    assert bool(np.all(diff.contains_zero()))


def test_conjugacy_residual_contains_zero(frame, bistable):
    assert bool(np.all(bd.conjugacy_residual(frame).coeffs.contains_zero()))
    assert bool(np.all(bd.conjugacy_residual(bistable).coeffs.contains_zero()))


def test_order_zero_residual(sp, frame):
    R = sp.dg0() @ frame.W0 - frame.W0 * frame.mu
    assert bool(np.all(R.contains_zero()))


def test_perturbed_coefficient_detected(bistable):
    W = bistable.W.copy()
    W.coeffs[3, 0, 1] = W.coeffs[3, 0, 1] + 1e-6
    bad = dataclasses.replace(bistable, W=W)
    R = bd.conjugacy_residual(bad)
    assert not bool(np.all(R.coeffs[3].contains_zero()))


def test_ghat_tail_bound():
    assert float(bd.ghat_tail_bound(0.0, 1.0, 1.6).hi) == 0.0
    assert bool(bd.ghat_tail_bound(1e-16, 1.0, 1.6).contains(9.2e-16))
    vals = [float(bd.ghat_tail_bound(e, 1.0, 1.6).hi) for e in np.geomspace(1e-18, 1e-2, 20)]
    assert np.all(np.diff(vals) > 0)


def test_bundle_KN(sp):
    c = bd.min_real_part(mf.sh_eigendata(sp))
    K1, K3 = bd.bundle_KN(c, 35, 1), bd.bundle_KN(c, 35, 3)
    assert round(float(K3.hi), 3) == 0.131
    assert float(K1.hi) < float(K3.lo)
    assert float(bd.bundle_KN(c, 70, 3).hi) < float(K3.hi) / 1.9
    with pytest.raises(ValueError):
        bd.bundle_KN(c, 2, 1)


def test_sharp_KN_dominates_divisors(sp):
    # the printed 1/(N c) misses the divisor of alpha = (19, 17) in column 3
    eig = mf.sh_eigendata(sp)
    mu = eig.values
    d = mu[0] * 19.0 + mu[1] * 17.0 + mu[2] - mu[0]
    inv = Interval(1.0) / d.abs()
    # attained: the sharp bound encloses the exact reciprocal
    assert float(inv.lo) <= float(bd.bundle_KN_sharp(eig, 35, 3).hi)
    c = bd.min_real_part(eig)
    assert float(inv.lo) > float(bd.bundle_KN(c, 35, 3).hi)


def test_validation_bounds(frame):
    b = frame.bounds
    assert float(b.Z.hi) <= 0.9
    assert float(b.r0.hi) <= 1e-7
    assert float(b.p_r0.hi) < 0
    assert float(b.Yc.hi[0]) == float(b.Yc.hi[1]) == 0.0
    assert float(b.Zc.hi[0]) == float(b.Zc.hi[1]) == 0.0
    # regression ordering: unstable columns carry the larger defects
    assert min(b.Ya.hi[2:] + b.Yb.hi[2:] + b.Yc.hi[2:]) >= max(b.Ya.hi[:2] + b.Yb.hi[:2])


def test_kappa(frame, sp):
    eig = mf.sh_eigendata(sp)
    b = MultiSeries.from_array(2, 3, np.ones(10))
    k = bd.kappa_apply(b, 1, 3, frame.res, eig)
    assert bool(k.coeff((2, 0)).contains(1.0))
    d = eig.values[0] * 1.0 + eig.values[2] - eig.values[0]
    assert bool((k.coeff((1, 0)) * d).contains(1.0))
    assert bool(k.coeff((0, 0)).contains(1.0))


def test_kappa_bistable_resonance():
    eig = bistable_eigendata()
    res = bd.resonance_sets(eig)
    b = MultiSeries.from_array(1, 3, np.ones(4))
    assert bool(bd.kappa_apply(b, 1, 2, res, eig).coeff((2,)).contains(1.0))
    with pytest.raises(mf.ResonanceUndecidable):
        bd.kappa_apply(b, 1, 2, bd.ResonanceTable({}, 2), eig)


def test_fundamental_matrix_identity_and_diagonal(frame):
    sig = (0.3 + 0.2j, 0.3 - 0.2j)
    M = bd.normal_form_fundamental(frame, sig, 0.5, 0.5)
    assert bool(np.all(M.contains(np.eye(4))))
    flat = dataclasses.replace(frame, A={})
    D = bd.normal_form_fundamental(flat, sig, 0.0, 1.0)
    assert bool(np.all(D.contains(np.diag(np.exp(frame.mu.mid())))))


def test_fundamental_matrix_solves_normal_form(frame):
    sig = np.array([0.6 + 0.3j, 0.6 - 0.3j])
    x0, h = 0.25, 1e-5
    Om = frame.Omega_s.mid()
    for x in np.linspace(x0 + 0.1, x0 + 1.0, 5):
        dM = (bd.normal_form_fundamental_mid(frame, sig, x0, x + h) -
              bd.normal_form_fundamental_mid(frame, sig, x0, x - h)) / (2 * h)
        rhs = frame.A_at(np.exp(Om * x) * sig) @ bd.normal_form_fundamental_mid(frame, sig, x0, x)
        assert np.max(np.abs(dM - rhs)) <= 1e-8


def test_fundamental_matrix_encloses_midpoint(frame):
    sig = (0.2 + 0.1j, 0.2 - 0.1j)
    M = bd.normal_form_fundamental(frame, sig, 0.0, 2.0)
    assert bool(np.all(M.contains(bd.normal_form_fundamental_mid(frame, np.array(sig), 0.0, 2.0))))


def test_eigen_coordinates_round_trip(frame, sp):
    sig = (0.4 + 0.1j, 0.4 - 0.1j)
    SW = sp.S.mid() @ frame.W_at(np.array(sig))
    e3 = np.array([0, 0, 1, 0], complex)
    beta, gamma = bd.eigen_coordinates_extract(frame, sp.S, sig, ComplexInterval.point(SW @ e3))
    assert bool(np.all(beta.contains(np.zeros(2)))) and bool(np.all(gamma.contains(np.array([1.0, 0.0]))))
    beta, gamma = bd.eigen_coordinates_extract(frame, sp.S, sig, ComplexInterval.point(SW.sum(axis=1)))
    assert bool(np.all(beta.contains(np.ones(2)))) and bool(np.all(gamma.contains(np.ones(2))))
    rng = np.random.default_rng(5)
    for _ in range(5):
        c = rng.normal(size=4) + 1j * rng.normal(size=4)
        beta, gamma = bd.eigen_coordinates_extract(frame, sp.S, sig, ComplexInterval.point(SW @ c))
        assert bool(np.all(beta.contains(c[:2]))) and bool(np.all(gamma.contains(c[2:])))


def test_unstable_bundle_over_unstable(mpu, sp):
    d1, d2 = bd.unstable_bundle_over_unstable(mpu)
    c = mpu.scaling[0]
    assert bool(np.all((d1.coeffs[0] - sp.Vhat[:, 2] * c).contains_zero()))
    assert bool(np.all((d2.coeffs[0] - sp.Vhat[:, 3] * c).contains_zero()))
    const = SimpleNamespace(P=MultiSeries.from_array(2, 0, np.ones((1, 4))))
    z1, z2 = bd.unstable_bundle_over_unstable(const)
    assert float(z1.norm_l1().hi) == 0.0 and float(z2.norm_l1().hi) == 0.0


def test_unstable_bundle_lagrangian(mpu, sp):
    # numeric check: the span of dP/dsigma_1, dP/dsigma_2 is Lagrangian after S
    d1, d2 = bd.unstable_bundle_over_unstable(mpu)
    S, J = sp.S.mid(), sp.J.mid()
    rng = np.random.default_rng(7)
    for _ in range(10):
        r, th = 0.8 * rng.random(), 2 * np.pi * rng.random()
        sig = np.array([r * np.exp(1j * th), r * np.exp(-1j * th)])
        u, v = S @ d1.eval_mid(sig), S @ d2.eval_mid(sig)
        assert abs(u @ J @ v) <= 1e-12


def test_numeric_bundle_semiconjugacy(frame):
    errs = semiconjugacy_errors(frame, count=20, x_max=3.0, seed=2, kind="bundle")
    assert max(errs) <= 1e-6
