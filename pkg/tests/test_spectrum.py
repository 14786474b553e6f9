import dataclasses
from fractions import Fraction

import numpy as np
import pytest

from resbundle.interval import ComplexInterval, verified_inverse
from resbundle.spectrum import (SHParams, compute_spectrum, dichotomy_K, evec_bound_expr, evec_norm_bound,
                                vcheck_closed_form)


def test_rho_encloses_sqrt_one_plus_mu(sp):
    lo, hi = Fraction(float(sp.rho.lo)), Fraction(float(sp.rho.hi))
    assert lo ** 2 <= Fraction(6, 5) <= hi ** 2


def test_eigenvalue_modulus(sp):
    for mu in (sp.mu_s1, sp.mu_s2, sp.mu_u1, sp.mu_u2):
        m2 = mu.re * mu.re + mu.im * mu.im
        assert float(m2.lo) <= float(sp.rho.hi) and float(sp.rho.lo) <= float(m2.hi)


def test_quartet(sp):
    assert bool(np.all((sp.mu_s2 - sp.mu_s1.conj()).contains_zero()))
    assert bool(np.all((sp.mu_u1 + sp.mu_s1).contains_zero()))
    assert float(sp.mu_s1.re.hi) < 0 < float(sp.mu_u1.re.lo)
    assert bool(np.all((sp.mu_s1.re + sp.sqrt_rho * sp.cos_half).contains_zero()))


def test_characteristic_polynomial(sp):
    # mu^4 + 2 mu^2 + (1 + muhat) = 0
    for mu in (sp.mu_s1, sp.mu_s2, sp.mu_u1, sp.mu_u2):
        m2 = mu * mu
        r = m2 * m2 + m2 * 2.0 + (sp.params.muhat_iv + 1.0)
        assert bool(r.contains_zero())


def test_eigen_residual(sp):
    A = sp.dg0()
    R = A @ sp.Vhat - sp.Vhat * sp.eigenvalues
    assert bool(np.all(R.contains_zero()))


def test_symplectic_basis(sp):
    assert bool(np.all((sp.b_inf() - sp.S @ sp.dg0() @ sp.Sinv).contains_zero()))
    Bc = sp.b_inf() @ sp.Vcheck - sp.Vcheck * sp.eigenvalues
    assert bool(np.all(Bc.contains_zero()))


def test_vcheck_closed_form_agrees(sp):
    assert bool(np.all((vcheck_closed_form(sp) - sp.Vcheck).contains_zero()))


def test_unstable_plane_lagrangian(sp):
    # omega(u, v) = u^T J v vanishes on span{Vcheck_u1, Vcheck_u2}
    u, v = sp.Vcheck[:, 2], sp.Vcheck[:, 3]
    assert bool((u * (sp.J @ v)).sum().contains_zero())
    u, v = sp.Vcheck[:, 0], sp.Vcheck[:, 1]
    assert bool((u * (sp.J @ v)).sum().contains_zero())


def test_K_at_least_one_and_scale_invariant(sp):
    K = dichotomy_K(sp)
    assert float(K.lo) >= 1.0
    M = sp.Vcheck.mid()
    assert float(K.lo) <= np.linalg.cond(M, 2) <= float(K.hi)
    K2 = dichotomy_K(dataclasses.replace(sp, Vcheck=sp.Vcheck * 3.0))
    assert float(K2.lo) <= np.linalg.cond(M, 2) <= float(K2.hi)


def test_evec_bound(sp):
    exact, bound = evec_norm_bound(sp)
    cols = np.linalg.norm(sp.Vcheck.mid(), axis=0)
    assert np.all((cols >= float(exact.lo) * (1 - 1e-12)) & (cols <= float(exact.hi) * (1 + 1e-12)))
    assert float(exact.hi) <= float(bound.lo)


def test_evec_bound_shape():
    # d/drho = 1 - 5/rho^2 - 2/rho^3 vanishes at rho = 1 + sqrt 2: decreasing before, increasing after
    turn = 1 + np.sqrt(2)
    down = np.linspace(1.0, turn - 1e-6, 200)
    up = np.linspace(turn + 1e-6, 50.0, 200)
    assert np.all(np.diff([evec_bound_expr(r) for r in down]) < 0)
    assert np.all(np.diff([evec_bound_expr(r) for r in up]) > 0)


def test_rejects_nonpositive_parameters():
    with pytest.raises(ValueError):
        SHParams(0.0, 1.6)
    with pytest.raises(ValueError):
        SHParams(0.2, -1.0)


@pytest.mark.parametrize("mu", [0.05, 0.2, 0.7])
def test_other_parameters(mu):
    s = compute_spectrum(SHParams(mu, 1.6))
    assert float(s.mu_s1.re.hi) < 0
    Vi = verified_inverse(s.Vhat)
    assert bool(np.all((Vi @ s.Vhat - ComplexInterval.eye(4)).contains_zero()))
