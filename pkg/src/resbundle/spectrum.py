"""Closed-form linear data at the origin of the Swift-Hohenberg spatial system.

The linearisation DG(0) has characteristic polynomial mu^4 + 2 mu^2 + 1 + muhat,
so mu^2 = -1 +- i sqrt(muhat).  Writing rho = sqrt(1 + muhat) and
theta = pi - arctan(sqrt(muhat)) in (pi/2, pi), the eigenvalues are

    mu_s1 = -sqrt(rho) e^{i theta/2},  mu_s2 = conj(mu_s1),  mu_u = -mu_s.

Columns of Vhat are (1, mu, mu^2, mu^3) and are ordered (s1, s2, u1, u2).
Vcheck holds the eigenvectors of B_inf = S DG(0) S^{-1} in the normalisation
with second entry 1, which is S Vhat_i / mu_i^2.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .interval import (ComplexInterval, Interval, from_mpi, iv_prec,
                       mat_norm_spec, verified_inverse)

_PREC = 113

S_MATRIX = np.array([[1, 0, 0, 0], [0, 0, 1, 0], [0, 2, 0, 1], [0, 1, 0, 0]], dtype=float)
S_INV = np.array([[1, 0, 0, 0], [0, 0, 0, 1], [0, 1, 0, 0], [0, 0, 1, -2]], dtype=float)
J_MATRIX = np.block([[np.zeros((2, 2)), np.eye(2)], [-np.eye(2), np.zeros((2, 2))]])

# integer coordinates of (s1, s2, u1, u2) over the basis (mu_s1, mu_s2); used to
# decide resonances exactly
SH_LATTICE = np.array([[1, 0], [0, 1], [-1, 0], [0, -1]], dtype=np.int64)


@dataclass(frozen=True)
class SHParams:
    muhat: float
    nuhat: float

    def __post_init__(self):
        if not self.muhat > 0:
            raise ValueError("muhat must be positive")
        if not self.nuhat > 0:
            raise ValueError("nuhat must be positive")

    @property
    def muhat_iv(self) -> Interval:
        """Enclosure of the decimal value the user typed (0.2 means 1/5)."""
        return Interval.exact(float(self.muhat))

    @property
    def nuhat_iv(self) -> Interval:
        return Interval.exact(float(self.nuhat))


def dg0(params: SHParams) -> ComplexInterval:
    m = params.muhat_iv
    A = ComplexInterval.point(np.array([[0, 1, 0, 0], [0, 0, 1, 0], [0, 0, 0, 1], [0, 0, -2, 0]], float))
    A[3, 0] = ComplexInterval(-(m + 1.0))
    return A


@dataclass
class Spectrum:
    params: SHParams
    rho: Interval
    theta: Interval
    sqrt_rho: Interval
    cos_half: Interval
    sin_half: Interval
    mu_s1: ComplexInterval
    mu_s2: ComplexInterval
    mu_u1: ComplexInterval
    mu_u2: ComplexInterval
    Vhat: ComplexInterval
    Vcheck: ComplexInterval
    S: ComplexInterval = field(default_factory=lambda: ComplexInterval.point(S_MATRIX))
    Sinv: ComplexInterval = field(default_factory=lambda: ComplexInterval.point(S_INV))
    J: ComplexInterval = field(default_factory=lambda: ComplexInterval.point(J_MATRIX))

    @property
    def eigenvalues(self) -> ComplexInterval:
        return ComplexInterval.stack([self.mu_s1, self.mu_s2, self.mu_u1, self.mu_u2])

    @property
    def lattice(self) -> np.ndarray:
        return SH_LATTICE

    @property
    def re_mu_u(self) -> Interval:
        """Re mu_u1 = sqrt(rho) cos(theta/2) > 0."""
        return self.mu_u1.re

    def stable(self) -> ComplexInterval:
        return ComplexInterval.stack([self.mu_s1, self.mu_s2])

    def unstable(self) -> ComplexInterval:
        return ComplexInterval.stack([self.mu_u1, self.mu_u2])

    def dg0(self) -> ComplexInterval:
        return dg0(self.params)

    def b_inf(self) -> ComplexInterval:
        return self.S @ self.dg0() @ self.Sinv

    def to_json(self) -> dict:
        from .report import iv_json

        return {"rho": iv_json(self.rho), "theta": iv_json(self.theta),
                "eigenvalues": [iv_json(self.mu_s1), iv_json(self.mu_s2),
                                iv_json(self.mu_u1), iv_json(self.mu_u2)]}


def compute_spectrum(params: SHParams) -> Spectrum:
    with iv_prec(_PREC) as iv:
        mu = iv.mpf([float(params.muhat_iv.lo), float(params.muhat_iv.hi)])
        rho = iv.sqrt(1 + mu)
        theta = iv.atan2(iv.sqrt(mu), iv.mpf(-1))
        sr = iv.sqrt(rho)
        # half-angle forms of cos(theta) = -1/rho, sin(theta) = sqrt(muhat)/rho
        c = iv.sqrt((1 - 1 / rho) / 2)
        s = iv.sqrt((1 + 1 / rho) / 2)
        parts = {k: from_mpi(v) for k, v in dict(rho=rho, theta=theta, sr=sr, c=c, s=s,
                                                  re=sr * c, im=sr * s).items()}
    mu_s1 = ComplexInterval(-parts["re"], -parts["im"])
    mu_s2 = mu_s1.conj()
    mu_u1 = -mu_s1
    mu_u2 = -mu_s2
    mus = ComplexInterval.stack([mu_s1, mu_s2, mu_u1, mu_u2])
    one = ComplexInterval.point(np.ones(4))
    rows = [one, mus, mus * mus, mus * mus * mus]
    Vhat = ComplexInterval.stack(rows, axis=0)
    Sm = ComplexInterval.point(S_MATRIX)
    SV = Sm @ Vhat
    sq = mus * mus
    Vcheck = ComplexInterval.stack([SV[i] / sq for i in range(4)], axis=0)
    return Spectrum(params=params, rho=parts["rho"], theta=parts["theta"], sqrt_rho=parts["sr"],
                    cos_half=parts["c"], sin_half=parts["s"], mu_s1=mu_s1, mu_s2=mu_s2,
                    mu_u1=mu_u1, mu_u2=mu_u2, Vhat=Vhat, Vcheck=Vcheck)


def vcheck_closed_form(sp: Spectrum) -> ComplexInterval:
    """The symplectic eigenvectors written out in rho, theta (independent check).

    Vcheck_u1 = (e^{-i theta}/rho, 1, sqrt(rho) e^{i theta/2} + (2/sqrt(rho)) e^{-i theta/2},
                 e^{-i theta/2}/sqrt(rho)),  u2 its conjugate, and the stable columns
    flip the sign of the last two entries.
    """
    with iv_prec(_PREC) as iv:
        mu = iv.mpf([float(sp.params.muhat_iv.lo), float(sp.params.muhat_iv.hi)])
        rho = iv.sqrt(1 + mu)
        th = iv.atan2(iv.sqrt(mu), iv.mpf(-1))
        sr = iv.sqrt(rho)
        c, s = iv.cos(th / 2), iv.sin(th / 2)
        e1 = (iv.cos(th) / rho, -iv.sin(th) / rho)
        e3 = (sr * c + 2 / sr * c, sr * s - 2 / sr * s)
        e4 = (c / sr, -s / sr)
        ent = [tuple(from_mpi(x) for x in e) for e in (e1, e3, e4)]
    col = [ComplexInterval(*ent[0]), ComplexInterval.point(1.0), ComplexInterval(*ent[1]), ComplexInterval(*ent[2])]
    u1 = ComplexInterval.stack(col)
    u2 = u1.conj()
    flip = ComplexInterval.point(np.array([1.0, 1.0, -1.0, -1.0]))
    return ComplexInterval.stack([u1 * flip, u2 * flip, u1, u2], axis=1)


def dichotomy_K(sp: Spectrum) -> Interval:
    """Enclosure of K = |Vcheck^{-1}| |Vcheck| in the spectral norm."""
    Vc = sp.Vcheck
    Vi = verified_inverse(Vc)
    a = mat_norm_spec(Vc)
    b = mat_norm_spec(Vi)
    prod = a * b
    return Interval(max(1.0, float(prod.lo)) if float(prod.hi) >= 1.0 else float(prod.lo), float(prod.hi))


def evec_norm_bound(sp: Spectrum) -> tuple[Interval, Interval]:
    """(|Vcheck_i|, theta-free upper bound) where
    |Vcheck_i|^2 = 1 + 4 cos(theta) + 1/rho^2 + 5/rho + rho <= 1 + 1/rho^2 + 5/rho + rho."""
    with iv_prec(_PREC) as iv:
        mu = iv.mpf([float(sp.params.muhat_iv.lo), float(sp.params.muhat_iv.hi)])
        rho = iv.sqrt(1 + mu)
        base = 1 + 1 / rho ** 2 + 5 / rho + rho
        exact = iv.sqrt(base - 4 / rho)  # cos(theta) = -1/rho
        bound = iv.sqrt(base)
        return from_mpi(exact), from_mpi(bound)


def evec_bound_expr(rho: float) -> float:
    """sqrt(1 + 1/rho^2 + 5/rho + rho) in plain floats (for monotonicity checks)."""
    return float(np.sqrt(1 + 1 / rho ** 2 + 5 / rho + rho))
