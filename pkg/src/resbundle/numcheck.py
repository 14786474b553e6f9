"""Non-rigorous cross-checks by numerical integration (scipy's DOP853).

These test the conjugacies themselves rather than any bound:

    flow of P(sigma0) for time x  ==  P(e^{Omega x} sigma0)
    W(sigma0) M~(x)               ==  fundamental solution along that orbit, started at W(sigma0)
"""

from __future__ import annotations

import numpy as np
from scipy.integrate import solve_ivp

RTOL = 1e-12
ATOL = 1e-14


def random_sigmas(rng: np.random.Generator, count: int, m: int, radius: float = 1.0,
                  conjugate: bool = True) -> np.ndarray:
    """Samples in the polydisc; with ``conjugate`` (m = 2) pairs (z, conj z) giving real orbits."""
    r = radius * np.sqrt(rng.uniform(0, 1, (count, m)))
    th = rng.uniform(0, 2 * np.pi, (count, m))
    z = r * np.exp(1j * th)
    if conjugate and m == 2:
        z[:, 1] = np.conj(z[:, 0])
    return z


def manifold_flow_error(mp, sigma0, xs) -> float:
    """max over x of |phi_x(P(sigma0)) - P(e^{Omega x} sigma0)|."""
    fld = mp.field
    U0 = mp.P.eval_mid(np.asarray(sigma0, complex))
    sol = solve_ivp(lambda x, U: fld.rhs(U), (0.0, float(xs[-1])), U0.astype(complex),
                    method="DOP853", t_eval=xs, rtol=RTOL, atol=ATOL)
    if not sol.success:
        raise RuntimeError(sol.message)
    err = 0.0
    for k, x in enumerate(xs):
        exact = mp.P.eval_mid(mp.flow_sigma(sigma0, x))
        err = max(err, float(np.max(np.abs(sol.y[:, k] - exact))))
    return err


def bundle_flow_error(B, sigma0, xs) -> float:
    """max over x of |Phi(x) W(sigma0) - W(sigma(x)) M~(x)| relative to |W(sigma(x)) M~(x)|."""
    from .bundle import normal_form_fundamental_mid

    mp = B.P
    fld = mp.field
    n = fld.n
    U0 = mp.P.eval_mid(np.asarray(sigma0, complex))
    W0 = B.W_at(sigma0)

    def rhs(x, y):
        U = y[:n]
        V = y[n:].reshape(n, n)
        return np.concatenate([fld.rhs(U), (fld.jac(U) @ V).ravel()])

    y0 = np.concatenate([U0, W0.ravel()]).astype(complex)
    sol = solve_ivp(rhs, (0.0, float(xs[-1])), y0, method="DOP853", t_eval=xs, rtol=RTOL, atol=ATOL)
    if not sol.success:
        raise RuntimeError(sol.message)
    err = 0.0
    for k, x in enumerate(xs):
        V = sol.y[n:, k].reshape(n, n)
        pred = B.W_at(mp.flow_sigma(sigma0, x)) @ normal_form_fundamental_mid(B, sigma0, 0.0, x)
        scale = max(1.0, float(np.max(np.abs(pred))))
        err = max(err, float(np.max(np.abs(V - pred))) / scale)
    return err


def semiconjugacy_errors(obj, count: int = 20, x_max: float = 3.0, seed: int = 0, kind: str = "manifold",
                         radius: float = 1.0) -> np.ndarray:
    rng = np.random.default_rng(seed)
    mp = obj if kind == "manifold" else obj.P
    sig = random_sigmas(rng, count, mp.m, radius)
    xs = np.linspace(0.0, x_max, 31)
    f = manifold_flow_error if kind == "manifold" else bundle_flow_error
    return np.array([f(obj, s, xs) for s in sig])
