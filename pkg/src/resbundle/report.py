"""Serialisation helpers: intervals as exact hex-float endpoint pairs."""

from __future__ import annotations

import numpy as np

from .interval import ComplexInterval, Interval

SCHEMA_VERSION = 1


def _hex_pair(lo, hi):
    lo = np.asarray(lo, dtype=float)
    hi = np.asarray(hi, dtype=float)
    if lo.ndim == 0:
        return [float(lo).hex(), float(hi).hex()]
    return [_hex_pair(a, b) for a, b in zip(lo, hi)]


def iv_json(x):
    """Interval -> [lo, hi]; ComplexInterval -> {"re": [lo, hi], "im": [lo, hi]} (hex strings)."""
    if isinstance(x, ComplexInterval):
        return {"re": _hex_pair(x.re.lo, x.re.hi), "im": _hex_pair(x.im.lo, x.im.hi)}
    if isinstance(x, Interval):
        return _hex_pair(x.lo, x.hi)
    raise TypeError(f"cannot serialise {type(x).__name__}")


def _unhex(v):
    if isinstance(v, str):
        return float.fromhex(v)
    return [_unhex(u) for u in v]


def iv_from_json(d):
    if isinstance(d, dict):
        return ComplexInterval(iv_from_json(d["re"]), iv_from_json(d["im"]))
    arr = np.array(_unhex(d), dtype=float)
    return Interval(arr[..., 0], arr[..., 1])


# ---------------------------------------------------------------------------
# certificates

def claim(name: str, lhs, rhs) -> dict:
    """The inequality lhs < rhs, decided as lhs.hi < rhs.lo."""
    lhs = lhs if isinstance(lhs, Interval) else Interval(float(lhs))
    rhs = rhs if isinstance(rhs, Interval) else Interval(float(rhs))
    return {"name": name, "lhs": iv_json(lhs), "rhs": iv_json(rhs),
            "holds": bool(float(lhs.hi) < float(rhs.lo))}


def _claim_holds(c: dict) -> bool:
    lhs, rhs = iv_from_json(c["lhs"]), iv_from_json(c["rhs"])
    return bool(float(lhs.hi) < float(rhs.lo))


def _radii_manifold(b: dict) -> Interval:
    g = {k: iv_from_json(b[k]) for k in ("Y0", "Z1", "Z2_const", "Z2_lin", "r0")}
    r = g["r0"]
    return (g["Z2_const"] + g["Z2_lin"] * r) * r * r + (g["Z1"] - 1.0) * r + g["Y0"]


def _radii_bundle(b: dict) -> Interval:
    r = iv_from_json(b["r0"])
    return iv_from_json(b["Y0"]) + (iv_from_json(b["Z"]) - 1.0) * r


def recheck(cert: dict) -> tuple[bool, list]:
    """Re-verify a certificate from its stored endpoints alone.

    Every claim is re-decided, the radii polynomials are re-evaluated at the
    stored r0 from the stored bound constants, and the stored verdicts must agree.
    Returns (agrees, list of problems).
    """
    problems = []
    if cert.get("schema_version") != SCHEMA_VERSION:
        problems.append(f"schema version {cert.get('schema_version')} != {SCHEMA_VERSION}")
        return False, problems
    all_hold = True
    for c in cert.get("claims", []):
        h = _claim_holds(c)
        all_hold &= h
        if h != c["holds"]:
            problems.append(f"claim {c['name']}: stored {c['holds']}, recomputed {h}")
    for side in ("stable", "unstable"):
        m = cert.get("manifolds", {}).get(side)
        if m and m.get("bounds") and m["bounds"].get("r0") is not None:
            p = _radii_manifold(m["bounds"])
            if not float(p.hi) < 0:
                problems.append(f"manifold {side}: p(r0) not negative on recheck")
    bnd = cert.get("bundle")
    if bnd and bnd.get("r0") is not None:
        p = _radii_bundle(bnd)
        if not float(p.hi) < 0:
            problems.append("bundle: p(r0) not negative on recheck")
    expect = bool(all_hold and cert.get("failed_stage") is None)
    if expect != bool(cert.get("verdict")):
        problems.append(f"verdict stored {cert.get('verdict')}, recomputed {expect}")
    return not problems, problems


def dumps(cert: dict) -> str:
    """Deterministic JSON text (sorted keys)."""
    import json

    return json.dumps(cert, indent=1, sort_keys=True) + "\n"
