"""Command line entry point: ``resbundle validate|export|lplus|recheck``."""

from __future__ import annotations

import json
import logging
import os
import sys

import click
import numpy as np

from .pipeline import (EXIT_ERROR, EXIT_FAILED, EXIT_OK, LPlusInputs, RunConfig, bundlecloud,
                       pointcloud, run_lplus, run_validate)
from .report import dumps, recheck as recheck_cert


def _range(text: str, n: int, what: str) -> tuple:
    try:
        parts = tuple(float(x) for x in text.split(":"))
    except ValueError:
        raise click.BadParameter(f"{what} must be {n} numbers separated by ':'") from None
    if len(parts) != n:
        raise click.BadParameter(f"{what} must be {n} numbers separated by ':'")
    return parts


def _config(mu, nu, order, scale, out, lplus_file=None, lplus_sweep=None, beta_norm=None, gamma_norm=None):
    try:
        return RunConfig(muhat=mu, nuhat=nu, order=order, scale=scale, out=out,
                         lplus_file=lplus_file,
                         lplus_sweep=_range(lplus_sweep, 3, "--lplus-sweep") if lplus_sweep else (10.0, 100.0, 1.0),
                         beta_norm=_range(beta_norm, 2, "--beta-norm") if beta_norm else None,
                         gamma_norm=_range(gamma_norm, 2, "--gamma-norm") if gamma_norm else None)
    except ValueError as e:
        raise click.UsageError(str(e)) from None


def _lplus_inputs(cfg: RunConfig):
    if cfg.lplus_file:
        try:
            return LPlusInputs.from_file(cfg.lplus_file)
        except (OSError, ValueError) as e:
            raise click.UsageError(str(e)) from None
    if cfg.gamma_norm is not None:
        try:
            return LPlusInputs.from_norms(cfg.beta_norm or (0.0, 0.0), cfg.gamma_norm)
        except ValueError as e:
            raise click.UsageError(str(e)) from None
    return None


def common(f):
    opts = [
        click.option("--mu", "mu", type=float, default=0.2, show_default=True, help="muhat"),
        click.option("--nu", "nu", type=float, default=1.6, show_default=True, help="nuhat"),
        click.option("--order", type=int, default=35, show_default=True, help="truncation order N"),
        click.option("--scale", type=float, default=0.5, show_default=True, help="eigenvector length"),
        click.option("--out", type=click.Path(file_okay=False), default="out", show_default=True),
    ]
    for o in reversed(opts):
        f = o(f)
    return f


def _write(out: str, name: str, text: str) -> str:
    os.makedirs(out, exist_ok=True)
    path = os.path.join(out, name)
    with open(path, "w") as fh:
        fh.write(text)
    return path


@click.group()
@click.option("-v", "--verbose", is_flag=True)
def main(verbose):
    """Validated manifolds, resonant bundles and conjugate-point windows for Swift-Hohenberg pulses."""
    logging.basicConfig(level=logging.INFO if verbose else logging.WARNING, format="%(levelname)s %(message)s")


@main.command()
@common
@click.option("--oracle", type=click.Choice(["bistable"]), default=None, help="run a closed-form oracle instead")
@click.option("--lplus-file", type=str, default=None, help="JSON with beta, gamma as [[re, im], [re, im]]")
@click.option("--lplus-sweep", type=str, default=None, help="LO:HI:STEP grid for L+")
@click.option("--beta-norm", type=str, default=None, help="LO:HI range of |beta~|")
@click.option("--gamma-norm", type=str, default=None, help="LO:HI range of |gamma~|")
def validate(mu, nu, order, scale, out, oracle, lplus_file, lplus_sweep, beta_norm, gamma_norm):
    """Run the whole validation and write certificate.json."""
    if oracle == "bistable":
        from .oracle_bistable import run_oracle

        # --order keeps its Swift-Hohenberg default; the oracle runs at N = 10 unless set
        src = click.get_current_context().get_parameter_source("order")
        rep = run_oracle(10 if src == click.core.ParameterSource.DEFAULT else order)
        d = rep.to_json()
        runtime = d.pop("runtime_s")
        d["timings"] = {"oracle": round(runtime, 3)}
        path = _write(out, "oracle_bistable.json", dumps(d))
        click.echo(f"oracle bistable: {'ok' if rep.ok else 'FAILED'} -> {path}")
        for f in rep.failures:
            click.echo(f"  {f}", err=True)
        sys.exit(EXIT_OK if rep.ok else EXIT_FAILED)
    cfg = _config(mu, nu, order, scale, out, lplus_file, lplus_sweep, beta_norm, gamma_norm)
    lp = _lplus_inputs(cfg)
    cert, code = run_validate(cfg, lp)
    path = _write(out, "certificate.json", dumps(cert))
    for c in cert["claims"]:
        click.echo(f"{'ok  ' if c['holds'] else 'FAIL'} {c['name']}")
    if cert["error"]:
        click.echo(f"error: {cert['error']}", err=True)
    click.echo(f"verdict: {cert['verdict']} -> {path}")
    sys.exit(code)


@main.command()
@common
@click.argument("what", type=click.Choice(["coeffs", "pointcloud", "bundlecloud"]))
@click.option("--grid", type=int, default=100, show_default=True, help="polar grid size per axis")
def export(mu, nu, order, scale, out, what, grid):
    """Write CSV data (coefficients, manifold point cloud, bundle vectors)."""
    from . import bundle as bd
    from . import manifold as mf
    from .spectrum import SHParams, compute_spectrum

    try:
        sp = compute_spectrum(SHParams(mu, nu))
    except ValueError as e:
        raise click.UsageError(str(e)) from None
    os.makedirs(out, exist_ok=True)
    try:
        if what == "coeffs":
            for side in ("stable", "unstable"):
                mp = mf.sh_manifold(sp, side, order, scale, validate=False)
                mp.P.to_csv(os.path.join(out, f"manifold_{side}.csv"))
            B = bd.solve_bundle_coeffs(mf.sh_manifold(sp, "stable", order, scale, validate=False))
            B.W.to_csv(os.path.join(out, "bundle_stable.csv"))
            click.echo(f"coefficients -> {out}")
        elif what == "pointcloud":
            for side in ("stable", "unstable"):
                mp = mf.sh_manifold(sp, side, order, scale, validate=False)
                rows = pointcloud(mp, sp, grid, grid)
                np.savetxt(os.path.join(out, f"pointcloud_{side}.csv"), rows, delimiter=",",
                           header="s,t,u1,u2,u3,u4,e_s_re,e_s_im,e_u_re", comments="", fmt="%.17g")
            click.echo(f"point clouds -> {out}")
        else:
            mp = mf.sh_manifold(sp, "unstable", order, scale, validate=False)
            rows = bundlecloud(mp, sp, max(2, grid // 5), max(3, grid // 4))
            hdr = ",".join(["s", "t"] + [f"u{k}" for k in range(1, 5)] + [f"re_v{k}" for k in range(1, 5)] +
                           [f"im_v{k}" for k in range(1, 5)])
            np.savetxt(os.path.join(out, "bundlecloud.csv"), rows, delimiter=",", header=hdr, comments="", fmt="%.17g")
            click.echo(f"bundle cloud -> {out}")
    except OSError as e:
        click.echo(f"error: {e}", err=True)
        sys.exit(EXIT_ERROR)


@main.command()
@common
@click.option("--lplus-file", type=str, default=None)
@click.option("--lplus-sweep", type=str, default=None)
@click.option("--beta-norm", type=str, default=None)
@click.option("--gamma-norm", type=str, default=None)
def lplus(mu, nu, order, scale, out, lplus_file, lplus_sweep, beta_norm, gamma_norm):
    """Evaluate the L+ condition over a grid of L."""
    cfg = _config(mu, nu, order, scale, out, lplus_file, lplus_sweep, beta_norm, gamma_norm)
    inputs = _lplus_inputs(cfg)
    if inputs is None:
        raise click.UsageError("need --lplus-file or --gamma-norm")
    rep, code = run_lplus(cfg, inputs)
    path = _write(out, "lplus.json", dumps(rep))
    click.echo(f"L+: {rep['L_plus'] if rep['L_plus'] is not None else 'none on grid'} -> {path}")
    sys.exit(code)


@main.command()
@click.argument("certificate", type=click.Path(exists=True, dir_okay=False))
def recheck(certificate):
    """Re-verify a certificate from its stored endpoints."""
    try:
        with open(certificate) as fh:
            cert = json.load(fh)
    except (OSError, json.JSONDecodeError) as e:
        click.echo(f"error: {e}", err=True)
        sys.exit(EXIT_ERROR)
    agrees, problems = recheck_cert(cert)
    for p in problems:
        click.echo(p)
    click.echo(f"recheck: {'agrees' if agrees else 'DISAGREES'}; verdict {cert.get('verdict')}")
    sys.exit(EXIT_OK if agrees and cert.get("verdict") else EXIT_FAILED)


if __name__ == "__main__":
    main()
