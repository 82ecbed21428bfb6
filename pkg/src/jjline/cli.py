"""Command-line front end: validated configs in, deterministic CSVs out.

Every run writes <subcommand>.csv (plus auxiliary CSVs where noted) and a
<subcommand>.manifest.toml holding the fully resolved configuration, so
the run can be reproduced byte-for-byte from the manifest alone. Exit
codes: 0 success, 2 configuration error, 3 numerical failure
(singularity, degeneracy, empty contour), 4 I/O failure.
"""

from __future__ import annotations

import argparse
import os
import sys

import numpy as np

from . import __version__, config
from .crystal1d import band_structure, find_gaps, write_band_csv
from .crystal2d import isofrequency_contour, refract, write_contour_csv
from .disorder import DisorderSpec, QubitParams, ensemble_map, write_ensemble_csv
from .errors import ConfigError, JJLineError, TotalReflection
from .scattering import CrystalChain, JunctionSpec, junction_rt

__all__ = [
    "cmd_scatter",
    "cmd_bands1d",
    "cmd_bands2d",
    "cmd_refract",
    "cmd_entangle",
    "main",
]


def _grid(sec: dict) -> np.ndarray:
    return np.linspace(sec["omega_min"], sec["omega_max"], sec["n"])


def _path(outdir: str, name: str, written: list) -> str:
    p = os.path.join(outdir, name)
    written.append(p)
    return p


def cmd_scatter(cfg: dict, outdir: str, written: list) -> None:
    """CSV sweep of single-junction r, t over a frequency grid."""
    j = JunctionSpec(omega_p=cfg["junction"]["omega_p"], z_ratio=cfg["junction"]["z_ratio"])
    with open(_path(outdir, "scatter.csv", written), "w", encoding="utf-8") as fh:
        fh.write("omega,abs_r,abs_t,arg_t\n")
        for w in _grid(cfg["grid"]):
            r, t = junction_rt(j, float(w))
            fh.write(f"{w:.17g},{abs(r):.17g},{abs(t):.17g},{np.angle(t):.17g}\n")


def cmd_bands1d(cfg: dict, outdir: str, written: list) -> None:
    """Bloch phase CSV plus detected gap edges for a 1D unit cell."""
    cell = config.chain_from_elements(cfg["cell"]["element"])
    bs = band_structure(cell, _grid(cfg["grid"]))
    write_band_csv(_path(outdir, "bands1d.csv", written), bs)
    gaps = find_gaps(cell, cfg["grid"]["omega_min"], cfg["grid"]["omega_max"],
                     n_scan=cfg["gaps"]["n_scan"])
    with open(_path(outdir, "bands1d_gaps.csv", written), "w", encoding="utf-8") as fh:
        fh.write("gap_lo,gap_hi\n")
        for lo, hi in gaps:
            fh.write(f"{lo:.17g},{hi:.17g}\n")


def cmd_bands2d(cfg: dict, outdir: str, written: list) -> None:
    """Isofrequency contour CSV of the square junction network."""
    cell = config.chain_from_elements(cfg["cell"]["element"])
    pts = isofrequency_contour(cell, cfg["contour"]["omega"], n=cfg["contour"]["n"])
    write_contour_csv(_path(outdir, "bands2d.csv", written), pts)


def cmd_refract(cfg: dict, outdir: str, written: list) -> None:
    """Refraction angle sweep; totally reflected rows carry NaN angles."""
    cell = config.chain_from_elements(cfg["cell"]["element"])
    theta_in = cfg["scan"]["theta_in"]
    with open(_path(outdir, "refract.csv", written), "w", encoding="utf-8") as fh:
        fh.write("omega,theta_in,theta_out,px,py,vx,vy,negative\n")
        for w in _grid(cfg["scan"]):
            try:
                res = refract(cell, float(w), theta_in)
                fh.write(f"{w:.17g},{theta_in:.17g},{res.theta_out:.17g},"
                         f"{res.px:.17g},{res.py:.17g},{res.vx:.17g},{res.vy:.17g},"
                         f"{1 if res.negative else 0}\n")
            except TotalReflection:
                fh.write(f"{w:.17g},{theta_in:.17g},nan,nan,nan,nan,nan,0\n")


def cmd_entangle(cfg: dict, outdir: str, written: list) -> None:
    """Disorder-ensemble concurrence map over (omega, delta)."""
    ch = cfg["chain"]
    junction = JunctionSpec(omega_p=ch["omega_p"], z_ratio=ch["z_ratio"])
    base = CrystalChain.periodic(junction, ch["n_junctions"],
                                 ch["length"] / ch["n_junctions"])
    dis = cfg["disorder"]
    spec = DisorderSpec(base_chain=base, delta=0.0,
                        n_realizations=dis["n_realizations"],
                        seed=cfg["run"]["seed"],
                        correlated_draws=dis["correlated_draws"])
    params = QubitParams(f=cfg["qubits"]["f"], lambda_nr=cfg["qubits"]["lambda_nr"],
                         gamma0=cfg["qubits"]["gamma0"])
    result = ensemble_map(spec, _grid(cfg["grid"]), np.asarray(dis["deltas"]),
                          params, n_separations=dis["n_separations"],
                          workers=cfg["run"]["workers"])
    write_ensemble_csv(_path(outdir, "entangle.csv", written), result)


_COMMANDS = {
    "scatter": cmd_scatter,
    "bands1d": cmd_bands1d,
    "bands2d": cmd_bands2d,
    "refract": cmd_refract,
    "entangle": cmd_entangle,
}


def _resolve_run(cfg: dict, args) -> None:
    """Apply flag/env precedence onto the [run] section in place."""
    if args.seed is not None:
        if not 0 <= args.seed < 2**64:
            raise ConfigError("--seed must fit in 64 unsigned bits")
        cfg["run"]["seed"] = args.seed
    if args.workers is not None:
        workers = args.workers
    else:
        env = os.environ.get("JJLINE_WORKERS", "").strip()
        if env:
            try:
                workers = int(env)
            except ValueError:
                raise ConfigError(f"JJLINE_WORKERS = {env!r} is not an integer") from None
        else:
            workers = cfg["run"]["workers"]
    if workers < 1:
        raise ConfigError("worker count must be >= 1")
    cfg["run"]["workers"] = workers


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="jjline",
        description="Photon transport in junction-loaded transmission lines")
    parser.add_argument("--version", action="version", version=f"jjline {__version__}")
    sub = parser.add_subparsers(dest="subcommand", required=True)
    helps = {
        "scatter": "single-junction reflection/transmission sweep",
        "bands1d": "1D crystal Bloch bands and gap edges",
        "bands2d": "2D network isofrequency contour",
        "refract": "refraction angles at the 45-degree crystal cut",
        "entangle": "disordered-chain steady-state concurrence map",
    }
    for name, fn in _COMMANDS.items():
        sp = sub.add_parser(name, help=helps[name])
        sp.add_argument("--config", required=True, help="TOML run configuration")
        sp.add_argument("--output", default=".", help="output directory (default: .)")
        sp.add_argument("--seed", type=int, default=None, help="override run.seed")
        sp.add_argument("--workers", type=int, default=None,
                        help="parallel workers (overrides JJLINE_WORKERS and run.workers)")
    return parser


def main(argv=None) -> int:
    args = _build_parser().parse_args(argv)
    written: list = []
    try:
        cfg = config.validate(args.subcommand, config.load_config(args.config))
        _resolve_run(cfg, args)
        os.makedirs(args.output, exist_ok=True)
        _COMMANDS[args.subcommand](cfg, args.output, written)
        config.write_manifest(os.path.join(args.output, f"{args.subcommand}.manifest.toml"),
                              args.subcommand, __version__, cfg)
    except ConfigError as exc:
        _cleanup(written)
        print(f"jjline: config error: {exc}", file=sys.stderr)
        return 2
    except JJLineError as exc:
        _cleanup(written)
        print(f"jjline: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 3
    except OSError as exc:
        _cleanup(written)
        print(f"jjline: i/o error: {exc}", file=sys.stderr)
        return 4
    return 0


def _cleanup(written: list) -> None:
    for p in written:
        try:
            os.unlink(p)
        except OSError:
            pass


if __name__ == "__main__":
    sys.exit(main())
