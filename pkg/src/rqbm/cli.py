"""Batch command-line front end.

Four subcommands (dispersion, evolve, madelung, spectrum) over a shared
config pipeline: a YAML file whose keys mirror the kebab-case long flags,
with explicit flags taking precedence and every defaulted value echoed to
the run log.  Outputs are CSV (17 significant digits, byte-stable for
identical configs) or JSON mirrors, written atomically.

Exit codes: 0 success, 2 input/validation error, 3 numerical failure.
Set RQBM_LOG=INFO (or DEBUG, ...) for run logs on stderr.
"""

from __future__ import annotations

import argparse
import json
import logging
import math
import os
import re
import sys
import tempfile

import numpy as np
import yaml

from . import __version__
from .dispersion import asymptotic_omega, build_polynomial, track_branches
from .errors import InputError, NumericalFailureError, UnsupportedRegimeError
from .evolve import (
    DensityModeState,
    EvolutionConfig,
    evolve_density,
    evolve_field,
    gaussian_packet,
    particle_branch_project,
    plane_wave,
)
from .grid import ComplexField, Grid1D
from .madelung import FLOOR, decompose, quantum_potential, reconstruct, residuals
from .spectrum import (
    Box,
    Free,
    Harmonic,
    Tabulated,
    nonrel_eigen,
    nonrel_eigen_richardson,
    relativistic_map,
)
from .units import Model, ModelParams, model_from_name

log = logging.getLogger("rqbm.cli")

_SENTINEL = object()  # marks "flag not given" so config/file defaults can fill in


def _fmt(x) -> str:
    if x is None:
        return ""
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    return "%.17g" % float(x)


def _atomic_write(path: str, text: str) -> None:
    path = os.path.abspath(path)
    fd, tmp = tempfile.mkstemp(dir=os.path.dirname(path), prefix=".rqbm-", suffix=".tmp")
    try:
        with os.fdopen(fd, "w") as f:
            f.write(text)
        os.replace(tmp, path)
    except BaseException:
        try:
            os.unlink(tmp)
        except OSError:
            pass
        raise


def _write_table(path: str, fmt: str, header: list[str], rows: list[list],
                 footer: dict | None = None) -> None:
    if fmt == "csv":
        lines = [",".join(header)]
        for row in rows:
            lines.append(",".join(_fmt(v) if not isinstance(v, str) else v for v in row))
        if footer:
            for key, val in footer.items():
                lines.append(f"# {key} = {_fmt(val) if not isinstance(val, str) else val}")
        _atomic_write(path, "\n".join(lines) + "\n")
    else:
        recs = []
        for row in rows:
            rec = {}
            for key, val in zip(header, row):
                if isinstance(val, float) and math.isnan(val):
                    val = None
                rec[key] = val
            recs.append(rec)
        doc: dict = {"rows": recs}
        if footer:
            doc["diagnostics"] = {
                k: (None if isinstance(v, float) and math.isnan(v) else v)
                for k, v in footer.items()
            }
        _atomic_write(path, json.dumps(doc, indent=2) + "\n")


# ---------------------------------------------------------------------------
# config plumbing

def _load_config_file(path: str) -> dict:
    try:
        with open(path) as f:
            doc = yaml.safe_load(f)
    except OSError as exc:
        raise InputError(f"cannot read config {path}: {exc}") from exc
    except yaml.YAMLError as exc:
        mark = getattr(exc, "problem_mark", None)
        where = f" (line {mark.line + 1}, column {mark.column + 1})" if mark else ""
        raise InputError(f"config parse error in {path}{where}: {exc}") from exc
    if doc is None:
        return {}
    if not isinstance(doc, dict):
        raise InputError(f"config {path} must be a mapping of flag names to values")
    return doc


def _merge(args: argparse.Namespace, defaults: dict, required: set[str]) -> dict:
    """Flags beat config values beat defaults; echo every default used."""
    cfg = {}
    if getattr(args, "config", None) not in (None, _SENTINEL):
        raw = _load_config_file(args.config)
        known = {d.replace("_", "-"): d for d in defaults}
        for key, val in raw.items():
            if key not in known:
                raise InputError(
                    f"unknown config key {key!r}; valid keys: {', '.join(sorted(known))}"
                )
            cfg[known[key]] = val

    merged = {}
    for dest, default in defaults.items():
        flag_val = getattr(args, dest, _SENTINEL)
        if flag_val is not _SENTINEL:
            merged[dest] = flag_val
            if dest in cfg:
                log.info("flag --%s=%r overrides config value %r",
                         dest.replace("_", "-"), flag_val, cfg[dest])
        elif dest in cfg:
            merged[dest] = cfg[dest]
        else:
            merged[dest] = default
            if dest not in ("config",):
                log.info("default %s = %r", dest.replace("_", "-"), default)
    for dest in required:
        if merged.get(dest) is None:
            raise InputError(f"missing required option --{dest.replace('_', '-')}")
    return merged


def _as_float(cfg: dict, key: str, positive: bool = False):
    val = cfg[key]
    if val is None:
        return None
    try:
        out = float(val)
    except (TypeError, ValueError):
        raise InputError(f"--{key.replace('_', '-')} expects a number, got {val!r}")
    if positive and not (np.isfinite(out) and out > 0):
        raise InputError(f"--{key.replace('_', '-')} must be positive, got {out}")
    return out


def _as_int(cfg: dict, key: str):
    val = cfg[key]
    if val is None:
        return None
    if isinstance(val, bool) or (not isinstance(val, (int, np.integer))
                                 and not (isinstance(val, str) and val.lstrip("+-").isdigit())):
        raise InputError(f"--{key.replace('_', '-')} expects an integer, got {val!r}")
    return int(val)


def _as_choice(cfg: dict, key: str, choices: tuple):
    val = cfg[key]
    if val is None:
        return None
    if val not in choices:
        raise InputError(
            f"--{key.replace('_', '-')} must be one of {', '.join(choices)}; got {val!r}"
        )
    return val


def _model_params(cfg: dict) -> ModelParams:
    model = model_from_name(str(cfg["model"]))
    return ModelParams(
        model,
        gamma=_as_float(cfg, "gamma"),
        tau=_as_float(cfg, "tau"),
        diffusion=_as_float(cfg, "diffusion"),
    )


def _seed_note(cfg: dict) -> None:
    seed = _as_int(cfg, "seed")
    if seed is not None:
        log.info("seed = %d (reserved for randomized sweeps; built-in runs are "
                 "deterministic)", seed)


# ---------------------------------------------------------------------------
# subcommands

def _run_dispersion(args: argparse.Namespace) -> int:
    defaults = {
        "config": None, "out": None, "format": "csv", "seed": None,
        "model": None, "gamma": None, "tau": None, "diffusion": None,
        "k_min": 0.01, "k_max": 10.0, "k_steps": 200, "k_scale": "log",
    }
    cfg = _merge(args, defaults, required={"model", "out"})
    _seed_note(cfg)
    params = _model_params(cfg)
    fmt = _as_choice(cfg, "format", ("csv", "json"))
    scale = _as_choice(cfg, "k_scale", ("log", "linear"))
    k_min = _as_float(cfg, "k_min")
    k_max = _as_float(cfg, "k_max")
    k_steps = _as_int(cfg, "k_steps")
    if k_steps is None or k_steps < 2:
        raise InputError("--k-steps must be an integer >= 2")
    if not (np.isfinite(k_min) and np.isfinite(k_max) and 0 <= k_min < k_max):
        raise InputError(f"need 0 <= k-min < k-max, got [{k_min}, {k_max}]")
    if scale == "log":
        if k_min <= 0:
            raise InputError("log-spaced sweeps need k-min > 0 (use --k-scale linear)")
        k_grid = np.geomspace(k_min, k_max, k_steps)
    else:
        k_grid = np.linspace(k_min, k_max, k_steps)

    curve = track_branches(params, k_grid)
    deg = curve.branches.shape[0]
    header = (["model", "k"]
              + [f"{p}_w{i}" for i in range(1, 5) for p in ("re", "im")]
              + [f"res{i}" for i in range(1, 5)]
              + [f"branch{i}" for i in range(1, 5)]
              + ["asym_low_re", "asym_low_im"])
    rows = []
    for j, k in enumerate(k_grid):
        poly = build_polynomial(params, float(k))
        row: list = [params.model.value, float(k)]
        for i in range(4):
            if i < deg:
                w = curve.branches[i, j]
                row += [w.real, w.imag]
            else:
                row += [None, None]
        for i in range(4):
            if i < deg:
                w = curve.branches[i, j]
                den = poly.residual_scale(w)
                row.append(abs(poly(w)) / den if den > 0 else 0.0)
            else:
                row.append(None)
        row += [curve.labels[i] if i < deg else "" for i in range(4)]
        try:
            asym = asymptotic_omega(params, float(k), "low")
            row += [asym.real, asym.imag]
        except UnsupportedRegimeError:
            row += [None, None]
        rows.append(row)
    _write_table(cfg["out"], fmt, header, rows)
    log.info("wrote %d rows to %s", len(rows), cfg["out"])
    return 0


def _snap_name(t: float, fmt: str) -> str:
    return f"snap_{t:.12g}.{fmt}"


def _run_evolve(args: argparse.Namespace) -> int:
    defaults = {
        "config": None, "out": None, "format": "csv", "seed": None,
        "model": "conservative", "gamma": None, "tau": None, "diffusion": None,
        "n": 256, "length": 100.0, "dt": 0.01, "steps": 100,
        "method": "exact-mode", "snapshot_stride": 1,
        # kbar defaults to an at-rest packet: a drift that is not an exact
        # grid mode winds fractionally at the periodic seam and poisons the
        # pointwise residual columns (the integral charges are unaffected)
        "init": "gaussian", "sigma": 8.0, "kbar": 0.0,
        "mode_k": None, "amplitude": 1.0,
        "density": False, "k": 0.1,
        "potential": "none", "omega0": None,
    }
    cfg = _merge(args, defaults, required={"out"})
    _seed_note(cfg)
    params = _model_params(cfg)
    fmt = _as_choice(cfg, "format", ("csv", "json"))
    dt = _as_float(cfg, "dt", positive=True)
    steps = _as_int(cfg, "steps")
    stride = _as_int(cfg, "snapshot_stride")
    outdir = cfg["out"]
    os.makedirs(outdir, exist_ok=True)

    if cfg["density"]:
        if params.model is Model.CONSERVATIVE:
            raise InputError("--density needs a dissipative model")
        k = _as_float(cfg, "k")
        if k is None or not (np.isfinite(k) and k >= 0):
            raise InputError(f"--k must be finite and >= 0, got {k!r}")
        econf = EvolutionConfig(dt=dt, steps=steps, snapshot_stride=stride)
        init = DensityModeState(k=np.array([k]), derivs=np.array([[1.0, 0.0, 0.0, 0.0]]))
        rows = []
        for j in range(steps // stride + 1):
            t = j * stride * dt
            state = evolve_density(params, init, t) if t else init
            rows.append([t, k, state.rho[0].real, state.rho[0].imag])
        path = os.path.join(outdir, f"density.{fmt}")
        _write_table(path, fmt, ["t", "k", "re_rho", "im_rho"], rows)
        log.info("wrote %d density samples to %s", len(rows), path)
        return 0

    if params.model is not Model.CONSERVATIVE:
        raise InputError(
            "field evolution integrates the conservative law; dissipative "
            "models evolve linearized densities (use --density)"
        )
    n = _as_int(cfg, "n")
    length = _as_float(cfg, "length", positive=True)
    grid = Grid1D(n, length)

    init_kind = _as_choice(cfg, "init", ("gaussian", "plane-wave", "zero"))
    if init_kind == "gaussian":
        psi = gaussian_packet(grid, _as_float(cfg, "sigma", positive=True),
                              _as_float(cfg, "kbar"))
    elif init_kind == "plane-wave":
        mode_k = _as_float(cfg, "mode_k")
        if mode_k is None:
            raise InputError("--init plane-wave requires --mode-k")
        psi = plane_wave(grid, mode_k, _as_float(cfg, "amplitude"))
    else:
        psi = ComplexField(grid, np.zeros(grid.n, dtype=np.complex128))

    method = _as_choice(cfg, "method", ("exact-mode", "stepper")).replace("-", "_")
    econf = EvolutionConfig(dt=dt, steps=steps, method=method, snapshot_stride=stride)

    pot_kind = _as_choice(cfg, "potential", ("none", "harmonic"))
    potential = None
    if pot_kind == "harmonic":
        omega0 = _as_float(cfg, "omega0", positive=True)
        if omega0 is None:
            raise InputError("--potential harmonic requires --omega0")
        potential = 0.5 * omega0**2 * grid.x**2

    state = particle_branch_project(psi)
    snaps, trips = evolve_field(state, econf, potential=potential, return_triples=True)

    zero_run = all(not np.any(s.psi.values) for s in snaps)
    traj_rows = []
    prior = None
    for s, (prev, nxt) in zip(snaps, trips):
        x = grid.x
        if zero_run:
            q = np.zeros(grid.n)
            rho = np.zeros(grid.n)
            sph = np.zeros(grid.n)
            traj_rows.append([s.t, 0.0, 0.0, 0.0, 0.0, 0.0])
        else:
            f0 = decompose(ComplexField(grid, prev), prior_S=prior, t=s.t - dt)
            f1 = decompose(s.psi, prior_S=f0.S, t=s.t)
            f2 = decompose(ComplexField(grid, nxt), prior_S=f1.S, t=s.t + dt)
            prior = f1.S
            diag = residuals((f0, f1, f2), params, potential=potential)
            q = quantum_potential(grid, (f0.rho, f1.rho, f2.rho), dt)
            rho, sph = f1.rho, f1.S
            traj_rows.append([s.t, diag.N, diag.N_mod, diag.E,
                              diag.continuity_residual, diag.hj_residual])
        snap_rows = [[x[i], s.psi.values[i].real, s.psi.values[i].imag,
                      rho[i], sph[i], q[i]] for i in range(grid.n)]
        _write_table(os.path.join(outdir, _snap_name(s.t, fmt)), fmt,
                     ["x", "re_psi", "im_psi", "rho", "S", "Q"], snap_rows)

    path = os.path.join(outdir, f"traj.{fmt}")
    _write_table(path, fmt,
                 ["t", "N", "N_mod", "E", "continuity_residual", "hj_residual"],
                 traj_rows)
    log.info("wrote %d snapshots and %s", len(snaps), path)
    return 0


def _read_snapshot(path: str) -> tuple[np.ndarray, np.ndarray, float]:
    m = re.search(r"snap_([^/\\]+)\.(csv|json)$", path)
    if not m:
        raise InputError(f"snapshot name {path!r} does not match snap_<t>.csv")
    try:
        t = float(m.group(1))
    except ValueError:
        raise InputError(f"cannot parse snapshot time from {path!r}")
    try:
        if m.group(2) == "json":
            with open(path) as f:
                doc = json.load(f)
            rows = doc["rows"]
            x = np.array([r["x"] for r in rows], dtype=float)
            psi = np.array([complex(r["re_psi"], r["im_psi"]) for r in rows])
        else:
            data = np.genfromtxt(path, delimiter=",", names=True, comments="#")
            x = np.asarray(data["x"], dtype=float)
            psi = np.asarray(data["re_psi"]) + 1j * np.asarray(data["im_psi"])
    except OSError as exc:
        raise InputError(f"cannot read snapshot {path}: {exc}") from exc
    except (KeyError, ValueError) as exc:
        raise InputError(f"snapshot {path} is malformed: {exc}") from exc
    if x.ndim != 1 or len(x) < 8:
        raise InputError(f"snapshot {path} holds too few points")
    return x, psi, t


def _run_madelung(args: argparse.Namespace) -> int:
    defaults = {
        "config": None, "out": None, "format": "csv", "seed": None,
        "model": "conservative", "gamma": None, "tau": None, "diffusion": None,
        "snapshots": None,
    }
    cfg = _merge(args, defaults, required={"out", "snapshots"})
    _seed_note(cfg)
    params = _model_params(cfg)
    fmt = _as_choice(cfg, "format", ("csv", "json"))
    paths = cfg["snapshots"]
    if not (isinstance(paths, (list, tuple)) and len(paths) == 3):
        raise InputError("--snapshots takes exactly three paths")

    xs, psis, ts = zip(*(_read_snapshot(str(p)) for p in paths))
    x = xs[0]
    for other in xs[1:]:
        if len(other) != len(x) or np.max(np.abs(other - x)) > 1e-12 * max(1.0, np.max(np.abs(x))):
            raise InputError("snapshots live on different grids")
    dxs = np.diff(x)
    if np.max(np.abs(dxs - dxs[0])) > 1e-9 * abs(dxs[0]):
        raise InputError("snapshot x column is not uniformly spaced")
    grid = Grid1D(len(x), float(len(x) * dxs[0]))
    dt01, dt12 = ts[1] - ts[0], ts[2] - ts[1]
    if dt01 <= 0 or abs(dt12 - dt01) > 1e-9 * abs(dt01):
        raise InputError(
            f"snapshots are not three consecutive levels (dt {dt01} vs {dt12})"
        )

    prior = None
    fields = []
    for psi, t in zip(psis, ts):
        f = decompose(ComplexField(grid, psi), prior_S=prior, t=t)
        prior = f.S
        fields.append(f)
    diag = residuals(fields, params)
    f1 = fields[1]
    q = quantum_potential(grid, tuple(f.rho for f in fields), dt01)
    recon = reconstruct(f1)
    ok = f1.rho > FLOOR
    recon_err = float(np.max(np.abs(recon.values - psis[1])[ok])) if ok.any() else 0.0

    rows = [[x[i], f1.rho[i], f1.S[i], q[i]] for i in range(grid.n)]
    footer = {
        "t": diag.t,
        "N": diag.N,
        "N_mod": diag.N_mod,
        "E": diag.E,
        "continuity_residual": diag.continuity_residual,
        "hj_residual": diag.hj_residual,
        "excluded_fraction": diag.excluded_fraction,
        "reconstruction_error": recon_err,
    }
    _write_table(cfg["out"], fmt, ["x", "rho", "S", "Q"], rows, footer=footer)
    log.info("wrote %s (hj_residual = %.3e)", cfg["out"], diag.hj_residual)
    return 0


def _run_spectrum(args: argparse.Namespace) -> int:
    defaults = {
        "config": None, "out": None, "format": "csv", "seed": None,
        "potential": None, "omega0": None, "width": None, "potential_file": None,
        "n": 1024, "length": 400.0, "levels": 8, "richardson": False,
    }
    cfg = _merge(args, defaults, required={"out", "potential"})
    _seed_note(cfg)
    fmt = _as_choice(cfg, "format", ("csv", "json"))
    kind = _as_choice(cfg, "potential", ("free", "harmonic", "box", "tabulated"))
    grid = Grid1D(_as_int(cfg, "n"), _as_float(cfg, "length", positive=True))
    levels = _as_int(cfg, "levels")

    if kind == "free":
        pot = Free()
    elif kind == "harmonic":
        omega0 = _as_float(cfg, "omega0", positive=True)
        if omega0 is None:
            raise InputError("--potential harmonic requires --omega0")
        pot = Harmonic(omega0)
    elif kind == "box":
        width = _as_float(cfg, "width", positive=True)
        if width is None:
            raise InputError("--potential box requires --width")
        pot = Box(width)
    else:
        pf = cfg["potential_file"]
        if pf is None:
            raise InputError("--potential tabulated requires --potential-file")
        try:
            vals = np.loadtxt(pf, ndmin=1)
        except OSError as exc:
            raise InputError(f"cannot read potential file {pf}: {exc}") from exc
        except ValueError as exc:
            raise InputError(f"potential file {pf} is malformed: {exc}") from exc
        pot = Tabulated(vals)

    if cfg["richardson"]:
        eps = nonrel_eigen_richardson(pot, grid, levels)
    else:
        eps = nonrel_eigen(pot, grid, levels)
    result = relativistic_map(eps)
    rows = [[i, result.epsilon[i], result.E[i], result.E_series[i], result.rel_gap[i]]
            for i in range(len(eps))]
    _write_table(cfg["out"], fmt, ["n", "epsilon", "E", "E_series", "rel_gap"], rows)
    log.info("wrote %d levels to %s", len(rows), cfg["out"])
    return 0


# ---------------------------------------------------------------------------
# parser

def _add_common(sub: argparse.ArgumentParser) -> None:
    sub.add_argument("--config", default=_SENTINEL, help="YAML config file; flags override")
    sub.add_argument("--out", default=_SENTINEL, help="output path (directory for evolve)")
    sub.add_argument("--format", default=_SENTINEL, choices=("csv", "json"))
    sub.add_argument("--seed", type=int, default=_SENTINEL,
                     help="seed for randomized sweeps (reserved; runs are deterministic)")


def _add_model(sub: argparse.ArgumentParser, required: bool) -> None:
    sub.add_argument("--model", default=_SENTINEL,
                     help="conservative, collisional, radiative, phase-diffusion, "
                          "dalembert-diffusion")
    sub.add_argument("--gamma", type=float, default=_SENTINEL, help="collision rate")
    sub.add_argument("--tau", type=float, default=_SENTINEL, help="radiative memory time")
    sub.add_argument("--diffusion", type=float, default=_SENTINEL,
                     help="phase diffusion constant")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="rqbm",
        description="Relativistic quantum fluid workbench: dispersion roots, "
                    "field/density evolution, Madelung diagnostics, spectra.",
    )
    parser.add_argument("--version", action="version", version=f"rqbm {__version__}")
    subs = parser.add_subparsers(dest="command", required=True)

    p = subs.add_parser("dispersion", help="sweep k and write certified roots")
    _add_common(p)
    _add_model(p, required=True)
    p.add_argument("--k-min", dest="k_min", type=float, default=_SENTINEL)
    p.add_argument("--k-max", dest="k_max", type=float, default=_SENTINEL)
    p.add_argument("--k-steps", dest="k_steps", type=int, default=_SENTINEL)
    p.add_argument("--k-scale", dest="k_scale", default=_SENTINEL, choices=("log", "linear"))
    p.set_defaults(func=_run_dispersion)

    p = subs.add_parser("evolve", help="evolve the field or a density mode")
    _add_common(p)
    _add_model(p, required=False)
    p.add_argument("--n", type=int, default=_SENTINEL)
    p.add_argument("--length", type=float, default=_SENTINEL)
    p.add_argument("--dt", type=float, default=_SENTINEL)
    p.add_argument("--steps", type=int, default=_SENTINEL)
    p.add_argument("--method", default=_SENTINEL, choices=("exact-mode", "stepper"))
    p.add_argument("--snapshot-stride", dest="snapshot_stride", type=int, default=_SENTINEL)
    p.add_argument("--init", default=_SENTINEL, choices=("gaussian", "plane-wave", "zero"))
    p.add_argument("--sigma", type=float, default=_SENTINEL)
    p.add_argument("--kbar", type=float, default=_SENTINEL)
    p.add_argument("--mode-k", dest="mode_k", type=float, default=_SENTINEL)
    p.add_argument("--amplitude", type=float, default=_SENTINEL)
    p.add_argument("--density", action="store_const", const=True, default=_SENTINEL,
                   help="evolve a linearized density mode instead of the field")
    p.add_argument("--k", type=float, default=_SENTINEL, help="density mode wavenumber")
    p.add_argument("--potential", default=_SENTINEL, choices=("none", "harmonic"))
    p.add_argument("--omega0", type=float, default=_SENTINEL)
    p.set_defaults(func=_run_evolve)

    p = subs.add_parser("madelung", help="decompose three snapshots and report residuals")
    _add_common(p)
    _add_model(p, required=False)
    p.add_argument("--snapshots", nargs=3, default=_SENTINEL,
                   metavar=("T0", "T1", "T2"))
    p.set_defaults(func=_run_madelung)

    p = subs.add_parser("spectrum", help="nonrelativistic levels and the energy map")
    _add_common(p)
    p.add_argument("--potential", default=_SENTINEL,
                   choices=("free", "harmonic", "box", "tabulated"))
    p.add_argument("--omega0", type=float, default=_SENTINEL)
    p.add_argument("--width", type=float, default=_SENTINEL)
    p.add_argument("--potential-file", dest="potential_file", default=_SENTINEL)
    p.add_argument("--n", type=int, default=_SENTINEL)
    p.add_argument("--length", type=float, default=_SENTINEL)
    p.add_argument("--levels", type=int, default=_SENTINEL)
    p.add_argument("--richardson", action="store_const", const=True, default=_SENTINEL)
    p.set_defaults(func=_run_spectrum)

    return parser


def main(argv=None) -> int:
    level = os.environ.get("RQBM_LOG", "WARNING").upper()
    logging.basicConfig(
        stream=sys.stderr,
        level=getattr(logging, level, logging.WARNING),
        format="%(levelname)s %(name)s: %(message)s",
    )
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except InputError as exc:
        print(f"rqbm: input error: {exc}", file=sys.stderr)
        return 2
    except NumericalFailureError as exc:
        print(f"rqbm: numerical failure: {exc}", file=sys.stderr)
        return 3
    except Exception as exc:  # pragma: no cover - catch-all safety net
        print(f"rqbm: unexpected failure: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 3


if __name__ == "__main__":
    sys.exit(main())
