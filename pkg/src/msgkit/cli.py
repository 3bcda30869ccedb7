"""Command-line front end: ``msgkit <subcommand> [flags]``.

Every subcommand writes one CSV table preceded by ``#`` metadata lines.  The
``# command:`` line lists every effective flag, so pasting it back reproduces
the run; only the ``# wall_time:`` line differs between identical runs.

Exit codes: 0 success, 1 usage error, 2 numerical failure.
"""
from __future__ import annotations

import argparse
import io
import math
import re
import sys
import time
from pathlib import Path

import numpy as np

from . import __version__
from .analysis import (
    count_subkinks,
    phase_portrait,
    scan_energy,
    scan_equation_of_state,
)
from .dynamics import PerturbationSpec, dispersion, evolve
from .errors import MsgkitError, NumericalFailure
from .expansion import BUILTIN_FUNCTIONS, builtin_function, expand_in_msg_basis
from .fixed_points import bifurcation_scan
from .model import ModelParams, potential, potential_derivative, potential_second_derivative
from .static_solver import SolverConfig, integrate, kink_profile, launch_slope

__all__ = ["run", "main", "parse_params", "parse_angle"]

SUBCOMMANDS = (
    "potential", "kink", "static", "scan-eos", "scan-energy",
    "phase", "fixed-points", "dispersion", "evolve", "expand",
)
# flags that only choose where output goes or how fast it is computed
_NOT_REPRODUCED = {"out", "spectrum_out", "jobs", "command"}

_ANGLE = re.compile(r"^\s*([+-]?(?:\d+\.?\d*|\.\d+)(?:[eE][+-]?\d+)?)?\s*\*?\s*pi\s*$")


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(f"{self.prog}: {message}")


def parse_angle(text: str) -> float:
    """Float, or a multiple of pi written as ``pi``, ``2pi``, ``0.5pi``, ``-pi``."""
    m = _ANGLE.match(text)
    if m:
        coef = m.group(1)
        if coef in (None, "", "+"):
            return math.pi
        if coef == "-":
            return -math.pi
        return float(coef) * math.pi
    if text.strip() == "-pi":
        return -math.pi
    try:
        return float(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not an angle: {text!r} (use a number or e.g. pi, 2pi, 0.5pi)")


def _int_at_least(lo):
    def conv(text):
        try:
            value = int(text)
        except ValueError:
            raise argparse.ArgumentTypeError(f"expected an integer >= {lo}, got {text!r}")
        if value < lo:
            raise argparse.ArgumentTypeError(f"must be an integer >= {lo}, got {value}")
        return value
    return conv


def _float_in(lo=None, hi=None, open_lo=False):
    def conv(text):
        try:
            value = float(text)
        except ValueError:
            raise argparse.ArgumentTypeError(f"expected a number, got {text!r}")
        if not math.isfinite(value):
            raise argparse.ArgumentTypeError(f"must be finite, got {text!r}")
        if lo is not None and (value < lo or (open_lo and value == lo)):
            rel = ">" if open_lo else ">="
            raise argparse.ArgumentTypeError(f"must be {rel} {lo:g}, got {value:g}")
        if hi is not None and value > hi:
            raise argparse.ArgumentTypeError(f"must be <= {hi:g}, got {value:g}")
        return value
    return conv


_positive = _float_in(0.0, open_lo=True)


def _model_flags(p):
    p.add_argument("--n", type=_int_at_least(1), required=True, help="harmonic N (integer >= 1)")
    p.add_argument("--eps", type=_float_in(0.0), required=True, help="epsilon (>= 0)")


def _solver_flags(p):
    p.add_argument("--step", type=_positive, default=SolverConfig.step, help="RK4 step (> 0)")
    p.add_argument("--x-max", type=_positive, default=SolverConfig.x_max, help="integration horizon (> 0)")
    p.add_argument("--tol", type=_positive, default=SolverConfig.conservation_tol, help="allowed drift of P")


def _out_flag(p):
    p.add_argument("--out", type=Path, help="CSV path (default: stdout)")


def _grid_flags(p):
    p.add_argument("--p-min", type=float, help="lowest pressure (default: just above -V(pi))")
    p.add_argument("--p-max", type=float, help="highest pressure (default: just below 0)")
    p.add_argument("--points", type=_int_at_least(2), default=400, help="grid size")
    p.add_argument("--jobs", type=_int_at_least(1), default=1, help="worker processes")


def _build_parser():
    parser = _Parser(prog="msgkit", description="Multiple-sine-Gordon static and stability analysis.")
    parser.add_argument("--version", action="version", version=f"msgkit {__version__}")
    sub = parser.add_subparsers(dest="command", parser_class=_Parser)

    p = sub.add_parser("potential", help="tabulate V, V' and V''")
    _model_flags(p)
    p.add_argument("--samples", type=_int_at_least(2), default=101)
    p.add_argument("--phi-min", type=parse_angle, default=0.0)
    p.add_argument("--phi-max", type=parse_angle, default=2 * math.pi)
    _out_flag(p)

    p = sub.add_parser("kink", help="single kink profile by RK4 shooting")
    _model_flags(p)
    _solver_flags(p)
    p.add_argument("--stride", type=_int_at_least(1), default=1, help="write every n-th sample")
    _out_flag(p)

    p = sub.add_parser("static", help="static trajectory launched from phi = pi")
    _model_flags(p)
    launch = p.add_mutually_exclusive_group(required=True)
    launch.add_argument("--p", type=float, help="pressure P (sets slope0 = sqrt(2(P + V(pi))))")
    launch.add_argument("--slope0", type=float, help="initial slope at phi = pi")
    _solver_flags(p)
    p.add_argument("--stride", type=_int_at_least(1), default=1, help="write every n-th sample")
    _out_flag(p)

    for name, helptext in (("scan-eos", "equation of state P vs mean density"),
                           ("scan-energy", "energy per soliton vs spacing")):
        p = sub.add_parser(name, help=helptext)
        _model_flags(p)
        _grid_flags(p)
        _out_flag(p)

    p = sub.add_parser("phase", help="closed phase-portrait loop at pressure P")
    _model_flags(p)
    p.add_argument("--p", type=float, required=True)
    p.add_argument("--samples", type=_int_at_least(5), default=801)
    _out_flag(p)

    p = sub.add_parser("fixed-points", help="fixed points over an epsilon grid")
    p.add_argument("--n", type=_int_at_least(1), required=True, help="harmonic N (integer >= 1)")
    p.add_argument("--eps-min", type=_float_in(0.0), default=0.0)
    p.add_argument("--eps-max", type=_float_in(0.0), default=1.0)
    p.add_argument("--eps-points", type=_int_at_least(1), default=400)
    _out_flag(p)

    p = sub.add_parser("dispersion", help="omega^2 = k^2 + V''(phi_n)")
    _model_flags(p)
    p.add_argument("--phi-n", type=parse_angle, required=True)
    p.add_argument("--k", type=_float_in(0.0), nargs="+", required=True)
    _out_flag(p)

    p = sub.add_parser("evolve", help="leapfrog evolution of a perturbed fixed point")
    _model_flags(p)
    p.add_argument("--phi-n", type=parse_angle, required=True)
    p.add_argument("--amplitude", type=_float_in(0.0, 0.1), default=0.01, help="in [0, 0.1]")
    p.add_argument("--k", type=_positive, nargs="+", required=True, help="mode wave numbers")
    p.add_argument("--wavelengths", type=_int_at_least(1), default=1,
                   help="domain length in wavelengths of the smallest k")
    p.add_argument("--dx", type=_positive, default=0.05)
    p.add_argument("--dt", type=_positive, default=0.02)
    p.add_argument("--steps", type=_int_at_least(1), default=200)
    p.add_argument("--snapshot-every", type=_int_at_least(1), default=10)
    _out_flag(p)
    p.add_argument("--spectrum-out", type=Path, help="spectrum CSV path (t,k,amplitude)")

    p = sub.add_parser("expand", help="MSG basis expansion of a built-in periodic function")
    p.add_argument("--eps", type=_float_in(0.0, open_lo=True), required=True, help="epsilon (> 0)")
    p.add_argument("--function", choices=sorted(BUILTIN_FUNCTIONS), default="triangle")
    p.add_argument("--truncation", type=_int_at_least(0), default=16)
    _out_flag(p)
    return parser


def parse_params(args) -> tuple[ModelParams, SolverConfig]:
    params = ModelParams(args.n, args.eps)
    cfg = SolverConfig(
        step=getattr(args, "step", SolverConfig.step),
        x_max=getattr(args, "x_max", SolverConfig.x_max),
        conservation_tol=getattr(args, "tol", SolverConfig.conservation_tol),
    )
    floor = -params.v_center
    p_value = getattr(args, "p", None)
    if p_value is not None and p_value < floor:
        raise UsageError(
            f"--p {p_value:g} is below the reachable range: launches from phi=pi need "
            f"P >= -V(pi) = {floor!r} (periodic band {floor!r} < P < 0, step-like P > 0)"
        )
    if getattr(args, "slope0", None) is None and p_value is not None and hasattr(args, "slope0"):
        args.slope0 = launch_slope(params, p_value)
    return params, cfg


def _fmt(value) -> str:
    if isinstance(value, (bool, np.bool_)):
        return "true" if value else "false"
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    if value is None:
        return ""
    if isinstance(value, str):
        return value
    text = repr(float(value))
    return text[:-2] if text.endswith(".0") else text


def _command_line(argv_ns, parser_dest_order):
    parts = ["msgkit", argv_ns.command]
    for dest in parser_dest_order:
        if dest in _NOT_REPRODUCED:
            continue
        value = getattr(argv_ns, dest, None)
        if value is None:
            continue
        flag = "--" + dest.replace("_", "-")
        if isinstance(value, list):
            parts.append(flag + " " + " ".join(_fmt(v) for v in value))
        else:
            text = _fmt(value)
            # "--flag=-1e-06" keeps negative exponents from parsing as flags
            parts.append(f"{flag}={text}" if text.startswith("-") else f"{flag} {text}")
    return " ".join(parts)


class _Table:
    def __init__(self, header):
        self.meta = []
        self.header = header
        self.rows = []

    def add(self, *values):
        self.rows.append(",".join(_fmt(v) for v in values))

    def render(self, wall_time):
        buf = io.StringIO()
        for line in self.meta:
            buf.write(f"# {line}\n")
        buf.write(f"# wall_time: {wall_time:.6f}\n")
        buf.write(",".join(self.header) + "\n")
        for row in self.rows:
            buf.write(row + "\n")
        return buf.getvalue()


def _default_grid(params, args, allow_steplike=True):
    lo = args.p_min if args.p_min is not None else None
    hi = args.p_max if args.p_max is not None else None
    floor = -params.v_center
    if lo is not None and lo < floor:
        raise UsageError(f"--p-min {lo:g} below -V(pi) = {floor!r}")
    if lo is None and hi is None:
        return np.linspace(floor, 0.0, args.points + 2)[1:-1]
    lo = floor if lo is None else lo
    hi = 0.0 if hi is None else hi
    if hi <= lo:
        raise UsageError("--p-max must exceed --p-min")
    grid = np.linspace(lo, hi, args.points)
    return grid[(grid != floor)]


def _cmd_potential(args, meta):
    params = ModelParams(args.n, args.eps)
    t = _Table(["phi", "V", "dV", "d2V"])
    for phi in np.linspace(args.phi_min, args.phi_max, args.samples):
        t.add(phi, potential(params, phi), potential_derivative(params, phi), potential_second_derivative(params, phi))
    return t, None


def _trajectory_rows(t, params, x, phi, slope, stride):
    half = 0.5 * slope**2
    v = potential(params, phi)
    for i in range(0, x.size, stride):
        t.add(x[i], phi[i], slope[i], half[i] + v[i], half[i] - v[i])


def _cmd_kink(args, meta):
    params, cfg = parse_params(args)
    prof = kink_profile(params, cfg)
    meta.append(f"kink: step_used={_fmt(prof.config.step)} delta=1e-06 method=rk4-shooting")
    t = _Table(["x", "phi", "slope", "rho", "pressure"])
    _trajectory_rows(t, params, prof.x, prof.phi, prof.slope, args.stride)
    return t, f"energy={_fmt(prof.energy)} charge={prof.charge} subkinks={prof.subkinks}"


def _cmd_static(args, meta):
    params, cfg = parse_params(args)
    traj = integrate(params, args.slope0, cfg)
    cls = traj.classification
    meta.append(
        f"result: pressure={_fmt(traj.pressure)} kind={cls.kind} "
        f"subkinks={'undetermined' if cls.subkinks is None else cls.subkinks} "
        f"drift={_fmt(traj.drift)} mirrored={_fmt(traj.mirrored)}"
    )
    t = _Table(["x", "phi", "slope", "rho", "pressure"])
    _trajectory_rows(t, params, traj.x, traj.phi, traj.slope, args.stride)
    summary = f"kind={cls.kind} subkinks={'undetermined' if cls.subkinks is None else cls.subkinks} pressure={_fmt(traj.pressure)}"
    return t, summary


def _cmd_scan_eos(args, meta):
    params = ModelParams(args.n, args.eps)
    scan = scan_equation_of_state(params, _default_grid(params, args), jobs=args.jobs)
    for p, why in scan.failures:
        meta.append(f"skipped: P={_fmt(p)} ({why})")
    t = _Table(["P", "rho_bar", "subkinks", "chi"])
    for pt, chi in zip(scan.points, scan.compressibility()):
        t.add(pt.pressure, pt.mean_density, pt.subkinks, chi)
    return t, None


def _cmd_scan_energy(args, meta):
    params = ModelParams(args.n, args.eps)
    scan = scan_energy(params, _default_grid(params, args), jobs=args.jobs)
    for p, why in scan.failures:
        meta.append(f"skipped: P={_fmt(p)} ({why})")
    t = _Table(["P", "E", "L", "subkinks"])
    for pt in scan.points:
        t.add(pt.pressure, pt.energy_per_soliton, pt.spacing, pt.subkinks)
    return t, None


def _cmd_phase(args, meta):
    params, _ = parse_params(args)
    loop = phase_portrait(params, args.p, args.samples)
    meta.append(f"result: subkinks={count_subkinks(params, args.p)}")
    t = _Table(["phi", "slope"])
    for phi, s in loop:
        t.add(phi, s)
    return t, None


def _cmd_fixed_points(args, meta):
    if args.eps_max < args.eps_min:
        raise UsageError("--eps-max must be >= --eps-min")
    grid = np.linspace(args.eps_min, args.eps_max, args.eps_points)
    t = _Table(["epsilon", "phi", "curvature", "kind"])
    for eps, points in bifurcation_scan(args.n, grid):
        for fp in points:
            t.add(eps, fp.phi, fp.curvature, fp.kind)
    return t, None


def _cmd_dispersion(args, meta):
    params = ModelParams(args.n, args.eps)
    t = _Table(["k", "omega_sq", "stable"])
    for k in args.k:
        d = dispersion(params, args.phi_n, k)
        t.add(d.k, d.omega_sq, d.stable)
    return t, None


def _cmd_evolve(args, meta):
    params = ModelParams(args.n, args.eps)
    ks = list(args.k)
    length = args.wavelengths * 2.0 * math.pi / min(ks)
    spec = PerturbationSpec(
        phi_n=args.phi_n, amplitude=args.amplitude, k=ks[0], domain_length=length,
        dx=args.dx, dt=args.dt, steps=args.steps, snapshot_every=args.snapshot_every,
        extra_k=tuple(ks[1:]),
    )
    rec = evolve(params, spec)
    meta.append(
        f"grid: domain_length={_fmt(length)} n_points={spec.n_points} dx_used={_fmt(spec.grid_spacing)} "
        f"energy_drift={_fmt(rec.energy_drift)}"
    )
    t = _Table(["t", "x", "phi"])
    for time_value, snap in zip(rec.times, rec.snapshots):
        for xv, pv in zip(rec.x, snap):
            t.add(time_value, xv, pv)
    spectrum = _Table(["t", "k", "amplitude"])
    spectrum.meta = list(meta)
    for time_value, amps in zip(rec.times, rec.mode_amplitudes):
        for kv, av in zip(rec.wavenumbers, amps):
            spectrum.add(time_value, kv, av)
    summary = " ".join(
        f"k={_fmt(k)}:max/initial={_fmt(float(np.max(rec.mode(k)) / rec.mode(k)[0]) if rec.mode(k)[0] else 0.0)}"
        for k in ks
    )
    return (t, spectrum), summary


def _cmd_expand(args, meta):
    f = builtin_function(args.function)
    import warnings
    with warnings.catch_warnings(record=True) as caught:
        warnings.simplefilter("always")
        res = expand_in_msg_basis(f, args.eps, args.truncation)
    for w in caught:
        meta.append(f"warning: {w.message}")
    meta.append(f"result: coeff_sum={_fmt(res.coeff_sum)}")
    t = _Table(["index", "b", "a"])
    for i, (b, a) in enumerate(zip(res.fourier_coeffs, res.msg_coeffs)):
        t.add(i, b, a)
    return t, f"coeff_sum={_fmt(res.coeff_sum)}"


_HANDLERS = {
    "potential": _cmd_potential,
    "kink": _cmd_kink,
    "static": _cmd_static,
    "scan-eos": _cmd_scan_eos,
    "scan-energy": _cmd_scan_energy,
    "phase": _cmd_phase,
    "fixed-points": _cmd_fixed_points,
    "dispersion": _cmd_dispersion,
    "evolve": _cmd_evolve,
    "expand": _cmd_expand,
}


def _write(text, path, stdout):
    if path is None:
        stdout.write(text)
    else:
        Path(path).write_text(text)


def run(argv=None, stdout=None, stderr=None) -> int:
    stdout = stdout or sys.stdout
    stderr = stderr or sys.stderr
    argv = list(sys.argv[1:] if argv is None else argv)
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
        if args.command is None:
            raise UsageError("msgkit: a subcommand is required: " + ", ".join(SUBCOMMANDS))
        sub = parser._subparsers._group_actions[0].choices[args.command]
        dests = [a.dest for a in sub._actions if a.dest != "help"]
        if args.command == "static" and args.p is not None:
            dests = [d for d in dests if d != "slope0"]
        elif args.command == "static":
            dests = [d for d in dests if d != "p"]
        start = time.perf_counter()
        meta = []
        result, summary = _HANDLERS[args.command](args, meta)
        wall = time.perf_counter() - start
    except UsageError as exc:
        parser_usage = parser.format_usage()
        stderr.write(parser_usage)
        stderr.write(f"error: {exc}\n")
        return 1
    except NumericalFailure as exc:
        stderr.write(f"msgkit: numerical failure ({type(exc).__name__}): {exc}\n")
        return 2
    except (MsgkitError, ValueError) as exc:
        stderr.write(f"msgkit: invalid input ({type(exc).__name__}): {exc}\n")
        return 1

    header = [
        f"msgkit {__version__}",
        f"subcommand: {args.command}",
        f"command: {_command_line(args, dests)}",
    ]
    if hasattr(args, "eps") and hasattr(args, "n"):
        header.append(f"params: n_harmonic={args.n} epsilon={_fmt(args.eps)}")
    if hasattr(args, "step"):
        header.append(f"solver: step={_fmt(args.step)} x_max={_fmt(args.x_max)} conservation_tol={_fmt(args.tol)}")
    tables = result if isinstance(result, tuple) else (result,)
    for table in tables:
        table.meta = header + meta
    _write(tables[0].render(wall), args.out, stdout)
    if len(tables) > 1:
        spectrum_path = args.spectrum_out
        if spectrum_path is None and args.out is not None:
            spectrum_path = args.out.with_name(args.out.stem + "_spectrum.csv")
        if spectrum_path is not None:
            _write(tables[1].render(wall), spectrum_path, stdout)
    if summary:
        (stdout if args.out is not None else stderr).write(summary + "\n")
    return 0


def main():
    sys.exit(run())
