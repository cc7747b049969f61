"""Command-line interface.

Four subcommands cover the pipeline end to end:

* ``memlag parse NETLIST``     - echo the canonical netlist + diagnostics
* ``memlag check NETLIST``     - self-adjointness report (JSON)
* ``memlag simulate NETLIST``  - integrate and write waveform CSV
* ``memlag drive NETLIST``     - single-element hysteresis run

Exit codes: 0 success, 1 usage error, 2 parse/validate error, 3 numeric
failure.  Reports go to stdout (or ``--out``); diagnostics and progress to
stderr.  ``MEMLAG_SEED`` fixes the sample seed of ``check``.  Outputs are
byte-deterministic for identical inputs and flags.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from concurrent.futures import ProcessPoolExecutor
from pathlib import Path

import numpy as np

from .constitutive import ElementKind, Modulation, SourceWaveform
from .errors import MemlagError, NetlistError, NumericError
from .lagrangian import build_loop_system, build_node_system, to_first_order
from .netlist import parse, serialize, validate
from .selfadjoint import check_self_adjoint, default_region
from .sim import (
    branch_waveforms,
    drive_csv,
    drive_element,
    ikvl_residual,
    integrate,
    pinch_check,
    traversed_gain_bound,
    waveforms_csv,
)

__all__ = ["main", "run"]

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_PARSE = 2
EXIT_NUMERIC = 3


class _UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise _UsageError(message)


def _build_parser() -> _Parser:
    p = _Parser(prog="memlag", description=__doc__.splitlines()[0])
    sub = p.add_subparsers(dest="command", metavar="COMMAND")

    pp = sub.add_parser("parse", help="echo canonical netlist and diagnostics")
    pp.add_argument("netlist")
    pp.add_argument("--out", help="output path (default stdout)")

    pc = sub.add_parser("check", help="self-adjointness report (JSON)")
    pc.add_argument("netlist")
    pc.add_argument("--region", help="sampling box LO,HI (default: unit box "
                                     "intersected with curve domains)")
    pc.add_argument("--samples", type=int, default=512)
    pc.add_argument("--tol", type=float, default=1e-6)
    pc.add_argument("--out", help="output path (default stdout)")

    ps = sub.add_parser("simulate", help="integrate and write waveform CSV")
    ps.add_argument("netlists", nargs="+")
    ps.add_argument("--t0", type=float, default=0.0)
    ps.add_argument("--t1", type=float, required=True)
    ps.add_argument("--method", choices=("rk4", "rk45"), default="rk45")
    ps.add_argument("--h", type=float, help="fixed step for rk4")
    ps.add_argument("--rtol", type=float, default=1e-8)
    ps.add_argument("--atol", type=float, default=1e-10)
    ps.add_argument("--x0", help="comma-separated initial coordinates "
                                 "(default zeros)")
    ps.add_argument("--v0", help="comma-separated initial velocities "
                                 "(default zeros)")
    ps.add_argument("--out", help="CSV path; with several netlists, a "
                                  "directory (default stdout)")
    ps.add_argument("--jobs", type=int, default=1,
                    help="parallel workers for independent runs")

    pd = sub.add_parser("drive", help="single-element hysteresis run")
    pd.add_argument("netlist")
    pd.add_argument("--element", help="element name (default: the only one)")
    pd.add_argument("--shape", choices=("dc", "sin"), default="sin")
    pd.add_argument("--amp", type=float, default=1.0)
    pd.add_argument("--omega", type=float, default=1.0)
    pd.add_argument("--phase", type=float, default=0.0)
    pd.add_argument("--t0", type=float, default=0.0)
    pd.add_argument("--t1", type=float, required=True)
    pd.add_argument("--eps", type=float, default=1e-2,
                    help="pinch tolerance on the input variable")
    pd.add_argument("--points", type=int, default=2001,
                    help="output grid size")
    pd.add_argument("--method", choices=("rk4", "rk45"), default="rk45")
    pd.add_argument("--h", type=float)
    pd.add_argument("--rtol", type=float, default=1e-8)
    pd.add_argument("--atol", type=float, default=1e-10)
    pd.add_argument("--out", help="CSV path (default stdout)")
    return p


def run(argv) -> int:
    """Execute one CLI invocation; returns the exit code."""
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
        if args.command is None:
            raise _UsageError("a subcommand is required "
                              "(parse, check, simulate, drive)")
        if args.command == "parse":
            return _cmd_parse(args)
        if args.command == "check":
            return _cmd_check(args)
        if args.command == "simulate":
            return _cmd_simulate(args)
        return _cmd_drive(args)
    except _UsageError as exc:
        print(f"memlag: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except NetlistError as exc:
        print(f"memlag: {exc}", file=sys.stderr)
        return EXIT_PARSE
    except (NumericError, MemlagError) as exc:
        print(f"memlag: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    except SystemExit as exc:  # argparse --help
        return EXIT_OK if exc.code in (0, None) else EXIT_USAGE


def main() -> None:
    sys.exit(run(sys.argv[1:]))


# ---------------------------------------------------------------------
# Helpers
# ---------------------------------------------------------------------


def _read_netlist(path: str) -> str:
    p = Path(path)
    if not p.is_file():
        raise _UsageError(f"netlist file not found: {path}")
    return p.read_text()


def _write_or_stdout(text: str, out: str | None):
    if out is None:
        sys.stdout.write(text)
    else:
        Path(out).write_text(text)


def _seed() -> int:
    raw = os.environ.get("MEMLAG_SEED", "0")
    try:
        return int(raw)
    except ValueError:
        raise _UsageError(f"MEMLAG_SEED must be an integer, got {raw!r}") from None


def _parse_floats(text: str, what: str) -> list[float]:
    try:
        return [float(tok) for tok in text.split(",") if tok.strip()]
    except ValueError:
        raise _UsageError(f"bad {what}: {text!r}") from None


def _build_system(circuit):
    if circuit.formulation == "loop":
        return build_loop_system(circuit)
    return build_node_system(circuit)


def _validated(circuit) -> None:
    diags = validate(circuit)
    for d in diags:
        print(f"memlag: {d}", file=sys.stderr)
    if not diags.ok:
        raise NetlistError("validation failed: "
                           + "; ".join(d.message for d in diags.errors))


# ---------------------------------------------------------------------
# Subcommands
# ---------------------------------------------------------------------


def _cmd_parse(args) -> int:
    circuit = parse(_read_netlist(args.netlist))
    diags = validate(circuit)
    for d in diags:
        print(f"memlag: {d}", file=sys.stderr)
    _write_or_stdout(serialize(circuit), args.out)
    return EXIT_OK if diags.ok else EXIT_PARSE


def _cmd_check(args) -> int:
    if args.samples < 1:
        raise _UsageError("--samples must be at least 1")
    if args.tol <= 0:
        raise _UsageError("--tol must be positive")
    circuit = parse(_read_netlist(args.netlist))
    _validated(circuit)
    system = _build_system(circuit)
    if args.region is not None:
        bounds = _parse_floats(args.region, "--region")
        if len(bounds) != 2 or bounds[1] <= bounds[0]:
            raise _UsageError("--region needs LO,HI with LO < HI")
        region = (bounds[0], bounds[1])
    else:
        region = default_region(system)
    report = check_self_adjoint(system, region=region, samples=args.samples,
                                tol=args.tol, seed=_seed())
    _write_or_stdout(report.to_json() + "\n", args.out)
    return EXIT_OK


def _simulate_one(path: str, args) -> tuple[str, float]:
    circuit = parse(_read_netlist(path))
    _validated(circuit)
    system = _build_system(circuit)
    fo = to_first_order(system)
    x0 = np.zeros(system.n)
    v0 = np.zeros(system.n)
    if args.x0 is not None:
        vals = _parse_floats(args.x0, "--x0")
        if len(vals) != system.n:
            raise _UsageError(f"--x0 needs {system.n} values")
        x0 = np.array(vals)
    if args.v0 is not None:
        vals = _parse_floats(args.v0, "--v0")
        if len(vals) != system.n:
            raise _UsageError(f"--v0 needs {system.n} values")
        v0 = np.array(vals)
    traj = integrate(fo, x0, (args.t0, args.t1), method=args.method,
                     h=args.h, rtol=args.rtol, atol=args.atol, v0=v0)
    csv_text = waveforms_csv(circuit, traj)
    residual = ikvl_residual(system, traj)
    return csv_text, residual


def _simulate_worker(path: str, args_dict: dict) -> tuple[str, str, float]:
    args = argparse.Namespace(**args_dict)
    csv_text, residual = _simulate_one(path, args)
    return path, csv_text, residual


def _cmd_simulate(args) -> int:
    if args.t1 <= args.t0:
        raise _UsageError("--t1 must exceed --t0")
    if args.method == "rk4" and (args.h is None or args.h <= 0):
        raise _UsageError("rk4 needs --h > 0")
    if args.jobs < 1:
        raise _UsageError("--jobs must be at least 1")
    for path in args.netlists:
        if not Path(path).is_file():
            raise _UsageError(f"netlist file not found: {path}")

    if len(args.netlists) == 1:
        csv_text, residual = _simulate_one(args.netlists[0], args)
        _write_or_stdout(csv_text, args.out)
        stream = sys.stderr if args.out is None else sys.stdout
        print(f"ikvl_residual {residual:.17g}", file=stream)
        return EXIT_OK

    if args.out is None:
        raise _UsageError("several netlists need --out DIRECTORY")
    out_dir = Path(args.out)
    out_dir.mkdir(parents=True, exist_ok=True)
    jobs = min(args.jobs, len(args.netlists))
    results = []
    if jobs == 1:
        for path in args.netlists:
            csv_text, residual = _simulate_one(path, args)
            results.append((path, csv_text, residual))
    else:
        args_dict = vars(args).copy()
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            futures = [pool.submit(_simulate_worker, path, args_dict)
                       for path in args.netlists]
            results = [f.result() for f in futures]
    for path, csv_text, residual in results:
        target = out_dir / (Path(path).stem + ".csv")
        target.write_text(csv_text)
        print(f"{path} ikvl_residual {residual:.17g}")
    return EXIT_OK


# Hysteresis input/output pair per element kind: u is the through variable
# of the constitutive law (the one multiplied by the incremental slope), y
# is the law's output.  The conventional capacitor is deliberately checked
# in the I-q plane, where a true memory element would pinch and a constant
# capacitor does not.
def _pinch_pair(element, record) -> tuple[str, str]:
    kind = element.kind
    if kind in (ElementKind.RESISTOR,):
        return "I", "V"
    if kind is ElementKind.INDUCTOR:
        return "I", "phi"
    if kind is ElementKind.CAPACITOR:
        return "I", "q"
    mod = element.modulation
    if kind is ElementKind.MEMRISTOR:
        return ("I", "V") if mod is Modulation.CHARGE else ("V", "I")
    if kind is ElementKind.MEMINDUCTOR:
        return ("I", "phi") if mod is Modulation.CHARGE else ("phi", "I")
    return ("q", "V") if mod is Modulation.INTEGRATED_CHARGE else ("V", "q")


def _modulating_states(element, record):
    if element.kind.is_conventional:
        return np.zeros(1)
    return {
        Modulation.CHARGE: record.q,
        Modulation.FLUX: record.phi,
        Modulation.INTEGRATED_FLUX: record.rho,
        Modulation.INTEGRATED_CHARGE: record.sigma,
    }[element.modulation]


def _cmd_drive(args) -> int:
    if args.t1 <= args.t0:
        raise _UsageError("--t1 must exceed --t0")
    if args.points < 5:
        raise _UsageError("--points must be at least 5")
    if args.eps <= 0:
        raise _UsageError("--eps must be positive")
    circuit = parse(_read_netlist(args.netlist))
    if args.element is None:
        candidates = [el for el in circuit.elements
                      if el.kind is not ElementKind.SOURCE]
        if len(candidates) != 1:
            raise _UsageError(
                "--element is required when the netlist holds more than "
                "one element"
            )
        element = candidates[0]
    else:
        matches = [el for el in circuit.elements if el.name == args.element]
        if not matches:
            raise _UsageError(f"no element named {args.element!r}")
        element = matches[0]

    if args.shape == "dc":
        drive = SourceWaveform(shape="dc", amplitude=args.amp)
    else:
        drive = SourceWaveform(shape="sin", amplitude=args.amp,
                               omega=args.omega, phase=args.phase)
    t_eval = np.linspace(args.t0, args.t1, args.points)
    waves = drive_element(element, drive, (args.t0, args.t1),
                          method=args.method, h=args.h, rtol=args.rtol,
                          atol=args.atol, t_eval=t_eval)
    record = waves[element.name]
    u_name, y_name = _pinch_pair(element, record)
    u = getattr(record, u_name)
    y = getattr(record, y_name)
    gain = traversed_gain_bound(element, _modulating_states(element, record))
    report = pinch_check((u, y), args.eps, gain_bound=gain)
    payload = {
        "element": element.name,
        "pair": [u_name, y_name],
        "verdict": report.verdict,
        "pinched": report.pinched,
        "eps": report.eps,
        "gain_bound": report.gain_bound,
        "n_zero_points": report.n_zero_points,
        "max_output_at_zero": report.max_output_at_zero,
        "area_positive": report.area_positive,
        "area_negative": report.area_negative,
    }
    _write_or_stdout(drive_csv(waves), args.out)
    stream = sys.stderr if args.out is None else sys.stdout
    print(json.dumps(payload, indent=2), file=stream)
    return EXIT_OK


if __name__ == "__main__":
    main()
