"""ffkit command line: construct, analyze, mse, optimal-dim, simulate.

Exit codes: 0 success, 1 invalid input, 2 not a frame, 3 construction failed
certification, 4 model-contract violation (erasures off the tight/white model).
"""

from __future__ import annotations

import argparse
import dataclasses
import hashlib
import json
import sys
from fractions import Fraction
from pathlib import Path

import numpy as np

from . import __version__
from .constructions import (
    e8_frame,
    eisenstein_e6_frame,
    partition_frame,
    quadratic_residue_frame,
    random_frame,
    summary_line,
)
from .errors import (
    ConstructionFailed,
    FFKitError,
    FrameFormatError,
    NotEquiDimensional,
    NotTight,
    NotWhiteSignal,
)
from .estimation import (
    ErasurePattern,
    NoiseModel,
    SignalModel,
    erasure_report,
    optimal_dimension,
)
from .frameio import dumps, dumps_frame, format_float, load_frame
from .frames import (
    certify_equidistance_tight,
    distance_table,
    frame_bounds,
    proposition5_bound,
)
from .matcore import Tolerances
from .simulation import SimConfig, run_monte_carlo

EXIT_OK = 0
EXIT_INVALID = 1
EXIT_NOT_FRAME = 2
EXIT_CONSTRUCTION = 3
EXIT_MODEL = 4


class CliError(Exception):
    def __init__(self, message: str, code: int = EXIT_INVALID):
        super().__init__(message)
        self.code = code


def number(text: str) -> float:
    """Decimal or simple rational literal such as ``16/9``."""
    try:
        return float(Fraction(text.strip()))
    except (ValueError, ZeroDivisionError):
        raise argparse.ArgumentTypeError(f"not a decimal or rational number: {text!r}") from None


def index_list(text: str) -> tuple[int, ...]:
    if text.strip() == "":
        return ()
    try:
        return tuple(int(t) for t in text.split(","))
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated indices, got {text!r}") from None


def _digest(path: str) -> str:
    return hashlib.sha256(Path(path).read_bytes()).hexdigest()


def _report(command: str, payload: dict, inputs: dict[str, str] | None = None) -> dict:
    return {
        "command": command,
        "inputs": inputs or {},
        "payload": payload,
        "version": __version__,
    }


def _tolerances(args) -> Tolerances:
    try:
        tol = Tolerances.from_env()
    except ValueError as exc:
        raise CliError(str(exc)) from exc
    if args.tol_tight is not None:
        tol = dataclasses.replace(tol, tight=args.tol_tight)
    return tol


def _load(path: str, tol: Tolerances):
    try:
        return load_frame(path, tol)
    except FrameFormatError as exc:
        raise CliError(str(exc)) from exc


def _signal(args, M: int) -> SignalModel:
    if getattr(args, "rxx", None):
        try:
            doc = json.loads(Path(args.rxx).read_text(encoding="utf-8"))
            sig = SignalModel.general(np.array(doc["matrix"], dtype=float))
        except (OSError, ValueError, KeyError, TypeError) as exc:
            raise CliError(f"cannot load R_xx from {args.rxx}: {exc}") from exc
        if sig.rxx.shape != (M, M):
            raise CliError(f"R_xx is {sig.rxx.shape}, frame lives in R^{M}")
        return sig
    return SignalModel.white(args.sigma_x2)


def _emit(text: str, out: str | None) -> None:
    if out:
        Path(out).write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text)


# ---------------------------------------------------------------------------


def cmd_construct(args) -> int:
    tol = _tolerances(args)
    kind = args.type
    if kind == "qr":
        frame = quadratic_residue_frame(args.p, C=args.C, k=args.k, tol=tol)
    elif kind == "e6":
        frame = eisenstein_e6_frame(tol)
    elif kind == "e8":
        frame = e8_frame(tol)
    elif kind == "partition":
        if args.M is None or args.m is None:
            raise CliError("partition needs --M and --m")
        frame = partition_frame(args.M, args.m, args.copies, rotate=args.rotate, seed=args.seed)
    else:
        if args.M is None or args.dims is None:
            raise CliError("random needs --M and --dims")
        frame = random_frame(args.M, args.dims, args.seed if args.seed is not None else 0)
    text = dumps_frame(frame)
    summary = summary_line(frame, tol)
    if args.out:
        Path(args.out).write_text(text, encoding="utf-8")
        print(summary)
    else:
        sys.stdout.write(text)
        print(summary, file=sys.stderr)
    return EXIT_OK


def analysis_payload(frame, tol: Tolerances) -> dict:
    bounds = frame_bounds(frame, tol)
    table = distance_table(frame, tol=tol)
    cert = certify_equidistance_tight(frame, table, tol)
    payload = {
        "N": len(frame),
        "ambient_dim": frame.ambient_dim,
        "dims": frame.dims,
        "bounds": {"lower": bounds.lower, "upper": bounds.upper, "tight": bounds.tight,
                   "is_frame": bounds.is_frame},
        "spectrum": frame.spectrum.tolist(),
        "distances_sq": table.d2.tolist(),
        "distance_histogram": [[v, c] for v, c in table.histogram().items()],
        "simplex_bound": cert.simplex_bound,
        "gap": cert.gap,
        "certificate": {
            "verdict": cert.verdict,
            "equi_dimensional": cert.equi_dimensional,
            "equidistant": cert.equidistant,
            "tight": cert.tight,
            "spread": cert.spread,
            "tolerance": cert.tolerance,
        },
        "metadata": dict(frame.metadata),
    }
    try:
        ident = proposition5_bound(frame, table, tol)
        payload["bound_identity"] = {
            "spectral": ident.spectral,
            "from_dimensions": ident.from_dimensions,
            "from_distances": ident.from_distances.tolist(),
            "max_deviation": ident.max_deviation,
        }
    except (NotTight, NotEquiDimensional):
        payload["bound_identity"] = None
    return payload


def cmd_analyze(args) -> int:
    tol = _tolerances(args)
    frame = _load(args.frame, tol)
    if not frame_bounds(frame, tol).is_frame:
        raise CliError(
            f"not a frame: smallest frame-operator eigenvalue {frame.spectrum[0]!r}", EXIT_NOT_FRAME
        )
    if args.format == "csv":
        table = distance_table(frame, tol=tol)
        lines = ["i,j,d_c2"]
        N = len(frame)
        for i in range(N):
            for j in range(i + 1, N):
                lines.append(f"{i},{j},{format_float(float(table.d2[i, j]))}")
        _emit("\n".join(lines) + "\n", args.out)
        return EXIT_OK
    report = _report("analyze", analysis_payload(frame, tol), {args.frame: _digest(args.frame)})
    _emit(dumps(report), args.out)
    return EXIT_OK


def cmd_mse(args) -> int:
    tol = _tolerances(args)
    frame = _load(args.frame, tol)
    sig = _signal(args, frame.ambient_dim)
    noise = NoiseModel(args.sigma_n2)
    erasures = ErasurePattern.of(args.erase)
    erasures.validate(len(frame))
    try:
        rep = erasure_report(frame, sig, noise, erasures, tol)
    except (NotTight, NotWhiteSignal) as exc:
        raise CliError(str(exc), EXIT_MODEL) from exc
    inputs = {args.frame: _digest(args.frame)}
    if args.rxx:
        inputs[args.rxx] = _digest(args.rxx)
    payload = dataclasses.asdict(rep)
    payload["erased"] = list(rep.erased)
    payload["sigma_x2"] = sig.sigma_x2
    payload["sigma_n2"] = noise.sigma_n2
    _emit(dumps(_report("mse", payload, inputs)), args.out)
    return EXIT_OK


def cmd_optimal_dim(args) -> int:
    res = optimal_dimension(args.M, args.N, args.sigma_x2, args.sigma_n2, args.m_max)
    payload = {
        "M": args.M,
        "N": args.N,
        "sigma_x2": args.sigma_x2,
        "sigma_n2": args.sigma_n2,
        "m_min": res.m_min,
        "m_max": res.m_max,
        "m_star": res.m_star,
        "endpoint_choice": res.endpoint_choice,
        "endpoint_agrees": res.endpoint_agrees,
        "table": [{"m": m, "mse": v, "optimal": m == res.m_star} for m, v in res.table.items()],
    }
    _emit(dumps(_report("optimal-dim", payload)), args.out)
    return EXIT_OK


def cmd_simulate(args) -> int:
    tol = _tolerances(args)
    frame = _load(args.frame, tol)
    sig = _signal(args, frame.ambient_dim)
    erasures = ErasurePattern.of(args.erase)
    if erasures.erased and not sig.is_white:
        raise CliError("erasure analysis is limited to white signals", EXIT_MODEL)
    if erasures.erased and not frame_bounds(frame, tol).tight:
        raise CliError("erasure analysis needs a tight frame", EXIT_MODEL)
    cfg = SimConfig(frame, sig, NoiseModel(args.sigma_n2), args.trials, args.seed, erasures)
    res = run_monte_carlo(cfg, workers=args.threads, tol=tol)
    payload = {
        "empirical_mse": res.empirical_mse,
        "analytic_mse": res.analytic_mse,
        "stderr": res.stderr,
        "z_score": res.z_score,
        "trials": res.trials,
        "metadata": res.metadata,
    }
    inputs = {args.frame: _digest(args.frame)}
    _emit(dumps(_report("simulate", payload, inputs)), args.out)
    return EXIT_OK


# ---------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--tol-tight", type=number, default=None,
                        help="relative tightness tolerance (overrides FFKIT_TOLERANCE_TIGHT)")

    parser = argparse.ArgumentParser(prog="ffkit", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"ffkit {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("construct", parents=[common], help="build a frame and write it as JSON")
    p.add_argument("--type", required=True, choices=["qr", "e6", "e8", "partition", "random"])
    p.add_argument("--p", type=int, default=7, help="prime for --type qr")
    p.add_argument("--C", type=number, default=None, help="scaling constant for --type qr")
    p.add_argument("--k", type=int, default=None, help="residue multiplier for --type qr")
    p.add_argument("--M", type=int, default=None)
    p.add_argument("--m", type=int, default=None)
    p.add_argument("--copies", type=int, default=1)
    p.add_argument("--rotate", action="store_true")
    p.add_argument("--dims", type=index_list, default=None)
    p.add_argument("--seed", type=int, default=None)
    p.add_argument("--out", default=None)
    p.set_defaults(func=cmd_construct)

    p = sub.add_parser("analyze", parents=[common], help="bounds, distances and packing certificate")
    p.add_argument("frame")
    p.add_argument("--format", choices=["json", "csv"], default="json")
    p.add_argument("--out", default=None)
    p.set_defaults(func=cmd_analyze)

    p = sub.add_parser("mse", parents=[common], help="analytic MSE with optional erasures")
    p.add_argument("frame")
    p.add_argument("--sigma-x2", type=number, default=1.0)
    p.add_argument("--sigma-n2", type=number, default=1.0)
    p.add_argument("--rxx", default=None, help='JSON file {"matrix": [[...]]}')
    p.add_argument("--erase", type=index_list, default=())
    p.add_argument("--out", default=None)
    p.set_defaults(func=cmd_mse)

    p = sub.add_parser("optimal-dim", parents=[common], help="best subspace dimension for one erasure")
    p.add_argument("--M", type=int, required=True)
    p.add_argument("--N", type=int, required=True)
    p.add_argument("--sigma-x2", type=number, default=1.0)
    p.add_argument("--sigma-n2", type=number, default=1.0)
    p.add_argument("--m-max", type=int, required=True)
    p.add_argument("--out", default=None)
    p.set_defaults(func=cmd_optimal_dim)

    p = sub.add_parser("simulate", parents=[common], help="Monte Carlo check of the analytic MSE")
    p.add_argument("frame")
    p.add_argument("--trials", type=int, default=100_000)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--erase", type=index_list, default=())
    p.add_argument("--sigma-x2", type=number, default=1.0)
    p.add_argument("--sigma-n2", type=number, default=1.0)
    p.add_argument("--rxx", default=None)
    p.add_argument("--threads", type=int, default=1)
    p.add_argument("--out", default=None)
    p.set_defaults(func=cmd_simulate)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        # argparse uses 2 for usage errors; fold those into "invalid input"
        return EXIT_OK if exc.code == 0 else EXIT_INVALID
    try:
        return args.func(args)
    except CliError as exc:
        print(f"ffkit: {exc}", file=sys.stderr)
        return exc.code
    except ConstructionFailed as exc:
        print(f"ffkit: {exc} {exc.diagnostics}", file=sys.stderr)
        return EXIT_CONSTRUCTION
    except (NotTight, NotWhiteSignal) as exc:
        print(f"ffkit: {exc}", file=sys.stderr)
        return EXIT_MODEL
    except FFKitError as exc:
        print(f"ffkit: {exc}", file=sys.stderr)
        return EXIT_INVALID


if __name__ == "__main__":
    sys.exit(main())
