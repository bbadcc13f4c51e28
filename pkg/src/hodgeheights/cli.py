"""Command line interface.

    mhs validate <file>
    mhs splitting <file> [--out out.json]
    mhs height <file> [--which 1|2|both]
    mhs polylog [--z RE+IMi --N n [--a i --b j] | --sweep spec.json]
                [--csv out.csv] [--emit-json]

Exit codes: 0 ok, 2 validation failure, 3 numerical degeneracy, 4 usage,
5 I/O.  The environment variable MHS_TOLERANCE overrides the default
rank/splitting tolerances.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import os
import sys

import numpy as np

from . import deligne, framed as framed_mod, jsonio, polylog as pl
from .deligne import NumericalDegeneracy, ResidualTooLarge
from .framed import FramingTypeError, RealityViolation
from .jsonio import DocumentValidationError, ParseError
from .mhs import InvalidMHS, validate
from .polylog import NonConvergent, PathThroughSingularity, PolylogContext

EXIT_OK = 0
EXIT_VALIDATION = 2
EXIT_NUMERICAL = 3
EXIT_USAGE = 4
EXIT_IO = 5


class CliError(Exception):
    def __init__(self, code: int, message: str):
        super().__init__(message)
        self.code = code


def _tolerance() -> float | None:
    raw = os.environ.get("MHS_TOLERANCE")
    if raw is None:
        return None
    try:
        return float(raw)
    except ValueError:
        raise CliError(EXIT_USAGE, f"MHS_TOLERANCE={raw!r} is not a number")


def _read_document(path: str):
    try:
        with open(path, "r", encoding="utf-8") as fh:
            text = fh.read()
    except OSError as exc:
        raise CliError(EXIT_IO, f"cannot read {path}: {exc}")
    try:
        return jsonio.parse_mhs_document(text, rank_tolerance=_tolerance())
    except ParseError as exc:
        raise CliError(EXIT_VALIDATION, f"parse error: {exc}")
    except DocumentValidationError as exc:
        raise CliError(EXIT_VALIDATION, f"invalid mixed Hodge structure:\n{exc}")


def _write_output(text: str, out: str | None) -> None:
    if out is None:
        sys.stdout.write(text if text.endswith("\n") else text + "\n")
        return
    try:
        with open(out, "w", encoding="utf-8") as fh:
            fh.write(text)
    except OSError as exc:
        raise CliError(EXIT_IO, f"cannot write {out}: {exc}")


def _matrix_json(mat: np.ndarray) -> list:
    return [[jsonio.format_complex(x) for x in row] for row in np.atleast_2d(mat)]


def cmd_validate(args) -> int:
    h, _ = _read_document_loose(args.file)
    report = validate(h)
    if report.ok:
        print("valid")
        return EXIT_OK
    print(report.describe())
    return EXIT_VALIDATION


def _read_document_loose(path: str):
    """Like _read_document but tolerates invalid structures (validate reports them)."""
    try:
        with open(path, "r", encoding="utf-8") as fh:
            text = fh.read()
    except OSError as exc:
        raise CliError(EXIT_IO, f"cannot read {path}: {exc}")
    try:
        return jsonio.parse_mhs_document(text, require_valid=False,
                                         rank_tolerance=_tolerance())
    except ParseError as exc:
        raise CliError(EXIT_VALIDATION, f"parse error: {exc}")


def cmd_splitting(args) -> int:
    h, _ = _read_document(args.file)
    try:
        data = deligne.delta_splitting(h)
    except (NumericalDegeneracy, ResidualTooLarge) as exc:
        raise CliError(EXIT_NUMERICAL, str(exc))
    doc = {
        "dimension": h.dimension,
        "pieces": [
            {"p": p, "q": q, "dimension": sub.dim,
             "basis": [[jsonio.format_complex(x) for x in col] for col in sub.basis.T]}
            for (p, q), sub in sorted(data.bigrading.pieces.items())
        ],
        "Y": _matrix_json(data.Y),
        "delta": _matrix_json(data.delta),
        "delta_components": [
            {"a": a, "b": b, "matrix": _matrix_json(mat)}
            for (a, b), mat in sorted(data.delta_components.items())
        ],
        "diagnostics": {
            "defining_residual": data.defining_residual,
            "reality_residual": data.reality_residual,
            "lambda_residual": data.lambda_residual,
        },
    }
    _write_output(json.dumps(doc, indent=2), args.out)
    return EXIT_OK


def cmd_height(args) -> int:
    h, fh = _read_document(args.file)
    if fh is None:
        raise CliError(EXIT_USAGE, "document has no framing block")
    out: dict = {"a": fh.a, "b": fh.b, "diagnostics": {}}
    try:
        if args.which in ("1", "both"):
            out["ht1"] = framed_mod.height1(fh)
            out["diagnostics"]["ht1_via_delta"] = framed_mod.height1_via_delta(fh)
        if args.which in ("2", "both"):
            out["ht2"] = framed_mod.height2(fh)
        if args.which == "both":
            out["diagnostics"]["biextension_defect"] = (
                out["ht2"] + 0.5 * out["ht1"])
    except FramingTypeError as exc:
        raise CliError(EXIT_VALIDATION, f"framing error: {exc}")
    except (RealityViolation, NumericalDegeneracy, ResidualTooLarge) as exc:
        raise CliError(EXIT_NUMERICAL, str(exc))
    _write_output(json.dumps(out, indent=2), None)
    return EXIT_OK


def _sweep_grid(spec: dict) -> list[complex]:
    grid = spec.get("grid")
    if isinstance(grid, list):
        points = [jsonio.parse_complex(g, f"$.grid[{i}]") for i, g in enumerate(grid)]
    elif isinstance(grid, dict):
        try:
            re_lo, re_hi = grid["re"]
            im_lo, im_hi = grid["im"]
            n_re, n_im = grid["resolution"]
        except (KeyError, TypeError, ValueError):
            raise CliError(EXIT_VALIDATION,
                           "grid rectangle needs re, im, resolution")
        points = [complex(x, y)
                  for y in np.linspace(im_lo, im_hi, int(n_im))
                  for x in np.linspace(re_lo, re_hi, int(n_re))]
    else:
        raise CliError(EXIT_VALIDATION, "sweep spec has no grid")
    for z in points:
        if abs(z) < 1e-12 or abs(z - 1) < 1e-12:
            raise CliError(EXIT_VALIDATION, f"grid point {z} is singular")
        if spec.get("path_policy", "principal") == "principal" and pl._on_cut(z):
            raise CliError(EXIT_VALIDATION,
                           f"grid point {z} lies on a cut under principal policy")
    return points


def _sweep_rows(spec: dict):
    points = _sweep_grid(spec)
    n_trunc = int(spec.get("N", 6))
    framings = spec.get("framings", [])
    if not framings:
        raise CliError(EXIT_VALIDATION, "sweep spec has no framings")
    for z in points:
        ctx = PolylogContext(z, N=n_trunc)
        h = pl.polylog_mhs(ctx)
        delta = deligne.delta_splitting(h).delta
        resid = float(np.linalg.norm(delta - pl.delta_closed_form(ctx)))
        for a, b in framings:
            fh = pl.polylog_framed(ctx, int(a), int(b))
            ht1, ht2 = framed_mod.height1(fh), framed_mod.height2(fh)
            c1, c2 = pl.heights_closed_form(ctx, int(a), int(b))
            yield [z.real, z.imag, n_trunc, int(a), int(b),
                   repr(ht1), repr(c1), repr(ht2), repr(c2), repr(resid)]


CSV_COLUMNS = ["re_z", "im_z", "N", "a", "b", "ht1_pipeline", "ht1_closed",
               "ht2_pipeline", "ht2_closed", "delta_residual"]


def cmd_polylog(args) -> int:
    if args.sweep:
        if args.z is not None or args.a is not None or args.b is not None:
            raise CliError(EXIT_USAGE, "--sweep excludes --z/--a/--b")
        try:
            with open(args.sweep, "r", encoding="utf-8") as fh:
                spec = json.load(fh)
        except OSError as exc:
            raise CliError(EXIT_IO, f"cannot read {args.sweep}: {exc}")
        except json.JSONDecodeError as exc:
            raise CliError(EXIT_VALIDATION, f"sweep spec is not JSON: {exc}")
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(CSV_COLUMNS)
        try:
            for row in _sweep_rows(spec):
                writer.writerow(row)
        except (PathThroughSingularity, NonConvergent,
                NumericalDegeneracy, ResidualTooLarge) as exc:
            raise CliError(EXIT_NUMERICAL, str(exc))
        _write_output(buf.getvalue(), args.csv)
        return EXIT_OK

    if args.z is None:
        raise CliError(EXIT_USAGE, "need --z or --sweep")
    try:
        z = jsonio.parse_complex(args.z, "--z")
    except ParseError as exc:
        raise CliError(EXIT_USAGE, str(exc))
    if (args.a is None) != (args.b is None):
        raise CliError(EXIT_USAGE, "--a and --b go together")
    try:
        ctx = PolylogContext(z, N=args.N)
        h = pl.polylog_mhs(ctx)
        fh = None
        out: dict = {"z": jsonio.format_complex(z), "N": args.N}
        if args.a is not None:
            fh = pl.polylog_framed(ctx, args.a, args.b)
            out["a"], out["b"] = args.a, args.b
            out["ht1"] = framed_mod.height1(fh)
            out["ht2"] = framed_mod.height2(fh)
            c1, c2 = pl.heights_closed_form(ctx, args.a, args.b)
            out["ht1_closed"], out["ht2_closed"] = c1, c2
        delta = deligne.delta_splitting(h).delta
        out["delta_residual"] = float(
            np.linalg.norm(delta - pl.delta_closed_form(ctx)))
    except (PathThroughSingularity, InvalidMHS, NumericalDegeneracy,
            ResidualTooLarge, NonConvergent, RealityViolation) as exc:
        raise CliError(EXIT_NUMERICAL, str(exc))
    except ValueError as exc:
        raise CliError(EXIT_USAGE, str(exc))
    if args.emit_json:
        _write_output(json.dumps(jsonio.mhs_to_document(h, fh), indent=2), None)
        return EXIT_OK
    if args.csv:
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(CSV_COLUMNS)
        if fh is not None:
            writer.writerow([z.real, z.imag, args.N, args.a, args.b,
                             repr(out["ht1"]), repr(out["ht1_closed"]),
                             repr(out["ht2"]), repr(out["ht2_closed"]),
                             repr(out["delta_residual"])])
        _write_output(buf.getvalue(), args.csv)
        return EXIT_OK
    _write_output(json.dumps(out, indent=2), None)
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="mhs",
        description="Deligne splittings and heights of framed mixed Hodge structures")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("validate", help="validate an MHS document")
    p.add_argument("file")
    p.set_defaults(func=cmd_validate)

    p = sub.add_parser("splitting", help="emit bigrading, Y and delta as JSON")
    p.add_argument("file")
    p.add_argument("--out", default=None)
    p.set_defaults(func=cmd_splitting)

    p = sub.add_parser("height", help="heights of a framed MHS document")
    p.add_argument("file")
    p.add_argument("--which", choices=["1", "2", "both"], default="both")
    p.set_defaults(func=cmd_height)

    p = sub.add_parser("polylog", help="polylog structures, heights and sweeps")
    p.add_argument("--z", default=None, help="evaluation point, e.g. 0.3+0.2i")
    p.add_argument("--N", type=int, default=6)
    p.add_argument("--a", type=int, default=None)
    p.add_argument("--b", type=int, default=None)
    p.add_argument("--sweep", default=None, help="sweep spec JSON file")
    p.add_argument("--csv", default=None, help="write CSV here")
    p.add_argument("--emit-json", action="store_true")
    p.set_defaults(func=cmd_polylog)
    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_USAGE if exc.code not in (0, None) else 0
    try:
        return args.func(args)
    except CliError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return exc.code
    except InvalidMHS as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_VALIDATION


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
