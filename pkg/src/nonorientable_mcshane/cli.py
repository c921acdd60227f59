"""Command-line front end.

Exit codes: 0 success, 1 invalid input, 2 no convergence (or a statistical
check that failed).
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import re
import sys
from dataclasses import dataclass, fields, replace
from typing import Any, Optional, Sequence

from . import moduli, series, spectra
from .errors import DomainError, NumericalDegeneracy, ToleranceNotMet
from .shooting import (
    build_moebius,
    build_pants,
    closed_form_targets,
    run_shots,
    summarize,
    write_shots_csv,
    z_scores,
)

EXIT_OK, EXIT_INPUT, EXIT_CONVERGENCE = 0, 1, 2
UNRESOLVED_LIMIT = 0.01
# series are summed until the certified tail is this far below the residual gate
TAIL_MARGIN = 100.0
Z_LIMIT = 3.0


class UsageError(Exception):
    pass


@dataclass(frozen=True)
class RunConfig:
    tolerance: float = 1e-9
    max_terms: int = 10000
    seed: int = 0
    output: Optional[str] = None
    format: str = "json"

    def __post_init__(self) -> None:
        if not self.tolerance > 0:
            raise DomainError("tolerance must be > 0")
        if not (isinstance(self.max_terms, int) and self.max_terms >= 1):
            raise DomainError("max_terms must be an integer >= 1")
        if self.format not in ("json", "csv"):
            raise DomainError("format must be json or csv")


_COMPLEX_RE = re.compile(r"^[+-]?[0-9.eE+-]*[ij]?$")


def parse_complex(text: str) -> complex:
    """Parse ``a+bi`` (``j`` also accepted), ``bi`` or a plain real."""
    s = text.strip().replace(" ", "")
    if not s or not _COMPLEX_RE.match(s):
        raise DomainError(f"not a complex literal: {text!r}")
    if s[-1] in "ij":
        s = s[:-1] + "j"
        if s in ("j", "+j", "-j") or s[-2] in "+-":
            s = s[:-1] + "1j"
    try:
        return complex(s)
    except ValueError as exc:
        raise DomainError(f"not a complex literal: {text!r}") from exc


def format_complex(z: complex) -> str:
    sign = "+" if z.imag >= 0 or math.isnan(z.imag) else "-"
    return f"{z.real!r}{sign}{abs(z.imag)!r}i"


def parse_lengths(text: str, count: int) -> tuple[float, ...]:
    try:
        vals = tuple(float(v) for v in text.split(","))
    except ValueError as exc:
        raise DomainError(f"expected {count} comma-separated numbers, got {text!r}") from exc
    if len(vals) != count:
        raise DomainError(f"expected {count} comma-separated numbers, got {text!r}")
    return vals


def jsonable(v: Any) -> Any:
    """Complex numbers become ``{"re", "im"}``; non-finite floats become null."""
    if isinstance(v, bool) or v is None or isinstance(v, (int, str)):
        return v
    if isinstance(v, float):
        return v if math.isfinite(v) else None
    if isinstance(v, complex):
        return {"re": jsonable(v.real), "im": jsonable(v.imag)}
    if isinstance(v, dict):
        return {str(k): jsonable(x) for k, x in v.items()}
    if isinstance(v, (list, tuple, set, frozenset)):
        return [jsonable(x) for x in v]
    if hasattr(v, "item"):
        return jsonable(v.item())
    return str(v)


def _csv_cell(v: Any) -> str:
    if isinstance(v, complex):
        return format_complex(v)
    if isinstance(v, float):
        return repr(v)
    if isinstance(v, (list, tuple)):
        return ";".join(_csv_cell(x) for x in v)
    if isinstance(v, dict):
        return ";".join(f"{k}={_csv_cell(x)}" for k, x in v.items())
    return "" if v is None else str(v)


def csv_text(header: Sequence[str], rows: Sequence[Sequence[Any]]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for row in rows:
        w.writerow([_csv_cell(v) for v in row])
    return buf.getvalue()


def _record_csv(record: dict) -> str:
    return csv_text(list(record), [list(record.values())])


def _json_text(obj: Any) -> str:
    return json.dumps(jsonable(obj), indent=2, allow_nan=False) + "\n"


# -- subcommands -------------------------------------------------------------


def cmd_identity(args: argparse.Namespace, cfg: RunConfig) -> tuple[str, int]:
    target = args.target
    tol = cfg.tolerance / TAIL_MARGIN
    if target == "punctured-klein":
        rep = series.sum_punctured_klein(args.y0, args.y1, tol, cfg.max_terms)
    elif target == "bordered-klein":
        rep = series.sum_bordered_klein(args.L, args.y0, args.y1, tol, cfg.max_terms)
    elif target == "punctured-torus":
        root = parse_lengths(args.root, 3)
        rep = series.sum_punctured_torus(args.depth, tol, root)
    else:
        rep = series.sum_complex(
            parse_complex(args.y0), parse_complex(args.y1), tol, cfg.max_terms
        )
    record = rep.to_dict()
    if getattr(args, "z_check", False):
        y0, y1 = float(args.y0), float(args.y1)
        c = spectra.bordered_constant(args.L) if target == "bordered-klein" else 1.0
        record["z_check"] = {
            "Z": rep.Z,
            "lower_bound": 2.0 + c / (y0 * y1),
            "hyperbolic": rep.Z is not None and rep.Z > 2.0,
        }
    ok = rep.converged and rep.residual is not None and rep.residual < cfg.tolerance
    text = _json_text(record) if cfg.format == "json" else _record_csv(record)
    return text, EXIT_OK if ok else EXIT_CONVERGENCE


def cmd_spectrum(args: argparse.Namespace, cfg: RunConfig) -> tuple[str, int]:
    if args.count < 1:
        raise DomainError("count must be >= 1")
    c = spectra.bordered_constant(args.L)
    state = spectra.extend(spectra.spectrum_from_seed(args.y0, args.y1, c), args.count)
    rows = spectra.spectrum_rows(state)
    if cfg.format == "csv":
        return csv_text(["index", "y", "length"], rows), EXIT_OK
    record = {
        "seed": [args.y0, args.y1],
        "L": args.L,
        "c": state.c,
        "Z": state.Z,
        "l_gamma": state.l_gamma,
        "rows": [{"index": i, "y": y, "length": l} for i, y, l in rows],
    }
    return _json_text(record), EXIT_OK


def cmd_fibonacci(args: argparse.Namespace, cfg: RunConfig) -> tuple[str, int]:
    if args.count < 1:
        raise DomainError("count must be >= 1")
    state = spectra.extend_forward(spectra.spectrum_from_seed(1.0, 2.0, 1.0), args.count)
    rows = []
    for i in range(args.count):
        y = state.y(i)
        word = spectra.fibonacci_word(i)
        rows.append((i, int(round(y)), state.length(i), int(round(abs(word.trace)))))
    header = ["i", "F_2i", "length", "word_trace"]
    if cfg.format == "csv":
        return csv_text(header, rows), EXIT_OK
    record = {
        "Z": state.Z,
        "l_gamma": state.l_gamma,
        "rows": [dict(zip(header, r)) for r in rows],
    }
    return _json_text(record), EXIT_OK


def cmd_simulate(args: argparse.Namespace, cfg: RunConfig) -> tuple[str, int]:
    if args.samples < 1:
        raise DomainError("samples must be >= 1")
    if args.surface == "pants":
        geometry = build_pants(*parse_lengths(args.L, 3))
    else:
        x, y = parse_lengths(args.L, 2)
        geometry = build_moebius(x, y, args.z)
    shots = run_shots(geometry, args.samples, args.max_arcs, cfg.seed, args.workers)
    est = summarize(geometry, shots, args.max_arcs, cfg.seed)
    targets = closed_form_targets(geometry)
    zs = z_scores(est, targets)
    ok = all(abs(v) < Z_LIMIT for v in zs.values())
    ok = ok and est.fractions["U"] < UNRESOLVED_LIMIT
    if geometry.one_sided_lengths is not None:
        ok = ok and est.fact_i_violations == 0 and est.fact_ii_violations == 0
    if cfg.format == "csv":
        return write_shots_csv(shots), EXIT_OK if ok else EXIT_CONVERGENCE
    record = est.to_dict()
    if geometry.one_sided_lengths is not None:
        record["one_sided_lengths"] = list(geometry.one_sided_lengths)
    record["targets"] = targets
    record["z_scores"] = zs
    return _json_text(record), EXIT_OK if ok else EXIT_CONVERGENCE


def cmd_integrate(args: argparse.Namespace, cfg: RunConfig) -> tuple[str, int]:
    res = moduli.integrate_punctured_klein(
        args.n, args.method, tolerance=cfg.tolerance, samples=args.samples, seed=cfg.seed
    )
    record = res.to_dict()
    if res.target is None:
        ok = True
    elif res.method == "montecarlo":
        ok = abs(res.residual) < Z_LIMIT * res.error_estimate
    else:
        ok = abs(res.residual) < max(cfg.tolerance, res.error_estimate)
    text = _json_text(record) if cfg.format == "json" else _record_csv(record)
    return text, EXIT_OK if ok else EXIT_CONVERGENCE


# -- parser ------------------------------------------------------------------


class _Parser(argparse.ArgumentParser):
    def error(self, message: str) -> None:
        raise UsageError(message)


def _common() -> argparse.ArgumentParser:
    p = _Parser(add_help=False)
    g = p.add_argument_group("run options")
    g.add_argument("--format", choices=("json", "csv"), default=None)
    g.add_argument("--config", default=None, help="JSON file with RunConfig fields")
    g.add_argument("--seed", type=int, default=None)
    g.add_argument("--tolerance", type=float, default=None)
    g.add_argument("--max-terms", dest="max_terms", type=int, default=None)
    g.add_argument("--output", default=None, help="write here instead of stdout")
    return p


def build_parser() -> argparse.ArgumentParser:
    common = _common()
    parser = _Parser(prog="nomcs", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    ident = sub.add_parser("identity", help="sum an identity and compare with its target")
    isub = ident.add_subparsers(dest="target", required=True, parser_class=_Parser)
    p = isub.add_parser("punctured-klein", parents=[common])
    p.add_argument("--y0", type=float, required=True)
    p.add_argument("--y1", type=float, required=True)
    p.add_argument("--z-check", dest="z_check", action="store_true",
                   help="report Z and its lower bound 2 + c/(y0 y1)")
    p = isub.add_parser("bordered-klein", parents=[common])
    p.add_argument("--L", type=float, required=True)
    p.add_argument("--y0", type=float, required=True)
    p.add_argument("--y1", type=float, required=True)
    p.add_argument("--z-check", dest="z_check", action="store_true")
    p = isub.add_parser("punctured-torus", parents=[common])
    p.add_argument("--depth", type=int, default=25)
    p.add_argument("--root", default="3,3,3")
    p = isub.add_parser("complex", parents=[common])
    p.add_argument("--y0", required=True, help="a+bi")
    p.add_argument("--y1", required=True, help="a+bi")

    p = sub.add_parser("spectrum", parents=[common], help="one-sided trace sequence of a seed")
    p.add_argument("--y0", type=float, required=True)
    p.add_argument("--y1", type=float, required=True)
    p.add_argument("--L", type=float, default=0.0, help="boundary length (0 for a cusp)")
    p.add_argument("--count", type=int, default=10, help="terms added on each side")

    sim = sub.add_parser("simulate", help="shoot perpendicular geodesics from boundary 1")
    ssub = sim.add_subparsers(dest="surface", required=True, parser_class=_Parser)
    for name, help_L in (("pants", "x,y,z"), ("moebius", "x,y")):
        p = ssub.add_parser(name, parents=[common])
        p.add_argument("--L", required=True, help=f"boundary lengths {help_L}")
        if name == "moebius":
            p.add_argument("--z", type=float, required=True, help="one-sided geodesic length")
        p.add_argument("--samples", type=int, default=100_000)
        p.add_argument("--max-arcs", dest="max_arcs", type=int, default=200)
        p.add_argument("--workers", type=int, default=1)

    p = sub.add_parser("integrate", parents=[common], help="moduli-space integral")
    p.add_argument("--n", type=int, default=1)
    p.add_argument("--method", choices=("quad", "quadrature", "montecarlo", "mc"), default="quad")
    p.add_argument("--samples", type=int, default=10_000_000)

    p = sub.add_parser("fibonacci", parents=[common], help="integral surface with traces F_2i")
    p.add_argument("--count", type=int, default=10)
    return parser


def resolve_config(args: argparse.Namespace) -> RunConfig:
    base: dict[str, Any] = {}
    if args.config:
        try:
            with open(args.config, encoding="utf-8") as fh:
                base = json.load(fh)
        except (OSError, json.JSONDecodeError) as exc:
            raise DomainError(f"cannot read config {args.config!r}: {exc}") from exc
        names = {f.name for f in fields(RunConfig)}
        unknown = set(base) - names
        if unknown:
            raise DomainError(f"unknown config keys: {sorted(unknown)}")
    cfg = RunConfig(**base)
    overrides = {
        k: getattr(args, k)
        for k in ("tolerance", "max_terms", "seed", "output", "format")
        if getattr(args, k, None) is not None
    }
    return replace(cfg, **overrides)


HANDLERS = {
    "identity": cmd_identity,
    "spectrum": cmd_spectrum,
    "simulate": cmd_simulate,
    "integrate": cmd_integrate,
    "fibonacci": cmd_fibonacci,
}


def _emit(text: str, path: Optional[str]) -> None:
    if path:
        with open(path, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _error(kind: str, message: str, code: int) -> int:
    sys.stdout.write(_json_text({"error": kind, "message": message, "exit_code": code}))
    return code


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        cfg = resolve_config(args)
    except UsageError as exc:
        parser.print_usage(sys.stderr)
        return _error("UsageError", str(exc), EXIT_INPUT)
    except DomainError as exc:
        return _error(type(exc).__name__, str(exc), EXIT_INPUT)
    try:
        text, code = HANDLERS[args.command](args, cfg)
    except DomainError as exc:
        return _error(type(exc).__name__, str(exc), EXIT_INPUT)
    except (ToleranceNotMet, NumericalDegeneracy) as exc:
        return _error(type(exc).__name__, str(exc), EXIT_CONVERGENCE)
    _emit(text, cfg.output)
    return code


if __name__ == "__main__":
    sys.exit(main())
