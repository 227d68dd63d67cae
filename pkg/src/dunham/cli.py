"""Command-line surface: series terms, odd-order certification, spectra,
oracle runs, and comparison tables.

Subcommands:
    terms       print T_0..T_n in plain, LaTeX, or JSON form
    verify-odd  certify that each odd term is an exact derivative
    spectrum    eigenvalues from the quantization condition
    oracle      brute-force reference eigenvalues
    compare     join spectrum and oracle per level and order

Exit codes: 0 success, 2 usage or parse error, 3 numeric failure,
4 verification failure.

Every JSON/CSV payload written to a file gets a run manifest next to it
(<output>.manifest.json, or the --manifest-out path): command line, full
configuration, tool version, and a timestamp.  Payload bytes contain no
timestamps, so reruns with equal manifests (minus the timestamp) produce
byte-identical data files.
"""

from __future__ import annotations

import argparse
import dataclasses
import json
import sys
import time
from datetime import datetime, timezone

from . import __version__
from . import diffpoly as dp
from . import oracle as orc
from . import solver as sv
from . import wkb_series as ws
from .config import DEFAULT_CONFIG
from .errors import DunhamError, PotentialParseError
from .potential import parse_potential

EXIT_OK = 0
EXIT_USAGE = 2
EXIT_NUMERIC = 3
EXIT_VERIFICATION = 4


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="dunham",
        description="All-order WKB quantization toolkit for 1-D polynomial potentials",
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    def add_output_flags(p):
        p.add_argument("--output", help="write the payload to this file instead of stdout")
        p.add_argument(
            "--manifest-out",
            help="run manifest path (default: <output>.manifest.json when --output is set)",
        )

    def add_numeric_flags(p):
        p.add_argument("--margin", type=float, default=DEFAULT_CONFIG.margin,
                       help="contour margin (default %(default)s)")
        p.add_argument("--tol", type=float, default=DEFAULT_CONFIG.quad_rel_tol,
                       help="quadrature doubling tolerance (default %(default)s)")
        p.add_argument("--seed-bracket", type=float, default=None,
                       help="override the bracketing seed energy")
        p.add_argument("--include-odd-numeric", action="store_true",
                       help="numerically include odd orders >= 3 (demonstration)")

    p = sub.add_parser("terms", help="print the series terms T_0..T_n")
    p.add_argument("--n-max", type=int, default=3)
    p.add_argument("--format", choices=["plain", "latex", "json"], default="plain")
    add_output_flags(p)

    p = sub.add_parser("verify-odd", help="certify odd terms as exact derivatives")
    p.add_argument("--n-max", type=int, required=True,
                   help="verify antiderivatives for n = 1..n_max")
    add_output_flags(p)

    p = sub.add_parser("spectrum", help="eigenvalues from the quantization condition")
    p.add_argument("potential", help='e.g. "x^2" or "0.5*x^2 + 0.1*x^4"')
    p.add_argument("--levels", type=int, default=1)
    p.add_argument("--order", type=int, default=2,
                   help="include terms up to T_{2*order} (default %(default)s)")
    p.add_argument("--format", choices=["plain", "json", "csv"], default="plain")
    add_numeric_flags(p)
    add_output_flags(p)

    p = sub.add_parser("oracle", help="diagonalization reference eigenvalues")
    p.add_argument("potential")
    p.add_argument("--levels", type=int, default=1, help="number of levels")
    p.add_argument("--format", choices=["plain", "json", "csv"], default="plain")
    p.add_argument("--mode", choices=[m.value for m in orc.OracleMode],
                   default=orc.OracleMode.OSCILLATOR_BASIS.value)
    add_output_flags(p)

    p = sub.add_parser("compare", help="spectrum vs oracle error table")
    p.add_argument("potential")
    p.add_argument("--levels", type=int, default=4)
    p.add_argument("--order", default="0,2",
                   help="comma-separated list of orders (default %(default)s)")
    p.add_argument("--format", choices=["plain", "json", "csv"], default="plain")
    add_numeric_flags(p)
    add_output_flags(p)
    return parser


def _config_from_args(args):
    cfg = DEFAULT_CONFIG
    updates = {}
    if getattr(args, "margin", None) is not None:
        updates["margin"] = args.margin
    if getattr(args, "tol", None) is not None:
        updates["quad_rel_tol"] = args.tol
    if getattr(args, "seed_bracket", None) is not None:
        updates["bracket_seed"] = args.seed_bracket
    if getattr(args, "include_odd_numeric", False):
        updates["include_odd_numeric"] = True
    return dataclasses.replace(cfg, **updates) if updates else cfg


def _emit(args, payload: str, manifest_config: dict) -> None:
    """Write the payload, and a manifest alongside any file output."""
    if args.output:
        with open(args.output, "w") as fh:
            fh.write(payload)
    else:
        sys.stdout.write(payload)
        if payload and not payload.endswith("\n"):
            sys.stdout.write("\n")
    manifest_path = args.manifest_out or (args.output + ".manifest.json" if args.output else None)
    if manifest_path:
        manifest = {
            "command": ["dunham"] + list(getattr(args, "argv", [])),
            "arguments": {
                k: v for k, v in vars(args).items() if k != "argv" and v is not None
            },
            "config": manifest_config,
            "tool_version": __version__,
            "timestamp": datetime.now(timezone.utc).isoformat(),
        }
        with open(manifest_path, "w") as fh:
            json.dump(manifest, fh, indent=2, default=str)
            fh.write("\n")


def _cfg_dict(cfg) -> dict:
    return dataclasses.asdict(cfg)


def cmd_terms(args) -> int:
    if args.n_max < 0:
        print("error: --n-max must be >= 0", file=sys.stderr)
        return EXIT_USAGE
    series = ws.gen_terms(args.n_max)
    if args.format == "json":
        payload = json.dumps(ws.series_to_json(series), indent=2) + "\n"
    else:
        render = dp.to_latex if args.format == "latex" else dp.to_plain
        payload = "".join(
            f"T_{n} = {render(t)}\n" for n, t in enumerate(series.terms)
        )
    _emit(args, payload, {"n_max": args.n_max, "format": args.format})
    return EXIT_OK


def cmd_verify_odd(args) -> int:
    if args.n_max < 1:
        print("error: --n-max must be >= 1", file=sys.stderr)
        return EXIT_USAGE
    series = ws.gen_terms(2 * args.n_max + 1)
    lines = []
    all_ok = True
    for n in range(1, args.n_max + 1):
        t0 = time.perf_counter()
        cert = ws.certify_total_derivative(series, n)
        dt = time.perf_counter() - t0
        all_ok &= cert.verified
        lines.append(
            f"n={n} verified={cert.verified} "
            f"F_monomials={len(cert.f_n.monomials)} "
            f"Phi_monomials={len(cert.phi_n.monomials)} "
            f"elapsed={dt:.3f}s"
        )
    lines.append("all verified" if all_ok else "VERIFICATION FAILED")
    _emit(args, "\n".join(lines) + "\n", {"n_max": args.n_max})
    return EXIT_OK if all_ok else EXIT_VERIFICATION


def cmd_spectrum(args) -> int:
    if args.levels < 1:
        print("error: --levels must be >= 1", file=sys.stderr)
        return EXIT_USAGE
    if args.order < 0:
        print("error: --order must be >= 0", file=sys.stderr)
        return EXIT_USAGE
    V = parse_potential(args.potential)
    cfg = _config_from_args(args)
    results = sv.spectrum(V, args.levels, args.order, cfg)
    if args.format == "json":
        doc = {
            "potential": str(V),
            "order": args.order,
            "convention": "total phase matched to K*pi with the -pi/2 Maslov "
            "term on the left; equivalently B_0 + corrections = (K + 1/2)*pi",
            "results": [sv.result_to_json(r) for r in results],
        }
        payload = json.dumps(doc, indent=2) + "\n"
    elif args.format == "csv":
        payload = sv.results_to_csv(results)
    else:
        hdr = ["K", "E", "residual", "trunc"]
        rows = [
            f"{r.K:>3} {r.E:>20.12f} {r.residual:>10.2e} {r.optimal_truncation_index:>5}"
            + ("  " + "; ".join(r.warnings) if r.warnings else "")
            for r in results
        ]
        payload = f"{hdr[0]:>3} {hdr[1]:>20} {hdr[2]:>10} {hdr[3]:>5}\n" + "\n".join(rows) + "\n"
    _emit(args, payload, {**_cfg_dict(cfg), "levels": args.levels, "order": args.order})
    return EXIT_OK


def cmd_oracle(args) -> int:
    if args.levels < 1:
        print("error: --levels must be >= 1", file=sys.stderr)
        return EXIT_USAGE
    V = parse_potential(args.potential)
    cfg = orc.OracleConfig(mode=orc.OracleMode(args.mode))
    spec = orc.eigensolve(V, args.levels, cfg)
    if args.format == "json":
        payload = json.dumps(orc.oracle_to_json(spec), indent=2) + "\n"
    elif args.format == "csv":
        payload = orc.oracle_to_csv(spec)
    else:
        rows = [
            f"{k:>3} {e:>20.12f} {c:>10.2e}"
            for k, (e, c) in enumerate(zip(spec.eigenvalues, spec.convergence_estimate))
        ]
        payload = f"{'K':>3} {'E':>20} {'conv':>10}\n" + "\n".join(rows) + "\n"
    _emit(args, payload, {**dataclasses.asdict(cfg), "mode": cfg.mode.value,
                          "levels": args.levels})
    return EXIT_OK


def _parse_orders(text: str) -> list[int]:
    entries = [e.strip() for e in str(text).split(",") if e.strip()]
    if not entries:
        raise ValueError("at least one order is required")
    orders = [int(e) for e in entries]
    if any(o < 0 for o in orders):
        raise ValueError("orders must be >= 0")
    return orders


def cmd_compare(args) -> int:
    try:
        orders = _parse_orders(args.order)
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    V = parse_potential(args.potential)
    cfg = _config_from_args(args)
    reference = orc.eigensolve(V, args.levels)
    rows = []
    for order in orders:
        for r in sv.spectrum(V, args.levels, order, cfg):
            e_ref = reference.eigenvalues[r.K]
            abs_err = abs(r.E - e_ref)
            rows.append(
                {
                    "K": r.K,
                    "order": order,
                    "E_dunham": r.E,
                    "E_oracle": e_ref,
                    "abs_error": abs_err,
                    "rel_error": abs_err / abs(e_ref),
                }
            )
    if args.format == "json":
        payload = json.dumps({"potential": str(V), "rows": rows}, indent=2) + "\n"
    elif args.format == "csv":
        lines = ["K,order,E_dunham,E_oracle,abs_error,rel_error"]
        for r in rows:
            lines.append(
                f"{r['K']},{r['order']},{r['E_dunham']!r},{r['E_oracle']!r},"
                f"{r['abs_error']!r},{r['rel_error']!r}"
            )
        payload = "\n".join(lines) + "\n"
    else:
        lines = [f"{'K':>3} {'order':>5} {'E_dunham':>20} {'E_oracle':>20} {'rel_error':>12}"]
        for r in rows:
            lines.append(
                f"{r['K']:>3} {r['order']:>5} {r['E_dunham']:>20.12f} "
                f"{r['E_oracle']:>20.12f} {r['rel_error']:>12.3e}"
            )
        payload = "\n".join(lines) + "\n"
    _emit(args, payload, {**_cfg_dict(cfg), "levels": args.levels, "orders": orders})
    return EXIT_OK


_COMMANDS = {
    "terms": cmd_terms,
    "verify-odd": cmd_verify_odd,
    "spectrum": cmd_spectrum,
    "oracle": cmd_oracle,
    "compare": cmd_compare,
}


def main(argv=None) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return exc.code if exc.code is not None else EXIT_USAGE
    args.argv = list(argv) if argv is not None else sys.argv[1:]
    try:
        return _COMMANDS[args.command](args)
    except PotentialParseError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (DunhamError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_NUMERIC


if __name__ == "__main__":
    sys.exit(main())
