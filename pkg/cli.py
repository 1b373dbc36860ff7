"""
Command Line Interface
Subcommands for enumeration, cell censuses, the mass formula, theta and
conorm vectors, and the tropical verifications.

Exit codes: 0 pass, 1 violation found, 2 usage or input error.
"""

import argparse
import logging
import sys
from fractions import Fraction
from pathlib import Path
from typing import List, Optional

import numpy as np

from census_store import CensusStore, write_json_atomic
from enumeration import EnumerationResult, IsoEdgeEnumerator, mass_sum
from errors import CensusError, InputFormatError, IsoEdgeError
from exact_arith import exact_matrix, format_rational, is_symmetric, parse_rational, sym_dim
from logging_config import configure_logging
from manifest import RunManifest, __version__
from lattice_cvp import parity_vectors, theta_values
from reports import census_table, export_report, missing_dimensions
from tropical import check_matroidal_theorem, conorm_values, conway_sloane_check

logger = logging.getLogger(__name__)

EXIT_PASS = 0
EXIT_VIOLATION = 1
EXIT_USAGE = 2


def print_section(title):
    """Print a formatted section header."""
    print("\n" + "=" * 60)
    print(f"  {title}")
    print("=" * 60)


def verdict_line(ok: bool, text: str) -> str:
    return f"{'✓' if ok else '✗'} {text}"


def parse_form_text(text: str) -> np.ndarray:
    """
    Parse a form: first line n, then n rows of n rationals.

    Raises:
        InputFormatError: wrong shape, bad rational, or non-symmetric matrix
    """
    lines = [line.split("#")[0].strip() for line in text.splitlines()]
    lines = [line for line in lines if line]
    if not lines:
        raise InputFormatError("empty form file")
    try:
        n = int(lines[0])
    except ValueError as exc:
        raise InputFormatError(f"first line must be the dimension, got {lines[0]!r}") from exc
    if n < 1:
        raise InputFormatError("dimension must be positive")
    rows = [line.replace(",", " ").split() for line in lines[1:]]
    if len(rows) != n or any(len(row) != n for row in rows):
        raise InputFormatError(f"expected {n} rows of {n} entries")
    A = exact_matrix([[parse_rational(x) for x in row] for row in rows])
    if not is_symmetric(A):
        raise InputFormatError("form is not symmetric")
    return A


def read_form_file(path: str) -> np.ndarray:
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise InputFormatError(f"cannot read {path}: {exc}") from exc
    return parse_form_text(text)


def _manifest(args, command: str) -> RunManifest:
    manifest = RunManifest(command)
    settings = {
        "dimension": getattr(args, "dim", None),
        "seed_perturbation": getattr(args, "seed_perturbation", None),
        "checkpoint": getattr(args, "checkpoint", None),
        "checkpoint_every": getattr(args, "checkpoint_every", None),
        "output": getattr(args, "out", None),
        "workers": getattr(args, "workers", None),
        "min_dim": getattr(args, "min_dim", None),
        "permutation_aware": getattr(args, "permutation_aware", None),
    }
    if settings["dimension"] is None:
        settings.pop("dimension")
    manifest.set_config(settings)
    logger.info("run manifest: %s", manifest.comparable_dict())
    return manifest


def _enumerator(manifest: RunManifest) -> IsoEdgeEnumerator:
    return IsoEdgeEnumerator(manifest["dimension"], workers=manifest["workers"],
                             checkpoint_path=manifest["checkpoint"],
                             checkpoint_every=manifest["checkpoint_every"],
                             perturbation=manifest["seed_perturbation"])


def _write_census(result: EnumerationResult, manifest: RunManifest, out: Optional[str]) -> dict:
    """Save the finished census; the checkpoint is dropped once the census is on disk."""
    payload = result.to_payload()
    payload["manifest"] = manifest.to_dict()
    if out:
        CensusStore.save_census(out, payload)
        print(f"  Census written to {out}")
        CensusStore(manifest["checkpoint"]).clear_checkpoint()
    return payload


def _load_records(args, manifest: RunManifest, need_cells: bool) -> EnumerationResult:
    """Records from --census, or a fresh run for --dim."""
    if args.census:
        payload = CensusStore.load_census(args.census)
        result = EnumerationResult.from_payload(payload)
        if args.dim is not None and args.dim != result.n:
            raise InputFormatError(f"census is for n={result.n}, not n={args.dim}")
        if need_cells:
            missing = missing_dimensions(result.n, payload.get("complete_dims", []))
            if missing:
                raise CensusError(f"census is incomplete, missing dimensions {missing}", missing)
        return result
    if args.dim is None:
        raise InputFormatError("either --census or --dim is required")
    enumerator = _enumerator(manifest)
    return enumerator.run_cells(1) if need_cells else enumerator.run_primitive()


# ---------------------------------------------------------------------------
# Subcommands
# ---------------------------------------------------------------------------

def cmd_enumerate(args) -> int:
    manifest = _manifest(args, "enumerate")
    print_section(f"ENUMERATE PRIMITIVE ISO-EDGE DOMAINS (n={manifest['dimension']})")
    enumerator = _enumerator(manifest)
    result = enumerator.run_primitive()
    count = len(result.top)
    print(f"  {count} domain{'s' if count != 1 else ''}")
    for record in result.top:
        print(f"  {record.key[:16]}  |Stab| = {record.stabilizer}  rays = {len(record.cone.rays)}")
    _write_census(result, manifest, args.out)
    return EXIT_PASS


def cmd_cells(args) -> int:
    manifest = _manifest(args, "cells")
    n = manifest["dimension"]
    min_dim = manifest["min_dim"] or 1
    print_section(f"ISO-EDGE CELL CENSUS (n={n}, dimensions {sym_dim(n)}..{min_dim})")
    result = _enumerator(manifest).run_cells(min_dim)
    table = census_table(result.records)
    for dim, row in table.iterrows():
        print(f"  dim {dim:2d}: {int(row['orbits']):6d} orbits, {int(row['pd_orbits']):6d} with PD interior")
    payload = _write_census(result, manifest, args.out)
    store = CensusStore()
    summary = store.get_statistics_summary(payload)
    if "mass_total" in summary:
        print(f"  partial mass sum: {summary['mass_total']}")
    if args.csv:
        if not store.export_to_csv(payload, args.csv):
            raise InputFormatError(f"cannot export cells to {args.csv}")
        print(f"  Cells exported to {args.csv}")
    return EXIT_PASS


def cmd_mass_check(args) -> int:
    manifest = _manifest(args, "mass-check")
    result = _load_records(args, manifest, need_cells=True)
    print_section(f"MASS FORMULA (n={result.n})")
    if result.n < 3:
        print("  note: the identity is stated for n >= 3")
    total = mass_sum(result.records)
    print(f"  sum over PD orbits of (-1)^dim / |Stab| = {format_rational(total)}")
    ok = total == 0
    print(verdict_line(ok, "PASS" if ok else "FAIL"))
    return EXIT_PASS if ok else EXIT_VIOLATION


def _vector_command(args, kind: str) -> int:
    A = read_form_file(args.form)
    values = theta_values(A) if kind == "theta" else conorm_values(A)
    n = A.shape[0]
    print_section(f"{kind.upper()} VECTOR (n={n})")
    for pv, value in zip(parity_vectors(n), values):
        print(f"  {pv.bits}  {format_rational(value)}")
    if args.out:
        body = {
            "format": "isoedge-vector",
            "kind": kind,
            "n": n,
            "version": __version__,
            "values": [[pv.bits, format_rational(v)] for pv, v in zip(parity_vectors(n), values)],
        }
        write_json_atomic(args.out, body)
    return EXIT_PASS


def cmd_theta(args) -> int:
    return _vector_command(args, "theta")


def cmd_conorm(args) -> int:
    return _vector_command(args, "conorm")


def _report_command(args, kind: str) -> int:
    manifest = _manifest(args, kind)
    result = _load_records(args, manifest, need_cells=False)
    n = result.n
    if kind == "cs-check":
        print_section(f"CONWAY-SLOANE VERIFICATION (n={n})")
        report = conway_sloane_check(n, result.records, permutation_aware=args.permutation_aware,
                                     workers=manifest["workers"])
        for pair in report["pairs"]:
            label = f"{pair['pair'][0][:12]} / {pair['pair'][1][:12]}"
            print("  " + verdict_line(pair["passed"], label))
        print(f"  {report['passed']}/{report['total']} pairs pass")
    else:
        print_section(f"MATROIDAL LOCUS CHECK (n={n})")
        report = check_matroidal_theorem(n, result.records)
        for cell in report["cells"]:
            print("  " + verdict_line(cell["passed"], f"{cell['key'][:12]}  {len(cell['vectors'])} vectors"))
        print(f"  {report['passed']}/{report['total']} cells pass")
        print(f"  {len(report['maximal_systems'])} maximal unimodular systems")
        for system in report["maximal_systems"]:
            print(f"    {len(system)} vectors: {system}")
    if args.out:
        text = export_report(kind, manifest.to_dict(), report)
        try:
            Path(args.out).write_text(text, encoding="utf-8")
        except OSError as exc:
            raise InputFormatError(f"cannot write {args.out}: {exc}") from exc
    ok = report["passed"] == report["total"]
    print(verdict_line(ok, "PASS" if ok else "FAIL"))
    return EXIT_PASS if ok else EXIT_VIOLATION


def cmd_cs_check(args) -> int:
    return _report_command(args, "cs-check")


def cmd_matroidal_check(args) -> int:
    return _report_command(args, "matroidal-check")


def cmd_validate(args) -> int:
    from demo import run_all_demos
    return EXIT_PASS if run_all_demos() else EXIT_VIOLATION


# ---------------------------------------------------------------------------
# Parser
# ---------------------------------------------------------------------------

def _rational(text: str) -> Fraction:
    try:
        return parse_rational(text)
    except InputFormatError as exc:
        raise argparse.ArgumentTypeError(str(exc)) from exc


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="isoedge", description="Iso-edge domains of positive definite forms")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    parser.add_argument("-v", "--verbose", action="count", default=0, help="-v info, -vv debug")
    sub = parser.add_subparsers(dest="command", required=True)

    def run_options(p, dim_required=True):
        p.add_argument("--dim", type=int, required=dim_required, help="dimension n")
        p.add_argument("--out", help="output file")
        p.add_argument("--checkpoint", help="checkpoint file (resumes when present)")
        p.add_argument("--checkpoint-every", type=int, default=50, help="orbits per checkpoint")
        p.add_argument("--workers", type=int, default=1, help="worker processes")
        p.add_argument("--seed-perturbation", type=_rational, default=Fraction(1, 100),
                       help="perturbation of the principal seed form, e.g. 1/100")

    p = sub.add_parser("enumerate", help="primitive iso-edge domains")
    run_options(p)
    p.set_defaults(func=cmd_enumerate)

    p = sub.add_parser("cells", help="cell census down to --min-dim")
    run_options(p)
    p.add_argument("--min-dim", type=int, default=1, help="lowest cell dimension")
    p.add_argument("--csv", help="also export one row per cell orbit to this CSV file")
    p.set_defaults(func=cmd_cells)

    p = sub.add_parser("mass-check", help="evaluate the mass formula")
    run_options(p, dim_required=False)
    p.add_argument("--census", help="complete cell census file")
    p.set_defaults(func=cmd_mass_check)

    for name, func in (("theta", cmd_theta), ("conorm", cmd_conorm)):
        p = sub.add_parser(name, help=f"{name} vector of a form file")
        p.add_argument("form", help="file: n, then n rows of n rationals")
        p.add_argument("--out", help="output file")
        p.set_defaults(func=func)

    for name, func in (("cs-check", cmd_cs_check), ("matroidal-check", cmd_matroidal_check)):
        p = sub.add_parser(name, help=f"{name} report")
        run_options(p, dim_required=False)
        p.add_argument("--census", help="domain or cell census file")
        if name == "cs-check":
            p.add_argument("--permutation-aware", action="store_true",
                           help="also compare GL_n(F_2) permutations of theta images (n <= 4)")
        p.set_defaults(func=func)

    p = sub.add_parser("validate", help="run the built-in self checks")
    p.set_defaults(func=cmd_validate)
    return parser


def main(argv: Optional[List[str]] = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return exc.code if isinstance(exc.code, int) else EXIT_USAGE
    configure_logging(args.verbose)
    try:
        return args.func(args)
    except CensusError as exc:
        print(verdict_line(False, f"census error: {exc}"), file=sys.stderr)
        if exc.missing_dims:
            print(f"  missing dimensions: {list(exc.missing_dims)}", file=sys.stderr)
        return EXIT_USAGE
    except (IsoEdgeError, ValueError) as exc:
        print(verdict_line(False, f"error: {exc}"), file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
