"""Command-line interface.

Exit codes: 0 success, 2 unreadable input, 3 invalid TPM, 4 atom space
too large, 5 verification failure.
"""

from __future__ import annotations

import argparse
import json
import sys

from . import io
from .bench import ALGORITHMS, EXACT_ALGORITHMS, format_table, run_bench
from .bounds import CERTIFIED, lower_bound
from .core import verify_decomposition
from .corpus import corpus, corpus_names
from .errors import ParseError, SparsePbnError, VerificationError
from .greedy import ger_decompose, ser1_decompose, ser2_decompose
from .momp import DEFAULT_GUARD, momp_decompose
from .pbn import assemble_pbn


def _add_source(parser, required=True):
    group = parser.add_mutually_exclusive_group(required=required)
    group.add_argument("--input", "-i", metavar="FILE", help="TPM text file")
    group.add_argument("--corpus", "-c", metavar="NAME[:d]", help="reference TPM, e.g. P1 or PB4:0.02")
    parser.add_argument("--r0", help="rescale the input so its columns sum to this value")


def _load(args):
    if args.input:
        return io.read_tpm(args.input, args.r0)
    try:
        tpm = corpus(args.corpus).tpm
    except KeyError as err:
        raise ParseError(str(err.args[0])) from None
    return tpm if args.r0 is None else tpm.with_scale(args.r0)


def _decompose(tpm, args):
    """Returns ``(decomposition, trace or None)``."""
    if args.algo == "ger":
        return ger_decompose(tpm, args.z)
    if args.algo == "ser1":
        return ser1_decompose(tpm, return_trace=True)
    if args.algo == "ser2":
        return ser2_decompose(tpm, return_trace=True)
    return momp_decompose(tpm, args.tolerance, args.guard), None


def _cmd_decompose(args, out):
    tpm = _load(args)
    result, trace = _decompose(tpm, args)
    if args.algo != "momp" and not verify_decomposition(result, tpm):
        raise VerificationError("output failed verification")
    if args.format == "json":
        if args.algo == "momp":
            data = {
                "side": tpm.side,
                "r0": float(result.scale),
                "approximate": True,
                "error": result.error,
                "terms": [
                    {"weight": w, "targets": list(m.targets)}
                    for w, m in zip(result.weights, result.matrices)
                ],
            }
        else:
            data = io.decomposition_to_dict(result)
        print(json.dumps(data, indent=2), file=out)
    else:
        print(f"K = {result.length}", file=out)
        print(result, file=out)
    if args.trace and trace is not None:
        print(trace, file=sys.stderr)
    return 0


def _cmd_bounds(args, out):
    tpm = _load(args)
    report = lower_bound(tpm, None if args.no_registry else CERTIFIED)
    upper = report.upper
    if args.format == "json":
        data = {
            "lower": report.value,
            "witness": {
                "kind": report.witness.kind,
                "columns": list(report.witness.columns),
                "citation": report.witness.citation,
            },
            "upper": {
                "entry_removal": upper.entry_removal,
                "ser1_ger": upper.ser1_ger,
                "ser2": upper.ser2,
            },
        }
        print(json.dumps(data, indent=2), file=out)
    else:
        print(f"lower bound: {report.witness}", file=out)
        for w in report.considered:
            print(f"  considered: {w}", file=out)
        print(f"upper bound (all entry-removal): {upper.entry_removal}", file=out)
        print(f"upper bound (SER1, GER): {upper.ser1_ger}", file=out)
        print(f"upper bound (SER2): {upper.ser2}", file=out)
    return 0


def _cmd_verify(args, out):
    tpm = _load(args)
    with open(args.decomposition, encoding="utf-8") as handle:
        decomposition = io.loads_decomposition(handle.read())
    report = verify_decomposition(decomposition, tpm)
    print(report, file=out)
    print("PASS" if report.passed else "FAIL", file=out)
    return 0 if report.passed else VerificationError.exit_code


def _cmd_bench(args, out):
    names = corpus_names() if args.all else args.names
    algorithms = args.algo or list(EXACT_ALGORITHMS)
    results = run_bench(names, algorithms, args.z, args.tolerance, args.guard)
    table = format_table(results)
    print(table, file=out)
    if args.out:
        with open(args.out, "w", encoding="utf-8") as handle:
            json.dump([r.to_dict() for r in results], handle, indent=2)
    failed = [r for r in results if r.verified is False]
    return VerificationError.exit_code if failed else 0


def _cmd_export_pbn(args, out):
    tpm = None
    if args.decomposition:
        with open(args.decomposition, encoding="utf-8") as handle:
            decomposition = io.loads_decomposition(handle.read())
        if args.input or args.corpus:
            tpm = _load(args)
    else:
        if not (args.input or args.corpus):
            raise ParseError("give --input, --corpus or --decomposition")
        tpm = _load(args)
        if args.algo == "momp":
            raise ParseError("export-pbn needs an exact algorithm")
        decomposition, _ = _decompose(tpm, args)
    if tpm is not None and not verify_decomposition(decomposition, tpm):
        raise VerificationError("decomposition does not reproduce the TPM")
    network = assemble_pbn(decomposition)
    if args.format == "json":
        print(json.dumps(network.to_dict(), indent=2), file=out)
    else:
        print(network, file=out)
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="sparsepbn",
        description="Decompose transition probability matrices into sparse "
        "convex combinations of Boolean-network matrices.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("decompose", help="decompose one TPM")
    _add_source(p)
    p.add_argument("--algo", choices=ALGORITHMS, default="ger")
    p.add_argument("--z", type=int, default=10, help="GER score base (integer >= 2)")
    p.add_argument("--tolerance", type=float, default=1e-7, help="MOMP stopping tolerance")
    p.add_argument("--guard", type=int, default=DEFAULT_GUARD, help="MOMP atom-count limit")
    p.add_argument("--format", choices=("json", "text"), default="text")
    p.add_argument("--trace", action="store_true", help="print per-iteration choices to stderr")
    p.set_defaults(func=_cmd_decompose)

    p = sub.add_parser("bounds", help="lower and upper bounds on the length")
    _add_source(p)
    p.add_argument("--no-registry", action="store_true", help="generic rules only")
    p.add_argument("--format", choices=("json", "text"), default="text")
    p.set_defaults(func=_cmd_bounds)

    p = sub.add_parser("verify", help="check a decomposition file against a TPM")
    _add_source(p)
    p.add_argument("--decomposition", "-d", required=True, metavar="FILE")
    p.set_defaults(func=_cmd_verify)

    p = sub.add_parser("bench", help="run algorithms over the reference corpus")
    p.add_argument("names", nargs="*", help="corpus entries, e.g. P1 PB4:0.01")
    p.add_argument("--all", action="store_true", help="all 18 entries")
    p.add_argument("--algo", action="append", choices=ALGORITHMS,
                   help="repeat to select several (default: ger, ser1, ser2)")
    p.add_argument("--z", type=int, default=None, help="override the GER score base")
    p.add_argument("--tolerance", type=float, default=None, help="override the MOMP tolerance")
    p.add_argument("--guard", type=int, default=DEFAULT_GUARD)
    p.add_argument("--out", metavar="FILE", help="also write results as JSON")
    p.set_defaults(func=_cmd_bench)

    p = sub.add_parser("export-pbn", help="build a PBN from a decomposition")
    _add_source(p, required=False)
    p.add_argument("--decomposition", "-d", metavar="FILE")
    p.add_argument("--algo", choices=EXACT_ALGORITHMS, default="ger")
    p.add_argument("--z", type=int, default=10)
    p.add_argument("--format", choices=("json", "text"), default="text")
    p.set_defaults(func=_cmd_export_pbn)
    return parser


def main(argv=None, out=None) -> int:
    out = out or sys.stdout
    args = build_parser().parse_args(argv)
    try:
        return args.func(args, out)
    except SparsePbnError as err:
        print(f"error: {err}", file=sys.stderr)
        return err.exit_code
    except OSError as err:
        print(f"error: {err}", file=sys.stderr)
        return ParseError.exit_code


if __name__ == "__main__":
    sys.exit(main())
