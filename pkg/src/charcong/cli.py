"""Command-line surface.

Exit codes: 0 success/verified, 1 error (including malformed input),
2 verification failed, 3 enumeration budget refused.
"""

from __future__ import annotations

import argparse
import json
import re
import sys
from pathlib import Path
from typing import Any, Sequence

from .cyclo_ring import format_element
from .dirichlet import character_matrix, value_ring, verify_congruence
from .kernel_oracle import (
    BudgetExceededError,
    brute_force_kernel,
    scalar_lift_kernel,
    search_space_size,
)
from .sweep import histograms, run_sweep
from .triplet import Triplet, TripletError

_RANGE = re.compile(r"^(\d+)\.\.(\d+)$")

EXIT_OK = 0
EXIT_ERROR = 1
EXIT_FAILED = 2
EXIT_BUDGET = 3


def _parse_range(text: str) -> range:
    """Inclusive "lo..hi" range syntax, or a single integer."""
    m = _RANGE.match(text)
    if m:
        lo, hi = int(m.group(1)), int(m.group(2))
        if hi < lo:
            raise ValueError(f"range {text!r} is empty")
        return range(lo, hi + 1)
    if text.isdigit():
        value = int(text)
        return range(value, value + 1)
    raise ValueError(f"cannot parse range {text!r} (expected lo..hi)")


def _load_coeffs(spec: str) -> list[Any]:
    """Coefficient vector from inline JSON or from a file holding it.

    Entries may be integers, coefficient lists, element objects, or
    polynomial text such as "4*z - 4".
    """
    text = spec
    path = Path(spec)
    try:
        if path.is_file():
            text = path.read_text()
    except OSError:
        pass
    parsed = json.loads(text)
    if not isinstance(parsed, list):
        raise ValueError("coefficients must form a JSON list")
    return parsed


def _print_grid(rows: Sequence[Sequence], balanced: bool = False) -> None:
    cells = [[format_element(a, balanced=balanced) for a in row] for row in rows]
    widths = [max(len(r[j]) for r in cells) for j in range(len(cells[0]))]
    for row in cells:
        print("  ".join(cell.rjust(w) for cell, w in zip(row, widths)))


def _vector_text(vec: Sequence, balanced: bool = True) -> str:
    return "[" + ", ".join(format_element(a, balanced=balanced) for a in vec) + "]"


def cmd_matrix(args: argparse.Namespace) -> int:
    mat = character_matrix(args.N)
    if args.M:
        mat = mat.mod(args.M)
    if args.json:
        print(json.dumps(mat.to_json()))
        return EXIT_OK
    print(f"character matrix N={args.N}: {mat.m} x {mat.n} over Z[z_{mat.ring.e}]"
          + (f" mod {mat.ring.M}" if mat.ring.M else ""))
    _print_grid(mat.entries)
    return EXIT_OK


def cmd_normalize(args: argparse.Namespace) -> int:
    t = Triplet.from_character_matrix(args.N, args.M)
    report = t.normalize()
    if args.json:
        print(json.dumps({
            "N": args.N,
            "M": args.M,
            "report": report.to_json(),
            "E": [[a.to_json() for a in row] for row in t.E],
            "log_length": len(t.op_log),
        }))
        return EXIT_OK
    print(f"E after normalize (N={args.N}, M={args.M}):")
    _print_grid(t.E)
    print(
        f"pseudo-rank {report.pseudo_rank}, guaranteed kernel {report.guaranteed_kernel}, "
        f"leftover block {report.q_rows} x {report.q_cols}, "
        f"unit leftovers: {'yes' if report.q_has_unit else 'no'}"
    )
    return EXIT_OK


def cmd_kernel(args: argparse.Namespace) -> int:
    B = character_matrix(args.N).mod(args.M).entries
    generators = scalar_lift_kernel(B)
    checked = [
        verify_congruence(args.N, args.M, gen).full_period for gen in generators
    ]
    if args.json:
        print(json.dumps({
            "N": args.N,
            "M": args.M,
            "generators": [[a.to_json() for a in gen] for gen in generators],
            "checked_full_period": checked,
        }))
        return EXIT_OK
    print(f"{len(generators)} kernel generators (N={args.N}, M={args.M}):")
    for gen, full in zip(generators, checked):
        print(f"  {_vector_text(gen)}  full-period: {'yes' if full else 'no'}")
    return EXIT_OK


def cmd_brute(args: argparse.Namespace) -> int:
    B = character_matrix(args.N).mod(args.M).entries
    vectors = brute_force_kernel(B, args.budget)
    if args.json:
        print(json.dumps({
            "N": args.N,
            "M": args.M,
            "searched": search_space_size(B[0][0].ring.M, B[0][0].ring.d, len(B[0])),
            "kernel": [[a.to_json() for a in v] for v in vectors],
        }))
        return EXIT_OK
    print(f"{len(vectors)} kernel vectors (N={args.N}, M={args.M}):")
    for v in vectors:
        print(f"  {_vector_text(v)}")
    return EXIT_OK


def cmd_check(args: argparse.Namespace) -> int:
    coeffs = _load_coeffs(args.coeffs)
    verdict = verify_congruence(args.N, args.M, coeffs)
    if args.json:
        print(json.dumps({"N": args.N, "M": args.M, **verdict.to_json()}))
    elif verdict.full_period:
        print(f"congruence holds at every x mod {args.N}")
    else:
        failing = ", ".join(str(x) for x in verdict.failing_x)
        print(f"congruence fails at x = {failing}"
              + (" (matrix rows all pass)" if verdict.matrix_rows else ""))
    return EXIT_OK if verdict.full_period else EXIT_FAILED


def cmd_sweep(args: argparse.Namespace) -> int:
    records = run_sweep(_parse_range(args.n), _parse_range(args.m), out_path=args.out)
    ranks, kernels = histograms(records)
    full = sum(1 for r in records if r.pseudo_rank == r.n)
    if args.json:
        print(json.dumps({
            "pairs": len(records),
            "full_pseudo_rank": full,
            "rank_histogram": ranks,
            "kernel_histogram": kernels,
            "records": [r.to_json() for r in records],
        }))
        return EXIT_OK
    print(f"{len(records)} pairs")
    print(f"full pseudo-rank: {full}")
    print(f"pseudo-rank histogram (partial cases): {ranks}")
    print(f"guaranteed-kernel histogram (partial cases): {kernels}")
    if args.out:
        print(f"records written to {args.out}")
    return EXIT_OK


def cmd_session_replay(args: argparse.Namespace) -> int:
    script = json.loads(Path(args.script).read_text())
    N, M = int(script["N"]), int(script["M"])
    t = Triplet.from_character_matrix(N, M)
    for step, op in enumerate(script.get("ops", []), start=1):
        t.apply_op(op["kind"], op.get("args", []))
        if not t.assert_invariant():
            print(f"invariant broken after step {step} ({op['kind']})", file=sys.stderr)
            return EXIT_ERROR
    results = []
    failed = False
    for coeffs in script.get("checks", []):
        ok, vec = t.check_kernel_vector(coeffs)
        full = verify_congruence(N, M, vec).full_period if ok else False
        failed = failed or not (ok and full)
        results.append({
            "coeffs": coeffs,
            "in_kernel": ok,
            "vector_or_residual": [a.to_json() for a in vec],
            "full_period": full,
        })
    if args.json:
        print(json.dumps({
            "N": N,
            "M": M,
            "ops_applied": len(script.get("ops", [])),
            "log_length": len(t.op_log),
            "report": t.report().to_json(),
            "checks": results,
        }))
    else:
        print(f"replayed {len(script.get('ops', []))} ops (log length {len(t.op_log)}), invariant holds")
        for r in results:
            vec = [a for a in r["vector_or_residual"]]
            label = "kernel" if r["in_kernel"] else "residual"
            ring = t.ring
            text = _vector_text([ring.element(c["coeffs"]) for c in vec])
            print(f"  check {json.dumps(r['coeffs'])}: {label} {text}, "
                  f"full-period: {'yes' if r['full_period'] else 'no'}")
    return EXIT_FAILED if failed else EXIT_OK


def cmd_serve(args: argparse.Namespace) -> int:
    import uvicorn

    from .service import create_app

    uvicorn.run(
        create_app(persist_path=args.persist),
        host=args.host,
        port=args.port,
        log_level="warning",
    )
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="charcong",
        description="Exact workbench for congruences among Dirichlet character values.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("matrix", help="print the character value matrix")
    p.add_argument("N", type=int)
    p.add_argument("--mod", dest="M", type=int, default=0, help="reduce entries mod M")
    p.add_argument("--json", action="store_true")
    p.set_defaults(func=cmd_matrix)

    p = sub.add_parser("normalize", help="reduce the (N, M) matrix and report")
    p.add_argument("N", type=int)
    p.add_argument("M", type=int)
    p.add_argument("--json", action="store_true")
    p.set_defaults(func=cmd_normalize)

    p = sub.add_parser("kernel", help="exact kernel generators via scalar lift")
    p.add_argument("N", type=int)
    p.add_argument("M", type=int)
    p.add_argument("--json", action="store_true")
    p.set_defaults(func=cmd_kernel)

    p = sub.add_parser("brute", help="exhaustive kernel enumeration (budgeted)")
    p.add_argument("N", type=int)
    p.add_argument("M", type=int)
    p.add_argument("--budget", type=int, default=10**6)
    p.add_argument("--json", action="store_true")
    p.set_defaults(func=cmd_brute)

    p = sub.add_parser("check", help="verify a congruence vector at every residue")
    p.add_argument("N", type=int)
    p.add_argument("M", type=int)
    p.add_argument("--coeffs", required=True, help="JSON list, inline or a file path")
    p.add_argument("--json", action="store_true")
    p.set_defaults(func=cmd_check)

    p = sub.add_parser("sweep", help="normalize a whole (N, M) grid")
    p.add_argument("--n", default="2..20", help="N range, e.g. 2..20")
    p.add_argument("--m", default="2..20", help="M range, e.g. 2..20")
    p.add_argument("--out", default=None, help="stream records to this CSV (resumable)")
    p.add_argument("--json", action="store_true")
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("session", help="session tools")
    session_sub = p.add_subparsers(dest="session_command", required=True)
    replay = session_sub.add_parser("replay", help="replay an op script, then run its checks")
    replay.add_argument("script", help="JSON file with N, M, ops, optional checks")
    replay.add_argument("--json", action="store_true")
    replay.set_defaults(func=cmd_session_replay)

    p = sub.add_parser("serve", help="start the workbench HTTP service")
    p.add_argument("--port", type=int, default=8787)
    p.add_argument("--host", default="127.0.0.1")
    p.add_argument("--persist", default=None, help="append-only JSONL recovery log")
    p.set_defaults(func=cmd_serve)

    return parser


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_OK if exc.code in (0, None) else EXIT_ERROR
    try:
        return args.func(args)
    except BudgetExceededError as exc:
        print(f"refused: {exc}", file=sys.stderr)
        return EXIT_BUDGET
    except (TripletError, ValueError, OSError, KeyError, json.JSONDecodeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_ERROR


if __name__ == "__main__":
    sys.exit(main())
