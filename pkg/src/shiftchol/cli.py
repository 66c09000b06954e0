"""Command-line client for the factorisation service.

The CLI is a thin HTTP client: by default it mounts the service
in-process, and with ``--server`` it talks to a running instance
instead.  Exit codes: 0 success, 2 structural obstruction (cycle where
a forest is required), 3 malformed input, 4 numerical failure.
"""

from __future__ import annotations

import argparse
import json
import sys

import numpy as np

from .serialize import canonical_json

EXIT_STRUCTURAL = 2
EXIT_SCHEMA = 3
EXIT_NUMERICAL = 4

_ERROR_EXIT_CODES = {
    "NoLeafEdge": EXIT_STRUCTURAL,
    "NotAForest": EXIT_STRUCTURAL,
    "MalformedColumn": EXIT_STRUCTURAL,
    "TooLarge": EXIT_STRUCTURAL,
    "SchemaError": EXIT_SCHEMA,
    "DimensionMismatch": EXIT_SCHEMA,
}


def _client(server: str | None):
    if server:
        import httpx

        return httpx.Client(base_url=server)
    from fastapi.testclient import TestClient

    from .service import app

    return TestClient(app)


def _fail(body: dict) -> int:
    name = body.get("error", "ShiftCholError")
    print(f"error: {name}: {body.get('detail', '')}", file=sys.stderr)
    return _ERROR_EXIT_CODES.get(name, EXIT_NUMERICAL)


def _emit(doc, output: str | None) -> None:
    text = canonical_json(doc)
    if output:
        with open(output, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _load_json(path: str):
    try:
        with open(path) as fh:
            return json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        print(f"error: cannot read {path}: {exc}", file=sys.stderr)
        return None


def _tolerance_body(args) -> dict:
    return {
        "zero_tol": args.zero_tol,
        "psd_tol": args.psd_tol,
        "inv_tol": args.inv_tol,
    }


def _render_pattern(mask, csv: bool) -> str:
    mask = np.asarray(mask, dtype=bool)
    if csv:
        return "\n".join(",".join("1" if f else "0" for f in row) for row in mask)
    return "\n".join(" ".join("★" if f else "0" for f in row) for row in mask)


def cmd_factor(args, client) -> int:
    doc = _load_json(args.input)
    if doc is None:
        return EXIT_SCHEMA
    body = {"matrix": doc, "check": args.check, "tolerances": _tolerance_body(args)}
    resp = client.post("/factor", json=body)
    if resp.status_code != 200:
        return _fail(resp.json())
    out = resp.json()
    if args.check and not out["checks"]["fill_in_free"]:
        print("error: factor has fill-in", file=sys.stderr)
        return EXIT_NUMERICAL
    _emit(out, args.output)
    return 0


def cmd_lqr(args, client) -> int:
    doc = _load_json(args.input)
    if doc is None:
        return EXIT_SCHEMA
    body = {
        "network": doc,
        "oracle": args.oracle,
        "tolerances": _tolerance_body(args),
    }
    resp = client.post("/lqr", json=body)
    if resp.status_code != 200:
        return _fail(resp.json())
    out = resp.json()
    if args.pattern:
        pat = out["pattern"]
        if pat["K1"] is not None:
            print("K1 pattern:")
            print(_render_pattern(pat["K1"], args.csv))
        else:
            print("K1 pattern: (no sparse pair; dense gain only)")
            print("K pattern:")
            print(
                _render_pattern(
                    np.abs(np.asarray(out["K"])) > 1e-9, args.csv
                )
            )
        print("K2 pattern:")
        print(_render_pattern(pat["K2"], args.csv))
    _emit(out, args.output)
    return 0


def cmd_chordal(args, client) -> int:
    doc = _load_json(args.input)
    if doc is None:
        return EXIT_SCHEMA
    resp = client.post("/chordal", json={"graph": doc})
    if resp.status_code != 200:
        return _fail(resp.json())
    out = resp.json()
    print(f"is tree: {str(out['is_tree']).lower()}")
    print(f"cycle >= 4: {str(out['has_cycle_geq_4']).lower()}")
    print(f"edge graph chordal: {str(out['edge_graph_chordal']).lower()}")
    print(f"biconditional holds: {str(out['biconditional_holds']).lower()}")
    return 0


def cmd_cycle_demo(args, client) -> int:
    resp = client.get("/cycle-demo", params={"n": args.n})
    if resp.status_code != 200:
        return _fail(resp.json())
    out = resp.json()
    print(f"cycle length: {out['n']}")
    print("Schur complement coefficients ((q*)^i q^j -> c):")
    for term in out["closed_form"]["terms"]:
        print(f"  ({term['istar']},{term['j']}): {term['c']:.12g}")
    print(f"in diagonal sub-ring: {str(out['in_rinf']).lower()}")
    print(f"truncation residual: {out['truncation_residual']:.3e}")
    return 0


def cmd_spectral_demo(args, client) -> int:
    resp = client.get("/spectral-demo")
    if resp.status_code != 200:
        return _fail(resp.json())
    out = resp.json()
    print("limit matrix:")
    for row in out["limit_matrix"]:
        print("  " + "  ".join(f"{v: .6f}" for v in row))
    print(
        f"{out['n_compatible']} / {out['n_permutations']} sparsity-compatible"
    )
    for entry in out["compatible"]:
        coeffs = ", ".join(f"{c:.6g}" for c in entry["diag_qstarq"])
        print(f"  permutation {entry['permutation']}: diagonal q*q [{coeffs}]")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="shiftchol",
        description="Factorisation of shift-operator matrices and sparse "
        "network control laws",
    )
    parser.add_argument(
        "--server", help="base URL of a running service (default: in-process)"
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def add_tolerances(p):
        p.add_argument("--zero-tol", type=float, default=None)
        p.add_argument("--psd-tol", type=float, default=None)
        p.add_argument("--inv-tol", type=float, default=None)

    p = sub.add_parser("factor", help="factorise an operator matrix")
    p.add_argument("--input", required=True)
    p.add_argument("--output")
    p.add_argument("--check", action="store_true")
    add_tolerances(p)
    p.set_defaults(func=cmd_factor)

    p = sub.add_parser("lqr", help="solve a network control problem")
    p.add_argument("--input", required=True)
    p.add_argument("--output")
    p.add_argument("--oracle", action="store_true")
    p.add_argument("--pattern", action="store_true")
    p.add_argument("--csv", action="store_true")
    add_tolerances(p)
    p.set_defaults(func=cmd_lqr)

    p = sub.add_parser("chordal", help="cycle and chordality report")
    p.add_argument("--input", required=True)
    p.set_defaults(func=cmd_chordal)

    p = sub.add_parser("cycle-demo", help="cycle obstruction demonstration")
    p.add_argument("--n", type=int, required=True, choices=range(3, 9))
    p.set_defaults(func=cmd_cycle_demo)

    p = sub.add_parser(
        "spectral-demo", help="forward-shift factor impossibility demonstration"
    )
    p.set_defaults(func=cmd_spectral_demo)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    with _client(args.server) as client:
        return args.func(args, client)


if __name__ == "__main__":
    sys.exit(main())
