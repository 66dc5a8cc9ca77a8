"""Command-line front end: a thin client of the in-process service.

Each subcommand assembles one JSON request, posts it to the FastAPI app
through the test client (no socket), and renders the response with the
canonical serializers — identical configurations therefore produce
byte-identical report files.

Exit codes: 0 all non-skipped checks pass, 1 check failure, 2 usage error,
3 numerical non-convergence.
"""

from __future__ import annotations

import argparse
import sys

from .reporting import render_csv, render_json, render_sweep_csv, render_sweep_json

VERIFY_COMMANDS = {
    "verify-schlesinger": "/verify/schlesinger",
    "verify-tau": "/verify/tau",
    "verify-pvi": "/verify/pvi",
    "verify-reference": "/verify/reference",
}

EXIT_PASS = 0
EXIT_CHECK_FAILURE = 1
EXIT_USAGE = 2
EXIT_NON_CONVERGENCE = 3


def _add_common(sub):
    sub.add_argument("--tol", type=float, help="pass/fail threshold for the suite's main gates")
    sub.add_argument("--quad-order", type=int, help="Gauss-Legendre nodes per panel")
    sub.add_argument("--quad-panels", type=int, help="initial panel count per contour segment")
    sub.add_argument("--theta-cap", type=int, help="shell cap of the theta series")
    sub.add_argument("--out", help="report file path (default: stdout)")
    sub.add_argument(
        "--format", choices=("json", "csv"), default="json", help="report serialization"
    )


def _add_curve_flags(sub):
    sub.add_argument("--genus", type=int, help="genus of the hyperelliptic curve")
    sub.add_argument(
        "--branch-points",
        help="comma-separated branch points as re+imi (default: seeded random curve)",
    )
    sub.add_argument("--n", type=int, help="Case 1 exponent of v^n du")
    sub.add_argument("--cycle", help="comma-separated cycle coefficients, one per basis loop")
    sub.add_argument("--seed", type=int, help="seed for the random curve when no points given")
    sub.add_argument("--h", type=float, help="finite-difference step for the PDE checks")


def build_parser():
    parser = argparse.ArgumentParser(
        prog="pvi-periods",
        description=(
            "Verify the algebro-geometric Schlesinger solutions, their tau "
            "functions and Painleve VI reductions against independent "
            "numerical oracles, or sweep a solution family over an x grid."
        ),
    )
    sub = parser.add_subparsers(dest="command", required=True)

    for name in ("verify-schlesinger", "verify-tau"):
        s = sub.add_parser(name, help=f"run the {name.split('-')[1]} suite")
        _add_curve_flags(s)
        _add_common(s)

    s = sub.add_parser("verify-pvi", help="per-point PVI residuals of the cycle families")
    s.add_argument("--family", choices=("case1", "case2"), help="solution family")
    s.add_argument("--n", type=int, help="Case 1 exponent")
    s.add_argument("--c1", help="cycle coefficient c_1 (re+imi)")
    s.add_argument("--c2", help="cycle coefficient c_2 (re+imi)")
    s.add_argument("--x-grid", help="start:stop:count, endpoints inclusive")
    _add_common(s)

    s = sub.add_parser("verify-reference", help="classical solution forms and modular identities")
    s.add_argument("--c1", help="elliptic-argument coefficient c_1 (re+imi)")
    s.add_argument("--c2", help="elliptic-argument coefficient c_2 (re+imi)")
    s.add_argument("--p", help="theta characteristic p")
    s.add_argument("--q", help="theta characteristic q")
    s.add_argument("--x-grid", help="start:stop:count, endpoints inclusive")
    s.add_argument("--tol-kk", type=float, help="gate for the theta-characteristic form")
    _add_common(s)

    s = sub.add_parser("sweep", help="emit (x, y, y', |residual|) plot rows for one family")
    s.add_argument(
        "--family",
        choices=("case1", "case2", "picard-okamoto", "hitchin", "kk"),
        required=True,
    )
    s.add_argument("--n", type=int, help="Case 1 exponent")
    s.add_argument("--c1", help="cycle/argument coefficient c_1")
    s.add_argument("--c2", help="cycle/argument coefficient c_2")
    s.add_argument("--p", help="theta characteristic p")
    s.add_argument("--q", help="theta characteristic q")
    s.add_argument("--x-grid", required=True, help="start:stop:count, endpoints inclusive")
    _add_common(s)
    return parser


_LIST_FLAGS = ("branch_points", "cycle")
_REQUEST_FIELDS = (
    "genus",
    "branch_points",
    "n",
    "cycle",
    "seed",
    "h",
    "family",
    "c1",
    "c2",
    "p",
    "q",
    "x_grid",
    "tol",
    "tol_kk",
    "quad_order",
    "quad_panels",
    "theta_cap",
)


def build_payload(args):
    """Only the flags the user actually set; service defaults fill the rest."""
    payload = {}
    for field in _REQUEST_FIELDS:
        value = getattr(args, field, None)
        if value is None:
            continue
        if field in _LIST_FLAGS:
            value = [part.strip() for part in value.split(",") if part.strip()]
        payload[field] = value
    return payload


def _detail_message(body):
    detail = body.get("detail") if isinstance(body, dict) else None
    if isinstance(detail, dict):
        return detail.get("kind", "error"), detail.get("message", str(detail))
    return "usage", str(detail)


def _render(command, fmt, body):
    if command == "sweep":
        return render_sweep_json(body) if fmt == "json" else render_sweep_csv(body)
    return render_json(body) if fmt == "json" else render_csv(body)


def main(argv=None):
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)

    import warnings

    with warnings.catch_warnings():
        # fastapi.testclient's own deprecated starlette import; not actionable here
        warnings.filterwarnings("ignore", message="Using `httpx` with `starlette.testclient`")
        from fastapi.testclient import TestClient

    from .service import app

    path = VERIFY_COMMANDS.get(args.command, "/sweep")
    with TestClient(app, raise_server_exceptions=False) as client:
        response = client.post(path, json=build_payload(args))

    if response.status_code == 422:
        kind, message = _detail_message(response.json())
        print(f"usage error: {message}", file=sys.stderr)
        return EXIT_USAGE
    if response.status_code != 200:
        kind, message = _detail_message(response.json())
        print(f"{kind}: {message}", file=sys.stderr)
        return EXIT_NON_CONVERGENCE

    body = response.json()
    text = _render(args.command, args.format, body)
    if args.out:
        with open(args.out, "w") as handle:
            handle.write(text)
    else:
        sys.stdout.write(text)

    if args.command == "sweep":
        return EXIT_PASS
    return EXIT_PASS if body["summary"]["failed"] == 0 else EXIT_CHECK_FAILURE


if __name__ == "__main__":
    sys.exit(main())
