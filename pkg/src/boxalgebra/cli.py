"""Command-line interface.

Subcommands:

    chsh <box.json>                   correlators and CHSH values of a box
    local-test <box.json>             local-polytope membership (facets/lp/both)
    wire <chain.json>                 compose a chain and report on the result
    audit <box.json> --position P     absorption audit against the 16 strategies
    combine --X <x> [--Y --T ...]     the combination integral Z(Y, X)
    solve [--T --target --tol]        root of Z(2, X) = target
    sweep --T-list <spec>             CSV table of solves over several T
    idem --X <x> [--Y --T --grid]     sup-valued reading of the integrand

All JSON output is canonical: sorted keys, no insignificant whitespace,
floats at 17 significant digits.  Exit status is 0 on success, 1 on a
validation error, 2 on a numeric error; errors appear as a single JSON
line on stderr.
"""

from __future__ import annotations

import argparse
import json
import math
import sys

from . import boxmodel, deform, wiring
from .errors import NumericError, ValidationError

EXIT_OK = 0
EXIT_VALIDATION = 1
EXIT_NUMERIC = 2


def canonical_json(value) -> str:
    """Deterministic JSON: sorted keys, compact separators, floats at .17g."""
    if value is None or isinstance(value, bool) or isinstance(value, str):
        return json.dumps(value)
    if isinstance(value, int):
        return str(value)
    if isinstance(value, float):
        if not math.isfinite(value):
            raise ValidationError(f"cannot serialize non-finite number {value}")
        return format(value, ".17g")
    if isinstance(value, (list, tuple)):
        return "[" + ",".join(canonical_json(v) for v in value) + "]"
    if isinstance(value, dict):
        items = sorted(value.items())
        return "{" + ",".join(json.dumps(k) + ":" + canonical_json(v) for k, v in items) + "}"
    raise ValidationError(f"cannot serialize value of type {type(value).__name__}")


class _Parser(argparse.ArgumentParser):
    """argparse variant whose usage errors go through the validation path."""

    def error(self, message):
        raise ValidationError(message)


def _load_json(path: str):
    try:
        with open(path, encoding="utf-8") as fh:
            return json.load(fh)
    except OSError as exc:
        raise ValidationError(f"cannot read {path}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise ValidationError(f"malformed JSON in {path}: {exc}") from exc


def _load_box(path: str) -> boxmodel.BehaviorBox:
    return boxmodel.box_from_dict(_load_json(path))


def _chsh_report(box: boxmodel.BehaviorBox) -> dict:
    value, _ = boxmodel.chsh_max(box)
    return {
        "correlators": list(boxmodel.correlators(box).as_tuple()),
        "chsh_canonical": boxmodel.chsh_canonical(box),
        "chsh_max": value,
        "no_signaling": boxmodel.check_no_signaling(box).ok,
    }


def _locality_dict(report: boxmodel.LocalityReport) -> dict:
    return {
        "is_local": report.is_local,
        "method": report.method,
        "violated_facet": report.violated_facet,
        "max_facet_value": report.max_facet_value,
        "lp_weights": None if report.lp_weights is None else list(report.lp_weights),
    }


def _cmd_chsh(args) -> int:
    print(canonical_json(_chsh_report(_load_box(args.box))))
    return EXIT_OK


def _cmd_local_test(args) -> int:
    box = _load_box(args.box)
    if args.method == "facets":
        out = _locality_dict(boxmodel.is_local_facets(box))
    elif args.method == "lp":
        out = _locality_dict(boxmodel.is_local_lp(box))
    else:
        facets = boxmodel.is_local_facets(box)
        lp = boxmodel.is_local_lp(box)
        out = {
            "facets": _locality_dict(facets),
            "lp": _locality_dict(lp),
            "agree": facets.is_local == lp.is_local,
        }
    print(canonical_json(out))
    return EXIT_OK


def _cmd_wire(args) -> int:
    chain = wiring.chain_from_dict(_load_json(args.chain))
    composed = wiring.compose_chain(chain)
    out = {"box": boxmodel.box_to_dict(composed), "chsh": _chsh_report(composed)}
    print(canonical_json(out))
    return EXIT_OK


def _cmd_audit(args) -> int:
    report = wiring.absorption_audit(_load_box(args.box), args.position)
    out = [
        {
            "strategy": list(entry.strategy),
            "chsh_max": entry.chsh_max,
            "counterexample": entry.counterexample,
        }
        for entry in report.results
    ]
    print(canonical_json(out))
    return EXIT_OK


def _cmd_combine(args) -> int:
    params = deform.DeformationParams(T=args.T, quad_order=args.quad_order)
    result = deform.combined_chsh(args.Y, args.X, params)
    out = {
        "Z": result.Z,
        "abs_error_estimate": result.abs_error_estimate,
        "n_evals": result.n_evals,
    }
    print(canonical_json(out))
    return EXIT_OK


def _solve_dict(result: deform.SolveResult) -> dict:
    return {
        "x_max": result.x_max,
        "residual": result.residual,
        "iterations": result.iterations,
        "bracket": list(result.bracket),
        "gap_to_tsirelson": result.gap_to_tsirelson,
    }


def _cmd_solve(args) -> int:
    params = deform.DeformationParams(
        T=args.T, root_tol=args.tol, target=args.target, quad_order=args.quad_order
    )
    print(canonical_json(_solve_dict(deform.solve_xmax(params))))
    return EXIT_OK


def _parse_t_list(spec: str) -> list[float]:
    """Comma-separated values ("0.5,1,2") or start:stop:count ("0.8:1.2:5")."""
    try:
        if ":" in spec:
            start, stop, count = spec.split(":")
            n = int(count)
            if n < 1:
                raise ValueError
            lo, hi = float(start), float(stop)
            if n == 1:
                return [lo]
            return [lo + (hi - lo) * i / (n - 1) for i in range(n)]
        return [float(part) for part in spec.split(",")]
    except ValueError as exc:
        raise ValidationError(f"cannot parse T list {spec!r}") from exc


def _cmd_sweep(args) -> int:
    t_values = _parse_t_list(args.T_list)
    params = deform.DeformationParams(
        quad_order=args.quad_order, root_tol=args.tol, target=args.target
    )
    rows = deform.sweep_T(t_values, params)
    lines = ["T,x_max,residual,gap"]
    failed = False
    for row in rows:
        lines.append(
            f"{row.T:.12g},{row.x_max:.12g},{row.residual:.12g},{row.gap:.12g}"
        )
        if row.error is not None:
            failed = True
            _print_error("numeric", f"T={row.T:.12g}: {row.error}")
    sys.stdout.write("\n".join(lines) + "\n")
    return EXIT_NUMERIC if failed else EXIT_OK


def _cmd_idem(args) -> int:
    sup = deform.idempotent_combined_chsh(args.Y, args.X, args.T, args.grid)
    print(canonical_json({"sup": sup}))
    return EXIT_OK


def _print_error(kind: str, message: str) -> None:
    sys.stderr.write(json.dumps({"error": kind, "message": message}) + "\n")


def _build_parser() -> _Parser:
    parser = _Parser(prog="boxalg", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("chsh", help="correlators and CHSH values of a box")
    p.add_argument("box", help="path to a box JSON file")
    p.set_defaults(func=_cmd_chsh)

    p = sub.add_parser("local-test", help="local-polytope membership test")
    p.add_argument("box", help="path to a box JSON file")
    p.add_argument("--method", choices=("facets", "lp", "both"), default="both")
    p.set_defaults(func=_cmd_local_test)

    p = sub.add_parser("wire", help="compose a wiring chain")
    p.add_argument("chain", help="path to a chain JSON file")
    p.set_defaults(func=_cmd_wire)

    p = sub.add_parser("audit", help="absorption audit against deterministic stages")
    p.add_argument("box", help="path to a box JSON file")
    p.add_argument("--position", choices=("first", "second"), required=True)
    p.set_defaults(func=_cmd_audit)

    p = sub.add_parser("combine", help="combination integral Z(Y, X)")
    p.add_argument("--X", type=float, required=True)
    p.add_argument("--Y", type=float, default=2.0)
    p.add_argument("--T", type=float, default=1.0)
    p.add_argument("--quad-order", type=int, default=deform.DEFAULT_QUAD_ORDER)
    p.set_defaults(func=_cmd_combine)

    p = sub.add_parser("solve", help="root of Z(2, X) = target")
    p.add_argument("--T", type=float, default=1.0)
    p.add_argument("--target", type=float, default=deform.DEFAULT_TARGET)
    p.add_argument("--tol", type=float, default=deform.DEFAULT_ROOT_TOL)
    p.add_argument("--quad-order", type=int, default=deform.DEFAULT_QUAD_ORDER)
    p.set_defaults(func=_cmd_solve)

    p = sub.add_parser("sweep", help="CSV of solves over several T values")
    p.add_argument("--T-list", dest="T_list", required=True,
                   help='comma list "0.5,1,2" or range "0.8:1.2:5"')
    p.add_argument("--target", type=float, default=deform.DEFAULT_TARGET)
    p.add_argument("--tol", type=float, default=deform.DEFAULT_ROOT_TOL)
    p.add_argument("--quad-order", type=int, default=deform.DEFAULT_QUAD_ORDER)
    p.set_defaults(func=_cmd_sweep)

    p = sub.add_parser("idem", help="sup-valued reading of the integrand")
    p.add_argument("--X", type=float, required=True)
    p.add_argument("--Y", type=float, default=2.0)
    p.add_argument("--T", type=float, default=1.0)
    p.add_argument("--grid", type=int, default=1_000_000)
    p.set_defaults(func=_cmd_idem)

    return parser


def main(argv=None) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
        return args.func(args)
    except ValidationError as exc:
        _print_error("validation", str(exc))
        return EXIT_VALIDATION
    except NumericError as exc:
        _print_error("numeric", str(exc))
        return EXIT_NUMERIC


if __name__ == "__main__":
    sys.exit(main())
