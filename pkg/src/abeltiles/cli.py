"""Command-line front end.

Exit codes: 0 = computed (whatever the verdict), 2 = budget exhausted or
verdict unknown, 1 = usage or input error.  `--json` emits one canonical
JSON document (JSON-lines for streamed enumerations); heavy commands are
cached in an append-only store keyed by command, canonical parameters, and
tool version, so repeated sweeps resume instead of recompute.
"""

from __future__ import annotations

import argparse
import json
import sys

from . import __version__
from .cache import ResultCache, RunRecord, content_hash
from .constructions import (
    build_nonPT_product_witness,
    build_p2cubed_witness,
    build_p2p2_witness,
    build_p2q2_witness,
    build_p3p2_witness,
    build_p3q2_witness,
    decompose_ascending_chain,
)
from .errors import BudgetExceededError, ConstructionError, InputError, NoPeriodicComplementError
from .fourier import find_spectrum, spectrum_via_pt, zero_set
from .groups import mask_indices, parse_group, parse_subset
from .properties import (
    check_hajos,
    check_pt,
    check_redei,
    check_upt,
    hajos_list_member,
    known_classification,
)
from .tiling import (
    NodeBudget,
    ROUTES,
    TilingPair,
    enumerate_complements,
    enumerate_tilings,
    is_tiling_pair,
    iter_complement_masks,
    periods,
)

_PROPERTY_CHECKS = {"pt": check_pt, "upt": check_upt, "hajos": check_hajos, "redei": check_redei}

_CONSTRUCT_NAMES = ("p2q2", "p2p2", "p3q2", "p3p2", "p2cubed", "product")


class _Parser(argparse.ArgumentParser):
    # usage problems exit 1, not argparse's default 2 (2 means budget here)
    def error(self, message):
        self.print_usage(sys.stderr)
        sys.stderr.write(f"{self.prog}: error: {message}\n")
        sys.exit(1)


def _add_common(parser: argparse.ArgumentParser, suppress: bool) -> None:
    # shared flags are accepted both before and after the subcommand; the
    # post-subcommand copy uses SUPPRESS so it only overrides when given
    d = argparse.SUPPRESS if suppress else None
    parser.add_argument("--json", action="store_true", help="emit a canonical JSON report",
                        **({"default": d} if suppress else {}))
    parser.add_argument("--budget", type=int, help="search node budget",
                        default=d if suppress else None)
    parser.add_argument("--max-order", type=int, help="maximum admissible group order",
                        default=d if suppress else 4096)
    parser.add_argument("--seed", type=int, help="seed recorded for reproducibility",
                        default=d if suppress else 1)
    parser.add_argument("--no-cache", action="store_true", help="bypass the result cache",
                        **({"default": d} if suppress else {}))
    parser.add_argument("--cache-dir", help="cache directory (else env or default)",
                        default=d if suppress else None)


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="abeltiles", description=__doc__)
    p.add_argument("--version", action="version", version=f"abeltiles {__version__}")
    _add_common(p, suppress=False)
    common = _Parser(add_help=False)
    _add_common(common, suppress=True)
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def grp(sp):
        sp.add_argument("group", help="group spec, e.g. Z36 or Z4xZ2^3")

    s = sub.add_parser("group", parents=[common], help="parse a group spec and show its data")
    grp(s)

    s = sub.add_parser("verify", parents=[common], help="verify a tiling pair")
    grp(s)
    s.add_argument("--omega", required=True)
    s.add_argument("--t", required=True)
    s.add_argument("--route", choices=ROUTES + ("all",), default="all")

    s = sub.add_parser("complements", parents=[common], help="enumerate tiling complements")
    grp(s)
    s.add_argument("--omega", required=True)
    s.add_argument("--all-translates", action="store_true", help="include non-normalized complements")
    s.add_argument("--limit", type=int, default=0, help="stop after this many (0 = all)")

    s = sub.add_parser("periods", parents=[common], help="period group of a subset")
    grp(s)
    s.add_argument("--set", required=True, dest="subset")

    s = sub.add_parser("zeroset", parents=[common], help="zero set of the Fourier transform")
    grp(s)
    s.add_argument("--set", required=True, dest="subset")

    s = sub.add_parser("spectrum", parents=[common], help="find a spectrum for a tile")
    grp(s)
    s.add_argument("--omega", required=True)
    s.add_argument("--method", choices=("search", "tiling"), default="search")
    s.add_argument("--t", default=None, help="tiling complement (method=tiling)")

    s = sub.add_parser("property", parents=[common], help="decide a group property exhaustively")
    grp(s)
    s.add_argument("--check", required=True, choices=sorted(_PROPERTY_CHECKS))
    s.add_argument("--exhaustive-bound", type=int, default=40)

    s = sub.add_parser("construct", parents=[common], help="build and verify a named construction")
    s.add_argument("name", choices=_CONSTRUCT_NAMES)
    s.add_argument("--p", type=int, default=2)
    s.add_argument("--q", type=int, default=3)
    s.add_argument("--m", type=int, default=5)
    s.add_argument("--deep-checks", action="store_true", help="force the exhaustive claims")

    s = sub.add_parser("classify", parents=[common], help="closed-form classification of a group")
    grp(s)

    s = sub.add_parser("decompose", parents=[common], help="ascending-chain decomposition of a tile")
    grp(s)
    s.add_argument("--omega", required=True)

    s = sub.add_parser("tilings", parents=[common], help="stream every normalized tiling pair")
    grp(s)
    s.add_argument("--size", type=int, default=None, help="filter |omega|")
    s.add_argument("--limit", type=int, default=0, help="stop after this many (0 = all)")
    s.add_argument("--exhaustive-bound", type=int, default=40)
    return p


# -- command handlers: (params, compute) with compute() -> (payload, exit_code) ----


def _cmd_group(args, bud):
    g = parse_group(args.group, max_order=args.max_order)
    params = {"group": g.spec()}

    def compute():
        return {
            "spec": g.spec(),
            "factors": list(g.factors),
            "order": g.order,
            "exponent": g.exponent,
            "invariant_factors": list(g.invariant_factors()),
            "cyclic": g.is_cyclic,
        }, 0

    return params, compute


def _cmd_verify(args, bud):
    g = parse_group(args.group, max_order=args.max_order)
    omega = parse_subset(g, args.omega)
    t = parse_subset(g, args.t)
    params = {
        "group": g.spec(),
        "omega": list(omega.indices()),
        "t": list(t.indices()),
        "route": args.route,
    }

    def compute():
        if args.route == "all":
            routes = {r: is_tiling_pair(omega, t, r) for r in ROUTES}
            if len(set(routes.values())) != 1:
                raise ArithmeticError(f"verification routes disagree: {routes}")
            return {"tiling": all(routes.values()), "routes": routes}, 0
        return {"tiling": is_tiling_pair(omega, t, args.route), "route": args.route}, 0

    return params, compute


def _cmd_complements(args, bud):
    g = parse_group(args.group, max_order=args.max_order)
    omega = parse_subset(g, args.omega)
    params = {
        "group": g.spec(),
        "omega": list(omega.indices()),
        "all_translates": bool(args.all_translates),
        "limit": args.limit,
    }

    def compute():
        if args.limit:
            out = []
            for m in iter_complement_masks(g, omega.bits, bud):
                out.append(list(mask_indices(m)))
                if len(out) >= args.limit:
                    break
            comps = sorted(out)
        else:
            comps = [
                list(c.indices())
                for c in enumerate_complements(omega, normalize=not args.all_translates, budget=bud)
            ]
        return {"count": len(comps), "complements": comps, "budget": bud.snapshot()}, 0

    return params, compute


def _cmd_periods(args, bud):
    g = parse_group(args.group, max_order=args.max_order)
    s = parse_subset(g, args.subset)
    params = {"group": g.spec(), "set": list(s.indices())}

    def compute():
        per = periods(s)
        return {"periods": list(per.carrier.indices()), "periodic": per.order > 1}, 0

    return params, compute


def _cmd_zeroset(args, bud):
    g = parse_group(args.group, max_order=args.max_order)
    s = parse_subset(g, args.subset)
    params = {"group": g.spec(), "set": list(s.indices())}

    def compute():
        return {"zeros": list(zero_set(s).indices())}, 0

    return params, compute


def _cmd_spectrum(args, bud):
    g = parse_group(args.group, max_order=args.max_order)
    omega = parse_subset(g, args.omega)
    params = {
        "group": g.spec(),
        "omega": list(omega.indices()),
        "method": args.method,
        "t": None if args.t is None else list(parse_subset(g, args.t).indices()),
    }

    def compute():
        if args.method == "search":
            lam = find_spectrum(omega, bud)
        else:
            if args.t is not None:
                t = parse_subset(g, args.t)
            else:
                comps = enumerate_complements(omega, budget=bud)
                if not comps:
                    raise InputError("the set is not a tile; no complement exists")
                t = comps[0]
            lam = spectrum_via_pt(omega, TilingPair.verified(omega, t), bud)
        return {
            "spectrum": None if lam is None else list(lam.indices()),
            "method": args.method,
            "budget": bud.snapshot(),
        }, 0

    return params, compute


def _cmd_property(args, bud):
    g = parse_group(args.group, max_order=args.max_order)
    params = {"group": g.spec(), "check": args.check, "exhaustive_bound": args.exhaustive_bound}

    def compute():
        verdict = _PROPERTY_CHECKS[args.check](g, bud, exhaustive_bound=args.exhaustive_bound)
        return verdict.to_dict(), 0 if verdict.holds is not None else 2

    return params, compute


def _cmd_construct(args, bud):
    params = {
        "name": args.name,
        "p": args.p,
        "q": args.q,
        "m": args.m,
        "deep": bool(args.deep_checks),
    }

    def compute():
        deep = True if args.deep_checks else None
        if args.name == "p2q2":
            report = build_p2q2_witness(args.p, args.q, bud, deep)
        elif args.name == "p2p2":
            report = build_p2p2_witness(args.p, bud, deep)
        elif args.name == "p3q2":
            report = build_p3q2_witness(args.p, args.q, bud, deep)
        elif args.name == "p3p2":
            report = build_p3p2_witness(args.p, bud, deep)
        elif args.name == "p2cubed":
            report = build_p2cubed_witness(args.p, bud, deep)
        else:
            base = build_p2q2_witness(args.p, args.q, bud)
            report = build_nonPT_product_witness(
                base.sets["omega"], [base.sets["t1"], base.sets["t2"]], args.m, bud
            )
        payload = report.to_dict()
        payload["budget"] = bud.snapshot()
        return payload, 0

    return params, compute


def _cmd_classify(args, bud):
    g = parse_group(args.group, max_order=args.max_order)
    params = {"group": g.spec()}

    def compute():
        verdict = known_classification(g.invariant_factors())
        return {
            "group": g.spec(),
            "invariant_factors": list(g.invariant_factors()),
            "PT": verdict.status,
            "citation": verdict.citation,
            "factor_periodicity_list": hajos_list_member(g.invariant_factors()),
        }, 0

    return params, compute


def _cmd_decompose(args, bud):
    g = parse_group(args.group, max_order=args.max_order)
    omega = parse_subset(g, args.omega)
    params = {"group": g.spec(), "omega": list(omega.indices())}

    def compute():
        cd = decompose_ascending_chain(omega, bud)
        payload = cd.to_dict()
        payload["budget"] = bud.snapshot()
        return payload, 0

    return params, compute


def _cmd_tilings(args, bud):
    g = parse_group(args.group, max_order=args.max_order)
    params = {
        "group": g.spec(),
        "size": args.size,
        "limit": args.limit,
        "exhaustive_bound": args.exhaustive_bound,
    }

    def compute():
        pairs = []
        for pair in enumerate_tilings(g, args.size, bud, exhaustive_bound=args.exhaustive_bound):
            pairs.append(pair.to_dict())
            if args.limit and len(pairs) >= args.limit:
                break
        return {"count": len(pairs), "pairs": pairs, "budget": bud.snapshot()}, 0

    return params, compute


_HANDLERS = {
    "group": _cmd_group,
    "verify": _cmd_verify,
    "complements": _cmd_complements,
    "periods": _cmd_periods,
    "zeroset": _cmd_zeroset,
    "spectrum": _cmd_spectrum,
    "property": _cmd_property,
    "construct": _cmd_construct,
    "classify": _cmd_classify,
    "decompose": _cmd_decompose,
    "tilings": _cmd_tilings,
}

_UNCACHED = {"group"}


def _render_human(command: str, payload: dict) -> str:
    lines: list[str] = []
    if command == "tilings":
        for rec in payload["pairs"]:
            lines.append(json.dumps(rec, sort_keys=True))
        lines.append(f"count: {payload['count']}")
        return "\n".join(lines)
    if command == "complements":
        for c in payload["complements"]:
            lines.append("{" + ",".join(map(str, c)) + "}")
        lines.append(f"count: {payload['count']}")
        return "\n".join(lines)

    def fmt(key, value):
        if isinstance(value, bool):
            return "true" if value else "false"
        if value is None:
            return "unknown" if key == "holds" else "null"
        return json.dumps(value, sort_keys=True) if isinstance(value, (dict, list)) else str(value)

    for key, value in payload.items():
        lines.append(f"{key}: {fmt(key, value)}")
    return "\n".join(lines)


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    bud = NodeBudget(args.budget) if args.budget else NodeBudget()
    handler = _HANDLERS[args.command]
    cache = None if args.no_cache or args.command in _UNCACHED else ResultCache(args.cache_dir)

    try:
        params, compute = handler(args, bud)
        key = content_hash(args.command, {**params, "seed": args.seed})
        hit = cache.lookup(key) if cache is not None else None
        if hit is not None:
            payload = hit["result"]
            code = hit.get("exit_code", 0)
        else:
            payload, code = compute()
            if cache is not None:
                record = RunRecord(
                    command=args.command,
                    group=params.get("group"),
                    params={**params, "seed": args.seed},
                    result=payload,
                    budget=payload.get("budget") if isinstance(payload, dict) else None,
                    version=__version__,
                    hash=key,
                )
                as_dict = record.to_dict()
                as_dict["exit_code"] = code
                cache.store_dict(as_dict)
    except InputError as exc:
        print(f"abeltiles: {exc}", file=sys.stderr)
        return 1
    except (ConstructionError, NoPeriodicComplementError) as exc:
        print(f"abeltiles: {exc}", file=sys.stderr)
        return 1
    except BudgetExceededError as exc:
        print(f"abeltiles: {exc}", file=sys.stderr)
        return 2

    if args.json:
        print(json.dumps(payload, sort_keys=True))
    else:
        print(_render_human(args.command, payload))
    return code


if __name__ == "__main__":
    sys.exit(main())
