"""Batch command-line surface.

Exit codes: 0 success, 1 refuted/failed verification, 2 usage error,
3 cap exceeded or indeterminate comparison.  Reports embed the tool version,
constant settings and seed, and identical invocations produce byte-identical
output (orderings are canonical everywhere upstream).

Environment: WPA_MAX_ORDER and WPA_BITCAP override the closure-order and
planner bit caps; explicit flags win over the environment.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from fractions import Fraction

from . import __version__
from .counting import (
    DEFAULT_LATTICE_CAP,
    elem_abelian_max,
    lattice_summary,
    minimal_index,
    rank,
    s_n,
    sn_table_csv,
    subgroup_lattice,
)
from .errors import CapExceededError, IndeterminateError, SpecError, WpaError
from .growth import verify_base_containment, verify_bounds_exact
from .nice import check_nice, make_spec
from .perm import (
    DEFAULT_ORDER_CAP,
    PermGroup,
    ensure_materialized,
    generate,
    is_transitive,
    orbits,
    parse_group_spec,
    parse_sequence_spec,
)
from .planner import (
    DEFAULT_BIT_CAP,
    PlannerConstants,
    TOY_CONSTANTS,
    check_gently_growing,
    parse_growth_fn,
    plan_main,
    plan_variation1,
    plan_variation2,
    verify_main_chains,
)
from .towers import persistence_level, tower_eval, verify_tail_sum_bound
from .wreath import DEFAULT_DEGREE_CAP, imprimitive_action, iterated_wpa, product_action, project

EXIT_OK = 0
EXIT_REFUTED = 1
EXIT_USAGE = 2
EXIT_CAP = 3


def _env_int(name: str, default: int) -> int:
    raw = os.environ.get(name)
    if raw is None:
        return default
    try:
        return int(raw)
    except ValueError:
        raise SpecError(f"environment variable {name}={raw!r} is not an integer")


def _perm_strings(group: PermGroup) -> list[str]:
    return [repr(g) for g in group.generators]


# ---------------------------------------------------------------------------
# subcommand handlers: each returns (outputs dict, exit code)


def _cmd_group(args) -> tuple[dict, int]:
    g = parse_group_spec(args.spec)
    closed = generate(g.generators, cap=args.cap)
    out = {
        "spec": args.spec,
        "degree": g.degree,
        "claimed_order": g.order,
        "order": closed.order,
        "transitive": is_transitive(g),
        "orbits": [list(o) for o in orbits(g)],
        "generators": _perm_strings(g),
    }
    if closed.order is None:
        out["note"] = f"closure exceeds cap {args.cap}; order unknown"
        return out, EXIT_CAP
    if g.order is not None and g.order != closed.order:
        out["note"] = "claimed order contradicts closure"
        return out, EXIT_REFUTED
    return out, EXIT_OK


def _cmd_wreath(args) -> tuple[dict, int]:
    seq = parse_sequence_spec(args.seq)
    if args.kind in ("product", "imprimitive"):
        if len(seq) != 2:
            raise SpecError(f"--kind {args.kind} needs exactly two groups")
        build = product_action if args.kind == "product" else imprimitive_action
        wp = build(seq[0], seq[1], degree_cap=args.degree_cap, order_cap=args.cap)
        closed = generate(wp.group.generators, cap=args.cap)
        out = {
            "kind": args.kind,
            "degree": wp.group.degree,
            "order_formula": wp.order_formula,
            "order_closure": closed.order,
            "orders_match": (closed.order == wp.order_formula
                             if closed.order is not None else None),
            "transitive": is_transitive(wp.group),
        }
        if closed.order is None:
            return out, EXIT_CAP
        return out, EXIT_OK if out["orders_match"] else EXIT_REFUTED

    itw = iterated_wpa(seq, args.level, degree_cap=args.degree_cap,
                       order_cap=args.cap)
    levels = []
    for k in range(1, len(itw.degrees)):
        levels.append({
            "k": k,
            "degree": itw.degrees[k].to_json(),
            "order": itw.orders[k].to_json(),
            "materialized_points": itw.levels[k] is not None,
        })
    out = {"kind": "tower", "levels": levels}
    code = EXIT_OK
    if args.do_project:
        reports = []
        for k in range(2, len(itw.degrees)):
            if itw.wreaths[k] is None or itw.levels[k - 1] is None:
                break
            try:
                rep = project(itw, k, order_cap=args.cap)
            except CapExceededError:
                break
            reports.append({
                "k": k, "kernel_order": rep.kernel_order,
                "image_order": rep.image_order, "ok": rep.ok,
            })
            if not rep.ok:
                code = EXIT_REFUTED
        out["projections"] = reports
    return out, code


def _cmd_count(args) -> tuple[dict, int]:
    g = parse_group_spec(args.spec)
    lat = subgroup_lattice(ensure_materialized(g, cap=args.cap), args.lattice_cap)
    n_max = args.n if args.n is not None else lat.order
    out = {
        "spec": args.spec,
        "summary": lattice_summary(lat),
        "s_table": [{"n": n, "s_n": s_n(lat, n)} for n in range(1, n_max + 1)],
    }
    if args.full:
        out["mu"] = minimal_index(lat)
        out["rank"] = rank(lat)
        out["elem_abelian"] = [
            {"p": i.prime, "e": i.exponent} for i in elem_abelian_max(lat)
        ]
    if args.format == "csv":
        out["csv"] = sn_table_csv(lat, n_max)
    return out, EXIT_OK


def _json_int(v: int | None):
    if v is None:
        return None
    if v.bit_length() <= 3000:
        return v
    return f"<exact {v.bit_length()}-bit integer>"


def _cmd_tower(args) -> tuple[dict, int]:
    a = [int(tok) for tok in args.a.split(",") if tok.strip()]
    n_max = args.nmax if args.nmax is not None else len(a)
    cert = verify_tail_sum_bound(a, n_max)
    out = {
        "a": a,
        "m2": cert.m2,
        "m_of_m2": cert.m_of_m2,
        "threshold_N": cert.threshold,
        "exact_levels": cert.exact_levels,
        "partial": cert.partial,
        "final_rows": [
            {"n": row.n, "sum": _json_int(row.partial_sum),
             "bound": _json_int(row.bound), "holds": row.holds}
            for row in cert.final_rows
        ],
        "eq2_rows": [
            {"n": row.n, "sum": _json_int(row.partial_sum),
             "bound": _json_int(row.bound), "holds": row.holds}
            for row in cert.eq2_rows
        ],
        "all_verified": cert.all_verified,
        "a_hat_nmax": tower_eval(a, n_max).to_json(),
    }
    if args.c is not None:
        out["M_of_C"] = {"C": str(args.c), "M": persistence_level(a, Fraction(args.c))}
    return out, EXIT_OK if cert.all_verified else EXIT_REFUTED


def _cmd_nice_check(args) -> tuple[dict, int]:
    spec = make_spec(args.seq, Fraction(args.r), Fraction(args.t),
                     rule="constant" if args.constant else "explicit")
    report = check_nice(spec, args.prefix, mode=args.mode, cap=args.lattice_cap)
    out = report.to_json()
    if args.format == "text":
        out["table"] = report.format_table()
    return out, EXIT_OK if report.overall else EXIT_REFUTED


def _cmd_growth_verify(args) -> tuple[dict, int]:
    seq = parse_sequence_spec(args.seq)
    result = verify_bounds_exact(
        seq, args.nmax, lattice_cap=args.lattice_cap, order_cap=args.cap,
        degree_cap=args.degree_cap, fixed_level=args.fixed_level)
    out = result.to_json()
    if args.eq3:
        stab = []
        for i in range(2, len(seq) + 1):
            try:
                mu_i = minimal_index(subgroup_lattice(seq[i - 1], args.lattice_cap))
                for n in range(1, mu_i):
                    rep = verify_base_containment(
                        seq, i, n, lattice_cap=args.lattice_cap,
                        order_cap=args.cap, degree_cap=args.degree_cap)
                    stab.append(rep.to_json())
            except CapExceededError:
                break
        out["stabilization"] = stab
        if any(not r["ok"] for r in stab):
            return out, EXIT_REFUTED
    return out, EXIT_OK if result.all_hold else EXIT_REFUTED


def _parse_planner_constants(raw: str) -> PlannerConstants:
    parts = [int(tok) for tok in raw.split(",") if tok.strip()]
    if len(parts) == 2:
        return PlannerConstants(floor_const=parts[0], multiplier=parts[1])
    if len(parts) == 3:
        return PlannerConstants(floor_const=parts[0], multiplier=parts[1],
                                threshold_const=parts[2])
    raise SpecError(f"--constants needs 2 or 3 integers, got {raw!r}")


def _cmd_plan(args) -> tuple[dict, int]:
    if args.constants is not None:
        consts = _parse_planner_constants(args.constants)
    elif args.toy:
        consts = TOY_CONSTANTS
    else:
        consts = PlannerConstants()
    out: dict = {"planner_constants": consts.to_json(), "seed": args.seed}
    if args.rule == "var2":
        if args.h is None:
            raise SpecError("plan var2 needs --h")
        plan = plan_variation2(args.h, args.kmax, bit_cap=args.bitcap,
                               seed=args.seed)
        out["plan"] = plan.to_json()
        ok = all(c.equivalent for c in plan.chain_checks)
        return out, EXIT_OK if ok else EXIT_REFUTED

    f = parse_growth_fn(args.f)
    growing = check_gently_growing(f)
    out["gently_growing"] = growing.to_json()
    if args.rule == "thmA" and growing.verdict == "refuted":
        return out, EXIT_REFUTED
    if args.rule == "thmA":
        certs = plan_main(f, consts, b=Fraction(args.B), c=Fraction(args.C),
                              k_max=args.kmax, bit_cap=args.bitcap,
                              seed=args.seed)
        exact = [c for c in certs if c.kind == "exact" and c.mhat_prev is not None
                 and c.mhat_prev.is_exact]
        chains = [
            verify_main_chains(c.prime, c.mhat_prev, b=Fraction(args.B),
                                   f=f).to_json()
            for c in exact
        ]
        out["certificates"] = [c.to_json() for c in certs]
        out["chains"] = chains
        return out, EXIT_OK
    if args.rule == "var1":
        certs = plan_variation1(f, args.kmax, consts, bit_cap=args.bitcap,
                                seed=args.seed)
        out["certificates"] = [c.to_json() for c in certs]
        return out, EXIT_OK
    raise SpecError(f"unknown plan rule {args.rule!r}")


# ---------------------------------------------------------------------------


def _build_parser(order_cap: int, bit_cap: int) -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="wpalab",
        description="subgroup growth laboratory for product-action wreath towers")
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--format", choices=("json", "text", "csv"),
                        default="json")
    sub = parser.add_subparsers(dest="command", required=True,
                                parser_class=lambda **kw: argparse.ArgumentParser(
                                    parents=[common], **kw))

    p = sub.add_parser("group", help="parse and materialize a group spec")
    p.add_argument("--spec", required=True)
    p.add_argument("--cap", type=int, default=order_cap)

    p = sub.add_parser("wreath", help="wreath products and iterated towers")
    p.add_argument("--seq", required=True)
    p.add_argument("--kind", choices=("tower", "product", "imprimitive"),
                   default="tower")
    p.add_argument("--level", type=int, default=None)
    p.add_argument("--cap", type=int, default=order_cap)
    p.add_argument("--degree-cap", dest="degree_cap", type=int,
                   default=DEFAULT_DEGREE_CAP)
    p.add_argument("--project", dest="do_project", action="store_true")

    p = sub.add_parser("count", help="subgroup lattice and s_n tables")
    p.add_argument("--spec", required=True)
    p.add_argument("--n", type=int, default=None)
    p.add_argument("--cap", type=int, default=order_cap)
    p.add_argument("--lattice-cap", dest="lattice_cap", type=int,
                   default=DEFAULT_LATTICE_CAP)
    p.add_argument("--full", action="store_true",
                   help="include mu, rank and elementary abelian data")

    p = sub.add_parser("tower", help="iterated exponential bounds")
    p.add_argument("--a", required=True, help="comma-separated entries >= 2")
    p.add_argument("--nmax", type=int, default=None)
    p.add_argument("--c", default=None, help="also report M(C)")

    p = sub.add_parser("nice-check", help="niceness axioms N.1-N.5")
    p.add_argument("--seq", required=True)
    p.add_argument("--r", default="2")
    p.add_argument("--t", default="3")
    p.add_argument("--mode", choices=("exact", "facts"), default="exact")
    p.add_argument("--prefix", type=int, default=None)
    p.add_argument("--constant", action="store_true",
                   help="entries declare an infinite constant repetition")
    p.add_argument("--lattice-cap", dest="lattice_cap", type=int,
                   default=DEFAULT_LATTICE_CAP)

    p = sub.add_parser("growth-verify", help="exact growth-bound checks")
    p.add_argument("--seq", required=True)
    p.add_argument("--nmax", type=int, required=True)
    p.add_argument("--fixed-level", dest="fixed_level", type=int, default=None)
    p.add_argument("--eq3", action="store_true",
                   help="also check base-subgroup stabilization")
    p.add_argument("--cap", type=int, default=order_cap)
    p.add_argument("--lattice-cap", dest="lattice_cap", type=int,
                   default=DEFAULT_LATTICE_CAP)
    p.add_argument("--degree-cap", dest="degree_cap", type=int,
                   default=DEFAULT_DEGREE_CAP)

    p = sub.add_parser("plan", help="prime-sequence synthesis")
    p.add_argument("rule", choices=("thmA", "var1", "var2"))
    p.add_argument("--f", default="loglog2")
    p.add_argument("--toy", action="store_true")
    p.add_argument("--constants", default=None, metavar="FLOOR,MULT[,THRESH]",
                   help="custom planner constants (threshold derives as "
                        "2*MULT when omitted)")
    p.add_argument("--kmax", type=int, default=2)
    p.add_argument("--bitcap", type=int, default=bit_cap)
    p.add_argument("--B", default="1")
    p.add_argument("--C", default="1")
    p.add_argument("--h", type=int, default=None)
    p.add_argument("--seed", type=int, default=0)

    return parser


_HANDLERS = {
    "group": _cmd_group,
    "wreath": _cmd_wreath,
    "count": _cmd_count,
    "tower": _cmd_tower,
    "nice-check": _cmd_nice_check,
    "growth-verify": _cmd_growth_verify,
    "plan": _cmd_plan,
}


def _render_text(outputs: dict, indent: int = 0) -> str:
    pad = "  " * indent
    lines = []
    for key in sorted(outputs):
        val = outputs[key]
        if isinstance(val, dict):
            lines.append(f"{pad}{key}:")
            lines.append(_render_text(val, indent + 1))
        elif isinstance(val, list):
            lines.append(f"{pad}{key}: [{len(val)} entries]")
            for item in val[:40]:
                if isinstance(item, dict):
                    lines.append(_render_text(item, indent + 1))
                else:
                    lines.append(f"{pad}  {item}")
        else:
            lines.append(f"{pad}{key}: {val}")
    return "\n".join(lines)


def run(argv: list[str]) -> tuple[str, int]:
    """Execute a command line; returns (rendered report, exit code)."""
    order_cap = _env_int("WPA_MAX_ORDER", DEFAULT_ORDER_CAP)
    bit_cap = _env_int("WPA_BITCAP", DEFAULT_BIT_CAP)
    parser = _build_parser(order_cap, bit_cap)
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return "", EXIT_USAGE if exc.code else EXIT_OK

    report = {
        "tool": "wpalab",
        "version": __version__,
        "command": list(argv),
        "constants": {
            "order_cap": getattr(args, "cap", order_cap),
            "bit_cap": getattr(args, "bitcap", bit_cap),
            "lattice_cap": getattr(args, "lattice_cap", DEFAULT_LATTICE_CAP),
        },
        "seed": getattr(args, "seed", 0),
    }
    try:
        outputs, code = _HANDLERS[args.command](args)
    except SpecError as exc:
        report["error"] = str(exc)
        return json.dumps(report, sort_keys=True, indent=2), EXIT_USAGE
    except (CapExceededError, IndeterminateError) as exc:
        report["error"] = str(exc)
        return json.dumps(report, sort_keys=True, indent=2), EXIT_CAP
    except WpaError as exc:
        report["error"] = str(exc)
        return json.dumps(report, sort_keys=True, indent=2), EXIT_REFUTED

    report["outputs"] = outputs
    report["status"] = {EXIT_OK: "ok", EXIT_REFUTED: "refuted",
                        EXIT_CAP: "cap-exceeded"}.get(code, "error")
    if args.format == "csv" and "csv" in outputs:
        return outputs["csv"], code
    if args.format == "text":
        return _render_text(report), code
    return json.dumps(report, sort_keys=True, indent=2), code


def main(argv: list[str] | None = None) -> int:
    text, code = run(sys.argv[1:] if argv is None else argv)
    if text:
        print(text)
    return code


if __name__ == "__main__":
    sys.exit(main())
