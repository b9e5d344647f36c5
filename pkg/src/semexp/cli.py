"""Command-line front door.

Subcommands: expand, count, reduce, filters, verify <kind>.  Output is
plain ASCII, deterministic for identical inputs and flags.  Exit code 0
means no FAIL line was emitted, 1 means at least one FAIL line, 2 means
an input or usage error.
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

from . import actions, core, expansion, matrix_fell, rewriter
from .errors import SemexpError
from .report import Report


def _read(path: str) -> str:
    return Path(path).read_text()


def _load_semigroup(path: str, cap: int) -> core.InverseSemigroup:
    return core.load_cayley(_read(path), cap=cap)


def cmd_expand(args) -> list[str]:
    s = _load_semigroup(args.semigroup, args.validation_cap)
    exp = expansion.build_expansion(s, cap=args.cap)
    total, idem = expansion.predicted_count(s)
    enumerated = len(exp.elems)
    enum_idem = sum(1 for x in exp.elems if s.is_idempotent(x.anchor))
    lines = [
        f"|G|={s.n} idempotents={bin(s.idempotent_mask).count('1')}",
        f"enumerated={enumerated} predicted={total} "
        f"idempotents={enum_idem} predicted_idempotents={idem}",
    ]
    if enumerated != total or enum_idem != idem:
        lines.append("FAIL predicted-vs-enumerated")
    else:
        lines.append("PASS predicted-vs-enumerated")
    eu_g = core.is_e_unitary(s)
    eu_sg = core.is_e_unitary(exp.base)
    lines.append(f"e_unitary_G={str(eu_g).lower()} e_unitary_SG={str(eu_sg).lower()}")
    lines.append(
        "PASS e-unitary-transfer" if eu_g == eu_sg else "FAIL e-unitary-transfer"
    )
    if args.out:
        Path(args.out).write_text(core.dump_cayley(exp.base))
        Path(args.out + ".elems").write_text(expansion.sidecar_doc(exp))
        lines.append(f"wrote {args.out} and {args.out}.elems")
    return lines


def cmd_count(args) -> list[str]:
    s = _load_semigroup(args.semigroup, args.validation_cap)
    total, idem = expansion.predicted_count(s)
    return [f"predicted={total} predicted_idempotents={idem}"]


def cmd_reduce(args) -> list[str]:
    s = _load_semigroup(args.semigroup, args.validation_cap)
    word = rewriter.parse_word(args.word, s)
    lines = []
    if args.trace:
        result, trace = rewriter.rewrite_steps(s, word)
        if trace.steps:
            lines.extend(trace.format(s).splitlines())
    else:
        result = rewriter.reduce_to_normal_form(s, word)
    lines.append(result.render(s))
    return lines


def cmd_filters(args) -> list[str]:
    s = _load_semigroup(args.semigroup, args.validation_cap)
    filters = actions.enumerate_filters(s, cap=args.cap)
    lines = [s.format_set(f) for f in filters]
    lines.append(f"total={len(filters)}")
    return lines


def _parse_map_doc(text: str, s, h) -> tuple[int, ...]:
    """One line per source element: ``gname -> hname``."""
    pi = [None] * s.n
    for raw in text.splitlines():
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "->" not in line:
            raise SemexpError(f"missing '->' in map line {line!r}")
        gname, hname = (part.strip() for part in line.split("->", 1))
        if gname not in s.name_to_id:
            raise SemexpError(f"unknown source element {gname!r}")
        if hname not in h.name_to_id:
            raise SemexpError(f"unknown target element {hname!r}")
        g = s.name_to_id[gname]
        if pi[g] is not None:
            raise SemexpError(f"element {gname!r} mapped twice")
        pi[g] = h.name_to_id[hname]
    missing = [s.names[g] for g in range(s.n) if pi[g] is None]
    if missing:
        raise SemexpError(f"map missing elements: {', '.join(missing)}")
    return tuple(pi)


def cmd_verify(args) -> list[str]:
    s = _load_semigroup(args.semigroup, args.validation_cap)
    lines: list[str] = []

    if args.kind == "partial-hom":
        h = _load_semigroup(args.inputs[0], args.validation_cap)
        pi = _parse_map_doc(_read(args.inputs[1]), s, h)
        lines.extend(str(actions.is_partial_homomorphism(s, h, pi)).splitlines())
        lines.extend(str(actions.is_dual_prehomomorphism(s, h, pi)).splitlines())
    elif args.kind == "partial-action":
        act = actions.parse_action_doc(_read(args.inputs[0]), s)
        lines.extend(str(actions.is_partial_action(act)).splitlines())
    elif args.kind == "filters":
        rep = Report("filters")
        filters = actions.enumerate_filters(s, cap=args.cap)
        rep.check(
            all(actions.is_filter(s, f) for f in filters),
            "enumerated-sets-are-filters",
        )
        rep.check(
            all(actions.is_filter_by_conditions(s, f) for f in filters),
            "filter-conditions-equivalent",
        )
        if s.n <= 16:
            brute = tuple(
                m for m in range(1, 1 << s.n) if actions.is_filter(s, m)
            )
            rep.check(brute == filters, "matches-brute-force-enumeration")
        act = actions.canonical_partial_action(s, cap=args.cap)
        rep.check(actions.is_partial_action(act).ok, "canonical-action-axioms")
        rep.check(
            actions.separation_check(s, filter_cap=args.cap),
            "separation",
        )
        lines.extend(str(rep).splitlines())
    elif args.kind == "lift":
        act = actions.parse_action_doc(_read(args.inputs[0]), s)
        _, rep = actions.lift_action(s, act, cap=args.cap)
        lines.extend(str(rep).splitlines())
    elif args.kind == "fell":
        bundle = matrix_fell.parse_bundle_doc(_read(args.inputs[0]), s, tol=args.tol)
        rep = matrix_fell.check_concrete_fell_bundle(bundle)
        lines.extend(str(rep).splitlines())
        if rep.ok:
            exp, expanded = matrix_fell.expand_bundle(bundle, cap=args.cap)
            post = Report("expansion")
            post.check(True, "expanded-bundle-saturated")
            post.check(
                matrix_fell.check_span_refinement(bundle, exp, expanded),
                "span-refinement",
            )
            lines.extend(str(post).splitlines())
    elif args.kind == "twisted":
        bundle = matrix_fell.parse_bundle_doc(_read(args.inputs[0]), s, tol=args.tol)
        u = matrix_fell.parse_matrix_family_doc(_read(args.inputs[1]), s)
        lines.extend(str(matrix_fell.check_regularity(bundle, u)).splitlines())
        tpa = matrix_fell.twisted_from_regular(bundle, u)
        if args.perturb_omega:
            aname, bname, theta = args.perturb_omega.split(",")
            tpa = matrix_fell.perturb_omega(
                tpa, s.name_to_id[aname.strip()], s.name_to_id[bname.strip()], float(theta)
            )
        lines.extend(str(matrix_fell.check_twisted_partial_action(tpa)).splitlines())
    else:  # pragma: no cover - argparse restricts choices
        raise SemexpError(f"unknown verify kind {args.kind!r}")
    return lines


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="semexp",
        description="Prefix-expansion toolkit for finite inverse semigroups.",
    )
    parser.add_argument(
        "--validation-cap",
        type=int,
        default=4096,
        help="max table size accepted for exhaustive validation",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("expand", help="enumerate the expansion and print stats")
    p.add_argument("semigroup")
    p.add_argument("--cap", type=int, default=expansion.DEFAULT_EXPANSION_CAP)
    p.add_argument("--out", help="write the expansion table here (+ .elems sidecar)")
    p.set_defaults(func=cmd_expand)

    p = sub.add_parser("count", help="predicted expansion size, no enumeration")
    p.add_argument("semigroup")
    p.set_defaults(func=cmd_count)

    p = sub.add_parser("reduce", help="reduce a word to normal form")
    p.add_argument("semigroup")
    p.add_argument("word", help="e.g. '[s][t][t*]'")
    p.add_argument("--trace", action="store_true")
    p.set_defaults(func=cmd_reduce)

    p = sub.add_parser("filters", help="list all filters")
    p.add_argument("semigroup")
    p.add_argument("--cap", type=int, default=actions.DEFAULT_FILTER_CAP)
    p.set_defaults(func=cmd_filters)

    p = sub.add_parser("verify", help="run a verification suite")
    p.add_argument(
        "kind",
        choices=["partial-hom", "partial-action", "filters", "lift", "fell", "twisted"],
    )
    p.add_argument("semigroup")
    p.add_argument("inputs", nargs="*")
    p.add_argument("--cap", type=int, default=expansion.DEFAULT_EXPANSION_CAP)
    p.add_argument("--tol", type=float, default=matrix_fell.DEFAULT_TOL)
    p.add_argument(
        "--perturb-omega",
        help="'a,b,theta': multiply omega(a,b) by exp(i theta) before checking",
    )
    p.set_defaults(func=cmd_verify)
    return parser


_EXPECTED_INPUTS = {
    "partial-hom": 2,
    "partial-action": 1,
    "filters": 0,
    "lift": 1,
    "fell": 1,
    "twisted": 2,
}


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.command == "verify":
        expected = _EXPECTED_INPUTS[args.kind]
        if len(args.inputs) != expected:
            print(
                f"error: verify {args.kind} takes {expected} input file(s)",
                file=sys.stderr,
            )
            return 2
        if not 0 < args.tol <= 1e-3:
            print("error: --tol must lie in (0, 1e-3]", file=sys.stderr)
            return 2
    try:
        lines = args.func(args)
    except SemexpError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except FileNotFoundError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    out = "\n".join(lines)
    print(out)
    return 1 if any(ln.startswith("FAIL") for ln in lines) else 0


if __name__ == "__main__":
    raise SystemExit(main())
