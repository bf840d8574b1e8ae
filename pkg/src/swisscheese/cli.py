"""Command line: build, verify, classify, measure, render.

Exit codes: 0 success, 1 certificate or verification failure, 2 usage or
input error.
"""

from __future__ import annotations

import argparse
import json
import logging
import os
import sys
from fractions import Fraction
from pathlib import Path

from . import persistence
from .calculus import PreconditionError, certify_poles, verify_derivative_bound
from .cheese import CapacityError, CertificateError, build_cheese, certify
from .geometry import DomainError, Q, QPoint, q_str
from .measures import cheese_evidence, control_disc_algebra
from .render import render_svg
from .slits import (
    X0,
    SlitError,
    build_chain,
    check_isolated_point_lemma,
    classify,
    figure_block,
    propagation_from_chain,
    system_from_rule,
)
from .targets import (
    CantorProduct,
    InvalidSchedule,
    SlitChainSet,
    build_svc,
    default_segment,
    svc_limit_length,
)

log = logging.getLogger("swisscheese")

OK, FAIL, USAGE = 0, 1, 2


class UsageError(Exception):
    pass


def workers() -> int:
    try:
        return max(1, int(os.environ.get("CHEESE_THREADS", "1")))
    except ValueError:
        raise UsageError("CHEESE_THREADS must be an integer") from None


def _frac(s: str) -> Fraction:
    try:
        return Q(s)
    except (ValueError, ZeroDivisionError, TypeError):
        raise argparse.ArgumentTypeError(f"not a rational: {s!r}") from None


def _point(s: str) -> QPoint:
    try:
        return QPoint.parse(s)
    except (ValueError, ZeroDivisionError, TypeError):
        raise argparse.ArgumentTypeError(f"not a point 'p/q,p/q': {s!r}") from None


def default_slit_chain(blocks: int = 4, side: str = "right"):
    """Figure-style chain scaled by 1/5 and centred so it sits inside the unit disc."""
    t = figure_block(side, scale=Fraction(1, 5))
    t = t.transformed(Fraction(1), QPoint(Fraction(-7, 20), Fraction(-1, 5)))
    return build_chain(t, blocks)


def make_target(args):
    if args.target == "segment":
        return default_segment(), None
    if args.target == "cantor":
        svc = build_svc((Fraction(-1, 2), Fraction(1, 2)), [args.svc_first], args.stage, tail_ratio=args.svc_ratio)
        if svc_limit_length(svc).zero_length:
            print("warning: the Cantor schedule has zero limit length; the construction is valid "
                  "but the fat-Cantor hypotheses are not met", file=sys.stderr)
        return CantorProduct(svc), args.stage
    chain = default_slit_chain(args.blocks, args.side)
    return SlitChainSet(chain), None


# --------------------------------------------------------------------------
# commands


def cmd_build(args) -> int:
    try:
        target, stage = make_target(args)
    except (InvalidSchedule, SlitError) as exc:
        raise UsageError(str(exc)) from None
    try:
        cheese = build_cheese(target, args.discs, kmax=args.kmax, stage=stage, m_count=args.m_count,
                              seed=args.seed, strategy="jitter" if args.seed is not None else "ring",
                              workers=workers())
    except CertificateError as exc:
        print(f"certificate failed: {exc.certificate.name}: {exc.certificate.detail}", file=sys.stderr)
        return FAIL
    except CapacityError as exc:
        print(f"capacity: {exc}", file=sys.stderr)
        return FAIL
    ws = persistence.WorkspaceFile(target=target, cheese=cheese)
    ws.meta = {"target": args.target, "discs": args.discs, "kmax": args.kmax, "stage": stage,
               "m_count": args.m_count, "seed": args.seed}
    if isinstance(target, SlitChainSet):
        ws.chains["target"] = target.chain
        side = args.side
        ws.systems["target"] = propagation_from_chain(target.chain, side)
    persistence.write(ws, args.out)
    print(f"wrote {args.out}: {len(cheese.groups)} groups, {len(cheese.deleted_discs())} deleted discs, "
          f"{len(cheese.certificates)} certificates")
    return OK


def _load(path):
    try:
        return persistence.read(path)
    except FileNotFoundError:
        raise UsageError(f"no such workspace: {path}") from None
    except (persistence.SchemaError, KeyError, ValueError) as exc:
        raise UsageError(f"bad workspace {path}: {exc}") from None


def verify_workspace(ws, kmax=None, samples: int = 8) -> list[str]:
    """Re-run every check; returns the names of failed checks."""
    failed = []
    lines = []
    if ws.cheese is not None:
        cheese = ws.cheese
        if kmax is not None:
            cheese.kmax = kmax
        certs = certify(cheese, workers())
        for c in certs:
            lines.append(f"{'ok  ' if c.passed else 'FAIL'} {c.name}" + (f"  ({c.detail})" if c.detail else ""))
            if not c.passed:
                failed.append(c.name)
        stored = {c.name for c in cheese.certificates}
        for c in certs:
            if c.passed and c.name not in stored and c.name.startswith("epsilon_bound") and kmax is None:
                lines.append(f"note {c.name} not recorded at build time")
        # Cauchy-type bound at target points for every stored map
        zs = cheese.target.samples(samples) if cheese.target is not None else []
        for name, (f, refs) in sorted(ws.maps.items()):
            try:
                certify_poles(f, cheese.deleted_discs())
            except ValueError as exc:
                failed.append(f"poles[{name}]")
                lines.append(f"FAIL poles[{name}] ({exc})")
                continue
            bad = 0
            for z in zs:
                try:
                    rep = verify_derivative_bound(cheese, f, z, range(0, min(cheese.kmax, 6) + 1))
                except PreconditionError:
                    continue
                bad += len(rep.violations)
            tag = f"derivative_bound[{name}]"
            lines.append(f"{'ok  ' if not bad else 'FAIL'} {tag}")
            if bad:
                failed.append(tag)
    for name, system in sorted(ws.systems.items()):
        rep = check_isolated_point_lemma(system)
        cls = classify(system)
        expect = {"rightward": ({X0}, set()), "leftward": (set(), {X0})}.get(system.rule)
        ok = rep.passed and (expect is None or (set(cls.r_points), set(cls.points_of_continuity)) == expect)
        lines.append(f"{'ok  ' if ok else 'FAIL'} chain[{name}]")
        if not ok:
            failed.append(f"chain[{name}]")
    if not lines:
        lines.append("nothing to verify (empty workspace)")
    for line in lines:
        print(line)
    return failed


def cmd_verify(args) -> int:
    ws = _load(args.workspace)
    failed = verify_workspace(ws, args.kmax)
    if failed:
        print("verification failed: " + ", ".join(failed), file=sys.stderr)
        return FAIL
    print("all checks passed")
    return OK


def _cell(c) -> str:
    return "x_0" if c == X0 else f"K_{c}"


def format_cells(cells) -> str:
    if not cells:
        return "none"
    order = sorted(cells, key=lambda c: (c == X0, c if c != X0 else 0))
    return "{" + ", ".join(_cell(c) for c in order) + "}"


def cmd_classify(args) -> int:
    if args.workspace:
        ws = _load(args.workspace)
        if not ws.systems:
            raise UsageError("workspace has no propagation systems")
        systems = sorted(ws.systems.items())
    else:
        rule = {"right": "rightward", "left": "leftward", "none": "none"}[args.direction]
        if args.direction == "none":
            system = system_from_rule(args.blocks, rule)
        else:
            system = propagation_from_chain(build_chain(figure_block(args.direction), args.blocks), args.direction)
        systems = [(rule, system)]
    for name, system in systems:
        cls = classify(system)
        if len(systems) > 1:
            print(f"[{name}]")
        print(f"R-points: {format_cells(cls.r_points)}; points of continuity: {format_cells(cls.points_of_continuity)}")
    return OK


def cmd_measure(args) -> int:
    if args.control is not None:
        if args.control < 3:
            raise UsageError("--control needs m >= 3")
        res = control_disc_algebra(args.control, args.mode)
        print(res.summary())
        return OK
    if not args.workspace:
        raise UsageError("measure needs --workspace or --control")
    ws = _load(args.workspace)
    if ws.cheese is None:
        raise UsageError("workspace has no cheese")
    x = args.point if args.point is not None else QPoint(0, 0)
    if ws.cheese.membership(x) == "out":
        raise UsageError(f"point {x} is outside X")
    if args.mode != "jensen":
        raise UsageError("the cheese harness runs in jensen mode")
    T = args.testfns
    series = sorted({0, T} | {2**j for j in range(0, T.bit_length()) if 2**j <= T})
    try:
        ev = cheese_evidence(ws.cheese, x, series, args.resolution, delta=args.atom_cap)
    except DomainError as exc:
        raise UsageError(str(exc)) from None
    print(ev.summary())
    if args.out:
        Path(args.out).write_text(json.dumps(ev.to_json(), sort_keys=True, indent=2) + "\n", encoding="utf-8")
    return OK


def cmd_render(args) -> int:
    geometry = None
    ws = _load(args.workspace) if args.workspace else None
    if args.what == "cheese":
        if ws is None or ws.cheese is None:
            raise UsageError("render cheese needs a workspace with a cheese")
        geometry = ws.cheese
    elif args.what == "chain":
        if ws is not None and ws.chains:
            geometry = ws.chains[sorted(ws.chains)[0]]
        elif ws is None:
            geometry = build_chain(figure_block(args.side), args.blocks)
    elif args.what == "block":
        geometry = figure_block(args.side)
    try:
        render_svg(geometry, args.out)
    except OSError as exc:
        print(f"cannot write {args.out}: {exc}", file=sys.stderr)
        return USAGE
    print(f"wrote {args.out}")
    return OK


# --------------------------------------------------------------------------
# parser


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="swisscheese", description=__doc__.splitlines()[0])
    p.add_argument("-v", "--verbose", action="store_true")
    sub = p.add_subparsers(dest="command", required=True)

    b = sub.add_parser("build", help="assemble a certified cheese and write a workspace")
    b.add_argument("--target", choices=["segment", "cantor", "slit-chain"], default="segment")
    b.add_argument("--discs", type=int, default=10)
    b.add_argument("--kmax", type=int, default=10)
    b.add_argument("--stage", type=int, default=6, help="Cantor stage used for distances")
    b.add_argument("--seed", type=int, default=None, help="jitter McKissick disc angles")
    b.add_argument("--m-count", type=int, default=4, help="McKissick discs per group")
    b.add_argument("--svc-first", type=_frac, default=Fraction(1, 4))
    b.add_argument("--svc-ratio", type=_frac, default=Fraction(1, 4))
    b.add_argument("--blocks", type=int, default=4)
    b.add_argument("--side", choices=["right", "left"], default="right")
    b.add_argument("--out", required=True)
    b.set_defaults(func=cmd_build)

    v = sub.add_parser("verify", help="re-run every certificate in a workspace")
    v.add_argument("workspace")
    v.add_argument("--kmax", type=int, default=None)
    v.set_defaults(func=cmd_verify)

    c = sub.add_parser("classify", help="R-points and points of continuity of a slit chain model")
    c.add_argument("--direction", choices=["right", "left", "none"], default="right")
    c.add_argument("--blocks", type=int, default=5)
    c.add_argument("--workspace", default=None)
    c.set_defaults(func=cmd_classify)

    m = sub.add_parser("measure", help="representing/Jensen measure search")
    m.add_argument("--workspace", default=None)
    m.add_argument("--control", type=int, default=None, metavar="M", help="disc-algebra control with M roots")
    m.add_argument("--point", type=_point, default=None)
    m.add_argument("--mode", choices=["representing", "jensen"], default="jensen")
    m.add_argument("--testfns", type=int, default=8)
    m.add_argument("--atom-cap", type=_frac, default=None)
    m.add_argument("--resolution", type=int, default=4)
    m.add_argument("--out", default=None)
    m.set_defaults(func=cmd_measure)

    r = sub.add_parser("render", help="write an SVG")
    r.add_argument("what", choices=["cheese", "chain", "block", "empty"])
    r.add_argument("--workspace", default=None)
    r.add_argument("--blocks", type=int, default=4)
    r.add_argument("--side", choices=["right", "left"], default="right")
    r.add_argument("--out", required=True)
    r.set_defaults(func=cmd_render)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return USAGE if exc.code else OK
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(message)s")
    try:
        for name in ("discs", "kmax", "blocks", "testfns", "resolution"):
            if getattr(args, name, 1) is not None and getattr(args, name, 1) < 0:
                raise UsageError(f"--{name} must be non-negative")
        if getattr(args, "atom_cap", None) is not None and not 0 <= args.atom_cap <= 1:
            raise UsageError("--atom-cap must lie in [0, 1]")
        return args.func(args)
    except UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return USAGE


if __name__ == "__main__":
    sys.exit(main())
