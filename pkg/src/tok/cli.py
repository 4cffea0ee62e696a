"""Command-line front end: ``tok build|homology|spantree|verify``.

JSON goes to stdout (or ``--output``); a one-line summary goes to stderr.
Exit status: 0 success, 1 a check failed, 2 bad input, 3 internal invariant violation.
"""

from __future__ import annotations

import argparse
import json
import sys
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path

from .cube import InternalError, build_complex
from .diagram import DiagramError, MarkedDiagram, load_diagram
from .homology import ComplexError, from_twisted, homology_q, homology_z
from .spantree import Evaluation, InternalTreeError, SpanTreeError, adjacent_tree_pairs, build_tree_complex, tree_coefficient_check
from . import verify as V

EXIT_OK, EXIT_FAIL, EXIT_INPUT, EXIT_INTERNAL = 0, 1, 2, 3

ALL_CHECKS = ("d2", "faces", "split_join", "configuration", "slide", "r1", "mod2", "reduction", "trees")
DEFAULT_CHECKS = ("d2", "faces", "split_join", "configuration", "slide", "r1", "mod2")


class InputError(ValueError):
    pass


@dataclass
class RunConfig:
    command: str
    input: Path
    output: Path | None = None
    reduced: bool = False
    basepoint: int | None = None
    evaluation: str = "generic"
    checks: tuple[str, ...] = DEFAULT_CHECKS
    auto_mark: bool = False
    marks_at_basepoint: bool = False
    jobs: int = 1
    extra: dict = field(default_factory=dict)


def _diagram(cfg: RunConfig) -> MarkedDiagram:
    try:
        d = load_diagram(cfg.input)
    except OSError as exc:
        raise InputError(f"cannot read {cfg.input}: {exc.strerror}") from None
    if cfg.basepoint is not None:
        d = d.replace(basepoint=cfg.basepoint)
    if cfg.auto_mark:
        d = d.auto_marked()
    if cfg.marks_at_basepoint:
        d = d.marks_at_basepoint()
    return d


def _evaluation(cfg: RunConfig, d: MarkedDiagram) -> Evaluation:
    if cfg.evaluation == "generic":
        return Evaluation.default(d)
    return Evaluation.parse(cfg.evaluation)


def cmd_build(cfg: RunConfig, d: MarkedDiagram) -> tuple[dict, bool, str]:
    tc = build_complex(d, cfg.reduced)
    return tc.to_json(), True, f"built {'reduced ' if cfg.reduced else ''}complex: {len(tc.basis)} generators"


def cmd_homology(cfg: RunConfig, d: MarkedDiagram) -> tuple[dict, bool, str]:
    tc = build_complex(d, cfg.reduced)
    if not tc.d_v:
        h = homology_z(from_twisted(tc, include_v=False))
        out = {"ring": "Z", "reduced": cfg.reduced, **h.to_json()}
    else:
        ev = _evaluation(cfg, d)
        h = homology_q(from_twisted(tc, ev.for_diagram(d)))
        out = {"ring": "Q", "evaluation": ev.to_json(), "reduced": cfg.reduced, **h.to_json()}
    return out, True, f"homology over {out['ring']}: total rank {h.total_rank}"


def cmd_spantree(cfg: RunConfig, d: MarkedDiagram) -> tuple[dict, bool, str]:
    ev = _evaluation(cfg, d)
    tree = build_tree_complex(d, ev)
    out = tree.to_json()
    out["homology"] = tree.homology().to_json()
    try:
        out["tait_spanning_trees"] = d.tait_graph().spanning_tree_count()
    except DiagramError:
        out["tait_spanning_trees"] = None
    out["adjacent_pairs"] = [tree_coefficient_check(d, a, b, tree=tree).to_json() for a, b in adjacent_tree_pairs(tree)]
    return out, True, f"spanning-tree complex: {len(tree.generators)} generators"


def _run_check(name: str, d: MarkedDiagram) -> list[V.CheckResult]:
    label = "diagram"
    if name == "d2":
        out = [V.d2_check(build_complex(d), label)]
        if d.basepoint is not None:
            out.append(V.d2_check(build_complex(d, True), label + " reduced"))
        return out
    if name == "faces":
        return V.faces_check(d, label)
    if name == "split_join":
        return [V.split_join_check(d, label)]
    if name == "configuration":
        flipped = d.with_arrows([1 - c.arrow for c in d.crossings])
        out = V.config_lemma_scan(d, label) + V.config_lemma_scan(flipped, label + " arrows flipped")
        return out + V.sigma_identities(build_complex(d), label)
    if name == "slide":
        return V.slide_checks(d, label)
    if name == "r1":
        if d.basepoint is None:
            return [V.CheckResult("invariance", label, False, "R1 check needs a basepoint")]
        return V.r1_checks(d, label)
    if name == "mod2":
        out = [V.mod2_check(build_complex(d), label)]
        if d.basepoint is not None:
            out.append(V.mod2_check(build_complex(d, True), label + " reduced"))
        return out
    if name == "reduction":
        rep = V.reduction_to_odd_kh(d, Evaluation.default(d).values)
        return [V.CheckResult("reduction", label, rep.passed, rep.to_json())]
    if name == "trees":
        tree = build_tree_complex(d)
        full = homology_q(from_twisted(tree.reduced_complex, tree.evaluation.values))
        out = [
            V.CheckResult("tree_count", label, len(tree.generators) == d.tait_graph().spanning_tree_count()),
            V.CheckResult("tree_homology", label, tree.homology() == full),
        ]
        for a, b in adjacent_tree_pairs(tree):
            r = tree_coefficient_check(d, a, b, tree=tree)
            out.append(V.CheckResult("tree_coefficient", f"{label} {a:b}->{b:b}", r.passed, r.to_json()))
        return out
    raise InputError(f"unknown check {name!r}")


def cmd_verify(cfg: RunConfig, d: MarkedDiagram) -> tuple[dict, bool, str]:
    for name in cfg.checks:
        if name not in ALL_CHECKS:
            raise InputError(f"unknown check {name!r}; choose from {', '.join(ALL_CHECKS)}")
    if cfg.jobs > 1 and len(cfg.checks) > 1:
        with ProcessPoolExecutor(max_workers=cfg.jobs) as pool:
            groups = list(pool.map(_run_check, cfg.checks, [d] * len(cfg.checks)))
    else:
        groups = [_run_check(name, d) for name in cfg.checks]
    results = [r for g in groups for r in g]
    n_fail = sum(not r.passed for r in results)
    summary = {}
    for r in results:
        s = summary.setdefault(r.name, {"pass": 0, "fail": 0})
        s["pass" if r.passed else "fail"] += 1
    out = {"checks": [r.to_json() for r in results], "summary": summary, "failures": n_fail}
    return out, n_fail == 0, f"{len(results) - n_fail}/{len(results)} checks passed"


COMMANDS = {"build": cmd_build, "homology": cmd_homology, "spantree": cmd_spantree, "verify": cmd_verify}


def run(cfg: RunConfig) -> int:
    try:
        d = _diagram(cfg)
        payload, ok, msg = COMMANDS[cfg.command](cfg, d)
    except (DiagramError, SpanTreeError, V.SlideError, InputError, KeyError) as exc:
        print(f"tok {cfg.command}: input error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except (InternalError, InternalTreeError, ComplexError) as exc:
        print(f"tok {cfg.command}: internal invariant violated: {exc}", file=sys.stderr)
        return EXIT_INTERNAL
    text = json.dumps(payload, indent=2, sort_keys=True) + "\n"
    if cfg.output is not None:
        cfg.output.write_text(text)
    else:
        sys.stdout.write(text)
    print(f"tok {cfg.command}: {msg}", file=sys.stderr)
    return EXIT_OK if ok else EXIT_FAIL


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="tok", description="Twisted odd Khovanov complexes of marked diagrams.")
    sub = p.add_subparsers(dest="command", required=True)
    for name, help_ in (
        ("build", "assemble the twisted complex and print it as JSON"),
        ("homology", "delta-graded homology (over Z when d_v vanishes, else over Q after evaluation)"),
        ("spantree", "spanning-tree complex after cancelling the vertical differential"),
        ("verify", "run verification checks"),
    ):
        sp = sub.add_parser(name, help=help_)
        sp.add_argument("--input", required=True, type=Path, help="diagram JSON file")
        sp.add_argument("--output", type=Path, help="write JSON here instead of stdout")
        sp.add_argument("--reduced", action="store_true", help="use the reduced complex")
        sp.add_argument("--basepoint", type=int, help="override the basepoint edge")
        sp.add_argument("--eval", dest="evaluation", default="generic", help='"generic" or "x1=1,x2=2,..."')
        sp.add_argument("--checks", default=",".join(DEFAULT_CHECKS), help=f"comma list from {','.join(ALL_CHECKS)}")
        sp.add_argument("--auto-mark", action="store_true", help="put one mark on every edge")
        sp.add_argument("--marks-at-basepoint", action="store_true", help="move every mark to the basepoint edge")
        sp.add_argument("--jobs", type=int, default=1, help="worker processes for verify")
    return p


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    cfg = RunConfig(
        command=args.command,
        input=args.input,
        output=args.output,
        reduced=args.reduced,
        basepoint=args.basepoint,
        evaluation=args.evaluation,
        checks=tuple(c.strip() for c in args.checks.split(",") if c.strip()),
        auto_mark=args.auto_mark,
        marks_at_basepoint=args.marks_at_basepoint,
        jobs=max(1, args.jobs),
    )
    return run(cfg)


if __name__ == "__main__":
    sys.exit(main())
