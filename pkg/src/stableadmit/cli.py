"""Command-line front end.

Subcommands: validate, generate, solve, check, compare, enumerate.
Reports are JSON documents with a fixed key order printed on standard
output; diagnostics go to standard error. Exit codes: 0 for a stable or
feasible outcome (check always exits 0 once it produces a verdict),
1 for usage or validation errors, 2 for proven infeasibility, and 3
when the solver and the stability oracle disagree about a result.

Every successful solve is re-audited through the stability oracle; the
verdict printed in a report always comes from the oracle, never from
the solver alone. Model mixes without an oracle variant get a
feasibility-only audit and the verdict "unverified".
"""

from __future__ import annotations

import argparse
import json
import sys
import time

from .algorithms import AlgorithmError, induced_matching, lower_quota_heuristic
from .builders import (build_classical, build_combined, build_common,
                       build_lower, build_paired, build_paired_via_common,
                       build_scorelimits, extract_solution, rank_objective)
from .instance import (Instance, InstanceError, instance_digest,
                       parse_instance, serialize_instance)
from .generator import ConfigError, GenConfig, generate
from .linmodel import LinearModel, ModelError
from .oracle import ShapeError, SizeGuardError, check
from .preprocess import apply_fixings, fix_iterate
from .solution import Solution, solution_from_document, solution_to_document
from .solver import SolverError, enumerate_feasible, solve, solve_lex

MODELS = ("classical", "scorelimits", "lower", "common", "paired", "combined")
OBJECTIVES = ("applicant-optimal", "applicant-pessimal",
              "min-score-limits", "lex-matched-then-limits")
CHECK_VARIANTS = {
    "classical": "classical",
    "weak-ties": "weak_ties",
    "scorelimits": "scorelimits_H",
    "lower": "lower",
    "common": "common",
    "paired": "paired",
}
COMBINED_FEATURES = ("ties", "lower", "common")


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message: str) -> None:  # exit 1, not argparse's 2
        raise UsageError(message)


def _build_parser() -> _Parser:
    parser = _Parser(prog="stableadmit",
                     description="Exact solvers for college admission "
                                 "problems with score limits.")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("validate", help="parse and validate an instance file")
    p.add_argument("instance")

    p = sub.add_parser("generate", help="emit a random instance")
    p.add_argument("--n", type=int, required=True, help="applicants")
    p.add_argument("--m", type=int, required=True, help="colleges")
    p.add_argument("--seed", type=int, required=True)
    p.add_argument("--list-min", type=int, default=1)
    p.add_argument("--list-max", type=int, default=3)
    p.add_argument("--max-score", type=int, default=10)
    p.add_argument("--tie-density", type=float, default=0.0)
    p.add_argument("--upper-min", type=int, default=1)
    p.add_argument("--upper-max", type=int, default=3)
    p.add_argument("--lower-min", type=int, default=0)
    p.add_argument("--lower-max", type=int, default=0)
    p.add_argument("--topology", choices=("none", "nested", "random"),
                   default="none")
    p.add_argument("--set-count", type=int, default=2)
    p.add_argument("--pair-prob", type=float, default=0.0)
    p.add_argument("--out", help="write to a file instead of stdout")

    for name in ("solve", "enumerate"):
        p = sub.add_parser(name, help=f"{name} a model over an instance")
        p.add_argument("instance")
        p.add_argument("--model", choices=MODELS, default="classical")
        p.add_argument("--mode", default=None,
                       help="classical: strict|ties; scorelimits: "
                            "strict|ties-min|ties-full; paired: "
                            "explicit|via-common; combined: comma-joined "
                            "features from ties,lower,common")
        p.add_argument("--node-cap", type=int, default=None)
        p.add_argument("--time-cap", type=float, default=None)
        if name == "solve":
            p.add_argument("--objective", choices=OBJECTIVES, default=None)
            p.add_argument("--preprocess", action="store_true",
                           help="fix must-open/must-close colleges first")
            p.add_argument("--group-policy",
                           choices=("enforce", "drop-with-lex-objective"),
                           default=None, help="combined models only")
        else:
            p.add_argument("--group-policy",
                           choices=("enforce", "drop-with-lex-objective"),
                           default=None, help="combined models only")
            p.add_argument("--cap", type=int, default=None,
                           help="stop after this many solutions")

    p = sub.add_parser("check", help="audit a solution file against the oracle")
    p.add_argument("--variant", choices=sorted(CHECK_VARIANTS), required=True)
    p.add_argument("instance")
    p.add_argument("solution")

    p = sub.add_parser("compare",
                       help="closing heuristic vs the exact lower-quota model")
    p.add_argument("instance")
    p.add_argument("--node-cap", type=int, default=None)
    p.add_argument("--time-cap", type=float, default=None)
    return parser


def _load_instance(path: str) -> Instance:
    try:
        with open(path, encoding="utf-8") as fh:
            text = fh.read()
    except OSError as exc:
        raise UsageError(f"cannot read {path}: {exc}") from None
    return parse_instance(text)


def _combined_policy(mode: str | None, group_policy: str | None
                     ) -> tuple[dict[str, bool], str]:
    flags = {f: False for f in COMBINED_FEATURES}
    if mode:
        for token in mode.split(","):
            token = token.strip()
            if token not in COMBINED_FEATURES:
                raise UsageError(f"unknown combined feature {token!r}")
            flags[token] = True
    policy = (group_policy or "enforce").replace("-", "_")
    return flags, policy


def _build(inst: Instance, model_name: str, mode: str | None,
           group_policy: str | None) -> tuple[LinearModel, str, str]:
    """Returns (model, variant label, audit plan)."""
    if group_policy is not None and model_name != "combined":
        raise UsageError("--group-policy applies to --model combined only")
    if model_name == "classical":
        mode = mode or "strict"
        if mode not in ("strict", "ties"):
            raise UsageError(f"classical has no mode {mode!r}")
        ties = mode == "ties"
        return (build_classical(inst, ties=ties),
                "classical" + ("+ties" if ties else ""),
                "weak_ties" if ties else "classical")
    if model_name == "scorelimits":
        mode = (mode or "strict").replace("-", "_")
        if mode not in ("strict", "ties_min", "ties_full"):
            raise UsageError(f"scorelimits has no mode {mode!r}")
        plan = "classical" if mode == "strict" else "scorelimits_H"
        return build_scorelimits(inst, mode=mode), f"scorelimits:{mode}", plan
    if model_name == "lower":
        if mode:
            raise UsageError("model lower takes no --mode")
        grouped = bool(inst.lower_quota_groups)
        return (build_lower(inst, with_groups=grouped),
                "lower+groups" if grouped else "lower", "lower")
    if model_name == "common":
        if mode:
            raise UsageError("model common takes no --mode")
        return build_common(inst), "common", "common"
    if model_name == "paired":
        mode = mode or "explicit"
        if mode == "explicit":
            return build_paired(inst), "paired", "paired"
        if mode == "via-common":
            return build_paired_via_common(inst), "paired:via-common", "paired"
        raise UsageError(f"paired has no mode {mode!r}")
    flags, policy = _combined_policy(mode, group_policy)
    model = build_combined(inst, ties=flags["ties"], lower=flags["lower"],
                           common=flags["common"], group_stability=policy)
    active = [f for f in COMBINED_FEATURES if flags[f]]
    label = f"combined[{','.join(active) or 'none'};{policy}]"
    if not active:
        plan = "classical"
    elif len(active) == 1 and policy == "enforce":
        plan = {"ties": "scorelimits_H", "lower": "lower",
                "common": "common"}[active[0]]
    else:
        plan = "unverified"
    return model, label, plan


def _apply_objective(inst: Instance, model: LinearModel, model_name: str,
                     mode: str | None, objective: str) -> None:
    mode = (mode or "").replace("-", "_")
    if model_name == "combined":
        raise UsageError("combined objectives are fixed by the policy; "
                         "--objective is not accepted")
    if model_name == "scorelimits" and mode == "ties_min":
        raise UsageError("scorelimits ties-min carries its own objective")
    if objective in ("applicant-optimal", "applicant-pessimal"):
        if model_name != "classical":
            raise UsageError(f"{objective} applies to --model classical only")
        sense = "min" if objective == "applicant-optimal" else "max"
        model.add_objective(sense, rank_objective(inst, model), name="total_rank")
        return
    limit_vars = [v.name for v in model.variables.values()
                  if v.role in ("limit", "set_limit")]
    if objective == "min-score-limits":
        if not limit_vars:
            raise UsageError("min-score-limits needs a score-limit model")
        model.add_objective("min", {n: 1 for n in limit_vars}, name="total_limits")
        return
    if model_name == "classical":
        raise UsageError("lex-matched-then-limits does not apply to classical")
    model.add_objective("max", {v.name: 1 for v in model.vars_by_role("assign")},
                        name="matched")
    model.add_objective("min", {n: 1 for n in limit_vars}, name="total_limits")


def _feasibility_audit(inst: Instance, sol: Solution) -> list[str]:
    """Quota bookkeeping for outcomes without an oracle variant."""
    problems = []
    intake = sol.intake(inst)
    for j, c in enumerate(inst.colleges):
        if intake[j] > c.upper:
            problems.append(f"college {c.id} over quota")
        if sol.open_colleges:
            if not sol.open_colleges.get(j, True):
                if intake[j] > 0:
                    problems.append(f"closed college {c.id} admits applicants")
            elif intake[j] < c.lower:
                problems.append(f"open college {c.id} under lower quota")
    for qs in inst.common_quota_sets:
        total = sum(intake[j] for j in qs.members)
        if total > qs.upper:
            problems.append(f"quota set {qs.id} over quota")
    for g in inst.lower_quota_groups:
        states = {sol.open_colleges.get(j, True) for j in g.members}
        if len(states) > 1:
            problems.append(f"group {g.id} members disagree on open state")
        elif states == {True}:
            if sum(intake[j] for j in g.members) < g.lower:
                problems.append(f"open group {g.id} under lower quota")
    return problems


def _projection_solution(model: LinearModel, proj: dict[str, int]) -> Solution:
    matching: dict[int, object] = {}
    score_limits: dict[int, int] = {}
    set_limits: dict[str, int] = {}
    open_colleges: dict[int, bool] = {}
    open_groups: dict[str, bool] = {}
    for name, value in proj.items():
        var = model.variables[name]
        if var.role == "assign":
            i, target = var.key
            matching.setdefault(i, None)
            if value == 1:
                matching[i] = target
        elif var.role == "limit":
            score_limits[var.key] = value
        elif var.role == "set_limit":
            set_limits[var.key] = value
        elif var.role == "open":
            open_colleges[var.key] = bool(value)
        elif var.role == "group_open":
            open_groups[var.key] = bool(value)
    return Solution(matching=matching, score_limits=score_limits,
                    set_limits=set_limits, open_colleges=open_colleges,
                    open_groups=open_groups)


def _emit(doc: dict) -> None:
    print(json.dumps(doc, indent=2))


def _solve_report(argv: list[str], inst: Instance, label: str,
                  status: str, sol: Solution | None,
                  objective_values: list[int], verdict: str | None,
                  violations: list, preprocess: dict | None,
                  elapsed: float, nodes: int) -> dict:
    return {
        "command": "stableadmit " + " ".join(argv),
        "instance_digest": instance_digest(inst),
        "variant": label,
        "status": status,
        "matching": sol.matching_by_ids(inst) if sol else None,
        "score_limits": ({inst.colleges[j].id: v
                          for j, v in sorted(sol.score_limits.items())}
                         if sol else None),
        "set_limits": dict(sorted(sol.set_limits.items())) if sol else None,
        "open": ({inst.colleges[j].id: v
                  for j, v in sorted(sol.open_colleges.items())}
                 if sol else None),
        "open_groups": dict(sorted(sol.open_groups.items())) if sol else None,
        "objective_values": objective_values,
        "verdict": verdict,
        "violations": [v.to_report() for v in violations],
        "preprocess": preprocess,
        "timing": {"seconds": round(elapsed, 6)},
        "solver": {"status": status, "nodes": nodes},
    }


def _cmd_validate(args, argv: list[str]) -> int:
    inst = _load_instance(args.instance)
    _emit({
        "command": "stableadmit " + " ".join(argv),
        "status": "valid",
        "instance_digest": instance_digest(inst),
        "applicants": inst.n,
        "colleges": inst.m,
        "applications": len(inst.applications),
        "features": {
            "ties": inst.has_ties,
            "lower_quotas": inst.has_lower_quotas,
            "groups": bool(inst.lower_quota_groups),
            "common_quota_sets": bool(inst.common_quota_sets),
            "paired_applications": inst.has_pairs,
        },
    })
    return 0


def _cmd_generate(args) -> int:
    cfg = GenConfig(n=args.n, m=args.m, seed=args.seed,
                    list_range=(args.list_min, args.list_max),
                    max_score=args.max_score, tie_density=args.tie_density,
                    upper_range=(args.upper_min, args.upper_max),
                    lower_range=(args.lower_min, args.lower_max),
                    topology=args.topology, set_count=args.set_count,
                    pair_prob=args.pair_prob)
    text = serialize_instance(generate(cfg))
    if args.out:
        with open(args.out, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    return 0


def _cmd_solve(args, argv: list[str]) -> int:
    inst = _load_instance(args.instance)
    model, label, plan = _build(inst, args.model, args.mode, args.group_policy)
    if args.objective:
        _apply_objective(inst, model, args.model, args.mode, args.objective)
    preprocess_report = None
    if args.preprocess:
        if not model.vars_by_role("open"):
            raise UsageError("--preprocess needs a model with open flags "
                             "(lower quotas)")
        if args.model == "combined" and (args.group_policy or "enforce") != "enforce":
            raise UsageError("--preprocess is only sound under the enforce policy")
        fixing = fix_iterate(inst)
        apply_fixings(model, fixing)
        preprocess_report = fixing.to_report(inst)
    started = time.monotonic()
    runner = solve_lex if len(model.objectives) > 1 else solve
    res = runner(model, node_cap=args.node_cap, time_cap=args.time_cap)
    elapsed = time.monotonic() - started
    if res.status == "infeasible":
        _emit(_solve_report(argv, inst, label, res.status, None,
                            [], None, [], preprocess_report, elapsed, res.nodes))
        return 2
    if res.status == "limit_reached":
        _emit(_solve_report(argv, inst, label, res.status, None,
                            [], None, [], preprocess_report, elapsed, res.nodes))
        print("error: search hit its cap before finding a solution",
              file=sys.stderr)
        return 1
    sol = extract_solution(model, res.assignment)
    if plan == "unverified":
        problems = _feasibility_audit(inst, sol)
        verdict, violations = "unverified", []
        disagree = bool(problems)
        detail = "; ".join(problems)
    else:
        report = check(inst, sol, plan)
        verdict, violations = report.verdict, report.violations
        disagree = verdict != "stable"
        detail = "; ".join(v.detail for v in violations)
    _emit(_solve_report(argv, inst, label, res.status, sol,
                        res.objective_values, verdict, violations,
                        preprocess_report, elapsed, res.nodes))
    if disagree:
        print(f"error: solver result fails the oracle audit: {detail}",
              file=sys.stderr)
        return 3
    return 0


def _cmd_enumerate(args, argv: list[str]) -> int:
    inst = _load_instance(args.instance)
    model, label, _plan = _build(inst, args.model, args.mode, args.group_policy)
    projection = [v.name for v in model.variables.values()
                  if v.role in ("assign", "limit", "set_limit",
                                "open", "group_open")]
    started = time.monotonic()
    res = enumerate_feasible(model, projection, cap=args.cap,
                             node_cap=args.node_cap, time_cap=args.time_cap)
    elapsed = time.monotonic() - started
    _emit({
        "command": "stableadmit " + " ".join(argv),
        "instance_digest": instance_digest(inst),
        "variant": label,
        "count": len(res.projections),
        "truncated": res.truncated,
        "solutions": [solution_to_document(inst, _projection_solution(model, p))
                      for p in res.projections],
        "timing": {"seconds": round(elapsed, 6)},
        "solver": {"nodes": res.nodes},
    })
    return 0


def _cmd_check(args, argv: list[str]) -> int:
    inst = _load_instance(args.instance)
    variant = CHECK_VARIANTS[args.variant]
    try:
        with open(args.solution, encoding="utf-8") as fh:
            doc = json.load(fh)
    except OSError as exc:
        raise UsageError(f"cannot read {args.solution}: {exc}") from None
    except json.JSONDecodeError as exc:
        raise UsageError(f"{args.solution}: invalid JSON: {exc}") from None
    if variant == "scorelimits_H" and isinstance(doc, dict) \
            and "matching" not in doc:
        sol = solution_from_document(inst, doc)
        if len(sol.score_limits) != inst.m:
            raise UsageError("deriving a matching needs a score limit "
                             "for every college")
        limits = [sol.score_limits[j] for j in range(inst.m)]
        sol.matching = induced_matching(inst, limits).assignment
    else:
        sol = solution_from_document(inst, doc)
    report = check(inst, sol, variant)
    _emit({
        "command": "stableadmit " + " ".join(argv),
        "instance_digest": instance_digest(inst),
        "variant": variant,
        "verdict": report.verdict,
        "violations": [v.to_report() for v in report.violations],
    })
    return 0


def _cmd_compare(args, argv: list[str]) -> int:
    inst = _load_instance(args.instance)
    matching, closed, events = lower_quota_heuristic(inst)
    heur_sol = Solution(matching=dict(matching.assignment),
                        open_colleges={j: j not in closed
                                       for j in range(inst.m)})
    heur_report = check(inst, heur_sol, "lower")
    model = build_lower(inst, with_groups=bool(inst.lower_quota_groups))
    started = time.monotonic()
    res = solve(model, node_cap=args.node_cap, time_cap=args.time_cap)
    elapsed = time.monotonic() - started
    ip: dict[str, object] = {"status": res.status}
    exit_code = 0
    if res.status == "infeasible":
        ip.update({"matching": None, "open": None, "verdict": None})
        exit_code = 2
    elif res.status == "limit_reached":
        ip.update({"matching": None, "open": None, "verdict": None})
        exit_code = 1
    else:
        sol = extract_solution(model, res.assignment)
        report = check(inst, sol, "lower")
        ip.update({
            "matching": sol.matching_by_ids(inst),
            "open": {inst.colleges[j].id: v
                     for j, v in sorted(sol.open_colleges.items())},
            "verdict": report.verdict,
        })
        if report.verdict != "stable":
            exit_code = 3
    _emit({
        "command": "stableadmit " + " ".join(argv),
        "instance_digest": instance_digest(inst),
        "heuristic": {
            "matching": heur_sol.matching_by_ids(inst),
            "closed": sorted(inst.colleges[j].id for j in closed),
            "events": [e.to_report(inst) for e in events],
            "verdict": heur_report.verdict,
        },
        "ip": ip,
        "timing": {"seconds": round(elapsed, 6)},
        "solver": {"status": res.status, "nodes": res.nodes},
    })
    if exit_code == 3:
        print("error: exact model produced an outcome the oracle rejects",
              file=sys.stderr)
    return exit_code


def main(argv: list[str] | None = None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
        if args.command == "validate":
            return _cmd_validate(args, argv)
        if args.command == "generate":
            return _cmd_generate(args)
        if args.command == "solve":
            return _cmd_solve(args, argv)
        if args.command == "enumerate":
            return _cmd_enumerate(args, argv)
        if args.command == "check":
            return _cmd_check(args, argv)
        return _cmd_compare(args, argv)
    except UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except (InstanceError, ConfigError, ModelError, AlgorithmError,
            ShapeError, SizeGuardError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except SolverError as exc:
        print(f"error: internal solver inconsistency: {exc}", file=sys.stderr)
        return 3


if __name__ == "__main__":
    sys.exit(main())
