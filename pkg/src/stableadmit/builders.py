"""Builders that turn admission instances into integer linear models.

Each builder emits one model family over binary assignment variables
x_{i}_{j} (applicant i admitted to college j) plus whatever auxiliary
variables its stability notion needs: cutoff limits t_{j}, filled
flags f_{j}, open flags o_{j}, and per-application witness or escape
variables. Constraint rows carry a family tag and the entities they
bind, so a violated row reads like college_feasible(c1).

Big-M constants stay at their defining sizes rather than being
tightened, keeping every row auditable against the stability
definition it encodes. All coefficients, bounds and right-hand sides
are integers.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

from .instance import Application, Instance
from .linmodel import LinearModel, ModelError, assignment_satisfies
from .solution import Solution

OBJECTIVES = ("none", "applicant_optimal", "applicant_pessimal")
SCORELIMIT_MODES = ("strict", "ties_min", "ties_full")
GROUP_POLICIES = ("enforce", "drop_with_lex_objective")


def _refuse(builder: str, why: str) -> None:
    raise ModelError(f"{builder}: {why}")


def _require(builder: str, inst: Instance, *, pairs: bool = False,
             sets: bool = False, lower: bool = False, ties: bool = False) -> None:
    """Refuse instance features the builder cannot encode."""
    if not pairs and inst.has_pairs:
        _refuse(builder, "paired applications present")
    if not sets and inst.common_quota_sets:
        _refuse(builder, "common quota sets present")
    if not lower and inst.has_lower_quotas:
        _refuse(builder, "lower quotas present")
    if not ties and inst.has_ties:
        _refuse(builder, "tied scores present")


def _xname(app: Application) -> str:
    if app.is_paired:
        j, k = app.target
        return f"x_{app.applicant}_{j}_{k}"
    return f"x_{app.applicant}_{app.target}"


def _entry_subject(inst: Instance, app: Application) -> str:
    aid = inst.applicants[app.applicant]
    if app.is_paired:
        j, k = app.target
        return f"{aid},{inst.colleges[j].id}+{inst.colleges[k].id}"
    return f"{aid},{inst.colleges[app.target].id}"


def _add_assignment(model: LinearModel, inst: Instance) -> None:
    for app in inst.applications:
        model.add_var(_xname(app), 0, 1, role="assign",
                      key=(app.applicant, app.target))


def _add_applicant_feasible(model: LinearModel, inst: Instance) -> None:
    for i, aid in enumerate(inst.applicants):
        coeffs = {_xname(app): 1 for app in inst.by_applicant[i]}
        model.add_constraint("applicant_feasible", aid, coeffs, "<=", 1)


def _intake_coeffs(inst: Instance, j: int) -> dict[str, int]:
    """Seats taken at college j; a paired admission takes one of them."""
    return {_xname(app): 1 for app in inst.applications if j in app.colleges()}


def _add_college_feasible(model: LinearModel, inst: Instance) -> None:
    for j, c in enumerate(inst.colleges):
        model.add_constraint("college_feasible", c.id,
                             _intake_coeffs(inst, j), "<=", c.upper)


def _add_pairwise_stable(model: LinearModel, inst: Instance, ties: bool) -> None:
    # blocked unless matched at least as well, or the college is filled by
    # strictly better scores (ties variant: at-least-as-good scores)
    tag = "stable_ties" if ties else "stable"
    for app in inst.applications:
        i, j = app.applicant, app.target
        u = inst.colleges[j].upper
        coeffs: dict[str, int] = {}
        for other in inst.by_applicant[i]:
            if other.rank <= app.rank:
                name = _xname(other)
                coeffs[name] = coeffs.get(name, 0) + u
        for h in inst.applicants_at[j]:
            sh = inst.score_of(h, j)
            if sh > app.score or (ties and sh >= app.score):
                name = f"x_{h}_{j}"
                coeffs[name] = coeffs.get(name, 0) + 1
        model.add_constraint(tag, _entry_subject(inst, app), coeffs, ">=", u)


def _add_limit_vars(model: LinearModel, inst: Instance) -> None:
    top = inst.max_score + 1
    for j in range(inst.m):
        model.add_var(f"t_{j}", 0, top, role="limit", key=j)


def _add_limit_link(model: LinearModel, inst: Instance, *,
                    open_relaxed: bool = False) -> None:
    """Tie cutoffs to the matching: admitted applicants meet the cutoff,
    rejected ones fail it or hold a better seat (or the college is closed
    when open flags are in play)."""
    top = inst.max_score + 1
    for app in inst.applications:
        model.add_constraint(
            "score_stable_college", _entry_subject(inst, app),
            {f"t_{app.target}": 1, _xname(app): top}, "<=", top + app.score)
    for app in inst.applications:
        i, j = app.applicant, app.target
        coeffs = {f"t_{j}": 1}
        for other in inst.by_applicant[i]:
            if other.rank <= app.rank:
                coeffs[_xname(other)] = top
        if open_relaxed:
            coeffs[f"o_{j}"] = -top
            model.add_constraint("open_score_stable_applicant",
                                 _entry_subject(inst, app), coeffs,
                                 ">=", app.score + 1 - top)
        else:
            model.add_constraint("score_stable_applicant",
                                 _entry_subject(inst, app), coeffs,
                                 ">=", app.score + 1)


def _add_filled_flags(model: LinearModel, inst: Instance) -> None:
    """Unfilled colleges carry a zero cutoff; only full ones may reject."""
    top = inst.max_score + 1
    for j in range(inst.m):
        model.add_var(f"f_{j}", 0, 1, role="filled", key=j)
    for j, c in enumerate(inst.colleges):
        coeffs = _intake_coeffs(inst, j)
        coeffs[f"f_{j}"] = -c.upper
        model.add_constraint("filled_flag", c.id, coeffs, ">=", 0)
    for j, c in enumerate(inst.colleges):
        model.add_constraint("unfilled_zero", c.id,
                             {f"t_{j}": 1, f"f_{j}": -top}, "<=", 0)


def _add_witness_closure(model: LinearModel, inst: Instance) -> None:
    """Replace the filled-flag closure for tied scores: any positive cutoff
    must be irreducible, witnessed by enough holders plus applicants who
    would move in if the cutoff dropped by one."""
    top = inst.max_score + 1
    for j in range(inst.m):
        model.add_var(f"yflag_{j}", 0, 1, role="positive", key=j)
    for app in inst.applications:
        model.add_var(f"d_{app.applicant}_{app.target}", 0, 1, role="desire",
                      key=(app.applicant, app.target))
    for j, c in enumerate(inst.colleges):
        model.add_constraint("positive_limit_flag", c.id,
                             {f"t_{j}": 1, f"yflag_{j}": -top}, "<=", 0)
    for app in inst.applications:
        i = app.applicant
        coeffs: dict[str, int] = {}
        for other in inst.by_applicant[i]:
            if other.rank >= app.rank:
                coeffs[f"d_{i}_{other.target}"] = 1
        coeffs[_xname(app)] = inst.m
        model.add_constraint("desire_rank_order", _entry_subject(inst, app),
                             coeffs, "<=", inst.m)
    for app in inst.applications:
        i, j = app.applicant, app.target
        model.add_constraint(
            "desire_score_margin", _entry_subject(inst, app),
            {f"t_{j}": 1, f"d_{i}_{j}": inst.max_score}, "<=",
            inst.max_score + app.score + 1)
    for j, c in enumerate(inst.colleges):
        coeffs = {}
        for i in inst.applicants_at[j]:
            coeffs[f"x_{i}_{j}"] = 1
            coeffs[f"d_{i}_{j}"] = 1
        coeffs[f"yflag_{j}"] = -(c.upper + 1)
        model.add_constraint("limit_irreducible", c.id, coeffs, ">=", 0)


def _add_open_vars(model: LinearModel, inst: Instance) -> None:
    for j in range(inst.m):
        model.add_var(f"o_{j}", 0, 1, role="open", key=j)


def _add_lower_feasible(model: LinearModel, inst: Instance) -> None:
    for j, c in enumerate(inst.colleges):
        coeffs = _intake_coeffs(inst, j)
        coeffs[f"o_{j}"] = -c.lower
        model.add_constraint("lower_feasible_lb", c.id, coeffs, ">=", 0)
    for j, c in enumerate(inst.colleges):
        coeffs = _intake_coeffs(inst, j)
        coeffs[f"o_{j}"] = -c.upper
        model.add_constraint("lower_feasible_ub", c.id, coeffs, "<=", 0)


def _add_group_rows(model: LinearModel, inst: Instance) -> None:
    """Members of a group open or close together; an open group meets its
    joint lower quota."""
    for gi, g in enumerate(inst.lower_quota_groups):
        model.add_var(f"ogrp_{gi}", 0, 1, role="group_open", key=g.id)
    for gi, g in enumerate(inst.lower_quota_groups):
        coeffs = {f"o_{j}": 1 for j in g.members}
        coeffs[f"ogrp_{gi}"] = -len(g.members)
        model.add_constraint("group_open_link", g.id, coeffs, "==", 0)
    for gi, g in enumerate(inst.lower_quota_groups):
        coeffs: dict[str, int] = {}
        for j in g.members:
            coeffs.update(_intake_coeffs(inst, j))
        coeffs[f"ogrp_{gi}"] = -g.lower
        model.add_constraint("group_lower_feasible", g.id, coeffs, ">=", 0)


def _add_lower_stable_open(model: LinearModel, inst: Instance) -> None:
    # pairwise stability, waived at closed colleges
    for app in inst.applications:
        i, j = app.applicant, app.target
        u = inst.colleges[j].upper
        coeffs: dict[str, int] = {}
        for other in inst.by_applicant[i]:
            if other.rank <= app.rank:
                name = _xname(other)
                coeffs[name] = coeffs.get(name, 0) + u
        for h in inst.applicants_at[j]:
            if inst.score_of(h, j) > app.score:
                name = f"x_{h}_{j}"
                coeffs[name] = coeffs.get(name, 0) + 1
        coeffs[f"o_{j}"] = -u
        model.add_constraint("lower_stable_open", _entry_subject(inst, app),
                             coeffs, ">=", 0)


def _add_lower_stable_closed(model: LinearModel, inst: Instance) -> None:
    # a closed college must leave fewer unsatisfied applicants than its
    # lower quota; applicants admitted strictly better do not count
    for j, c in enumerate(inst.colleges):
        applicants = inst.applicants_at[j]
        coeffs: dict[str, int] = {}
        for i in applicants:
            rank_here = min(a.rank for a in inst.by_applicant[i] if a.target == j)
            for other in inst.by_applicant[i]:
                if other.rank < rank_here:
                    name = _xname(other)
                    coeffs[name] = coeffs.get(name, 0) - 1
        coeffs[f"o_{j}"] = -(inst.n - c.lower + 1)
        model.add_constraint("lower_stable_closed", c.id, coeffs, "<=",
                             c.lower - 1 - len(applicants))


def build_classical(inst: Instance, ties: bool = False,
                    objective: str = "none") -> LinearModel:
    """Stable matchings over assignment variables alone.

    With ties=True the stability rows accept equal-score filling, which
    characterises weakly stable matchings. The optional objective
    scores matched applicants by rank: applicant_optimal minimises the
    total rank, applicant_pessimal maximises it.
    """
    if objective not in OBJECTIVES:
        _refuse("build_classical", f"unknown objective {objective!r}")
    _require("build_classical", inst, ties=ties)
    model = LinearModel(name="classical")
    _add_assignment(model, inst)
    _add_applicant_feasible(model, inst)
    _add_college_feasible(model, inst)
    _add_pairwise_stable(model, inst, ties=ties)
    if objective != "none":
        sense = "min" if objective == "applicant_optimal" else "max"
        model.add_objective(sense, rank_objective(inst, model), name="total_rank")
    return model


def build_scorelimits(inst: Instance, mode: str = "strict") -> LinearModel:
    """Stable outcomes in cutoff coordinates.

    strict: filled-flag closure, sound only without tied scores; the
    feasible points are exactly the stable matchings paired with the
    cutoff vectors announcing them. ties_min: tied scores allowed,
    closure by minimising the cutoff total, the optimum is the
    applicant-optimal cutoff vector. ties_full: closure by witness
    constraints instead of an objective, so every feasible point is a
    stable cutoff vector and the whole set can be enumerated.
    """
    if mode not in SCORELIMIT_MODES:
        _refuse("build_scorelimits", f"unknown mode {mode!r}")
    _require("build_scorelimits", inst, ties=(mode != "strict"))
    model = LinearModel(name=f"scorelimits_{mode}")
    _add_assignment(model, inst)
    _add_limit_vars(model, inst)
    _add_applicant_feasible(model, inst)
    _add_college_feasible(model, inst)
    _add_limit_link(model, inst)
    if mode == "strict":
        _add_filled_flags(model, inst)
    else:
        _add_witness_closure(model, inst)
        if mode == "ties_min":
            model.add_objective("min", {f"t_{j}": 1 for j in range(inst.m)},
                                name="total_limits")
    return model


def build_lower(inst: Instance, with_groups: bool = False) -> LinearModel:
    """Stable matchings where colleges may close instead of running
    under their lower quota.

    Plain form: closed colleges must not leave a blocking group of
    unsatisfied applicants the size of their lower quota. Group form
    (with_groups=True): colleges in a declared group open and close
    together against a joint lower quota, and the per-college blocking
    group row is dropped since it would pin every quota-free member
    open.
    """
    _require("build_lower", inst, lower=True)
    if with_groups and not inst.lower_quota_groups:
        _refuse("build_lower", "with_groups=True but no groups are declared")
    if not with_groups and inst.lower_quota_groups:
        _refuse("build_lower", "instance declares lower-quota groups; "
                               "pass with_groups=True")
    model = LinearModel(name="lower_groups" if with_groups else "lower")
    _add_assignment(model, inst)
    _add_open_vars(model, inst)
    _add_applicant_feasible(model, inst)
    _add_lower_feasible(model, inst)
    if with_groups:
        _add_group_rows(model, inst)
    _add_lower_stable_open(model, inst)
    if not with_groups:
        _add_lower_stable_closed(model, inst)
    return model


@dataclass(frozen=True)
class _SeatPool:
    """One seat pool with a cutoff: a college's own pool or a declared
    set of colleges sharing seats."""
    cap_tag: str              # college_feasible | common_feasible
    label: str                # constraint subject
    suffix: str               # escape-variable suffix
    limit: str                # cutoff variable name
    filled: str               # filled-flag variable name
    limit_role: str           # limit | set_limit
    filled_role: str          # filled | set_filled
    key: object
    upper: int
    intake: tuple[str, ...]   # assignment variables the pool counts


def _emit_common_rows(model: LinearModel, inst: Instance,
                      pools: list[_SeatPool],
                      containing: Callable[[Application], list[tuple[int, int]]],
                      *, open_relaxed: bool = False, with_flags: bool = True,
                      cap_singletons: bool = True) -> None:
    """Shared-pool cutoff machinery.

    containing maps an application to the (pool index, score) pairs of
    every pool that could reject it. A rejected application must fail
    the cutoff of at least one such pool; per-pool escape variables let
    it ignore the others.
    """
    top = inst.max_score + 1
    for pool in pools:
        model.add_var(pool.limit, 0, top, role=pool.limit_role, key=pool.key)
    if with_flags:
        for pool in pools:
            model.add_var(pool.filled, 0, 1, role=pool.filled_role, key=pool.key)
    used: dict[tuple[int, int], str] = {}
    for app in inst.applications:
        for si, _score in containing(app):
            used.setdefault((app.applicant, si),
                            f"esc_{app.applicant}_{pools[si].suffix}")
    for (i, si), name in sorted(used.items()):
        model.add_var(name, 0, 1, role="escape", key=(i, pools[si].label))
    for pool in pools:
        if pool.cap_tag == "college_feasible" and not cap_singletons:
            continue
        model.add_constraint(pool.cap_tag, pool.label,
                             {x: 1 for x in pool.intake}, "<=", pool.upper)
    for app in inst.applications:
        for si, score in containing(app):
            pool = pools[si]
            model.add_constraint(
                "common_score_college",
                f"{_entry_subject(inst, app)}@{pool.label}",
                {pool.limit: 1, _xname(app): top}, "<=", top + score)
    tag = "common_open_score_applicant" if open_relaxed else "common_score_applicant"
    for app in inst.applications:
        i = app.applicant
        better = {_xname(o): top for o in inst.by_applicant[i]
                  if o.rank <= app.rank}
        for si, score in containing(app):
            pool = pools[si]
            coeffs = {pool.limit: 1, **better, used[(i, si)]: top}
            rhs = score + 1
            if open_relaxed:
                coeffs[f"o_{app.target}"] = -top
                rhs -= top
            model.add_constraint(tag, f"{_entry_subject(inst, app)}@{pool.label}",
                                 coeffs, ">=", rhs)
    for app in inst.applications:
        memberships = containing(app)
        coeffs = {used[(app.applicant, si)]: 1 for si, _ in memberships}
        model.add_constraint("common_escape_budget", _entry_subject(inst, app),
                             coeffs, "<=", len(memberships) - 1)
    if with_flags:
        for pool in pools:
            coeffs = {x: 1 for x in pool.intake}
            coeffs[pool.filled] = -pool.upper
            model.add_constraint("common_filled_flag", pool.label, coeffs, ">=", 0)
        for pool in pools:
            model.add_constraint("common_unfilled_zero", pool.label,
                                 {pool.limit: 1, pool.filled: -top}, "<=", 0)


def _common_pools(inst: Instance) -> tuple[
        list[_SeatPool], Callable[[Application], list[tuple[int, int]]]]:
    pools = [
        _SeatPool("college_feasible", c.id, f"c{j}", f"t_{j}", f"f_{j}",
                 "limit", "filled", j, c.upper,
                 tuple(_xname(a) for a in inst.applications if a.target == j))
        for j, c in enumerate(inst.colleges)
    ]
    for si, qs in enumerate(inst.common_quota_sets):
        members = set(qs.members)
        pools.append(_SeatPool(
            "common_feasible", qs.id, f"s{si}", f"tset_{si}", f"fset_{si}",
            "set_limit", "set_filled", qs.id, qs.upper,
            tuple(_xname(a) for a in inst.applications if a.target in members)))
    pools_of: list[list[int]] = [[j] for j in range(inst.m)]
    for si, qs in enumerate(inst.common_quota_sets):
        for j in qs.members:
            pools_of[j].append(inst.m + si)

    def containing(app: Application) -> list[tuple[int, int]]:
        return [(si, app.score) for si in pools_of[app.target]]

    return pools, containing


def build_common(inst: Instance) -> LinearModel:
    """Stable matchings under shared upper quotas over sets of colleges.

    Every college keeps a pool of its own; each declared set adds a
    pool across its members with the joint quota. A rejection is
    justified by failing the cutoff of at least one pool containing the
    college.
    """
    _require("build_common", inst, sets=True)
    model = LinearModel(name="common")
    _add_assignment(model, inst)
    _add_applicant_feasible(model, inst)
    pools, containing = _common_pools(inst)
    _emit_common_rows(model, inst, pools, containing)
    return model


def build_paired(inst: Instance) -> LinearModel:
    """Stable outcomes when applications may target a pair of colleges,
    taking one seat at each or none at all. Both colleges of an
    admitted pair must be met at their cutoffs; a rejected pair must
    fail at least one of its two cutoffs, chosen by an escape variable.
    """
    _require("build_paired", inst, pairs=True)
    model = LinearModel(name="paired")
    _add_assignment(model, inst)
    _add_limit_vars(model, inst)
    for app in inst.applications:
        if app.is_paired:
            j, k = app.target
            model.add_var(f"esc_{app.applicant}_{j}_{k}", 0, 1, role="escape",
                          key=(app.applicant, app.target))
    _add_applicant_feasible(model, inst)
    _add_college_feasible(model, inst)
    top = inst.max_score + 1
    simple = [a for a in inst.applications if not a.is_paired]
    pairs = [a for a in inst.applications if a.is_paired]
    for app in simple:
        model.add_constraint(
            "score_stable_college", _entry_subject(inst, app),
            {f"t_{app.target}": 1, _xname(app): top}, "<=", top + app.score)
    for app in simple:
        coeffs = {f"t_{app.target}": 1}
        for other in inst.by_applicant[app.applicant]:
            if other.rank <= app.rank:
                coeffs[_xname(other)] = top
        model.add_constraint("score_stable_applicant", _entry_subject(inst, app),
                             coeffs, ">=", app.score + 1)
    for app in pairs:
        j, _k = app.target
        model.add_constraint(
            "pair_score_college_first", _entry_subject(inst, app),
            {f"t_{j}": 1, _xname(app): top}, "<=", top + app.score_at(j))
    for app in pairs:
        _j, k = app.target
        model.add_constraint(
            "pair_score_college_second", _entry_subject(inst, app),
            {f"t_{k}": 1, _xname(app): top}, "<=", top + app.score_at(k))
    for app in pairs:
        j, k = app.target
        esc = f"esc_{app.applicant}_{j}_{k}"
        better = {_xname(o): top for o in inst.by_applicant[app.applicant]
                  if o.rank <= app.rank}
        model.add_constraint(
            "pair_reject_first", _entry_subject(inst, app),
            {f"t_{j}": 1, **better, esc: top}, ">=", app.score_at(j) + 1)
    for app in pairs:
        j, k = app.target
        esc = f"esc_{app.applicant}_{j}_{k}"
        better = {_xname(o): top for o in inst.by_applicant[app.applicant]
                  if o.rank <= app.rank}
        model.add_constraint(
            "pair_reject_second", _entry_subject(inst, app),
            {f"t_{k}": 1, **better, esc: -top}, ">=", app.score_at(k) + 1 - top)
    _add_filled_flags(model, inst)
    return model


def _paired_reduction_pools(inst: Instance) -> tuple[
        list[_SeatPool], Callable[[Application], list[tuple[int, int]]]]:
    touched = sorted({j for a in inst.applications if a.is_paired
                      for j in a.colleges()})
    pools = [
        _SeatPool("college_feasible", c.id, f"c{j}", f"t_{j}", f"f_{j}",
                 "limit", "filled", j, c.upper,
                 tuple(_xname(a) for a in inst.applications
                       if not a.is_paired and a.target == j))
        for j, c in enumerate(inst.colleges)
    ]
    union_index: dict[int, int] = {}
    for j in touched:
        label = f"all({inst.colleges[j].id})"
        union_index[j] = len(pools)
        pools.append(_SeatPool(
            "common_feasible", label, f"u{j}", f"tuni_{j}", f"funi_{j}",
            "set_limit", "set_filled", label, inst.colleges[j].upper,
            tuple(_xname(a) for a in inst.applications if j in a.colleges())))

    def containing(app: Application) -> list[tuple[int, int]]:
        if app.is_paired:
            j, k = app.target
            return [(union_index[j], app.score_at(j)),
                    (union_index[k], app.score_at(k))]
        out = [(app.target, app.score)]
        if app.target in union_index:
            out.append((union_index[app.target], app.score))
        return out

    return pools, containing


def build_paired_via_common(inst: Instance) -> LinearModel:
    """Paired applications recast as shared seat pools.

    A pair behaves like one artificial college sitting inside the pools
    of both real colleges. Each real college touched by a pair gets a
    pool over everything that takes its seats, capped and flagged at
    the college's own quota; the college's private pool over simple
    applications stays as a harmless valve. The feasible assignments
    project onto the same matchings as build_paired.
    """
    _require("build_paired_via_common", inst, pairs=True)
    model = LinearModel(name="paired_via_common")
    _add_assignment(model, inst)
    _add_applicant_feasible(model, inst)
    pools, containing = _paired_reduction_pools(inst)
    _emit_common_rows(model, inst, pools, containing)
    return model


def build_combined(inst: Instance, *, ties: bool = False, lower: bool = False,
                   common: bool = False,
                   group_stability: str = "enforce") -> LinearModel:
    """One model covering any coherent mix of tied scores, lower quotas
    and shared upper quotas.

    The feature flags select the constraint families; every feature the
    instance exhibits must be enabled. group_stability picks the
    closure policy: enforce keeps blocking-group rows and witness
    closure as hard constraints, drop_with_lex_objective removes the
    blocking-group rows and instead maximises the number of admitted
    applicants, then minimises the cutoff total. Lower plus shared
    quotas cannot both be enforced, so that mix requires the lex
    policy.
    """
    if group_stability not in GROUP_POLICIES:
        _refuse("build_combined", f"unknown policy {group_stability!r}")
    if inst.has_pairs:
        _refuse("build_combined", "paired applications present; use build_paired")
    if inst.has_ties and not ties:
        _refuse("build_combined", "tied scores present; enable ties")
    if inst.has_lower_quotas and not lower:
        _refuse("build_combined", "lower quotas present; enable lower")
    if inst.common_quota_sets and not common:
        _refuse("build_combined", "common quota sets present; enable common")
    if lower and common and group_stability == "enforce":
        _refuse("build_combined", "incoherent policy: lower and common quotas "
                "together require drop_with_lex_objective")
    model = LinearModel(name="combined")
    _add_assignment(model, inst)
    if lower:
        _add_open_vars(model, inst)
    _add_applicant_feasible(model, inst)
    if lower:
        _add_lower_feasible(model, inst)
        if inst.lower_quota_groups:
            _add_group_rows(model, inst)
    if ties or common:
        if not lower and not common:
            _add_college_feasible(model, inst)
        if common:
            pools, containing = _common_pools(inst)
            _emit_common_rows(model, inst, pools, containing,
                              open_relaxed=lower, with_flags=not ties,
                              cap_singletons=not lower)
        else:
            _add_limit_vars(model, inst)
            _add_limit_link(model, inst, open_relaxed=lower)
            if group_stability == "enforce":
                _add_witness_closure(model, inst)
    elif lower:
        _add_lower_stable_open(model, inst)
    else:
        _add_college_feasible(model, inst)
        _add_pairwise_stable(model, inst, ties=False)
    if lower and group_stability == "enforce" and not inst.lower_quota_groups:
        _add_lower_stable_closed(model, inst)
    limit_vars = [v.name for v in model.variables.values()
                  if v.role in ("limit", "set_limit")]
    if group_stability == "drop_with_lex_objective":
        model.add_objective("max", {v.name: 1 for v in model.vars_by_role("assign")},
                            name="matched")
        model.add_objective("min", {name: 1 for name in limit_vars},
                            name="total_limits")
    elif ties:
        model.add_objective("min", {name: 1 for name in limit_vars},
                            name="total_limits")
    return model


def rank_objective(inst: Instance, model: LinearModel) -> dict[str, int]:
    """Objective coefficients scoring each admission by its rank."""
    coeffs = {}
    for app in inst.applications:
        name = _xname(app)
        if name in model.variables:
            coeffs[name] = app.rank
    return coeffs


def extract_solution(model: LinearModel, assignment: dict[str, int]) -> Solution:
    """Read a satisfying assignment back into a Solution via variable
    roles. Raises ModelError naming the first broken row otherwise."""
    violated = assignment_satisfies(model, assignment)
    if violated:
        raise ModelError(f"constraint violated: {violated[0]}")
    matching: dict[int, object] = {}
    score_limits: dict[int, int] = {}
    set_limits: dict[str, int] = {}
    open_colleges: dict[int, bool] = {}
    open_groups: dict[str, bool] = {}
    aux: dict[str, int] = {}
    for var in model.variables.values():
        value = assignment[var.name]
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
        else:
            aux[var.name] = value
    return Solution(matching=matching, score_limits=score_limits,
                    set_limits=set_limits, open_colleges=open_colleges,
                    open_groups=open_groups, aux=aux)
