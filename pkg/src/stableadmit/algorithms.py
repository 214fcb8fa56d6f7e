"""Combinatorial matching algorithms: deferred acceptance for strict
instances, the generalized score-limit procedure for instances with ties,
and the college-closing heuristic for lower quotas."""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field

from .instance import Instance
from .solution import Solution, empty_matching


class AlgorithmError(ValueError):
    """Instance outside the algorithm's supported fragment."""


@dataclass
class Matching:
    assignment: dict[int, int | None]  # applicant index -> college index or None

    def intake(self, inst: Instance) -> list[int]:
        counts = [0] * inst.m
        for j in self.assignment.values():
            if j is not None:
                counts[j] += 1
        return counts

    def rank_of(self, inst: Instance, applicant: int) -> int | None:
        j = self.assignment.get(applicant)
        if j is None:
            return None
        for app in inst.by_applicant[applicant]:
            if app.target == j:
                return app.rank
        raise ValueError("assignment target missing from the applicant's list")

    def to_solution(self, inst: Instance, **kwargs) -> Solution:
        matching = empty_matching(inst)
        matching.update(self.assignment)
        return Solution(matching=matching, **kwargs)


@dataclass
class ScoreLimits:
    limits: dict[int, int]  # college index -> cutoff in [0, max_score + 1]

    def by_ids(self, inst: Instance) -> dict[str, int]:
        return {inst.colleges[j].id: t for j, t in sorted(self.limits.items())}


@dataclass
class ClosureEvent:
    college: int
    admitted: int
    lower: int
    cutoffs: dict[int, int] = field(default_factory=dict)  # min admitted score per open college

    def to_report(self, inst: Instance) -> dict:
        return {
            "closed": inst.colleges[self.college].id,
            "admitted": self.admitted,
            "lower": self.lower,
            "cutoffs": {inst.colleges[j].id: s for j, s in sorted(self.cutoffs.items())},
        }


def _require_simple_strict(inst: Instance, who: str) -> None:
    if inst.has_pairs:
        raise AlgorithmError(f"{who}: paired applications present")
    if inst.common_quota_sets:
        raise AlgorithmError(f"{who}: common quota sets present")


def da(inst: Instance, side: str = "applicant", exclude: frozenset[int] = frozenset()) -> Matching:
    """Deferred acceptance on a strict instance. Lower quotas are ignored;
    colleges in exclude are treated as removed."""
    _require_simple_strict(inst, "da")
    if inst.has_ties:
        raise AlgorithmError("da: scores are tied at some college")
    if side == "applicant":
        return _da_applicant(inst, exclude)
    if side == "college":
        return _da_college(inst, exclude)
    raise AlgorithmError(f"da: unknown side {side!r}")


def _da_applicant(inst: Instance, exclude: frozenset[int]) -> Matching:
    pointer = [0] * inst.n
    held: dict[int, int | None] = {i: None for i in range(inst.n)}
    admitted: list[dict[int, int]] = [dict() for _ in range(inst.m)]  # college -> {applicant: score}
    queue = deque(i for i in range(inst.n) if inst.by_applicant[i])
    while queue:
        i = queue.popleft()
        apps = inst.by_applicant[i]
        while pointer[i] < len(apps):
            app = apps[pointer[i]]
            j = app.target
            if j in exclude:
                pointer[i] += 1
                continue
            seats = inst.colleges[j].upper
            if len(admitted[j]) < seats:
                admitted[j][i] = app.score
                held[i] = j
                break
            worst_i = min(admitted[j], key=admitted[j].get)
            if app.score > admitted[j][worst_i]:
                del admitted[j][worst_i]
                held[worst_i] = None
                pointer[worst_i] += 1
                queue.append(worst_i)
                admitted[j][i] = app.score
                held[i] = j
                break
            pointer[i] += 1
    return Matching(assignment=held)


def _da_college(inst: Instance, exclude: frozenset[int]) -> Matching:
    prefs: list[list[int]] = []
    for j in range(inst.m):
        order = sorted(inst.applicants_at[j],
                       key=lambda i: -inst.score_of(i, j))
        prefs.append(order)
    rank_at = {(app.applicant, app.target): app.rank for app in inst.applications}
    pointer = [0] * inst.m
    tentative: list[set[int]] = [set() for _ in range(inst.m)]
    held: dict[int, tuple[int, int]] = {}  # applicant -> (rank, college)
    queue = deque(j for j in range(inst.m)
                  if j not in exclude and prefs[j])
    while queue:
        j = queue.popleft()
        while len(tentative[j]) < inst.colleges[j].upper and pointer[j] < len(prefs[j]):
            i = prefs[j][pointer[j]]
            pointer[j] += 1
            r = rank_at[(i, j)]
            if i not in held or r < held[i][0]:
                if i in held:
                    old = held[i][1]
                    tentative[old].discard(i)
                    if old not in queue:
                        queue.append(old)
                held[i] = (r, j)
                tentative[j].add(i)
    assignment: dict[int, int | None] = {i: None for i in range(inst.n)}
    for i, (_, j) in held.items():
        assignment[i] = j
    return Matching(assignment=assignment)


def induced_matching(inst: Instance, limits: list[int]) -> Matching:
    """Everyone goes to the best-ranked college whose cutoff they achieve."""
    assignment: dict[int, int | None] = {i: None for i in range(inst.n)}
    for i in range(inst.n):
        for app in inst.by_applicant[i]:
            if app.score >= limits[app.target]:
                assignment[i] = app.target
                break
    return Matching(assignment=assignment)


def gs_scorelimits(inst: Instance, side: str = "applicant") -> tuple[Matching, ScoreLimits]:
    """Generalized deferred acceptance over cutoff scores; ties allowed.

    The applicant side starts with all cutoffs at zero and raises the cutoff
    of an overfull college just past the score of the tie group whose
    admission breaks the quota. The college side starts with all cutoffs
    above every score and lowers each college's cutoff as far as its own
    quota allows, until no cutoff can move.
    """
    _require_simple_strict(inst, "gs_scorelimits")
    if side == "applicant":
        limits = _gs_applicant(inst)
    elif side == "college":
        limits = _gs_college(inst)
    else:
        raise AlgorithmError(f"gs_scorelimits: unknown side {side!r}")
    matching = induced_matching(inst, limits)
    return matching, ScoreLimits(limits={j: limits[j] for j in range(inst.m)})


def _gs_applicant(inst: Instance) -> list[int]:
    limits = [0] * inst.m
    while True:
        matching = induced_matching(inst, limits)
        intake = matching.intake(inst)
        over = [j for j in range(inst.m) if intake[j] > inst.colleges[j].upper]
        if not over:
            return limits
        j = over[0]
        scores = sorted((inst.score_of(i, j) for i, t in matching.assignment.items()
                         if t == j), reverse=True)
        kept = 0
        cut = limits[j]
        for value in sorted(set(scores), reverse=True):
            group = scores.count(value)
            if kept + group > inst.colleges[j].upper:
                cut = value + 1
                break
            kept += group
        limits[j] = cut


def _gs_college(inst: Instance) -> list[int]:
    top = inst.max_score + 1
    limits = [top] * inst.m
    changed = True
    while changed:
        changed = False
        for j in range(inst.m):
            best = limits[j]
            for candidate in range(limits[j] - 1, -1, -1):
                trial = limits.copy()
                trial[j] = candidate
                intake = induced_matching(inst, trial).intake(inst)
                if intake[j] <= inst.colleges[j].upper:
                    best = candidate
                else:
                    break
            if best != limits[j]:
                limits[j] = best
                changed = True
    return limits


def lower_quota_heuristic(inst: Instance) -> tuple[Matching, set[int], list[ClosureEvent]]:
    """Close under-quota colleges one at a time, smallest admitted/lower
    ratio first, rerunning deferred acceptance after each closure. Fast but
    not guaranteed stable; may close colleges a stable solution keeps open.
    """
    _require_simple_strict(inst, "lower_quota_heuristic")
    if inst.has_ties:
        raise AlgorithmError("lower_quota_heuristic: scores are tied at some college")
    if inst.lower_quota_groups:
        raise AlgorithmError("lower_quota_heuristic: lower-quota groups present")
    closed: set[int] = set()
    trace: list[ClosureEvent] = []
    while True:
        matching = _da_applicant(inst, frozenset(closed))
        intake = matching.intake(inst)
        violators = [j for j in range(inst.m)
                     if j not in closed and inst.colleges[j].lower > intake[j]]
        if not violators:
            return matching, closed, trace
        # smallest admitted/lower ratio, exact comparison by cross multiplication
        def _ratio_less(a: int, b: int) -> bool:
            la, lb = inst.colleges[a].lower, inst.colleges[b].lower
            if intake[a] * lb != intake[b] * la:
                return intake[a] * lb < intake[b] * la
            if intake[a] != intake[b]:
                return intake[a] < intake[b]
            return a < b

        choice = violators[0]
        for j in violators[1:]:
            if _ratio_less(j, choice):
                choice = j
        cutoffs = {}
        for j in range(inst.m):
            if j in closed or j == choice:
                continue
            scores = [inst.score_of(i, j) for i, t in matching.assignment.items() if t == j]
            cutoffs[j] = min(scores) if scores else 0
        trace.append(ClosureEvent(college=choice, admitted=intake[choice],
                                  lower=inst.colleges[choice].lower, cutoffs=cutoffs))
        closed.add(choice)
