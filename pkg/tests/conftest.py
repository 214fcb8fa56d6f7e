"""Shared fixture loading and cross-checking helpers.

Fixture instances live as JSON files under tests/fixtures. The searched
regression fixtures were pinned by exhaustive oracle scans:

  I5       lower quotas, stable set empty
  I6       non-nested common quotas, stable set empty
  I7       paired applications, stable set empty
  I8       closing heuristic output unstable while stable outcomes exist
  ROUNDS2  college fixing needs a second round (opened set grows)
"""

from __future__ import annotations

from pathlib import Path

from stableadmit import Instance, parse_instance

FIXTURE_DIR = Path(__file__).parent / "fixtures"


def fixture_path(name: str) -> Path:
    return FIXTURE_DIR / f"{name}.json"


def fixture_text(name: str) -> str:
    return fixture_path(name).read_text(encoding="utf-8")


def load(name: str) -> Instance:
    return parse_instance(fixture_text(name))


def matchings_of(solutions) -> set[tuple]:
    """Canonical hashable form of each oracle solution's matching."""
    out = set()
    for sol in solutions:
        out.add(tuple(sorted(sol.matching.items())))
    return out


def x_projection(model, projections) -> set[tuple]:
    """Matchings encoded by assignment variables of solver projections."""
    assign = model.vars_by_role("assign")
    out = set()
    for proj in projections:
        matching = {}
        for var in assign:
            i, target = var.key
            matching.setdefault(i, None)
            if proj[var.name] == 1:
                matching[i] = target
        out.add(tuple(sorted(matching.items())))
    return out


def t_projection(model, projections) -> set[tuple]:
    """Score-limit vectors of solver projections, in college order."""
    limits = sorted(model.vars_by_role("limit"), key=lambda v: v.key)
    return {tuple(proj[v.name] for v in limits) for proj in projections}
