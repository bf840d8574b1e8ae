"""Workspace files: canonical JSON with rationals written as "p/q" strings.

A canonical file is ``json.dumps(..., sort_keys=True, indent=2)`` plus a
trailing newline, so reading and writing it again gives the same bytes.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional

from .calculus import RationalMap
from .cheese import CandidateDisc, Certificate, Group, SwissCheese, Budget
from .geometry import BoundPair, Disc, Q, q_str
from .measures import FeasibilityProblem, FeasibilityResult
from .slits import PropagationSystem, SlitChain
from .targets import TargetSet, target_from_json

SCHEMA_VERSION = 1


class SchemaError(ValueError):
    pass


def cheese_to_json(c: SwissCheese):
    return {
        "outer": c.outer.to_json(),
        "stage": c.stage,
        "kmax": c.kmax,
        "groups": [
            {
                "n": g.candidate.n,
                "disc": g.candidate.disc.to_json(),
                "d": g.candidate.d.to_json(),
                "epsilon": q_str(g.budget.epsilon),
                "kmax": g.budget.kmax,
                "deleted": [D.to_json() for D in g.deleted],
            }
            for g in c.groups
        ],
        "certificates": [cert.to_json() for cert in c.certificates],
    }


def cheese_from_json(d, target: Optional[TargetSet]) -> SwissCheese:
    groups = []
    for g in d["groups"]:
        cand = CandidateDisc(Disc.from_json(g["disc"]), int(g["n"]), BoundPair.from_json(g["d"]))
        groups.append(Group(cand, Budget(int(g["n"]), Q(g["epsilon"]), int(g["kmax"])),
                            [Disc.from_json(x) for x in g["deleted"]]))
    certs = [Certificate(c["name"], c["inputs"], c["bounds"], bool(c["passed"]), c.get("detail", ""))
             for c in d["certificates"]]
    stage = d["stage"]
    return SwissCheese(target, groups, Disc.from_json(d["outer"]), None if stage is None else int(stage),
                       int(d["kmax"]), certs)


@dataclass
class WorkspaceFile:
    target: Optional[TargetSet] = None
    cheese: Optional[SwissCheese] = None
    maps: dict = field(default_factory=dict)  # name -> (RationalMap, pole refs or None)
    chains: dict = field(default_factory=dict)  # name -> SlitChain
    systems: dict = field(default_factory=dict)  # name -> PropagationSystem
    problems: dict = field(default_factory=dict)  # name -> FeasibilityProblem
    results: dict = field(default_factory=dict)  # problem name -> FeasibilityResult
    meta: dict = field(default_factory=dict)

    def to_json(self):
        return {
            "schema_version": SCHEMA_VERSION,
            "meta": self.meta,
            "target": self.target.to_json() if self.target is not None else None,
            "cheese": cheese_to_json(self.cheese) if self.cheese is not None else None,
            "maps": {k: f.to_json(refs) for k, (f, refs) in self.maps.items()},
            "chains": {k: c.to_json() for k, c in self.chains.items()},
            "systems": {k: s.to_json() for k, s in self.systems.items()},
            "problems": {k: p.to_json() for k, p in self.problems.items()},
            "results": {k: r.to_json() for k, r in self.results.items()},
        }

    @classmethod
    def from_json(cls, d) -> "WorkspaceFile":
        if not isinstance(d, dict) or d.get("schema_version") != SCHEMA_VERSION:
            raise SchemaError(f"expected schema_version {SCHEMA_VERSION}, got {d.get('schema_version')!r}"
                              if isinstance(d, dict) else "workspace must be a JSON object")
        target = target_from_json(d["target"]) if d.get("target") is not None else None
        cheese = cheese_from_json(d["cheese"], target) if d.get("cheese") is not None else None
        maps = {}
        for k, m in d.get("maps", {}).items():
            refs = [e["disc"] for e in m["poles"]] if all("disc" in e for e in m["poles"]) and m["poles"] else None
            maps[k] = (RationalMap.from_json(m), refs)
        ws = cls(
            target,
            cheese,
            maps,
            {k: SlitChain.from_json(c) for k, c in d.get("chains", {}).items()},
            {k: PropagationSystem.from_json(s) for k, s in d.get("systems", {}).items()},
            {k: FeasibilityProblem.from_json(p) for k, p in d.get("problems", {}).items()},
            {k: FeasibilityResult.from_json(r) for k, r in d.get("results", {}).items()},
            dict(d.get("meta", {})),
        )
        ws.check_references()
        return ws

    def check_references(self):
        """Every name and index used inside the file must resolve."""
        ndel = len(self.cheese.deleted_discs()) if self.cheese is not None else 0
        for k, (f, refs) in self.maps.items():
            if refs is None:
                continue
            if len(refs) != len(f.poles):
                raise SchemaError(f"map {k}: pole certificate length mismatch")
            for r in refs:
                if r != "exterior" and not (isinstance(r, int) and 0 <= r < ndel):
                    raise SchemaError(f"map {k}: pole certificate refers to missing disc {r!r}")
        for k in self.results:
            if k not in self.problems:
                raise SchemaError(f"result {k} has no matching problem")
        if self.cheese is not None:
            ns = [g.candidate.n for g in self.cheese.groups]
            if len(set(ns)) != len(ns):
                raise SchemaError("duplicate group index")
            if self.cheese.groups and self.target is None:
                raise SchemaError("cheese groups present without a target")


def dumps(ws: WorkspaceFile) -> str:
    return json.dumps(ws.to_json(), sort_keys=True, indent=2, ensure_ascii=False) + "\n"


def loads(text: str) -> WorkspaceFile:
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise SchemaError(f"not JSON: {exc}") from None
    return WorkspaceFile.from_json(data)


def write(ws: WorkspaceFile, path) -> Path:
    path = Path(path)
    path.write_bytes(dumps(ws).encode("utf-8"))
    return path


def read(path) -> WorkspaceFile:
    return loads(Path(path).read_bytes().decode("utf-8"))


def canonicalize(text: str) -> str:
    return dumps(loads(text))
