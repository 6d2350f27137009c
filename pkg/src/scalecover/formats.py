"""File formats and canonical serialization.

All structured input and output is JSON with sorted keys, two-space indent
and a trailing newline, so serialize(parse(file)) is byte-identical for
canonical files.  Distance matrices come in as headerless CSV.  Parse errors
carry the position that failed.
"""

from __future__ import annotations

import dataclasses
import hashlib
import json

from .actions import ActionSpec, close_group
from .quotients import FilteredMap
from .rips import AbelianGroupInv
from .spaces import FilteredSpace, from_metric, validate_space
from .towers import SpaceTower, TowerAb

SCHEMA = "scalecover-report/1"


class ParseError(ValueError):
    def __init__(self, message, position=None):
        self.position = position
        super().__init__(message if position is None else f"{position}: {message}")


def to_jsonable(obj):
    """Deterministic conversion of result objects into JSON-ready values."""
    if dataclasses.is_dataclass(obj) and not isinstance(obj, type):
        return {
            f.name: to_jsonable(getattr(obj, f.name))
            for f in dataclasses.fields(obj)
            if not f.name.startswith("_")
        }
    if isinstance(obj, dict):
        return {
            (",".join(map(str, k)) if isinstance(k, tuple) else str(k)): to_jsonable(v)
            for k, v in obj.items()
        }
    if isinstance(obj, (frozenset, set)):
        converted = [to_jsonable(v) for v in obj]
        return sorted(converted, key=lambda v: json.dumps(v, sort_keys=True, default=str))
    if isinstance(obj, (list, tuple)):
        return [to_jsonable(v) for v in obj]
    if isinstance(obj, (str, int, float, bool)) or obj is None:
        return obj
    return str(obj)


def canonical_dumps(obj) -> str:
    return json.dumps(to_jsonable(obj), sort_keys=True, indent=2, ensure_ascii=True) + "\n"


def digest(obj) -> str:
    return "sha256:" + hashlib.sha256(canonical_dumps(obj).encode()).hexdigest()


# ---------------------------------------------------------------------------
# spaces


def space_to_spec(space: FilteredSpace) -> dict:
    scales = []
    for k in range(1, space.depth + 1):
        pairs = sorted(
            space.full_relation(k),
            key=lambda ab: (space.index(ab[0]), space.index(ab[1])),
        )
        scales.append([[a, b] for a, b in pairs])
    return {
        "kind": "space",
        "points": list(space.points),
        "scales": scales,
        "hausdorff": space.hausdorff,
    }


def _as_point(value):
    if isinstance(value, list):
        return tuple(_as_point(v) for v in value)
    return value


def space_from_spec(spec: dict) -> FilteredSpace:
    if spec.get("kind") not in (None, "space"):
        raise ParseError(f"expected a space spec, got kind {spec.get('kind')!r}")
    if "points" in spec:
        points = [_as_point(p) for p in spec["points"]]
        scales = [
            [(_as_point(a), _as_point(b)) for a, b in scale] for scale in spec["scales"]
        ]
        return validate_space(points, scales, bool(spec.get("hausdorff", False)))
    if "matrix" in spec:
        return from_metric(spec["matrix"], spec["radii"], spec.get("names"))
    raise ParseError("space spec needs either points/scales or matrix/radii")


def parse_distance_csv(text: str):
    rows = []
    for lineno, line in enumerate(text.splitlines(), start=1):
        if not line.strip():
            continue
        try:
            row = [float(cell) if "." in cell or "e" in cell.lower() else int(cell)
                   for cell in line.split(",")]
        except ValueError as exc:
            raise ParseError(f"bad number ({exc})", f"line {lineno}") from None
        rows.append(row)
    n = len(rows)
    for lineno, row in enumerate(rows, start=1):
        if len(row) != n:
            raise ParseError(
                f"row has {len(row)} entries but the matrix has {n} rows",
                f"line {lineno}",
            )
    return rows


# ---------------------------------------------------------------------------
# maps, actions, towers


def map_to_spec(f: FilteredMap) -> dict:
    return {
        "kind": "map",
        "source": space_to_spec(f.source),
        "target": space_to_spec(f.target),
        "assignment": list(f.assignment),
    }


def map_from_spec(spec: dict) -> FilteredMap:
    if spec.get("kind") not in (None, "map"):
        raise ParseError(f"expected a map spec, got kind {spec.get('kind')!r}")
    source = space_from_spec(spec["source"])
    target = space_from_spec(spec["target"])
    return FilteredMap(source, target, tuple(_as_point(p) for p in spec["assignment"]))


def action_to_spec(action: ActionSpec) -> dict:
    return {
        "kind": "action",
        "space": space_to_spec(action.space),
        "generators": [list(action.perm_of_points(g)) for g in action.generators],
    }


def action_from_spec(spec: dict, bound: int = None) -> ActionSpec:
    if spec.get("kind") not in (None, "action"):
        raise ParseError(f"expected an action spec, got kind {spec.get('kind')!r}")
    space = space_from_spec(spec["space"])
    kwargs = {} if bound is None else {"bound": bound}
    return close_group(
        space, [[_as_point(p) for p in g] for g in spec["generators"]], **kwargs
    )


def space_tower_to_spec(tower: SpaceTower) -> dict:
    return {
        "kind": "space_tower",
        "spaces": [space_to_spec(sp) for sp in tower.spaces],
        "bondings": [list(f.assignment) for f in tower.bondings],
        "stabilization": tower.stabilization,
    }


def space_tower_from_spec(spec: dict, base_dir: str = ".") -> SpaceTower:
    """Tower spaces may be inline specs or {"ref": path} file references."""
    import os

    def resolve(entry):
        if "ref" in entry:
            return space_from_spec(load_json(os.path.join(base_dir, entry["ref"])))
        return space_from_spec(entry)

    spaces = tuple(resolve(s) for s in spec["spaces"])
    bondings = tuple(
        FilteredMap(spaces[i + 1], spaces[i],
                    tuple(_as_point(p) for p in assignment))
        for i, assignment in enumerate(spec["bondings"])
    )
    return SpaceTower(spaces, bondings, spec.get("stabilization", "none"))


def abelian_tower_to_spec(tab: TowerAb) -> dict:
    return {
        "kind": "abelian_tower",
        "groups": [
            {"rank": g.rank, "torsion": list(g.torsion)} for g in tab.groups
        ],
        "matrices": [[list(row) for row in m] for m in tab.matrices],
        "stabilization": tab.stabilization,
    }


def abelian_tower_from_spec(spec: dict) -> TowerAb:
    groups = tuple(
        AbelianGroupInv(g["rank"], tuple(g["torsion"])) for g in spec["groups"]
    )
    matrices = tuple(
        tuple(tuple(row) for row in m) for m in spec["matrices"]
    )
    return TowerAb(groups, matrices, spec.get("stabilization", "none"))


def load_json(path: str) -> dict:
    try:
        with open(path) as fh:
            return json.load(fh)
    except json.JSONDecodeError as exc:
        raise ParseError(exc.msg, f"{path}:{exc.lineno}:{exc.colno}") from None
    except OSError as exc:
        raise ParseError(str(exc)) from None
