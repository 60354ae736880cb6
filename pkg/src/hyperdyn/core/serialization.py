"""
System description files

    {"points": [...], "metric": [["0", "1/2"], ...], "open_base": [[...], ...],
     "maps": [[...], ...], "labels": [...], "commutative": false, "name": "..."}

Metric entries are exact rationals written "p/q"; maps list the image id of
every point in order. Lifted systems export in the same format.
"""
import json
import logging
from pathlib import Path
from typing import Any, Dict, Union

from hyperdyn.core.family import MapFamily
from hyperdyn.core.space import DistanceMatrix, OpenSet, SpaceModel, validate_space
from hyperdyn.utils.validation import (
    ValidationError,
    format_rational,
    parse_rational,
    validate_path,
)

logger = logging.getLogger(__name__)

DESCRIPTION_FIELDS = ("points", "metric", "open_base", "maps", "labels", "commutative", "name")


def family_from_dict(data: Any) -> MapFamily:
    """
    Parse and fully validate a system description.

    Raises:
        ValidationError: naming the offending field
    """
    if not isinstance(data, dict):
        raise ValidationError("system description must be an object")
    unknown = set(data) - set(DESCRIPTION_FIELDS)
    if unknown:
        raise ValidationError(f"system description has unknown fields: {sorted(unknown)}")

    points = data.get("points")
    if not isinstance(points, list) or not points:
        raise ValidationError("points must be a nonempty list")
    points = tuple(str(p) for p in points)
    if len(set(points)) != len(points):
        raise ValidationError("points must be distinct")
    n = len(points)

    raw_metric = data.get("metric")
    if not isinstance(raw_metric, list) or len(raw_metric) != n:
        raise ValidationError(f"metric must be a {n}x{n} matrix")
    rows = []
    for i, row in enumerate(raw_metric):
        if not isinstance(row, list) or len(row) != n:
            raise ValidationError(f"metric[{i}] must have {n} entries")
        rows.append([parse_rational(v, field_name=f"metric[{i}][{j}]") for j, v in enumerate(row)])

    labels = data.get("labels")
    if labels is not None:
        if not isinstance(labels, list) or len(labels) != n:
            raise ValidationError(f"labels must be a list of {n} strings")
        labels = tuple(str(label) for label in labels)

    index = {p: i for i, p in enumerate(points)}

    def lookup(value, field_name):
        try:
            return index[str(value)]
        except KeyError:
            raise ValidationError(f"{field_name}: unknown point id '{value}'")

    factory = None
    raw_base = data.get("open_base")
    if raw_base is not None:
        if not isinstance(raw_base, list) or not raw_base:
            raise ValidationError("open_base must be a nonempty list")
        opens = []
        for k, members in enumerate(raw_base):
            if not isinstance(members, list) or not members:
                raise ValidationError(f"open_base[{k}] must be a nonempty list")
            ids = sorted({lookup(p, f"open_base[{k}]") for p in members})
            opens.append(OpenSet("{" + ",".join(points[i] for i in ids) + "}", tuple(ids)))
        factory = lambda: opens  # noqa: E731

    space = SpaceModel(
        points=points,
        metric=DistanceMatrix(rows),
        base_factory=factory,
        labels=labels,
        name=str(data.get("name", "system")),
    )
    validate_space(space)

    raw_maps = data.get("maps")
    if not isinstance(raw_maps, list) or not raw_maps:
        raise ValidationError("maps must be a nonempty list")
    maps = []
    for k, table in enumerate(raw_maps):
        if not isinstance(table, list) or len(table) != n:
            raise ValidationError(f"maps[{k}] must list an image for each of the {n} points")
        maps.append([lookup(p, f"maps[{k}]") for p in table])

    commutative = data.get("commutative", False)
    if not isinstance(commutative, bool):
        raise ValidationError("commutative must be true or false")
    return MapFamily(space=space, maps=tuple(maps), commutative=commutative, name=space.name)


def load_system(path: Union[str, Path]) -> MapFamily:
    system_path = validate_path(path, must_exist=True, field_name="system file")
    try:
        with open(system_path, "r") as f:
            data = json.load(f)
    except json.JSONDecodeError as e:
        raise ValidationError(f"Invalid JSON in {system_path}: {e}")
    family = family_from_dict(data)
    logger.info(f"Loaded system {family.name} with {family.space.size} points from {system_path}")
    return family


def family_to_dict(family: MapFamily) -> Dict[str, Any]:
    """Canonical description; family_from_dict(family_to_dict(f)) rebuilds f."""
    space = family.space
    n = space.size
    data: Dict[str, Any] = {
        "name": family.name,
        "points": list(space.points),
        "metric": [[format_rational(space.distance(i, j)) for j in range(n)] for i in range(n)],
        "open_base": [space.ids(o.members) for o in space.open_base],
        "maps": [space.ids(table) for table in family.maps],
        "commutative": family.commutative,
    }
    if space.labels is not None:
        data["labels"] = list(space.labels)
    return data


def dump_system(family: MapFamily, path: Union[str, Path]) -> Path:
    target = validate_path(path, field_name="output")
    target.parent.mkdir(parents=True, exist_ok=True)
    with open(target, "w") as f:
        json.dump(family_to_dict(family), f, indent=2)
        f.write("\n")
    logger.info(f"Wrote {family.name} to {target}")
    return target
