"""
Example systems and family combinators

Every constructor is deterministic (random systems are seeded) and returns a
MapFamily whose .space is the constructed SpaceModel.
"""
import logging
import math
import re
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Any, Dict, Optional, Sequence, Tuple, Union

import networkx as nx
import numpy as np

from hyperdyn.config import Budget
from hyperdyn.core.family import MapFamily, block_family, identity_table, product_family
from hyperdyn.core.space import (
    CylinderMetric,
    DistanceMatrix,
    GridMetric,
    OpenSet,
    SpaceModel,
)
from hyperdyn.utils.validation import (
    ResourceError,
    ValidationError,
    format_rational,
    parse_rational,
    validate_positive_int,
)

logger = logging.getLogger(__name__)

RECIPE_KINDS = ("full_shift", "odometer", "interval_grid", "permutation", "random_finite")
POST_OPS = ("interleave_identity", "block", "product")

_MAP_EXPR = re.compile(r"^\s*(tent|logistic|rotation)\s*(?:\(\s*([^)]*)\s*\))?\s*$")


def _word(index: int, alphabet: int, length: int) -> str:
    digits = []
    for _ in range(length):
        index, digit = divmod(index, alphabet)
        digits.append(str(digit))
    return "".join(reversed(digits))


def _check_count(count: int, budget: Optional[Budget], what: str):
    budget = budget or Budget()
    if count > budget.max_points:
        raise ResourceError(
            f"{what} has {count} points, budget is {budget.max_points}",
            quantity=count,
            limit=budget.max_points,
        )


def _cylinders(alphabet: int, length: int, depth: int):
    def factory():
        opens = []
        for k in range(1, depth + 1):
            width = alphabet ** (length - k)
            for w in range(alphabet ** k):
                members = tuple(range(w * width, (w + 1) * width))
                opens.append(OpenSet(f"[{_word(w, alphabet, k)}]", members))
        return opens
    return factory


def _word_space(alphabet: int, length: int, depth: Optional[int], name: str,
                budget: Optional[Budget]) -> SpaceModel:
    alphabet = validate_positive_int(alphabet, field_name="alphabet", maximum=10)
    length = validate_positive_int(length, field_name="length")
    depth = length if depth is None else validate_positive_int(depth, field_name="depth", maximum=length)
    _check_count(alphabet ** length, budget, name)
    return SpaceModel(
        points=tuple(_word(i, alphabet, length) for i in range(alphabet ** length)),
        metric=CylinderMetric(alphabet, length),
        base_factory=_cylinders(alphabet, length, depth),
        name=name,
    )


def power_family(family: MapFamily, exponents: Sequence[int], name: Optional[str] = None) -> MapFamily:
    """[f^e1, f^e2, ...] for an autonomous family [f]; the result commutes."""
    if family.period != 1:
        raise ValidationError("power_family needs an autonomous family")
    f = family.maps[0]
    maps = []
    for e in exponents:
        e = validate_positive_int(e, field_name="exponent")
        table = identity_table(family.space.size)
        for _ in range(e):
            table = f[table]
        maps.append(table)
    label = name or f"{family.name}^{list(exponents)}"
    return family.with_maps(maps, name=label, commutative=len(maps) > 1)


def make_full_shift(alphabet: int = 2, length: int = 3, fill: int = 0, depth: Optional[int] = None,
                    powers: Sequence[int] = (1,), budget: Optional[Budget] = None) -> MapFamily:
    """
    Truncated one-sided full shift.

    Points are words of the given length; sigma drops the first symbol and
    appends the fill symbol, which makes it total. Opens are cylinders [w]
    with |w| <= depth (all lengths by default).
    """
    space = _word_space(alphabet, length, depth, f"shift({alphabet},{length})", budget)
    fill = validate_positive_int(fill, field_name="fill", minimum=0, maximum=alphabet - 1)
    idx = np.arange(space.size, dtype=np.int64)
    sigma = (idx % (alphabet ** (length - 1))) * alphabet + fill
    family = MapFamily(space=space, maps=(sigma,), name=f"sigma({alphabet},{length})")
    if tuple(powers) != (1,):
        family = power_family(family, powers, name=f"sigma{list(powers)}({alphabet},{length})")
    logger.debug(f"Built full shift {family.name} with {space.size} points")
    return family


def make_odometer(length: int = 3, depth: Optional[int] = None,
                  budget: Optional[Budget] = None) -> MapFamily:
    """
    Binary odometer truncated to K digits: add 1 at the first digit, carry to the right.

    It is the +1 map on Z/2^K written least significant digit first.
    """
    space = _word_space(2, length, depth, f"odometer({length})", budget)
    idx = np.arange(space.size, dtype=np.int64)
    positions = np.arange(length, dtype=np.int64)
    digits = (idx[:, None] >> (length - 1 - positions)[None, :]) & 1
    value = digits @ (1 << positions)
    bumped = (value + 1) % (1 << length)
    new_digits = (bumped[:, None] >> positions[None, :]) & 1
    phi = new_digits @ (1 << (length - 1 - positions))
    return MapFamily(space=space, maps=(phi,), name=f"phi({length})")


def interleave_identity(family: MapFamily, position: str = "second") -> MapFamily:
    """
    Alternate the maps with the identity: [I, f_1, I, f_2, ...] or [f_1, I, f_2, I, ...].

    With the identity second, omega_{2k-1} = omega_{2k} = omega_k of the input;
    with it first, omega_{2k} = omega_{2k+1} = omega_k.
    """
    if position not in ("first", "second"):
        raise ValidationError(f"position must be 'first' or 'second', got {position!r}")
    identity = identity_table(family.space.size)
    maps = []
    for f in family.maps:
        maps.extend([identity, f] if position == "first" else [f, identity])
    return family.with_maps(maps, name=f"interleave[{position}]({family.name})",
                            commutative=family.commutative)


def _grid_map(map_expr: str):
    match = _MAP_EXPR.match(map_expr or "")
    if not match:
        raise ValidationError(f"map must be tent, logistic(r) or rotation(a), got {map_expr!r}")
    kind, arg = match.group(1), match.group(2)
    if kind == "tent":
        if arg:
            raise ValidationError("tent takes no parameter")
        return "tent", lambda x: 2 * x if x < Fraction(1, 2) else 2 - 2 * x
    if not arg:
        raise ValidationError(f"{kind} needs a parameter")
    value = parse_rational(arg, field_name=f"{kind} parameter")
    if kind == "logistic":
        if not 0 <= value <= 4:
            raise ValidationError(f"logistic parameter must lie in [0, 4], got {value}")
        return f"logistic({format_rational(value)})", lambda x: value * x * (1 - x)
    return f"rotation({format_rational(value)})", lambda x: (x + value) % 1


def make_interval_grid(map_expr: str = "tent", cells: int = 8, spans: Sequence[int] = (1, 2, 3),
                       budget: Optional[Budget] = None) -> MapFamily:
    """
    Midpoint discretization of an interval map on N equal cells of [0, 1].

    Each cell goes to the cell containing the image of its midpoint. Opens are
    runs of adjacent cells with the given lengths. Verdicts on this system are
    statements about the discretized system only.
    """
    cells = validate_positive_int(cells, field_name="cells", minimum=2)
    _check_count(cells, budget, "interval grid")
    spans = tuple(validate_positive_int(s, field_name="spans", maximum=cells) for s in spans)
    if not spans:
        raise ValidationError("spans must be nonempty")
    label, f = _grid_map(map_expr)
    midpoints = [Fraction(2 * i + 1, 2 * cells) for i in range(cells)]
    table = [min(math.floor(f(m) * cells), cells - 1) for m in midpoints]

    def factory():
        opens = []
        for s in spans:
            for i in range(cells - s + 1):
                opens.append(OpenSet(f"c[{i}:{i + s}]", tuple(range(i, i + s))))
        return opens

    space = SpaceModel(
        points=tuple(f"c{i}" for i in range(cells)),
        metric=GridMetric(cells),
        base_factory=factory,
        labels=tuple(format_rational(m) for m in midpoints),
        name=f"grid[{label},{cells}]",
    )
    return MapFamily(space=space, maps=(np.array(table, dtype=np.int64),), name=label)


def cyclic_metric(n: int) -> DistanceMatrix:
    """Rotation-invariant metric on Z/n: circular distance over n."""
    return DistanceMatrix([[Fraction(min(abs(i - j), n - abs(i - j)), n) for j in range(n)] for i in range(n)])


def discrete_metric(n: int) -> DistanceMatrix:
    return DistanceMatrix([[Fraction(int(i != j)) for j in range(n)] for i in range(n)])


def make_permutation(table: Sequence[int], metric: Union[str, DistanceMatrix] = "cyclic",
                     name: Optional[str] = None) -> MapFamily:
    """
    Autonomous family [pi] for a permutation table on points 0..n-1.

    Raises:
        ValidationError: If the table is not a bijection
    """
    n = len(table)
    if n < 1 or sorted(int(v) for v in table) != list(range(n)):
        raise ValidationError("permutation table must be a bijection of 0..n-1")
    if isinstance(metric, str):
        if metric not in ("cyclic", "discrete"):
            raise ValidationError(f"metric must be 'cyclic' or 'discrete', got {metric!r}")
        metric = cyclic_metric(n) if metric == "cyclic" else discrete_metric(n)
    space = SpaceModel(points=tuple(str(i) for i in range(n)), metric=metric, name=f"perm({n})")
    return MapFamily(space=space, maps=(np.array(table, dtype=np.int64),), name=name or f"perm{list(table)}")


def make_rotation(n: int, step: int = 1) -> MapFamily:
    """x -> x + step mod n with the cyclic metric (an isometry)."""
    return make_permutation([(i + step) % n for i in range(n)], "cyclic", name=f"rot({n},{step})")


def make_random_finite(n_points: int, p_period: int = 1, seed: int = 0, bijective: bool = False,
                       denominator: int = 8) -> MapFamily:
    """
    Seeded random system: p uniform random self-maps (or permutations) and a
    random metric made from uniform rational edge weights repaired to the
    shortest-path metric of the complete graph.
    """
    n_points = validate_positive_int(n_points, field_name="n_points")
    p_period = validate_positive_int(p_period, field_name="p_period")
    denominator = validate_positive_int(denominator, field_name="denominator")
    rng = np.random.default_rng(seed)
    graph = nx.Graph()
    graph.add_nodes_from(range(n_points))
    for i in range(n_points):
        for j in range(i + 1, n_points):
            graph.add_edge(i, j, weight=Fraction(int(rng.integers(1, denominator + 1)), denominator))
    lengths = dict(nx.all_pairs_dijkstra_path_length(graph, weight="weight"))
    rows = [[Fraction(lengths[i][j]) for j in range(n_points)] for i in range(n_points)]
    maps = []
    for _ in range(p_period):
        if bijective:
            maps.append(rng.permutation(n_points).astype(np.int64))
        else:
            maps.append(rng.integers(0, n_points, size=n_points).astype(np.int64))
    space = SpaceModel(
        points=tuple(f"p{i}" for i in range(n_points)),
        metric=DistanceMatrix(rows),
        name=f"random({n_points},seed={seed})",
    )
    kind = "perm" if bijective else "map"
    return MapFamily(space=space, maps=tuple(maps), name=f"random-{kind}({n_points},{p_period},{seed})")


@dataclass(frozen=True)
class SystemRecipe:
    """A zoo constructor call plus an optional chain of family combinators."""

    kind: str
    params: Dict[str, Any] = field(default_factory=dict)
    post: Tuple[Dict[str, Any], ...] = ()

    @property
    def discretized(self) -> bool:
        return self.kind == "interval_grid"

    @classmethod
    def from_dict(cls, data: Any, field_name: str = "recipe") -> "SystemRecipe":
        if not isinstance(data, dict):
            raise ValidationError(f"{field_name} must be an object")
        kind = data.get("kind")
        if kind not in RECIPE_KINDS:
            raise ValidationError(f"{field_name}.kind must be one of {', '.join(RECIPE_KINDS)}, got {kind!r}")
        post = data.get("post", [])
        if not isinstance(post, list):
            raise ValidationError(f"{field_name}.post must be a list")
        for i, step in enumerate(post):
            if not isinstance(step, dict) or step.get("op") not in POST_OPS:
                raise ValidationError(f"{field_name}.post[{i}].op must be one of {', '.join(POST_OPS)}")
        params = {k: v for k, v in data.items() if k not in ("kind", "post")}
        return cls(kind=kind, params=params, post=tuple(post))

    def to_dict(self) -> Dict[str, Any]:
        data = {"kind": self.kind, **self.params}
        if self.post:
            data["post"] = list(self.post)
        return data

    def build(self, budget: Optional[Budget] = None, field_name: str = "recipe") -> MapFamily:
        """
        Construct the system.

        Raises:
            ValidationError: naming the offending recipe field
        """
        p = dict(self.params)
        try:
            if self.kind == "full_shift":
                family = make_full_shift(
                    alphabet=p.pop("alphabet", 2), length=p.pop("length", 3), fill=p.pop("fill", 0),
                    depth=p.pop("depth", None), powers=tuple(p.pop("powers", (1,))), budget=budget,
                )
            elif self.kind == "odometer":
                family = make_odometer(length=p.pop("length", 3), depth=p.pop("depth", None), budget=budget)
            elif self.kind == "interval_grid":
                family = make_interval_grid(
                    map_expr=p.pop("map", "tent"), cells=p.pop("cells", 8),
                    spans=tuple(p.pop("spans", (1, 2, 3))), budget=budget,
                )
            elif self.kind == "permutation":
                family = make_permutation(p.pop("table", None) or [], metric=p.pop("metric", "cyclic"))
            else:
                family = make_random_finite(
                    n_points=p.pop("points", 4), p_period=p.pop("period", 1), seed=p.pop("seed", 0),
                    bijective=bool(p.pop("bijective", False)), denominator=p.pop("denominator", 8),
                )
            if p:
                raise ValidationError(f"unknown parameters {sorted(p)}")
            for i, step in enumerate(self.post):
                family = self._apply(family, step, budget)
        except ValidationError as e:
            raise ValidationError(f"{field_name}: {e}")
        return family

    @staticmethod
    def _apply(family: MapFamily, step: Dict[str, Any], budget: Optional[Budget]) -> MapFamily:
        op = step["op"]
        if op == "interleave_identity":
            return interleave_identity(family, position=step.get("position", "second"))
        if op == "block":
            return block_family(family, step.get("n", 1))
        return product_family(family, step.get("k", 2), budget=budget)
