"""
Configuration management for hyperdyn

Three layers:
- Budget: resource ceilings every expensive construction checks against
- Settings: process-level settings from the environment / .env file
- ExperimentConfig: one experiment (system, target, queries, output) loaded from JSON
"""
import json
import os
from dataclasses import asdict, dataclass, field, fields, replace
from pathlib import Path
from typing import Any, Dict, List, Optional, Union

from dotenv import load_dotenv

from hyperdyn.utils.validation import (
    ValidationError,
    validate_path,
    validate_positive_int,
)

# Query property names understood by the runner
QUERY_PROPERTIES = (
    "dense_periodic",
    "transitive",
    "total_transitive",
    "weak_mixing",
    "topological_mixing",
    "sensitive",
    "cofinitely_sensitive",
    "equicontinuous",
    "scrambled_pairs",
    "li_yorke_sensitive",
    "scrambled_set",
    "expansive",
    "chaotic_dependence",
    "entropy",
    "separated_entropy",
    "hyper_entropy",
)

OUTPUT_FORMATS = ("jsonl", "csv")


@dataclass(frozen=True)
class Budget:
    """Resource ceilings; exceeding one raises ResourceError."""

    max_points: int = 1_000_000
    max_hyperspace_points: int = 50_000
    max_join_sets: int = 2 ** 20
    max_trace_length: int = 100_000
    wall_clock_seconds: int = 600

    def __post_init__(self):
        for f in fields(self):
            validate_positive_int(getattr(self, f.name), field_name=f"budget.{f.name}")

    def override(self, values: Optional[Dict[str, Any]]) -> "Budget":
        """Return a copy with the given fields replaced (unknown keys rejected)."""
        if not values:
            return self
        known = {f.name for f in fields(self)}
        for key in values:
            if key not in known:
                raise ValidationError(f"budget.{key} is not a budget field")
        return replace(self, **values)

    @classmethod
    def from_env_value(cls, raw: Optional[str], base: Optional["Budget"] = None) -> "Budget":
        """
        Parse HYPERDYN_BUDGET.

        Accepts a JSON object or comma-separated key=value pairs.

        Examples:
            >>> Budget.from_env_value("max_hyperspace_points=10,max_join_sets=4096")
            Budget(max_points=1000000, max_hyperspace_points=10, ...)
        """
        base = base or cls()
        if raw is None or not raw.strip():
            return base

        raw = raw.strip()
        if len(raw) > 10000:
            raise ValidationError("HYPERDYN_BUDGET too large (max 10KB)")

        if raw.startswith("{"):
            try:
                values = json.loads(raw)
            except json.JSONDecodeError as e:
                raise ValidationError(f"Invalid JSON in HYPERDYN_BUDGET: {e}")
            if not isinstance(values, dict):
                raise ValidationError("HYPERDYN_BUDGET must be a JSON object")
        else:
            values = {}
            for part in raw.split(","):
                if not part.strip():
                    continue
                if "=" not in part:
                    raise ValidationError(f"HYPERDYN_BUDGET entry '{part}' is not key=value")
                key, value = part.split("=", 1)
                try:
                    values[key.strip()] = int(value.strip())
                except ValueError:
                    raise ValidationError(
                        f"HYPERDYN_BUDGET entry '{key.strip()}' must be an integer"
                    )
        return base.override(values)

    def to_dict(self) -> Dict[str, int]:
        return asdict(self)


class Settings:
    """Process-level settings loaded from the environment"""

    def __init__(self, env_file: Optional[str] = None):
        """
        Initialize settings

        Args:
            env_file: Path to .env file (optional)
        """
        if env_file:
            load_dotenv(env_file)
        else:
            load_dotenv()

        self.budget = Budget.from_env_value(os.getenv("HYPERDYN_BUDGET"))

        # Logging
        self.log_level = os.getenv("HYPERDYN_LOG_LEVEL", "INFO")
        self.log_file = os.getenv("HYPERDYN_LOG_FILE") or None

        workers = os.getenv("HYPERDYN_WORKERS", "1")
        try:
            self.workers = validate_positive_int(
                int(workers), field_name="HYPERDYN_WORKERS", maximum=256
            )
        except ValueError as e:
            raise ValidationError(f"Invalid HYPERDYN_WORKERS: {e}")


@dataclass(frozen=True)
class QuerySpec:
    """One query as written in an experiment config."""

    property: str
    params: Dict[str, Any] = field(default_factory=dict)

    def to_dict(self) -> Dict[str, Any]:
        return {"property": self.property, "params": dict(self.params)}


@dataclass(frozen=True)
class OutputSpec:
    path: Optional[str] = None
    format: str = "jsonl"
    include_timing: bool = False
    hash_chain: bool = True

    def to_dict(self) -> Dict[str, Any]:
        return {"path": self.path, "format": self.format, "include_timing": self.include_timing,
                "hash_chain": self.hash_chain}


def parse_target(value: Any, field_name: str = "target") -> Optional[int]:
    """
    Parse a target string.

    Returns:
        None for the base system, or the hyperspace cardinality bound M

    Examples:
        >>> parse_target("base")
        None
        >>> parse_target("lifted:2")
        2
    """
    if value is None or value == "base":
        return None
    if isinstance(value, str) and value.startswith("lifted:"):
        try:
            m = int(value.split(":", 1)[1])
        except ValueError:
            raise ValidationError(f"{field_name} must be 'base' or 'lifted:M', got '{value}'")
        return validate_positive_int(m, field_name=field_name)
    raise ValidationError(f"{field_name} must be 'base' or 'lifted:M', got '{value}'")


@dataclass(frozen=True)
class ExperimentConfig:
    """A single experiment: system source, target, queries, output and budget."""

    system: Dict[str, Any]
    queries: List[QuerySpec]
    target: str = "base"
    output: OutputSpec = field(default_factory=OutputSpec)
    budget: Budget = field(default_factory=Budget)
    workers: int = 1

    @property
    def lifted_cardinality(self) -> Optional[int]:
        return parse_target(self.target)

    @classmethod
    def from_dict(cls, data: Any, base_budget: Optional[Budget] = None) -> "ExperimentConfig":
        """
        Build a config from parsed JSON, reporting the dotted path of any bad field.

        Raises:
            ValidationError: If any field is missing or invalid
        """
        if not isinstance(data, dict):
            raise ValidationError("config must be a JSON object")

        unknown = set(data) - {"system", "queries", "target", "output", "budget", "workers"}
        if unknown:
            raise ValidationError(f"config has unknown fields: {sorted(unknown)}")

        system = data.get("system")
        if not isinstance(system, dict):
            raise ValidationError("system is required and must be an object")
        sources = [key for key in ("recipe", "file", "description") if key in system]
        if len(sources) != 1:
            raise ValidationError("system must have exactly one of recipe, file, description")
        if "file" in system:
            validate_path(system["file"], field_name="system.file")

        target = data.get("target", "base")
        parse_target(target, field_name="target")

        raw_queries = data.get("queries")
        if not isinstance(raw_queries, list) or not raw_queries:
            raise ValidationError("queries must be a nonempty list")
        queries = []
        for i, raw in enumerate(raw_queries):
            if not isinstance(raw, dict):
                raise ValidationError(f"queries[{i}] must be an object")
            name = raw.get("property")
            if name not in QUERY_PROPERTIES:
                raise ValidationError(
                    f"queries[{i}].property must be one of {', '.join(QUERY_PROPERTIES)}, got {name!r}"
                )
            params = raw.get("params", {})
            if not isinstance(params, dict):
                raise ValidationError(f"queries[{i}].params must be an object")
            queries.append(QuerySpec(property=name, params=dict(params)))

        raw_output = data.get("output", {})
        if not isinstance(raw_output, dict):
            raise ValidationError("output must be an object")
        fmt = raw_output.get("format", "jsonl")
        if fmt not in OUTPUT_FORMATS:
            raise ValidationError(f"output.format must be one of {OUTPUT_FORMATS}, got {fmt!r}")
        path = raw_output.get("path")
        if path is not None:
            path = str(validate_path(path, field_name="output.path"))
        output = OutputSpec(
            path=path,
            format=fmt,
            include_timing=bool(raw_output.get("include_timing", False)),
            hash_chain=bool(raw_output.get("hash_chain", True)),
        )

        raw_budget = data.get("budget", {})
        if not isinstance(raw_budget, dict):
            raise ValidationError("budget must be an object")
        budget = (base_budget or Budget()).override(raw_budget)

        workers = validate_positive_int(data.get("workers", 1), field_name="workers", maximum=256)

        return cls(
            system=system,
            queries=queries,
            target=target,
            output=output,
            budget=budget,
            workers=workers,
        )

    @classmethod
    def from_file(cls, path: Union[str, Path], base_budget: Optional[Budget] = None) -> "ExperimentConfig":
        config_path = validate_path(path, must_exist=True, field_name="config")
        try:
            with open(config_path, "r") as f:
                data = json.load(f)
        except json.JSONDecodeError as e:
            raise ValidationError(f"Invalid JSON in {config_path}: {e}")
        return cls.from_dict(data, base_budget=base_budget)

    def to_dict(self) -> Dict[str, Any]:
        """Canonical serialization; from_dict(to_dict()) reproduces the config."""
        return {
            "system": self.system,
            "target": self.target,
            "queries": [q.to_dict() for q in self.queries],
            "output": self.output.to_dict(),
            "budget": self.budget.to_dict(),
            "workers": self.workers,
        }
