"""
Experiment runner

Builds the system an ExperimentConfig names, lifts it when the target is
lifted:M, runs every query and hands one record per query to the report
writer in query order. Queries run in worker processes that rebuild the
system once each; when the wall clock budget runs out the workers are
terminated and the unfinished queries become resource_error records.
"""
import logging
import multiprocessing
import time
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Callable, Dict, List, Optional, Tuple

from hyperdyn.config import Budget, ExperimentConfig, QuerySpec
from hyperdyn.core.family import MapFamily, apply_budget
from hyperdyn.core.serialization import family_from_dict, load_system
from hyperdyn.detectors import (
    check_chaotic_dependence,
    check_cofinitely_sensitive,
    check_dense_periodic,
    check_equicontinuous,
    check_expansive,
    check_li_yorke_sensitive,
    check_sensitive,
    check_topological_mixing,
    check_total_transitive,
    check_transitive,
    check_weak_mixing_order,
    find_scrambled_pairs,
    find_scrambled_set,
)
from hyperdyn.detectors.base import WITNESS_LIMIT, jsonable
from hyperdyn.entropy import (
    LOG_BASES,
    OpenCover,
    entropy_series,
    hyper_entropy_compare,
    separated_entropy,
)
from hyperdyn.hyperspace import as_hyper_system
from hyperdyn.utils.report_writer import RecordType, ReportWriter
from hyperdyn.utils.validation import ResourceError, ValidationError
from hyperdyn.zoo import SystemRecipe

logger = logging.getLogger(__name__)

# Parameters each query property accepts
QUERY_PARAMS: Dict[str, Tuple[str, ...]] = {
    "dense_periodic": ("horizon",),
    "transitive": ("horizon",),
    "total_transitive": ("max_n", "horizon"),
    "weak_mixing": ("order", "horizon"),
    "topological_mixing": ("horizon",),
    "sensitive": ("delta", "horizon"),
    "cofinitely_sensitive": ("delta", "horizon"),
    "equicontinuous": ("mode",),
    "scrambled_pairs": ("delta", "horizon", "window"),
    "li_yorke_sensitive": ("delta", "horizon", "window"),
    "scrambled_set": ("delta", "horizon", "window", "min_size"),
    "expansive": ("delta", "horizon", "start"),
    "chaotic_dependence": ("horizon", "window"),
    "entropy": ("cover", "k_max", "log_base"),
    "separated_entropy": ("epsilon", "n_max", "log_base"),
    "hyper_entropy": ("m", "cover", "k_max", "log_base"),
}

REQUIRED_PARAMS: Dict[str, Tuple[str, ...]] = {
    "sensitive": ("delta",),
    "cofinitely_sensitive": ("delta",),
    "scrambled_pairs": ("delta",),
    "li_yorke_sensitive": ("delta",),
    "scrambled_set": ("delta",),
    "expansive": ("delta",),
    "separated_entropy": ("epsilon",),
}


def validate_queries(queries: List[QuerySpec]):
    """
    Check parameter names against each property.

    Raises:
        ValidationError: With the dotted path of the offending parameter
    """
    for i, query in enumerate(queries):
        allowed = QUERY_PARAMS[query.property]
        for key in query.params:
            if key not in allowed:
                raise ValidationError(
                    f"queries[{i}].params.{key} is not a parameter of {query.property} "
                    f"(expected one of {', '.join(allowed)})"
                )
        for key in REQUIRED_PARAMS.get(query.property, ()):
            if query.params.get(key) is None:
                raise ValidationError(f"queries[{i}].params.{key} is required for {query.property}")
        log_base = query.params.get("log_base", "e")
        if log_base not in LOG_BASES:
            raise ValidationError(f"queries[{i}].params.log_base must be one of {LOG_BASES}")


def build_system(system: Dict[str, Any], budget: Optional[Budget] = None) -> Tuple[MapFamily, bool]:
    """
    Build the base system of a config.

    Returns:
        (family, discretized) where discretized marks interval-grid models

    Raises:
        ValidationError: naming the offending system field
    """
    if "recipe" in system:
        recipe = SystemRecipe.from_dict(system["recipe"], field_name="system.recipe")
        family = recipe.build(budget=budget, field_name="system.recipe")
        return apply_budget(family, budget), recipe.discretized
    if "file" in system:
        return apply_budget(load_system(system["file"]), budget), False
    try:
        family = family_from_dict(system.get("description"))
    except ValidationError as e:
        raise ValidationError(f"system.description: {e}")
    return apply_budget(family, budget), False


def _cover(family: MapFamily, raw: Any) -> OpenCover:
    if raw is None or raw == "opens":
        return OpenCover.from_opens(family.space).check()
    if not isinstance(raw, list):
        raise ValidationError("cover must be 'opens' or a list of point-id lists")
    return OpenCover.from_ids(family.space, raw)


def _capped(items: List[Any]) -> Dict[str, Any]:
    if len(items) <= WITNESS_LIMIT:
        return {"count": len(items), "items": items}
    return {"count": len(items), "items": items[:WITNESS_LIMIT], "truncated": True}


def _scrambled_pairs(family: MapFamily, p: Dict[str, Any], budget: Budget) -> Dict[str, Any]:
    pairs, verdict = find_scrambled_pairs(family, p["delta"], horizon=p.get("horizon"),
                                          window=p.get("window"))
    record = verdict.to_dict()
    record["property"] = "scrambled_pairs"
    record["witness"] = {**record["witness"], "pairs": _capped(jsonable(pairs))}
    return record


def _entropy(family: MapFamily, p: Dict[str, Any], budget: Budget) -> Dict[str, Any]:
    log_base = p.get("log_base", "e")
    series = entropy_series(family, _cover(family, p.get("cover")), p.get("k_max", 6), budget=budget)
    return {"property": "entropy", "params": jsonable(p), "series": series.to_dict(log_base)}


def _separated_entropy(family: MapFamily, p: Dict[str, Any], budget: Budget) -> Dict[str, Any]:
    log_base = p.get("log_base", "e")
    series = separated_entropy(family, p["epsilon"], p.get("n_max", 6), budget=budget)
    return {"property": "separated_entropy", "params": jsonable(p), "series": series.to_dict(log_base)}


def _hyper_entropy(family: MapFamily, p: Dict[str, Any], budget: Budget) -> Dict[str, Any]:
    log_base = p.get("log_base", "e")
    comparison = hyper_entropy_compare(family, p.get("m", 2), _cover(family, p.get("cover")),
                                       p.get("k_max", 4), budget=budget)
    return {"property": "hyper_entropy", "params": jsonable(p), "series": comparison.to_dict(log_base)}


def _verdict(check: Callable[..., Any]) -> Callable[[MapFamily, Dict[str, Any], Budget], Dict[str, Any]]:
    def handler(family: MapFamily, p: Dict[str, Any], budget: Budget) -> Dict[str, Any]:
        return check(family, **p).to_dict()
    return handler


def _scrambled_set(family: MapFamily, p: Dict[str, Any], budget: Budget) -> Dict[str, Any]:
    return find_scrambled_set(family, **p).to_dict()


def _weak_mixing(family: MapFamily, p: Dict[str, Any], budget: Budget) -> Dict[str, Any]:
    return check_weak_mixing_order(family, k=p.get("order", 2), horizon=p.get("horizon"),
                                   budget=budget).to_dict()


HANDLERS: Dict[str, Callable[[MapFamily, Dict[str, Any], Budget], Dict[str, Any]]] = {
    "dense_periodic": _verdict(check_dense_periodic),
    "transitive": _verdict(check_transitive),
    "total_transitive": _verdict(check_total_transitive),
    "weak_mixing": _weak_mixing,
    "topological_mixing": _verdict(check_topological_mixing),
    "sensitive": _verdict(check_sensitive),
    "cofinitely_sensitive": _verdict(check_cofinitely_sensitive),
    "equicontinuous": _verdict(check_equicontinuous),
    "scrambled_pairs": _scrambled_pairs,
    "li_yorke_sensitive": _verdict(check_li_yorke_sensitive),
    "scrambled_set": _scrambled_set,
    "expansive": _verdict(check_expansive),
    "chaotic_dependence": _verdict(check_chaotic_dependence),
    "entropy": _entropy,
    "separated_entropy": _separated_entropy,
    "hyper_entropy": _hyper_entropy,
}


@dataclass
class RunResult:
    records: List[Dict[str, Any]] = field(default_factory=list)
    exit_code: int = 0
    report_path: Optional[Path] = None

    @property
    def errors(self) -> int:
        return sum(1 for r in self.records if r["record_type"] == RecordType.ERROR.value)


class ExperimentRunner:
    """Runs the queries of one experiment config"""

    def __init__(self, config: ExperimentConfig):
        """
        Args:
            config: Parsed experiment config

        Raises:
            ValidationError: If a query names an unknown parameter
        """
        validate_queries(config.queries)
        self.config = config
        self.budget = config.budget
        self.target = config.target
        self.discretized = False

    def build(self) -> MapFamily:
        """
        Build the queried system (base, or its lift on sets of size <= M).

        Raises:
            ValidationError: If the system source is invalid
            ResourceError: If the system exceeds the budget
        """
        family, self.discretized = build_system(self.config.system, budget=self.budget)
        m = self.config.lifted_cardinality
        if m is not None:
            family = as_hyper_system(family, m, budget=self.budget)
        logger.info(f"Built {family.name} ({family.space.size} points, target {self.target})")
        return family

    def run_query(self, family: MapFamily, index: int, query: QuerySpec) -> Tuple[RecordType, Dict[str, Any]]:
        """Run one query; errors become records instead of propagating."""
        started = time.perf_counter()
        try:
            record = HANDLERS[query.property](family, dict(query.params), self.budget)
            record_type = RecordType.SERIES if "series" in record else RecordType.VERDICT
        except ResourceError as e:
            logger.warning(f"queries[{index}] ({query.property}) exceeded the budget: {e}")
            record_type = RecordType.RESOURCE_ERROR
            record = self._error_record(query, e)
        except ValidationError as e:
            logger.error(f"queries[{index}] ({query.property}) is invalid: {e}")
            record_type = RecordType.ERROR
            record = {"property": query.property, "params": jsonable(query.params),
                      "message": f"queries[{index}].params: {e}"}
        except Exception as e:
            logger.error(f"queries[{index}] ({query.property}) failed: {e}")
            record_type = RecordType.ERROR
            record = {"property": query.property, "params": jsonable(query.params),
                      "message": f"{type(e).__name__}: {e}"}
        if self.config.output.include_timing:
            record["wall_time_ms"] = round((time.perf_counter() - started) * 1000, 3)
        return record_type, record

    def _error_record(self, query: QuerySpec, error: ResourceError) -> Dict[str, Any]:
        record = {
            "property": query.property,
            "params": jsonable(query.params),
            "message": str(error),
            "quantity": error.quantity,
            "limit": error.limit,
        }
        if error.partial is not None and hasattr(error.partial, "to_dict"):
            record["partial"] = error.partial.to_dict(query.params.get("log_base", "e"))
        return record

    def _decorate(self, record: Dict[str, Any]) -> Dict[str, Any]:
        record = {**record, "target": self.target}
        if self.discretized:
            record["discretized"] = True
        return record

    def execute(self, writer: Optional[ReportWriter] = None) -> RunResult:
        """
        Run every query and write the report.

        Returns:
            RunResult with the records and exit code (0 iff no query errored)

        Raises:
            ValidationError: If the system cannot be built
        """
        output = self.config.output
        writer = writer or ReportWriter(output.path, fmt=output.format, include_hash_chain=output.hash_chain)
        queries = self.config.queries

        try:
            self.build()
            outcomes = self._run_all(queries)
        except ResourceError as e:
            logger.warning(f"System for target {self.target} exceeds the budget: {e}")
            outcomes = [(RecordType.RESOURCE_ERROR, self._error_record(q, e)) for q in queries]

        for record_type, record in outcomes:
            writer.write(record_type, self._decorate(record))

        result = RunResult(records=writer.records, report_path=writer.close())
        result.exit_code = 1 if result.errors else 0
        logger.info(f"Run finished: {len(result.records)} records, exit code {result.exit_code}")
        return result

    def _run_all(self, queries: List[QuerySpec]) -> List[Tuple[RecordType, Dict[str, Any]]]:
        deadline = time.monotonic() + self.budget.wall_clock_seconds
        outcomes = []
        workers = min(self.config.workers, len(queries)) or 1
        pool = multiprocessing.Pool(processes=workers, initializer=_start_worker, initargs=(self.config,))
        try:
            pending = [pool.apply_async(_run_in_worker, (i,)) for i in range(len(queries))]
            for i, (query, result) in enumerate(zip(queries, pending)):
                try:
                    outcomes.append(result.get(timeout=max(0.0, deadline - time.monotonic())))
                except multiprocessing.TimeoutError:
                    error = ResourceError(
                        f"wall clock budget of {self.budget.wall_clock_seconds}s exhausted",
                        limit=self.budget.wall_clock_seconds,
                    )
                    logger.warning(f"queries[{i}] ({query.property}) timed out")
                    outcomes.append((RecordType.RESOURCE_ERROR, self._error_record(query, error)))
                except Exception as e:
                    logger.error(f"queries[{i}] ({query.property}) failed in its worker: {e}")
                    outcomes.append((RecordType.ERROR, {"property": query.property,
                                                        "params": jsonable(query.params),
                                                        "message": f"{type(e).__name__}: {e}"}))
        finally:
            # kills queries still running past the deadline
            pool.terminate()
            pool.join()
        return outcomes


# Per-process state of a query worker
_worker: Dict[str, Any] = {}


def _start_worker(config: ExperimentConfig):
    try:
        runner = ExperimentRunner(config)
        _worker["runner"], _worker["family"] = runner, runner.build()
    except Exception as e:
        _worker["error"] = e


def _run_in_worker(index: int) -> Tuple[RecordType, Dict[str, Any]]:
    if "error" in _worker:
        raise _worker["error"]
    runner = _worker["runner"]
    return runner.run_query(_worker["family"], index, runner.config.queries[index])


def run(config: ExperimentConfig, writer: Optional[ReportWriter] = None) -> RunResult:
    """Run an experiment config and write its report."""
    return ExperimentRunner(config).execute(writer=writer)
