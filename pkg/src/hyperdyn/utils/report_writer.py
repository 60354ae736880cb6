"""
Report writing for experiment runs.

Records are written as JSON lines (or collected into a CSV) with a SHA-256
hash chain so a report can be checked for truncation or editing. Records
carry no timestamps or process ids: identical configs give byte-identical
reports. Timing is added only when explicitly requested.
"""
import hashlib
import json
import logging
from enum import Enum
from pathlib import Path
from typing import Any, Dict, Iterable, List, Optional

import pandas as pd

logger = logging.getLogger(__name__)


class RecordType(str, Enum):
    """Kinds of report records."""
    VERDICT = "verdict"
    SERIES = "series"
    RESOURCE_ERROR = "resource_error"
    ERROR = "error"


CSV_COLUMNS = ["index", "record_type", "property", "target", "status", "exact", "horizon",
               "params", "witness", "_hash"]


class ReportWriter:
    """
    Hash-chained report writer.

    Features:
    - JSON-lines or CSV output
    - Deterministic serialization (sorted keys)
    - Hash chain for tamper detection
    """

    def __init__(
        self,
        path: Optional[str] = None,
        fmt: str = "jsonl",
        include_hash_chain: bool = True,
    ):
        """
        Args:
            path: Output file; None keeps records in memory only
            fmt: "jsonl" or "csv"
            include_hash_chain: Whether to add the _hash field (default: True)
        """
        self.path = Path(path) if path else None
        self.fmt = fmt
        self.include_hash_chain = include_hash_chain
        self._last_hash: Optional[str] = None
        self.records: List[Dict[str, Any]] = []

    def _compute_hash(self, entry: Dict[str, Any]) -> str:
        """SHA-256 over the entry plus the previous hash."""
        entry_copy = entry.copy()
        if self._last_hash:
            entry_copy["_prev_hash"] = self._last_hash
        serialized = json.dumps(entry_copy, sort_keys=True)
        return hashlib.sha256(serialized.encode()).hexdigest()[:16]

    def write(self, record_type: RecordType, record: Dict[str, Any]) -> Dict[str, Any]:
        """
        Append a record.

        Returns:
            The record as stored (with record_type, index and _hash)
        """
        entry = {"record_type": record_type.value, "index": len(self.records), **record}
        if self.include_hash_chain:
            entry["_hash"] = self._compute_hash(entry)
            self._last_hash = entry["_hash"]
        self.records.append(entry)
        return entry

    def lines(self) -> List[str]:
        return [json.dumps(r, sort_keys=True) for r in self.records]

    def to_frame(self) -> pd.DataFrame:
        rows = []
        for r in self.records:
            row = {column: r.get(column) for column in CSV_COLUMNS}
            for column in ("params", "witness"):
                row[column] = json.dumps(r.get(column, {}), sort_keys=True)
            if r.get("record_type") != RecordType.VERDICT.value:
                row["witness"] = json.dumps(
                    {k: v for k, v in r.items() if k not in CSV_COLUMNS}, sort_keys=True
                )
            rows.append(row)
        return pd.DataFrame(rows, columns=CSV_COLUMNS)

    def render(self) -> str:
        if self.fmt == "csv":
            return self.to_frame().to_csv(index=False)
        return "".join(line + "\n" for line in self.lines())

    def close(self) -> Optional[Path]:
        """Write the report file, if a path was given."""
        if self.path is None:
            return None
        self.path.parent.mkdir(parents=True, exist_ok=True)
        with open(self.path, "w", newline="") as f:
            f.write(self.render())
        logger.info(f"Wrote {len(self.records)} records to {self.path}")
        return self.path


def verify_chain(records: Iterable[Dict[str, Any]]) -> bool:
    """Recompute the hash chain of parsed JSON-lines records."""
    checker = ReportWriter()
    for record in records:
        stored = record.get("_hash")
        body = {k: v for k, v in record.items() if k != "_hash"}
        if checker._compute_hash(body) != stored:
            return False
        checker._last_hash = stored
    return True
