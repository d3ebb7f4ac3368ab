"""Append-only JSONL result records with checksums, checkpoints and replay."""

from __future__ import annotations

import hashlib
import json
import os
import time
from dataclasses import asdict, dataclass, field
from pathlib import Path
from typing import Any, Iterator, Optional

from ..errors import VersionMismatch

SCHEMA_VERSION = 1
CODE_VERSION = "0.1.0"

CANDIDATE = "COUNTEREXAMPLE-CANDIDATE"


def _canonical(obj: Any) -> str:
    return json.dumps(obj, sort_keys=True, separators=(",", ":"), default=_default)


def _default(o):
    if isinstance(o, (set, frozenset)):
        return sorted(o)
    if isinstance(o, tuple):
        return list(o)
    raise TypeError(f"not serializable: {type(o).__name__}")


def checksum(payload: dict) -> str:
    body = {k: v for k, v in payload.items() if k != "checksum"}
    return hashlib.sha256(_canonical(body).encode()).hexdigest()


@dataclass
class ResultRecord:
    experiment: str
    instance: dict
    verdict: str
    certificates: dict = field(default_factory=dict)
    timing: float = 0.0
    seed: Optional[int] = None
    cursor: Optional[int] = None
    range_id: Optional[int] = None
    schema: int = SCHEMA_VERSION

    def to_json(self) -> dict:
        d = json.loads(_canonical(asdict(self)))
        d["checksum"] = checksum(d)
        return d

    @classmethod
    def from_json(cls, data: dict, verify: bool = True) -> "ResultRecord":
        if verify:
            if data.get("schema") != SCHEMA_VERSION:
                raise VersionMismatch(f"record schema {data.get('schema')} != {SCHEMA_VERSION}")
            if data.get("checksum") != checksum(data):
                raise VersionMismatch("record checksum does not match its contents")
        body = {k: v for k, v in data.items() if k != "checksum"}
        return cls(**body)


class RecordWriter:
    """Single writer: header line first, then one record per line."""

    def __init__(self, path, config: dict, append: bool = False):
        self.path = Path(path)
        fresh = not (append and self.path.exists() and self.path.stat().st_size)
        self._fh = open(self.path, "a" if not fresh else "w", encoding="utf-8")
        if fresh:
            header = {"type": "header", "schema": SCHEMA_VERSION, "code_version": CODE_VERSION,
                      "config": json.loads(_canonical(config)), "created": time.time()}
            self._fh.write(_canonical(header) + "\n")
            self._fh.flush()

    def write(self, rec: ResultRecord) -> None:
        self._fh.write(_canonical(rec.to_json()) + "\n")
        self._fh.flush()

    def close(self) -> None:
        self._fh.close()

    def __enter__(self):
        return self

    def __exit__(self, *exc):
        self.close()


def read_records(path) -> tuple[dict, list[ResultRecord]]:
    header = None
    records = []
    with open(path, encoding="utf-8") as fh:
        for line in fh:
            if not line.strip():
                continue
            data = json.loads(line)
            if data.get("type") == "header":
                if data.get("schema") != SCHEMA_VERSION:
                    raise VersionMismatch(f"file schema {data.get('schema')} != {SCHEMA_VERSION}")
                header = data
            else:
                records.append(ResultRecord.from_json(data))
    return header or {}, records


def save_checkpoint(path, cursor: int, extra: Optional[dict] = None) -> None:
    tmp = Path(str(path) + ".tmp")
    tmp.write_text(_canonical({"cursor": cursor, **(extra or {})}))
    os.replace(tmp, path)


def load_checkpoint(path) -> Optional[dict]:
    p = Path(path)
    if not p.exists():
        return None
    return json.loads(p.read_text())
