"""A small file-backed database of Cox rings.

One JSON object per line; every record carries a SpaceFile payload in
``data``.  Writes go through a lock file and an atomic rename.
"""

from __future__ import annotations

import json
import os
import tempfile
from dataclasses import asdict, dataclass, field
from importlib.resources import files
from pathlib import Path
from typing import Iterable, Optional, Union

from filelock import FileLock

from .mds import mds_from_spacefile, ring_from_spacefile


class DatabaseError(ValueError):
    pass


class RecordNotFound(DatabaseError, KeyError):
    def __str__(self) -> str:
        return str(self.args[0]) if self.args else "record not found"


@dataclass
class DbRecord:
    id: int
    name: str
    data: dict
    description: str = ""
    tags: list = field(default_factory=list)
    dim: Optional[int] = None
    picard_number: Optional[int] = None
    source: str = ""

    @classmethod
    def from_json(cls, obj: dict) -> "DbRecord":
        try:
            return cls(
                id=int(obj["id"]),
                name=str(obj["name"]),
                data=dict(obj["data"]),
                description=str(obj.get("description", "")),
                tags=[str(t) for t in obj.get("tags", [])],
                dim=obj.get("dim"),
                picard_number=obj.get("picard_number"),
                source=str(obj.get("source", "")),
            )
        except (KeyError, TypeError, ValueError) as exc:
            raise DatabaseError(f"malformed record: {exc}") from exc

    def to_json(self) -> dict:
        return asdict(self)

    def haystack(self) -> str:
        return "\n".join([self.name, self.description, *self.tags]).lower()


def default_path() -> Path:
    return Path(str(files("moridream.data").joinpath("coxdb.jsonl")))


class CoxDatabase:
    def __init__(self, path: Union[str, Path, None] = None):
        self.path = Path(path) if path is not None else default_path()
        self.records: list[DbRecord] = []
        if self.path.exists():
            self._load()

    def _load(self) -> None:
        seen = set()
        with open(self.path, encoding="utf-8") as fh:
            for lineno, line in enumerate(fh, 1):
                if not line.strip():
                    continue
                try:
                    rec = DbRecord.from_json(json.loads(line))
                except json.JSONDecodeError as exc:
                    raise DatabaseError(f"{self.path}:{lineno}: {exc}") from exc
                if rec.id in seen:
                    raise DatabaseError(f"{self.path}:{lineno}: duplicate id {rec.id}")
                seen.add(rec.id)
                self.records.append(rec)

    def __len__(self) -> int:
        return len(self.records)

    def __iter__(self):
        return iter(sorted(self.records, key=lambda r: r.id))

    def ids(self) -> list[int]:
        return sorted(r.id for r in self.records)

    def search(self, query: str) -> list[DbRecord]:
        """Records containing every ``AND``-separated term (case-insensitive)."""
        terms = [t.strip().lower() for t in query.split(" AND ")] if query.strip() else []
        terms = [t for t in terms if t]
        return [r for r in self if all(t in r.haystack() for t in terms)]

    def get(self, rid: int) -> DbRecord:
        for r in self.records:
            if r.id == rid:
                return r
        raise RecordNotFound(f"no record with id {rid}")

    def ingest(self, record: Union[DbRecord, dict], check: bool = True) -> DbRecord:
        if isinstance(record, dict):
            record = DbRecord.from_json(record)
        with FileLock(str(self.path) + ".lock"):
            # pick up concurrent writers before checking the id
            self.records = []
            if self.path.exists():
                self._load()
            if any(r.id == record.id for r in self.records):
                raise DatabaseError(f"duplicate id {record.id}")
            validate_payload(record.data, check=check)
            self.records.append(record)
            self._write()
        return record

    def _write(self) -> None:
        self.path.parent.mkdir(parents=True, exist_ok=True)
        fd, tmp = tempfile.mkstemp(dir=self.path.parent, prefix=".coxdb-", suffix=".tmp")
        try:
            with os.fdopen(fd, "w", encoding="utf-8") as fh:
                for r in self:
                    fh.write(json.dumps(r.to_json(), sort_keys=True) + "\n")
            os.replace(tmp, self.path)
        except BaseException:
            if os.path.exists(tmp):
                os.unlink(tmp)
            raise


def validate_payload(data: dict, check: bool = True) -> None:
    """Raise if ``data`` is not a usable SpaceFile."""
    try:
        if data.get("ample") is None:
            ring_from_spacefile(data, check=check)
        else:
            mds_from_spacefile(data, check=check, strict=False)
    except KeyError as exc:
        raise DatabaseError(f"SpaceFile is missing {exc}") from exc


def open_db(path=None) -> CoxDatabase:
    return CoxDatabase(path)


def search(db: CoxDatabase, query: str) -> list[DbRecord]:
    return db.search(query)


def get(db: CoxDatabase, rid: int) -> DbRecord:
    return db.get(rid)


def ingest(db: CoxDatabase, record, check: bool = True) -> CoxDatabase:
    db.ingest(record, check=check)
    return db


def export(record: DbRecord, fmt: str = "spacefile") -> str:
    if fmt == "spacefile":
        return json.dumps(record.data, indent=1, sort_keys=True)
    if fmt == "latex":
        g = record.data["grading"]
        matrix = g["matrix"]
        lines = [f"% {record.name}"]
        lines.append("\\begin{tabular}{l}")
        for rel in record.data.get("relations", []):
            lines.append(f"\\verb|{rel}| \\\\")
        lines.append("\\end{tabular}")
        ncols = len(matrix[0]) if matrix else 0
        lines.append("\\begin{tabular}{" + "r" * ncols + "}")
        for row in matrix:
            lines.append(" & ".join(str(x) for x in row) + " \\\\")
        lines.append("\\end{tabular}")
        return "\n".join(lines)
    raise DatabaseError(f"unknown export format {fmt!r}")


def seed_records() -> Iterable[DbRecord]:
    return list(CoxDatabase(default_path()))
