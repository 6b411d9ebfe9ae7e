"""Parse delimiter-separated telemetry fixtures into a validated Dataset.

A fixture directory holds one CSV per entity kind (UTF-8, ``#`` comment
lines, mandatory header row).  Timestamps are stored as integer Unix
seconds; ISO 8601 strings are accepted on input and normalized.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass, field
from pathlib import Path
from typing import Callable, Iterator, Union

from hpckg.errors import DatasetError
from hpckg.rdf_core import parse_datetime


@dataclass(frozen=True, slots=True)
class DataCenterRow:
    id: int
    name: str
    location: str


@dataclass(frozen=True, slots=True)
class SystemRow:
    id: int
    name: str
    dc_id: int


@dataclass(frozen=True, slots=True)
class RackRow:
    id: int
    system_id: int


@dataclass(frozen=True, slots=True)
class NodeRow:
    id: int
    rack_id: int
    pos_x: int
    pos_y: int
    pos_z: int


@dataclass(frozen=True, slots=True)
class PluginRow:
    name: str
    node_id: int


@dataclass(frozen=True, slots=True)
class SensorRow:
    name: str
    type: str
    unit: str
    node_id: int
    plugin_name: str


@dataclass(frozen=True, slots=True)
class UserRow:
    id: int
    name: str
    system_id: int


@dataclass(frozen=True, slots=True)
class JobRow:
    id: int
    name: str
    user_id: int
    group_id: int
    exit_code: int
    start: int
    end: int
    node_ids: tuple[int, ...]


@dataclass(frozen=True, slots=True)
class JobMetricRow:
    job_id: int
    metric_name: str
    metric_value: float


@dataclass(frozen=True, slots=True)
class ReadingRow:
    node_id: int
    sensor_name: str
    ts: int
    value: float


@dataclass
class Dataset:
    """In-memory telemetry tables with resolved foreign keys."""

    data_centers: list[DataCenterRow] = field(default_factory=list)
    hpc_systems: list[SystemRow] = field(default_factory=list)
    racks: list[RackRow] = field(default_factory=list)
    compute_nodes: list[NodeRow] = field(default_factory=list)
    plugins: list[PluginRow] = field(default_factory=list)
    sensors: list[SensorRow] = field(default_factory=list)
    users: list[UserRow] = field(default_factory=list)
    jobs: list[JobRow] = field(default_factory=list)
    job_metrics: list[JobMetricRow] = field(default_factory=list)
    readings: list[ReadingRow] = field(default_factory=list)

    def counts(self) -> dict[str, int]:
        return {
            "data_centers": len(self.data_centers),
            "hpc_systems": len(self.hpc_systems),
            "racks": len(self.racks),
            "compute_nodes": len(self.compute_nodes),
            "plugins": len(self.plugins),
            "sensors": len(self.sensors),
            "users": len(self.users),
            "jobs": len(self.jobs),
            "job_metrics": len(self.job_metrics),
            "readings": len(self.readings),
        }


FIXTURE_FILES = {
    "datacenters.csv": ["dc_id", "name", "location"],
    "systems.csv": ["system_id", "dc_id", "name"],
    "racks.csv": ["rack_id", "system_id"],
    "nodes.csv": ["node_id", "rack_id", "pos_x", "pos_y", "pos_z"],
    "plugins.csv": ["node_id", "plugin_name"],
    "sensors.csv": ["node_id", "plugin_name", "sensor_name", "sensor_type", "sensor_unit"],
    "users.csv": ["user_id", "system_id", "user_name"],
    "jobs.csv": [
        "job_id",
        "user_id",
        "group_id",
        "job_name",
        "exit_code",
        "start_ts",
        "end_ts",
        "node_ids",
    ],
    "job_metrics.csv": ["job_id", "metric_name", "metric_value"],
    "readings.csv": ["node_id", "sensor_name", "ts", "value"],
}


def _rows(path: Path, header: list[str]) -> Iterator[tuple[int, list[str]]]:
    """Yield (line number, fields) for data rows, checking the header."""
    seen_header = False
    with path.open("r", encoding="utf-8", newline="") as fh:
        for lineno, raw in enumerate(fh, start=1):
            line = raw.strip()
            if not line or line.startswith("#"):
                continue
            fields = next(csv.reader([line]))
            if not seen_header:
                if fields != header:
                    raise DatasetError(
                        f"{path.name}:{lineno}: bad header {fields!r}, expected {header!r}"
                    )
                seen_header = True
                continue
            if len(fields) != len(header):
                raise DatasetError(
                    f"{path.name}:{lineno}: expected {len(header)} fields, got {len(fields)}"
                )
            yield lineno, fields
    if not seen_header:
        raise DatasetError(f"{path.name}: missing header row")


def _int(value: str, where: str) -> int:
    try:
        return int(value)
    except ValueError:
        raise DatasetError(f"{where}: not an integer: {value!r}") from None


def _float(value: str, where: str) -> float:
    try:
        return float(value)
    except ValueError:
        raise DatasetError(f"{where}: not a number: {value!r}") from None


def _ts(value: str, where: str) -> int:
    """Unix seconds, given either an integer or an ISO 8601 string."""
    try:
        return int(value)
    except ValueError:
        pass
    try:
        return int(parse_datetime(value).timestamp())
    except ValueError:
        raise DatasetError(f"{where}: not a timestamp: {value!r}") from None


def load_dataset(fixture_dir: Union[str, Path]) -> Dataset:
    """Load and validate a fixture directory.

    Raises :class:`DatasetError` naming the file and line for any missing
    file, malformed row, duplicate primary key, or dangling reference.
    """
    root = Path(fixture_dir)
    if not root.is_dir():
        raise DatasetError(f"fixture directory not found: {root}")
    for fname in FIXTURE_FILES:
        if not (root / fname).is_file():
            raise DatasetError(f"missing fixture file: {fname}")

    ds = Dataset()

    def parse(fname: str, build: Callable[[int, list[str]], None]):
        for lineno, fields in _rows(root / fname, FIXTURE_FILES[fname]):
            build(lineno, fields)

    parse(
        "datacenters.csv",
        lambda ln, f: ds.data_centers.append(
            DataCenterRow(_int(f[0], f"datacenters.csv:{ln}"), f[1], f[2])
        ),
    )
    parse(
        "systems.csv",
        lambda ln, f: ds.hpc_systems.append(
            SystemRow(_int(f[0], f"systems.csv:{ln}"), f[2], _int(f[1], f"systems.csv:{ln}"))
        ),
    )
    parse(
        "racks.csv",
        lambda ln, f: ds.racks.append(
            RackRow(_int(f[0], f"racks.csv:{ln}"), _int(f[1], f"racks.csv:{ln}"))
        ),
    )
    parse(
        "nodes.csv",
        lambda ln, f: ds.compute_nodes.append(
            NodeRow(*(_int(v, f"nodes.csv:{ln}") for v in f))
        ),
    )
    parse(
        "plugins.csv",
        lambda ln, f: ds.plugins.append(PluginRow(f[1], _int(f[0], f"plugins.csv:{ln}"))),
    )
    parse(
        "sensors.csv",
        lambda ln, f: ds.sensors.append(
            SensorRow(f[2], f[3], f[4], _int(f[0], f"sensors.csv:{ln}"), f[1])
        ),
    )
    parse(
        "users.csv",
        lambda ln, f: ds.users.append(
            UserRow(_int(f[0], f"users.csv:{ln}"), f[2], _int(f[1], f"users.csv:{ln}"))
        ),
    )

    def build_job(ln: int, f: list[str]):
        where = f"jobs.csv:{ln}"
        node_ids = tuple(_int(v, where) for v in f[7].split(";") if v)
        ds.jobs.append(
            JobRow(
                id=_int(f[0], where),
                name=f[3],
                user_id=_int(f[1], where),
                group_id=_int(f[2], where),
                exit_code=_int(f[4], where),
                start=_ts(f[5], where),
                end=_ts(f[6], where),
                node_ids=node_ids,
            )
        )

    parse("jobs.csv", build_job)
    parse(
        "job_metrics.csv",
        lambda ln, f: ds.job_metrics.append(
            JobMetricRow(
                _int(f[0], f"job_metrics.csv:{ln}"), f[1], _float(f[2], f"job_metrics.csv:{ln}")
            )
        ),
    )
    parse(
        "readings.csv",
        lambda ln, f: ds.readings.append(
            ReadingRow(
                _int(f[0], f"readings.csv:{ln}"),
                f[1],
                _ts(f[2], f"readings.csv:{ln}"),
                _float(f[3], f"readings.csv:{ln}"),
            )
        ),
    )

    validate_dataset(ds)
    return ds


def validate_dataset(ds: Dataset) -> None:
    """Enforce primary-key uniqueness, foreign keys, and time sanity."""

    def unique(keys, what: str):
        seen = set()
        for k in keys:
            if k in seen:
                raise DatasetError(f"duplicate {what}: {k!r}")
            seen.add(k)
        return seen

    dc_ids = unique((d.id for d in ds.data_centers), "data center id")
    system_ids = unique((s.id for s in ds.hpc_systems), "system id")
    rack_ids = unique((r.id for r in ds.racks), "rack id")
    node_ids = unique((n.id for n in ds.compute_nodes), "node id")
    unique(((p.node_id, p.name) for p in ds.plugins), "plugin")
    sensor_keys = unique(((s.node_id, s.name) for s in ds.sensors), "sensor")
    user_ids = unique((u.id for u in ds.users), "user id")
    job_ids = unique((j.id for j in ds.jobs), "job id")
    unique(((m.job_id, m.metric_name) for m in ds.job_metrics), "job metric")

    plugin_keys = {(p.node_id, p.name) for p in ds.plugins}
    for s in ds.hpc_systems:
        if s.dc_id not in dc_ids:
            raise DatasetError(f"system {s.id} references unknown data center {s.dc_id}")
    for r in ds.racks:
        if r.system_id not in system_ids:
            raise DatasetError(f"rack {r.id} references unknown system {r.system_id}")
    for n in ds.compute_nodes:
        if n.rack_id not in rack_ids:
            raise DatasetError(f"node {n.id} references unknown rack {n.rack_id}")
    for p in ds.plugins:
        if p.node_id not in node_ids:
            raise DatasetError(f"plugin {p.name!r} references unknown node {p.node_id}")
    for s in ds.sensors:
        if s.node_id not in node_ids:
            raise DatasetError(f"sensor {s.name!r} references unknown node {s.node_id}")
        if (s.node_id, s.plugin_name) not in plugin_keys:
            raise DatasetError(
                f"sensor {s.name!r} references unknown plugin {s.plugin_name!r} "
                f"on node {s.node_id}"
            )
    for u in ds.users:
        if u.system_id not in system_ids:
            raise DatasetError(f"user {u.id} references unknown system {u.system_id}")
    for j in ds.jobs:
        if j.user_id not in user_ids:
            raise DatasetError(f"job {j.id} references unknown user {j.user_id}")
        if j.end < j.start:
            raise DatasetError(f"job {j.id} ends before it starts")
        for nid in j.node_ids:
            if nid not in node_ids:
                raise DatasetError(f"job {j.id} references unknown node {nid}")
    for m in ds.job_metrics:
        if m.job_id not in job_ids:
            raise DatasetError(f"metric {m.metric_name!r} references unknown job {m.job_id}")
    for r in ds.readings:
        if r.ts < 0:
            raise DatasetError(f"reading timestamp {r.ts} is negative")
        if (r.node_id, r.sensor_name) not in sensor_keys:
            raise DatasetError(
                f"reading references unknown sensor {r.sensor_name!r} on node {r.node_id}"
            )


def slice_by_time(ds: Dataset, t1: int, t2: int) -> Dataset:
    """Restrict readings to ``[t1, t2)`` and jobs to those overlapping it.

    Static entities (topology, users) are retained unchanged.
    """
    if t1 > t2:
        raise DatasetError(f"invalid time range: {t1} > {t2}")
    jobs = [j for j in ds.jobs if t1 < t2 and j.start < t2 and j.end >= t1]
    kept_jobs = {j.id for j in jobs}
    return Dataset(
        data_centers=list(ds.data_centers),
        hpc_systems=list(ds.hpc_systems),
        racks=list(ds.racks),
        compute_nodes=list(ds.compute_nodes),
        plugins=list(ds.plugins),
        sensors=list(ds.sensors),
        users=list(ds.users),
        jobs=jobs,
        job_metrics=[m for m in ds.job_metrics if m.job_id in kept_jobs],
        readings=[r for r in ds.readings if t1 <= r.ts < t2],
    )
