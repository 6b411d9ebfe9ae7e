"""Deterministic synthetic-telemetry generator.

Produces fixture Datasets shaped like real monitoring deployments: a
topology of data centers, systems, racks and nodes; per-node collector
plugins with sensors sampled on a fixed interval; users submitting jobs
with per-job metrics.  Generation is a pure function of the parameters,
so a fixed seed always yields a byte-identical fixture directory.
"""

from __future__ import annotations

import os
import random
from dataclasses import dataclass
from pathlib import Path
from typing import Union

from hpckg.errors import DatasetError
from hpckg.ingest import (
    DataCenterRow,
    Dataset,
    JobMetricRow,
    JobRow,
    NodeRow,
    PluginRow,
    RackRow,
    ReadingRow,
    SensorRow,
    SystemRow,
    UserRow,
)

#: Fixture clock origin: a fixed UTC midnight, so day windows align.
FIXTURE_EPOCH = 1_643_673_600

#: Job metric vocabulary, ordered so small metric counts still cover the
#: quantities the bundled competency queries ask about.
METRIC_VOCABULARY = (
    "energy",
    "power_avg",
    "requested_walltime",
    "wait_time",
    "arithmetic_intensity",
    "frequency",
    "cpu_util_avg",
    "gpu_util_avg",
    "mem_read_vol",
    "execution_cycles",
)

#: Exit code designating a job killed for exceeding its walltime.
WALLTIME_EXIT_CODE = 152

_SENSOR_KINDS = (
    ("power", "ps{i}_input_power", "W", (50.0, 2000.0)),
    ("temperature", "p0_core{i}_temp", "C", (20.0, 90.0)),
    ("utilization", "cpu_util_core{i}", "%", (0.0, 100.0)),
)

_LOCATIONS = ("Bologna", "Kobe", "Lugano", "Juelich", "Austin", "Tsukuba")


@dataclass(frozen=True, slots=True)
class FixtureParams:
    seed: int = 0
    data_centers: int = 1
    systems_per_dc: int = 1
    racks_per_system: int = 1
    nodes_per_rack: int = 1
    sensors_per_node: int = 1
    sampling_interval: int = 20
    duration: int = 86_400
    users_per_system: int = 0
    jobs_per_system: int = 0
    metrics_per_job: int = 0
    job_centric: bool = False

    def __post_init__(self):
        counts = (
            self.data_centers,
            self.systems_per_dc,
            self.racks_per_system,
            self.nodes_per_rack,
            self.sensors_per_node,
            self.users_per_system,
            self.jobs_per_system,
            self.metrics_per_job,
        )
        if any(c < 0 for c in counts):
            raise DatasetError("fixture counts must be non-negative")
        if self.sampling_interval <= 0:
            raise DatasetError("sampling interval must be positive")
        if self.duration < 0:
            raise DatasetError("duration must be non-negative")

    @property
    def total_nodes(self) -> int:
        return (
            self.data_centers
            * self.systems_per_dc
            * self.racks_per_system
            * self.nodes_per_rack
        )

    @property
    def ticks(self) -> int:
        return self.duration // self.sampling_interval

    @property
    def projected_readings(self) -> int:
        return self.total_nodes * self.sensors_per_node * self.ticks


def sensor_descriptor(index: int) -> tuple[str, str, str, tuple[float, float]]:
    """(type, name, unit, value range) of the index-th sensor on a node.

    The first sensor is always the node's aggregate power stream.
    """
    kind, stem, unit, rng = _SENSOR_KINDS[index % len(_SENSOR_KINDS)]
    name = "total_power" if index == 0 else stem.format(i=index)
    return kind, name, unit, rng


def generate(
    params: FixtureParams,
    max_readings: int = 5_000_000,
    include_readings: bool = True,
) -> Dataset:
    """Build a Dataset from ``params``; deterministic for a fixed seed.

    ``include_readings=False`` yields just the static entities and jobs,
    which is enough to price a build without materializing the readings.
    Refuses shapes whose projected reading count exceeds ``max_readings``.
    """
    if include_readings and params.projected_readings > max_readings:
        raise DatasetError(
            f"projected reading count {params.projected_readings} exceeds "
            f"cap {max_readings}"
        )

    topo_rng = random.Random(f"{params.seed}:topology")
    job_rng = random.Random(f"{params.seed}:jobs")
    value_rng = random.Random(f"{params.seed}:values")

    ds = Dataset()
    t0 = FIXTURE_EPOCH

    node_seq = 0
    rack_seq = 0
    system_seq = 0
    user_seq = 0
    job_seq = 0
    system_nodes: dict[int, list[int]] = {}
    system_users: dict[int, list[UserRow]] = {}

    for dc_idx in range(params.data_centers):
        dc_id = dc_idx + 1
        ds.data_centers.append(
            DataCenterRow(dc_id, f"dc{dc_id}", _LOCATIONS[dc_idx % len(_LOCATIONS)])
        )
        for _ in range(params.systems_per_dc):
            system_seq += 1
            sid = system_seq
            ds.hpc_systems.append(SystemRow(sid, f"system{sid}", dc_id))
            system_nodes[sid] = []
            system_users[sid] = []
            for rack_local in range(params.racks_per_system):
                rack_seq += 1
                ds.racks.append(RackRow(rack_seq, sid))
                for slot in range(params.nodes_per_rack):
                    node_seq += 1
                    ds.compute_nodes.append(
                        NodeRow(node_seq, rack_seq, slot % 4, (slot // 4) % 4, rack_seq)
                    )
                    system_nodes[sid].append(node_seq)
                    ds.plugins.append(PluginRow("ipmi", node_seq))
                    for s_idx in range(params.sensors_per_node):
                        kind, name, unit, _ = sensor_descriptor(s_idx)
                        ds.sensors.append(SensorRow(name, kind, unit, node_seq, "ipmi"))

    for sid in sorted(system_nodes):
        for u_local in range(params.users_per_system):
            user_seq += 1
            row = UserRow(user_seq, f"user{user_seq}", sid)
            ds.users.append(row)
            system_users[sid].append(row)

    # Job boundaries avoid sampling-tick alignment and repeats so time
    # nodes stay distinct from reading time nodes and from each other.
    used_ts: set[int] = set()

    def fresh_ts(lo: int, hi: int) -> int:
        for _ in range(64):
            ts = job_rng.randrange(lo, max(lo + 1, hi))
            if ts not in used_ts and (ts - t0) % params.sampling_interval != 0:
                used_ts.add(ts)
                return ts
        ts = lo
        while ts in used_ts or (ts - t0) % params.sampling_interval == 0:
            ts += 1
        used_ts.add(ts)
        return ts

    metric_count_base = params.metrics_per_job
    if params.job_centric:
        metric_count_base = len(METRIC_VOCABULARY)

    for sid in sorted(system_nodes):
        users = system_users[sid]
        nodes = system_nodes[sid]
        if not users or not nodes:
            continue
        walltime_hit = False
        for j_local in range(params.jobs_per_system):
            job_seq += 1
            user = users[job_rng.randrange(len(users))]
            window = max(params.duration, 2)
            start = fresh_ts(t0, t0 + window - 1)
            dur = job_rng.randrange(60, max(120, min(window, 14_400)))
            end = min(start + dur, t0 + window)
            if end <= start:
                end = start + 1
            while end in used_ts or (end - t0) % params.sampling_interval == 0:
                end += 1
            used_ts.add(end)

            if job_rng.random() < 0.9:
                exit_code = 0
            else:
                exit_code = job_rng.choice((1, WALLTIME_EXIT_CODE))
            if exit_code == WALLTIME_EXIT_CODE:
                walltime_hit = True
            if (
                j_local == params.jobs_per_system - 1
                and params.jobs_per_system >= 5
                and not walltime_hit
            ):
                exit_code = WALLTIME_EXIT_CODE

            width_choices = (1, 1, 2, max(1, (len(nodes) * 3) // 10))
            width = min(len(nodes), width_choices[job_rng.randrange(len(width_choices))])
            first = job_rng.randrange(0, len(nodes) - width + 1)
            node_ids = tuple(nodes[first : first + width])

            ds.jobs.append(
                JobRow(
                    id=job_seq,
                    name=f"job{job_seq}",
                    user_id=user.id,
                    group_id=100 + (users.index(user) % 3),
                    exit_code=exit_code,
                    start=start,
                    end=end,
                    node_ids=node_ids,
                )
            )

            # Alternate metric counts between systems so cross-system
            # metric comparisons have something to report.
            n_metrics = 0
            if metric_count_base:
                n_metrics = min(len(METRIC_VOCABULARY), metric_count_base + ((sid - 1) % 2))
            for name in METRIC_VOCABULARY[:n_metrics]:
                ds.job_metrics.append(
                    JobMetricRow(job_seq, name, _metric_value(name, job_rng, end - start, exit_code))
                )

    if include_readings and params.ticks > 0:
        for node in ds.compute_nodes:
            for s_idx in range(params.sensors_per_node):
                kind, name, _, (lo, hi) = sensor_descriptor(s_idx)
                for i in range(params.ticks):
                    ds.readings.append(
                        ReadingRow(
                            node.id,
                            name,
                            t0 + i * params.sampling_interval,
                            round(value_rng.uniform(lo, hi), 3),
                        )
                    )
    return ds


def _metric_value(name: str, rng: random.Random, duration: int, exit_code: int) -> float:
    if name == "energy":
        return round(rng.uniform(1e5, 1e7), 3)
    if name == "power_avg":
        return round(rng.uniform(100.0, 2000.0), 3)
    if name == "requested_walltime":
        # Walltime kills happen when the request was below the actual runtime.
        if exit_code == WALLTIME_EXIT_CODE:
            return round(duration * 0.8, 3)
        return round(duration * 2.0, 3)
    if name == "wait_time":
        return round(rng.uniform(0.0, 7200.0), 3)
    if name == "arithmetic_intensity":
        return round(rng.uniform(0.2, 3.0), 3)
    if name == "frequency":
        return float(rng.choice((2000, 2200)))
    if name in ("cpu_util_avg", "gpu_util_avg"):
        return round(rng.uniform(0.0, 100.0), 3)
    if name == "mem_read_vol":
        return round(rng.uniform(1.0, 500.0), 3)
    return round(rng.uniform(1e9, 1e12), 3)


# ---------------------------------------------------------------------------
# Fixture directory writer


def _atomic_write(path: Path, text: str):
    tmp = path.with_name(path.name + ".tmp")
    tmp.write_text(text, encoding="utf-8")
    os.replace(tmp, path)


def write_fixture(ds: Dataset, out_dir: Union[str, Path]) -> list[Path]:
    """Write the fixture CSV layout; inverse of :func:`hpckg.ingest.load_dataset`."""
    root = Path(out_dir)
    root.mkdir(parents=True, exist_ok=True)
    written: list[Path] = []

    def emit(fname: str, header: list[str], rows):
        lines = [",".join(header)]
        lines.extend(",".join(str(v) for v in row) for row in rows)
        path = root / fname
        _atomic_write(path, "\n".join(lines) + "\n")
        written.append(path)

    emit(
        "datacenters.csv",
        ["dc_id", "name", "location"],
        ((d.id, d.name, d.location) for d in ds.data_centers),
    )
    emit(
        "systems.csv",
        ["system_id", "dc_id", "name"],
        ((s.id, s.dc_id, s.name) for s in ds.hpc_systems),
    )
    emit("racks.csv", ["rack_id", "system_id"], ((r.id, r.system_id) for r in ds.racks))
    emit(
        "nodes.csv",
        ["node_id", "rack_id", "pos_x", "pos_y", "pos_z"],
        ((n.id, n.rack_id, n.pos_x, n.pos_y, n.pos_z) for n in ds.compute_nodes),
    )
    emit(
        "plugins.csv",
        ["node_id", "plugin_name"],
        ((p.node_id, p.name) for p in ds.plugins),
    )
    emit(
        "sensors.csv",
        ["node_id", "plugin_name", "sensor_name", "sensor_type", "sensor_unit"],
        ((s.node_id, s.plugin_name, s.name, s.type, s.unit) for s in ds.sensors),
    )
    emit(
        "users.csv",
        ["user_id", "system_id", "user_name"],
        ((u.id, u.system_id, u.name) for u in ds.users),
    )
    emit(
        "jobs.csv",
        ["job_id", "user_id", "group_id", "job_name", "exit_code", "start_ts", "end_ts", "node_ids"],
        (
            (
                j.id,
                j.user_id,
                j.group_id,
                j.name,
                j.exit_code,
                j.start,
                j.end,
                ";".join(str(n) for n in j.node_ids),
            )
            for j in ds.jobs
        ),
    )
    emit(
        "job_metrics.csv",
        ["job_id", "metric_name", "metric_value"],
        ((m.job_id, m.metric_name, repr(m.metric_value)) for m in ds.job_metrics),
    )
    emit(
        "readings.csv",
        ["node_id", "sensor_name", "ts", "value"],
        ((r.node_id, r.sensor_name, r.ts, repr(r.value)) for r in ds.readings),
    )
    return written
