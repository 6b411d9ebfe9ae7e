"""Tabular reference answers for the competency questions.

Every answer is computed straight from the Dataset rows, independently of
the store, the builder, and the query engine; the suite runner compares
engine output against these tables.  Join multiplicities mirror the query
shapes (e.g. the cross-system execution-time average weighs a job once
per allocated node, exactly as the graph join does).
"""

from __future__ import annotations

from hpckg.ingest import Dataset, JobRow
from hpckg.sparql.values import DurationVal, IriVal
from hpckg.vocab import HPC


def answer(qid: str, ds: Dataset, params: dict) -> list[tuple]:
    fn = _ORACLES.get(qid)
    if fn is None:
        raise KeyError(f"no oracle for {qid}")
    return fn(ds, params)


# -- shared lookups ----------------------------------------------------------


def _rack_system(ds: Dataset) -> dict[int, int]:
    return {r.id: r.system_id for r in ds.racks}


def _node_system(ds: Dataset) -> dict[int, int]:
    rack_sys = _rack_system(ds)
    return {n.id: rack_sys[n.rack_id] for n in ds.compute_nodes}


def _sensor_type(ds: Dataset) -> dict[tuple[int, str], str]:
    return {(s.node_id, s.name): s.type for s in ds.sensors}


def _dc_systems(ds: Dataset, dc_name: str) -> set[int]:
    dc_ids = {d.id for d in ds.data_centers if d.name == dc_name}
    return {s.id for s in ds.hpc_systems if s.dc_id in dc_ids}


def _typed_readings(ds: Dataset, sensor_type: str):
    types = _sensor_type(ds)
    for r in ds.readings:
        if types.get((r.node_id, r.sensor_name)) == sensor_type:
            yield r


def _metrics_by_job(ds: Dataset) -> dict[int, dict[str, float]]:
    out: dict[int, dict[str, float]] = {}
    for m in ds.job_metrics:
        out.setdefault(m.job_id, {})[m.metric_name] = m.metric_value
    return out


def _job_by_id(ds: Dataset, job_id: int) -> JobRow | None:
    return next((j for j in ds.jobs if j.id == job_id), None)


def _user_by_id(ds: Dataset, user_id: int):
    return next((u for u in ds.users if u.id == user_id), None)


def _agg3(values: list[float]) -> list[tuple]:
    if not values:
        return [(None, None, None)]
    return [(max(values), min(values), sum(values) / len(values))]


def _exec_seconds(job: JobRow) -> float:
    # Mirrors the engine's day-difference arithmetic.
    return ((job.end - job.start) / 86_400.0) * 86_400.0


# -- topology ----------------------------------------------------------------


def _c1_1(ds, p):
    systems = _dc_systems(ds, p["dc_name"])
    return sorted((s.id, s.name) for s in ds.hpc_systems if s.id in systems)


def _c1_2(ds, p):
    systems = _dc_systems(ds, p["dc_name"])
    node_sys = _node_system(ds)
    return sorted(
        (n.id, n.pos_x, n.pos_y, n.pos_z)
        for n in ds.compute_nodes
        if node_sys[n.id] in systems
    )


def _c1_3(ds, p):
    system_ids = {s.id for s in ds.hpc_systems if s.name == p["system_name"]}
    rack_ids = {
        r.id for r in ds.racks if r.id == p["rack_id"] and r.system_id in system_ids
    }
    return sorted((n.id,) for n in ds.compute_nodes if n.rack_id in rack_ids)


def _c1_4(ds, p):
    return sorted((s.name, s.type) for s in ds.sensors if s.node_id == p["node_id"])


def _c1_5(ds, p):
    ref = next((n for n in ds.compute_nodes if n.id == p["node_id"]), None)
    if ref is None:
        return []
    limit = p["max_dist2"]
    out = []
    for n in ds.compute_nodes:
        if n.id == ref.id:
            continue
        d2 = (n.pos_x - ref.pos_x) ** 2 + (n.pos_y - ref.pos_y) ** 2 + (n.pos_z - ref.pos_z) ** 2
        if d2 <= limit:
            out.append((n.id,))
    return sorted(out)


def _c1_6(ds, p):
    out = []
    for n in ds.compute_nodes:
        d2 = (n.pos_x - p["x"]) ** 2 + (n.pos_y - p["y"]) ** 2 + (n.pos_z - p["z"]) ** 2
        if d2 <= p["max_dist2"]:
            out.append((n.id,))
    return sorted(out)


# -- sensor monitoring ---------------------------------------------------------


def _c2_1(ds, p):
    values = [
        r.value
        for r in _typed_readings(ds, p["sensor_type"])
        if r.node_id == p["node_id"] and p["t1"] <= r.ts < p["t2"]
    ]
    return _agg3(values)


def _c2_2(ds, p):
    rack_nodes = {n.id for n in ds.compute_nodes if n.rack_id == p["rack_id"]}
    values = [
        r.value
        for r in _typed_readings(ds, p["sensor_type"])
        if r.node_id in rack_nodes and p["t1"] <= r.ts < p["t2"]
    ]
    return _agg3(values)


def _c2_3(ds, p):
    job = _job_by_id(ds, p["job_id"])
    if job is None:
        return [(None, None, None)]
    nodes = set(job.node_ids)
    values = [
        r.value
        for r in _typed_readings(ds, p["sensor_type"])
        if r.node_id in nodes and job.start <= r.ts <= job.end
    ]
    return _agg3(values)


def _c2_4(ds, p):
    return sorted(
        (r.node_id, r.sensor_name, r.ts, r.value)
        for r in ds.readings
        if r.value > p["threshold"] and p["t1"] <= r.ts < p["t2"]
    )


def _c2_5(ds, p):
    nodes = {
        r.node_id
        for r in _typed_readings(ds, p["sensor_type"])
        if r.value > p["threshold"] and p["t1"] <= r.ts < p["t2"]
    }
    return sorted((n,) for n in nodes)


def _c2_6(ds, p):
    values = [
        r.value
        for r in _typed_readings(ds, p["sensor_type"])
        if r.node_id == p["node_id"] and p["t1"] <= r.ts < p["t2"]
    ]
    return [(sum(values) / len(values) if values else None,)]


def _c2_7(ds, p):
    per_node: dict[int, list[float]] = {}
    for r in _typed_readings(ds, p["sensor_type"]):
        if p["t1"] <= r.ts < p["t2"]:
            per_node.setdefault(r.node_id, []).append(r.value)
    return sorted((nid, sum(v) / len(v)) for nid, v in per_node.items())


def _c2_8(ds, p):
    return sorted(
        (r.sensor_name, r.value)
        for r in _typed_readings(ds, p["sensor_type"])
        if r.node_id == p["node_id"] and r.ts == p["t"]
    )


# -- job analysis ---------------------------------------------------------------


def _c3_1(ds, p):
    return sorted(
        (m.metric_name, m.metric_value)
        for m in ds.job_metrics
        if m.job_id == p["job_id"] and m.metric_name in ("power_avg", "energy")
    )


def _c3_2(ds, p):
    job = _job_by_id(ds, p["job_id"])
    return sorted((nid,) for nid in job.node_ids) if job else []


def _c3_3(ds, p):
    return sorted(
        (j.id, j.name) for j in ds.jobs if j.start < p["t2"] and j.end >= p["t1"]
    )


def _c3_4(ds, p):
    node_sys = _node_system(ds)
    totals: dict[int, int] = {}
    for sys_id in node_sys.values():
        totals[sys_id] = totals.get(sys_id, 0) + 1
    out = []
    for j in ds.jobs:
        if not j.node_ids:
            continue
        sys_id = node_sys[j.node_ids[0]]
        if len(j.node_ids) >= p["frac"] * totals[sys_id]:
            out.append((j.id, len(j.node_ids)))
    return sorted(out)


def _c3_5(ds, p):
    job = _job_by_id(ds, p["job_id"])
    return [(DurationVal(float(job.end - job.start)),)] if job else []


def _c3_6(ds, p):
    metrics = _metrics_by_job(ds)
    out = []
    for j in ds.jobs:
        walltime = metrics.get(j.id, {}).get("requested_walltime")
        if (
            j.exit_code == p["walltime_exit_code"]
            and walltime is not None
            and _exec_seconds(j) >= walltime
        ):
            out.append((j.id,))
    return sorted(out)


def _c3_7(ds, p):
    metrics = _metrics_by_job(ds)
    out = []
    for j in ds.jobs:
        ai = metrics.get(j.id, {}).get("arithmetic_intensity")
        if ai is not None and ai < p["ai_threshold"]:
            out.append((j.id, ai))
    return sorted(out)


def _c3_8(ds, p):
    metrics = _metrics_by_job(ds)
    out = []
    for j in ds.jobs:
        freq = metrics.get(j.id, {}).get("frequency")
        ai = metrics.get(j.id, {}).get("arithmetic_intensity")
        if freq is None or ai is None:
            continue
        if (freq == p["freq_high"] and ai < p["ai_threshold"]) or (
            freq == p["freq_low"] and ai >= p["ai_threshold"]
        ):
            out.append((j.id, freq, ai))
    return sorted(out)


def _c3_9(ds, p):
    out = []
    job_user = {j.id: j.user_id for j in ds.jobs}
    for m in ds.job_metrics:
        if m.metric_name in ("cpu_util_avg", "gpu_util_avg") and job_user.get(
            m.job_id
        ) == p["user_id"]:
            out.append((m.job_id, m.metric_name, m.metric_value))
    return sorted(out)


# -- user activity -----------------------------------------------------------------


def _c4_1(ds, p):
    job = _job_by_id(ds, p["job_id"])
    if job is None:
        return []
    user = _user_by_id(ds, job.user_id)
    return [(user.id, user.name)] if user else []


def _c4_2(ds, p):
    user_ids = {j.user_id for j in ds.jobs if j.group_id == p["group_id"]}
    return sorted((u.id, u.name) for u in ds.users if u.id in user_ids)


def _c4_3(ds, p):
    user_ids = {j.user_id for j in ds.jobs if p["t1"] <= j.start < p["t2"]}
    return sorted((uid,) for uid in user_ids)


def _c4_4(ds, p):
    count = sum(
        1
        for j in ds.jobs
        if j.user_id == p["user_id"] and p["t1"] <= j.start < p["t2"]
    )
    return [(count,)]


def _c4_5(ds, p):
    metrics = _metrics_by_job(ds)
    per_user: dict[int, int] = {}
    for j in ds.jobs:
        ai = metrics.get(j.id, {}).get("arithmetic_intensity")
        if ai is not None and ai < p["ai_threshold"]:
            per_user[j.user_id] = per_user.get(j.user_id, 0) + 1
    return sorted(per_user.items())


def _c4_6(ds, p):
    systems = _dc_systems(ds, p["dc_name"])
    node_sys = _node_system(ds)
    user_ids = {
        j.user_id
        for j in ds.jobs
        if any(node_sys.get(nid) in systems for nid in j.node_ids)
    }
    return sorted((u.id, u.name) for u in ds.users if u.id in user_ids)


# -- scheduling ----------------------------------------------------------------------


def _c5_1(ds, p):
    waits = [m.metric_value for m in ds.job_metrics if m.metric_name == "wait_time"]
    return [(sum(waits) / len(waits) if waits else None,)]


def _c5_2(ds, p):
    cutoff = p["hours"] * 3600
    return sorted(
        (m.job_id, m.metric_value)
        for m in ds.job_metrics
        if m.metric_name == "wait_time" and m.metric_value > cutoff
    )


# -- cross-system ----------------------------------------------------------------------


def _c6_1(ds, p):
    system_dc = {s.id: s.dc_id for s in ds.hpc_systems}
    dc_names = {d.id: d.name for d in ds.data_centers}
    user_system = {u.id: u.system_id for u in ds.users}
    counts: dict[str, int] = {}
    for j in ds.jobs:
        sid = user_system.get(j.user_id)
        if sid is None:
            continue
        name = dc_names[system_dc[sid]]
        counts[name] = counts.get(name, 0) + 1
    return sorted(counts.items(), key=lambda kv: (-kv[1], kv[0]))


def _c6_2(ds, p):
    user_system = {u.id: u.system_id for u in ds.users}
    system_name = {s.id: s.name for s in ds.hpc_systems}
    job_system = {j.id: user_system.get(j.user_id) for j in ds.jobs}
    by_system: dict[str, set[str]] = {}
    for m in ds.job_metrics:
        sid = job_system.get(m.job_id)
        if sid is None:
            continue
        by_system.setdefault(system_name[sid], set()).add(m.metric_name)
    out = []
    for name, metrics in by_system.items():
        others = set()
        for other, other_metrics in by_system.items():
            if other != name:
                others |= other_metrics
        for metric in metrics - others:
            out.append((name, metric))
    return sorted(out)


def _c6_3(ds, p):
    # One contribution per (job, allocated node), matching the graph join.
    node_sys = _node_system(ds)
    system_name = {s.id: s.name for s in ds.hpc_systems}
    sums: dict[int, list[float]] = {}
    for j in ds.jobs:
        for nid in j.node_ids:
            sums.setdefault(node_sys[nid], []).append(_exec_seconds(j))
    out = []
    for sid, values in sums.items():
        out.append(
            (
                IriVal(f"{HPC}system/{sid}"),
                system_name[sid],
                sum(values) / len(values),
            )
        )
    return sorted(out, key=lambda row: row[0].iri)


def _c6_4(ds, p):
    user_system = {u.id: u.system_id for u in ds.users}
    system_name = {s.id: s.name for s in ds.hpc_systems}
    metrics = _metrics_by_job(ds)
    sums: dict[str, list[float]] = {}
    for j in ds.jobs:
        energy = metrics.get(j.id, {}).get("energy")
        sid = user_system.get(j.user_id)
        if energy is None or sid is None:
            continue
        sums.setdefault(system_name[sid], []).append(energy)
    return sorted(
        ((name, sum(v) / len(v)) for name, v in sums.items()),
        key=lambda kv: (kv[1], kv[0]),
    )


def _c6_5(ds, p):
    system_ids = {s.id for s in ds.hpc_systems if s.name == p["system_name"]}
    node_sys = _node_system(ds)
    buckets: dict[int, list[float]] = {}
    for r in _typed_readings(ds, "power"):
        if node_sys.get(r.node_id) in system_ids:
            hour = int((r.ts - p["t0"]) / 3600)
            buckets.setdefault(hour, []).append(r.value)
    if not buckets:
        return []
    rows = sorted(
        ((hour, sum(v) / len(v)) for hour, v in buckets.items()),
        key=lambda kv: (kv[1], kv[0]),
    )
    return [rows[0]]


_ORACLES = {
    "C1.1": _c1_1,
    "C1.2": _c1_2,
    "C1.3": _c1_3,
    "C1.4": _c1_4,
    "C1.5": _c1_5,
    "C1.6": _c1_6,
    "C2.1": _c2_1,
    "C2.2": _c2_2,
    "C2.3": _c2_3,
    "C2.4": _c2_4,
    "C2.5": _c2_5,
    "C2.6": _c2_6,
    "C2.7": _c2_7,
    "C2.8": _c2_8,
    "C3.1": _c3_1,
    "C3.2": _c3_2,
    "C3.3": _c3_3,
    "C3.4": _c3_4,
    "C3.5": _c3_5,
    "C3.6": _c3_6,
    "C3.7": _c3_7,
    "C3.8": _c3_8,
    "C3.9": _c3_9,
    "C4.1": _c4_1,
    "C4.2": _c4_2,
    "C4.3": _c4_3,
    "C4.4": _c4_4,
    "C4.5": _c4_5,
    "C4.6": _c4_6,
    "C5.1": _c5_1,
    "C5.2": _c5_2,
    "C6.1": _c6_1,
    "C6.2": _c6_2,
    "C6.3": _c6_3,
    "C6.4": _c6_4,
    "C6.5": _c6_5,
}
