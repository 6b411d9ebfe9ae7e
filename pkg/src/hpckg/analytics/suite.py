"""Competency-question suite runner.

Thirty-six questions, grouped into topology, sensor monitoring, job
analysis, user activity, scheduling, and cross-system comparison.  Each
question ships as a ``.rq`` file whose free parameters (node ids, time
windows, thresholds) are filled in from a key-value manifest; the
evaluated answer is checked against an independent tabular oracle that
computes the same answer straight from the Dataset.

Two questions need a post-aggregation step the query subset cannot
express on its own: large-scale job detection (C3.4) compares per-job
node counts against a fraction of the system total, and the
metric-coverage diff (C6.2) keeps only metrics unique to one system.
The runner performs those steps on the query output, mirrored by the
oracle.
"""

from __future__ import annotations

import math
import re
import statistics
import time
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path
from typing import Optional, Union

from hpckg.errors import HpckgError, ManifestError
from hpckg.fixtures import FIXTURE_EPOCH, WALLTIME_EXIT_CODE
from hpckg.ingest import Dataset
from hpckg.rdf_core import TripleStore
from hpckg.sparql import evaluate, parse_query
from hpckg.sparql.values import DateTimeVal, DurationVal, sort_key

QUESTION_IDS = tuple(
    f"C{major}.{minor}"
    for major, count in ((1, 6), (2, 8), (3, 9), (4, 6), (5, 2), (6, 5))
    for minor in range(1, count + 1)
)

_PARAM_RE = re.compile(r"\{\{(\w+)\}\}")

Manifest = dict[str, dict[str, object]]


# ---------------------------------------------------------------------------
# Manifest


def default_manifest(ds: Dataset) -> Manifest:
    """Concrete parameters for every question, derived from the fixture.

    Values are chosen so queries return non-empty answers whenever the
    fixture has the relevant data; on an empty Dataset every entry falls
    back to harmless constants.
    """
    t_lo = min((r.ts for r in ds.readings), default=FIXTURE_EPOCH)
    t_hi = max((r.ts for r in ds.readings), default=FIXTURE_EPOCH + 86_400 - 1) + 1

    dc_name = ds.data_centers[0].name if ds.data_centers else "dc1"
    system_name = ds.hpc_systems[0].name if ds.hpc_systems else "system1"
    rack_id = ds.racks[0].id if ds.racks else 1
    sensor_nodes = {s.node_id for s in ds.sensors}
    node_id = next((n.id for n in ds.compute_nodes if n.id in sensor_nodes), 1)
    node0 = next((n for n in ds.compute_nodes if n.id == node_id), None)

    job = ds.jobs[0] if ds.jobs else None
    job_id = job.id if job else 1
    user_id = job.user_id if job else (ds.users[0].id if ds.users else 1)
    group_id = job.group_id if job else 100

    job_lo = min((j.start for j in ds.jobs), default=FIXTURE_EPOCH)
    job_hi = max((j.end for j in ds.jobs), default=FIXTURE_EPOCH + 86_400) + 1
    span = job_hi - job_lo
    mid_t1 = job_lo + span // 4
    mid_t2 = job_hi - span // 4

    all_values = sorted(r.value for r in ds.readings)
    high_value = all_values[int(len(all_values) * 0.9)] if all_values else 0.0

    week_lo = max(t_lo, t_hi - 7 * 86_400)
    temp_vals = [
        r.value
        for r in ds.readings
        if week_lo <= r.ts < t_hi
        and any(
            s.node_id == r.node_id and s.name == r.sensor_name and s.type == "temperature"
            for s in ds.sensors
        )
    ]
    if len(temp_vals) >= 2:
        temp_threshold = statistics.mean(temp_vals) + 2 * statistics.pstdev(temp_vals)
    elif temp_vals:
        temp_threshold = temp_vals[0]
    else:
        temp_threshold = 0.0

    power_reading = next(
        (
            r
            for r in ds.readings
            if any(
                s.node_id == r.node_id and s.name == r.sensor_name and s.type == "power"
                for s in ds.sensors
            )
        ),
        None,
    )
    power_node = power_reading.node_id if power_reading else node_id
    power_t = power_reading.ts if power_reading else t_lo

    day_lo = max(t_lo, t_hi - 86_400)
    hour_lo = max(t_lo, t_hi - 3_600)

    manifest: Manifest = {
        "C1.1": {"dc_name": dc_name},
        "C1.2": {"dc_name": dc_name},
        "C1.3": {"system_name": system_name, "rack_id": rack_id},
        "C1.4": {"node_id": node_id},
        "C1.5": {"node_id": node_id, "max_dist2": 2},
        "C1.6": {
            "x": node0.pos_x if node0 else 0,
            "y": node0.pos_y if node0 else 0,
            "z": node0.pos_z if node0 else 0,
            "max_dist2": 2,
        },
        "C2.1": {
            "node_id": node_id,
            "sensor_type": "temperature",
            "t1": t_lo,
            "t2": t_lo + (t_hi - t_lo) // 2 + 1,
        },
        "C2.2": {"rack_id": rack_id, "sensor_type": "temperature", "t1": day_lo, "t2": t_hi},
        "C2.3": {"job_id": job_id, "sensor_type": "power"},
        "C2.4": {"threshold": high_value, "t1": hour_lo, "t2": t_hi},
        "C2.5": {
            "sensor_type": "temperature",
            "threshold": temp_threshold,
            "t1": week_lo,
            "t2": t_hi,
        },
        "C2.6": {"node_id": node_id, "sensor_type": "temperature", "t1": t_lo, "t2": t_hi},
        "C2.7": {"sensor_type": "utilization", "t1": day_lo, "t2": t_hi},
        "C2.8": {"node_id": power_node, "sensor_type": "power", "t": power_t},
        "C3.1": {"job_id": job_id},
        "C3.2": {"job_id": job_id},
        "C3.3": {"t1": mid_t1, "t2": mid_t2},
        "C3.4": {"frac": 0.25},
        "C3.5": {"job_id": job_id},
        "C3.6": {"walltime_exit_code": WALLTIME_EXIT_CODE},
        "C3.7": {"ai_threshold": 1.0},
        "C3.8": {"freq_high": 2200, "freq_low": 2000, "ai_threshold": 1.0},
        "C3.9": {"user_id": user_id},
        "C4.1": {"job_id": job_id},
        "C4.2": {"group_id": group_id},
        "C4.3": {"t1": mid_t1, "t2": mid_t2},
        "C4.4": {"user_id": user_id, "t1": job_lo, "t2": job_hi},
        "C4.5": {"ai_threshold": 1.0},
        "C4.6": {"dc_name": dc_name},
        "C5.1": {},
        "C5.2": {"hours": 1},
        "C6.1": {},
        "C6.2": {},
        "C6.3": {},
        "C6.4": {},
        "C6.5": {"system_name": system_name, "t0": t_lo},
    }
    return manifest


def write_manifest(manifest: Manifest, path: Union[str, Path]) -> None:
    lines = ["# competency suite parameters"]
    for qid in sorted(manifest):
        for key, value in sorted(manifest[qid].items()):
            lines.append(f"{qid}.{key} = {_render_param(value)}")
    Path(path).write_text("\n".join(lines) + "\n", encoding="utf-8")


def load_manifest(path: Union[str, Path]) -> Manifest:
    manifest: Manifest = {qid: {} for qid in QUESTION_IDS}
    text = Path(path).read_text(encoding="utf-8")
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        if "=" not in line:
            raise ManifestError(f"{path}:{lineno}: expected 'Cx.y.key = value'")
        key, _, value = line.partition("=")
        qid, _, param = key.strip().rpartition(".")
        if qid not in QUESTION_IDS or not param:
            raise ManifestError(f"{path}:{lineno}: unknown question id in {key.strip()!r}")
        manifest.setdefault(qid, {})[param] = _parse_param(value.strip())
    return manifest


def _render_param(value) -> str:
    if isinstance(value, float):
        return repr(value)
    return str(value)


def _parse_param(text: str):
    try:
        return int(text)
    except ValueError:
        pass
    try:
        return float(text)
    except ValueError:
        pass
    return text


# ---------------------------------------------------------------------------
# Result comparison


def rows_match(
    got: list[tuple],
    want: list[tuple],
    rel_tol: float = 1e-9,
) -> bool:
    """Order-insensitive row comparison with numeric tolerance."""
    if len(got) != len(want):
        return False

    def canon(row):
        return tuple(_canon_cell(v) for v in row)

    got_sorted = sorted(got, key=canon)
    want_sorted = sorted(want, key=canon)
    for g, w in zip(got_sorted, want_sorted):
        if len(g) != len(w):
            return False
        for gv, wv in zip(g, w):
            if not _cell_match(gv, wv, rel_tol):
                return False
    return True


def _canon_cell(value):
    if isinstance(value, float):
        return (4, f"{value:.9g}")
    return tuple(str(part) for part in sort_key(value))


def _cell_match(a, b, rel_tol: float) -> bool:
    num_a = _as_number(a)
    num_b = _as_number(b)
    if num_a is not None and num_b is not None:
        return math.isclose(num_a, num_b, rel_tol=rel_tol, abs_tol=1e-12)
    return a == b


def _as_number(value):
    if isinstance(value, bool):
        return None
    if isinstance(value, (int, float)):
        return value
    if isinstance(value, DateTimeVal):
        return value.epoch
    if isinstance(value, DurationVal):
        return value.seconds
    return None


# ---------------------------------------------------------------------------
# Runner


@dataclass(frozen=True, slots=True)
class QuestionResult:
    qid: str
    parse_ok: bool
    row_count: int
    oracle_match: bool
    elapsed: float
    error: str = ""


@dataclass
class SuiteResult:
    entries: list[QuestionResult] = field(default_factory=list)

    @property
    def all_parsed(self) -> bool:
        return all(e.parse_ok for e in self.entries)

    @property
    def all_matched(self) -> bool:
        return all(e.oracle_match for e in self.entries)

    @property
    def matched_count(self) -> int:
        return sum(1 for e in self.entries if e.oracle_match)

    def to_text(self) -> str:
        lines = []
        for e in self.entries:
            status = "ok" if e.parse_ok else "parse-error"
            match = "yes" if e.oracle_match else "NO"
            line = (
                f"{e.qid:<5}  parse={status:<11}  rows={e.row_count:<5}  "
                f"match={match:<3}  {e.elapsed * 1000:7.1f} ms"
            )
            if e.error:
                line += f"  ({e.error})"
            lines.append(line)
        lines.append(
            f"matched {self.matched_count}/{len(self.entries)} questions"
        )
        return "\n".join(lines) + "\n"

    def to_csv(self, fh) -> None:
        import csv

        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(["question", "parse_ok", "rows", "oracle_match", "elapsed_s", "error"])
        for e in self.entries:
            writer.writerow(
                [e.qid, e.parse_ok, e.row_count, e.oracle_match, f"{e.elapsed:.6f}", e.error]
            )


def packaged_query_dir() -> Path:
    """Directory holding the bundled .rq files."""
    return Path(resources.files("hpckg.analytics") / "queries")


def instantiate_query(text: str, params: dict[str, object], qid: str) -> str:
    def sub(match: re.Match) -> str:
        name = match.group(1)
        if name not in params:
            raise ManifestError(f"{qid}: manifest is missing parameter {name!r}")
        return _render_param(params[name])

    return _PARAM_RE.sub(sub, text)


# System-total node counts, used by the C3.4 post-aggregation step.
_C34_TOTALS_QUERY = """
PREFIX hpc: <http://ontology.hpc.org/>
SELECT ?systemId (COUNT(?node) AS ?total)
WHERE {
  ?system a hpc:HPCSystem ;
          hpc:systemId ?systemId ;
          hpc:hasRack ?rack .
  ?rack hpc:hasComputeNode ?node .
}
GROUP BY ?systemId
"""


def _post_c34(rows: list[tuple], store: TripleStore, params: dict) -> list[tuple]:
    frac = float(params.get("frac", 0.25))
    totals_table = evaluate(parse_query(_C34_TOTALS_QUERY), store)
    totals = {row[0]: row[1] for row in totals_table.rows}
    out = []
    for job_id, system_id, node_count in rows:
        total = totals.get(system_id)
        if total and node_count >= frac * total:
            out.append((job_id, node_count))
    return sorted(out)


def _post_c62(rows: list[tuple]) -> list[tuple]:
    by_system: dict[object, set] = {}
    for system_name, metric in rows:
        by_system.setdefault(system_name, set()).add(metric)
    out = []
    for system_name, metrics in by_system.items():
        others = set()
        for other, other_metrics in by_system.items():
            if other != system_name:
                others |= other_metrics
        for metric in metrics - others:
            out.append((system_name, metric))
    return sorted(out)


def run_suite(
    store: TripleStore,
    ds: Dataset,
    query_dir: Optional[Union[str, Path]] = None,
    manifest: Optional[Manifest] = None,
) -> SuiteResult:
    """Evaluate all 36 questions against ``store`` and the oracle on ``ds``.

    A missing or broken query file fails that entry and the suite moves
    on.  ``query_dir`` defaults to the bundled queries, ``manifest`` to
    :func:`default_manifest` of the Dataset.
    """
    from hpckg.analytics import oracle

    qdir = Path(query_dir) if query_dir is not None else packaged_query_dir()
    manifest = manifest if manifest is not None else default_manifest(ds)

    result = SuiteResult()
    for qid in QUESTION_IDS:
        started = time.perf_counter()
        params = manifest.get(qid, {})
        try:
            text = (qdir / f"{qid}.rq").read_text(encoding="utf-8")
            query = parse_query(instantiate_query(text, params, qid))
            table = evaluate(query, store)
            rows = table.rows
            if qid == "C3.4":
                rows = _post_c34(rows, store, params)
            elif qid == "C6.2":
                rows = _post_c62(rows)
            expected = oracle.answer(qid, ds, params)
            matched = rows_match(rows, expected)
            result.entries.append(
                QuestionResult(
                    qid=qid,
                    parse_ok=True,
                    row_count=len(rows),
                    oracle_match=matched,
                    elapsed=time.perf_counter() - started,
                )
            )
        except FileNotFoundError:
            result.entries.append(
                QuestionResult(qid, False, 0, False, time.perf_counter() - started,
                               error="query file missing")
            )
        except HpckgError as exc:
            result.entries.append(
                QuestionResult(qid, False, 0, False, time.perf_counter() - started,
                               error=str(exc))
            )
    return result
