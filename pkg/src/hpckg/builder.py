"""Map a telemetry Dataset to RDF triples under one of three layouts.

The legacy layout spends six triples on every sensor reading: a type
triple, the value, an inline ISO 8601 timestamp, an inline unit string, a
link from the sensor, and a link to the source data record.  The unified
layout drops the type, unit, and record triples, moves the unit onto the
sensor, and routes timestamps through dedicated time nodes, leaving four
triples per reading; its blank-node variant additionally strips readings
of their IRIs.

Time-node handling: with ``dedup_time_nodes`` off (the default), every
reading gets its own time node keyed by node, sensor ordinal and tick, so
a build stores exactly four triples per reading.  With dedup on, readings
that share a tick share one ``time/<unix>`` node and its timestamp triple
is stored once graph-wide.
"""

from __future__ import annotations

from dataclasses import dataclass
from datetime import datetime, timezone
from enum import Enum
from typing import Iterator, Optional
from urllib.parse import quote

from hpckg.errors import BuildError
from hpckg.ingest import Dataset, JobMetricRow, JobRow, ReadingRow
from hpckg.rdf_core import Term, Triple, TripleStore
from hpckg.vocab import (
    HPC,
    RDF_TYPE,
    XSD_DATETIME,
    XSD_DURATION,
    XSD_INTEGER,
)


class SchemaMode(Enum):
    LEGACY = "legacy"
    UNIFIED_URI = "unified"
    UNIFIED_BNODE = "unified-bnode"


class TimestampEncoding(Enum):
    UNIX_SECONDS = "unix"
    ISO_8601 = "iso8601"


#: Triples emitted per reading by each layout (before any time-node sharing).
TRIPLES_PER_READING = {
    SchemaMode.LEGACY: 6,
    SchemaMode.UNIFIED_URI: 4,
    SchemaMode.UNIFIED_BNODE: 4,
}


@dataclass(frozen=True, slots=True)
class BuildOptions:
    mode: SchemaMode
    dedup_time_nodes: bool = False
    timestamp_encoding: Optional[TimestampEncoding] = None

    def __post_init__(self):
        if (
            self.mode is SchemaMode.LEGACY
            and self.timestamp_encoding is TimestampEncoding.UNIX_SECONDS
        ):
            raise BuildError("the legacy layout stores ISO 8601 timestamps only")

    @property
    def encoding(self) -> TimestampEncoding:
        if self.timestamp_encoding is not None:
            return self.timestamp_encoding
        if self.mode is SchemaMode.LEGACY:
            return TimestampEncoding.ISO_8601
        return TimestampEncoding.UNIX_SECONDS


def _seg(value) -> str:
    return quote(str(value), safe="")


class UriPolicy:
    """Deterministic individual IRIs under the ``hpc`` namespace.

    Identifiers render in decimal; name segments are percent-encoded, so
    the mapping is injective over the Dataset key space.
    """

    ns = HPC

    @classmethod
    def datacenter(cls, dc_id: int) -> str:
        return f"{cls.ns}datacenter/{dc_id}"

    @classmethod
    def system(cls, system_id: int) -> str:
        return f"{cls.ns}system/{system_id}"

    @classmethod
    def rack(cls, rack_id: int) -> str:
        return f"{cls.ns}rack/{rack_id}"

    @classmethod
    def node(cls, node_id: int) -> str:
        return f"{cls.ns}node/{node_id}"

    @classmethod
    def position(cls, node_id: int) -> str:
        return f"{cls.ns}position/{node_id}"

    @classmethod
    def plugin(cls, node_id: int, name: str) -> str:
        return f"{cls.ns}plugin/{node_id}/{_seg(name)}"

    @classmethod
    def sensor(cls, node_id: int, name: str) -> str:
        return f"{cls.ns}sensor/{node_id}/{_seg(name)}"

    @classmethod
    def user(cls, user_id: int) -> str:
        return f"{cls.ns}user/{user_id}"

    @classmethod
    def job(cls, job_id: int) -> str:
        return f"{cls.ns}job/{job_id}"

    @classmethod
    def jobmetric(cls, job_id: int, metric_name: str) -> str:
        return f"{cls.ns}jobmetric/{job_id}/{_seg(metric_name)}"

    @classmethod
    def time_tick(cls, ts: int) -> str:
        return f"{cls.ns}time/{ts}"

    @classmethod
    def time_reading(cls, node_id: int, sensor_idx: int, ts: int) -> str:
        return f"{cls.ns}time/{node_id}/{sensor_idx}/{ts}"

    @classmethod
    def reading(cls, node_id: int, sensor_name: str, ts: int) -> str:
        return f"{cls.ns}reading/{node_id}/{_seg(sensor_name)}/{ts}"

    @classmethod
    def datarecord(cls, node_id: int, plugin_name: str, day: int) -> str:
        return f"{cls.ns}datarecord/{node_id}/{_seg(plugin_name)}/{day}"


def iso_timestamp(ts: int) -> str:
    """25-character ISO 8601 form with an explicit +00:00 offset."""
    return datetime.fromtimestamp(ts, tz=timezone.utc).isoformat()


def blank_reading_label(node_id: int, sensor_idx: int, ts: int) -> str:
    return f"r{node_id}_{sensor_idx}_{ts}"


class TripleEmitter:
    """Stateful emitter over one Dataset and one set of build options."""

    def __init__(self, ds: Dataset, opts: BuildOptions):
        self.ds = ds
        self.opts = opts
        self._p = {
            name: Term.iri(HPC + name)
            for name in (
                "hasHPCSystem",
                "hasUser",
                "hasRack",
                "hasComputeNode",
                "hasPosition",
                "hasPlugin",
                "hasSensor",
                "includesSensor",
                "hasReading",
                "hasTimestamp",
                "hasJobStartTime",
                "hasJobEndTime",
                "hasJobMetric",
                "isJobOf",
                "usesComputeNode",
                "partOfRecord",
                "dcId",
                "dcName",
                "location",
                "systemId",
                "systemName",
                "rackId",
                "computeNodeId",
                "posX",
                "posY",
                "posZ",
                "pluginName",
                "sensorName",
                "sensorType",
                "sensorUnit",
                "userId",
                "userName",
                "jobId",
                "jobName",
                "groupId",
                "exitCode",
                "jobDuration",
                "metricName",
                "metricValue",
                "timestamp",
                "value",
                "unit",
            )
        }
        self._type = Term.iri(RDF_TYPE)
        self._cls = {
            name: Term.iri(HPC + name)
            for name in (
                "DataCenter",
                "HPCSystem",
                "Rack",
                "ComputeNode",
                "Position",
                "Plugin",
                "Sensor",
                "SensorReading",
                "User",
                "Job",
                "JobMetric",
                "Time",
            )
        }
        # Sensor lookup: (node, name) -> (ordinal on its node, unit, plugin).
        self._sensor_info: dict[tuple[int, str], tuple[int, str, str]] = {}
        per_node: dict[int, int] = {}
        for s in ds.sensors:
            idx = per_node.get(s.node_id, 0)
            per_node[s.node_id] = idx + 1
            self._sensor_info[(s.node_id, s.name)] = (idx, s.unit, s.plugin_name)
        self._seen_time_iris: set[str] = set()

    # -- helpers ----------------------------------------------------------

    def _time_literal(self, ts: int) -> Term:
        if self.opts.encoding is TimestampEncoding.UNIX_SECONDS:
            return Term.literal(str(ts), XSD_INTEGER)
        return Term.literal(iso_timestamp(ts), XSD_DATETIME)

    def _time_node_triples(self, time_iri: str, ts: int, out: list[Triple]) -> Term:
        """Append the timestamp triple for a (possibly shared) time node."""
        node = Term.iri(time_iri)
        if self.opts.dedup_time_nodes:
            if time_iri in self._seen_time_iris:
                return node
            self._seen_time_iris.add(time_iri)
        out.append(Triple(node, self._p["timestamp"], self._time_literal(ts)))
        return node

    # -- static entities ---------------------------------------------------

    def static_triples(self) -> Iterator[Triple]:
        """Type, data-property and forward object-property triples for the
        topology and user tables."""
        p = self._p
        cls = self._cls
        legacy = self.opts.mode is SchemaMode.LEGACY
        for dc in self.ds.data_centers:
            subj = Term.iri(UriPolicy.datacenter(dc.id))
            yield Triple(subj, self._type, cls["DataCenter"])
            yield Triple(subj, p["dcId"], Term.integer(dc.id))
            yield Triple(subj, p["dcName"], Term.string(dc.name))
            yield Triple(subj, p["location"], Term.string(dc.location))
        for system in self.ds.hpc_systems:
            subj = Term.iri(UriPolicy.system(system.id))
            yield Triple(
                Term.iri(UriPolicy.datacenter(system.dc_id)), p["hasHPCSystem"], subj
            )
            yield Triple(subj, self._type, cls["HPCSystem"])
            yield Triple(subj, p["systemId"], Term.integer(system.id))
            yield Triple(subj, p["systemName"], Term.string(system.name))
        for rack in self.ds.racks:
            subj = Term.iri(UriPolicy.rack(rack.id))
            yield Triple(Term.iri(UriPolicy.system(rack.system_id)), p["hasRack"], subj)
            yield Triple(subj, self._type, cls["Rack"])
            yield Triple(subj, p["rackId"], Term.integer(rack.id))
        for node in self.ds.compute_nodes:
            subj = Term.iri(UriPolicy.node(node.id))
            pos = Term.iri(UriPolicy.position(node.id))
            yield Triple(Term.iri(UriPolicy.rack(node.rack_id)), p["hasComputeNode"], subj)
            yield Triple(subj, self._type, cls["ComputeNode"])
            yield Triple(subj, p["computeNodeId"], Term.integer(node.id))
            yield Triple(subj, p["hasPosition"], pos)
            yield Triple(pos, self._type, cls["Position"])
            yield Triple(pos, p["posX"], Term.integer(node.pos_x))
            yield Triple(pos, p["posY"], Term.integer(node.pos_y))
            yield Triple(pos, p["posZ"], Term.integer(node.pos_z))
        for plugin in self.ds.plugins:
            subj = Term.iri(UriPolicy.plugin(plugin.node_id, plugin.name))
            yield Triple(Term.iri(UriPolicy.node(plugin.node_id)), p["hasPlugin"], subj)
            yield Triple(subj, self._type, cls["Plugin"])
            yield Triple(subj, p["pluginName"], Term.string(plugin.name))
        for sensor in self.ds.sensors:
            subj = Term.iri(UriPolicy.sensor(sensor.node_id, sensor.name))
            yield Triple(Term.iri(UriPolicy.node(sensor.node_id)), p["hasSensor"], subj)
            yield Triple(
                Term.iri(UriPolicy.plugin(sensor.node_id, sensor.plugin_name)),
                p["includesSensor"],
                subj,
            )
            yield Triple(subj, self._type, cls["Sensor"])
            yield Triple(subj, p["sensorName"], Term.string(sensor.name))
            yield Triple(subj, p["sensorType"], Term.string(sensor.type))
            if not legacy:
                # The unified layout keeps the unit on the sensor; the
                # legacy one repeats it on every reading instead.
                yield Triple(subj, p["sensorUnit"], Term.string(sensor.unit))
        for user in self.ds.users:
            subj = Term.iri(UriPolicy.user(user.id))
            yield Triple(Term.iri(UriPolicy.system(user.system_id)), p["hasUser"], subj)
            yield Triple(subj, self._type, cls["User"])
            yield Triple(subj, p["userId"], Term.integer(user.id))
            yield Triple(subj, p["userName"], Term.string(user.name))

    # -- jobs ---------------------------------------------------------------

    def job_triples(self, job: JobRow, metrics: list[JobMetricRow]) -> list[Triple]:
        if job.end < job.start:
            raise BuildError(f"job {job.id} ends before it starts")
        p = self._p
        subj = Term.iri(UriPolicy.job(job.id))
        out = [
            Triple(subj, self._type, self._cls["Job"]),
            Triple(subj, p["jobId"], Term.integer(job.id)),
            Triple(subj, p["jobName"], Term.string(job.name)),
            Triple(subj, p["groupId"], Term.integer(job.group_id)),
            Triple(subj, p["exitCode"], Term.integer(job.exit_code)),
            Triple(
                subj,
                p["jobDuration"],
                Term.literal(f"PT{job.end - job.start}S", XSD_DURATION),
            ),
            Triple(subj, p["isJobOf"], Term.iri(UriPolicy.user(job.user_id))),
        ]
        for node_id in job.node_ids:
            out.append(Triple(subj, p["usesComputeNode"], Term.iri(UriPolicy.node(node_id))))
        start_node = self._time_node_triples(UriPolicy.time_tick(job.start), job.start, out)
        end_node = self._time_node_triples(UriPolicy.time_tick(job.end), job.end, out)
        out.append(Triple(subj, p["hasJobStartTime"], start_node))
        out.append(Triple(subj, p["hasJobEndTime"], end_node))
        for metric in metrics:
            m = Term.iri(UriPolicy.jobmetric(job.id, metric.metric_name))
            out.append(Triple(subj, p["hasJobMetric"], m))
            out.append(Triple(m, self._type, self._cls["JobMetric"]))
            out.append(Triple(m, p["metricName"], Term.string(metric.metric_name)))
            out.append(Triple(m, p["metricValue"], Term.float_(metric.metric_value)))
        return out

    # -- readings -------------------------------------------------------------

    def reading_triples(self, reading: ReadingRow) -> list[Triple]:
        info = self._sensor_info.get((reading.node_id, reading.sensor_name))
        if info is None:
            raise BuildError(
                f"reading references unknown sensor {reading.sensor_name!r} "
                f"on node {reading.node_id}"
            )
        sensor_idx, unit, plugin_name = info
        p = self._p
        sensor = Term.iri(UriPolicy.sensor(reading.node_id, reading.sensor_name))
        value = Term.double(reading.value)

        if self.opts.mode is SchemaMode.LEGACY:
            subj = Term.iri(
                UriPolicy.reading(reading.node_id, reading.sensor_name, reading.ts)
            )
            record = Term.iri(
                UriPolicy.datarecord(reading.node_id, plugin_name, reading.ts // 86_400)
            )
            return [
                Triple(subj, self._type, self._cls["SensorReading"]),
                Triple(subj, p["value"], value),
                Triple(
                    subj,
                    p["timestamp"],
                    Term.literal(iso_timestamp(reading.ts), XSD_DATETIME),
                ),
                Triple(subj, p["unit"], Term.string(unit)),
                Triple(sensor, p["hasReading"], subj),
                Triple(subj, p["partOfRecord"], record),
            ]

        if self.opts.mode is SchemaMode.UNIFIED_BNODE:
            subj = Term.blank(blank_reading_label(reading.node_id, sensor_idx, reading.ts))
        else:
            subj = Term.iri(
                UriPolicy.reading(reading.node_id, reading.sensor_name, reading.ts)
            )
        out = [
            Triple(sensor, p["hasReading"], subj),
            Triple(subj, p["value"], value),
        ]
        if self.opts.dedup_time_nodes:
            time_iri = UriPolicy.time_tick(reading.ts)
        else:
            time_iri = UriPolicy.time_reading(reading.node_id, sensor_idx, reading.ts)
        time_node = self._time_node_triples(time_iri, reading.ts, out)
        out.append(Triple(subj, p["hasTimestamp"], time_node))
        return out

    # -- whole graph -------------------------------------------------------

    def all_triples(self) -> Iterator[Triple]:
        yield from self.static_triples()
        metrics_by_job: dict[int, list[JobMetricRow]] = {}
        for m in self.ds.job_metrics:
            metrics_by_job.setdefault(m.job_id, []).append(m)
        for job in self.ds.jobs:
            yield from self.job_triples(job, metrics_by_job.get(job.id, []))
        for reading in self.ds.readings:
            yield from self.reading_triples(reading)


def build_graph(ds: Dataset, opts: BuildOptions) -> TripleStore:
    """Emit the full graph for ``ds`` into a sealed store."""
    store = TripleStore()
    emitter = TripleEmitter(ds, opts)
    store.insert_all(emitter.all_triples())
    return store.seal()


def triples_per_reading(mode: SchemaMode) -> int:
    return TRIPLES_PER_READING[mode]
