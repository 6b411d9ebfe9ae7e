"""The unified HPC telemetry ontology, encoded as data.

Twelve classes, twenty-three object properties (eight of which declare an
inverse), and twenty-five data properties, each carrying a human-readable
description.  The module can emit the schema as a Turtle or N-Triples
document, recount axioms from any graph, and check instance graphs
against the declared domains and ranges.

Axiom arithmetic: 60 declarations (12 + 23 + 25) plus 104 logical axioms
(23*2 object domain/range + 25*2 data domain/range + 8 inverse-of) gives
164 axioms total.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum
from functools import lru_cache
from typing import Mapping, Optional

from hpckg.errors import HpckgError
from hpckg.rdf_core import Term, TermKind, Triple, TripleStore
from hpckg.rdf_io import serialize_ntriples, serialize_turtle
from hpckg.vocab import (
    HPC,
    OWL_CLASS,
    OWL_DATATYPE_PROPERTY,
    OWL_INVERSE_OF,
    OWL_OBJECT_PROPERTY,
    RDFS_COMMENT,
    RDFS_DOMAIN,
    RDFS_RANGE,
    RDF_TYPE,
    XSD_DATETIME,
    XSD_DOUBLE,
    XSD_DURATION,
    XSD_FLOAT,
    XSD_INTEGER,
    XSD_STRING,
)


@dataclass(frozen=True, slots=True)
class ClassDef:
    name: str
    description: str

    @property
    def iri(self) -> str:
        return HPC + self.name


@dataclass(frozen=True, slots=True)
class ObjectPropertyDef:
    name: str
    domain: str
    range: str
    description: str
    inverse_of: Optional[str] = None

    @property
    def iri(self) -> str:
        return HPC + self.name


@dataclass(frozen=True, slots=True)
class DataPropertyDef:
    name: str
    domain: str
    range: str  # XSD datatype IRI
    description: str

    @property
    def iri(self) -> str:
        return HPC + self.name


_CLASSES = (
    ClassDef("DataCenter", "Models the physical facility housing HPC infrastructure."),
    ClassDef(
        "HPCSystem",
        "Refers to an entire HPC system composed of multiple racks, compute "
        "nodes and other HPC infrastructure.",
    ),
    ClassDef(
        "User",
        "Represents an individual user of the HPC system who submits "
        "workloads or jobs for execution on the HPC system.",
    ),
    ClassDef("Job", "Describes a computational task submitted to the HPC system."),
    ClassDef(
        "JobMetric",
        "Captures performance or requested resources metrics related to a job.",
    ),
    ClassDef("Rack", "Models a rack structure used to hold compute nodes."),
    ClassDef(
        "ComputeNode", "Represents an individual computational node in an HPC system."
    ),
    ClassDef(
        "Position",
        "Defines the physical location of the compute node in three dimensions.",
    ),
    ClassDef(
        "Plugin",
        "Represents an extensible software component or module used within "
        "the system.",
    ),
    ClassDef(
        "Sensor", "Denotes a hardware or virtual device that collects monitoring data."
    ),
    ClassDef(
        "SensorReading",
        "Represents the monitored data output from a sensor at a point in time.",
    ),
    ClassDef("Time", "Encodes temporal information for time modeling."),
)

_OBJECT_PROPERTIES = (
    ObjectPropertyDef(
        "hasHPCSystem",
        "DataCenter",
        "HPCSystem",
        "Associates a data center with the HPC systems it contains.",
    ),
    ObjectPropertyDef(
        "isHPCSystemOf",
        "HPCSystem",
        "DataCenter",
        "Inverse of hasHPCSystem.",
        inverse_of="hasHPCSystem",
    ),
    ObjectPropertyDef(
        "hasUser", "HPCSystem", "User", "Associates a user with a particular HPC system."
    ),
    ObjectPropertyDef(
        "isUserOf", "User", "HPCSystem", "Inverse of hasUser.", inverse_of="hasUser"
    ),
    ObjectPropertyDef(
        "hasRack", "HPCSystem", "Rack", "Associates an HPC system with its racks."
    ),
    ObjectPropertyDef(
        "isRackOf", "Rack", "HPCSystem", "Inverse of hasRack.", inverse_of="hasRack"
    ),
    ObjectPropertyDef(
        "hasComputeNode", "Rack", "ComputeNode", "Indicates that a rack contains compute nodes."
    ),
    ObjectPropertyDef(
        "isComputeNodeOf",
        "ComputeNode",
        "Rack",
        "Inverse of hasComputeNode.",
        inverse_of="hasComputeNode",
    ),
    ObjectPropertyDef(
        "hasPosition",
        "ComputeNode",
        "Position",
        "Indicates the physical position of a compute node.",
    ),
    ObjectPropertyDef(
        "isPositionOf",
        "Position",
        "ComputeNode",
        "Inverse of hasPosition.",
        inverse_of="hasPosition",
    ),
    ObjectPropertyDef("isJobOf", "Job", "User", "Indicates the user who submitted a job."),
    ObjectPropertyDef(
        "submitsJob", "User", "Job", "Inverse of isJobOf.", inverse_of="isJobOf"
    ),
    ObjectPropertyDef(
        "usesComputeNode", "Job", "ComputeNode", "Links a job to the compute nodes it utilizes."
    ),
    ObjectPropertyDef("hasJobStartTime", "Job", "Time", "Specifies the start time of a job."),
    ObjectPropertyDef("hasJobEndTime", "Job", "Time", "Specifies the end time of a job."),
    ObjectPropertyDef(
        "hasJobMetric",
        "Job",
        "JobMetric",
        "Links a job to its performance metrics and requested resources.",
    ),
    ObjectPropertyDef(
        "hasPlugin",
        "ComputeNode",
        "Plugin",
        "Indicates plugins or modules installed on a compute node.",
    ),
    ObjectPropertyDef(
        "hasReading", "Sensor", "SensorReading", "Links a sensor to its recorded readings."
    ),
    ObjectPropertyDef(
        "hasSensor", "ComputeNode", "Sensor", "Indicates sensors installed on a compute node."
    ),
    ObjectPropertyDef(
        "isSensorOf",
        "Sensor",
        "ComputeNode",
        "Inverse of hasSensor.",
        inverse_of="hasSensor",
    ),
    ObjectPropertyDef(
        "hasTimestamp",
        "SensorReading",
        "Time",
        "Specifies the time when a sensor reading was recorded.",
    ),
    ObjectPropertyDef(
        "includesSensor", "Plugin", "Sensor", "Indicates sensors included as part of a plugin."
    ),
    ObjectPropertyDef(
        "isPartOfPlugin",
        "Sensor",
        "Plugin",
        "Inverse of includesSensor.",
        inverse_of="includesSensor",
    ),
)

_DATA_PROPERTIES = (
    DataPropertyDef("dcId", "DataCenter", XSD_INTEGER, "The identifier for a data center."),
    DataPropertyDef("dcName", "DataCenter", XSD_STRING, "The name of the data center."),
    DataPropertyDef(
        "location", "DataCenter", XSD_STRING, "The physical location of the data center."
    ),
    DataPropertyDef(
        "systemId", "HPCSystem", XSD_INTEGER, "The identifier for a specific HPC system."
    ),
    DataPropertyDef("systemName", "HPCSystem", XSD_STRING, "The name of the HPC system."),
    DataPropertyDef("userId", "User", XSD_INTEGER, "The identifier for a user in the system."),
    DataPropertyDef("userName", "User", XSD_STRING, "The name of a user in the HPC system."),
    DataPropertyDef(
        "rackId", "Rack", XSD_INTEGER, "A unique identifier for a rack within the HPC system."
    ),
    DataPropertyDef(
        "computeNodeId", "ComputeNode", XSD_INTEGER, "A unique identifier for a compute node."
    ),
    DataPropertyDef(
        "posX", "Position", XSD_INTEGER, "The X-coordinate of a compute node's position."
    ),
    DataPropertyDef(
        "posY", "Position", XSD_INTEGER, "The Y-coordinate of a compute node's position."
    ),
    DataPropertyDef(
        "posZ", "Position", XSD_INTEGER, "The Z-coordinate of a compute node's position."
    ),
    DataPropertyDef(
        "pluginName", "Plugin", XSD_STRING, "The name of a plugin installed on a compute node."
    ),
    DataPropertyDef("jobId", "Job", XSD_INTEGER, "A unique identifier for a job."),
    DataPropertyDef("jobName", "Job", XSD_STRING, "The name given to the job."),
    DataPropertyDef(
        "groupId",
        "Job",
        XSD_INTEGER,
        "The identifier for the group of the user who submitted the job.",
    ),
    DataPropertyDef(
        "exitCode",
        "Job",
        XSD_INTEGER,
        "The exit code of a job upon completion, indicating success or failure.",
    ),
    DataPropertyDef(
        "jobDuration",
        "Job",
        XSD_DURATION,
        "The duration of a job in the ISO 8601 duration format.",
    ),
    DataPropertyDef(
        "metricName",
        "JobMetric",
        XSD_STRING,
        "The name of the metric associated with a job's performance or resource usage.",
    ),
    DataPropertyDef(
        "metricValue",
        "JobMetric",
        XSD_FLOAT,
        "The value of the performance or resource usage metric for a job.",
    ),
    DataPropertyDef(
        "sensorName", "Sensor", XSD_STRING, "The name of a sensor installed in a compute node."
    ),
    DataPropertyDef(
        "sensorType",
        "Sensor",
        XSD_STRING,
        "The type or category of the sensor (e.g., temperature, power).",
    ),
    DataPropertyDef(
        "sensorUnit",
        "Sensor",
        XSD_STRING,
        "The unit of measurement for the sensor's data (e.g., degrees Celsius, watts).",
    ),
    DataPropertyDef(
        "timestamp",
        "Time",
        XSD_DATETIME,
        "The timestamp associated with an event or sensor reading.",
    ),
    DataPropertyDef("value", "SensorReading", XSD_DOUBLE, "The value of a sensor reading."),
)


@dataclass(frozen=True)
class OntologySchema:
    """Immutable schema registry with domain/range lookups.

    ``extra_domains`` and ``extra_datatypes`` widen what the validator
    accepts for individual properties without touching the declared
    definitions (used by the legacy schema extension and by the dual
    timestamp encoding).
    """

    classes: tuple[ClassDef, ...]
    object_properties: tuple[ObjectPropertyDef, ...]
    data_properties: tuple[DataPropertyDef, ...]
    extra_domains: Mapping[str, frozenset[str]] = field(default_factory=dict)
    extra_datatypes: Mapping[str, frozenset[str]] = field(default_factory=dict)

    def __post_init__(self):
        names = {c.name for c in self.classes}
        for prop in self.object_properties:
            if prop.domain not in names or prop.range not in names:
                raise HpckgError(f"object property {prop.name} references unknown class")
            if prop.inverse_of is not None and prop.inverse_of not in {
                p.name for p in self.object_properties
            }:
                raise HpckgError(f"{prop.name} inverse target not declared")
        for prop in self.data_properties:
            if prop.domain not in names:
                raise HpckgError(f"data property {prop.name} references unknown class")

    # -- lookups ---------------------------------------------------------

    def class_def(self, name: str) -> Optional[ClassDef]:
        return next((c for c in self.classes if c.name == name), None)

    def object_property(self, name: str) -> Optional[ObjectPropertyDef]:
        return next((p for p in self.object_properties if p.name == name), None)

    def data_property(self, name: str) -> Optional[DataPropertyDef]:
        return next((p for p in self.data_properties if p.name == name), None)

    def allowed_domains(self, prop_name: str) -> frozenset[str]:
        base: set[str] = set()
        obj = self.object_property(prop_name)
        if obj:
            base.add(obj.domain)
        dat = self.data_property(prop_name)
        if dat:
            base.add(dat.domain)
        return frozenset(base | set(self.extra_domains.get(prop_name, frozenset())))

    def allowed_datatypes(self, prop_name: str) -> frozenset[str]:
        dat = self.data_property(prop_name)
        base = {dat.range} if dat else set()
        return frozenset(base | set(self.extra_datatypes.get(prop_name, frozenset())))

    # -- axiom arithmetic -------------------------------------------------

    @property
    def declaration_count(self) -> int:
        return len(self.classes) + len(self.object_properties) + len(self.data_properties)

    @property
    def inverse_count(self) -> int:
        return sum(1 for p in self.object_properties if p.inverse_of is not None)

    @property
    def logical_axiom_count(self) -> int:
        return (
            2 * len(self.object_properties)
            + 2 * len(self.data_properties)
            + self.inverse_count
        )

    @property
    def total_axiom_count(self) -> int:
        return self.declaration_count + self.logical_axiom_count


@lru_cache(maxsize=None)
def builtin_schema() -> OntologySchema:
    """The unified schema; ``timestamp`` accepts both of its encodings.

    Time values may be stored either as ISO 8601 ``xsd:dateTime``
    literals or as Unix-second ``xsd:integer`` literals, so the validator
    accepts both against the declared ``xsd:dateTime`` range.
    """
    return OntologySchema(
        classes=_CLASSES,
        object_properties=_OBJECT_PROPERTIES,
        data_properties=_DATA_PROPERTIES,
        extra_datatypes={"timestamp": frozenset({XSD_INTEGER})},
    )


@lru_cache(maxsize=None)
def legacy_schema() -> OntologySchema:
    """Schema extension for graphs built under the older per-reading layout.

    Adds the DataRecord class with its linking property, a per-reading
    ``unit`` string, and widens ``timestamp`` so it may sit directly on a
    SensorReading.
    """
    base = builtin_schema()
    return OntologySchema(
        classes=base.classes
        + (
            ClassDef(
                "DataRecord",
                "Groups the sensor readings ingested from one collector batch.",
            ),
        ),
        object_properties=base.object_properties
        + (
            ObjectPropertyDef(
                "partOfRecord",
                "SensorReading",
                "DataRecord",
                "Links a sensor reading to the record it was ingested from.",
            ),
        ),
        data_properties=base.data_properties
        + (
            DataPropertyDef(
                "unit",
                "SensorReading",
                XSD_STRING,
                "The unit of measurement attached directly to a reading.",
            ),
        ),
        extra_domains={"timestamp": frozenset({"SensorReading"})},
        extra_datatypes={"timestamp": frozenset({XSD_INTEGER})},
    )


# ---------------------------------------------------------------------------
# Document emission


def ontology_store(schema: OntologySchema) -> TripleStore:
    """Spell the schema out as triples, ordered classes / object / data.

    Each section is alphabetical; descriptions become ``rdfs:comment``
    annotations, which the axiom recount ignores.
    """
    store = TripleStore()
    rdf_type = Term.iri(RDF_TYPE)
    domain = Term.iri(RDFS_DOMAIN)
    range_ = Term.iri(RDFS_RANGE)
    comment = Term.iri(RDFS_COMMENT)
    inverse = Term.iri(OWL_INVERSE_OF)
    owl_class = Term.iri(OWL_CLASS)
    obj_prop = Term.iri(OWL_OBJECT_PROPERTY)
    data_prop = Term.iri(OWL_DATATYPE_PROPERTY)

    for cls in sorted(schema.classes, key=lambda c: c.name):
        subject = Term.iri(cls.iri)
        store.insert(Triple(subject, rdf_type, owl_class))
        store.insert(Triple(subject, comment, Term.string(cls.description)))
    for prop in sorted(schema.object_properties, key=lambda p: p.name):
        subject = Term.iri(prop.iri)
        store.insert(Triple(subject, rdf_type, obj_prop))
        store.insert(Triple(subject, domain, Term.iri(HPC + prop.domain)))
        store.insert(Triple(subject, range_, Term.iri(HPC + prop.range)))
        if prop.inverse_of:
            store.insert(Triple(subject, inverse, Term.iri(HPC + prop.inverse_of)))
        store.insert(Triple(subject, comment, Term.string(prop.description)))
    for prop in sorted(schema.data_properties, key=lambda p: p.name):
        subject = Term.iri(prop.iri)
        store.insert(Triple(subject, rdf_type, data_prop))
        store.insert(Triple(subject, domain, Term.iri(HPC + prop.domain)))
        store.insert(Triple(subject, range_, Term.iri(prop.range)))
        store.insert(Triple(subject, comment, Term.string(prop.description)))
    return store.seal()


def emit_ontology(schema: OntologySchema, format: str = "turtle") -> bytes:
    """Render the schema document as ``"turtle"`` or ``"ntriples"`` bytes."""
    store = ontology_store(schema)
    if format == "turtle":
        return serialize_turtle(store)
    if format == "ntriples":
        return serialize_ntriples(store)
    raise HpckgError(f"unsupported ontology format: {format!r}")


@dataclass(frozen=True, slots=True)
class AxiomCounts:
    classes: int
    object_properties: int
    data_properties: int
    domain_axioms: int
    range_axioms: int
    inverse_axioms: int

    @property
    def declarations(self) -> int:
        return self.classes + self.object_properties + self.data_properties

    @property
    def logical(self) -> int:
        return self.domain_axioms + self.range_axioms + self.inverse_axioms

    @property
    def total(self) -> int:
        return self.declarations + self.logical


def count_axioms(store: TripleStore) -> AxiomCounts:
    """Recount declarations and logical axioms from a schema graph."""

    def count(p: str, o: Optional[str] = None) -> int:
        pattern_p = Term.iri(p)
        pattern_o = Term.iri(o) if o else None
        pid = store.term_id(pattern_p)
        if pid is None:
            return 0
        oid = store.term_id(pattern_o) if pattern_o else None
        if pattern_o is not None and oid is None:
            return 0
        return sum(1 for _ in store.match_ids(None, pid, oid))

    return AxiomCounts(
        classes=count(RDF_TYPE, OWL_CLASS),
        object_properties=count(RDF_TYPE, OWL_OBJECT_PROPERTY),
        data_properties=count(RDF_TYPE, OWL_DATATYPE_PROPERTY),
        domain_axioms=count(RDFS_DOMAIN),
        range_axioms=count(RDFS_RANGE),
        inverse_axioms=count(OWL_INVERSE_OF),
    )


# ---------------------------------------------------------------------------
# Instance validation


class ViolationKind(Enum):
    DOMAIN = "DomainViolation"
    RANGE = "RangeViolation"
    DATATYPE = "DatatypeViolation"
    UNKNOWN_PROPERTY = "UnknownProperty"


@dataclass(frozen=True, slots=True)
class Violation:
    kind: ViolationKind
    triple: Triple
    expected: str
    found: str

    def __str__(self) -> str:
        from hpckg.rdf_io import render_triple

        return (
            f"{self.kind.value}: expected {self.expected}, found {self.found} "
            f"in {render_triple(self.triple).strip()}"
        )


def validate_graph(schema: OntologySchema, store: TripleStore) -> list[Violation]:
    """Check every hpc-namespace predicate against the schema.

    Typing is open-world: a subject or object with no ``rdf:type`` triple
    passes the class checks (emission templates deliberately omit type
    triples for readings and time nodes); a resource typed with a class
    incompatible with the declared domain/range is flagged.  Literal
    objects of data properties must carry an allowed datatype.
    """
    store.seal()
    type_id = store.term_id(Term.iri(RDF_TYPE))
    types: dict[int, set[str]] = {}
    if type_id is not None:
        for s, _, o in store.match_ids(None, type_id, None):
            obj = store.resolve(o)
            if obj.kind is TermKind.IRI and obj.text.startswith(HPC):
                types.setdefault(s, set()).add(obj.text[len(HPC) :])

    violations: list[Violation] = []

    def class_names(tid: int) -> Optional[set[str]]:
        return types.get(tid)

    for s, p, o in store.match_ids(None, None, None):
        pred = store.resolve(p)
        if not pred.text.startswith(HPC):
            continue
        local = pred.text[len(HPC) :]
        obj_prop = schema.object_property(local)
        data_prop = schema.data_property(local)
        if obj_prop is None and data_prop is None:
            violations.append(
                Violation(
                    ViolationKind.UNKNOWN_PROPERTY,
                    _resolve_triple(store, s, p, o),
                    expected="a declared property",
                    found=local,
                )
            )
            continue

        allowed = schema.allowed_domains(local)
        subject_types = class_names(s)
        if subject_types is not None and not (subject_types & allowed):
            violations.append(
                Violation(
                    ViolationKind.DOMAIN,
                    _resolve_triple(store, s, p, o),
                    expected=" or ".join(sorted(allowed)),
                    found=" or ".join(sorted(subject_types)),
                )
            )

        obj_term = store.resolve(o)
        if obj_prop is not None:
            if obj_term.is_literal:
                violations.append(
                    Violation(
                        ViolationKind.RANGE,
                        _resolve_triple(store, s, p, o),
                        expected=obj_prop.range,
                        found="literal",
                    )
                )
            else:
                object_types = class_names(store.term_id(obj_term))
                if object_types is not None and obj_prop.range not in object_types:
                    violations.append(
                        Violation(
                            ViolationKind.RANGE,
                            _resolve_triple(store, s, p, o),
                            expected=obj_prop.range,
                            found=" or ".join(sorted(object_types)),
                        )
                    )
        elif data_prop is not None:
            if not obj_term.is_literal:
                violations.append(
                    Violation(
                        ViolationKind.RANGE,
                        _resolve_triple(store, s, p, o),
                        expected=f"literal of <{data_prop.range}>",
                        found="resource",
                    )
                )
            elif obj_term.datatype not in schema.allowed_datatypes(local):
                violations.append(
                    Violation(
                        ViolationKind.DATATYPE,
                        _resolve_triple(store, s, p, o),
                        expected=" or ".join(sorted(schema.allowed_datatypes(local))),
                        found=obj_term.datatype or "",
                    )
                )

    return violations


def _resolve_triple(store: TripleStore, s: int, p: int, o: int) -> Triple:
    return Triple(store.resolve(s), store.resolve(p), store.resolve(o))
