import pytest

from hpckg.builder import BuildOptions, SchemaMode, build_graph
from hpckg.errors import HpckgError
from hpckg.ontology import (
    ViolationKind,
    builtin_schema,
    count_axioms,
    emit_ontology,
    legacy_schema,
    ontology_store,
    validate_graph,
)
from hpckg.rdf_core import Term, Triple, TripleStore
from hpckg.rdf_io import read_ntriples
from hpckg.vocab import HPC, XSD_DOUBLE, XSD_STRING


def test_schema_cardinalities():
    s = builtin_schema()
    assert len(s.classes) == 12
    assert len(s.object_properties) == 23
    assert len(s.data_properties) == 25
    assert s.declaration_count == 60
    assert s.inverse_count == 8
    assert s.logical_axiom_count == 104
    assert s.total_axiom_count == 164


def test_class_and_property_lookups():
    s = builtin_schema()
    reading = s.class_def("SensorReading")
    assert reading is not None
    assert "monitored data output from a sensor" in reading.description

    has_reading = s.object_property("hasReading")
    assert has_reading.domain == "Sensor"
    assert has_reading.range == "SensorReading"

    value = s.data_property("value")
    assert value.domain == "SensorReading"
    assert value.range == XSD_DOUBLE


def test_inverse_axioms_are_exactly_the_declared_eight():
    s = builtin_schema()
    inverses = {p.name: p.inverse_of for p in s.object_properties if p.inverse_of}
    assert inverses == {
        "isHPCSystemOf": "hasHPCSystem",
        "isUserOf": "hasUser",
        "isRackOf": "hasRack",
        "isComputeNodeOf": "hasComputeNode",
        "isPositionOf": "hasPosition",
        "submitsJob": "isJobOf",
        "isSensorOf": "hasSensor",
        "isPartOfPlugin": "includesSensor",
    }


def test_emission_recounts_to_exact_axiom_totals():
    counts = count_axioms(ontology_store(builtin_schema()))
    assert counts.classes == 12
    assert counts.object_properties == 23
    assert counts.data_properties == 25
    assert counts.declarations == 60
    assert counts.domain_axioms == 48
    assert counts.range_axioms == 48
    assert counts.inverse_axioms == 8
    assert counts.logical == 104
    assert counts.total == 164


def test_ntriples_emission_reparse_is_a_fixed_point():
    data = emit_ontology(builtin_schema(), "ntriples")
    back = read_ntriples(data)
    counts = count_axioms(back)
    assert counts.total == 164
    assert emit_ontology(builtin_schema(), "ntriples") == data


def test_turtle_emission_is_deterministic_and_ordered():
    a = emit_ontology(builtin_schema(), "turtle")
    b = emit_ontology(builtin_schema(), "turtle")
    assert a == b
    text = a.decode()
    # Classes come before object properties, which come before data properties.
    assert text.index("hpc:ComputeNode a owl:Class") < text.index("hpc:hasComputeNode a owl:ObjectProperty")
    assert text.index("hpc:usesComputeNode a owl:ObjectProperty") < text.index("hpc:value a owl:DatatypeProperty")


def test_unknown_format_rejected():
    with pytest.raises(HpckgError):
        emit_ontology(builtin_schema(), "rdfxml")


def test_legacy_schema_extension_shape():
    s = legacy_schema()
    assert s.class_def("DataRecord") is not None
    assert s.object_property("partOfRecord").range == "DataRecord"
    assert s.data_property("unit").domain == "SensorReading"
    assert "SensorReading" in s.allowed_domains("timestamp")
    assert "Time" in s.allowed_domains("timestamp")


# -- validator -----------------------------------------------------------------


def test_builder_outputs_validate_clean(desk_dataset):
    for mode in SchemaMode:
        store = build_graph(desk_dataset, BuildOptions(mode))
        schema = legacy_schema() if mode is SchemaMode.LEGACY else builtin_schema()
        assert validate_graph(schema, store) == []


def _typed(store: TripleStore, iri_text: str, cls: str):
    store.insert(
        Triple(
            Term.iri(iri_text),
            Term.iri("http://www.w3.org/1999/02/22-rdf-syntax-ns#type"),
            Term.iri(HPC + cls),
        )
    )


def test_validator_flags_domain_violation():
    store = TripleStore()
    _typed(store, HPC + "job/1", "Job")
    store.insert(
        Triple(Term.iri(HPC + "job/1"), Term.iri(HPC + "hasReading"), Term.blank("r1"))
    )
    violations = validate_graph(builtin_schema(), store)
    kinds = [v.kind for v in violations]
    assert kinds == [ViolationKind.DOMAIN]
    assert "Sensor" in violations[0].expected
    assert "Job" in violations[0].found


def test_validator_flags_range_and_datatype_violations():
    store = TripleStore()
    _typed(store, HPC + "sensor/1/a", "Sensor")
    _typed(store, HPC + "user/1", "User")
    # Object property pointing at a wrongly-typed resource.
    store.insert(
        Triple(Term.iri(HPC + "sensor/1/a"), Term.iri(HPC + "hasReading"), Term.iri(HPC + "user/1"))
    )
    # Object property pointing at a literal.
    store.insert(
        Triple(Term.iri(HPC + "sensor/1/a"), Term.iri(HPC + "isSensorOf"), Term.string("oops"))
    )
    # Data property with the wrong literal datatype.
    _typed(store, HPC + "reading/1", "SensorReading")
    store.insert(
        Triple(Term.iri(HPC + "reading/1"), Term.iri(HPC + "value"), Term.string("not-a-double"))
    )
    kinds = sorted(v.kind.value for v in validate_graph(builtin_schema(), store))
    assert kinds == ["DatatypeViolation", "RangeViolation", "RangeViolation"]


def test_validator_flags_unknown_property():
    store = TripleStore()
    store.insert(
        Triple(Term.iri(HPC + "node/1"), Term.iri(HPC + "hasFlux"), Term.blank("x"))
    )
    violations = validate_graph(builtin_schema(), store)
    assert [v.kind for v in violations] == [ViolationKind.UNKNOWN_PROPERTY]


def test_validator_soundness_removing_offender_clears_violation():
    store = TripleStore()
    _typed(store, HPC + "job/1", "Job")
    offender = Triple(Term.iri(HPC + "job/1"), Term.iri(HPC + "hasReading"), Term.blank("r1"))
    store.insert(offender)
    violations = validate_graph(builtin_schema(), store)
    assert len(violations) == 1
    assert violations[0].triple == offender

    clean = TripleStore()
    for t in store:
        if t != offender:
            clean.insert(t)
    assert validate_graph(builtin_schema(), clean) == []


def test_validator_accepts_both_timestamp_encodings():
    store = TripleStore()
    _typed(store, HPC + "time/1", "Time")
    store.insert(
        Triple(Term.iri(HPC + "time/1"), Term.iri(HPC + "timestamp"), Term.integer(1_643_673_600))
    )
    store.insert(
        Triple(
            Term.iri(HPC + "time/1"),
            Term.iri(HPC + "timestamp"),
            Term.literal("2022-02-01T00:00:00+00:00", "http://www.w3.org/2001/XMLSchema#dateTime"),
        )
    )
    assert validate_graph(builtin_schema(), store) == []
    wrong = TripleStore()
    _typed(wrong, HPC + "time/1", "Time")
    wrong.insert(
        Triple(Term.iri(HPC + "time/1"), Term.iri(HPC + "timestamp"), Term.literal("x", XSD_STRING))
    )
    assert [v.kind for v in validate_graph(builtin_schema(), wrong)] == [
        ViolationKind.DATATYPE
    ]
