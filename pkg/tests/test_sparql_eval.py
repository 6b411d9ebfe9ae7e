import itertools

import pytest

from hpckg.rdf_core import Term, Triple, TripleStore
from hpckg.sparql import evaluate, parse_query
from hpckg.sparql.values import DurationVal, IriVal
from hpckg.vocab import HPC, XSD_INTEGER

PROLOGUE = (
    "PREFIX hpc: <http://ontology.hpc.org/>\n"
    "PREFIX xsd: <http://www.w3.org/2001/XMLSchema#>\n"
)


def iri(name):
    return Term.iri(HPC + name)


def job_store() -> TripleStore:
    """Two systems; jobs of 100 s and 200 s on system A, 50 s on system B."""
    store = TripleStore()
    rdf_type = Term.iri("http://www.w3.org/1999/02/22-rdf-syntax-ns#type")
    t0 = 1_643_673_600

    def add(s, p, o):
        store.insert(Triple(s, p, o))

    for sys_no, name in ((1, "A"), (2, "B")):
        system = iri(f"system/{sys_no}")
        add(system, rdf_type, iri("HPCSystem"))
        add(system, iri("systemName"), Term.string(name))
        add(system, iri("hasRack"), iri(f"rack/{sys_no}"))
        add(iri(f"rack/{sys_no}"), iri("hasComputeNode"), iri(f"node/{sys_no}"))

    jobs = [(1, 1, 100), (2, 1, 200), (3, 2, 50)]
    for job_id, sys_no, seconds in jobs:
        job = iri(f"job/{job_id}")
        add(job, iri("usesComputeNode"), iri(f"node/{sys_no}"))
        start, end = iri(f"time/{t0}"), iri(f"time/{t0 + seconds}")
        add(job, iri("hasJobStartTime"), start)
        add(job, iri("hasJobEndTime"), end)
        add(start, iri("timestamp"), Term.integer(t0))
        add(end, iri("timestamp"), Term.integer(t0 + seconds))
    return store.seal()


CROSS_SYSTEM_AVERAGE = PROLOGUE + """
SELECT ?systemName (AVG(?execTimeSeconds) AS ?avg)
WHERE {
  ?hpcSystem a hpc:HPCSystem ;
             hpc:systemName ?systemName ;
             hpc:hasRack ?rack .
  ?rack hpc:hasComputeNode ?computeNode .
  ?job hpc:usesComputeNode ?computeNode ;
       hpc:hasJobStartTime ?startTime ;
       hpc:hasJobEndTime ?endTime .
  ?startTime hpc:timestamp ?startTimestamp .
  ?endTime hpc:timestamp ?endTimestamp .
  BIND((xsd:dateTime(?endTimestamp) - xsd:dateTime(?startTimestamp)) * 86400 AS ?execTimeSeconds)
}
GROUP BY ?systemName
ORDER BY ?systemName
"""


def test_average_execution_time_per_system():
    table = evaluate(parse_query(CROSS_SYSTEM_AVERAGE), job_store())
    assert table.columns == ["systemName", "avg"]
    rows = {name: avg for name, avg in table.rows}
    assert rows["A"] == pytest.approx(150.0, rel=1e-12)
    assert rows["B"] == pytest.approx(50.0, rel=1e-12)


def test_day_difference_times_86400_is_exact():
    store = TripleStore()
    t0 = 1_643_673_600
    a, b = iri("time/a"), iri("time/b")
    store.insert(Triple(a, iri("timestamp"), Term.integer(t0)))
    store.insert(Triple(b, iri("timestamp"), Term.integer(t0 + 86_400)))
    q = PROLOGUE + """
    SELECT ?days WHERE {
      hpc:time/a hpc:timestamp ?ta .
      hpc:time/b hpc:timestamp ?tb .
      BIND(xsd:dateTime(?tb) - xsd:dateTime(?ta) AS ?days)
    }
    """
    # 'time/a' is not a valid prefixed local name; use explicit IRIs.
    q = PROLOGUE + f"""
    SELECT ?days WHERE {{
      <{HPC}time/a> hpc:timestamp ?ta .
      <{HPC}time/b> hpc:timestamp ?tb .
      BIND(xsd:dateTime(?tb) - xsd:dateTime(?ta) AS ?days)
    }}
    """
    table = evaluate(parse_query(q), store)
    assert table.rows == [(1.0,)]


def test_datetime_cast_accepts_iso_strings_and_unix_integers():
    store = TripleStore()
    store.insert(
        Triple(
            iri("time/x"),
            iri("timestamp"),
            Term.literal("2022-02-01T00:00:00+00:00", "http://www.w3.org/2001/XMLSchema#dateTime"),
        )
    )
    store.insert(Triple(iri("time/y"), iri("timestamp"), Term.integer(1_643_673_600)))
    q = PROLOGUE + f"""
    SELECT ?same WHERE {{
      <{HPC}time/x> hpc:timestamp ?a .
      <{HPC}time/y> hpc:timestamp ?b .
      BIND(xsd:dateTime(?a) = xsd:dateTime(?b) AS ?same)
    }}
    """
    assert evaluate(parse_query(q), store).rows == [(True,)]


def test_empty_store_yields_empty_table_with_header():
    table = evaluate(
        parse_query(PROLOGUE + "SELECT ?s ?o WHERE { ?s hpc:hasRack ?o }"),
        TripleStore(),
    )
    assert table.columns == ["s", "o"]
    assert table.rows == []


def test_filter_drops_type_error_rows():
    store = TripleStore()
    store.insert(Triple(iri("a"), iri("p"), Term.integer(5)))
    store.insert(Triple(iri("b"), iri("p"), Term.string("five")))
    q = PROLOGUE + "SELECT ?s WHERE { ?s hpc:p ?v . FILTER(?v > 1) }"
    table = evaluate(parse_query(q), store)
    assert [r[0] for r in table.rows] == [IriVal(HPC + "a")]


def test_bind_error_leaves_variable_unbound():
    store = TripleStore()
    store.insert(Triple(iri("a"), iri("p"), Term.string("x")))
    q = PROLOGUE + "SELECT ?s ?d WHERE { ?s hpc:p ?v . BIND(?v * 2 AS ?d) }"
    table = evaluate(parse_query(q), store)
    assert table.rows == [(IriVal(HPC + "a"), None)]


def test_join_order_independence(unified_store):
    base = PROLOGUE + """
    SELECT ?name WHERE {
      %s
    } ORDER BY ?name
    """
    patterns = [
        "?system a hpc:HPCSystem .",
        "?system hpc:systemName ?name .",
        "?system hpc:hasRack ?rack .",
    ]
    results = set()
    for perm in itertools.permutations(patterns):
        table = evaluate(parse_query(base % "\n      ".join(perm)), unified_store)
        results.add(tuple(table.rows))
    assert len(results) == 1


def test_adding_unrelated_triples_leaves_results_unchanged():
    store = job_store()
    q = PROLOGUE + "SELECT ?n WHERE { ?s hpc:systemName ?n } ORDER BY ?n"
    before = evaluate(parse_query(q), store).rows

    bigger = TripleStore()
    for t in store:
        bigger.insert(t)
    for i in range(50):
        bigger.insert(Triple(iri(f"noise/{i}"), iri("noisy"), Term.integer(i)))
    after = evaluate(parse_query(q), bigger).rows
    assert before == after


def test_distinct_collapses_whole_rows():
    store = TripleStore()
    store.insert(Triple(iri("a"), iri("p"), iri("x")))
    store.insert(Triple(iri("b"), iri("p"), iri("x")))
    q = PROLOGUE + "SELECT DISTINCT ?o WHERE { ?s hpc:p ?o }"
    assert len(evaluate(parse_query(q), store).rows) == 1


def test_order_by_desc_with_secondary_key_and_limit():
    store = TripleStore()
    for name, score in (("a", 1), ("b", 2), ("c", 2)):
        store.insert(Triple(iri(name), iri("score"), Term.integer(score)))
        store.insert(Triple(iri(name), iri("label"), Term.string(name)))
    q = PROLOGUE + """
    SELECT ?label ?v WHERE { ?s hpc:score ?v ; hpc:label ?label }
    ORDER BY DESC(?v) ?label LIMIT 2
    """
    table = evaluate(parse_query(q), store)
    assert table.rows == [("b", 2), ("c", 2)]


def test_aggregates_over_empty_input():
    q = PROLOGUE + """
    SELECT (COUNT(?v) AS ?n) (SUM(?v) AS ?total) (AVG(?v) AS ?mean)
    WHERE { ?s hpc:score ?v }
    """
    table = evaluate(parse_query(q), TripleStore())
    assert table.rows == [(0, 0, None)]


def test_count_distinct():
    store = TripleStore()
    for s, o in (("a", 1), ("b", 1), ("c", 2)):
        store.insert(Triple(iri(s), iri("p"), Term.integer(o)))
    q = PROLOGUE + "SELECT (COUNT(DISTINCT ?o) AS ?n) WHERE { ?s hpc:p ?o }"
    assert evaluate(parse_query(q), store).rows == [(2,)]


def test_duration_values_surface_as_values():
    store = TripleStore()
    store.insert(
        Triple(iri("job/1"), iri("jobDuration"),
               Term.literal("PT300S", "http://www.w3.org/2001/XMLSchema#duration"))
    )
    q = PROLOGUE + "SELECT ?d WHERE { ?j hpc:jobDuration ?d }"
    assert evaluate(parse_query(q), store).rows == [(DurationVal(300.0),)]


def test_literal_matching_is_lexical():
    store = TripleStore()
    store.insert(Triple(iri("a"), iri("p"), Term.literal("01", XSD_INTEGER)))
    q1 = PROLOGUE + "SELECT ?s WHERE { ?s hpc:p 1 }"
    q2 = PROLOGUE + "SELECT ?s WHERE { ?s hpc:p ?v . FILTER(?v = 1) }"
    assert evaluate(parse_query(q1), store).rows == []  # term-level mismatch
    assert len(evaluate(parse_query(q2), store).rows) == 1  # value-level match


def test_csv_and_text_rendering():
    import io

    table = evaluate(
        parse_query(PROLOGUE + "SELECT ?n WHERE { ?s hpc:systemName ?n } ORDER BY ?n"),
        job_store(),
    )
    buf = io.StringIO()
    table.to_csv(buf)
    assert buf.getvalue() == "n\nA\nB\n"
    text = table.to_text()
    assert "A" in text and text.startswith("n")
