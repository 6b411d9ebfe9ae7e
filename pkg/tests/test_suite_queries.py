import shutil

import pytest

from hpckg.analytics.suite import (
    QUESTION_IDS,
    default_manifest,
    load_manifest,
    packaged_query_dir,
    run_suite,
    write_manifest,
)
from hpckg.builder import BuildOptions, SchemaMode, build_graph
from hpckg.fixtures import FixtureParams, generate
from hpckg.ingest import Dataset

SUITE_SHAPES = [
    FixtureParams(seed=11, data_centers=2, systems_per_dc=1, racks_per_system=2,
                  nodes_per_rack=3, sensors_per_node=3, sampling_interval=3600,
                  duration=86_400, users_per_system=3, jobs_per_system=12,
                  metrics_per_job=8),
    FixtureParams(seed=23, data_centers=1, systems_per_dc=2, racks_per_system=1,
                  nodes_per_rack=4, sensors_per_node=4, sampling_interval=1800,
                  duration=86_400, users_per_system=2, jobs_per_system=9,
                  metrics_per_job=6),
    FixtureParams(seed=47, data_centers=2, systems_per_dc=2, racks_per_system=1,
                  nodes_per_rack=2, sensors_per_node=2, sampling_interval=7200,
                  duration=172_800, users_per_system=4, jobs_per_system=15,
                  metrics_per_job=4, job_centric=True),
]


def test_question_id_list_is_complete():
    assert len(QUESTION_IDS) == 36
    assert QUESTION_IDS[0] == "C1.1"
    assert QUESTION_IDS[-1] == "C6.5"
    assert len({qid for qid in QUESTION_IDS}) == 36


def test_all_query_files_ship():
    qdir = packaged_query_dir()
    for qid in QUESTION_IDS:
        assert (qdir / f"{qid}.rq").is_file(), qid


@pytest.mark.parametrize("params", SUITE_SHAPES, ids=lambda p: f"seed{p.seed}")
@pytest.mark.parametrize("mode", [SchemaMode.UNIFIED_URI, SchemaMode.UNIFIED_BNODE],
                         ids=lambda m: m.value)
def test_suite_matches_oracle_on_seeded_fixtures(params, mode):
    ds = generate(params)
    store = build_graph(ds, BuildOptions(mode))
    result = run_suite(store, ds)
    failures = [e for e in result.entries if not e.oracle_match]
    assert result.all_parsed
    assert not failures, result.to_text()
    assert len(result.entries) == 36


def test_suite_on_empty_dataset_matches_trivially():
    ds = Dataset()
    store = build_graph(ds, BuildOptions(SchemaMode.UNIFIED_URI))
    result = run_suite(store, ds)
    assert result.all_parsed
    assert result.all_matched


def test_missing_query_file_fails_that_entry_and_continues(tmp_path):
    qdir = tmp_path / "queries"
    shutil.copytree(packaged_query_dir(), qdir)
    (qdir / "C2.4.rq").unlink()
    params = SUITE_SHAPES[0]
    ds = generate(params)
    store = build_graph(ds, BuildOptions(SchemaMode.UNIFIED_URI))
    result = run_suite(store, ds, query_dir=qdir)
    assert len(result.entries) == 36
    broken = next(e for e in result.entries if e.qid == "C2.4")
    assert not broken.parse_ok and "missing" in broken.error
    assert sum(1 for e in result.entries if e.oracle_match) == 35


def test_manifest_round_trip(tmp_path, desk_dataset):
    manifest = default_manifest(desk_dataset)
    write_manifest(manifest, tmp_path / "m.txt")
    loaded = load_manifest(tmp_path / "m.txt")
    assert loaded == manifest


def test_suite_determinism(desk_dataset, unified_store):
    a = run_suite(unified_store, desk_dataset)
    b = run_suite(unified_store, desk_dataset)
    strip = lambda res: [(e.qid, e.parse_ok, e.row_count, e.oracle_match) for e in res.entries]
    assert strip(a) == strip(b)


def test_some_answers_are_nonempty_on_rich_fixture():
    params = SUITE_SHAPES[0]
    ds = generate(params)
    store = build_graph(ds, BuildOptions(SchemaMode.UNIFIED_URI))
    result = run_suite(store, ds)
    nonempty = {e.qid for e in result.entries if e.row_count > 0}
    # The fixture is built so the central questions actually return data.
    for qid in ("C1.1", "C1.4", "C2.1", "C3.2", "C3.4", "C4.1", "C6.1", "C6.2", "C6.3"):
        assert qid in nonempty
