import pytest

from hpckg.analytics.stats import (
    GraphStats,
    MIB,
    compare_modes,
    dry_run_counts,
    format_compare_table,
    project_storage,
    reduction_percent,
    render_compare_figure,
    write_compare_csv,
)
from hpckg.builder import SchemaMode
from hpckg.fixtures import FixtureParams, generate

GIB = 1024 * MIB


@pytest.fixture(scope="module")
def small_report(desk_dataset):
    return compare_modes(desk_dataset, baseline_bytes=1_000_000)


# -- dry-run arithmetic -----------------------------------------------------------


def test_dry_run_single_node_104_sensors_day():
    shape = FixtureParams(sensors_per_node=104, sampling_interval=20, duration=86_400)
    counts = dry_run_counts(shape, SchemaMode.LEGACY)
    assert counts.readings == 449_280
    assert counts.reading_triples == 2_695_680
    assert counts.reading_triples > 2_600_000


def test_dry_run_reference_scale_values():
    shape = FixtureParams(nodes_per_rack=979, sensors_per_node=1,
                          sampling_interval=20, duration=86_400)
    legacy = dry_run_counts(shape, SchemaMode.LEGACY)
    unified = dry_run_counts(shape, SchemaMode.UNIFIED_URI)
    assert legacy.readings == 4_229_280
    assert legacy.reading_triples == 25_375_680
    assert unified.reading_triples == 16_917_120


def test_dry_run_zero_readings_is_static_only():
    shape = FixtureParams(duration=0, users_per_system=1, jobs_per_system=2,
                          metrics_per_job=2)
    counts = dry_run_counts(shape, SchemaMode.UNIFIED_URI)
    assert counts.reading_triples == 0
    assert counts.static_triples > 0
    assert counts.total == counts.static_triples


def test_dry_run_matches_real_build():
    shape = FixtureParams(seed=5, nodes_per_rack=2, sensors_per_node=3,
                          sampling_interval=1800, duration=86_400,
                          users_per_system=2, jobs_per_system=6, metrics_per_job=4)
    from hpckg.builder import BuildOptions, build_graph

    ds = generate(shape)
    for mode in SchemaMode:
        counts = dry_run_counts(shape, mode)
        store = build_graph(ds, BuildOptions(mode))
        assert counts.total == store.triple_count, mode
    dedup = dry_run_counts(shape, SchemaMode.UNIFIED_URI, dedup_time_nodes=True)
    store = build_graph(ds, BuildOptions(SchemaMode.UNIFIED_URI, dedup_time_nodes=True))
    assert dedup.total == store.triple_count


# -- reductions --------------------------------------------------------------------


def test_reduction_formula_replays_published_constants():
    assert reduction_percent(1074.89, 657.36) == pytest.approx(38.84, abs=0.01)
    assert reduction_percent(657.36, 481.00) == pytest.approx(26.82, abs=0.01)


def test_baseline_ratios_replay_published_constants():
    assert 657.36 / 2.77 == pytest.approx(237.3, abs=0.05)
    assert 481.00 / 2.77 == pytest.approx(173.6, abs=0.05)
    assert round(657.36 / 2.77) in (237, 238)
    assert round(481.00 / 2.77) == 174


def test_compare_modes_invariants(small_report, desk_dataset):
    uri = small_report.stats[SchemaMode.UNIFIED_URI]
    bnode = small_report.stats[SchemaMode.UNIFIED_BNODE]
    legacy = small_report.stats[SchemaMode.LEGACY]
    assert uri.triples == bnode.triples
    assert uri.nodes == bnode.nodes
    assert small_report.reading_triple_reduction == pytest.approx(100 * (1 - 4 / 6))
    assert bnode.bytes < uri.bytes < legacy.bytes
    assert small_report.readings == len(desk_dataset.readings)
    assert small_report.ratio_vs_baseline(SchemaMode.UNIFIED_URI) == pytest.approx(
        uri.bytes / 1_000_000
    )


# -- projection ---------------------------------------------------------------------


def _day(mib: float) -> GraphStats:
    return GraphStats(SchemaMode.UNIFIED_URI, 0, 0, round(mib * MIB))


def test_projection_replays_published_month_figures():
    assert project_storage(_day(1074.89), 28) / GIB == pytest.approx(29.39, abs=0.01)
    assert project_storage(_day(657.36), 28) / GIB == pytest.approx(17.97, abs=0.01)
    assert project_storage(_day(481.00), 28) / GIB == pytest.approx(13.15, abs=0.01)


def test_projection_zero_days_is_static_only():
    assert project_storage(_day(100), 0) == 0
    assert project_storage(_day(100), 0, static_bytes=123) == 123


def test_projection_counts_static_once():
    day = GraphStats(SchemaMode.UNIFIED_URI, 0, 0, 1000)
    assert project_storage(day, 3, static_bytes=100) == 100 + 900 * 3


def test_projection_rejects_negative_days():
    with pytest.raises(ValueError):
        project_storage(_day(1), -1)


# -- report output -------------------------------------------------------------------


def test_table_rendering_mentions_all_layouts(small_report):
    text = format_compare_table(small_report)
    assert "legacy" in text and "bnodes" in text
    assert "# Triples" in text and "Size [MiB]" in text
    assert "%" in text


def test_csv_and_figure_outputs(tmp_path, small_report):
    write_compare_csv(small_report, tmp_path / "compare.csv")
    lines = (tmp_path / "compare.csv").read_text().splitlines()
    assert lines[0] == "version,triples,nodes,bytes,mib"
    assert len([l for l in lines if l.startswith("unified")]) == 2

    render_compare_figure(small_report, tmp_path / "compare.png")
    data = (tmp_path / "compare.png").read_bytes()
    assert data[:8] == b"\x89PNG\r\n\x1a\n"
