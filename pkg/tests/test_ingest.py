import pytest

from hpckg.errors import DatasetError
from hpckg.fixtures import FixtureParams, generate, write_fixture
from hpckg.ingest import load_dataset, slice_by_time

MINIMAL = {
    "datacenters.csv": "dc_id,name,location\n1,dc1,Bologna\n",
    "systems.csv": "system_id,dc_id,name\n1,1,system1\n",
    "racks.csv": "rack_id,system_id\n1,1\n",
    "nodes.csv": "node_id,rack_id,pos_x,pos_y,pos_z\n1,1,0,0,1\n",
    "plugins.csv": "node_id,plugin_name\n1,ipmi\n",
    "sensors.csv": "node_id,plugin_name,sensor_name,sensor_type,sensor_unit\n"
    "1,ipmi,total_power,power,W\n",
    "users.csv": "user_id,system_id,user_name\n",
    "jobs.csv": "job_id,user_id,group_id,job_name,exit_code,start_ts,end_ts,node_ids\n",
    "job_metrics.csv": "job_id,metric_name,metric_value\n",
    "readings.csv": "node_id,sensor_name,ts,value\n1,total_power,1643673600,450.5\n",
}


def write_minimal(tmp_path, overrides=None):
    files = dict(MINIMAL)
    if overrides:
        files.update(overrides)
    for name, content in files.items():
        (tmp_path / name).write_text(content, encoding="utf-8")
    return tmp_path


def test_minimal_fixture_loads_with_expected_counts(tmp_path):
    ds = load_dataset(write_minimal(tmp_path))
    counts = ds.counts()
    assert counts["data_centers"] == 1
    assert counts["hpc_systems"] == 1
    assert counts["racks"] == 1
    assert counts["compute_nodes"] == 1
    assert counts["sensors"] == 1
    assert counts["readings"] == 1
    assert ds.readings[0].value == 450.5


def test_missing_file_is_reported(tmp_path):
    write_minimal(tmp_path)
    (tmp_path / "sensors.csv").unlink()
    with pytest.raises(DatasetError, match="sensors.csv"):
        load_dataset(tmp_path)


def test_dangling_sensor_reference_names_the_sensor(tmp_path):
    write_minimal(
        tmp_path,
        {"readings.csv": "node_id,sensor_name,ts,value\n1,foo,1643673600,1.0\n"},
    )
    with pytest.raises(DatasetError, match="foo"):
        load_dataset(tmp_path)


def test_duplicate_primary_key_rejected(tmp_path):
    write_minimal(
        tmp_path,
        {"datacenters.csv": "dc_id,name,location\n1,dc1,Bologna\n1,dc2,Kobe\n"},
    )
    with pytest.raises(DatasetError, match="duplicate data center"):
        load_dataset(tmp_path)


def test_malformed_row_reports_line_number(tmp_path):
    write_minimal(
        tmp_path,
        {"nodes.csv": "node_id,rack_id,pos_x,pos_y,pos_z\n1,1,0,0\n"},
    )
    with pytest.raises(DatasetError, match="nodes.csv:2"):
        load_dataset(tmp_path)


def test_bad_header_rejected(tmp_path):
    write_minimal(tmp_path, {"racks.csv": "rack,system\n1,1\n"})
    with pytest.raises(DatasetError, match="bad header"):
        load_dataset(tmp_path)


def test_iso_timestamps_normalize_to_unix_seconds(tmp_path):
    write_minimal(
        tmp_path,
        {
            "readings.csv": "node_id,sensor_name,ts,value\n"
            "1,total_power,2022-02-01T00:00:00+00:00,450.5\n"
        },
    )
    ds = load_dataset(tmp_path)
    assert ds.readings[0].ts == 1_643_673_600


def test_job_end_before_start_rejected(tmp_path):
    write_minimal(
        tmp_path,
        {
            "users.csv": "user_id,system_id,user_name\n1,1,alice\n",
            "jobs.csv": "job_id,user_id,group_id,job_name,exit_code,start_ts,end_ts,node_ids\n"
            "1,1,100,j,0,2000,1000,1\n",
        },
    )
    with pytest.raises(DatasetError, match="ends before"):
        load_dataset(tmp_path)


# -- slicing -------------------------------------------------------------------


def test_full_range_slice_is_identity(desk_dataset):
    lo = min(r.ts for r in desk_dataset.readings)
    hi = max(max(r.ts for r in desk_dataset.readings), max(j.end for j in desk_dataset.jobs)) + 1
    sliced = slice_by_time(desk_dataset, lo, hi)
    assert sliced == desk_dataset


def test_empty_range_slice_has_no_readings(desk_dataset):
    t = desk_dataset.readings[0].ts
    sliced = slice_by_time(desk_dataset, t, t)
    assert sliced.readings == []
    assert sliced.jobs == []
    assert sliced.compute_nodes == desk_dataset.compute_nodes


def test_one_hour_slice_of_twenty_second_cadence_has_180_readings():
    ds = generate(
        FixtureParams(seed=1, sensors_per_node=1, sampling_interval=20, duration=86_400)
    )
    t0 = ds.readings[0].ts
    sliced = slice_by_time(ds, t0, t0 + 3600)
    assert len(sliced.readings) == 180
    brute = sum(1 for r in ds.readings if t0 <= r.ts < t0 + 3600)
    assert len(sliced.readings) == brute


def test_slice_rejects_inverted_range(desk_dataset):
    with pytest.raises(DatasetError):
        slice_by_time(desk_dataset, 10, 5)


def test_slice_keeps_overlapping_jobs_only(desk_dataset):
    jobs = desk_dataset.jobs
    target = jobs[0]
    sliced = slice_by_time(desk_dataset, target.start, target.start + 1)
    assert all(j.start <= target.start <= j.end for j in sliced.jobs)
    assert target in sliced.jobs
    kept = {j.id for j in sliced.jobs}
    assert all(m.job_id in kept for m in sliced.job_metrics)


def test_write_then_load_round_trip(tmp_path, desk_dataset):
    write_fixture(desk_dataset, tmp_path)
    assert load_dataset(tmp_path) == desk_dataset
