import pytest

from hpckg.cli import main


@pytest.fixture()
def fixture_dir(tmp_path):
    out = tmp_path / "fx"
    code = main(
        [
            "gen-fixture", "--seed", "7", "--dcs", "2", "--racks", "2", "--nodes", "2",
            "--sensors", "2", "--interval", "3600", "--days", "1",
            "--users", "2", "--jobs", "6", "--metrics", "6",
            "--out", str(out),
        ]
    )
    assert code == 0
    return out


def test_gen_fixture_writes_files_and_manifest(fixture_dir):
    names = {p.name for p in fixture_dir.iterdir()}
    assert "readings.csv" in names and "manifest.txt" in names


def test_build_stats_and_validate(tmp_path, fixture_dir, capsys):
    graph = tmp_path / "g.nt"
    assert main(["build", "--mode", "unified", "--fixture", str(fixture_dir),
                 "--out", str(graph)]) == 0
    capsys.readouterr()

    assert main(["stats", "--graph", str(graph)]) == 0
    out = capsys.readouterr().out
    assert "triples:" in out and "nodes:" in out

    assert main(["validate", "--graph", str(graph)]) == 0
    assert "no violations" in capsys.readouterr().out


def test_validate_autodetects_legacy_layout(tmp_path, fixture_dir, capsys):
    graph = tmp_path / "legacy.nt"
    assert main(["build", "--mode", "legacy", "--fixture", str(fixture_dir),
                 "--out", str(graph)]) == 0
    assert main(["validate", "--graph", str(graph)]) == 0


def test_validate_flags_bad_graph(tmp_path, capsys):
    bad = tmp_path / "bad.nt"
    bad.write_text(
        "<http://ontology.hpc.org/job/1> "
        "<http://www.w3.org/1999/02/22-rdf-syntax-ns#type> "
        "<http://ontology.hpc.org/Job> .\n"
        "<http://ontology.hpc.org/job/1> "
        "<http://ontology.hpc.org/hasReading> _:r .\n"
    )
    assert main(["validate", "--graph", str(bad)]) == 2
    assert "DomainViolation" in capsys.readouterr().err


def test_query_text_and_csv(tmp_path, fixture_dir, capsys):
    graph = tmp_path / "g.nt"
    main(["build", "--mode", "unified", "--fixture", str(fixture_dir), "--out", str(graph)])
    query = tmp_path / "q.rq"
    query.write_text(
        "PREFIX hpc: <http://ontology.hpc.org/>\n"
        "SELECT ?name WHERE { ?s hpc:systemName ?name } ORDER BY ?name\n"
    )
    capsys.readouterr()
    assert main(["query", "--graph", str(graph), "--query", str(query)]) == 0
    assert "system1" in capsys.readouterr().out

    out_csv = tmp_path / "rows.csv"
    assert main(["query", "--graph", str(graph), "--query", str(query),
                 "--csv", str(out_csv)]) == 0
    assert out_csv.read_text().splitlines()[0] == "name"


def test_query_cross_system_average_csv_has_expected_column(tmp_path, fixture_dir):
    graph = tmp_path / "g.nt"
    main(["build", "--mode", "unified", "--fixture", str(fixture_dir), "--out", str(graph)])
    query = tmp_path / "avg.rq"
    from hpckg.analytics.suite import packaged_query_dir

    query.write_text((packaged_query_dir() / "C6.3.rq").read_text())
    out_csv = tmp_path / "avg.csv"
    assert main(["query", "--graph", str(graph), "--query", str(query),
                 "--csv", str(out_csv)]) == 0
    header = out_csv.read_text().splitlines()[0]
    assert "avgExecutionTimeSeconds" in header.split(",")


def test_suite_command_passes_and_writes_csv(tmp_path, fixture_dir, capsys):
    out_csv = tmp_path / "suite.csv"
    code = main(["suite", "--fixture", str(fixture_dir), "--csv", str(out_csv)])
    out = capsys.readouterr().out
    assert code == 0
    assert "matched 36/36" in out
    assert out_csv.read_text().count("\n") == 37


def test_compare_command_writes_report_files(tmp_path, fixture_dir, capsys):
    out_dir = tmp_path / "report"
    assert main(["compare", "--fixture", str(fixture_dir), "--out-dir", str(out_dir)]) == 0
    out = capsys.readouterr().out
    assert "# Triples" in out
    assert (out_dir / "compare.txt").is_file()
    assert (out_dir / "compare.csv").is_file()
    assert (out_dir / "compare.png").read_bytes()[:4] == b"\x89PNG"


def test_dry_run_prints_reference_scale_numbers(capsys):
    assert main(["dry-run", "--nodes", "1", "--sensors", "104", "--interval", "20",
                 "--days", "1", "--mode", "legacy"]) == 0
    out = capsys.readouterr().out
    assert "reading triples: 2695680" in out


def test_emit_ontology_reports_axiom_count(tmp_path, capsys):
    out = tmp_path / "onto.ttl"
    assert main(["emit-ontology", "--format", "ttl", "--out", str(out)]) == 0
    err = capsys.readouterr().err
    assert "60 declarations + 104 logical = 164" in err
    assert out.read_text().startswith("@prefix hpc:")

    nt = tmp_path / "onto.nt"
    assert main(["emit-ontology", "--format", "nt", "--out", str(nt)]) == 0
    from hpckg.ontology import count_axioms
    from hpckg.rdf_io import read_ntriples_file

    assert count_axioms(read_ntriples_file(nt)).total == 164


def test_usage_errors_exit_one():
    assert main(["no-such-command"]) == 1
    assert main(["build", "--mode", "bogus", "--fixture", "x", "--out", "y"]) == 1
    assert main([]) == 1


def test_data_errors_exit_two(tmp_path):
    assert main(["stats", "--graph", str(tmp_path / "missing.nt")]) == 2
    assert main(["build", "--mode", "unified", "--fixture", str(tmp_path / "nope"),
                 "--out", str(tmp_path / "g.nt")]) == 2


def test_oversized_fixture_refused(tmp_path):
    code = main(["gen-fixture", "--nodes", "100", "--sensors", "100", "--interval", "1",
                 "--days", "1", "--out", str(tmp_path / "huge")])
    assert code == 2
