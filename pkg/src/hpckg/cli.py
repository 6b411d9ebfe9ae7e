"""Command-line frontend.

Subcommands map one-to-one onto library operations: fixture generation,
graph building, storage stats, ad-hoc queries, the competency suite, the
three-layout comparison report (text, CSV, and a rendered figure), dry-run
triple pricing, ontology emission, and schema validation.

Exit codes: 0 success, 1 usage error, 2 data or validation error.
"""

from __future__ import annotations

import argparse
import os
import sys
import tempfile
from pathlib import Path
from typing import Optional

from hpckg.builder import BuildOptions, SchemaMode, TimestampEncoding, build_graph
from hpckg.errors import HpckgError
from hpckg.fixtures import FixtureParams, generate, write_fixture
from hpckg.ingest import load_dataset
from hpckg.ontology import (
    builtin_schema,
    count_axioms,
    emit_ontology,
    legacy_schema,
    validate_graph,
)
from hpckg.rdf_core import Term, TripleStore
from hpckg.rdf_io import read_ntriples_file, serialize_ntriples
from hpckg.sparql import evaluate, parse_query
from hpckg.vocab import HPC

USAGE_ERROR = 1
DATA_ERROR = 2

_MODES = {mode.value: mode for mode in SchemaMode}


class _Parser(argparse.ArgumentParser):
    """argparse that exits 1 on usage errors instead of 2."""

    def error(self, message):
        self.print_usage(sys.stderr)
        print(f"{self.prog}: error: {message}", file=sys.stderr)
        raise SystemExit(USAGE_ERROR)


def _atomic_write_bytes(path: Path, data: bytes):
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=path.name + ".")
    try:
        with os.fdopen(fd, "wb") as fh:
            fh.write(data)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="hpckg", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("gen-fixture", help="generate a synthetic telemetry fixture")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--dcs", type=int, default=1, help="data centers")
    p.add_argument("--systems", type=int, default=1, help="systems per data center")
    p.add_argument("--racks", type=int, default=1, help="racks per system")
    p.add_argument("--nodes", type=int, default=1, help="nodes per rack")
    p.add_argument("--sensors", type=int, default=1, help="sensors per node")
    p.add_argument("--interval", type=int, default=20, help="sampling interval, seconds")
    p.add_argument("--days", type=int, default=1)
    p.add_argument("--users", type=int, default=0, help="users per system")
    p.add_argument("--jobs", type=int, default=0, help="jobs per system")
    p.add_argument("--metrics", type=int, default=0, help="metrics per job")
    p.add_argument("--job-centric", action="store_true")
    p.add_argument("--max-readings", type=int, default=5_000_000)
    p.add_argument("--out", required=True, type=Path)

    p = sub.add_parser("build", help="build a graph from a fixture and write N-Triples")
    p.add_argument("--mode", choices=sorted(_MODES), required=True)
    p.add_argument("--dedup-time", action="store_true", help="share time nodes per tick")
    p.add_argument("--encoding", choices=["unix", "iso8601"], default=None)
    p.add_argument("--fixture", required=True, type=Path)
    p.add_argument("--out", required=True, type=Path)

    p = sub.add_parser("stats", help="triple/node/size statistics of a graph file")
    p.add_argument("--graph", required=True, type=Path)

    p = sub.add_parser("query", help="run a query file against a graph file")
    p.add_argument("--graph", required=True, type=Path)
    p.add_argument("--query", required=True, type=Path)
    p.add_argument("--csv", type=Path, default=None, help="write CSV here instead of text")

    p = sub.add_parser("suite", help="run the 36-question competency suite")
    p.add_argument("--fixture", required=True, type=Path)
    p.add_argument("--queries", type=Path, default=None, help="directory of .rq files")
    p.add_argument("--manifest", type=Path, default=None)
    p.add_argument("--mode", choices=["unified", "unified-bnode"], default="unified")
    p.add_argument("--csv", type=Path, default=None)

    p = sub.add_parser("compare", help="compare storage across all three layouts")
    p.add_argument("--fixture", required=True, type=Path)
    p.add_argument("--dedup-time", action="store_true")
    p.add_argument("--baseline-bytes", type=int, default=None)
    p.add_argument("--out-dir", type=Path, default=None,
                   help="write compare.txt, compare.csv and compare.png here")

    p = sub.add_parser("dry-run", help="closed-form triple counts for a shape")
    p.add_argument("--nodes", type=int, required=True, help="nodes per rack (one rack)")
    p.add_argument("--sensors", type=int, required=True)
    p.add_argument("--interval", type=int, required=True)
    p.add_argument("--days", type=int, required=True)
    p.add_argument("--mode", choices=sorted(_MODES), required=True)
    p.add_argument("--dedup-time", action="store_true")

    p = sub.add_parser("emit-ontology", help="write the schema document")
    p.add_argument("--format", choices=["ttl", "nt"], default="ttl")
    p.add_argument("--out", type=Path, default=None)

    p = sub.add_parser("validate", help="check a graph against the schema")
    p.add_argument("--graph", required=True, type=Path)
    p.add_argument("--schema", choices=["auto", "unified", "legacy"], default="auto")

    return parser


# ---------------------------------------------------------------------------
# Subcommand bodies


def _cmd_gen_fixture(args) -> int:
    params = FixtureParams(
        seed=args.seed,
        data_centers=args.dcs,
        systems_per_dc=args.systems,
        racks_per_system=args.racks,
        nodes_per_rack=args.nodes,
        sensors_per_node=args.sensors,
        sampling_interval=args.interval,
        duration=args.days * 86_400,
        users_per_system=args.users,
        jobs_per_system=args.jobs,
        metrics_per_job=args.metrics,
        job_centric=args.job_centric,
    )
    ds = generate(params, max_readings=args.max_readings)
    write_fixture(ds, args.out)
    from hpckg.analytics.suite import default_manifest, write_manifest

    write_manifest(default_manifest(ds), args.out / "manifest.txt")
    print(f"wrote fixture with {len(ds.readings)} readings to {args.out}")
    return 0


def _build_options(args) -> BuildOptions:
    encoding = None
    if args.encoding == "unix":
        encoding = TimestampEncoding.UNIX_SECONDS
    elif args.encoding == "iso8601":
        encoding = TimestampEncoding.ISO_8601
    return BuildOptions(
        mode=_MODES[args.mode],
        dedup_time_nodes=args.dedup_time,
        timestamp_encoding=encoding,
    )


def _cmd_build(args) -> int:
    ds = load_dataset(args.fixture)
    store = build_graph(ds, _build_options(args))
    data = serialize_ntriples(store)
    _atomic_write_bytes(args.out, data)
    stats = store.stats()
    print(
        f"{args.mode}: {stats.triple_count} triples, {stats.node_count} nodes, "
        f"{len(data)} bytes -> {args.out}"
    )
    return 0


def _cmd_stats(args) -> int:
    store = read_ntriples_file(args.graph)
    stats = store.stats()
    size = args.graph.stat().st_size
    print(f"triples:   {stats.triple_count}")
    print(f"nodes:     {stats.node_count}")
    print(f"dict size: {stats.dict_size}")
    print(f"bytes:     {size} ({size / (1024 * 1024):.2f} MiB)")
    return 0


def _cmd_query(args) -> int:
    store = read_ntriples_file(args.graph)
    query = parse_query(args.query.read_text(encoding="utf-8"))
    table = evaluate(query, store)
    if args.csv:
        import io

        buf = io.StringIO()
        table.to_csv(buf)
        _atomic_write_bytes(args.csv, buf.getvalue().encode("utf-8"))
        print(f"{len(table.rows)} rows -> {args.csv}")
    else:
        sys.stdout.write(table.to_text())
    return 0


def _cmd_suite(args) -> int:
    from hpckg.analytics.suite import load_manifest, run_suite

    ds = load_dataset(args.fixture)
    store = build_graph(ds, BuildOptions(_MODES[args.mode]))
    manifest = None
    if args.manifest is not None:
        manifest = load_manifest(args.manifest)
    elif (args.fixture / "manifest.txt").is_file():
        manifest = load_manifest(args.fixture / "manifest.txt")
    result = run_suite(store, ds, query_dir=args.queries, manifest=manifest)
    sys.stdout.write(result.to_text())
    if args.csv:
        import io

        buf = io.StringIO()
        result.to_csv(buf)
        _atomic_write_bytes(args.csv, buf.getvalue().encode("utf-8"))
    return 0 if result.all_matched else DATA_ERROR


def _cmd_compare(args) -> int:
    from hpckg.analytics.stats import (
        compare_modes,
        format_compare_table,
        render_compare_figure,
        write_compare_csv,
    )

    ds = load_dataset(args.fixture)
    baseline = args.baseline_bytes
    if baseline is None:
        readings_csv = args.fixture / "readings.csv"
        if readings_csv.is_file():
            baseline = readings_csv.stat().st_size
    report = compare_modes(ds, dedup_time_nodes=args.dedup_time, baseline_bytes=baseline)
    text = format_compare_table(report)
    sys.stdout.write(text)
    if args.out_dir:
        args.out_dir.mkdir(parents=True, exist_ok=True)
        _atomic_write_bytes(args.out_dir / "compare.txt", text.encode("utf-8"))
        write_compare_csv(report, args.out_dir / "compare.csv")
        tmp_png = args.out_dir / ".compare.tmp.png"
        render_compare_figure(report, tmp_png)
        os.replace(tmp_png, args.out_dir / "compare.png")
        print(f"report files in {args.out_dir}")
    return 0


def _cmd_dry_run(args) -> int:
    from hpckg.analytics.stats import dry_run_counts

    shape = FixtureParams(
        nodes_per_rack=args.nodes,
        sensors_per_node=args.sensors,
        sampling_interval=args.interval,
        duration=args.days * 86_400,
    )
    counts = dry_run_counts(shape, _MODES[args.mode], dedup_time_nodes=args.dedup_time)
    print(f"mode:            {args.mode}")
    print(f"readings:        {counts.readings}")
    print(f"reading triples: {counts.reading_triples}")
    print(f"static triples:  {counts.static_triples}")
    print(f"total triples:   {counts.total}")
    return 0


def _cmd_emit_ontology(args) -> int:
    fmt = "turtle" if args.format == "ttl" else "ntriples"
    data = emit_ontology(builtin_schema(), fmt)
    if args.out:
        _atomic_write_bytes(args.out, data)
        print(f"wrote {len(data)} bytes to {args.out}")
    else:
        sys.stdout.write(data.decode("utf-8"))
    from hpckg.ontology import ontology_store

    counts = count_axioms(ontology_store(builtin_schema()))
    print(
        f"axioms: {counts.declarations} declarations + {counts.logical} logical "
        f"= {counts.total}",
        file=sys.stderr,
    )
    return 0


def _graph_uses_legacy_layout(store: TripleStore) -> bool:
    for name in ("partOfRecord", "unit"):
        tid = store.term_id(Term.iri(HPC + name))
        if tid is not None and next(store.match_ids(None, tid, None), None):
            return True
    return False


def _cmd_validate(args) -> int:
    store = read_ntriples_file(args.graph)
    if args.schema == "legacy":
        schema = legacy_schema()
    elif args.schema == "unified":
        schema = builtin_schema()
    else:
        schema = legacy_schema() if _graph_uses_legacy_layout(store) else builtin_schema()
    violations = validate_graph(schema, store)
    if not violations:
        print("no violations")
        return 0
    for v in violations:
        print(str(v), file=sys.stderr)
    print(f"{len(violations)} violations", file=sys.stderr)
    return DATA_ERROR


_COMMANDS = {
    "gen-fixture": _cmd_gen_fixture,
    "build": _cmd_build,
    "stats": _cmd_stats,
    "query": _cmd_query,
    "suite": _cmd_suite,
    "compare": _cmd_compare,
    "dry-run": _cmd_dry_run,
    "emit-ontology": _cmd_emit_ontology,
    "validate": _cmd_validate,
}


def main(argv: Optional[list[str]] = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return exc.code if isinstance(exc.code, int) else USAGE_ERROR
    try:
        return _COMMANDS[args.command](args)
    except HpckgError as exc:
        print(f"hpckg: error: {exc}", file=sys.stderr)
        return DATA_ERROR
    except FileNotFoundError as exc:
        print(f"hpckg: error: {exc}", file=sys.stderr)
        return DATA_ERROR


if __name__ == "__main__":
    sys.exit(main())
