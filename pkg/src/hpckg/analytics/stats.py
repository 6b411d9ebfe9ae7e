"""Graph storage statistics and cross-layout comparison.

``compare_modes`` builds the same Dataset under all three layouts and
reports triple counts, node counts, serialized byte sizes, and the
resulting reduction percentages.  ``dry_run_counts`` prices a build
without materializing the readings, and ``project_storage`` extrapolates
a single-day byte count over longer periods.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass
from pathlib import Path
from typing import Optional, Union

from hpckg.builder import BuildOptions, SchemaMode, build_graph, triples_per_reading
from hpckg.fixtures import FixtureParams, generate
from hpckg.ingest import Dataset
from hpckg.rdf_io import serialize_ntriples

MIB = 1024 * 1024


@dataclass(frozen=True, slots=True)
class GraphStats:
    mode: SchemaMode
    triples: int
    nodes: int
    bytes: int

    @property
    def mib(self) -> float:
        return self.bytes / MIB


@dataclass(frozen=True)
class CompareReport:
    stats: dict[SchemaMode, GraphStats]
    readings: int
    reduction_unified_vs_legacy: float  # percent, byte-based
    reduction_bnode_vs_unified: float  # percent, byte-based
    reading_triple_reduction: float  # percent, template-based (6 -> 4)
    baseline_bytes: Optional[int] = None

    def ratio_vs_baseline(self, mode: SchemaMode) -> Optional[float]:
        if not self.baseline_bytes:
            return None
        return self.stats[mode].bytes / self.baseline_bytes


def reduction_percent(larger: float, smaller: float) -> float:
    """Size reduction in percent going from ``larger`` to ``smaller``."""
    if larger <= 0:
        return 0.0
    return (1.0 - smaller / larger) * 100.0


def compare_modes(
    ds: Dataset,
    dedup_time_nodes: bool = False,
    baseline_bytes: Optional[int] = None,
) -> CompareReport:
    """Build and serialize ``ds`` under every layout and compare."""
    stats: dict[SchemaMode, GraphStats] = {}
    for mode in SchemaMode:
        store = build_graph(ds, BuildOptions(mode, dedup_time_nodes=dedup_time_nodes))
        data = serialize_ntriples(store)
        s = store.stats()
        stats[mode] = GraphStats(mode, s.triple_count, s.node_count, len(data))
        del store, data
    legacy = stats[SchemaMode.LEGACY]
    unified = stats[SchemaMode.UNIFIED_URI]
    bnode = stats[SchemaMode.UNIFIED_BNODE]
    return CompareReport(
        stats=stats,
        readings=len(ds.readings),
        reduction_unified_vs_legacy=reduction_percent(legacy.bytes, unified.bytes),
        reduction_bnode_vs_unified=reduction_percent(unified.bytes, bnode.bytes),
        reading_triple_reduction=reduction_percent(
            triples_per_reading(SchemaMode.LEGACY),
            triples_per_reading(SchemaMode.UNIFIED_URI),
        ),
        baseline_bytes=baseline_bytes,
    )


@dataclass(frozen=True, slots=True)
class DryRunCounts:
    mode: SchemaMode
    readings: int
    reading_triples: int
    static_triples: int

    @property
    def total(self) -> int:
        return self.reading_triples + self.static_triples


def dry_run_counts(
    shape: FixtureParams,
    mode: SchemaMode,
    dedup_time_nodes: bool = False,
) -> DryRunCounts:
    """Closed-form triple counts for a fixture shape.

    Reading triples are pure arithmetic: six or four per reading, or,
    with time-node sharing, three per reading plus one per distinct tick.
    Static triples come from building the readings-free graph, which is
    cheap and exact.
    """
    readings = shape.projected_readings
    if dedup_time_nodes and mode is not SchemaMode.LEGACY:
        reading_triples = 3 * readings + (shape.ticks if readings else 0)
    else:
        reading_triples = triples_per_reading(mode) * readings
    static_ds = generate(shape, include_readings=False)
    static = build_graph(
        static_ds, BuildOptions(mode, dedup_time_nodes=dedup_time_nodes)
    ).stats()
    return DryRunCounts(
        mode=mode,
        readings=readings,
        reading_triples=reading_triples,
        static_triples=static.triple_count,
    )


def project_storage(day_stats: GraphStats, days: int, static_bytes: int = 0) -> int:
    """Projected bytes for ``days`` days of one day's graph.

    Reading bytes scale linearly; ``static_bytes`` counts once.
    """
    if days < 0:
        raise ValueError("days must be non-negative")
    if days == 0:
        return static_bytes
    return static_bytes + (day_stats.bytes - static_bytes) * days


# ---------------------------------------------------------------------------
# Report rendering


_MODE_LABELS = {
    SchemaMode.LEGACY: "legacy per-reading layout",
    SchemaMode.UNIFIED_URI: "unified layout (reading URIs)",
    SchemaMode.UNIFIED_BNODE: "unified layout (reading bnodes)",
}


def format_compare_table(report: CompareReport) -> str:
    """Aligned text table: version, triples, nodes, size."""
    header = ("Version", "# Triples", "# Nodes", "Size [MiB]")
    rows = [
        (
            _MODE_LABELS[mode],
            f"{st.triples:,}",
            f"{st.nodes:,}",
            f"{st.mib:.2f}",
        )
        for mode, st in report.stats.items()
    ]
    widths = [len(h) for h in header]
    for row in rows:
        for i, cell in enumerate(row):
            widths[i] = max(widths[i], len(cell))
    lines = [
        "  ".join(h.ljust(widths[i]) for i, h in enumerate(header)).rstrip(),
        "  ".join("-" * w for w in widths),
    ]
    for row in rows:
        lines.append("  ".join(cell.ljust(widths[i]) for i, cell in enumerate(row)).rstrip())
    lines.append("")
    lines.append(
        f"reading triples per reading: 6 legacy vs 4 unified "
        f"({report.reading_triple_reduction:.2f}% fewer)"
    )
    lines.append(
        f"byte reduction, unified vs legacy:  {report.reduction_unified_vs_legacy:.2f}%"
    )
    lines.append(
        f"byte reduction, bnode vs unified:   {report.reduction_bnode_vs_unified:.2f}%"
    )
    if report.baseline_bytes:
        for mode in (SchemaMode.UNIFIED_URI, SchemaMode.UNIFIED_BNODE):
            ratio = report.ratio_vs_baseline(mode)
            lines.append(f"size vs baseline, {mode.value}: {ratio:.1f}x")
    return "\n".join(lines) + "\n"


def write_compare_csv(report: CompareReport, path: Union[str, Path]) -> None:
    with Path(path).open("w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(["version", "triples", "nodes", "bytes", "mib"])
        for mode, st in report.stats.items():
            writer.writerow([mode.value, st.triples, st.nodes, st.bytes, f"{st.mib:.6f}"])
        writer.writerow([])
        writer.writerow(["metric", "value"])
        writer.writerow(
            ["reduction_unified_vs_legacy_pct", f"{report.reduction_unified_vs_legacy:.2f}"]
        )
        writer.writerow(
            ["reduction_bnode_vs_unified_pct", f"{report.reduction_bnode_vs_unified:.2f}"]
        )
        writer.writerow(
            ["reading_triple_reduction_pct", f"{report.reading_triple_reduction:.2f}"]
        )
        if report.baseline_bytes:
            writer.writerow(["baseline_bytes", report.baseline_bytes])


def render_compare_figure(report: CompareReport, path: Union[str, Path]) -> None:
    """Bar charts of triple count, node count and size per layout."""
    import matplotlib

    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    labels = [mode.value for mode in report.stats]
    triples = [st.triples for st in report.stats.values()]
    nodes = [st.nodes for st in report.stats.values()]
    sizes = [st.mib for st in report.stats.values()]

    fig, axes = plt.subplots(1, 3, figsize=(12, 4))
    for ax, values, title in zip(
        axes, (triples, nodes, sizes), ("# Triples", "# Nodes", "Size [MiB]")
    ):
        ax.bar(labels, values, color=("#888888", "#4878d0", "#6acc64"))
        ax.set_title(title)
        ax.tick_params(axis="x", rotation=20)
    fig.suptitle(f"Storage comparison over {report.readings:,} readings")
    fig.tight_layout()
    fig.savefig(path, dpi=120)
    plt.close(fig)
