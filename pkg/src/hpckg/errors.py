"""Exception hierarchy shared across the toolkit.

Everything raised on purpose derives from :class:`HpckgError` so the CLI
can map tool failures to a single exit code while programming errors
still surface as ordinary tracebacks.
"""


class HpckgError(Exception):
    """Base class for all toolkit errors."""


class TermError(HpckgError, ValueError):
    """Malformed RDF term (bad IRI, invalid literal, bad blank label)."""


class TripleError(HpckgError, ValueError):
    """Structurally invalid triple (literal subject, non-IRI predicate)."""


class SealedStoreError(HpckgError):
    """Mutation attempted on a sealed triple store."""


class DatasetError(HpckgError):
    """Telemetry input rejected: missing file, bad row, dangling key."""


class BuildError(HpckgError):
    """Graph emission failed (unknown sensor, inconsistent options)."""


class NTriplesSyntaxError(HpckgError):
    """N-Triples input rejected; carries the offending line number."""

    def __init__(self, message: str, line: int):
        super().__init__(f"line {line}: {message}")
        self.line = line


class QuerySyntaxError(HpckgError):
    """Query text rejected; message includes line/column."""


class UnsupportedFeatureError(QuerySyntaxError):
    """Query uses a SPARQL feature outside the supported subset."""


class ManifestError(HpckgError):
    """Suite manifest missing or malformed."""
