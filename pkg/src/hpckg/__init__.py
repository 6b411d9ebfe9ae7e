"""Knowledge-graph toolkit for HPC operational telemetry.

Builds RDF graphs from tabular telemetry under three schema layouts,
accounts for their storage footprint, and answers operational questions
through a small SPARQL-subset engine.
"""

__version__ = "0.1.0"

from hpckg.errors import HpckgError

__all__ = ["HpckgError", "__version__"]
