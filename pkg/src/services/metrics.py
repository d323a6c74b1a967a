# Prometheus instrumentation for the computational services
from typing import Dict

from prometheus_client import CollectorRegistry, Counter, Histogram, write_to_textfile

# Create custom registry to avoid conflicts
REGISTRY = CollectorRegistry()

GROEBNER_BASES = Counter(
    "defekt_groebner_bases_total",
    "Reduced Groebner bases computed",
    ["order"],
    registry=REGISTRY,
)

REDUCTION_STEPS = Counter(
    "defekt_reduction_steps_total",
    "Reduction steps spent inside Buchberger",
    registry=REGISTRY,
)

SINGULAR_POINTS = Counter(
    "defekt_singular_points_total",
    "Classified singular points by type",
    ["type"],
    registry=REGISTRY,
)

CENSUS_FORMS = Counter(
    "defekt_census_forms_total",
    "Forms tallied by density experiments",
    ["category"],
    registry=REGISTRY,
)

CENSUS_CHUNK_SECONDS = Histogram(
    "defekt_census_chunk_seconds",
    "Wall time of one census work unit",
    registry=REGISTRY,
)


def record_census(tallies: Dict[str, int]) -> None:
    """Update census counters with merged tallies."""
    for category, count in tallies.items():
        CENSUS_FORMS.labels(category=category).inc(count)


def write_metrics(path: str) -> None:
    write_to_textfile(path, REGISTRY)
