# """Report models emitted by the library and the command line."""
from datetime import datetime
from enum import Enum
from typing import Any, Dict, List, Optional

from pydantic import BaseModel, Field, PrivateAttr


class SingularityType(str, Enum):
    A_K = "A_k"
    ORDINARY_MULTIPLE = "ordinary_multiple"
    OTHER = "other"


class LocusDimension(str, Enum):
    EMPTY = "empty"
    ZERO_DIMENSIONAL = "zero_dimensional"
    POSITIVE_DIMENSIONAL = "positive_dimensional"


class Provenance(str, Enum):
    LEFSCHETZ = "lefschetz"
    GRIFFITHS = "griffiths"
    DEFECT_ADJUSTED = "defect_adjusted"
    ZERO_BY_DIMENSION = "zero_by_dimension"
    BLOWUP = "blowup"
    NOT_COMPUTED = "not_computed"


class DefectMethod(str, Enum):
    NODAL_EVALUATION = "nodal_evaluation"
    CONE_FORMULA = "cone_formula"
    CERTIFIED_ZERO = "certified_zero"
    INCONCLUSIVE = "inconclusive"


class CertificateKind(str, Enum):
    NO_DEFECT_TJURINA = "NoDefect-Tjurina"
    NO_DEFECT_WEIGHTED_HOMOGENEOUS = "NoDefect-WeightedHomogeneous"
    NO_DEFECT_RESOLUTION = "NoDefect-Resolution"
    NO_DEFECT_ODD_AK = "NoDefect-OddAk"
    NO_DEFECT_NODAL = "NoDefect-Nodal"
    FACTORIAL_NODAL = "Factorial-Nodal"
    INCONCLUSIVE = "Inconclusive"


class TargetQuotient(str, Enum):
    TJURINA = "tjurina"  # R/((f)+J(f))
    JACOBIAN_CUBED = "jacobian_cubed"  # R/((f)+J(f)^3)


class CensusRoute(str, Enum):
    CLOSED_FORM = "closed_form"
    BRUTE_FORCE = "brute_force"


class SamplingMode(str, Enum):
    EXHAUSTIVE = "exhaustive"
    SAMPLE = "sample"


class ZetaConvention(str, Enum):
    STANDARD = "standard"  # prod_{i=0}^{n} (1 - q^{i-s})
    TRUNCATED = "truncated"  # prod_{i=1}^{n} (1 - q^{i-s})


class RunManifest(BaseModel):
    subcommand: str
    parameters: Dict[str, Any]
    seed: Optional[int] = None
    tool_version: str
    wall_time: float
    input_digests: Dict[str, str] = Field(default_factory=dict)


class Report(BaseModel):
    """Base of every top-level report; the CLI fills in the manifest."""

    manifest: Optional[RunManifest] = None


class ErrorReport(BaseModel):
    error: str
    detail: str
    context: Dict[str, Any] = Field(default_factory=dict)
    timestamp: datetime


class InequalityCheck(BaseModel):
    name: str
    lhs: str
    relation: str
    rhs: str
    holds: bool


# Groebner
class GroebnerReport(Report):
    field: str
    order: str
    nvars: int
    basis: List[str]
    finite: bool
    dimension: Optional[int] = None
    by_degree: Dict[int, int] = Field(default_factory=dict)
    steps: int


# Singularities
class ChartRecord(BaseModel):
    index: int
    hyperplane: List[str]
    coordinate_change: bool
    attempts: int


class SingularPointReport(BaseModel):
    coordinates: List[str]
    residue_degree: int = 1
    conjugates: List[List[str]] = Field(default_factory=list)
    multiplicity: int
    type: SingularityType
    k: Optional[int] = None
    tjurina: int
    weighted_homogeneous: bool
    quadratic_rank: Optional[int] = None

    # chart coordinates and field of the representative, for downstream exact work
    _affine: Any = PrivateAttr(default=None)
    _point_field: Any = PrivateAttr(default=None)
    _projective: Any = PrivateAttr(default=None)

    @property
    def tag(self) -> str:
        if self.type == SingularityType.A_K:
            return f"A_{self.k}"
        if self.type == SingularityType.ORDINARY_MULTIPLE:
            return f"OMP({self.multiplicity})"
        return "Other"


class SingularLocusReport(Report):
    field: str
    n: int
    degree: int
    dimension: LocusDimension
    points: List[SingularPointReport] = Field(default_factory=list)
    tau: Optional[int] = None
    chart: Optional[ChartRecord] = None
    unresolved_degree: int = 0

    @property
    def geometric_count(self) -> int:
        return sum(p.residue_degree for p in self.points)


class TjurinaReport(Report):
    field: str
    tau: Optional[int]
    chart: Optional[int]
    chart_record: Optional[ChartRecord] = None
    dimension: LocusDimension
    power: int = 1
    by_degree: Dict[int, int] = Field(default_factory=dict)


# Defect
class BettiEntry(BaseModel):
    degree: int
    value: Optional[int]
    provenance: Provenance


class BettiTable(Report):
    n: int
    entries: List[BettiEntry]
    primitive_graded: Optional[List[int]] = None
    note: Optional[str] = None

    def h(self, i: int) -> Optional[int]:
        return self.entries[i].value


class RestrictionMapReport(BaseModel):
    k: int
    source_degree: int
    target: TargetQuotient
    source_dim: int
    target_dim: int
    rank: int
    coker: int


class ResolutionScore(Report):
    blowups: int
    score: int
    degree: int
    below_degree: bool


class Certificate(Report):
    kind: CertificateKind
    field: str
    characteristic: int
    n: int
    degree: int
    tau: Optional[int] = None
    singularities: List[str] = Field(default_factory=list)
    hypotheses: List[str] = Field(default_factory=list)
    decisive: Optional[InequalityCheck] = None
    checks: List[InequalityCheck] = Field(default_factory=list)
    defect: Optional[int] = None

    @property
    def is_conclusive(self) -> bool:
        return self.kind != CertificateKind.INCONCLUSIVE


class DefectWitness(BaseModel):
    evaluation_degree: Optional[int] = None
    evaluation_rows: Optional[int] = None
    evaluation_columns: Optional[int] = None
    evaluation_rank: Optional[int] = None
    base_betti: Optional[int] = None
    ambient_betti: Optional[int] = None
    certificate: Optional[CertificateKind] = None
    obstruction_profile: List[RestrictionMapReport] = Field(default_factory=list)


class DefectReport(Report):
    field: str
    n: int
    degree: int
    defect: Optional[int]
    method: DefectMethod
    witness: DefectWitness = Field(default_factory=DefectWitness)
    betti: Optional[BettiTable] = None


class ObstructionProfile(Report):
    field: str
    n: int
    degree: int
    tau: int
    maps: List[RestrictionMapReport]
    surjective: bool


# Census
class QuadCensus(Report):
    n: int
    q: int
    count: int
    route: CensusRoute
    histogram: Dict[int, int] = Field(default_factory=dict)
    lower_bound: str
    upper_bound: str
    within_bounds: bool
    printed_formula: Optional[str] = None


class JetCensus(Report):
    n: int
    r: int
    counts: Dict[str, int]
    total: int
    probability: str
    probability_value: float
    closed_form: str
    matches_closed_form: bool
    lower_bound: str
    upper_bound: str
    sandwich_holds: bool


class Estimate(BaseModel):
    count: int
    fraction: str
    value: float
    ci_low: float
    ci_high: float


class ZetaReference(BaseModel):
    label: str
    convention: ZetaConvention
    s: int
    exact: str
    value: float


class DensityReport(Report):
    n: int
    q: int
    d: int
    mode: SamplingMode
    samples: Optional[int] = None
    seed: Optional[int] = None
    total: int
    smooth: Estimate
    mild: Estimate
    certified_by_resolution: Estimate
    certified_no_defect: Estimate
    inconclusive: Estimate
    unclassified: int = 0
    references: List[ZetaReference]
    checks: List[InequalityCheck] = Field(default_factory=list)
    caveat: str


class OmpProbability(Report):
    n: int
    r: int
    max_m: int
    smooth_forms: Dict[int, int]
    probability: str
    probability_value: float


REPORT_MODELS = [
    GroebnerReport,
    SingularLocusReport,
    TjurinaReport,
    BettiTable,
    ResolutionScore,
    Certificate,
    DefectReport,
    ObstructionProfile,
    QuadCensus,
    JetCensus,
    DensityReport,
    OmpProbability,
]


def build_schema() -> Dict[str, Any]:
    """JSON schema covering every report the command line can emit."""
    from pydantic.json_schema import models_json_schema

    _, top = models_json_schema(
        [(model, "serialization") for model in REPORT_MODELS + [ErrorReport]],
        ref_template="#/$defs/{model}",
    )
    return {
        "$schema": "https://json-schema.org/draft/2020-12/schema",
        "title": "defekt report",
        "anyOf": [{"$ref": f"#/$defs/{model.__name__}"} for model in REPORT_MODELS],
        "$defs": top.get("$defs", {}),
    }
