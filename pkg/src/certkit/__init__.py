"""certkit: certification-evidence toolkit for vision-based detection systems.

Content-addressed dataset version control, model provenance manifests,
operational-domain coverage verification, a detection-evaluation engine
with per-partition sensitivity analysis, sequence stability analysis, and
deterministic report bundles.
"""

__version__ = "0.1.0"

from .datasets import (
    AnnotationRecord,
    BoundingBox,
    DatasetDiff,
    DatasetEntry,
    DatasetManifest,
    DisjointnessReport,
    ImageMeta,
    OwnshipPose,
    Repository,
)
from .domain import (
    CoverageReport,
    DomainDimension,
    OperationalDomainSpec,
    coverage,
    load_domain_spec,
)
from .errors import (
    CertkitError,
    FormatError,
    IntegrityError,
    NotFoundError,
    ValidationError,
)
from .evaluation import (
    Detection,
    EvaluationReport,
    MatchResult,
    PRCurve,
    PredictionSet,
    RequirementSpec,
    average_precision,
    evaluate,
    iou,
    load_predictions,
    load_requirement_spec,
    match_detections,
    pr_curve,
    sensitivity_by_partition,
)
from .registry import EnvironmentTrace, ModelManifest, ModelRegistry, TraceEntry
from .report import ReportBundle, generate_report
from .stability import StabilityRow, TrackTimeline, build_timelines, flicker_analysis
from .store import ContentStore, Digest, StoredObject
from .synthgen import SyntheticConfig, generate, load_synthetic_config

__all__ = [
    "__version__",
    "AnnotationRecord",
    "BoundingBox",
    "ContentStore",
    "CoverageReport",
    "CertkitError",
    "DatasetDiff",
    "DatasetEntry",
    "DatasetManifest",
    "Detection",
    "Digest",
    "DisjointnessReport",
    "DomainDimension",
    "EnvironmentTrace",
    "EvaluationReport",
    "FormatError",
    "ImageMeta",
    "IntegrityError",
    "MatchResult",
    "ModelManifest",
    "ModelRegistry",
    "NotFoundError",
    "OperationalDomainSpec",
    "OwnshipPose",
    "PRCurve",
    "PredictionSet",
    "ReportBundle",
    "Repository",
    "RequirementSpec",
    "StabilityRow",
    "StoredObject",
    "SyntheticConfig",
    "TraceEntry",
    "TrackTimeline",
    "ValidationError",
    "average_precision",
    "build_timelines",
    "coverage",
    "evaluate",
    "flicker_analysis",
    "generate",
    "generate_report",
    "iou",
    "load_domain_spec",
    "load_predictions",
    "load_requirement_spec",
    "load_synthetic_config",
    "match_detections",
    "pr_curve",
    "sensitivity_by_partition",
]
