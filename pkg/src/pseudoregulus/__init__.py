"""Linear sets of pseudoregulus type over finite fields.

Field arithmetic, projective geometry, pseudoregulus construction and detection,
projections of subgeometries, the Segre variety of E = End(F_{q^n}) and
recognition of Generalized Twisted Field and Knuth spread sets.
"""

from .field_tower import FieldElement, FieldError, FrobeniusAut, GaloisField, gf_create, parse_field_spec
from .proj_geometry import (
    BudgetExceeded,
    FqLinearSet,
    GeometryError,
    ProjPoint,
    ProjSpace,
    ProjSubspace,
    SemilinearMap,
    apply_semilinear,
    weight,
)
from .pseudoregulus import (
    LinePRSpec,
    Pseudoregulus,
    PseudoregulusSpec,
    build_equivalence,
    build_line_pr,
    build_pr_linear_set,
    detect_line_pr,
    detect_pseudoregulus,
    pseudoregulus_of_spec,
    recover_sigma,
)
from .report import CheckRecord, Report, emit_report, parse_report
from .segre import EndSpace, HElement, QPoly, build_segre
from .semifield import (
    GTFParams,
    KnuthParams,
    SpreadSetSemifield,
    gtf_spread_set,
    knuth_spread_set,
    recognize_gtf,
    recognize_knuth,
)
from .subgeometry import canonical_subgeometry, construct_by_projection, default_director, recover_spread
from .suites import SUITES, ScenarioConfig, run_suite

__version__ = "0.1.0"

__all__ = [
    "FieldElement",
    "FieldError",
    "FrobeniusAut",
    "GaloisField",
    "gf_create",
    "parse_field_spec",
    "BudgetExceeded",
    "FqLinearSet",
    "GeometryError",
    "ProjPoint",
    "ProjSpace",
    "ProjSubspace",
    "SemilinearMap",
    "apply_semilinear",
    "weight",
    "LinePRSpec",
    "Pseudoregulus",
    "PseudoregulusSpec",
    "build_equivalence",
    "build_line_pr",
    "build_pr_linear_set",
    "detect_line_pr",
    "detect_pseudoregulus",
    "pseudoregulus_of_spec",
    "recover_sigma",
    "CheckRecord",
    "Report",
    "emit_report",
    "parse_report",
    "EndSpace",
    "HElement",
    "QPoly",
    "build_segre",
    "GTFParams",
    "KnuthParams",
    "SpreadSetSemifield",
    "gtf_spread_set",
    "knuth_spread_set",
    "recognize_gtf",
    "recognize_knuth",
    "canonical_subgeometry",
    "construct_by_projection",
    "default_director",
    "recover_spread",
    "SUITES",
    "ScenarioConfig",
    "run_suite",
]
