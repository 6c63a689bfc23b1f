"""Recognition of A_k singularities of wave fronts and Morin maps, and
zig-zag numbers of loops on fronts."""

from .classify import (
    ClassificationReport,
    SingularityClass,
    classify,
    classify_lambda_route,
    classify_mu_route,
    conjugate_front,
    scan_singular_set,
    singular_tangent_frame,
)
from .definitions import (
    FrontInstance,
    LoopSpec,
    MorinMapInstance,
    format_definition,
    parse_definition,
    parse_front,
    parse_loop,
    parse_morin,
)
from .errors import (
    AkError,
    CorankTooHigh,
    NotCoorientable,
    NumericFailure,
    OrderExhausted,
    ParseError,
)
from .estimators import FrontClassifier, MorinClassifier, ZigzagAnalyzer
from .front import extended_null_field, lambda_chain, lambda_jet
from .jet import Jet
from .morin import (
    classify_morin,
    morin_normal_form,
    project_and_classify,
    restrict_morin_to_front,
)
from .oracle import (
    ak_front_normal_form,
    phi_membership,
    tangent_developable_fixture,
    versal_membership,
)
from .zigzag import maslov_index, sign_sequence, zigzag_report

__version__ = "0.1.0"

__all__ = [
    "__version__",
    "AkError",
    "ClassificationReport",
    "CorankTooHigh",
    "FrontClassifier",
    "FrontInstance",
    "Jet",
    "LoopSpec",
    "MorinClassifier",
    "MorinMapInstance",
    "NotCoorientable",
    "NumericFailure",
    "OrderExhausted",
    "ParseError",
    "SingularityClass",
    "ZigzagAnalyzer",
    "ak_front_normal_form",
    "classify",
    "classify_lambda_route",
    "classify_morin",
    "classify_mu_route",
    "conjugate_front",
    "extended_null_field",
    "format_definition",
    "lambda_chain",
    "lambda_jet",
    "maslov_index",
    "morin_normal_form",
    "parse_definition",
    "parse_front",
    "parse_loop",
    "parse_morin",
    "phi_membership",
    "project_and_classify",
    "restrict_morin_to_front",
    "scan_singular_set",
    "sign_sequence",
    "singular_tangent_frame",
    "tangent_developable_fixture",
    "versal_membership",
    "zigzag_report",
]
