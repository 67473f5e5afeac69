"""Exact free loop space homology of highly connected manifolds from their intersection form."""

__version__ = "0.1.0"

from .errors import LoopHomError  # noqa: E402
from .forms import IntersectionForm, base_change, make_form, permute, preset, validate  # noqa: E402
from .homology import GradedModuleSummary, LoopComplex, compute, verify_complex  # noqa: E402
from .rings import GF, QQ, ZZ, CoefficientRing, parse_ring  # noqa: E402
from .tensor import UAlgebra, chi, u_slice  # noqa: E402

__all__ = [
    "CoefficientRing",
    "GF",
    "GradedModuleSummary",
    "IntersectionForm",
    "LoopComplex",
    "LoopHomError",
    "QQ",
    "UAlgebra",
    "ZZ",
    "base_change",
    "chi",
    "compute",
    "make_form",
    "parse_ring",
    "permute",
    "preset",
    "u_slice",
    "validate",
    "verify_complex",
]
