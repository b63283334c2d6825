"""Presentations, permutation groups and verification tools for rank-three
string C-groups of 2-power order."""

__version__ = "0.1.0"

from .errors import (  # noqa: E402
    CapExceededError,
    ConstraintViolation,
    CosetLimitError,
    PolyforgeError,
    ResourceLimitError,
    UnsupportedFamilyError,
)
from .families import FamilyId, build, expectation  # noqa: E402
from .fp import Presentation, Word, fp_group_order, parse_relator, todd_coxeter  # noqa: E402
from .perm import Permutation, PermGroup  # noqa: E402
from .sggi import SchlafliType, SggiTriple, check_intersection_property, make_sggi  # noqa: E402

__all__ = [
    "CapExceededError", "ConstraintViolation", "CosetLimitError", "FamilyId", "PermGroup",
    "Permutation", "PolyforgeError", "Presentation", "ResourceLimitError", "SchlafliType",
    "SggiTriple", "UnsupportedFamilyError", "Word", "build", "check_intersection_property",
    "expectation", "fp_group_order", "make_sggi", "parse_relator", "todd_coxeter",
]
