"""Exception types shared across the package."""


class BredonkitError(Exception):
    """Base class for all package errors."""


class ParseError(BredonkitError):
    """Malformed cycle notation or JSON input."""


class ExplosionError(BredonkitError):
    """Element enumeration exceeded the configured bound."""


class Unsupported(BredonkitError):
    """Operation requires element enumeration on an encoded (non-materialized) group."""


class MismatchedParent(BredonkitError):
    """Subgroups passed to an operation live in different parent groups."""


class FamilyError(BredonkitError):
    """Collection of subgroup classes is not closed under subgroups and conjugation."""


class ObjectMismatch(BredonkitError):
    """Morphisms or modules attached to incompatible objects or categories."""


class AxiomViolation(BredonkitError):
    """Tables fail a category, functoriality, or Mackey axiom check."""


class NotNormal(BredonkitError):
    """Inflation requested along a non-normal subgroup."""


class NotCohomological(BredonkitError):
    """Construction requires a cohomological Mackey functor."""


class ResourceError(BredonkitError):
    """Computation exceeded a configured size bound (e.g. resolution rank)."""


class DegreeOutOfRange(BredonkitError):
    """Requested cohomology degree not covered by the available complex."""


class IncompleteCoefficient(BredonkitError):
    """Coefficient data does not cover every isotropy class of the complex."""
