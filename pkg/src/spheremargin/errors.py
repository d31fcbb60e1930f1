"""Exception types raised across the package."""


class SphereMarginError(Exception):
    """Base class for all package errors."""


class ZeroVector(SphereMarginError):
    """Vector has (near-)zero norm and cannot be normalized."""


class DimensionMismatch(SphereMarginError):
    """Operand shapes are inconsistent."""


class SplitMismatch(SphereMarginError):
    """Margin split components do not sum to the total margin."""


class DegenerateCenter(SphereMarginError):
    """Two class centers (nearly) coincide; inter-class angle unusable."""


class NonFiniteObjective(SphereMarginError):
    """Objective returned NaN or inf during differentiation."""


class LengthMismatch(SphereMarginError):
    """Vectors compared coordinate-wise have different lengths."""


class ShapeMismatch(SphereMarginError):
    """Parameter and gradient shapes disagree."""


class StepOutOfRange(SphereMarginError):
    """Step index outside the schedule's range."""


class NotToyShape(SphereMarginError):
    """Model is not a 2-D multi-class toy and cannot be summarized on the circle."""


class NonFiniteLoss(SphereMarginError):
    """Training loss became NaN or inf."""


class InsufficientSamples(SphereMarginError):
    """Not enough samples per class to build verification pairs."""


class EmptyScores(SphereMarginError):
    """A score list required by a verification metric is empty."""


class FarOutOfRange(SphereMarginError):
    """Requested false-acceptance rate is outside (0, 1]."""


class EmptyGallery(SphereMarginError):
    """Identification gallery is empty."""


class MissingLabel(SphereMarginError):
    """A probe label has no gallery entry."""


class MalformedTable(SphereMarginError):
    """Accuracy table is not rectangular or has too few rows."""


class BadGrid(SphereMarginError):
    """Grid specification is empty or inverted."""


class ConfigInvalid(SphereMarginError):
    """Run configuration failed validation."""
