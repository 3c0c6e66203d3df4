"""Exception types shared across the package."""


class NewickError(ValueError):
    """Malformed Newick text. ``position`` is a 0-based index into the input."""

    def __init__(self, message: str, position: int | None = None):
        if position is not None:
            message = f"{message} (at position {position})"
        super().__init__(message)
        self.position = position


class TreeError(ValueError):
    """A structure that is not a valid binary phylogenetic tree."""


class CoverError(ValueError):
    """A malformed cord set, or one over the wrong taxon set."""


class NotTripletCoverError(CoverError):
    """An operation that requires a triplet cover was given a non-cover."""


class SectionError(ValueError):
    """A triple family that is not a section where one is required."""


class CapacityError(RuntimeError):
    """Input exceeds a documented desk-scale ceiling of the analysis."""


class NotRealizableError(RuntimeError):
    """The given distances are not realizable by any tree over the given cover.

    ``stage`` names the step that failed ("pendant", "cherry", "reduce",
    "base", "replay" or "verify"); ``detail`` carries the failing evidence.
    """

    def __init__(self, stage: str, detail: str):
        super().__init__(f"{stage}: {detail}")
        self.stage = stage
        self.detail = detail


class WitnessError(ValueError):
    """A shelling witness that fails independent verification."""
