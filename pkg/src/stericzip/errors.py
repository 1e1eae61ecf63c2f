"""Exception types shared across the package."""


class StericZipError(Exception):
    """Base class for all errors raised by this package."""


class PdbParseError(StericZipError):
    """A PDB line could not be parsed.  Carries the 1-based line number."""

    def __init__(self, message, line_number=None):
        if line_number is not None:
            message = f"line {line_number}: {message}"
        super().__init__(message)
        self.line_number = line_number


class PdbWriteError(StericZipError):
    """A structure cannot be emitted in fixed-column PDB format."""


class StructureError(StericZipError):
    """Violated structural invariant (duplicate keys, missing chains, ...)."""


class SelectionError(StericZipError):
    """Base class for atom-selector resolution failures."""


class AtomNotFoundError(SelectionError):
    """No atom matches the selector."""


class ResidueMismatchError(SelectionError):
    """A residue exists at the selector's (chain, number) but its name differs."""


class MutationError(StericZipError):
    """Residue mutation is impossible (missing residue or backbone atoms)."""


class SingularityError(StericZipError):
    """Two interacting atoms are (nearly) coincident."""


class ObjectiveError(StericZipError):
    """Objective evaluation failed.  Carries the offending point."""

    def __init__(self, message, point=None):
        super().__init__(message)
        self.point = point


class RefinementError(StericZipError):
    """Local refinement hit a non-finite value.  Carries the last good point."""

    def __init__(self, message, last_point=None, last_value=None):
        super().__init__(message)
        self.last_point = last_point
        self.last_value = last_value


class BuildError(StericZipError):
    """A pipeline stage failed.  Carries the stage name."""

    def __init__(self, stage, message):
        super().__init__(f"{stage}: {message}")
        self.stage = stage
