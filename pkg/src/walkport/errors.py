"""Exception types shared across the package."""


class WalkportError(Exception):
    """Base class for all walkport errors."""


class InvalidLabel(WalkportError):
    """A basis label does not fit its register layout."""


class EmptyState(WalkportError):
    """A state was requested from an empty term list."""


class LayoutMismatch(WalkportError):
    """Two states with different register layouts were combined."""


class WrongRegisterKind(WalkportError):
    """An operation targeted a register of the wrong kind."""


class NotUnitary(WalkportError):
    """A gate matrix failed the unitarity check."""


class OutOfBounds(WalkportError):
    """A shift would move a lattice walker past the configured bound."""


class UnknownRegister(WalkportError):
    """A register name is not present in the layout."""


class ShapeMismatch(WalkportError):
    """A payload vector has the wrong length for the protocol."""


class NotNormalized(WalkportError):
    """A payload vector is not unit norm."""


class MalformedProjector(WalkportError):
    """A projector family violates normalization or orthogonality."""


class MissingCorrection(WalkportError):
    """A measurement outcome has no row in the correction table."""


class NoPauliCorrection(WalkportError):
    """No Pauli string restores the target state for a branch."""


class MappingIncomplete(WalkportError):
    """A cross-protocol basis mapping does not cover both plans."""


class DimensionOverflow(WalkportError):
    """A dense object would exceed the configured dimension cap."""
