"""Exception hierarchy shared by all modules."""


class FdegenError(Exception):
    """Base class for every error raised by this package."""


class GraphError(FdegenError):
    """Malformed graph or embedding input."""


class NonPlanarRotation(GraphError):
    """Face tracing of a rotation system violates Euler's formula."""


class OuterNotCycle(GraphError):
    """The designated outer face is not bounded by a simple cycle."""


class InnerFaceNotTriangle(GraphError):
    def __init__(self, face_id: int, length: int):
        super().__init__(f"inner face {face_id} has length {length}, expected 3")
        self.face_id = face_id
        self.length = length


class ChordPresent(GraphError):
    """An operation requiring a chordless outer cycle met a chord."""


class CoverError(FdegenError):
    """Malformed cover, matching or value function."""


class InvalidInstance(FdegenError):
    """An instance breaks the hypotheses of the extension being applied."""


class InternalFailure(FdegenError):
    """A construction that is guaranteed to succeed did not.

    Raised only on a defect in this package; stress runs treat it as a bug trap.
    """


class NotRemovingOrder(FdegenError):
    pass


class SeamMismatch(FdegenError):
    pass


class SeedNotInTree(FdegenError):
    pass


class DegreeTooHigh(FdegenError):
    pass


class NotSpanning(FdegenError):
    pass


class BudgetExceeded(FdegenError):
    pass


class ProfileInfeasible(FdegenError):
    pass
