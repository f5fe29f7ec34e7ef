"""Exception hierarchy shared by every module."""


class EfxError(Exception):
    """Base class for all errors raised by efxalloc."""


class MalformedInputError(EfxError, ValueError):
    """Input does not describe a valid bundle, valuation, profile or allocation."""


class CapacityError(EfxError):
    """The requested operation would exceed an enumeration cap or budget."""


class PreconditionError(EfxError):
    """An allocator or classifier was called outside its preconditions."""


class InfeasibleError(EfxError, ValueError):
    """A constrained choice has no feasible candidate (e.g. size > pool)."""


class ProofMismatchError(EfxError, AssertionError):
    """A runtime check derived from a constructive proof step failed.

    ``step`` names the violated step so a failure can be traced back to the
    argument it contradicts.
    """

    def __init__(self, step: str, detail: str = ""):
        self.step = step
        self.detail = detail
        msg = f"proof mismatch at {step}"
        if detail:
            msg += f": {detail}"
        super().__init__(msg)
