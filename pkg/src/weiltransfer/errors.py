"""Exception types shared across the package."""


class WeilTransferError(Exception):
    """Base class for all package-specific errors."""


class DimensionMismatch(WeilTransferError):
    pass


class NotSelfDual(WeilTransferError):
    """The Gram matrix is not unimodular at p."""


class BadPrime(WeilTransferError):
    """p is not an odd prime (only odd residue characteristic is supported)."""


class NonStabilizing(WeilTransferError):
    """A residue-level computation failed to certify below the level cap."""

    def __init__(self, message, level=None):
        super().__init__(message)
        self.level = level


class SingularFiber(WeilTransferError):
    """A fiber integral was requested at a singular parameter value."""


class MetaplecticAmbiguity(WeilTransferError):
    """Group-element action on an odd-dimensional space without a factored
    presentation is only defined up to sign."""


class NormalizationFailure(WeilTransferError):
    """A Gauss-sum modulus was not a power of p, so no unit normalization exists."""


class NeedsRefinement(WeilTransferError):
    """A cell-versus-fiber verdict stayed undetermined at the level cap."""


class CosetEnumerationFailure(WeilTransferError):
    """Hecke coset representatives failed certification."""


class PoleAtS(WeilTransferError):
    """An Euler factor was evaluated at a pole."""


class ConfigError(WeilTransferError):
    """A job configuration file is malformed or inconsistent."""
