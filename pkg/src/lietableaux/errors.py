"""Shared exception types.

Errors that a caller can act on get their own class; plain misuse
(shape mismatches, bad literals) raises ValueError subclasses.
"""


class DimensionMismatch(ValueError):
    """Operands live in different ambient spaces."""


class InputError(ValueError):
    """Malformed external input (JSON files, rational literals, CLI args)."""


class GenericityUnstable(RuntimeError):
    """Randomized flag sampling produced an inconsistent character profile.

    Retry with a different seed or more trials; the sampled flags missed
    the generic stratum.
    """


class NotInvolutive(RuntimeError):
    """Operation requires an involutive tableau."""


class JacobiViolation(ValueError):
    """Structure constants fail the Jacobi identity."""

    def __init__(self, i: int, j: int, k: int, residual):
        self.i, self.j, self.k = i, j, k
        self.residual = residual
        super().__init__(
            f"Jacobi identity fails on basis triple ({i},{j},{k}); residual {residual}"
        )


class NotAbelian(ValueError):
    """A subspace required to be an abelian subalgebra is not."""


class NotInDecomposition(ValueError):
    """A vector or subspace does not sit where the decomposition requires."""


class NotComplementary(ValueError):
    """Two subspaces do not split the ambient space as a direct sum."""


class NotRegular(ValueError):
    """The chosen element of a fails the regularity test (ad_A: m -> b not bijective)."""


class NotCartan(RuntimeError):
    """Operation requires a tableau produced by the Cartan-pair construction."""
