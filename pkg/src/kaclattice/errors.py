"""Exception and warning types shared across the package."""


class KacLatticeError(Exception):
    """Base class for all errors raised by this package."""


class InvalidAlgebra(KacLatticeError):
    """Structure constants fail the *-algebra axioms beyond tolerance."""


class NonSemisimple(KacLatticeError):
    """Block decomposition failed; the algebra is (numerically) not semisimple."""


class DimensionMismatch(KacLatticeError):
    pass


class InvalidGroup(KacLatticeError):
    pass


class InvalidKacAlgebra(KacLatticeError):
    pass


class InvalidEmbedding(KacLatticeError):
    pass


class IncompatibleTrace(InvalidEmbedding):
    """Embedding does not intertwine the traces."""


class NotACoaction(KacLatticeError):
    pass


class MixedAlgebras(KacLatticeError):
    """Operands belong to different algebras or Kac algebras."""


class KindMismatch(KacLatticeError):
    """Operation got a coaction where an anticoaction was needed, or vice versa."""


class CrossCheckFailed(KacLatticeError):
    """Two independent computations of the same object disagree."""


class NotUnitary(KacLatticeError):
    pass


class NoTransposition(KacLatticeError):
    """The algebra does not support the transposition antiautomorphism."""


class TraceIncompatible(KacLatticeError):
    """Weight data inconsistent with the inclusion matrix."""


class NotAlgebraicData(KacLatticeError):
    """Combinatorial inclusion data admits no trace-compatible realization.

    ``index`` carries the floating-point Perron-Frobenius index when known.
    """

    def __init__(self, message, index=None):
        self.index = index
        super().__init__(message)


class CertificateFailed(KacLatticeError):
    """Exact rational certificate could not be produced from consistent input."""


class NotMarkov(KacLatticeError):
    """Inclusion traces are not the canonical (Markov) ones."""


class ExtensionInconsistent(KacLatticeError):
    """Anticoaction extension to the next tower level has no consistent solution."""


class NotInvariant(KacLatticeError):
    """The subalgebra is not invariant under the given (anti)coaction."""


class ErgodicityFailed(KacLatticeError):
    """Relative ergodicity Z(B) ^ B^beta = C fails, lattice cells may be wrong."""


class DocumentError(KacLatticeError):
    """Malformed or unresolvable CLI input document."""

    def __init__(self, message, location=None):
        self.location = location
        if location:
            message = f"{location}: {message}"
        super().__init__(message)


class NotIrreducibleWarning(UserWarning):
    """Inclusion graph is disconnected; Perron-Frobenius data may be ambiguous."""


class IncompleteSystemWarning(UserWarning):
    """Spectral projections do not sum to the identity within tolerance."""
