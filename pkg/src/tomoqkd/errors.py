class ValidationError(ValueError):
    """Input outside the domain an operation accepts."""


class InvalidGramError(ValidationError):
    """Gram matrix with an eigenvalue below the PSD tolerance."""

    def __init__(self, eigenvalue):
        self.eigenvalue = eigenvalue
        super().__init__(f"invalid Gram: eigenvalue {eigenvalue:.3e} is negative beyond tolerance")


class ConstructionError(RuntimeError):
    """A structured object (basis, POVM) failed its own consistency check."""


class InvariantError(RuntimeError):
    """An internal invariant did not hold."""


class NoCrossingError(ValueError):
    """Threshold search found both ends of the range on the same side."""

    def __init__(self, lo, hi, yield_lo, yield_hi):
        self.lo, self.hi = lo, hi
        self.yield_lo, self.yield_hi = yield_lo, yield_hi
        super().__init__(
            f"no crossing in range: yield({lo:g}) = {yield_lo:.6f}, yield({hi:g}) = {yield_hi:.6f}"
        )
