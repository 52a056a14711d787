"""Exception types raised across the package."""


class DivisionByZero(ZeroDivisionError):
    pass


class DimensionMismatch(ValueError):
    pass


class NotInRepresentation(ValueError):
    """A real 4x4 block is outside span{E, H_k, J_k, K_k}."""


class RankNotMultipleOfFour(ArithmeticError):
    """Exact rank of a supposed representation image is not 4s."""


class IndexOutOfRange(IndexError):
    pass


class RelationViolation(ArithmeticError):
    """A sign relation between two minors failed.

    ``pair`` holds the two minor indices (1-based) and ``difference`` the
    polynomial that should have vanished.
    """

    def __init__(self, pair, difference):
        self.pair = pair
        self.difference = difference
        super().__init__(f"minor relation C{pair[0]} ~ C{pair[1]} violated: {difference}")


class ConvergenceFailure(RuntimeError):
    pass


class QRNoConvergence(ConvergenceFailure):
    pass


class NoConvergence(RuntimeError):
    """No Newton start converged to a certified root."""


class ManifoldCollapse(RuntimeError):
    """Manifold sampling produced too few distinct certified points."""
