"""Exception hierarchy shared by all qmet modules."""


class QmetError(Exception):
    """Base class for every error raised by qmet."""


class DimensionMismatch(QmetError, ValueError):
    """Operands act on different numbers of qubits."""


class InvalidInput(QmetError, ValueError):
    """An argument violates an operation's precondition."""


class SizeLimitExceeded(QmetError, ValueError):
    """Requested size is beyond the configured enumeration/dense limit."""


class NonHermitian(QmetError, ValueError):
    """An observable or exponent generator is not Hermitian."""


class NumericalFailure(QmetError, ArithmeticError):
    """A rounding residue exceeded its documented tolerance."""


class StationaryPoint(QmetError, ArithmeticError):
    """The signal derivative vanishes, so the precision is undefined."""

    def __init__(self, theta, derivative, floor):
        self.theta = theta
        self.derivative = derivative
        self.floor = floor
        super().__init__(
            f"|d<X>/dtheta| = {abs(derivative):.3e} below floor {floor:.3e} "
            f"at theta = {theta!r}"
        )


class DegenerateGenerator(QmetError, ValueError):
    """The generator spectrum has zero width."""


class DegenerateBlock(QmetError, ValueError):
    """A Jaynes-Cummings 2x2 block has a vanishing Rabi frequency."""


class CutoffViolation(QmetError, ValueError):
    """A joint state has weight on the highest represented photon number."""


class SupportViolation(QmetError, ValueError):
    """A density matrix has weight outside span{all-up, all-down}."""
