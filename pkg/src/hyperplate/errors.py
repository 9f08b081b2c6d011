"""Exception types raised across the package."""


class HyperplateError(Exception):
    """Base class for all package errors."""


class NonPositiveJacobian(HyperplateError):
    """det(Y + I) <= 0 at some evaluation point."""

    def __init__(self, message="det(Y + I) must be positive", element=None, qp=None):
        if element is not None:
            message = f"{message} (element {element}, quadrature point {qp})"
        super().__init__(message)
        self.element = element
        self.qp = qp


class DegenerateExtent(HyperplateError):
    pass


class InteriorNode(HyperplateError):
    def __init__(self, node):
        super().__init__(f"node {node} is not on the boundary")
        self.node = node


class NotConverged(HyperplateError):
    def __init__(self, iterations, residual):
        super().__init__(f"CG did not converge after {iterations} iterations (residual {residual:.3e})")
        self.iterations = iterations
        self.residual = residual


class IndefiniteMatrix(HyperplateError):
    def __init__(self, curvature):
        super().__init__(f"search direction with non-positive curvature p'Ap = {curvature:.3e}")
        self.curvature = curvature


class NewtonDiverged(HyperplateError):
    def __init__(self, step, iteration, residual):
        super().__init__(
            f"Newton iteration failed at time level {step}, iteration {iteration} (residual {residual:.3e})"
        )
        self.step = step
        self.iteration = iteration
        self.residual = residual


class LengthMismatch(HyperplateError):
    pass


class ZeroSignal(HyperplateError):
    pass


class InvalidTau(HyperplateError):
    pass


class DegenerateDenominator(HyperplateError):
    pass


class InvalidWidth(HyperplateError):
    pass


class UnknownScenario(HyperplateError):
    pass


class InversionError(HyperplateError):
    """Wraps a solver failure with the Landweber iteration index."""

    def __init__(self, iteration, cause):
        super().__init__(f"iteration {iteration}: {cause}")
        self.iteration = iteration
        self.cause = cause
