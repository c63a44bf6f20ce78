"""Exception types raised across the package."""


class QPainleveError(Exception):
    """Base class for all package errors."""


class SingularConfigurationError(QPainleveError, ValueError):
    """A denominator of a rational formula vanished (or nearly so).

    ``where`` names the offending factor, e.g. ``"1 + x_1(qt) y_0(t)"``.
    """

    def __init__(self, where: str, value=None, step: int | None = None):
        self.where = where
        self.value = value
        self.step = step
        msg = f"singular configuration: {where} vanishes"
        if value is not None:
            msg += f" (|value| = {abs(value):.3e})"
        if step is not None:
            msg += f" at step {step}"
        super().__init__(msg)


class DegenerateSystemError(SingularConfigurationError):
    """The linear y-subsystem is singular (t = q^{-2} for the forward map)."""


class ConvergenceError(QPainleveError, RuntimeError):
    """Newton iteration failed; ``trace`` holds the residual norm per iteration."""

    def __init__(self, message: str, trace=None, step: int | None = None):
        self.trace = list(trace or [])
        self.step = step
        if step is not None:
            message = f"{message} at step {step}"
        super().__init__(message)


class SingularJacobianError(ConvergenceError):
    pass


class ResonanceError(QPainleveError, ValueError):
    """A series denominator vanished at order ``k``."""

    def __init__(self, message: str, k: int | None = None):
        self.k = k
        super().__init__(message if k is None else f"{message} (k = {k})")


class FirstColumnError(QPainleveError, ArithmeticError):
    """A first-column check of the reduction chain exceeded tolerance."""

    def __init__(self, stage: str, residual: float, tol: float):
        self.stage = stage
        self.residual = residual
        super().__init__(f"first-column check failed at stage {stage}: {residual:.3e} > {tol:.1e}")
