"""Exception and warning types shared across the package."""


class InvalidInputError(ValueError):
    """Raised when arguments violate a precondition (dimension, sign, range)."""


class UnsupportedOracleError(NotImplementedError):
    """Raised when a closed form is requested for a potential that has none."""


class NoConvergenceError(RuntimeError):
    def __init__(self, message, best_residual):
        super().__init__(f"{message} (best residual {best_residual:.3e})")
        self.best_residual = best_residual


class DivergenceError(RuntimeError):
    def __init__(self, step, time):
        super().__init__(f"non-finite values after step {step} (t = {time:.6g})")
        self.step = step
        self.time = time


class DomainError(ValueError):
    def __init__(self, message, coordinate):
        super().__init__(f"{message}: {coordinate!r}")
        self.coordinate = coordinate


class PartialTrajectoryError(RuntimeError):
    """A piloted trajectory left the field domain before the final time.

    ``trajectory`` holds the samples integrated up to ``exit_time``.
    """

    def __init__(self, exit_time, trajectory):
        super().__init__(f"trajectory left the field domain at t = {exit_time:.6g}")
        self.exit_time = exit_time
        self.trajectory = trajectory


class StallWarning(RuntimeWarning):
    pass


class BoundaryMinimumWarning(RuntimeWarning):
    pass


class NonSmoothFieldWarning(RuntimeWarning):
    pass
