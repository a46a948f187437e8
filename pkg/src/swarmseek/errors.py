"""Exception types raised across the package."""


class SwarmSeekError(Exception):
    pass


class InvalidPolygon(SwarmSeekError, ValueError):
    pass


class StartInsideObstacle(SwarmSeekError, ValueError):
    pass


class GoalInsideObstacle(SwarmSeekError, ValueError):
    pass


class NoPath(SwarmSeekError):
    pass


class NegativeDistance(SwarmSeekError, ValueError):
    pass


class AtSource(SwarmSeekError, ValueError):
    pass


class TimeBeforeRelease(SwarmSeekError, ValueError):
    pass


class OutOfArena(SwarmSeekError, ValueError):
    pass


class InvalidConfig(SwarmSeekError, ValueError):
    pass


class PhiOutOfRange(InvalidConfig):
    pass


class EmptyRecords(SwarmSeekError, ValueError):
    pass


class RunFailed(SwarmSeekError):
    """A fatal error inside one Monte Carlo run."""

    def __init__(self, run_index, iteration, cause):
        self.run_index = run_index
        self.iteration = iteration
        self.cause = cause
        super().__init__(f"run {run_index} failed at iteration {iteration}: {cause!r}")

    def __reduce__(self):
        return (RunFailed, (self.run_index, self.iteration, self.cause))
