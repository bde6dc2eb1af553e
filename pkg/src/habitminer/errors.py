"""Exception hierarchy. Every error raised by the library derives from HabitMinerError."""


class HabitMinerError(Exception):
    pass


class NonPositiveDuration(HabitMinerError):
    pass


class OverlongInterval(HabitMinerError):
    pass


class InvariantViolation(HabitMinerError):
    pass


class MalformedRow(HabitMinerError):
    def __init__(self, line: int, reason: str):
        super().__init__(f"line {line}: {reason}")
        self.line = line
        self.reason = reason


class UnknownColumn(HabitMinerError):
    pass


class EmptyResult(HabitMinerError):
    pass


class TooFewPoints(HabitMinerError):
    pass


class DegenerateClustering(HabitMinerError):
    pass


class EmptyCluster(HabitMinerError):
    pass


class NoClusterFound(HabitMinerError):
    pass


class NoAcceptedClusters(HabitMinerError):
    pass


class InvalidSpec(HabitMinerError):
    pass
