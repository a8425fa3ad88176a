"""Exception types raised across the package."""

from __future__ import annotations


class IntschedError(Exception):
    """Base class for all package errors."""


class InstanceError(IntschedError, ValueError):
    pass


class NonPositiveLength(InstanceError):
    def __init__(self, interval_id):
        super().__init__(f"interval {interval_id!r} has deadline <= release")
        self.interval_id = interval_id


class DuplicateId(InstanceError):
    def __init__(self, interval_id):
        super().__init__(f"interval id {interval_id!r} appears more than once")
        self.interval_id = interval_id


class NegativeRelease(InstanceError):
    def __init__(self, interval_id):
        super().__init__(f"interval {interval_id!r} has a negative release time")
        self.interval_id = interval_id


class PredictionMismatch(IntschedError, ValueError):
    pass


class TooLarge(IntschedError, ValueError):
    def __init__(self, n, limit):
        super().__init__(f"instance has {n} intervals; exhaustive search is capped at {limit}")
        self.n = n


class NotTwoValue(IntschedError, ValueError):
    pass


class NotAChain(IntschedError, ValueError):
    pass


class BadParameter(IntschedError, ValueError):
    pass


class BadEpsilon(BadParameter):
    pass


class ProtocolViolation(IntschedError, RuntimeError):
    pass


class MalformedLine(IntschedError, ValueError):
    def __init__(self, line_no, reason=""):
        msg = f"malformed SWF job line {line_no}"
        if reason:
            msg += f": {reason}"
        super().__init__(msg)
        self.line_no = line_no


class EmptyTrace(IntschedError, ValueError):
    pass
