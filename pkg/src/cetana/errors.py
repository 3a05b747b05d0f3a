"""Exception hierarchy shared by every cetana module."""

from __future__ import annotations


class CetanaError(Exception):
    """Base class for all errors raised by the package."""


class RegistryMismatch(CetanaError):
    """A ceta references a factor or action its agent spec does not declare."""


class StepError(CetanaError):
    """A transition failed; carries the tick index where it happened."""

    def __init__(self, tick: int, cause: BaseException):
        super().__init__(f"step failed at tick {tick}: {cause}")
        self.tick = tick
        self.cause = cause


class UnknownWorldKind(CetanaError):
    pass


class TimeMismatch(CetanaError):
    pass


class CapacityExceeded(CetanaError):
    pass


class OutOfRange(CetanaError):
    pass


class IndexOutOfTrace(CetanaError):
    pass


class LoopMismatch(CetanaError):
    """The loop report does not describe a cycle of the given trace."""


class EmptyWindow(CetanaError):
    pass


class EncoderMismatch(CetanaError):
    """An action has no encoding into the partner agent's pixel space."""
