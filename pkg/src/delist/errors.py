"""Exception types shared across the package.

Parse-time errors (ParseError subclasses) carry a line number so callers can
either raise them (strict snapshot ingestion) or collect them (auxiliary
stream ingestion, which must report every bad line and keep going).
"""

from __future__ import annotations


class DelistError(Exception):
    """Base class for all errors raised by this package."""


class ParseError(DelistError):
    """A positioned input-line error."""

    def __init__(self, line_no: int, reason: str):
        super().__init__(f"line {line_no}: {reason}")
        self.line_no = line_no
        self.reason = reason


class MalformedLine(ParseError):
    pass


class DuplicateAppId(ParseError):
    def __init__(self, line_no: int, app_id: str):
        super().__init__(line_no, f"duplicate app_id {app_id!r}")
        self.app_id = app_id


class DateMismatch(ParseError):
    pass


class StarsOutOfRange(ParseError):
    pass


class NonPositiveRank(ParseError):
    pass


class IoFailure(DelistError):
    pass


class SnapshotNotFound(DelistError):
    def __init__(self, date):
        super().__init__(f"no snapshot stored for {date}")
        self.date = date


class InvalidOrder(DelistError):
    pass


class EmptyRange(DelistError):
    pass


class EmptyWindow(DelistError):
    pass


class EmptyInput(DelistError):
    pass


class EmptyDataset(DelistError):
    pass


class NoRemovals(DelistError):
    pass


class UnknownModelKind(DelistError):
    pass


class SingleClass(DelistError):
    pass


class NonFiniteFeature(DelistError):
    pass


class DimensionMismatch(DelistError):
    pass


class TooFewSamples(DelistError):
    pass


class DegenerateLabels(DelistError):
    pass


class ConfigInvalid(DelistError):
    pass
