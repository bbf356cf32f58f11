"""
Exceptions raised by the kg_superficiality apps.

Commands turn any ``KgSimError`` into a ``CommandError`` (exit status 1);
non-fatal conditions are reported as counters and flags instead.
"""


class KgSimError(Exception):
    """
    Base class for every error the toolkit raises on purpose.
    """


class DomainError(KgSimError):
    """
    A constraint of the model is violated, e.g. ``n <= 1/sigma - 1``.

    The message always quotes the violated constraint.
    """


class ConsistencyError(DomainError):
    """
    Counters that ingest can never produce, e.g. a relationship with facts
    but no entities.
    """


class IngestError(KgSimError):
    """
    An input stream cannot be read at all.
    """
