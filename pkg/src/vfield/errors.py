"""Exception hierarchy shared by every layer of the catalog."""

from __future__ import annotations


class VFieldError(Exception):
    """Base class for all catalog errors."""


class InvalidNameError(VFieldError, ValueError):
    """A name or label is empty or contains a forbidden character."""


class InvalidValueError(VFieldError, ValueError):
    """An attribute value cannot be used as a directory label."""


class NotFoundError(VFieldError, LookupError):
    """A file id, section, attribute, tree or path does not exist."""


class DuplicateError(VFieldError):
    """A name that must be unique is already taken."""


class InUseError(VFieldError):
    """A file cannot be removed because a section still references it."""

    def __init__(self, message: str, section: str) -> None:
        super().__init__(message)
        self.section = section


class MembershipError(VFieldError):
    """A file is in the wrong section, or in none at all."""

    def __init__(self, message: str, section: str | None = None) -> None:
        super().__init__(message)
        self.section = section


class PlacementError(VFieldError):
    """A file is already placed somewhere in the same tree."""


class TreeError(VFieldError):
    """A structural edit would break the tree (non-empty rmdir, cyclic move...)."""


class CorruptionError(VFieldError):
    """Stored content is missing or does not match its digest."""


class LoadError(VFieldError):
    """A catalog document failed to parse or validate.

    ``invariant`` names the first check that failed.
    """

    def __init__(self, invariant: str, detail: str = "") -> None:
        message = invariant if not detail else f"{invariant}: {detail}"
        super().__init__(message)
        self.invariant = invariant


class CatalogLockedError(VFieldError):
    """Another process holds the catalog lock."""


class ExportError(VFieldError):
    """The export target is unusable or names cannot be made unique."""
