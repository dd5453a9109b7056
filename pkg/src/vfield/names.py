"""Validation of names that end up as path components."""

from __future__ import annotations

from .errors import InvalidNameError, InvalidValueError

# "." and ".." would escape the target directory on export.
_RESERVED = frozenset({".", ".."})


def _problem(text: object, forbidden: str) -> str | None:
    if not isinstance(text, str):
        return "must be a string"
    if not text:
        return "must not be empty"
    if "\x00" in text:
        return "must not contain NUL"
    for ch in forbidden:
        if ch in text:
            return f"must not contain {ch!r}"
    if text in _RESERVED:
        return f"{text!r} is reserved"
    return None


def check_ingest_name(name: object) -> str:
    problem = _problem(name, "/\\")
    if problem:
        raise InvalidNameError(f"file name {name!r} {problem}")
    return name  # type: ignore[return-value]


def check_label(name: object, kind: str = "name") -> str:
    """Validate an attribute name, directory name or bucket label."""
    problem = _problem(name, "/")
    if problem:
        raise InvalidNameError(f"{kind} {name!r} {problem}")
    return name  # type: ignore[return-value]


def check_value(value: object) -> str:
    problem = _problem(value, "/")
    if problem:
        raise InvalidValueError(f"attribute value {value!r} {problem}")
    return value  # type: ignore[return-value]


def check_plain_name(name: object, kind: str) -> str:
    """Section and tree names: any non-empty string."""
    if not isinstance(name, str) or not name:
        raise InvalidNameError(f"{kind} name must be a non-empty string")
    return name
