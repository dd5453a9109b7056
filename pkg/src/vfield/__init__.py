"""One deduplicated field of files, many virtual directory trees over it."""

from .catalog import Catalog
from .errors import (
    CatalogLockedError,
    CorruptionError,
    DuplicateError,
    ExportError,
    InUseError,
    InvalidNameError,
    InvalidValueError,
    LoadError,
    MembershipError,
    NotFoundError,
    PlacementError,
    TreeError,
    VFieldError,
)
from .field import FieldProblem, FileEntry, FileField
from .persistence import load, save
from .render import export_tree, render_tree
from .sections import AttributeMatrix, Section
from .vtree import DEFAULT_BUCKET_LABEL, AutoOrigin, BuildReport, VDir, VTree

__all__ = [
    "AttributeMatrix",
    "AutoOrigin",
    "BuildReport",
    "Catalog",
    "CatalogLockedError",
    "CorruptionError",
    "DEFAULT_BUCKET_LABEL",
    "DuplicateError",
    "ExportError",
    "FieldProblem",
    "FileEntry",
    "FileField",
    "InUseError",
    "InvalidNameError",
    "InvalidValueError",
    "LoadError",
    "MembershipError",
    "NotFoundError",
    "PlacementError",
    "Section",
    "TreeError",
    "VDir",
    "VFieldError",
    "VTree",
    "export_tree",
    "load",
    "render_tree",
    "save",
]
