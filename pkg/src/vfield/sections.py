"""Sections: disjoint named subsets of the file field with attribute matrices."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Sequence

from .errors import DuplicateError, MembershipError, NotFoundError
from .field import FileId
from .names import check_label, check_plain_name, check_value
from .vtree import DEFAULT_BUCKET_LABEL, BuildReport, VTree, build_auto, construct

Cell = str | None


@dataclass(frozen=True)
class AttributeMatrix:
    """Immutable files x attributes snapshot; ``None`` marks an unset cell."""

    file_ids: tuple[FileId, ...]
    attributes: tuple[str, ...]
    cells: tuple[tuple[Cell, ...], ...]

    @property
    def shape(self) -> tuple[int, int]:
        return len(self.file_ids), len(self.attributes)

    def row(self, file_id: FileId) -> tuple[Cell, ...]:
        return self.cells[self.file_ids.index(file_id)]

    def cell(self, file_id: FileId, attr: str) -> Cell:
        return self.row(file_id)[self.attributes.index(attr)]

    def column(self, attr: str) -> list[Cell]:
        j = self.attributes.index(attr)
        return [row[j] for row in self.cells]


@dataclass
class Section:
    name: str
    file_ids: list[FileId] = field(default_factory=list)
    schema: list[str] = field(default_factory=list)
    rows: dict[FileId, list[Cell]] = field(default_factory=dict)
    trees: dict[str, VTree] = field(default_factory=dict)

    def __post_init__(self) -> None:
        check_plain_name(self.name, "section")
        for tree in self.trees.values():
            tree.owner = self

    def __contains__(self, file_id: object) -> bool:
        return file_id in self.rows

    # -- membership -------------------------------------------------------

    def _add_member(self, file_id: FileId) -> None:
        # Field existence and cross-section disjointness are checked by the catalog.
        if file_id in self.rows:
            raise MembershipError(
                f"file {file_id} already belongs to section {self.name!r}", self.name
            )
        self.file_ids.append(file_id)
        self.rows[file_id] = [None] * len(self.schema)

    def _require_member(self, file_id: FileId) -> None:
        if file_id not in self.rows:
            raise MembershipError(f"file {file_id} is not in section {self.name!r}")

    # -- schema and values ------------------------------------------------

    def define_attribute(self, attr: str) -> None:
        check_label(attr, "attribute name")
        if attr in self.schema:
            raise DuplicateError(f"attribute {attr!r} already defined in {self.name!r}")
        self.schema.append(attr)
        for row in self.rows.values():
            row.append(None)

    def _column(self, attr: str) -> int:
        try:
            return self.schema.index(attr)
        except ValueError:
            raise NotFoundError(f"no attribute {attr!r} in section {self.name!r}") from None

    def set_value(self, file_id: FileId, attr: str, value: str | None) -> None:
        """Overwrite one cell; ``None`` clears it."""
        self._require_member(file_id)
        j = self._column(attr)
        if value is not None:
            check_value(value)
        self.rows[file_id][j] = value

    def get_value(self, file_id: FileId, attr: str) -> Cell:
        self._require_member(file_id)
        return self.rows[file_id][self._column(attr)]

    def matrix(self) -> AttributeMatrix:
        return AttributeMatrix(
            file_ids=tuple(self.file_ids),
            attributes=tuple(self.schema),
            cells=tuple(tuple(self.rows[i]) for i in self.file_ids),
        )

    def project(
        self, attrs: Sequence[str], files: Iterable[FileId] | None = None
    ) -> AttributeMatrix:
        """Select columns *attrs* (in that order) and rows *files*.

        *files* defaults to every member in assignment order.
        """
        attrs = list(attrs)
        if not attrs:
            raise ValueError("projection needs at least one attribute")
        if len(set(attrs)) != len(attrs):
            dup = next(a for a in attrs if attrs.count(a) > 1)
            raise DuplicateError(f"attribute {dup!r} selected twice")
        columns = [self._column(a) for a in attrs]
        file_ids = list(self.file_ids if files is None else files)
        if len(set(file_ids)) != len(file_ids):
            raise DuplicateError("a file is selected twice")
        for file_id in file_ids:
            self._require_member(file_id)
        cells = tuple(tuple(self.rows[i][j] for j in columns) for i in file_ids)
        return AttributeMatrix(tuple(file_ids), tuple(attrs), cells)

    # -- trees ------------------------------------------------------------

    def create_tree(self, name: str) -> VTree:
        check_plain_name(name, "tree")
        if name in self.trees:
            raise DuplicateError(f"tree {name!r} already exists in {self.name!r}")
        tree = VTree(name)
        tree.owner = self
        self.trees[name] = tree
        return tree

    def tree(self, name: str) -> VTree:
        try:
            return self.trees[name]
        except KeyError:
            raise NotFoundError(f"no tree {name!r} in section {self.name!r}") from None

    def delete_tree(self, name: str) -> None:
        self.tree(name)
        del self.trees[name]

    def build_auto(
        self,
        tree_name: str,
        attrs: Sequence[str],
        files: Iterable[FileId] | None = None,
        missing: str = "skip",
        bucket_label: str = DEFAULT_BUCKET_LABEL,
    ) -> tuple[VTree, BuildReport]:
        return build_auto(self, tree_name, attrs, files, missing, bucket_label)

    def rebuild(self, tree_name: str) -> tuple[VTree, BuildReport]:
        """Rebuild an auto tree from its recorded origin and current values."""
        old = self.tree(tree_name)
        if old.origin is None:
            raise ValueError(f"tree {tree_name!r} was built manually")
        origin = old.origin
        tree, report = construct(
            self, tree_name, origin.attributes, origin.file_ids,
            origin.missing, origin.bucket_label or DEFAULT_BUCKET_LABEL,
        )
        self.trees[tree_name] = tree
        return tree, report
