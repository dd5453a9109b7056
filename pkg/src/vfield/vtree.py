"""Virtual trees over a section.

A tree holds file ids, never paths or copies. Trees are edited by hand
(mkdir/link/...) or built in one shot from a projection of the section's
attribute matrix: level ``j`` holds the distinct values of column ``j``
among the rows that reach each parent, and every row's file is attached to
the leaf whose path spells out its full value tuple.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import TYPE_CHECKING, Any, Iterable, Iterator, Sequence

from .errors import (
    DuplicateError,
    MembershipError,
    NotFoundError,
    PlacementError,
    TreeError,
)
from .field import FileId
from .names import check_label, check_plain_name

if TYPE_CHECKING:
    from .sections import Section

VPath = tuple[str, ...]

DEFAULT_BUCKET_LABEL = "<нет значения>"
MISSING_POLICIES = ("skip", "bucket")


@dataclass
class VDir:
    name: str
    dirs: list[VDir] = field(default_factory=list)
    files: list[FileId] = field(default_factory=list)

    def child(self, name: str) -> VDir | None:
        for d in self.dirs:
            if d.name == name:
                return d
        return None

    def is_empty(self) -> bool:
        return not self.dirs and not self.files


@dataclass(frozen=True)
class DirView:
    """Read-only snapshot of one directory."""

    path: VPath
    name: str
    dirs: tuple[str, ...]
    files: tuple[FileId, ...]


@dataclass(frozen=True)
class AutoOrigin:
    """How an auto tree was built; enough to rebuild it."""

    attributes: tuple[str, ...]
    file_ids: tuple[FileId, ...] | None  # None: every member at build time
    missing: str = "skip"
    bucket_label: str | None = None


@dataclass
class BuildReport:
    tree: str
    # levels[j] = number of directories on level j+1
    levels: list[int]
    # fanout[j] = (parent path, child count) for every parent on level j
    fanout: list[list[tuple[VPath, int]]]
    attached: int
    skipped: list[tuple[FileId, str]]

    @property
    def depth(self) -> int:
        """Number of levels including the root."""
        return 1 + sum(1 for count in self.levels if count)


@dataclass
class VTree:
    name: str
    root: VDir = None  # type: ignore[assignment]
    origin: AutoOrigin | None = None
    owner: Section | None = field(default=None, compare=False, repr=False)

    def __post_init__(self) -> None:
        check_plain_name(self.name, "tree")
        if self.root is None:
            self.root = VDir(self.name)

    # -- lookup -----------------------------------------------------------

    def _dir(self, path: Sequence[str]) -> VDir:
        node = self.root
        for depth, part in enumerate(path):
            nxt = node.child(part)
            if nxt is None:
                shown = "/".join(path[: depth + 1])
                raise NotFoundError(f"no directory {shown!r} in tree {self.name!r}")
            node = nxt
        return node

    def resolve(self, path: Sequence[str] = ()) -> DirView:
        node = self._dir(path)
        return DirView(
            tuple(path), node.name, tuple(d.name for d in node.dirs), tuple(node.files)
        )

    def walk(self) -> list[tuple[VPath, tuple[FileId, ...]]]:
        """Preorder list of ``(path, file_refs)``, children in stored order."""
        return [(path, tuple(node.files)) for path, node in self.iter_dirs()]

    def iter_dirs(self) -> Iterator[tuple[VPath, VDir]]:
        stack: list[tuple[VPath, VDir]] = [((), self.root)]
        while stack:
            path, node = stack.pop()
            yield path, node
            for d in reversed(node.dirs):
                stack.append((path + (d.name,), d))

    def flatten(self) -> list[FileId]:
        return [fid for _, node in self.iter_dirs() for fid in node.files]

    def locate(self, file_id: FileId) -> VPath | None:
        for path, node in self.iter_dirs():
            if file_id in node.files:
                return path
        return None

    def dir_count(self) -> int:
        """Directories below the root."""
        return sum(1 for _ in self.iter_dirs()) - 1

    # -- manual edits -----------------------------------------------------

    def mkdir(self, parent: Sequence[str], name: str) -> VPath:
        check_label(name, "directory name")
        node = self._dir(parent)
        if node.child(name) is not None:
            raise DuplicateError(f"directory {name!r} already exists here")
        node.dirs.append(VDir(name))
        return tuple(parent) + (name,)

    def link(self, path: Sequence[str], file_id: FileId) -> None:
        node = self._dir(path)
        if self.owner is not None and file_id not in self.owner:
            raise MembershipError(
                f"file {file_id} is not in section {self.owner.name!r}"
            )
        where = self.locate(file_id)
        if where is not None:
            raise PlacementError(
                f"file {file_id} is already placed at /{'/'.join(where)} "
                f"in tree {self.name!r}"
            )
        node.files.append(file_id)

    def unlink(self, path: Sequence[str], file_id: FileId) -> None:
        node = self._dir(path)
        try:
            node.files.remove(file_id)
        except ValueError:
            raise NotFoundError(f"file {file_id} is not linked here") from None

    def rmdir(self, path: Sequence[str]) -> None:
        if not path:
            raise TreeError("cannot remove the root")
        parent = self._dir(path[:-1])
        node = self._dir(path)
        if not node.is_empty():
            raise TreeError(f"directory {'/'.join(path)!r} is not empty")
        parent.dirs.remove(node)

    def move_dir(self, src: Sequence[str], to_parent: Sequence[str]) -> VPath:
        src, to_parent = tuple(src), tuple(to_parent)
        if not src:
            raise TreeError("cannot move the root")
        node = self._dir(src)
        target = self._dir(to_parent)
        if to_parent[: len(src)] == src:
            raise TreeError("cannot move a directory under itself")
        if target.child(node.name) is not None:
            if to_parent == src[:-1]:
                return src
            raise DuplicateError(f"directory {node.name!r} already exists there")
        self._dir(src[:-1]).dirs.remove(node)
        target.dirs.append(node)
        return to_parent + (node.name,)


def construct(
    section: Section,
    tree_name: str,
    attrs: Sequence[str],
    files: Iterable[FileId] | None = None,
    missing: str = "skip",
    bucket_label: str = DEFAULT_BUCKET_LABEL,
) -> tuple[VTree, BuildReport]:
    """Build an auto tree without registering it in *section*."""
    if missing not in MISSING_POLICIES:
        raise ValueError(f"missing policy must be one of {MISSING_POLICIES}")
    if missing == "bucket":
        check_label(bucket_label, "bucket label")
    if files is not None:
        files = tuple(files)
    m = section.project(attrs, files)
    attrs = m.attributes
    h = len(attrs)

    rows: list[tuple[FileId, tuple[str, ...]]] = []
    skipped: list[tuple[FileId, str]] = []
    for file_id, values in zip(m.file_ids, m.cells):
        if None in values:
            if missing == "skip":
                skipped.append((file_id, attrs[values.index(None)]))
                continue
            values = tuple(bucket_label if v is None else v for v in values)
        rows.append((file_id, values))  # type: ignore[arg-type]

    tree = VTree(
        tree_name,
        origin=AutoOrigin(
            attrs, files, missing, bucket_label if missing == "bucket" else None
        ),
    )
    tree.owner = section

    levels: list[int] = []
    fanout: list[list[tuple[VPath, int]]] = []
    groups: list[tuple[VPath, VDir, list[Any]]] = [((), tree.root, rows)]
    for j in range(h):
        next_groups = []
        per_parent = []
        for path, parent, members in groups:
            for value in sorted({values[j] for _, values in members}):
                child = VDir(value)
                parent.dirs.append(child)
                reach = [r for r in members if r[1][j] == value]
                next_groups.append((path + (value,), child, reach))
            per_parent.append((path, len(parent.dirs)))
        levels.append(len(next_groups))
        fanout.append(per_parent)
        groups = next_groups

    for _, leaf, members in groups:
        leaf.files = sorted(file_id for file_id, _ in members)

    report = BuildReport(tree_name, levels, fanout, len(rows), skipped)
    return tree, report


def build_auto(
    section: Section,
    tree_name: str,
    attrs: Sequence[str],
    files: Iterable[FileId] | None = None,
    missing: str = "skip",
    bucket_label: str = DEFAULT_BUCKET_LABEL,
) -> tuple[VTree, BuildReport]:
    """Build a tree from the projection of *section* on *attrs* and register it."""
    check_plain_name(tree_name, "tree")
    if tree_name in section.trees:
        raise DuplicateError(f"tree {tree_name!r} already exists in {section.name!r}")
    tree, report = construct(section, tree_name, attrs, files, missing, bucket_label)
    section.trees[tree_name] = tree
    return tree, report
