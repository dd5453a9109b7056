"""The catalog: one file field plus the sections partitioning it."""

from __future__ import annotations

from dataclasses import dataclass
from dataclasses import field as dc_field
from pathlib import Path
from typing import Iterable, Sequence

from .errors import DuplicateError, InUseError, MembershipError, NotFoundError
from .field import BLOB_DIR, FieldProblem, FileEntry, FileField, FileId
from .sections import AttributeMatrix, Section
from .vtree import DEFAULT_BUCKET_LABEL, BuildReport, VTree

CATALOG_FILE = "catalog.json"
LOCK_FILE = "catalog.lock"


@dataclass
class Catalog:
    root: Path
    field: FileField = None  # type: ignore[assignment]
    sections: dict[str, Section] = dc_field(default_factory=dict)

    def __post_init__(self) -> None:
        self.root = Path(self.root)
        if self.field is None:
            self.field = FileField(self.root)

    @property
    def path(self) -> Path:
        return self.root / CATALOG_FILE

    @classmethod
    def init(cls, root: Path | str) -> Catalog:
        """Create an empty catalog at *root* and save it."""
        root = Path(root)
        if (root / CATALOG_FILE).exists():
            raise DuplicateError(f"a catalog already exists at {root}")
        (root / BLOB_DIR).mkdir(parents=True, exist_ok=True)
        catalog = cls(root)
        catalog.save()
        return catalog

    @classmethod
    def open(cls, root: Path | str) -> Catalog:
        from .persistence import load

        return load(Path(root) / CATALOG_FILE)

    def save(self) -> None:
        from .persistence import save

        save(self, self.path)

    # -- file field -------------------------------------------------------

    def add_file(self, content: bytes, ingest_name: str) -> tuple[FileId, bool]:
        return self.field.add_file(content, ingest_name)

    def get_file(self, file_id: FileId) -> FileEntry:
        return self.field.get_file(file_id)

    def read_content(self, file_id: FileId) -> bytes:
        return self.field.read_content(file_id)

    def list_files(self) -> list[FileEntry]:
        return self.field.list_files()

    def verify_field(self) -> list[FieldProblem]:
        return self.field.verify()

    def remove_file(self, file_id: FileId) -> None:
        self.field.get_file(file_id)
        owner = self.owner_of(file_id)
        if owner is not None:
            raise InUseError(f"file {file_id} is assigned to section {owner!r}", owner)
        self.field.remove_file(file_id)

    def owner_of(self, file_id: FileId) -> str | None:
        for section in self.sections.values():
            if file_id in section:
                return section.name
        return None

    # -- sections ---------------------------------------------------------

    def create_section(self, name: str) -> Section:
        if name in self.sections:
            raise DuplicateError(f"section {name!r} already exists")
        section = Section(name)
        self.sections[name] = section
        return section

    def section(self, name: str) -> Section:
        try:
            return self.sections[name]
        except KeyError:
            raise NotFoundError(f"no section {name!r}") from None

    def assign_file(self, section: str, file_id: FileId) -> None:
        target = self.section(section)
        self.field.get_file(file_id)
        owner = self.owner_of(file_id)
        if owner is not None:
            raise MembershipError(
                f"file {file_id} already belongs to section {owner!r}", owner
            )
        target._add_member(file_id)

    def define_attribute(self, section: str, attr: str) -> None:
        self.section(section).define_attribute(attr)

    def set_value(
        self, section: str, file_id: FileId, attr: str, value: str | None
    ) -> None:
        self.section(section).set_value(file_id, attr, value)

    def matrix(self, section: str) -> AttributeMatrix:
        return self.section(section).matrix()

    def project(
        self, section: str, attrs: Sequence[str], files: Iterable[FileId] | None = None
    ) -> AttributeMatrix:
        return self.section(section).project(attrs, files)

    # -- trees ------------------------------------------------------------

    def create_tree(self, section: str, name: str) -> VTree:
        return self.section(section).create_tree(name)

    def tree(self, section: str, name: str) -> VTree:
        return self.section(section).tree(name)

    def build_auto(
        self,
        section: str,
        tree_name: str,
        attrs: Sequence[str],
        files: Iterable[FileId] | None = None,
        missing: str = "skip",
        bucket_label: str = DEFAULT_BUCKET_LABEL,
    ) -> tuple[VTree, BuildReport]:
        return self.section(section).build_auto(
            tree_name, attrs, files, missing, bucket_label
        )
