"""ASCII rendering of virtual trees and export to a real directory."""

from __future__ import annotations

import os
import shutil
from collections import Counter
from dataclasses import dataclass, field
from pathlib import Path

from .errors import ExportError
from .field import FileField, FileId
from .vtree import VDir, VTree


def render_tree(tree: VTree, files: FileField) -> str:
    """Box-drawing view: dirs in stored order, then files by ascending id."""
    lines = [f"{tree.name}/"]

    def visit(node: VDir, prefix: str) -> None:
        items: list[tuple[str, VDir | None]] = [(d.name + "/", d) for d in node.dirs]
        items += [
            (f"[{i}] {files.get_file(i).ingest_name}", None) for i in sorted(node.files)
        ]
        for k, (label, child) in enumerate(items):
            last = k == len(items) - 1
            lines.append(prefix + ("└── " if last else "├── ") + label)
            if child is not None:
                visit(child, prefix + ("    " if last else "│   "))

    visit(tree.root, "")
    return "\n".join(lines) + "\n"


def _with_suffix(name: str, file_id: FileId) -> str:
    stem, ext = os.path.splitext(name)
    return f"{stem}~{file_id}{ext}"


def export_names(node: VDir, files: FileField) -> dict[FileId, str]:
    """Host file names for the refs in *node*.

    Names shared by several refs, or by a subdirectory, get ``~<id>``
    inserted before the extension.
    """
    names = {i: files.get_file(i).ingest_name for i in sorted(node.files)}
    dirs = {d.name for d in node.dirs}
    suffixed: set[FileId] = set()
    while True:
        counts = Counter(names.values())
        clashing = [i for i, n in names.items() if counts[n] > 1 or n in dirs]
        if not clashing:
            return names
        fresh = [i for i in clashing if i not in suffixed]
        if not fresh:
            raise ExportError(f"cannot make file names unique in {node.name!r}")
        for i in fresh:
            names[i] = _with_suffix(names[i], i)
            suffixed.add(i)


@dataclass
class ExportResult:
    target: Path
    dirs: int = 0
    linked: int = 0
    copied: int = 0
    placed: list[tuple[Path, FileId]] = field(default_factory=list)


def export_tree(tree: VTree, files: FileField, target: Path | str) -> ExportResult:
    """Materialize *tree* under *target*, hard-linking blobs when possible."""
    target = Path(target)
    if target.exists():
        if not target.is_dir():
            raise ExportError(f"export target {target} is not a directory")
        if any(target.iterdir()):
            raise ExportError(f"export target {target} is not empty")
    target.mkdir(parents=True, exist_ok=True)

    result = ExportResult(target)
    for path, node in tree.iter_dirs():
        where = target.joinpath(*path)
        if path:
            where.mkdir()
            result.dirs += 1
        for file_id, name in export_names(node, files).items():
            blob = files.blob_path(files.get_file(file_id))
            if not blob.exists():
                files.read_content(file_id)  # raises CorruptionError
            dest = where / name
            try:
                os.link(blob, dest)
                result.linked += 1
            except OSError:
                shutil.copyfile(blob, dest)
                result.copied += 1
            result.placed.append((dest, file_id))
    return result
