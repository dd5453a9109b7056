"""Canonical JSON serialization of a whole catalog.

Layout of ``catalog.json`` (keys sorted, 2-space indent, UTF-8, trailing
newline)::

    {
      "checksum": "<sha256 of the document without this key>",
      "files": [{"blob", "digest", "id", "name", "size"}, ...],
      "format_version": 1,
      "next_id": <int>,
      "sections": [
        {"name", "schema": [...],
         "members": [{"id", "values": [str | null, ...]}, ...],
         "trees": [{"name", "origin": null | {...}, "root": <dir>}, ...]}
      ]
    }

with ``<dir> = {"name", "dirs": [<dir>, ...], "files": [id, ...]}``.

Loading re-checks every model invariant before the checksum, so a
hand-edited document reports the concrete broken rule. A missing
``checksum`` key is accepted; a wrong one is not.
"""

from __future__ import annotations

import hashlib
import json
import os
import re
import tempfile
from pathlib import Path
from typing import Any

from .catalog import Catalog
from .errors import LoadError, VFieldError
from .field import FileEntry, FileField, blob_ref_for
from .names import check_ingest_name, check_label, check_plain_name, check_value
from .sections import Section
from .vtree import MISSING_POLICIES, AutoOrigin, VDir, VTree

FORMAT_VERSION = 1

_DIGEST = re.compile(r"[0-9a-f]{64}")


# -- writing ----------------------------------------------------------------


def _dir_doc(node: VDir) -> dict[str, Any]:
    return {
        "name": node.name,
        "dirs": [_dir_doc(d) for d in node.dirs],
        "files": list(node.files),
    }


def _origin_doc(origin: AutoOrigin | None) -> dict[str, Any] | None:
    if origin is None:
        return None
    return {
        "attributes": list(origin.attributes),
        "files": None if origin.file_ids is None else list(origin.file_ids),
        "missing": origin.missing,
        "bucket_label": origin.bucket_label,
    }


def to_document(catalog: Catalog) -> dict[str, Any]:
    field = catalog.field
    return {
        "format_version": FORMAT_VERSION,
        "next_id": field.next_id,
        "files": [
            {
                "id": e.id,
                "digest": e.digest,
                "size": e.size,
                "name": e.ingest_name,
                "blob": e.blob_ref,
            }
            for e in field.list_files()
        ],
        "sections": [
            {
                "name": s.name,
                "schema": list(s.schema),
                "members": [
                    {"id": i, "values": list(s.rows[i])} for i in s.file_ids
                ],
                "trees": [
                    {
                        "name": t.name,
                        "origin": _origin_doc(t.origin),
                        "root": _dir_doc(t.root),
                    }
                    for t in s.trees.values()
                ],
            }
            for s in catalog.sections.values()
        ],
    }


def canonical_json(doc: Any) -> bytes:
    text = json.dumps(doc, sort_keys=True, indent=2, ensure_ascii=False)
    return (text + "\n").encode("utf-8")


def _checksum(doc: dict[str, Any]) -> str:
    body = {k: v for k, v in doc.items() if k != "checksum"}
    return hashlib.sha256(canonical_json(body)).hexdigest()


def dumps(catalog: Catalog) -> bytes:
    doc = to_document(catalog)
    doc["checksum"] = _checksum(doc)
    return canonical_json(doc)


def save(catalog: Catalog, path: Path | str) -> None:
    """Write the catalog atomically; on failure the old file is left intact."""
    path = Path(path)
    data = dumps(catalog)
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=".catalog-", suffix=".tmp")
    try:
        with os.fdopen(fd, "wb") as fh:
            fh.write(data)
            fh.flush()
            os.fsync(fh.fileno())
        os.replace(tmp, path)
    except BaseException:
        try:
            os.unlink(tmp)
        except FileNotFoundError:
            pass
        raise


# -- reading ----------------------------------------------------------------


def _no_duplicate_keys(pairs: list[tuple[str, Any]]) -> dict[str, Any]:
    out: dict[str, Any] = {}
    for key, value in pairs:
        if key in out:
            raise LoadError("document structure", f"duplicate key {key!r}")
        out[key] = value
    return out


def _reject_constant(name: str) -> Any:
    raise LoadError("document structure", f"non-finite number {name}")


def _obj(
    value: Any, keys: set[str], where: str, optional: frozenset[str] = frozenset()
) -> dict:
    if not isinstance(value, dict):
        raise LoadError("document structure", f"{where} must be an object")
    have = set(value)
    if not (keys <= have <= keys | optional):
        raise LoadError(
            "document structure",
            f"{where} keys {sorted(have)} differ from {sorted(keys)}",
        )
    return value


def _list(value: Any, where: str) -> list:
    if not isinstance(value, list):
        raise LoadError("document structure", f"{where} must be an array")
    return value


def _int(value: Any, where: str) -> int:
    if type(value) is not int:
        raise LoadError("document structure", f"{where} must be an integer")
    return value


def _name(check: Any, value: Any, *args: str) -> str:
    try:
        return check(value, *args)
    except VFieldError as exc:
        raise LoadError("name validity", str(exc)) from None


def _read_dir(doc: Any, where: str, is_root: bool = False) -> VDir:
    doc = _obj(doc, {"name", "dirs", "files"}, where)
    name = doc["name"]
    if is_root:
        _name(check_plain_name, name, "tree")
    else:
        _name(check_label, name, "directory name")
    where = f"{where}/{name}"
    node = VDir(name)
    node.files = [_int(i, f"{where} files") for i in _list(doc["files"], where)]
    for sub in _list(doc["dirs"], where):
        child = _read_dir(sub, where)
        if node.child(child.name) is not None:
            raise LoadError("sibling distinctness", f"{child.name!r} twice under {where}")
        node.dirs.append(child)
    return node


def _read_origin(doc: Any, section: Section, where: str) -> AutoOrigin | None:
    if doc is None:
        return None
    doc = _obj(doc, {"attributes", "files", "missing", "bucket_label"}, where)
    attrs = tuple(_list(doc["attributes"], where))
    if not all(isinstance(a, str) for a in attrs):
        raise LoadError("document structure", f"{where} attributes must be strings")
    if not attrs or len(set(attrs)) != len(attrs) or not set(attrs) <= set(section.schema):
        raise LoadError("origin", f"{where} attributes {list(attrs)!r} do not fit the schema")
    files = doc["files"]
    if files is not None:
        files = tuple(_int(i, where) for i in _list(files, where))
        if len(set(files)) != len(files) or not all(i in section for i in files):
            raise LoadError("origin", f"{where} files are not distinct section members")
    missing, label = doc["missing"], doc["bucket_label"]
    if missing not in MISSING_POLICIES:
        raise LoadError("origin", f"{where} missing policy {missing!r}")
    if missing == "bucket":
        _name(check_label, label, "bucket label")
    elif label is not None:
        raise LoadError("origin", f"{where} bucket label without bucket policy")
    return AutoOrigin(attrs, files, missing, label)


def _read_tree(doc: Any, section: Section, where: str) -> VTree:
    doc = _obj(doc, {"name", "origin", "root"}, where)
    name = _name(check_plain_name, doc["name"], "tree")
    root = _read_dir(doc["root"], where, is_root=True)
    if root.name != name:
        raise LoadError("tree root name", f"{where} root is named {root.name!r}")
    tree = VTree(name, root, _read_origin(doc["origin"], section, where))
    seen: set[int] = set()
    for file_id in tree.flatten():
        if file_id not in section:
            raise LoadError("tree membership", f"{where} references file {file_id}")
        if file_id in seen:
            raise LoadError("tree at-most-once", f"{where} places file {file_id} twice")
        seen.add(file_id)
    return tree


def _read_section(doc: Any, field: FileField, owners: dict[int, str]) -> Section:
    doc = _obj(doc, {"name", "schema", "members", "trees"}, "section")
    name = _name(check_plain_name, doc["name"], "section")
    where = f"section {name!r}"
    section = Section(name)
    for attr in _list(doc["schema"], where):
        _name(check_label, attr, "attribute name")
        if attr in section.schema:
            raise LoadError("schema uniqueness", f"{where} defines {attr!r} twice")
        section.schema.append(attr)
    for member in _list(doc["members"], where):
        member = _obj(member, {"id", "values"}, f"{where} member")
        file_id = _int(member["id"], f"{where} member id")
        if file_id not in field:
            raise LoadError("section membership", f"{where} lists unknown file {file_id}")
        if file_id in owners:
            raise LoadError(
                "section disjointness",
                f"file {file_id} is in {owners[file_id]!r} and {name!r}",
            )
        owners[file_id] = name
        values = _list(member["values"], f"{where} member {file_id}")
        if len(values) != len(section.schema):
            raise LoadError(
                "row rectangularity",
                f"{where} file {file_id} has {len(values)} cells for "
                f"{len(section.schema)} attributes",
            )
        for v in values:
            if v is not None:
                _name(check_value, v)
        section.file_ids.append(file_id)
        section.rows[file_id] = list(values)
    for tree_doc in _list(doc["trees"], where):
        tree = _read_tree(tree_doc, section, f"{where} tree")
        if tree.name in section.trees:
            raise LoadError("tree name uniqueness", f"{where} has tree {tree.name!r} twice")
        tree.owner = section
        section.trees[tree.name] = tree
    return section


def _read_field(doc: dict[str, Any], root: Path) -> FileField:
    field = FileField(root, next_id=_int(doc["next_id"], "next_id"))
    if field.next_id < 1:
        raise LoadError("next_id bound", "next_id must be positive")
    for row in _list(doc["files"], "files"):
        row = _obj(row, {"id", "digest", "size", "name", "blob"}, "file")
        file_id = _int(row["id"], "file id")
        size = _int(row["size"], "file size")
        digest = row["digest"]
        if file_id < 1:
            raise LoadError("id positivity", f"file id {file_id}")
        if file_id >= field.next_id:
            raise LoadError("next_id bound", f"file id {file_id} >= next_id {field.next_id}")
        if file_id in field.entries:
            raise LoadError("id uniqueness", f"file id {file_id} appears twice")
        if not isinstance(digest, str) or not _DIGEST.fullmatch(digest):
            raise LoadError("digest format", f"file {file_id} digest {digest!r}")
        if digest in field.digest_index:
            raise LoadError(
                "digest uniqueness",
                f"files {field.digest_index[digest]} and {file_id} share a digest",
            )
        if size < 0:
            raise LoadError("size", f"file {file_id} has negative size")
        if row["blob"] != blob_ref_for(digest):
            raise LoadError("blob path", f"file {file_id} blob {row['blob']!r}")
        name = _name(check_ingest_name, row["name"])
        field.entries[file_id] = FileEntry(file_id, digest, size, name, row["blob"])
        field.digest_index[digest] = file_id
    return field


def from_document(doc: Any, root: Path | str) -> Catalog:
    """Validate a parsed document and build the catalog it describes."""
    root = Path(root)
    doc = _obj(
        doc, {"format_version", "next_id", "files", "sections"}, "document", frozenset({"checksum"})
    )
    version = doc["format_version"]
    if type(version) is not int or version != FORMAT_VERSION:
        raise LoadError("format version", f"unsupported format_version {version!r}")
    field = _read_field(doc, root)
    catalog = Catalog(root, field)
    owners: dict[int, str] = {}
    for section_doc in _list(doc["sections"], "sections"):
        section = _read_section(section_doc, field, owners)
        if section.name in catalog.sections:
            raise LoadError("section name uniqueness", f"section {section.name!r} twice")
        catalog.sections[section.name] = section
    if "checksum" in doc and doc["checksum"] != _checksum(doc):
        raise LoadError("checksum", "document content does not match its checksum")
    return catalog


def loads(data: bytes, root: Path | str) -> Catalog:
    try:
        doc = json.loads(
            data.decode("utf-8"),
            object_pairs_hook=_no_duplicate_keys,
            parse_constant=_reject_constant,
        )
    except LoadError:
        raise
    except (UnicodeDecodeError, ValueError, RecursionError) as exc:
        raise LoadError("parse", str(exc)) from None
    return from_document(doc, root)


def load(path: Path | str) -> Catalog:
    """Read and fully validate ``catalog.json``; blobs live beside it."""
    path = Path(path)
    return loads(path.read_bytes(), path.parent)
