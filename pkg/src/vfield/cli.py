"""``vfield`` command line.

Every command loads ``catalog.json`` under an exclusive lock file, applies
one operation, re-validates the result and saves atomically. Nothing is
saved when a command fails.
"""

from __future__ import annotations

import argparse
import csv
import io
import os
import sys
from contextlib import contextmanager
from pathlib import Path
from typing import Callable, Iterator, Sequence, TextIO

from . import persistence
from .catalog import CATALOG_FILE, LOCK_FILE, Catalog
from .errors import CatalogLockedError, NotFoundError, VFieldError
from .names import check_value
from .render import export_tree, render_tree
from .vtree import DEFAULT_BUCKET_LABEL, BuildReport, VPath

ENV_DIR = "VFIELD_DIR"


class UsageError(VFieldError):
    pass


def catalog_dir(flag: str | None) -> Path:
    """``--catalog`` wins over ``$VFIELD_DIR``, which wins over the cwd."""
    if flag:
        return Path(flag)
    env = os.environ.get(ENV_DIR)
    return Path(env) if env else Path.cwd()


@contextmanager
def catalog_lock(root: Path) -> Iterator[None]:
    lock = root / LOCK_FILE
    try:
        fd = os.open(lock, os.O_CREAT | os.O_EXCL | os.O_WRONLY, 0o644)
    except FileExistsError:
        raise CatalogLockedError(
            f"catalog {root} is locked by another process "
            f"(remove {lock} if no vfield process is running)"
        ) from None
    try:
        os.write(fd, f"{os.getpid()}\n".encode())
        os.close(fd)
        yield
    finally:
        try:
            lock.unlink()
        except FileNotFoundError:
            pass


def parse_vpath(text: str) -> VPath:
    text = text.strip("/")
    if not text:
        return ()
    parts = tuple(text.split("/"))
    if any(not p for p in parts):
        raise UsageError(f"bad path {text!r}: empty component")
    return parts


def parse_id(text: str) -> int:
    try:
        value = int(text)
    except ValueError:
        raise UsageError(f"not a file id: {text!r}") from None
    if value < 1:
        raise UsageError(f"not a file id: {text!r}")
    return value


def parse_id_list(text: str) -> list[int]:
    return [parse_id(t) for t in text.split(",") if t.strip()]


def parse_missing(text: str) -> tuple[str, str]:
    if text == "skip":
        return "skip", DEFAULT_BUCKET_LABEL
    if text == "bucket":
        return "bucket", DEFAULT_BUCKET_LABEL
    if text.startswith("bucket="):
        return "bucket", text[len("bucket="):]
    raise UsageError(f"--missing must be skip, bucket or bucket=<label>, not {text!r}")


def _show(path: VPath) -> str:
    return "/" + "/".join(path)


# -- file field ---------------------------------------------------------------


def collect_paths(paths: Sequence[str]) -> list[Path]:
    """Expand directories into their files, sorted by path."""
    found: list[Path] = []
    for raw in paths:
        p = Path(raw)
        if p.is_dir():
            found.extend(sorted(q for q in p.rglob("*") if q.is_file()))
        elif p.is_file():
            found.append(p)
        else:
            raise UsageError(f"no such file or directory: {raw}")
    return found


def cmd_add(cat: Catalog, args: argparse.Namespace, out: TextIO) -> None:
    for path in collect_paths(args.paths):
        file_id, dup = cat.add_file(path.read_bytes(), path.name)
        entry = cat.get_file(file_id)
        flag = "dup" if dup else "new"
        out.write(f"{file_id}\t{entry.digest[:12]}\t{flag}\t{path.name}\n")


def cmd_ls(cat: Catalog, args: argparse.Namespace, out: TextIO) -> None:
    for e in cat.list_files():
        owner = cat.owner_of(e.id) or "-"
        out.write(f"{e.id}\t{e.digest[:12]}\t{e.size}\t{e.ingest_name}\t{owner}\n")


def cmd_rm(cat: Catalog, args: argparse.Namespace, out: TextIO) -> None:
    cat.remove_file(parse_id(args.id))


def cmd_cat(cat: Catalog, args: argparse.Namespace, out: TextIO) -> None:
    data = cat.read_content(parse_id(args.id))
    sink = getattr(sys.stdout, "buffer", None)
    if sink is None:
        out.write(data.decode("utf-8", errors="replace"))
    else:
        sink.write(data)
        sink.flush()


def cmd_verify(cat: Catalog, args: argparse.Namespace, out: TextIO) -> None:
    problems = cat.verify_field()
    for p in problems:
        out.write(f"{p.kind}\t{p.id}\t{p.expected}\t{p.actual or '-'}\n")
    if not problems:
        out.write("ok\n")


# -- sections and attributes --------------------------------------------------


def matrix_csv(cat: Catalog, section: str) -> str:
    m = cat.matrix(section)
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(["id", *m.attributes])
    for file_id, row in zip(m.file_ids, m.cells):
        writer.writerow([file_id, *("" if v is None else v for v in row)])
    return buf.getvalue()


def cmd_section(cat: Catalog, args: argparse.Namespace, out: TextIO) -> None:
    action = args.action
    if action == "create":
        cat.create_section(args.name)
    elif action == "assign":
        for raw in args.ids:
            cat.assign_file(args.name, parse_id(raw))
    elif action == "list":
        for s in cat.sections.values():
            out.write(f"{s.name}\t{len(s.file_ids)} files\t{len(s.schema)} attributes"
                      f"\t{len(s.trees)} trees\n")
    elif action == "show":
        if args.csv:
            out.write(matrix_csv(cat, args.name))
            return
        m = cat.matrix(args.name)
        out.write("\t".join(["id", "name", *m.attributes]) + "\n")
        for file_id, row in zip(m.file_ids, m.cells):
            name = cat.get_file(file_id).ingest_name
            cells = ["-" if v is None else v for v in row]
            out.write("\t".join([str(file_id), name, *cells]) + "\n")


def import_csv(cat: Catalog, section: str, text: str) -> int:
    """Apply a CSV of ``id,<attr>,...`` rows; all-or-nothing.

    Returns the number of rows applied.
    """
    sec = cat.section(section)
    rows = list(csv.reader(io.StringIO(text)))
    if not rows:
        raise UsageError("CSV is empty")
    header, body = rows[0], rows[1:]
    if not header or header[0] != "id":
        raise UsageError("CSV header must start with 'id'")
    attrs = header[1:]
    for attr in attrs:
        if attr not in sec.schema:
            raise NotFoundError(f"attribute {attr!r} is not defined in {section!r}")
    if len(set(attrs)) != len(attrs):
        raise UsageError("CSV header repeats an attribute")

    updates: list[tuple[int, str, str | None]] = []
    for lineno, row in enumerate(body, start=2):
        if not row:
            continue
        if len(row) != len(header):
            raise UsageError(f"CSV line {lineno}: expected {len(header)} cells")
        file_id = parse_id(row[0])
        if file_id not in sec:
            raise NotFoundError(f"CSV line {lineno}: file {file_id} is not in {section!r}")
        for attr, cell in zip(attrs, row[1:]):
            value = cell if cell != "" else None
            if value is not None:
                check_value(value)
            updates.append((file_id, attr, value))
    for file_id, attr, value in updates:
        sec.set_value(file_id, attr, value)
    return len({u[0] for u in updates})


def cmd_attr(cat: Catalog, args: argparse.Namespace, out: TextIO) -> None:
    action = args.action
    if action == "define":
        for attr in args.attrs:
            cat.define_attribute(args.section, attr)
    elif action == "set":
        cat.set_value(args.section, parse_id(args.id), args.attr, args.value)
    elif action == "import-csv":
        text = Path(args.file).read_text(encoding="utf-8-sig")
        count = import_csv(cat, args.section, text)
        out.write(f"imported {count} rows\n")


# -- trees ----------------------------------------------------------------


def format_report(report: BuildReport) -> str:
    lines = [f"tree: {report.tree}", f"levels: {report.depth}"]
    for level, (count, parents) in enumerate(zip(report.levels, report.fanout), 1):
        line = f"level {level}: {count} dirs"
        if level > 1:
            line += " (" + ", ".join(f"{_show(p)}: {n}" for p, n in parents) + ")"
        lines.append(line)
    lines.append(f"attached: {report.attached}")
    lines.append(f"skipped: {len(report.skipped)}")
    for file_id, attr in report.skipped:
        lines.append(f"  file {file_id}: no value for {attr}")
    return "\n".join(lines) + "\n"


def cmd_tree(cat: Catalog, args: argparse.Namespace, out: TextIO) -> None:
    action = args.action
    if action == "ls" and args.tree is None:
        for t in cat.section(args.section).trees.values():
            kind = "manual" if t.origin is None else "auto: " + ",".join(t.origin.attributes)
            out.write(f"{t.name}\t{kind}\n")
        return
    if action == "new":
        cat.create_tree(args.section, args.tree)
        return
    if action == "build":
        attrs = [a for a in args.by.split(",") if a]
        files = parse_id_list(args.files) if args.files else None
        missing, label = parse_missing(args.missing)
        _, report = cat.build_auto(args.section, args.tree, attrs, files, missing, label)
        out.write(format_report(report))
        return
    if action == "rebuild":
        _, report = cat.section(args.section).rebuild(args.tree)
        out.write(format_report(report))
        return
    if action == "rm":
        cat.section(args.section).delete_tree(args.tree)
        return

    tree = cat.tree(args.section, args.tree)
    if action == "mkdir":
        path = parse_vpath(args.path)
        if not path:
            raise UsageError("mkdir needs a non-root path")
        tree.mkdir(path[:-1], path[-1])
    elif action == "link":
        for raw in args.ids:
            tree.link(parse_vpath(args.path), parse_id(raw))
    elif action == "unlink":
        for raw in args.ids:
            tree.unlink(parse_vpath(args.path), parse_id(raw))
    elif action == "rmdir":
        tree.rmdir(parse_vpath(args.path))
    elif action == "mv":
        tree.move_dir(parse_vpath(args.src), parse_vpath(args.dest))
    elif action == "ls":
        view = tree.resolve(parse_vpath(args.path or ""))
        for name in view.dirs:
            out.write(f"{name}/\n")
        for file_id in sorted(view.files):
            out.write(f"[{file_id}] {cat.get_file(file_id).ingest_name}\n")
    elif action == "render":
        out.write(render_tree(tree, cat.field))
    elif action == "export":
        result = export_tree(tree, cat.field, args.target)
        out.write(
            f"exported {len(result.placed)} files in {result.dirs} dirs to "
            f"{result.target} ({result.linked} linked, {result.copied} copied)\n"
        )


# -- argument parsing -----------------------------------------------------


Handler = Callable[[Catalog, argparse.Namespace, TextIO], None]


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(
        prog="vfield",
        description="deduplicated file field with virtual directory trees",
    )
    ap.add_argument("--catalog", help=f"catalog directory (default: ${ENV_DIR} or cwd)")
    sub = ap.add_subparsers(dest="command", required=True)

    def command(name: str, handler: Handler | None, mutates: bool, **kw) -> argparse.ArgumentParser:
        p = sub.add_parser(name, **kw)
        p.set_defaults(handler=handler, mutates=mutates)
        return p

    p = command("init", None, True, help="create an empty catalog")
    p.add_argument("dir", nargs="?")

    p = command("add", cmd_add, True, help="ingest files or directories")
    p.add_argument("paths", nargs="+")
    command("ls", cmd_ls, False, help="list the file field")
    p = command("rm", cmd_rm, True, help="remove a section-less file")
    p.add_argument("id")
    p = command("cat", cmd_cat, False, help="write a file's content to stdout")
    p.add_argument("id")
    command("verify", cmd_verify, False, help="re-hash every blob")

    sp = command("section", cmd_section, True, help="sections").add_subparsers(
        dest="action", required=True
    )
    sp.add_parser("create").add_argument("name")
    p = sp.add_parser("assign")
    p.add_argument("name")
    p.add_argument("ids", nargs="+")
    p = sp.add_parser("show")
    p.add_argument("name")
    p.add_argument("--csv", action="store_true")
    sp.add_parser("list")

    ap_ = command("attr", cmd_attr, True, help="attributes")
    sp = ap_.add_subparsers(dest="action", required=True)
    p = sp.add_parser("define")
    p.add_argument("section")
    p.add_argument("attrs", nargs="+")
    p = sp.add_parser("set", help="set a value; omit VALUE to clear the cell")
    p.add_argument("section")
    p.add_argument("id")
    p.add_argument("attr")
    p.add_argument("value", nargs="?")
    p = sp.add_parser("import-csv")
    p.add_argument("section")
    p.add_argument("file")

    sp = command("tree", cmd_tree, True, help="virtual trees").add_subparsers(
        dest="action", required=True
    )

    def tree_cmd(name: str, **kw) -> argparse.ArgumentParser:
        p = sp.add_parser(name, **kw)
        p.add_argument("section")
        p.add_argument("tree")
        return p

    tree_cmd("new")
    tree_cmd("mkdir").add_argument("path")
    for name in ("link", "unlink"):
        p = tree_cmd(name)
        p.add_argument("path")
        p.add_argument("ids", nargs="+")
    tree_cmd("rmdir").add_argument("path")
    p = tree_cmd("mv")
    p.add_argument("src")
    p.add_argument("dest", help="new parent directory")
    p = tree_cmd("build")
    p.add_argument("--by", required=True, help="comma-separated attributes, top level first")
    p.add_argument("--files", help="comma-separated file ids (default: whole section)")
    p.add_argument("--missing", default="skip", help="skip | bucket | bucket=<label>")
    tree_cmd("rebuild")
    tree_cmd("rm")
    p = sp.add_parser("ls")
    p.add_argument("section")
    p.add_argument("tree", nargs="?")
    p.add_argument("path", nargs="?")
    tree_cmd("render")
    tree_cmd("export").add_argument("target")
    return ap


# Read-only sub-actions of otherwise mutating commands.
_READ_ONLY = {
    ("section", "show"), ("section", "list"),
    ("tree", "ls"), ("tree", "render"), ("tree", "export"),
}


def run(args: argparse.Namespace, out: TextIO) -> None:
    root = catalog_dir(args.catalog)
    if args.command == "init":
        if args.dir:
            root = Path(args.dir)
        root.mkdir(parents=True, exist_ok=True)
        with catalog_lock(root):
            Catalog.init(root)
        out.write(f"initialized catalog in {root}\n")
        return

    if not (root / CATALOG_FILE).is_file():
        raise UsageError(f"no catalog in {root} (run 'vfield init')")
    with catalog_lock(root):
        cat = Catalog.open(root)
        buf = io.StringIO()
        args.handler(cat, args, buf)
        mutates = args.mutates and (args.command, getattr(args, "action", None)) not in _READ_ONLY
        if mutates:
            # Re-run the load-time checks before anything reaches disk.
            persistence.loads(persistence.dumps(cat), root)
            cat.save()
        out.write(buf.getvalue())


def main(argv: Sequence[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        run(args, sys.stdout)
    except (VFieldError, OSError, ValueError) as exc:
        print(f"vfield: error: {exc}", file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
