import hashlib
import os

import pytest

from vfield import ExportError, export_tree, render_tree
from vfield.render import export_names


@pytest.fixture
def books(catalog):
    catalog.create_section("books")
    catalog.define_attribute("books", "год")
    catalog.define_attribute("books", "автор")
    rows = [("1830", "Пушкин", "poems.txt"), ("1830", "Пушкин", "poems.txt"),
            ("1842", "Гоголь", "souls"), ("1830", "Гоголь", "notes.md")]
    for n, (year, author, name) in enumerate(rows, 1):
        catalog.add_file(f"content {n}".encode(), name)
        catalog.assign_file("books", n)
        catalog.set_value("books", n, "год", year)
        catalog.set_value("books", n, "автор", author)
    return catalog


def test_render_bare_tree(books):
    tree = books.create_tree("books", "пусто")
    assert render_tree(tree, books.field) == "пусто/\n"


def test_render_golden(books):
    tree, _ = books.build_auto("books", "years", ["год", "автор"])
    assert render_tree(tree, books.field) == (
        "years/\n"
        "├── 1830/\n"
        "│   ├── Гоголь/\n"
        "│   │   └── [4] notes.md\n"
        "│   └── Пушкин/\n"
        "│       ├── [1] poems.txt\n"
        "│       └── [2] poems.txt\n"
        "└── 1842/\n"
        "    └── Гоголь/\n"
        "        └── [3] souls\n"
    )


def test_render_dirs_before_files(books):
    tree = books.create_tree("books", "m")
    tree.link((), 3)
    tree.link((), 1)
    tree.mkdir((), "z")
    assert render_tree(tree, books.field) == "m/\n├── z/\n├── [1] poems.txt\n└── [3] souls\n"


def test_export_names_disambiguate(books):
    tree, _ = books.build_auto("books", "t", ["год"])
    leaf = tree.root.child("1830")
    assert export_names(leaf, books.field) == {
        1: "poems~1.txt", 2: "poems~2.txt", 4: "notes.md"
    }


def test_export_name_clashing_with_dir(books):
    tree = books.create_tree("books", "m")
    tree.mkdir((), "souls")
    tree.link((), 3)
    assert export_names(tree.root, books.field) == {3: "souls~3"}


def test_export_fidelity(books, tmp_path):
    tree, _ = books.build_auto("books", "t", ["автор", "год"])
    result = export_tree(tree, books.field, tmp_path / "out")
    assert result.linked + result.copied == 4
    on_disk = sorted(
        str(p.relative_to(tmp_path / "out")) for p in (tmp_path / "out").rglob("*")
    )
    expected = ["/".join(path) for path, _ in tree.walk() if path]
    for dest, file_id in result.placed:
        expected.append(str(dest.relative_to(tmp_path / "out")))
        assert dest.parent.relative_to(tmp_path / "out").parts == tree.locate(file_id)
        digest = hashlib.sha256(dest.read_bytes()).hexdigest()
        assert digest == books.get_file(file_id).digest
    assert on_disk == sorted(expected)


def test_export_copy_fallback(books, tmp_path, monkeypatch):
    def no_links(*args):
        raise OSError("links unsupported")

    monkeypatch.setattr("vfield.render.os.link", no_links)
    tree, _ = books.build_auto("books", "t", ["год"])
    result = export_tree(tree, books.field, tmp_path / "out")
    assert (result.linked, result.copied) == (0, 4)
    for dest, file_id in result.placed:
        assert not os.path.samefile(dest, books.field.blob_path(books.get_file(file_id)))
        assert dest.read_bytes() == books.read_content(file_id)


def test_export_refuses_non_empty(books, tmp_path):
    target = tmp_path / "out"
    target.mkdir()
    (target / "keep.txt").write_text("x")
    tree, _ = books.build_auto("books", "t", ["год"])
    with pytest.raises(ExportError):
        export_tree(tree, books.field, target)
    assert [p.name for p in target.iterdir()] == ["keep.txt"]
